//! Level-1 Galois cohomology of `O_L` and the element-level verifiers for
//! trace-zero Witt vectors.
//!
//! Working mod `p^N` makes `ker(tr)` too large: an element whose trace is
//! merely divisible by `p^N` looks trace-free. The true kernel mod `p^N` is
//! recovered as the kernel mod `p^{N+4}` reduced to `N`, which is exact as
//! long as the nonzero elementary divisors of the trace are at most `p^4`;
//! the `H^1` computation repeats at `N + 4` and demands the same answer.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::extension::ExtensionData;
use crate::linalg::{self, HowellBasis, LinearMap, QuotientInvariants};
use crate::tower::{OLElement, Valuation};
use crate::witt::{Corrections, WittRing, WittVec};

/// Extra precision used to saturate the trace kernel.
pub const KERNEL_LIFT: u32 = 4;
/// Resamples of `a_{n-1}` before the sampler restarts from a fresh `a_0`.
pub const RETRIES_PER_LEVEL: usize = 64;
/// Fresh starts before the sampler gives up.
pub const MAX_RESTARTS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Operator {
    Trace,
    SigmaMinusOne,
}

pub fn linear_map_of(ext: &ExtensionData, which: Operator) -> LinearMap {
    match which {
        Operator::Trace => ext.trace_map(),
        Operator::SigmaMinusOne => ext.sigma_minus_one_map(),
    }
}

/// Some `x` with `map(x) = b`.
pub fn solve_linear(map: &LinearMap, b: &OLElement) -> Result<OLElement> {
    let x = linalg::solve(map, b.coefficients())?;
    Ok(b.tower().element(x))
}

/// `ker(tr)` mod `p^N` with the truncation artifacts removed.
pub fn saturated_trace_kernel(ext: &ExtensionData) -> Result<HowellBasis> {
    let wide = ext.at_precision(ext.precision() + KERNEL_LIFT)?;
    let k = linalg::kernel(&wide.trace_map());
    Ok(k.reduce_precision(ext.residues()))
}

/// Everything the level-1 checks need for one extension.
#[derive(Clone, Debug)]
pub struct LevelOne {
    ext: Arc<ExtensionData>,
    trace: LinearMap,
    sigma_minus_one: LinearMap,
    kernel: HowellBasis,
    trace_image: HowellBasis,
    coboundaries: HowellBasis,
}

impl LevelOne {
    pub fn new(ext: Arc<ExtensionData>) -> Result<Self> {
        let trace = linear_map_of(&ext, Operator::Trace);
        let sigma_minus_one = linear_map_of(&ext, Operator::SigmaMinusOne);
        let kernel = saturated_trace_kernel(&ext)?;
        let trace_image = linalg::image(&trace);
        let coboundaries = linalg::image(&sigma_minus_one);
        Ok(LevelOne { ext, trace, sigma_minus_one, kernel, trace_image, coboundaries })
    }

    pub fn extension(&self) -> &Arc<ExtensionData> {
        &self.ext
    }

    pub fn trace(&self) -> &LinearMap {
        &self.trace
    }

    pub fn sigma_minus_one(&self) -> &LinearMap {
        &self.sigma_minus_one
    }

    /// Saturated `ker(tr)`.
    pub fn kernel(&self) -> &HowellBasis {
        &self.kernel
    }

    pub fn trace_image(&self) -> &HowellBasis {
        &self.trace_image
    }

    /// `(σ - 1) O_L`.
    pub fn coboundaries(&self) -> &HowellBasis {
        &self.coboundaries
    }

    pub fn is_coboundary(&self, a: &OLElement) -> bool {
        self.coboundaries.contains(a.coefficients())
    }

    pub fn random_kernel_element<R: Rng + ?Sized>(&self, rng: &mut R) -> OLElement {
        self.ext.tower().element(self.kernel.random_element(rng))
    }

    /// Solution of `tr(x) = c` normalized against the kernel.
    pub fn trace_preimage(&self, c: &OLElement) -> Result<OLElement> {
        if !self.trace_image.contains(c.coefficients()) {
            return Err(Error::NoSolution);
        }
        let x = linalg::solve(&self.trace, c.coefficients())?;
        Ok(self.ext.tower().element(self.kernel.reduce(&x).0))
    }
}

/// `d = ⌊(t+1)(p-1)/p⌋`, checked against the computed image of the trace:
/// `tr(O_L) = π_K^d O_K`.
pub fn trace_image_exponent(ext: &ExtensionData) -> Result<u64> {
    let p = ext.p();
    let d = (ext.t() + 1) * (p - 1) / p;
    let image = linalg::image(&ext.trace_map());
    let tower = ext.tower();
    let pk = tower.base_uniformizer();
    let rows: Vec<Vec<u64>> = (0..ext.e_k()).map(|j| pk.pow(d + j).coefficients().to_vec()).collect();
    let expected = HowellBasis::new(ext.residues(), tower.dimension(), rows);
    if d >= ext.precision() as u64 * ext.e_k() {
        return Err(Error::PrecisionExhausted(format!("trace image exponent {d} at the horizon")));
    }
    if image != expected {
        return Err(Error::CrossCheckFailed(format!("trace image differs from π_K^{d} O_K")));
    }
    Ok(d)
}

/// Pass/fail/skip counts of one check.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    pub trials: u64,
    pub passes: u64,
    pub failures: u64,
    pub skipped: u64,
}

impl Tally {
    pub fn record(&mut self, outcome: Option<bool>) {
        self.trials += 1;
        match outcome {
            Some(true) => self.passes += 1,
            Some(false) => self.failures += 1,
            None => self.skipped += 1,
        }
    }

    pub fn merge(&mut self, other: &Tally) {
        self.trials += other.trials;
        self.passes += other.passes;
        self.failures += other.failures;
        self.skipped += other.skipped;
    }

    pub fn ok(&self) -> bool {
        self.failures == 0
    }
}

/// A failing sample, with balanced coordinates of each component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub trial: u64,
    pub check: String,
    pub vector: Vec<Vec<i64>>,
    pub detail: String,
}

/// Generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Outcome of the two trace lemmas on one element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceLemmaSample {
    pub v_a: Valuation,
    /// `p v_K(tr a) >= v_L(a) + t(p-1)`; `None` when undecidable at precision.
    pub lemma1: Option<bool>,
    /// `v_K(tr(a^p) - tr(a)^p) = v_K(p) + v_L(a)`.
    pub lemma2: Option<bool>,
}

pub fn check_trace_lemmas(ext: &ExtensionData, a: &OLElement) -> TraceLemmaSample {
    let p = ext.p();
    let v_a = a.valuation();
    let Valuation::Exact(va) = v_a else {
        return TraceLemmaSample { v_a, lemma1: None, lemma2: None };
    };
    let tr = ext.trace(a);
    let bound = va + ext.t() * (p - 1);
    let lemma1 = match tr.block(0).valuation() {
        Valuation::Exact(vk) => Some(p * vk >= bound),
        Valuation::AtLeast(h) => (p * h >= bound).then_some(true),
    };
    let diff = &ext.trace(&a.pow(p)) - &tr.pow(p);
    let expected = ext.v_k_of_p() + va;
    let lemma2 = match diff.block(0).valuation() {
        Valuation::Exact(vk) => Some(vk == expected),
        Valuation::AtLeast(h) => (h > expected).then_some(false),
    };
    TraceLemmaSample { v_a, lemma1, lemma2 }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TraceLemmaReport {
    pub lemma1: Tally,
    pub lemma2: Tally,
    pub counterexamples: Vec<Counterexample>,
}

impl TraceLemmaReport {
    pub fn ok(&self) -> bool {
        self.lemma1.ok() && self.lemma2.ok()
    }
}

/// Random `a = π_L^s u` with `0 <= s <= t + e_L`.
pub fn verify_trace_lemmas(ext: &ExtensionData, trials: u64, seed: u64) -> TraceLemmaReport {
    let tower = ext.tower();
    let pi = tower.uniformizer();
    let outcomes: Vec<(OLElement, TraceLemmaSample)> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let s = rng.gen_range(0..=ext.t() + ext.e_l());
            let a = &pi.pow(s) * &tower.random(&mut rng);
            let out = check_trace_lemmas(ext, &a);
            (a, out)
        })
        .collect();
    let mut report = TraceLemmaReport::default();
    for (trial, (a, out)) in outcomes.into_iter().enumerate() {
        report.lemma1.record(out.lemma1);
        report.lemma2.record(out.lemma2);
        for (name, o) in [("lemma1", out.lemma1), ("lemma2", out.lemma2)] {
            if o == Some(false) {
                report.counterexamples.push(Counterexample {
                    trial: trial as u64,
                    check: name.into(),
                    vector: vec![a.signed_coefficients()],
                    detail: format!("v_L(a) = {}", out.v_a),
                });
            }
        }
    }
    report
}

/// Samples trace-zero Witt vectors of a fixed length.
#[derive(Clone, Debug)]
pub struct TraceZeroSampler {
    level_one: Arc<LevelOne>,
    witt: WittRing,
    corrections: Corrections,
}

impl TraceZeroSampler {
    pub fn new(level_one: Arc<LevelOne>, m: usize) -> Result<Self> {
        let ext = level_one.extension().clone();
        let witt = WittRing::new(ext.clone(), m + 1)?;
        let corrections = Corrections::new(ext, m + 1)?;
        Ok(TraceZeroSampler { level_one, witt, corrections })
    }

    pub fn witt(&self) -> &WittRing {
        &self.witt
    }

    pub fn level_one(&self) -> &Arc<LevelOne> {
        &self.level_one
    }

    /// `-f_n(σ^i(a_j))`, the value `tr(a_n)` must take.
    pub fn required_trace(&self, prefix: &[OLElement], n: usize) -> OLElement {
        let tower = self.witt.extension().tower();
        let mut comps = prefix[..n].to_vec();
        comps.resize(self.witt.length(), tower.zero());
        -&self.corrections.f_value(&WittVec::new(comps), n)
    }

    /// Extends `a_0` level by level with `a_n = particular + offset(n)`.
    /// Returns the first level with no solution.
    pub fn extend(
        &self,
        a0: OLElement,
        mut offset: impl FnMut(usize) -> OLElement,
    ) -> std::result::Result<WittVec, usize> {
        let mut comps = vec![a0];
        for n in 1..self.witt.length() {
            let c = self.required_trace(&comps, n);
            let x = self.level_one.trace_preimage(&c).map_err(|_| n)?;
            comps.push(&x + &offset(n));
        }
        Ok(WittVec::new(comps))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<WittVec> {
        let lo = &self.level_one;
        let length = self.witt.length();
        let mut failing = 1;
        for _ in 0..MAX_RESTARTS {
            let mut comps = vec![lo.random_kernel_element(rng)];
            let mut particular = vec![comps[0].tower().zero()];
            let mut tries = 0;
            while comps.len() < length && tries <= RETRIES_PER_LEVEL {
                let n = comps.len();
                let c = self.required_trace(&comps, n);
                match lo.trace_preimage(&c) {
                    Ok(x) => {
                        comps.push(&x + &lo.random_kernel_element(rng));
                        particular.push(x);
                        tries = 0;
                    }
                    Err(_) => {
                        failing = n;
                        tries += 1;
                        let fresh = lo.random_kernel_element(rng);
                        comps[n - 1] = &particular[n - 1] + &fresh;
                    }
                }
            }
            if comps.len() == length {
                return Ok(WittVec::new(comps));
            }
        }
        Err(Error::SamplingExhausted { level: failing })
    }
}

/// One trace-zero vector of length `m + 1` from `seed`.
pub fn sample_trace_zero(ext: Arc<ExtensionData>, m: usize, seed: u64) -> Result<WittVec> {
    let lo = Arc::new(LevelOne::new(ext)?);
    TraceZeroSampler::new(lo, m)?.sample(&mut trial_rng(seed, 0))
}

/// Margin `p v(a_{n-1}) - min{v(a_n) + t(p-1), p t(p-1)}` at each level
/// `n >= 1`; `None` where a valuation reached the horizon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CascadeCheck {
    pub margins: Vec<Option<i64>>,
}

impl CascadeCheck {
    pub fn ok(&self) -> bool {
        self.margins.iter().flatten().all(|m| *m >= 0)
    }

    pub fn skipped(&self) -> usize {
        self.margins.iter().filter(|m| m.is_none()).count()
    }
}

pub fn verify_cascade(a: &WittVec, ext: &ExtensionData) -> CascadeCheck {
    let p = ext.p() as i64;
    let t = ext.t() as i64;
    let margins = (1..a.len())
        .map(|n| {
            let prev = a.component(n - 1).valuation().exact()? as i64;
            let cur = a.component(n).valuation().exact()? as i64;
            Some(p * prev - (cur + t * (p - 1)).min(p * t * (p - 1)))
        })
        .collect();
    CascadeCheck { margins }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CascadeReport {
    /// One tally per level `n = 1..=m`.
    pub levels: Vec<Tally>,
    /// Smallest margin seen per level.
    pub min_margins: Vec<Option<i64>>,
    pub counterexamples: Vec<Counterexample>,
}

impl CascadeReport {
    pub fn ok(&self) -> bool {
        self.levels.iter().all(Tally::ok)
    }

    pub fn total(&self) -> Tally {
        let mut t = Tally::default();
        self.levels.iter().for_each(|l| t.merge(l));
        t
    }
}

fn sample_all(sampler: &TraceZeroSampler, trials: u64, seed: u64) -> Result<Vec<WittVec>> {
    (0..trials).into_par_iter().map(|trial| sampler.sample(&mut trial_rng(seed, trial))).collect()
}

pub fn cascade_suite(ext: Arc<ExtensionData>, m: usize, trials: u64, seed: u64) -> Result<CascadeReport> {
    let lo = Arc::new(LevelOne::new(ext.clone())?);
    let sampler = TraceZeroSampler::new(lo, m)?;
    let samples = sample_all(&sampler, trials, seed)?;
    let mut report =
        CascadeReport { levels: vec![Tally::default(); m], min_margins: vec![None; m], ..Default::default() };
    for (trial, a) in samples.iter().enumerate() {
        if !sampler.witt().trace(a)?.is_zero() {
            return Err(Error::CrossCheckFailed(format!("sampled vector {a} is not trace-free")));
        }
        let check = verify_cascade(a, &ext);
        for (n, margin) in check.margins.iter().enumerate() {
            report.levels[n].record(margin.map(|m| m >= 0));
            if let Some(m) = margin {
                let best = &mut report.min_margins[n];
                *best = Some(best.map_or(*m, |b| b.min(*m)));
                if *m < 0 {
                    report.counterexamples.push(Counterexample {
                        trial: trial as u64,
                        check: format!("level {}", n + 1),
                        vector: a.signed_components(),
                        detail: format!("margin {m}"),
                    });
                }
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PropositionMode {
    /// `p^m > t`: every restriction must be a coboundary.
    Normal,
    /// `p^m <= t`: look for a trace-zero vector whose `a_0` is not one.
    NegativeControl,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropositionReport {
    pub mode: PropositionMode,
    pub p: u64,
    pub t: u64,
    pub m: usize,
    pub tally: Tally,
    pub counterexamples: Vec<Counterexample>,
    /// Negative control: a trace-zero vector with `a_0 ∉ (σ-1) O_L`.
    pub witness: Option<WittVec>,
}

impl PropositionReport {
    pub fn ok(&self) -> bool {
        match self.mode {
            PropositionMode::Normal => self.tally.ok(),
            PropositionMode::NegativeControl => true,
        }
    }

    pub fn into_result(self) -> Result<Self> {
        match self.counterexamples.first() {
            Some(c) if self.mode == PropositionMode::Normal => {
                Err(Error::PropositionViolated { vector: format!("{:?}", c.vector) })
            }
            _ => Ok(self),
        }
    }
}

pub fn proposition_mode(p: u64, t: u64, m: usize) -> PropositionMode {
    let pm = (p as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if pm > t as u128 {
        PropositionMode::Normal
    } else {
        PropositionMode::NegativeControl
    }
}

/// `v_L(a_0) > t - 1` and `(σ-1)x = a_0` solvable.
pub fn check_restriction(lo: &LevelOne, a: &WittVec) -> bool {
    let t = lo.extension().t();
    let a0 = a.component(0);
    let big_enough = match a0.valuation() {
        Valuation::Exact(v) => v + 1 > t,
        Valuation::AtLeast(_) => true,
    };
    big_enough && solve_linear(lo.sigma_minus_one(), a0).is_ok()
}

/// Deterministic candidates for the negative control: start from
/// `a_0 = π_L^s` (`1 <= s < t`, trace-free) and extend with particular
/// solutions only.
pub fn negative_control_witnesses(sampler: &TraceZeroSampler) -> Vec<WittVec> {
    let lo = sampler.level_one();
    let ext = lo.extension();
    let tower = ext.tower();
    let pi = tower.uniformizer();
    (1..ext.t())
        .map(|s| pi.pow(s))
        .filter(|a0| ext.trace(a0).is_zero())
        .filter_map(|a0| sampler.extend(a0, |_| tower.zero()).ok())
        .collect()
}

pub fn verify_proposition(ext: Arc<ExtensionData>, m: usize, trials: u64, seed: u64) -> Result<PropositionReport> {
    let (p, t) = (ext.p(), ext.t());
    let mode = proposition_mode(p, t, m);
    let lo = Arc::new(LevelOne::new(ext)?);
    let sampler = TraceZeroSampler::new(lo.clone(), m)?;
    let mut report =
        PropositionReport { mode, p, t, m, tally: Tally::default(), counterexamples: vec![], witness: None };
    match mode {
        PropositionMode::Normal => {
            let samples = sample_all(&sampler, trials, seed)?;
            for (trial, a) in samples.iter().enumerate() {
                let ok = check_restriction(&lo, a);
                report.tally.record(Some(ok));
                if !ok {
                    report.counterexamples.push(Counterexample {
                        trial: trial as u64,
                        check: "restriction is a coboundary".into(),
                        vector: a.signed_components(),
                        detail: format!("v_L(a_0) = {}", a.component(0).valuation()),
                    });
                }
            }
        }
        PropositionMode::NegativeControl => {
            for w in negative_control_witnesses(&sampler) {
                let is_free = sampler.witt().trace(&w)?.is_zero();
                let out = is_free && !lo.is_coboundary(w.component(0));
                report.tally.record(Some(out));
                if out && report.witness.is_none() {
                    report.witness = Some(w);
                }
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct H1Report {
    pub invariants: QuotientInvariants,
    /// The same computation at precision `N + 4`.
    pub invariants_wide: QuotientInvariants,
    /// `d` with `tr(O_L) = π_K^d O_K`.
    pub d: u64,
    /// `log_p |O_K / tr(O_L)|` from the cokernel of the trace matrix.
    pub trace_cokernel_exponent: u64,
}

impl H1Report {
    pub fn order(&self) -> u128 {
        self.invariants.order()
    }
}

fn h1_at(ext: &ExtensionData) -> Result<QuotientInvariants> {
    let kernel = saturated_trace_kernel(ext)?;
    let coboundaries = linalg::image(&ext.sigma_minus_one_map());
    linalg::quotient_invariants(&kernel, &coboundaries)
}

/// `ker(tr) / (σ-1) O_L` with stability and order cross-checks.
pub fn h1_report(ext: &ExtensionData) -> Result<H1Report> {
    let invariants = h1_at(ext)?;
    let wide = ext.at_precision(ext.precision() + KERNEL_LIFT)?;
    let invariants_wide = h1_at(&wide)?;
    if invariants != invariants_wide {
        return Err(Error::Unstable(format!(
            "invariant factors {:?} at N = {} but {:?} at N = {}",
            invariants.exponents,
            ext.precision(),
            invariants_wide.exponents,
            wide.precision()
        )));
    }
    let d = trace_image_exponent(ext)?;
    let image = linalg::image(&ext.trace_map());
    let trace_cokernel_exponent = ext.precision() as u64 * ext.e_k() - image.order_exponent();
    if trace_cokernel_exponent != d {
        return Err(Error::CrossCheckFailed(format!("|O_K / tr O_L| = p^{trace_cokernel_exponent} but d = {d}")));
    }
    if invariants.order_exponent() != trace_cokernel_exponent {
        return Err(Error::CrossCheckFailed(format!(
            "|H^1| = p^{} but |O_K / tr O_L| = p^{trace_cokernel_exponent}",
            invariants.order_exponent()
        )));
    }
    Ok(H1Report { invariants, invariants_wide, d, trace_cokernel_exponent })
}

pub fn h1_level1(ext: &ExtensionData) -> Result<QuotientInvariants> {
    h1_report(ext).map(|r| r.invariants)
}

//! Concrete totally ramified cyclic degree-`p` extensions `L/K` with an
//! explicit generator `σ` of `Gal(L/K)`.
//!
//! `σ` is given by its value on `π_L` and acts `O_K`-linearly, so it is
//! stored as a matrix on the flat `Z/p^N` coordinates of `O_L`. Powers
//! `σ^k`, `k < p`, are cached.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::linalg::LinearMap;
use crate::tower::{BaseRing, EisensteinPoly, OKElement, OLElement, Tower, Valuation};
use crate::zp::{parse_decimal, PrecisionInt, Residues};

/// Integer data for a user-supplied extension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CustomData {
    /// `c_0..c_{e_K-1}` of `E_K`.
    pub ek: Vec<BigInt>,
    /// `c_0..c_{p-1}` of `E_L`, each as `O_K` coordinates.
    pub el: Vec<Vec<BigInt>>,
    /// `σ(π_L)` as `p` blocks of `O_K` coordinates.
    pub sigma_pi: Vec<Vec<BigInt>>,
}

impl CustomData {
    /// From decimal strings.
    pub fn parse(ek: &[String], el: &[Vec<String>], sigma_pi: &[Vec<String>]) -> Result<Self> {
        let row = |r: &[String]| r.iter().map(|s| parse_decimal(s)).collect::<Result<Vec<_>>>();
        Ok(CustomData {
            ek: row(ek)?,
            el: el.iter().map(|r| row(r)).collect::<Result<_>>()?,
            sigma_pi: sigma_pi.iter().map(|r| row(r)).collect::<Result<_>>()?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtensionKind {
    /// `Q_2(i)/Q_2` with `π_L = 1 + i`.
    QuadraticGaussian,
    /// `Q_2(√2)/Q_2` with `π_L = √2`.
    QuadraticSqrt2,
    /// `Q_p(ζ_{p^2})/Q_p(ζ_p)` for odd `p`, `π_K = ζ_p - 1`, `π_L = ζ_{p^2} - 1`.
    CyclotomicStep,
    Custom(CustomData),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionSpec {
    pub kind: ExtensionKind,
    pub p: u64,
    pub precision: u32,
}

impl ExtensionSpec {
    pub fn quadratic_gaussian(precision: u32) -> Self {
        ExtensionSpec { kind: ExtensionKind::QuadraticGaussian, p: 2, precision }
    }

    pub fn quadratic_sqrt2(precision: u32) -> Self {
        ExtensionSpec { kind: ExtensionKind::QuadraticSqrt2, p: 2, precision }
    }

    pub fn cyclotomic_step(p: u64, precision: u32) -> Self {
        ExtensionSpec { kind: ExtensionKind::CyclotomicStep, p, precision }
    }

    pub fn custom(p: u64, precision: u32, data: CustomData) -> Self {
        ExtensionSpec { kind: ExtensionKind::Custom(data), p, precision }
    }

    /// Built-in registry lookup: `quadratic-gaussian`, `quadratic-sqrt2`,
    /// `cyclotomic-step` (with `p = 3` unless `p` is given).
    pub fn builtin(name: &str, p: Option<u64>, precision: u32) -> Result<Self> {
        match name {
            "quadratic-gaussian" | "quadratic-sqrt2" if p.is_some_and(|p| p != 2) => {
                Err(Error::InvalidSpec(format!("{name} has p = 2")))
            }
            "quadratic-gaussian" => Ok(Self::quadratic_gaussian(precision)),
            "quadratic-sqrt2" => Ok(Self::quadratic_sqrt2(precision)),
            "cyclotomic-step" => Ok(Self::cyclotomic_step(p.unwrap_or(3), precision)),
            other => Err(Error::InvalidSpec(format!("unknown extension {other:?}"))),
        }
    }

    pub fn name(&self) -> String {
        match self.kind {
            ExtensionKind::QuadraticGaussian => "quadratic-gaussian".into(),
            ExtensionKind::QuadraticSqrt2 => "quadratic-sqrt2".into(),
            ExtensionKind::CyclotomicStep => format!("cyclotomic-step-p{}", self.p),
            ExtensionKind::Custom(_) => format!("custom-p{}", self.p),
        }
    }

    pub fn with_precision(&self, precision: u32) -> Self {
        ExtensionSpec { precision, ..self.clone() }
    }

    /// `(E_K, E_L, σ(π_L))` as exact integer data.
    fn integer_data(&self) -> Result<CustomData> {
        let i = |v: i64| BigInt::from(v);
        match &self.kind {
            ExtensionKind::QuadraticGaussian => Ok(CustomData {
                ek: vec![i(-2)],
                el: vec![vec![i(2)], vec![i(-2)]],
                sigma_pi: vec![vec![i(2)], vec![i(-1)]],
            }),
            ExtensionKind::QuadraticSqrt2 => Ok(CustomData {
                ek: vec![i(-2)],
                el: vec![vec![i(-2)], vec![i(0)]],
                sigma_pi: vec![vec![i(0)], vec![i(-1)]],
            }),
            ExtensionKind::CyclotomicStep => {
                let p = self.p;
                if p == 2 || !crate::zp::is_prime(p) {
                    return Err(Error::InvalidSpec("cyclotomic-step needs an odd prime".into()));
                }
                let p = p as usize;
                let binom = |n: usize, k: usize| -> BigInt {
                    (0..k).fold(BigInt::from(1), |acc, j| acc * BigInt::from(n - j) / BigInt::from(j + 1))
                };
                let e_k = p - 1;
                // ((y+1)^p - 1)/y
                let ek: Vec<BigInt> = (0..e_k).map(|j| binom(p, j + 1)).collect();
                // (x+1)^p - (1 + y)
                let mut el = vec![vec![i(0); e_k]; p];
                el[0][1] = i(-1);
                for (k, c) in el.iter_mut().enumerate().skip(1) {
                    c[0] = binom(p, k);
                }
                // σ(ζ_{p^2}) = ζ_{p^2} ζ_p, so σ(π_L) = (π_L + 1)(1 + π_K) - 1
                let mut sigma_pi = vec![vec![i(0); e_k]; p];
                sigma_pi[0][1] = i(1);
                sigma_pi[1][0] = i(1);
                sigma_pi[1][1] = i(1);
                Ok(CustomData { ek, el, sigma_pi })
            }
            ExtensionKind::Custom(data) => Ok(data.clone()),
        }
    }
}

impl fmt::Display for ExtensionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (p = {}, N = {})", self.name(), self.p, self.precision)
    }
}

/// A validated extension at precision `N`.
#[derive(Clone, Debug)]
pub struct ExtensionData {
    spec: ExtensionSpec,
    tower: Arc<Tower>,
    sigma_pi: OLElement,
    sigma_powers: Vec<LinearMap>,
    t: u64,
}

pub fn build_extension(spec: &ExtensionSpec) -> Result<Arc<ExtensionData>> {
    ExtensionData::build(spec).map(Arc::new)
}

impl ExtensionData {
    pub fn build(spec: &ExtensionSpec) -> Result<Self> {
        let zp = Residues::new(spec.p, spec.precision)?;
        let data = spec.integer_data()?;
        let p = spec.p as usize;
        let e_k = data.ek.len();

        let ek =
            EisensteinPoly::<PrecisionInt>::new(data.ek.iter().map(|c| PrecisionInt::from_bigint(c, zp)).collect())?;
        let base = BaseRing::new(ek);
        let ok_of = |coords: &[BigInt], what: &str| -> Result<OKElement> {
            if coords.len() != e_k {
                return Err(Error::InvalidSpec(format!("{what} needs {e_k} O_K coordinates")));
            }
            Ok(base.element(coords.iter().map(|c| zp.from_bigint(c)).collect()))
        };
        if data.el.len() != p {
            return Err(Error::InvalidSpec(format!("E_L must have degree p = {p}")));
        }
        let el = data.el.iter().map(|c| ok_of(c, "E_L coefficient")).collect::<Result<Vec<_>>>()?;
        let tower = Tower::new(EisensteinPoly::<OKElement>::new(el)?);

        if data.sigma_pi.len() != p {
            return Err(Error::InvalidSpec(format!("sigma_pi needs {p} blocks")));
        }
        let mut flat = Vec::with_capacity(p * e_k);
        for blk in &data.sigma_pi {
            flat.extend(ok_of(blk, "sigma_pi block")?.coefficients().iter().copied());
        }
        let sigma_pi = tower.element(flat);

        // E_L(σπ) = 0
        let mut value = sigma_pi.pow(p as u64);
        let mut power = tower.one();
        for c in tower.modulus().coefficients() {
            value = &value + &(&tower.embed(c) * &power);
            power = &power * &sigma_pi;
        }
        if !value.is_zero() {
            return Err(Error::SigmaNotARoot);
        }

        let sigma = sigma_matrix(&tower, &sigma_pi);
        let mut sigma_powers = vec![LinearMap::identity(zp, tower.dimension())];
        for k in 1..=p {
            let next = sigma.compose(&sigma_powers[k - 1]);
            sigma_powers.push(next);
        }
        let pi = tower.uniformizer();
        if sigma_pi == pi {
            return Err(Error::SigmaWrongOrder("σ fixes π_L".into()));
        }
        let back = sigma_powers[p].apply(pi.coefficients());
        if back != pi.coefficients() {
            return Err(Error::SigmaWrongOrder("σ^p(π_L) ≠ π_L".into()));
        }
        sigma_powers.truncate(p);

        let diff = (&sigma_pi - &pi).valuation();
        let t = match diff {
            Valuation::Exact(v) if v >= 2 => v - 1,
            Valuation::Exact(_) => {
                return Err(Error::InvalidSpec("σ(π_L) - π_L must have valuation at least 2".into()))
            }
            Valuation::AtLeast(_) => {
                return Err(Error::PrecisionExhausted("ramification break beyond the precision horizon".into()))
            }
        };

        Ok(ExtensionData { spec: spec.clone(), tower, sigma_pi, sigma_powers, t })
    }

    /// Same extension rebuilt at another precision.
    pub fn at_precision(&self, precision: u32) -> Result<Self> {
        Self::build(&self.spec.with_precision(precision))
    }

    pub fn spec(&self) -> &ExtensionSpec {
        &self.spec
    }

    pub fn name(&self) -> String {
        self.spec.name()
    }

    pub fn p(&self) -> u64 {
        self.spec.p
    }

    pub fn precision(&self) -> u32 {
        self.spec.precision
    }

    pub fn residues(&self) -> Residues {
        self.tower.residues()
    }

    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }

    pub fn e_k(&self) -> u64 {
        self.tower.e_k() as u64
    }

    pub fn e_l(&self) -> u64 {
        self.tower.e_l() as u64
    }

    /// `v_K(p)`; equals `e_K` since `K/Q_p` is totally ramified.
    pub fn v_k_of_p(&self) -> u64 {
        self.e_k()
    }

    /// `N * e_L`.
    pub fn horizon(&self) -> u64 {
        self.tower.horizon()
    }

    /// The ramification break `t = v_L(σπ_L - π_L) - 1`.
    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn sigma_pi(&self) -> &OLElement {
        &self.sigma_pi
    }

    /// Matrix of `σ^k` on the flat coordinates, `0 <= k < p`.
    pub fn sigma_matrix(&self, k: usize) -> &LinearMap {
        &self.sigma_powers[k % self.sigma_powers.len()]
    }

    pub fn apply_sigma(&self, x: &OLElement, k: usize) -> OLElement {
        self.tower.element(self.sigma_matrix(k).apply(x.coefficients()))
    }

    /// `tr_{L/K}(x) = Σ_k σ^k(x)`.
    pub fn trace(&self, x: &OLElement) -> OLElement {
        (1..self.p() as usize).fold(x.clone(), |acc, k| &acc + &self.apply_sigma(x, k))
    }

    /// Matrix of the trace.
    pub fn trace_map(&self) -> LinearMap {
        self.sigma_powers[1..].iter().fold(self.sigma_powers[0].clone(), |acc, m| acc.add(m))
    }

    /// Matrix of `σ - 1`.
    pub fn sigma_minus_one_map(&self) -> LinearMap {
        self.sigma_powers[1 % self.sigma_powers.len()].sub(&self.sigma_powers[0])
    }

    /// `v_L(σ^k π_L - π_L) - 1`; independent of `k` for `1 <= k < p`.
    pub fn break_for_generator(&self, k: usize) -> Valuation {
        let pi = self.tower.uniformizer();
        match (&self.apply_sigma(&pi, k) - &pi).valuation() {
            Valuation::Exact(v) => Valuation::Exact(v.saturating_sub(1)),
            other => other,
        }
    }

    /// Rejects runs whose valuations could reach the precision horizon:
    /// requires `N e_L > 4 (t + e_L)(m + 2)`.
    pub fn precision_guard(&self, m: usize) -> Result<()> {
        let lhs = self.precision() as u64 * self.e_l();
        let rhs = 4 * (self.t + self.e_l()) * (m as u64 + 2);
        if lhs > rhs {
            Ok(())
        } else {
            Err(Error::PrecisionExhausted(format!(
                "precision guard N*e_L = {lhs} must exceed 4(t + e_L)(m + 2) = {rhs}"
            )))
        }
    }
}

fn sigma_matrix(tower: &Arc<Tower>, sigma_pi: &OLElement) -> LinearMap {
    let e_k = tower.e_k();
    let mut powers = vec![tower.one()];
    for i in 1..tower.degree() {
        powers.push(&powers[i - 1] * sigma_pi);
    }
    let columns: Vec<Vec<u64>> = (0..tower.dimension())
        .map(|c| {
            let (i, j) = (c / e_k, c % e_k);
            let pk = tower.base_uniformizer().pow(j as u64);
            (&pk * &powers[i]).coefficients().to_vec()
        })
        .collect();
    LinearMap::from_columns(tower.residues(), tower.dimension(), &columns)
}

/// `t` of a validated extension.
pub fn ramification_break(ext: &ExtensionData) -> u64 {
    ext.t()
}

/// The elements `x_μ = Π_{i<μ} σ^i(π_L)`, `0 <= μ < p`.
#[derive(Clone, Debug)]
pub struct SigmaBasis {
    elements: Vec<OLElement>,
}

impl SigmaBasis {
    pub fn elements(&self) -> &[OLElement] {
        &self.elements
    }

    pub fn get(&self, mu: usize) -> &OLElement {
        &self.elements[mu]
    }
}

/// Builds the `x_μ` and checks `v_L(x_μ) = μ` and `v_L((σ-1)x_μ) = t + μ`.
pub fn sigma_basis(ext: &ExtensionData) -> Result<SigmaBasis> {
    let tower = ext.tower();
    let pi = tower.uniformizer();
    let p = ext.p() as usize;
    let mut elements = vec![tower.one()];
    for i in 1..p {
        let next = &elements[i - 1] * &ext.apply_sigma(&pi, i - 1);
        elements.push(next);
    }
    let check = |v: Valuation, expected: u64, what: String| -> Result<()> {
        match v {
            Valuation::Exact(got) if got == expected => Ok(()),
            Valuation::Exact(got) => {
                Err(Error::CrossCheckFailed(format!("{what}: valuation {got}, expected {expected}")))
            }
            Valuation::AtLeast(_) => Err(Error::PrecisionExhausted(what)),
        }
    };
    for (mu, x) in elements.iter().enumerate() {
        check(x.valuation(), mu as u64, format!("v_L(x_{mu})"))?;
        if mu >= 1 {
            let d = &ext.apply_sigma(x, 1) - x;
            check(d.valuation(), ext.t() + mu as u64, format!("v_L((σ-1)x_{mu})"))?;
        }
    }
    Ok(SigmaBasis { elements })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_breaks() {
        let g = build_extension(&ExtensionSpec::quadratic_gaussian(32)).unwrap();
        assert_eq!((g.e_k(), g.e_l(), g.t()), (1, 2, 1));
        let s = build_extension(&ExtensionSpec::quadratic_sqrt2(32)).unwrap();
        assert_eq!((s.e_k(), s.e_l(), s.t()), (1, 2, 2));
        let c = build_extension(&ExtensionSpec::cyclotomic_step(3, 32)).unwrap();
        assert_eq!((c.e_k(), c.e_l(), c.t()), (2, 6, 2));
        let c5 = build_extension(&ExtensionSpec::cyclotomic_step(5, 20)).unwrap();
        assert_eq!((c5.e_k(), c5.e_l(), c5.t()), (4, 20, 4));
    }

    #[test]
    fn break_from_direct_difference() {
        // σπ - π computed by hand in each ring
        let g = build_extension(&ExtensionSpec::quadratic_gaussian(16)).unwrap();
        let tw = g.tower();
        assert_eq!(g.sigma_pi(), &tw.from_signed(&[2, -1]));
        assert_eq!(tw.from_signed(&[2, -2]).valuation(), Valuation::Exact(2));

        let c = build_extension(&ExtensionSpec::cyclotomic_step(3, 16)).unwrap();
        let tw = c.tower();
        // ζ_9 (ζ_3 - 1) = (1 + π_L) π_K
        let expect = &(&tw.one() + &tw.uniformizer()) * &tw.base_uniformizer();
        assert_eq!(&(c.sigma_pi() - &tw.uniformizer()), &expect);
        assert_eq!(expect.valuation(), Valuation::Exact(3));
    }

    #[test]
    fn generator_independence() {
        for spec in [ExtensionSpec::cyclotomic_step(3, 24), ExtensionSpec::cyclotomic_step(5, 16)] {
            let e = build_extension(&spec).unwrap();
            for k in 1..e.p() as usize {
                assert_eq!(e.break_for_generator(k), Valuation::Exact(e.t()), "{spec} k={k}");
            }
        }
    }

    #[test]
    fn sigma_is_a_ring_automorphism() {
        let e = build_extension(&ExtensionSpec::cyclotomic_step(3, 20)).unwrap();
        let tw = e.tower();
        let a = tw.from_signed(&[3, -7, 1, 4, 0, 2]);
        let b = tw.from_signed(&[-1, 5, 9, 0, 3, -2]);
        assert_eq!(e.apply_sigma(&(&a * &b), 1), &e.apply_sigma(&a, 1) * &e.apply_sigma(&b, 1));
        assert_eq!(e.apply_sigma(&e.apply_sigma(&a, 1), 2), a);
        // trace lands in O_K
        assert!(e.trace(&a).in_base());
    }

    #[test]
    fn sigma_basis_valuations() {
        let s = build_extension(&ExtensionSpec::quadratic_sqrt2(32)).unwrap();
        let basis = sigma_basis(&s).unwrap();
        assert_eq!(basis.get(0), &s.tower().one());
        assert_eq!(basis.get(1), &s.tower().uniformizer());
        let d = &s.apply_sigma(basis.get(1), 1) - basis.get(1);
        assert_eq!(d, s.tower().uniformizer().scale_signed(-2));
        assert_eq!(d.valuation(), Valuation::Exact(3));

        for spec in [ExtensionSpec::quadratic_gaussian(32), ExtensionSpec::cyclotomic_step(3, 32)] {
            let e = build_extension(&spec).unwrap();
            let b = sigma_basis(&e).unwrap();
            // π_L σ(x_μ) = x_μ σ^μ(π_L)
            let pi = e.tower().uniformizer();
            for mu in 1..e.p() as usize {
                let lhs = &pi * &e.apply_sigma(b.get(mu), 1);
                let rhs = b.get(mu) * &e.apply_sigma(&pi, mu);
                assert_eq!(lhs, rhs);
            }
        }
    }

    fn custom(ek: &[&str], el: &[&[&str]], sigma: &[&[&str]]) -> ExtensionSpec {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        let data = CustomData::parse(
            &s(ek),
            &el.iter().map(|r| s(r)).collect::<Vec<_>>(),
            &sigma.iter().map(|r| s(r)).collect::<Vec<_>>(),
        )
        .unwrap();
        ExtensionSpec::custom(2, 20, data)
    }

    #[test]
    fn custom_spec_errors() {
        let not_eis = custom(&["-2"], &[&["-3"], &["0"]], &[&["0"], &["-1"]]);
        assert!(matches!(build_extension(&not_eis), Err(Error::NotEisenstein { which: "E_L", .. })));

        let not_root = custom(&["-2"], &[&["-2"], &["0"]], &[&["1"], &["-1"]]);
        assert_eq!(build_extension(&not_root).unwrap_err(), Error::SigmaNotARoot);

        let identity = custom(&["-2"], &[&["-2"], &["0"]], &[&["0"], &["1"]]);
        assert!(matches!(build_extension(&identity), Err(Error::SigmaWrongOrder(_))));

        let same_as_sqrt2 = custom(&["-2"], &[&["-2"], &["0"]], &[&["0"], &["-1"]]);
        assert_eq!(build_extension(&same_as_sqrt2).unwrap().t(), 2);
    }

    #[test]
    fn guard_arithmetic() {
        let s = build_extension(&ExtensionSpec::quadratic_sqrt2(2)).unwrap();
        assert!(s.precision_guard(2).is_err());
        let s = build_extension(&ExtensionSpec::quadratic_sqrt2(32)).unwrap();
        assert!(s.precision_guard(1).is_ok());
        assert!(s.precision_guard(2).is_err());
        assert!(s.at_precision(40).unwrap().precision_guard(2).is_ok());
    }

    #[test]
    fn registry() {
        assert!(ExtensionSpec::builtin("quadratic-gaussian", None, 8).is_ok());
        assert!(ExtensionSpec::builtin("quadratic-gaussian", Some(3), 8).is_err());
        assert_eq!(ExtensionSpec::builtin("cyclotomic-step", None, 8).unwrap().p, 3);
        assert!(ExtensionSpec::builtin("nope", None, 8).is_err());
        assert!(build_extension(&ExtensionSpec::cyclotomic_step(2, 8)).is_err());
    }
}

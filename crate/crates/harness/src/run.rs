//! Suite execution in the fixed order
//! symbolic, trace-lemmas, cascade, proposition, h1, negative-control.

use std::sync::Arc;
use std::time::Instant;

use wittcheck_core::cohomology::{
    self, cascade_suite, h1_report, proposition_mode, verify_proposition, verify_trace_lemmas, Counterexample,
    PropositionMode,
};
use wittcheck_core::extension::{build_extension, ExtensionData};
use wittcheck_core::universal::{structure_check, ResourceLimits, WittFamily};

use crate::config::{ConfigError, RunConfig, Suite};
use crate::report::{sha256_hex, CheckRecord, ConfigEcho, CounterexampleRecord, Report, Status, SuiteRecord};

/// Highest level of the symbolic suite.
pub const SYMBOLIC_MAX_LEVEL: usize = 3;

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub report: Report,
    pub exit_code: i32,
}

/// Validates the configuration and builds the extension.
pub fn prepare(config: &RunConfig) -> Result<Arc<ExtensionData>, ConfigError> {
    let spec = config.resolve_spec()?;
    let ext = build_extension(&spec).map_err(|e| ConfigError(format!("{}: {e}", spec.name())))?;
    ext.precision_guard(config.m).map_err(|e| ConfigError(e.to_string()))?;
    if config.suites.is_empty() {
        return Err(ConfigError("no suites selected".into()));
    }
    Ok(ext)
}

pub fn run(config: &RunConfig) -> Result<RunOutcome, ConfigError> {
    let ext = prepare(config)?;
    let mut report = Report::new(ConfigEcho::of(config, Some(ext.p()), Some(ext.precision())));
    for suite in config.sorted_suites() {
        let start = Instant::now();
        let mut record = run_suite(suite, &ext, config);
        if config.timings {
            record.timing_ms = Some(start.elapsed().as_millis() as u64);
        }
        report.suites.push(record);
    }
    let exit_code = if report.passed() { 0 } else { 1 };
    Ok(RunOutcome { report, exit_code })
}

fn record_for(suite: Suite, ext: &ExtensionData, m: usize) -> SuiteRecord {
    SuiteRecord::new(suite.name(), &ext.name(), ext.p(), ext.precision(), ext.t(), m)
}

pub fn run_suite(suite: Suite, ext: &Arc<ExtensionData>, config: &RunConfig) -> SuiteRecord {
    let mut record = match suite {
        Suite::Symbolic => symbolic(ext, config),
        Suite::TraceLemmas => trace_lemmas(ext, config),
        Suite::Cascade => cascade(ext, config),
        Suite::Proposition => proposition(ext, config),
        Suite::H1 => h1(ext, config),
        Suite::NegativeControl => negative_control(ext, config),
    };
    record.finish();
    record
}

fn counterexamples(list: &[Counterexample]) -> Vec<CounterexampleRecord> {
    list.iter()
        .map(|c| CounterexampleRecord {
            trial: c.trial,
            check: c.check.clone(),
            vector: c.vector.clone(),
            detail: c.detail.clone(),
        })
        .collect()
}

/// Largest level `<= SYMBOLIC_MAX_LEVEL` whose `p`-summand family fits the
/// resource limits.
pub fn symbolic_level(p: u64, limits: &ResourceLimits) -> Option<usize> {
    (0..=SYMBOLIC_MAX_LEVEL).rev().find(|n| limits.check(p, *n, p as usize).is_ok())
}

fn symbolic(ext: &ExtensionData, config: &RunConfig) -> SuiteRecord {
    let p = ext.p();
    let mut rec = record_for(Suite::Symbolic, ext, config.m);
    let Some(top) = symbolic_level(p, &config.limits) else {
        return rec.error("resource limit leaves no symbolic level");
    };
    rec.detail("max_level", top);
    let family = match WittFamily::new(p, top, p as usize, &config.limits) {
        Ok(f) => f,
        Err(e) => return rec.error(e.to_string()),
    };
    for n in 0..=top {
        let z = family.sum(n);
        let sz = structure_check(z, 0);
        rec.checks.push(CheckRecord::single(format!("z_{n} integral"), sz.is_integral));
        rec.checks.push(CheckRecord::single(format!("z_{n} no constant term"), sz.has_no_constant_term));
        rec.checks.push(CheckRecord::single(format!("z_{n} ghost equation"), family.ghost_residual(n).is_zero()));
        rec.digests.insert(format!("z_{n}"), sha256_hex(&z.to_exchange()));

        let f = family.f(n);
        if n == 0 {
            rec.checks.push(CheckRecord::single("f_0 = 0", f.is_zero()));
        } else {
            let sf = structure_check(&f, p);
            rec.checks.push(CheckRecord::single(format!("f_{n} integral"), sf.is_integral));
            rec.checks.push(CheckRecord::single(format!("f_{n} no constant term"), sf.has_no_constant_term));
            rec.checks.push(CheckRecord::single(format!("f_{n} min degree >= {p}"), sf.passes));
        }
        rec.checks
            .push(CheckRecord::single(format!("sum identity at level {n}"), family.sum_identity_residual(n).is_zero()));
        rec.digests.insert(format!("f_{n}"), sha256_hex(&f.to_exchange()));

        if n >= 1 {
            let g = family.g(n);
            let label = format!("g_{}", n as i64 - 2);
            if n == 1 {
                rec.checks.push(CheckRecord::single("g_-1 = 0", g.is_zero()));
            } else {
                let sg = structure_check(&g, p * p);
                rec.checks.push(CheckRecord::single(format!("{label} integral"), sg.is_integral));
                rec.checks.push(CheckRecord::single(format!("{label} no constant term"), sg.has_no_constant_term));
                rec.checks.push(CheckRecord::single(format!("{label} min degree >= {}", p * p), sg.passes));
            }
            rec.checks.push(CheckRecord::single(
                format!("split identity at level {n}"),
                family.split_identity_residual(n).is_zero(),
            ));
            rec.digests.insert(label, sha256_hex(&g.to_exchange()));
        }
    }
    rec
}

fn trace_lemmas(ext: &ExtensionData, config: &RunConfig) -> SuiteRecord {
    let mut rec = record_for(Suite::TraceLemmas, ext, config.m);
    let r = verify_trace_lemmas(ext, config.trials, config.seed);
    rec.checks.push(CheckRecord::tally("trace valuation bound", &r.lemma1));
    rec.checks.push(CheckRecord::tally("trace of p-th power", &r.lemma2));
    rec.counterexamples = counterexamples(&r.counterexamples);
    rec
}

fn cascade(ext: &Arc<ExtensionData>, config: &RunConfig) -> SuiteRecord {
    let mut rec = record_for(Suite::Cascade, ext, config.m);
    if config.m == 0 {
        rec.status = Status::Info;
        rec.detail("note", "m = 0 has no levels to check");
        return rec;
    }
    match cascade_suite(ext.clone(), config.m, config.trials, config.seed) {
        Ok(r) => {
            for (n, t) in r.levels.iter().enumerate() {
                rec.checks.push(CheckRecord::tally(format!("level {}", n + 1), t));
            }
            for (n, m) in r.min_margins.iter().enumerate() {
                rec.detail(&format!("min margin level {}", n + 1), m.map_or("none".to_string(), |v| v.to_string()));
            }
            rec.counterexamples = counterexamples(&r.counterexamples);
            rec
        }
        Err(e) => rec.error(e.to_string()),
    }
}

fn proposition_record(ext: &Arc<ExtensionData>, suite: Suite, m: usize, config: &RunConfig) -> SuiteRecord {
    let mut rec = record_for(suite, ext, m);
    let r = match verify_proposition(ext.clone(), m, config.trials, config.seed) {
        Ok(r) => r,
        Err(e) => return rec.error(e.to_string()),
    };
    match r.mode {
        PropositionMode::Normal => {
            rec.detail("mode", "normal");
            rec.checks.push(CheckRecord::tally("a_0 is a coboundary", &r.tally));
            rec.counterexamples = counterexamples(&r.counterexamples);
        }
        PropositionMode::NegativeControl => {
            rec.detail("mode", "negative-control");
            rec.detail("witnesses examined", r.tally.trials);
            match &r.witness {
                Some(w) => {
                    rec.detail("witness", w);
                    rec.detail("witness a_0 in (sigma-1)O_L", false);
                    rec.witness = Some(w.signed_components());
                }
                None => rec.detail("witness", "none found"),
            }
        }
    }
    rec
}

fn proposition(ext: &Arc<ExtensionData>, config: &RunConfig) -> SuiteRecord {
    let mut rec = proposition_record(ext, Suite::Proposition, config.m, config);
    if proposition_mode(ext.p(), ext.t(), config.m) == PropositionMode::NegativeControl && rec.status != Status::Error {
        rec.status = Status::Info;
    }
    rec
}

/// Largest `m >= 1` with `p^m <= t`.
pub fn sharpness_level(p: u64, t: u64) -> Option<usize> {
    (1..64).take_while(|m| (p as u128).pow(*m as u32) <= t as u128).last()
}

fn negative_control(ext: &Arc<ExtensionData>, config: &RunConfig) -> SuiteRecord {
    let Some(m) = sharpness_level(ext.p(), ext.t()) else {
        let mut rec = record_for(Suite::NegativeControl, ext, 0);
        rec.status = Status::Info;
        rec.detail("note", "t < p: every level satisfies p^m > t");
        return rec;
    };
    if let Err(e) = ext.precision_guard(m) {
        let mut rec = record_for(Suite::NegativeControl, ext, m);
        rec.status = Status::Info;
        rec.detail("note", e);
        return rec;
    }
    let mut rec = proposition_record(ext, Suite::NegativeControl, m, config);
    if rec.status != Status::Error {
        if rec.witness.is_some() {
            rec.checks.push(CheckRecord::single("witness outside (sigma-1)O_L", true));
        } else {
            rec.status = Status::Info;
        }
    }
    rec
}

fn h1(ext: &ExtensionData, config: &RunConfig) -> SuiteRecord {
    let mut rec = record_for(Suite::H1, ext, config.m);
    match h1_report(ext) {
        Ok(r) => {
            rec.detail("invariant factors", format!("{:?}", r.invariants.orders()));
            rec.detail("order", r.order());
            rec.detail("wide precision", ext.precision() + cohomology::KERNEL_LIFT);
            rec.detail("d", r.d);
            rec.detail("|O_K / tr O_L|", (ext.p() as u128).pow(r.trace_cokernel_exponent as u32));
            rec.checks.push(CheckRecord::single("stable across precisions", r.invariants == r.invariants_wide));
            rec.checks.push(CheckRecord::single("trace image is pi_K^d O_K", r.trace_cokernel_exponent == r.d));
            rec.checks.push(CheckRecord::single(
                "order equals |O_K / tr O_L|",
                r.invariants.order_exponent() == r.trace_cokernel_exponent,
            ));
            rec
        }
        Err(e) => rec.error(e.to_string()),
    }
}

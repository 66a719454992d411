use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wittcheck_core::cohomology::{
    cascade_suite, h1_report, linear_map_of, solve_linear, verify_proposition, verify_trace_lemmas, LevelOne, Operator,
    PropositionMode, TraceZeroSampler,
};
use wittcheck_core::extension::{build_extension, sigma_basis, ExtensionData, ExtensionSpec};
use wittcheck_core::linalg::{self, HowellBasis};
use wittcheck_core::tower::Valuation;

fn builtins(n: u32) -> Vec<Arc<ExtensionData>> {
    [ExtensionSpec::quadratic_gaussian(n), ExtensionSpec::quadratic_sqrt2(n), ExtensionSpec::cyclotomic_step(3, n)]
        .iter()
        .map(|s| build_extension(s).unwrap())
        .collect()
}

#[test]
fn operator_matrices_match_ring_arithmetic() {
    for ext in builtins(32) {
        let tr = linear_map_of(&ext, Operator::Trace);
        let sm1 = linear_map_of(&ext, Operator::SigmaMinusOne);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100 {
            let a = ext.tower().random(&mut rng);
            assert_eq!(tr.apply(a.coefficients()), ext.trace(&a).coefficients());
            let d = &ext.apply_sigma(&a, 1) - &a;
            assert_eq!(sm1.apply(a.coefficients()), d.coefficients());
        }
    }
}

#[test]
fn coboundaries_are_trace_free() {
    for ext in builtins(32) {
        let lo = LevelOne::new(ext.clone()).unwrap();
        assert!(lo.kernel().contains_all(lo.coboundaries()), "{}", ext.name());
    }
}

#[test]
fn sigma_basis_spans() {
    for ext in builtins(32) {
        let b = sigma_basis(&ext).unwrap();
        let pk = &ext.tower().base_uniformizer();
        let rows: Vec<Vec<u64>> = b
            .elements()
            .iter()
            .flat_map(|x| (0..ext.e_k()).map(move |j| (x * &pk.pow(j)).coefficients().to_vec()))
            .collect();
        let span = HowellBasis::new(ext.residues(), ext.tower().dimension(), rows);
        let full = HowellBasis::new(
            ext.residues(),
            ext.tower().dimension(),
            (0..ext.tower().dimension()).map(|i| ext.tower().basis_element(i).coefficients().to_vec()).collect(),
        );
        assert_eq!(span, full, "{}", ext.name());
    }
}

#[test]
fn trace_lemma_suites() {
    for ext in builtins(32) {
        let r = verify_trace_lemmas(&ext, 200, 0);
        assert!(r.ok(), "{}: {:?}", ext.name(), r.counterexamples.first());
        assert!(r.lemma1.skipped * 20 < 200 && r.lemma2.skipped * 20 < 200, "{}: {:?}", ext.name(), r);
    }
}

#[test]
fn cascade_suites() {
    for ext in builtins(32) {
        let ext = if ext.precision_guard(2).is_err() { Arc::new(ext.at_precision(40).unwrap()) } else { ext };
        let r = cascade_suite(ext.clone(), 2, 200, 0).unwrap();
        assert!(r.ok(), "{}: {:?}", ext.name(), r.counterexamples.first());
        assert_eq!(r.total().trials, 400);
    }
}

#[test]
fn proposition_suites() {
    let cases = [
        (ExtensionSpec::quadratic_gaussian(32), 1),
        (ExtensionSpec::quadratic_sqrt2(40), 2),
        (ExtensionSpec::cyclotomic_step(3, 32), 1),
    ];
    for (spec, m) in cases {
        let ext = build_extension(&spec).unwrap();
        ext.precision_guard(m).unwrap();
        let r = verify_proposition(ext, m, 200, 0).unwrap();
        assert_eq!(r.mode, PropositionMode::Normal);
        assert_eq!(r.tally.passes, 200, "{spec}");
    }
}

#[test]
fn deep_trace_free_elements_are_coboundaries() {
    for ext in builtins(32) {
        let lo = Arc::new(LevelOne::new(ext.clone()).unwrap());
        let sampler = TraceZeroSampler::new(lo.clone(), 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let mut checked = 0;
        for _ in 0..400 {
            let a = sampler.sample(&mut rng).unwrap();
            let a0 = a.component(0);
            if a0.valuation().at_least(ext.t()) == Some(true) {
                assert!(solve_linear(lo.sigma_minus_one(), a0).is_ok(), "{}: {a0}", ext.name());
                checked += 1;
            }
        }
        assert!(checked > 0);
    }
}

#[test]
fn h1_orders_and_stability() {
    let expected = [2u128, 2, 9];
    for (ext, order) in builtins(32).into_iter().zip(expected) {
        let r = h1_report(&ext).unwrap();
        assert_eq!(r.order(), order, "{}", ext.name());
        assert_eq!(r.invariants, r.invariants_wide);
        assert_eq!(r.trace_cokernel_exponent, r.d);
    }
}

#[test]
fn trace_image_is_an_ideal_power() {
    for ext in builtins(24) {
        let image = linalg::image(&ext.trace_map());
        let d = wittcheck_core::cohomology::trace_image_exponent(&ext).unwrap();
        let gen = ext.tower().base_uniformizer().pow(d);
        assert!(image.contains(gen.coefficients()));
        assert_eq!(gen.valuation(), Valuation::Exact(d * ext.p()));
    }
}

use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wittcheck_core::cohomology::{verify_cascade, LevelOne, TraceZeroSampler};
use wittcheck_core::extension::{build_extension, ExtensionData, ExtensionSpec};
use wittcheck_core::witt::WittRing;

fn exts() -> &'static [Arc<ExtensionData>] {
    static E: OnceLock<Vec<Arc<ExtensionData>>> = OnceLock::new();
    E.get_or_init(|| {
        [
            ExtensionSpec::quadratic_gaussian(40),
            ExtensionSpec::quadratic_sqrt2(40),
            ExtensionSpec::cyclotomic_step(3, 32),
        ]
        .iter()
        .map(|s| build_extension(s).unwrap())
        .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn witt_group_laws(which in 0usize..3, seed in any::<u64>()) {
        let ext = exts()[which].clone();
        let w = WittRing::new(ext, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b, c) = (w.random(&mut rng), w.random(&mut rng), w.random(&mut rng));
        let ab = w.add(&a, &b).unwrap();
        prop_assert_eq!(&ab, &w.add(&b, &a).unwrap());
        prop_assert_eq!(w.add(&ab, &c).unwrap(), w.add(&a, &w.add(&b, &c).unwrap()).unwrap());
        prop_assert!(w.add(&a, &w.neg(&a).unwrap()).unwrap().is_zero());
        prop_assert_eq!(w.verschiebung(&ab), w.add(&w.verschiebung(&a), &w.verschiebung(&b)).unwrap());
        prop_assert_eq!(w.apply_sigma(&ab, 1), w.add(&w.apply_sigma(&a, 1), &w.apply_sigma(&b, 1)).unwrap());
    }

    #[test]
    fn sampled_vectors_are_trace_free_and_cascade(which in 0usize..3, seed in any::<u64>()) {
        let ext = exts()[which].clone();
        let lo = Arc::new(LevelOne::new(ext.clone()).unwrap());
        let sampler = TraceZeroSampler::new(lo, 2).unwrap();
        let a = sampler.sample(&mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert!(sampler.witt().trace(&a).unwrap().is_zero());
        prop_assert!(verify_cascade(&a, &ext).ok());
    }

    #[test]
    fn coboundaries_are_trace_free(which in 0usize..3, seed in any::<u64>()) {
        let ext = exts()[which].clone();
        let w = WittRing::new(ext.clone(), 2).unwrap();
        let b = w.random(&mut ChaCha8Rng::seed_from_u64(seed));
        let d = w.sub(&w.apply_sigma(&b, 1), &b).unwrap();
        prop_assert!(w.trace(&d).unwrap().is_zero());
    }
}

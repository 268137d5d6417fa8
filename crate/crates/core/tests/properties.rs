mod common;

use proptest::prelude::*;
use shadowlab_core::geometry::{hausdorff, Polytope};
use shadowlab_core::linalg::{orthonormalize, principal_angles, MatrixNM, VectorN};
use shadowlab_core::sampling::{sample_grassmannian, RandomSource};

fn points(n: usize, k: usize) -> impl Strategy<Value = Polytope> {
    prop::collection::vec(prop::collection::vec(-3.0f64..3.0, n), 1..=k)
        .prop_map(|rows| Polytope::from_rows(&rows).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hausdorff_is_a_metric(a in points(3, 6), b in points(3, 6), c in points(3, 6)) {
        let ab = hausdorff(&a, &b).unwrap();
        let ba = hausdorff(&b, &a).unwrap();
        prop_assert!(ab >= 0.0);
        prop_assert!((ab - ba).abs() <= 1e-12);
        prop_assert!(hausdorff(&a, &a).unwrap() <= 1e-9);
        let ac = hausdorff(&a, &c).unwrap();
        let cb = hausdorff(&c, &b).unwrap();
        prop_assert!(ab <= ac + cb + 1e-9);
    }

    #[test]
    fn hausdorff_of_translate_is_shift_length(a in points(4, 6), t in prop::collection::vec(-2.0f64..2.0, 4)) {
        let t = VectorN::from_vec(t);
        let d = hausdorff(&a, &a.translate(&t)).unwrap();
        prop_assert!(d <= t.norm() + 1e-9);
        // a single point shifts rigidly
        if a.len() == 1 {
            prop_assert!((d - t.norm()).abs() <= 1e-9);
        }
    }

    #[test]
    fn projector_is_symmetric_idempotent(seed in any::<u64>(), n in 2usize..7, k in 1usize..7) {
        let k = k.min(n);
        let mut rng = RandomSource::new(seed).rng();
        let s = sample_grassmannian(&mut rng, n, k).unwrap();
        let p = s.projector();
        prop_assert!((&p * &p - &p).amax() <= 1e-10);
        prop_assert!((&p - p.transpose()).amax() <= 1e-12);
        prop_assert!((p.trace() - k as f64).abs() <= 1e-10);
        prop_assert!(s.orthonormality_error() <= 1e-10);
        if k < n {
            let c = s.complement();
            let sum = p + c.projector();
            prop_assert!((sum - MatrixNM::identity(n, n)).amax() <= 1e-10);
        }
    }

    #[test]
    fn principal_angles_are_symmetric(seed in any::<u64>(), n in 3usize..7) {
        let mut rng = RandomSource::new(seed).rng();
        let a = sample_grassmannian(&mut rng, n, 2).unwrap();
        let b = sample_grassmannian(&mut rng, n, 2).unwrap();
        let ab = principal_angles(&a, &b).unwrap();
        let ba = principal_angles(&b, &a).unwrap();
        prop_assert_eq!(ab.len(), 2);
        for (x, y) in ab.iter().zip(&ba) {
            prop_assert!((x - y).abs() <= 1e-12);
            prop_assert!((0.0..=std::f64::consts::FRAC_PI_2 + 1e-12).contains(x));
        }
        prop_assert!(ab[0] <= ab[1]);
        let self_angles = principal_angles(&a, &a).unwrap();
        prop_assert!(self_angles.iter().all(|t| *t <= 1e-6));
    }

    #[test]
    fn orthonormalize_spans_input(cols in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 5), 1..4)) {
        let cols: Vec<VectorN> = cols.into_iter().map(VectorN::from_vec).collect();
        if let Ok(s) = orthonormalize(&cols) {
            let p = s.projector();
            for c in &cols {
                prop_assert!((&p * c - c).norm() <= 1e-9 * (1.0 + c.norm()));
            }
        }
    }
}

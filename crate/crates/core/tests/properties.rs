use braidmat::braid::{BraidFamily, Mode};
use braidmat::linalg::{
    dagger, kron, matmul, matrix_exponential, max_abs_diff, schmidt_decompose, ComplexMatrix,
    ComplexVector, C64,
};
use braidmat::sampling::SampleStream;
use braidmat::verify::{braid_residual, factorization_residual};
use proptest::prelude::*;

fn matrix(dim: usize, scale: f64) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim * dim).prop_map(move |v| {
        ComplexMatrix::new(
            dim,
            v.into_iter()
                .map(|(a, b)| C64::new(a * scale, b * scale))
                .collect(),
        )
        .unwrap()
    })
}

// Entries k/8 with |k| <= 8: every product of three is exact in binary floating point.
fn dyadic(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-8i32..=8, -8i32..=8), dim * dim).prop_map(move |v| {
        ComplexMatrix::new(
            dim,
            v.into_iter()
                .map(|(a, b)| C64::new(a as f64 / 8.0, b as f64 / 8.0))
                .collect(),
        )
        .unwrap()
    })
}

fn vector(len: usize) -> impl Strategy<Value = ComplexVector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len).prop_map(|v| {
        ComplexVector::new(v.into_iter().map(|(a, b)| C64::new(a, b)).collect()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_is_associative(a in dyadic(2), b in dyadic(3), c in dyadic(2)) {
        let left = kron(&kron(&a, &b).unwrap(), &c).unwrap();
        let right = kron(&a, &kron(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(max_abs_diff(&left, &right).unwrap(), 0.0);
    }

    #[test]
    fn kron_associative_to_rounding(a in matrix(2, 1.0), b in matrix(3, 1.0), c in matrix(2, 1.0)) {
        let left = kron(&kron(&a, &b).unwrap(), &c).unwrap();
        let right = kron(&a, &kron(&b, &c).unwrap()).unwrap();
        prop_assert!(max_abs_diff(&left, &right).unwrap() <= 8.0 * f64::EPSILON);
    }

    #[test]
    fn kron_mixed_product(a in matrix(3, 1.0), b in matrix(2, 1.0), c in matrix(3, 1.0), d in matrix(2, 1.0)) {
        let left = matmul(&kron(&a, &b).unwrap(), &kron(&c, &d).unwrap()).unwrap();
        let right = kron(&matmul(&a, &c).unwrap(), &matmul(&b, &d).unwrap()).unwrap();
        prop_assert!(max_abs_diff(&left, &right).unwrap() <= 1e-13);
    }

    #[test]
    fn dagger_reverses_products_exactly(a in matrix(4, 1.0), b in matrix(4, 1.0)) {
        let left = dagger(&matmul(&a, &b).unwrap());
        let right = matmul(&dagger(&b), &dagger(&a)).unwrap();
        prop_assert_eq!(max_abs_diff(&left, &right).unwrap(), 0.0);
        prop_assert_eq!(dagger(&dagger(&a)), a);
    }

    #[test]
    fn exponential_inverts(dim in 2usize..6, seed in any::<u64>()) {
        // Entries in [-1, 1] scaled so the 1-norm stays at most 10.
        let mut s = SampleStream::new(seed);
        let scale = 10.0 / (dim as f64 * std::f64::consts::SQRT_2);
        let a = ComplexMatrix::from_fn(dim, |_, _| C64::new(s.symmetric(scale), s.symmetric(scale)));
        prop_assert!(a.norm_one() <= 10.0);
        let prod = matmul(&matrix_exponential(&a).unwrap(), &matrix_exponential(&a.scale_real(-1.0)).unwrap()).unwrap();
        prop_assert!(max_abs_diff(&prod, &ComplexMatrix::identity(dim)).unwrap() <= 1e-10);
    }

    #[test]
    fn schmidt_preserves_norm(v in vector(12)) {
        for (da, db) in [(3, 4), (4, 3), (2, 6)] {
            let s = schmidt_decompose(&v, da, db).unwrap();
            prop_assert_eq!(s.len(), da.min(db));
            prop_assert!(s.windows(2).all(|w| w[0] >= w[1]));
            let sum: f64 = s.iter().map(|x| x * x).sum();
            prop_assert!((sum - v.norm_sqr()).abs() <= 1e-12);
        }
    }

    #[test]
    fn schmidt_of_products_has_rank_one(a in vector(3), b in vector(4)) {
        let s = schmidt_decompose(&a.kron(&b), 3, 4).unwrap();
        let expect = (a.norm_sqr() * b.norm_sqr()).sqrt();
        prop_assert!((s[0] - expect).abs() <= 1e-12 * expect.max(1.0));
        prop_assert!(s[1..].iter().all(|&x| x <= 1e-12 * expect.max(1.0)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn braid_and_factorization_hold(
        side in 2usize..=5,
        unitary in any::<bool>(),
        seed in any::<u64>(),
        theta in -1.0f64..1.0,
        theta_prime in -1.0f64..1.0,
    ) {
        let mode = if unitary { Mode::Unitary } else { Mode::Real };
        let fam = BraidFamily::new(SampleStream::new(seed).params(side, mode).unwrap()).unwrap();
        prop_assert!(braid_residual(&fam, theta, theta_prime).unwrap() <= 1e-10);
        prop_assert!(factorization_residual(&fam, theta, theta_prime).unwrap() <= 1e-11);
    }
}

mod common;

use common::{random_nonsingular, random_sample, random_spd, rng, synthetic_k1_sample};
use kronmle::algebra::likelihood::sample_integer_data;
use kronmle::model::{profile_k1, profile_k2, thresholds, NormalStream};
use kronmle::numeric::{rational_to_f64, Matrix, SymmetricMatrix};
use kronmle::solvers::{
    exact_mle_k1, exact_mle_k1_pair, flipflop, flipflop_observed, mle, normalize_pair,
    FlipFlopConfig,
};
use kronmle::Error;
use proptest::prelude::*;

fn rel_diff(a: &Matrix<f64>, b: &Matrix<f64>) -> f64 {
    a.max_abs_diff(b) / b.max_abs().max(1.0)
}

/// `(m1, m2, n)` with `k = n*m2 - m1 = 1` and `n >= m2`.
fn k1_dims() -> impl Strategy<Value = (usize, usize, u64)> {
    (2usize..=4, any::<u64>())
        .prop_flat_map(|(m2, seed)| (Just(m2), m2..=m2 + 2, Just(seed)))
        .prop_map(|(m2, n, seed)| (m2, n, seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn closed_form_is_a_flipflop_fixed_point((m2, n, seed) in k1_dims()) {
        let m1 = n * m2 - 1;
        let mut s = NormalStream::new(seed);
        let sample = random_sample(&mut s, m1, m2, n);
        let est = exact_mle_k1(&sample).unwrap();
        let k1 = profile_k1(&sample, &est.k2).unwrap();
        let k2 = profile_k2(&sample, &k1).unwrap();
        let (_, k2n) = normalize_pair(&k1, &k2).unwrap();
        prop_assert!(rel_diff(&k2n.to_matrix(), &est.k2.to_matrix()) <= 1e-12,
            "drift {}", rel_diff(&k2n.to_matrix(), &est.k2.to_matrix()));
        prop_assert!((est.k2.log_det().unwrap()).abs() <= 1e-10);
    }

    #[test]
    fn flipflop_ascends((m1, m2, extra, seed) in (1usize..=5, 1usize..=4, 0usize..=2, any::<u64>())) {
        let n = m1.div_ceil(m2).max(m2.div_ceil(m1)) + extra;
        let mut s = NormalStream::new(seed);
        let sample = random_sample(&mut s, m1, m2, n);
        let init = random_spd(&mut s, m2);
        let est = match flipflop(&sample, &init, FlipFlopConfig { tol: 1e-10, max_iter: 300 }) {
            Ok(e) => e,
            // boundary sample sizes can make a scatter matrix singular
            Err(Error::SingularMatrix) | Err(Error::NotPositiveDefinite) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        for w in est.history.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-10 * w[0].abs().max(1.0), "{} then {}", w[0], w[1]);
        }
    }

    #[test]
    fn mle_is_equivariant((m1, m2, n, seed) in (2usize..=4, 2usize..=3, 0usize..=1, any::<u64>())
        .prop_map(|(m1, m2, extra, seed)| (m1, m2, thresholds(m1 as u64, m2 as u64).upper as usize + extra, seed))) {
        // at or above the uniqueness bound the maximizer is unique
        let mut s = NormalStream::new(seed);
        let sample = random_sample(&mut s, m1, m2, n);
        let a = random_nonsingular(&mut s, m1);
        let b = random_nonsingular(&mut s, m2);
        let config = FlipFlopConfig { tol: 1e-13, max_iter: 20_000 };
        let est = mle(&sample, config).unwrap();
        let moved = mle(&sample.transformed(&a, &b).unwrap(), config).unwrap();
        prop_assume!(est.converged && moved.converged);
        let (ai, bi) = (a.inverse().unwrap(), b.inverse().unwrap());
        let k1 = &(&ai.transpose() * &est.k1.to_matrix()) * &ai;
        let k2 = &(&bi.transpose() * &est.k2.to_matrix()) * &bi;
        let (k1, k2) = normalize_pair(
            &SymmetricMatrix::from_matrix_symmetrized(&k1),
            &SymmetricMatrix::from_matrix_symmetrized(&k2),
        ).unwrap();
        prop_assert!(rel_diff(&moved.k2.to_matrix(), &k2.to_matrix()) <= 1e-6);
        prop_assert!(rel_diff(&moved.k1.to_matrix(), &k1.to_matrix()) <= 1e-6);
    }

    #[test]
    fn exact_closed_form_on_integer_data((m2, n, seed) in k1_dims()) {
        let m1 = n * m2 - 1;
        let exact = sample_integer_data(m1, m2, n, seed).unwrap();
        let pair = match exact_mle_k1_pair(&exact) {
            Ok(p) => p,
            Err(Error::DegenerateData(_)) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        prop_assert!(pair.k2.is_positive_definite());
        // the rational K1 is the exact profile maximizer
        prop_assert_eq!(&pair.k1, &profile_k1(&exact, &pair.k2).unwrap());
        let float = exact_mle_k1(&exact.to_f64()).unwrap();
        let scale = (rational_to_f64(&pair.k2_det)).powf(1.0 / m2 as f64);
        let k2 = pair.k2.to_f64().to_matrix().scale(&(1.0 / scale));
        prop_assert!(rel_diff(&float.k2.to_matrix(), &k2) <= 1e-8);
    }
}

#[test]
fn existence_boundary() {
    let mut s = NormalStream::new(5);
    // k = 1 with n < m2
    let small = random_sample(&mut s, 5, 3, 2);
    assert!(matches!(exact_mle_k1(&small), Err(Error::MleNotExists(_))));
    let mut r = rng(5);
    for (m1, m2, n) in [(5, 3, 2), (3, 4, 1), (7, 4, 2)] {
        let exact = common::random_int_matrix(&mut r, m1, m2 * n, -5, 5);
        let sample = kronmle::model::SampleSet::from_concatenated(&exact, m2).unwrap();
        assert!(matches!(
            exact_mle_k1_pair(&sample),
            Err(Error::MleNotExists(_))
        ));
    }
    for (m1, m2, n) in [(5, 3, 2 + 0), (8, 3, 3), (11, 4, 3), (23, 4, 6)] {
        if n < m2 {
            continue;
        }
        let sample = random_sample(&mut s, m1, m2, n);
        let est = exact_mle_k1(&sample).unwrap();
        assert!(est.k1.is_positive_definite() && est.k2.is_positive_definite());
    }
}

#[test]
fn flipflop_reaches_the_closed_form_at_full_scale() {
    let sample = synthetic_k1_sample(1);
    let exact = exact_mle_k1(&sample).unwrap().k2.to_matrix();
    let mut at = Vec::new();
    let est = flipflop_observed(
        &sample,
        &SymmetricMatrix::identity(4),
        FlipFlopConfig {
            tol: 1e-13,
            max_iter: 5_000,
        },
        |sweep| {
            if sweep.index == 3 || sweep.index == 500 {
                at.push(sweep.k2.to_matrix().max_abs_diff(&exact));
            }
        },
    )
    .unwrap();
    assert!(est.converged);
    assert!(at[1] < at[0]);
    assert!(at[1] <= 1e-3);
    assert!(est.k2.to_matrix().max_abs_diff(&exact) <= 1e-9);
}

#[test]
fn flipflop_rejects_bad_input() {
    let mut s = NormalStream::new(9);
    let sample = random_sample(&mut s, 6, 2, 2);
    assert!(matches!(
        flipflop(
            &sample,
            &SymmetricMatrix::identity(2),
            FlipFlopConfig::default()
        ),
        Err(Error::WrongRegime(_))
    ));
    let sample = random_sample(&mut s, 3, 2, 3);
    let indefinite =
        SymmetricMatrix::from_matrix(&Matrix::from_rows(&[[1.0, 2.0], [2.0, 1.0]])).unwrap();
    assert_eq!(
        flipflop(&sample, &indefinite, FlipFlopConfig::default()),
        Err(Error::NotPositiveDefinite)
    );
}

mod common;

use common::{random_int_matrix, random_sample, random_spd, rng};
use kronmle::canonical::{canonicalize, kron_scatter, spd_inverse, CanonicalForm};
use kronmle::model::{g_objective, NormalStream, SampleSet};
use kronmle::numeric::{rat, Field, Matrix, RatMatrix, SymmetricMatrix};
use num_rational::BigRational;
use proptest::prelude::*;

/// Dimensions with `2 <= m2 <= 4`, `1 <= k <= 4`, `m1 <= 10`.
fn lemma_dims() -> impl Strategy<Value = (usize, usize, usize, u64)> {
    (2usize..=4, 1usize..=4, any::<u64>())
        .prop_flat_map(|(m2, k, seed)| {
            let n_min = (k + 1).div_ceil(m2);
            let n_max = (10 + k) / m2;
            (Just(m2), Just(k), n_min..=n_max.max(n_min), Just(seed))
        })
        .prop_filter("m1 between 1 and 10", |(m2, k, n, _)| {
            n * m2 > *k && n * m2 - k <= 10
        })
}

fn random_exact_spd(r: &mut rand_chacha::ChaCha8Rng, dim: usize) -> SymmetricMatrix<BigRational> {
    let b = random_int_matrix(r, dim, dim, -3, 3);
    SymmetricMatrix::from_matrix(&(&(&b * &b.transpose()) + &Matrix::identity(dim))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn lemma_identity_holds_exactly((m2, k, n, seed) in lemma_dims()) {
        let m1 = n * m2 - k;
        let mut r = rng(seed);
        let c = random_int_matrix(&mut r, m1, k, -4, 4);
        let cf = CanonicalForm::from_c(m2, n, c, rat(1));
        let kmat = random_exact_spd(&mut r, m2);
        let (lhs, rhs) = cf.det_reduction_check(&kmat).unwrap();
        prop_assert_eq!(&lhs, &rhs);
        // independent oracle: explicit Kronecker product on [I | C]
        let y = cf.canonical_sample().concatenated();
        prop_assert_eq!(kron_scatter(&y, &kmat.to_matrix(), n).det().unwrap(), lhs);
    }

    #[test]
    fn trace_form_is_kron_sandwich((m2, k, n, seed) in lemma_dims()) {
        let m1 = n * m2 - k;
        let mut r = rng(seed);
        let cf = CanonicalForm::from_c(m2, n, random_int_matrix(&mut r, m1, k, -4, 4), rat(1));
        let sigma = random_exact_spd(&mut r, m2).to_matrix();
        let d = cf.d();
        let oracle = &(&d.transpose() * &Matrix::identity(n).kron(&sigma)) * d;
        prop_assert_eq!(cf.trace_form(&sigma).unwrap(), oracle);
    }

    #[test]
    fn dab_grid_is_sum_of_block_outer_products((m2, k, n, seed) in lemma_dims()) {
        let m1 = n * m2 - k;
        let mut r = rng(seed);
        let cf = CanonicalForm::from_c(m2, n, random_int_matrix(&mut r, m1, k, -4, 4), rat(1));
        // d_i* = [d_i1 | ... | d_ik], grid = Σ_i d_i* d_i*ᵀ arranged blockwise
        let grid = cf.dab_grid();
        for a in 0..k {
            for b in 0..k {
                let mut sum = RatMatrix::zeros(m2, m2);
                for i in 0..n {
                    sum = &sum + &(&cf.d_block(i, a) * &cf.d_block(i, b).transpose());
                }
                prop_assert_eq!(cf.dab(a, b), &sum);
                prop_assert_eq!(grid.submatrix(a * m2, b * m2, m2, m2), sum);
            }
        }
    }

    #[test]
    fn canonicalization_preserves_lemma_for_raw_data((m2, k, n, seed) in lemma_dims()) {
        let m1 = n * m2 - k;
        let mut r = rng(seed);
        let y = random_int_matrix(&mut r, m1, n * m2, -5, 5);
        let sample = SampleSet::from_concatenated(&y, m2).unwrap();
        let cf = match canonicalize(&sample) {
            Ok(cf) => cf,
            Err(_) => return Ok(()),
        };
        // Y = Y_* [I | C] so det(Y (I ⊗ K) Yᵀ) = det(Y_*)² det([I|C] (I ⊗ K) [I|C]ᵀ)
        let kmat = random_exact_spd(&mut r, m2);
        let raw = sample.row_scatter(&kmat.to_matrix()).unwrap().det().unwrap();
        let (lhs, rhs) = cf.det_reduction_check(&kmat).unwrap();
        prop_assert_eq!(&lhs, &rhs);
        let ystar_det = cf.ystar_det().clone();
        prop_assert_eq!(raw, ystar_det.clone() * ystar_det * lhs);
    }

    #[test]
    fn reduced_objective_tracks_g((m2, k, n, seed) in lemma_dims()) {
        let m1 = n * m2 - k;
        let mut s = NormalStream::new(seed);
        let sample = random_sample(&mut s, m1, m2, n);
        let cf = canonicalize(&sample).unwrap();
        let canon = cf.canonical_sample();
        let k_a = random_spd(&mut s, m2);
        let k_b = random_spd(&mut s, m2);
        // g(K) on canonical data equals the reduced objective at Σ = K⁻¹ up to a constant
        let diff = |kk: &SymmetricMatrix<f64>| {
            g_objective(&canon, kk).unwrap() - cf.reduced_objective(&spd_inverse(kk).unwrap()).unwrap()
        };
        let (da, db) = (diff(&k_a), diff(&k_b));
        prop_assert!((da - db).abs() <= 1e-8 * da.abs().max(1.0), "{} vs {}", da, db);
    }
}

#[test]
fn worked_example_is_pinned() {
    let c = RatMatrix::from_i64_rows(&[[1, 2], [3, 4], [5, 6], [7, 8]]);
    let cf = CanonicalForm::from_c(2, 3, c, rat(1));
    let k = SymmetricMatrix::from_matrix(&RatMatrix::from_i64_rows(&[[3, 1], [1, 3]])).unwrap();
    assert_eq!(
        cf.det_reduction_check(&k).unwrap(),
        (rat(16640), rat(16640))
    );
    let t = cf.trace_form(&k.to_matrix().inverse().unwrap()).unwrap();
    assert_eq!(t.det().unwrap(), BigRational::new(65.into(), 2.into()));
    assert!(!Field::is_zero(&t.det().unwrap()));
}

#![allow(dead_code)]

use kronmle::model::{sample_matrix_normal, NormalStream, SampleSet};
use kronmle::numeric::{Matrix, RatMatrix, SymmetricMatrix};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal_matrix(stream: &mut NormalStream, rows: usize, cols: usize) -> Matrix<f64> {
    Matrix::from_fn(rows, cols, |_, _| stream.next_normal())
}

/// `B Bᵀ / dim + 0.5 I`, comfortably positive definite.
pub fn random_spd(stream: &mut NormalStream, dim: usize) -> SymmetricMatrix<f64> {
    let b = normal_matrix(stream, dim, dim);
    let m = &(&b * &b.transpose()).scale(&(1.0 / dim as f64)) + &Matrix::identity(dim).scale(&0.5);
    SymmetricMatrix::from_matrix_symmetrized(&m)
}

/// Identity plus a moderate random perturbation, rejecting near-singular draws.
pub fn random_nonsingular(stream: &mut NormalStream, dim: usize) -> Matrix<f64> {
    loop {
        let a = &Matrix::identity(dim) + &normal_matrix(stream, dim, dim).scale(&0.4);
        if a.det().unwrap().abs() > 0.1 {
            return a;
        }
    }
}

pub fn random_sample(stream: &mut NormalStream, m1: usize, m2: usize, n: usize) -> SampleSet<f64> {
    SampleSet::new((0..n).map(|_| normal_matrix(stream, m1, m2)).collect()).unwrap()
}

pub fn random_int_matrix(
    rng: &mut ChaCha8Rng,
    rows: usize,
    cols: usize,
    lo: i64,
    hi: i64,
) -> RatMatrix {
    Matrix::from_fn(rows, cols, |_, _| {
        BigRational::from_integer(rng.gen_range(lo..=hi).into())
    })
}

/// Synthetic matrix normal data at `(m1, m2, n) = (23, 4, 6)`, so `k = 1`.
pub fn synthetic_k1_sample(seed: u64) -> SampleSet<f64> {
    let m1 = 23;
    let a = Matrix::from_fn(m1, m1, |i, j| {
        if i == j {
            1.0
        } else if i == j + 1 {
            0.6
        } else {
            0.0
        }
    });
    let b = Matrix::from_rows(&[
        [1.0, 0.0, 0.0, 0.0],
        [0.8, 0.6, 0.0, 0.0],
        [0.3, 0.5, 0.9, 0.0],
        [-0.4, 0.2, 0.1, 0.5],
    ]);
    sample_matrix_normal(&a, &b, 6, seed).unwrap()
}

use num_rational::BigRational;

use super::linalg::{is_positive_definite_exact, Cholesky};
use super::{Field, Matrix};
use crate::error::{Error, Result};

/// Symmetric matrix stored as its upper triangle (row-major, `i <= j`).
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrix<T> {
    dim: usize,
    upper: Vec<T>,
}

fn upper_index(dim: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * dim - i * (i + 1) / 2 + j
}

/// Relative asymmetry tolerated when building float symmetric matrices.
const FLOAT_SYMMETRY_TOL: f64 = 1e-9;

impl<T: Field> SymmetricMatrix<T> {
    /// Exact symmetry is required for exact fields; floats may deviate by a
    /// relative `1e-9` and are averaged.
    pub fn from_matrix(m: &Matrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NonSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        if T::EXACT {
            if !m.is_symmetric() {
                return Err(Error::NotSymmetric);
            }
        } else {
            let asym = m.max_abs_diff(&m.transpose());
            if asym > FLOAT_SYMMETRY_TOL * m.max_abs().max(f64::MIN_POSITIVE) {
                return Err(Error::NotSymmetric);
            }
        }
        Ok(Self::from_matrix_symmetrized(m))
    }

    /// Keeps `(A + Aᵀ) / 2` without checking.
    pub fn from_matrix_symmetrized(m: &Matrix<T>) -> Self {
        assert!(m.is_square());
        let dim = m.rows();
        let two = T::from_i64(2);
        let mut upper = Vec::with_capacity(dim * (dim + 1) / 2);
        for i in 0..dim {
            upper.push(m.get(i, i).clone());
            for j in i + 1..dim {
                upper.push((m.get(i, j).clone() + m.get(j, i).clone()) / two.clone());
            }
        }
        Self { dim, upper }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_matrix_symmetrized(&Matrix::identity(dim))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.upper[upper_index(self.dim, i, j)]
    }

    pub fn to_matrix(&self) -> Matrix<T> {
        Matrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j).clone())
    }

    pub fn scale(&self, c: &T) -> Self {
        Self {
            dim: self.dim,
            upper: self.upper.iter().map(|v| v.clone() * c.clone()).collect(),
        }
    }

    pub fn to_f64(&self) -> SymmetricMatrix<f64> {
        SymmetricMatrix {
            dim: self.dim,
            upper: self.upper.iter().map(Field::to_f64).collect(),
        }
    }
}

impl SymmetricMatrix<f64> {
    pub fn cholesky(&self) -> Option<Cholesky> {
        Cholesky::factor(&self.to_matrix())
    }

    pub fn is_positive_definite(&self) -> bool {
        self.cholesky().is_some()
    }

    /// `log det` through Cholesky; errors when not positive definite.
    pub fn log_det(&self) -> Result<f64> {
        self.cholesky()
            .map(|c| c.log_det())
            .ok_or(Error::NotPositiveDefinite)
    }
}

impl SymmetricMatrix<BigRational> {
    pub fn is_positive_definite(&self) -> bool {
        is_positive_definite_exact(&self.to_matrix())
    }
}

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::field::denominator_lcm;
use super::{Field, Matrix};
use crate::error::{Error, Result};

/// Relative pivot threshold for float elimination.
pub const FLOAT_PIVOT_TOL: f64 = 1e-12;

/// Determinant by LU with partial pivoting.
pub(crate) fn lu_determinant(m: &Matrix<f64>) -> f64 {
    let n = m.rows();
    let mut a = m.data().to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| a[r * n + col].abs().total_cmp(&a[s * n + col].abs()))
            .unwrap();
        let pivot = a[pivot_row * n + col];
        if pivot == 0.0 {
            return 0.0;
        }
        if pivot_row != col {
            for j in 0..n {
                a.swap(col * n + j, pivot_row * n + j);
            }
            det = -det;
        }
        det *= pivot;
        for r in col + 1..n {
            let factor = a[r * n + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for j in col + 1..n {
                a[r * n + j] -= factor * a[col * n + j];
            }
        }
    }
    det
}

/// Fraction-free Bareiss elimination on an integer matrix stored row-major.
pub fn bareiss_integer_determinant(n: usize, mut a: Vec<BigInt>) -> BigInt {
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k * n + k].is_zero() {
            match (k + 1..n).find(|&r| !a[r * n + k].is_zero()) {
                Some(r) => {
                    for j in 0..n {
                        a.swap(k * n + j, r * n + j);
                    }
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[k * n + k] * &a[i * n + j] - &a[i * n + k] * &a[k * n + j];
                a[i * n + j] = v / &prev;
            }
        }
        prev = a[k * n + k].clone();
    }
    sign * &a[(n - 1) * n + (n - 1)]
}

/// Exact determinant: rows are scaled to integers, then Bareiss.
pub(crate) fn bareiss_determinant(m: &Matrix<BigRational>) -> BigRational {
    let n = m.rows();
    let mut scale = BigInt::one();
    let mut ints = Vec::with_capacity(n * n);
    for i in 0..n {
        let row = m.row(i);
        let l = denominator_lcm(row);
        for v in row {
            ints.push((v * BigRational::from_integer(l.clone())).to_integer());
        }
        scale *= l;
    }
    BigRational::new(bareiss_integer_determinant(n, ints), scale)
}

/// Gauss-Jordan elimination solving `a * X = b`.
///
/// Exact fields pivot on the first nonzero entry and fail only on true
/// rank deficiency; floats use partial pivoting and fail when the pivot
/// drops below `FLOAT_PIVOT_TOL * max|a|`.
/// Fraction-free solve over the rationals. Rows of `[a | b]` are scaled to
/// integers, Bareiss elimination brings `a` to upper triangular form with
/// last pivot `d = ±det`, and back substitution computes the integer
/// vector `d x`.
pub(crate) fn bareiss_solve(
    a: &Matrix<BigRational>,
    b: &Matrix<BigRational>,
) -> Result<Matrix<BigRational>> {
    check_system(a, b)?;
    let n = a.rows();
    let m = b.cols();
    let w = n + m;
    let mut rows: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> = a.row(i).to_vec();
            row.extend_from_slice(b.row(i));
            let l = denominator_lcm(&row);
            row.iter()
                .map(|v| (v * BigRational::from_integer(l.clone())).to_integer())
                .collect()
        })
        .collect();
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !rows[r][k].is_zero()) else {
            return Err(Error::SingularMatrix);
        };
        rows.swap(k, p);
        let (top, rest) = rows.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in rest.iter_mut() {
            let factor = std::mem::take(&mut row[k]);
            for j in k + 1..w {
                let v = &pivot_row[k] * &row[j] - &factor * &pivot_row[j];
                row[j] = v / &prev;
            }
        }
        prev = rows[k][k].clone();
    }
    let d = prev;
    let mut x: Vec<Vec<BigInt>> = vec![Vec::new(); n];
    for i in (0..n).rev() {
        x[i] = (0..m)
            .map(|c| {
                let mut acc = &d * &rows[i][n + c];
                for j in i + 1..n {
                    acc -= &rows[i][j] * &x[j][c];
                }
                acc / &rows[i][i]
            })
            .collect();
    }
    Ok(Matrix::from_fn(n, m, |i, c| {
        BigRational::new(x[i][c].clone(), d.clone())
    }))
}

fn check_system<T: Field>(a: &Matrix<T>, b: &Matrix<T>) -> Result<()> {
    if !a.is_square() {
        return Err(Error::NonSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "solve with {}x{} system and {} right-hand rows",
            a.rows(),
            a.cols(),
            b.rows()
        )));
    }
    Ok(())
}

pub(crate) fn gauss_jordan_solve<T: Field>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>> {
    check_system(a, b)?;
    let n = a.rows();
    let m = b.cols();
    let threshold = FLOAT_PIVOT_TOL * a.max_abs();
    let mut lhs: Vec<Vec<T>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    let mut rhs: Vec<Vec<T>> = (0..n).map(|i| b.row(i).to_vec()).collect();
    for col in 0..n {
        let pivot_row = if T::EXACT {
            (col..n).find(|&r| !lhs[r][col].is_zero())
        } else {
            (col..n)
                .max_by(|&r, &s| lhs[r][col].magnitude().total_cmp(&lhs[s][col].magnitude()))
                .filter(|&r| lhs[r][col].magnitude() > threshold && !lhs[r][col].is_zero())
        };
        let Some(pivot_row) = pivot_row else {
            return Err(Error::SingularMatrix);
        };
        lhs.swap(col, pivot_row);
        rhs.swap(col, pivot_row);
        let inv = T::one() / lhs[col][col].clone();
        for v in lhs[col].iter_mut().skip(col) {
            *v = v.clone() * inv.clone();
        }
        for v in rhs[col].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        for r in 0..n {
            if r == col || lhs[r][col].is_zero() {
                continue;
            }
            let factor = lhs[r][col].clone();
            for j in col..n {
                let delta = factor.clone() * lhs[col][j].clone();
                lhs[r][j] = lhs[r][j].clone() - delta;
            }
            for j in 0..m {
                let delta = factor.clone() * rhs[col][j].clone();
                rhs[r][j] = rhs[r][j].clone() - delta;
            }
        }
    }
    Ok(Matrix::from_rows(&rhs))
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Cholesky {
    lower: Matrix<f64>,
}

impl Cholesky {
    /// Returns `None` when `s` is not (numerically) positive definite.
    pub fn factor(s: &Matrix<f64>) -> Option<Self> {
        if !s.is_square() {
            return None;
        }
        let n = s.rows();
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut d = s[(j, j)];
            for p in 0..j {
                d -= l[j * n + p] * l[j * n + p];
            }
            if !(d > 0.0) || !d.is_finite() {
                return None;
            }
            let djj = d.sqrt();
            l[j * n + j] = djj;
            for i in j + 1..n {
                let mut v = s[(i, j)];
                for p in 0..j {
                    v -= l[i * n + p] * l[j * n + p];
                }
                l[i * n + j] = v / djj;
            }
        }
        Some(Self {
            lower: Matrix::from_vec(n, n, l).expect("square"),
        })
    }

    pub fn lower(&self) -> &Matrix<f64> {
        &self.lower
    }

    pub fn log_det(&self) -> f64 {
        let n = self.lower.rows();
        2.0 * (0..n).map(|i| self.lower[(i, i)].ln()).sum::<f64>()
    }

    /// Solves `(L Lᵀ) X = b` by two triangular sweeps.
    pub fn solve(&self, b: &Matrix<f64>) -> Matrix<f64> {
        let n = self.lower.rows();
        assert_eq!(b.rows(), n);
        let l = &self.lower;
        let mut x: Vec<Vec<f64>> = (0..n).map(|i| b.row(i).to_vec()).collect();
        for c in 0..b.cols() {
            for i in 0..n {
                let mut v = x[i][c];
                for p in 0..i {
                    v -= l[(i, p)] * x[p][c];
                }
                x[i][c] = v / l[(i, i)];
            }
            for i in (0..n).rev() {
                let mut v = x[i][c];
                for p in i + 1..n {
                    v -= l[(p, i)] * x[p][c];
                }
                x[i][c] = v / l[(i, i)];
            }
        }
        Matrix::from_rows(&x)
    }

    pub fn inverse(&self) -> Matrix<f64> {
        self.solve(&Matrix::identity(self.lower.rows()))
            .symmetrize()
    }
}

/// Exact positive-definiteness test: every pivot of symmetric Gaussian
/// elimination (LDLᵀ without pivoting) must be strictly positive.
pub fn is_positive_definite_exact(s: &Matrix<BigRational>) -> bool {
    if !s.is_square() || !s.is_symmetric() {
        return false;
    }
    let n = s.rows();
    let mut a: Vec<Vec<BigRational>> = (0..n).map(|i| s.row(i).to_vec()).collect();
    for k in 0..n {
        if !Field::is_positive(&a[k][k]) {
            return false;
        }
        for i in k + 1..n {
            if Field::is_zero(&a[i][k]) {
                continue;
            }
            let f = &a[i][k] / &a[k][k];
            for j in k..n {
                let delta = &f * &a[k][j];
                a[i][j] -= delta;
            }
        }
    }
    true
}

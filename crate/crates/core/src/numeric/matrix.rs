use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use num_rational::BigRational;

use super::Field;
use crate::error::{Error, Result};

/// Dense row-major matrix over a [`Field`]. Values are immutable; every
/// operation returns a fresh matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type RatMatrix = Matrix<BigRational>;

impl<T: Field> Matrix<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from nested rows. Panics on ragged input.
    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            let row = row.as_ref();
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row.iter().cloned());
        }
        Self {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn from_i64_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let converted: Vec<Vec<T>> = rows
            .iter()
            .map(|row| row.as_ref().iter().map(|&v| T::from_i64(v)).collect())
            .collect();
        Self::from_rows(&converted)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| T::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn diagonal(values: &[T]) -> Self {
        let n = values.len();
        Self::from_fn(
            n,
            n,
            |i, j| if i == j { values[i].clone() } else { T::zero() },
        )
    }

    pub fn column(values: &[T]) -> Self {
        Self::from_fn(values.len(), 1, |i, _| values[i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn map<U: Field>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(|x| x.to_f64())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|x| x.clone() * c.clone())
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |acc, i| acc + self.get(i, i).clone())
    }

    /// Largest absolute entry, as a float.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(Field::magnitude).fold(0.0, f64::max)
    }

    /// Largest absolute entrywise difference to `other`, as a float.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a.clone() - b.clone()).magnitude())
            .fold(0.0, f64::max)
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut data = Vec::with_capacity(self.rows * rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = T::zero();
                for l in 0..self.cols {
                    let a = &self.data[i * self.cols + l];
                    if a.is_zero() {
                        continue;
                    }
                    acc = acc + a.clone() * rhs.data[l * rhs.cols + j].clone();
                }
                data.push(acc);
            }
        }
        Ok(Self {
            rows: self.rows,
            cols: rhs.cols,
            data,
        })
    }

    fn zip_with(&self, rhs: &Self, what: &str, f: impl Fn(&T, &T) -> T) -> Result<Self> {
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(Error::DimensionMismatch(format!(
                "cannot {what} {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, "add", |a, b| a.clone() + b.clone())
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, "subtract", |a, b| a.clone() - b.clone())
    }

    /// Kronecker product: block (i, j) of the result is `self[i, j] * rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (p, q) = (rhs.rows, rhs.cols);
        Self::from_fn(self.rows * p, self.cols * q, |i, j| {
            self.get(i / p, j / q).clone() * rhs.get(i % p, j % q).clone()
        })
    }

    /// Copy of the block with rows `r0..r0+nr` and columns `c0..c0+nc`.
    pub fn submatrix(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        assert!(
            r0 + nr <= self.rows && c0 + nc <= self.cols,
            "block out of range"
        );
        Self::from_fn(nr, nc, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    /// Horizontal concatenation `[a | b | ...]`.
    pub fn hstack(blocks: &[Self]) -> Result<Self> {
        let rows = blocks.first().map_or(0, |b| b.rows);
        if blocks.iter().any(|b| b.rows != rows) {
            return Err(Error::DimensionMismatch("hstack row counts differ".into()));
        }
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for b in blocks {
                data.extend_from_slice(b.row(i));
            }
        }
        Ok(Self { rows, cols, data })
    }

    /// Vertical concatenation.
    pub fn vstack(blocks: &[Self]) -> Result<Self> {
        let cols = blocks.first().map_or(0, |b| b.cols);
        if blocks.iter().any(|b| b.cols != cols) {
            return Err(Error::DimensionMismatch(
                "vstack column counts differ".into(),
            ));
        }
        let rows = blocks.iter().map(|b| b.rows).sum();
        let data = blocks.iter().flat_map(|b| b.data.iter().cloned()).collect();
        Ok(Self { rows, cols, data })
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// `(A + Aᵀ) / 2`.
    pub fn symmetrize(&self) -> Self {
        assert!(self.is_square());
        let two = T::from_i64(2);
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self.get(i, j).clone() + self.get(j, i).clone()) / two.clone()
        })
    }

    pub fn det(&self) -> Result<T> {
        if !self.is_square() {
            return Err(Error::NonSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(T::determinant(self))
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NonSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        self.solve(&Self::identity(self.rows))
    }

    /// Solves `self * X = rhs`.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        T::solve_system(self, rhs)
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T: Field> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.try_mul(rhs).expect("matrix product dimensions")
    }
}

impl<T: Field> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.try_add(rhs).expect("matrix sum dimensions")
    }
}

impl<T: Field> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.try_sub(rhs).expect("matrix difference dimensions")
    }
}

impl<T: Field> Neg for &Matrix<T> {
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        self.map(|x| -x.clone())
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[i * self.cols..(i + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = Matrix<BigRational>;

    #[test]
    fn kron_with_identity_is_block_diagonal() {
        let b = M::from_i64_rows(&[[3, 1], [1, 3]]);
        let k = M::identity(2).kron(&b);
        let expected = M::from_i64_rows(&[[3, 1, 0, 0], [1, 3, 0, 0], [0, 0, 3, 1], [0, 0, 1, 3]]);
        assert_eq!(k, expected);
    }

    #[test]
    fn kron_with_scalar_scales() {
        let b = M::from_i64_rows(&[[3, 1], [1, 3]]);
        let two = M::from_i64_rows(&[[2]]);
        assert_eq!(two.kron(&b), b.scale(&BigRational::from_integer(2.into())));
    }

    #[test]
    fn kron_dims_and_blocks() {
        let a = M::from_i64_rows(&[[1, 2, 3], [4, 5, 6]]);
        let b = M::from_i64_rows(&[[0, 1], [1, 0], [2, 2]]);
        let k = a.kron(&b);
        assert_eq!((k.rows(), k.cols()), (6, 6));
        for i in 0..2 {
            for j in 0..3 {
                assert_eq!(k.submatrix(3 * i, 2 * j, 3, 2), b.scale(a.get(i, j)));
            }
        }
    }

    #[test]
    fn stacking() {
        let a = M::from_i64_rows(&[[1], [2]]);
        let b = M::from_i64_rows(&[[3, 4], [5, 6]]);
        let h = M::hstack(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(h, M::from_i64_rows(&[[1, 3, 4], [2, 5, 6]]));
        assert!(M::vstack(&[a, b]).is_err());
    }

    #[test]
    fn product_dimension_errors() {
        let a = M::zeros(2, 3);
        assert!(matches!(a.try_mul(&a), Err(Error::DimensionMismatch(_))));
        assert!(matches!(
            a.det(),
            Err(Error::NonSquare { rows: 2, cols: 3 })
        ));
    }
}

//! Left group-action reduction of the data to `[I | C]` and the kernel
//! matrix `D` with `Dᵀ = [Cᵀ | -I_k]`.
//!
//! Splitting `D` into `n x k` blocks `d_ia` of length `m2` gives the
//! `m2 x m2` matrices `D_ab = Σ_i d_ia d_ibᵀ`. For data in canonical form
//! the profile objective reduces to
//! `m2 log det [tr(D_ab Σ)] - k log det Σ` over `Σ = K2⁻¹`.

use crate::error::{Error, Result};
use crate::model::SampleSet;
use crate::numeric::text::write_matrix;
use crate::numeric::{Cholesky, Field, Matrix, SymmetricMatrix};

#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalForm<T> {
    m1: usize,
    m2: usize,
    n: usize,
    k: usize,
    c: Matrix<T>,
    d: Matrix<T>,
    /// `D_ab` stored at `a * k + b`.
    dab: Vec<Matrix<T>>,
    ystar_det: T,
}

/// Reduces `Y = [Y_* | R]` to `[I | Y_*⁻¹ R]`.
///
/// Only the leftmost `m1 x m1` block is used as pivot; a singular `Y_*` is
/// reported as degenerate data rather than permuting columns, which would
/// change the block structure of `D`.
pub fn canonicalize<T: Field>(sample: &SampleSet<T>) -> Result<CanonicalForm<T>> {
    let k = sample.k();
    if k < 1 {
        return Err(Error::NonPositiveK(k));
    }
    let k = k as usize;
    let (m1, m2, n) = (sample.m1(), sample.m2(), sample.n());
    let y = sample.concatenated();
    let ystar = y.submatrix(0, 0, m1, m1);
    let rest = y.submatrix(0, m1, m1, k);
    let ystar_det = ystar.det()?;
    if ystar_det.is_zero() {
        return Err(Error::DegenerateData(
            "leading m1 x m1 block is singular".into(),
        ));
    }
    let c = ystar.solve(&rest).map_err(|e| match e {
        Error::SingularMatrix => Error::DegenerateData("leading m1 x m1 block is singular".into()),
        other => other,
    })?;
    Ok(CanonicalForm::from_c(m2, n, c, ystar_det))
}

impl<T: Field> CanonicalForm<T> {
    /// Builds the form directly from `C` (`m1 x k`, `m1 + k = n*m2`).
    pub fn from_c(m2: usize, n: usize, c: Matrix<T>, ystar_det: T) -> Self {
        let (m1, k) = (c.rows(), c.cols());
        assert_eq!(m1 + k, n * m2, "C must have n*m2 - m1 columns");
        let d = Matrix::vstack(&[c.clone(), -&Matrix::identity(k)]).expect("k columns");
        let block = |i: usize, a: usize| d.submatrix(i * m2, a, m2, 1);
        let mut dab = Vec::with_capacity(k * k);
        for a in 0..k {
            for b in 0..k {
                let mut acc = Matrix::zeros(m2, m2);
                for i in 0..n {
                    acc = &acc + &(&block(i, a) * &block(i, b).transpose());
                }
                dab.push(acc);
            }
        }
        Self {
            m1,
            m2,
            n,
            k,
            c,
            d,
            dab,
            ystar_det,
        }
    }

    pub fn m1(&self) -> usize {
        self.m1
    }
    pub fn m2(&self) -> usize {
        self.m2
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn c(&self) -> &Matrix<T> {
        &self.c
    }
    pub fn d(&self) -> &Matrix<T> {
        &self.d
    }

    /// `det(Y_*)`, the determinant of the eliminated block. The profile
    /// objective of the original data is `g_canonical + 2 log|det Y_*|`.
    pub fn ystar_det(&self) -> &T {
        &self.ystar_det
    }

    pub fn dab(&self, a: usize, b: usize) -> &Matrix<T> {
        &self.dab[a * self.k + b]
    }

    /// Block `d_ia` of `D`, a column of length `m2`.
    pub fn d_block(&self, i: usize, a: usize) -> Matrix<T> {
        self.d.submatrix(i * self.m2, a, self.m2, 1)
    }

    /// `[I | C]` as a sample set.
    pub fn canonical_sample(&self) -> SampleSet<T> {
        let y = Matrix::hstack(&[Matrix::identity(self.m1), self.c.clone()]).expect("rows");
        SampleSet::from_concatenated(&y, self.m2).expect("n*m2 columns")
    }

    /// The `(m2 k) x (m2 k)` block matrix `[D_ab]`.
    pub fn dab_grid(&self) -> Matrix<T> {
        let s = self.m2 * self.k;
        Matrix::from_fn(s, s, |r, c| {
            self.dab(r / self.m2, c / self.m2)
                .get(r % self.m2, c % self.m2)
                .clone()
        })
    }

    /// `k x k` matrix with entries `tr(D_ab Σ)`, equal to `Dᵀ (I_n ⊗ Σ) D`.
    pub fn trace_form(&self, sigma: &Matrix<T>) -> Result<Matrix<T>> {
        if sigma.rows() != self.m2 || sigma.cols() != self.m2 {
            return Err(Error::DimensionMismatch(format!(
                "Sigma is {}x{}, expected {}x{}",
                sigma.rows(),
                sigma.cols(),
                self.m2,
                self.m2
            )));
        }
        Ok(Matrix::from_fn(self.k, self.k, |a, b| {
            (self.dab(a, b) * sigma).trace()
        }))
    }

    /// Both sides of the determinant reduction
    /// `det(Y (I_n ⊗ K) Yᵀ) = det(K)^n det(Dᵀ (I_n ⊗ K⁻¹) D)` for `Y = [I | C]`.
    pub fn det_reduction_check(&self, k: &SymmetricMatrix<T>) -> Result<(T, T)> {
        let km = k.to_matrix();
        let lhs = self.canonical_sample().row_scatter(&km)?.det()?;
        let k_inv = km.inverse()?;
        let det_k = km.det()?;
        let det_k_pow = (0..self.n).fold(T::one(), |acc, _| acc * det_k.clone());
        let rhs = det_k_pow * self.trace_form(&k_inv)?.det()?;
        Ok((lhs, rhs))
    }

    /// Header `m1 m2 n k` followed by `C`.
    pub fn to_text(&self) -> String {
        format!(
            "{} {} {} {}\n{}",
            self.m1,
            self.m2,
            self.n,
            self.k,
            write_matrix(&self.c)
        )
    }
}

/// Sum over permutations of `0..k`, passing each permutation and its sign.
fn for_each_permutation(k: usize, mut f: impl FnMut(&[usize], f64)) {
    fn rec(perm: &mut Vec<usize>, used: &mut [bool], sign: f64, f: &mut dyn FnMut(&[usize], f64)) {
        let k = used.len();
        if perm.len() == k {
            f(perm, sign);
            return;
        }
        for v in 0..k {
            if used[v] {
                continue;
            }
            // each unused smaller value placed later forms an inversion
            let inversions = (0..v).filter(|&u| !used[u]).count();
            let s = if inversions % 2 == 0 { sign } else { -sign };
            used[v] = true;
            perm.push(v);
            rec(perm, used, s, f);
            perm.pop();
            used[v] = false;
        }
    }
    rec(&mut Vec::with_capacity(k), &mut vec![false; k], 1.0, &mut f);
}

impl CanonicalForm<f64> {
    /// `m2 log det [tr(D_ab Σ)] - k log det Σ`.
    pub fn reduced_objective(&self, sigma: &SymmetricMatrix<f64>) -> Result<f64> {
        let t = self.trace_form(&sigma.to_matrix())?;
        let ld_t = SymmetricMatrix::from_matrix_symmetrized(&t)
            .log_det()
            .map_err(|_| Error::SingularMatrix)?;
        Ok(self.m2 as f64 * ld_t - self.k as f64 * sigma.log_det()?)
    }

    /// Gradient of [`Self::reduced_objective`] by expanding `d det T` over
    /// permutations:
    /// `m2 det(T)⁻¹ Σ_π sgn(π) Σ_b (Π_{a≠b} T_{aπ(a)}) D_{bπ(b)} - k Σ⁻¹`.
    pub fn reduced_gradient(&self, sigma: &SymmetricMatrix<f64>) -> Result<Matrix<f64>> {
        let chol = sigma.cholesky().ok_or(Error::NotPositiveDefinite)?;
        let t = self.trace_form(&sigma.to_matrix())?;
        let det_t = t.det()?;
        if det_t == 0.0 {
            return Err(Error::SingularMatrix);
        }
        let k = self.k;
        let mut acc = Matrix::<f64>::zeros(self.m2, self.m2);
        for_each_permutation(k, |perm, sign| {
            for b in 0..k {
                let coeff: f64 = (0..k)
                    .filter(|&a| a != b)
                    .map(|a| t[(a, perm[a])])
                    .product();
                if coeff != 0.0 {
                    acc = &acc + &self.dab(b, perm[b]).scale(&(sign * coeff));
                }
            }
        });
        let first = acc.scale(&(self.m2 as f64 / det_t));
        Ok(&first - &chol.inverse().scale(&(k as f64)))
    }
}

/// Exact reduction check on an arbitrary `K` without the canonical
/// construction: builds `Y (I_n ⊗ K) Yᵀ` with an explicit Kronecker product.
pub fn kron_scatter<T: Field>(y: &Matrix<T>, k: &Matrix<T>, n: usize) -> Matrix<T> {
    let big = Matrix::identity(n).kron(k);
    &(y * &big) * &y.transpose()
}

/// Float Cholesky-based inverse, used where `Σ = K⁻¹` is needed.
pub fn spd_inverse(k: &SymmetricMatrix<f64>) -> Result<SymmetricMatrix<f64>> {
    let chol: Cholesky = k.cholesky().ok_or(Error::NotPositiveDefinite)?;
    Ok(SymmetricMatrix::from_matrix_symmetrized(&chol.inverse()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{parse_rational, rat, RatMatrix};
    use num_rational::BigRational;

    fn example_form() -> CanonicalForm<BigRational> {
        let c = RatMatrix::from_i64_rows(&[[1, 2], [3, 4], [5, 6], [7, 8]]);
        let y = Matrix::hstack(&[Matrix::identity(4), c]).unwrap();
        canonicalize(&SampleSet::from_concatenated(&y, 2).unwrap()).unwrap()
    }

    fn example_k() -> SymmetricMatrix<BigRational> {
        SymmetricMatrix::from_matrix(&RatMatrix::from_i64_rows(&[[3, 1], [1, 3]])).unwrap()
    }

    #[test]
    fn already_canonical_data_keeps_c() {
        let cf = example_form();
        assert_eq!(
            cf.c(),
            &RatMatrix::from_i64_rows(&[[1, 2], [3, 4], [5, 6], [7, 8]])
        );
        assert_eq!(*cf.ystar_det(), rat(1));
        let expected_d =
            RatMatrix::from_i64_rows(&[[1, 2], [3, 4], [5, 6], [7, 8], [-1, 0], [0, -1]]);
        assert_eq!(cf.d(), &expected_d);
    }

    #[test]
    fn worked_example_trace_form() {
        let cf = example_form();
        let sigma = example_k().to_matrix().inverse().unwrap();
        let t = cf.trace_form(&sigma).unwrap();
        let q = |s: &str| parse_rational(s).unwrap();
        let expected = Matrix::from_rows(&[[q("22.375"), q("25.875")], [q("25.875"), q("31.375")]]);
        assert_eq!(t, expected);
        assert_eq!(t.det().unwrap(), q("32.5"));
    }

    #[test]
    fn worked_example_determinants() {
        let cf = example_form();
        let k = example_k();
        let (lhs, rhs) = cf.det_reduction_check(&k).unwrap();
        assert_eq!(lhs, rat(16640));
        assert_eq!(rhs, rat(16640));
        assert_eq!(k.to_matrix().det().unwrap(), rat(8));
        let gram = cf.canonical_sample().row_scatter(&k.to_matrix()).unwrap();
        assert_eq!(
            gram,
            RatMatrix::from_i64_rows(&[
                [22, 44, 67, 91],
                [44, 102, 155, 211],
                [67, 155, 246, 332],
                [91, 211, 332, 454]
            ])
        );
    }

    #[test]
    fn k_one_blocks() {
        let y = RatMatrix::from_i64_rows(&[[1, 0, 0, 1], [0, 1, 0, 0], [0, 0, 1, 0]]);
        let cf = canonicalize(&SampleSet::from_concatenated(&y, 2).unwrap()).unwrap();
        assert_eq!(cf.k(), 1);
        assert_eq!(cf.d(), &RatMatrix::from_i64_rows(&[[1], [0], [0], [-1]]));
        assert_eq!(cf.d_block(0, 0), RatMatrix::from_i64_rows(&[[1], [0]]));
        assert_eq!(cf.d_block(1, 0), RatMatrix::from_i64_rows(&[[0], [-1]]));
        // rhs reduces to det(K)^n * Σ_i d_iᵀ K⁻¹ d_i
        let k = example_k();
        let (lhs, rhs) = cf.det_reduction_check(&k).unwrap();
        let kinv = k.to_matrix().inverse().unwrap();
        let scalar = (0..2).fold(rat(0), |acc, i| {
            let d = cf.d_block(i, 0);
            acc + (&(&d.transpose() * &kinv) * &d).get(0, 0).clone()
        });
        assert_eq!(rhs, rat(64) * scalar);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn identity_weight_is_weinstein_aronszajn() {
        let cf = example_form();
        let (lhs, rhs) = cf
            .det_reduction_check(&SymmetricMatrix::identity(2))
            .unwrap();
        let c = cf.c();
        let left = (&Matrix::identity(4) + &(c * &c.transpose()))
            .det()
            .unwrap();
        let right = (&Matrix::identity(2) + &(&c.transpose() * c))
            .det()
            .unwrap();
        assert_eq!(lhs, left);
        assert_eq!(rhs, right);
        assert_eq!(left, right);
    }

    #[test]
    fn degenerate_and_nonpositive_k() {
        let y = RatMatrix::from_i64_rows(&[[1, 1, 0, 1], [1, 1, 0, 0], [0, 0, 1, 0]]);
        let s = SampleSet::from_concatenated(&y, 2).unwrap();
        assert!(matches!(canonicalize(&s), Err(Error::DegenerateData(_))));
        let y = RatMatrix::from_i64_rows(&[[1, 0], [0, 1]]);
        let s = SampleSet::from_concatenated(&y, 2).unwrap();
        assert_eq!(canonicalize(&s), Err(Error::NonPositiveK(0)));
    }

    #[test]
    fn canonicalization_inverts_leading_block() {
        let y = RatMatrix::from_i64_rows(&[[2, 1, 3, 0], [1, 1, 5, 1], [0, 1, 1, 2]]);
        let s = SampleSet::from_concatenated(&y, 2).unwrap();
        let cf = canonicalize(&s).unwrap();
        let ystar = y.submatrix(0, 0, 3, 3);
        assert_eq!(&ystar * cf.c(), y.submatrix(0, 3, 3, 1));
        assert_eq!(*cf.ystar_det(), ystar.det().unwrap());
        // [I | C] D = 0
        let canon = cf.canonical_sample().concatenated();
        assert_eq!(&canon * cf.d(), RatMatrix::zeros(3, 1));
    }

    #[test]
    fn permutation_signs() {
        let mut seen = Vec::new();
        for_each_permutation(3, |p, s| seen.push((p.to_vec(), s)));
        assert_eq!(seen.len(), 6);
        let total: f64 = seen.iter().map(|(_, s)| s).sum();
        assert_eq!(total, 0.0);
        assert!(seen.contains(&(vec![0, 1, 2], 1.0)));
        assert!(seen.contains(&(vec![1, 0, 2], -1.0)));
        assert!(seen.contains(&(vec![1, 2, 0], 1.0)));
    }

    #[test]
    fn serializes_header_and_c() {
        let text = example_form().to_text();
        assert!(text.starts_with("4 2 3 2\n4 2\n1 2\n"));
    }
}

//! Likelihoods, the profile objective `g`, sample-size bounds and matrix
//! normal sampling.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numeric::text::{parse_usizes, read_matrix_lines, write_matrix};
use crate::numeric::{Field, Matrix, SymmetricMatrix};

/// `n` data matrices of shape `m1 x m2`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet<T> {
    m1: usize,
    m2: usize,
    data: Vec<Matrix<T>>,
}

impl<T: Field> SampleSet<T> {
    pub fn new(data: Vec<Matrix<T>>) -> Result<Self> {
        let first = data
            .first()
            .ok_or_else(|| Error::DimensionMismatch("a sample needs at least one matrix".into()))?;
        let (m1, m2) = (first.rows(), first.cols());
        if m1 == 0 || m2 == 0 {
            return Err(Error::DimensionMismatch("empty data matrix".into()));
        }
        if let Some(bad) = data.iter().find(|y| (y.rows(), y.cols()) != (m1, m2)) {
            return Err(Error::DimensionMismatch(format!(
                "data matrix is {}x{}, expected {m1}x{m2}",
                bad.rows(),
                bad.cols()
            )));
        }
        Ok(Self { m1, m2, data })
    }

    /// Splits the concatenation `Y = [Y_1 | ... | Y_n]` into its blocks.
    pub fn from_concatenated(y: &Matrix<T>, m2: usize) -> Result<Self> {
        if m2 == 0 || y.cols() % m2 != 0 {
            return Err(Error::DimensionMismatch(format!(
                "{} columns are not a multiple of m2 = {m2}",
                y.cols()
            )));
        }
        let n = y.cols() / m2;
        Self::new(
            (0..n)
                .map(|i| y.submatrix(0, i * m2, y.rows(), m2))
                .collect(),
        )
    }

    pub fn m1(&self) -> usize {
        self.m1
    }

    pub fn m2(&self) -> usize {
        self.m2
    }

    pub fn n(&self) -> usize {
        self.data.len()
    }

    /// `k = n*m2 - m1`, the number of columns of `C` in the canonical form.
    pub fn k(&self) -> i64 {
        (self.n() * self.m2) as i64 - self.m1 as i64
    }

    pub fn data(&self) -> &[Matrix<T>] {
        &self.data
    }

    pub fn concatenated(&self) -> Matrix<T> {
        Matrix::hstack(&self.data).expect("blocks share row count")
    }

    pub fn map<U: Field>(&self, f: impl Fn(&T) -> U + Copy) -> SampleSet<U> {
        SampleSet {
            m1: self.m1,
            m2: self.m2,
            data: self.data.iter().map(|y| y.map(f)).collect(),
        }
    }

    pub fn to_f64(&self) -> SampleSet<f64> {
        self.map(|v| v.to_f64())
    }

    /// Applies `Y_i -> A Y_i Bᵀ` to every observation.
    pub fn transformed(&self, a: &Matrix<T>, b: &Matrix<T>) -> Result<Self> {
        let bt = b.transpose();
        let data = self
            .data
            .iter()
            .map(|y| a.try_mul(y)?.try_mul(&bt))
            .collect::<Result<Vec<_>>>()?;
        Self::new(data)
    }

    /// `Σ_i Y_i K Y_iᵀ` (`m1 x m1`).
    pub fn row_scatter(&self, k2: &Matrix<T>) -> Result<Matrix<T>> {
        check_dim(k2, self.m2, "K2")?;
        let mut acc = Matrix::zeros(self.m1, self.m1);
        for y in &self.data {
            acc = &acc + &(&(y * k2) * &y.transpose());
        }
        Ok(acc)
    }

    /// `Σ_i Y_iᵀ K Y_i` (`m2 x m2`).
    pub fn col_scatter(&self, k1: &Matrix<T>) -> Result<Matrix<T>> {
        check_dim(k1, self.m1, "K1")?;
        let mut acc = Matrix::zeros(self.m2, self.m2);
        for y in &self.data {
            acc = &acc + &(&(&y.transpose() * k1) * y);
        }
        Ok(acc)
    }

    /// Header `m1 m2 n` followed by `[Y_1 | ... | Y_n]` in the matrix format.
    pub fn to_text(&self) -> String {
        format!(
            "{} {} {}\n{}",
            self.m1,
            self.m2,
            self.n(),
            write_matrix(&self.concatenated())
        )
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty sample file".into()))?;
        let dims = parse_usizes(header)?;
        let [m1, m2, n] = dims[..] else {
            return Err(Error::Parse(format!(
                "sample header {header:?} needs `m1 m2 n`"
            )));
        };
        let y: Matrix<T> = read_matrix_lines(&mut lines)?;
        if (y.rows(), y.cols()) != (m1, n * m2) {
            return Err(Error::Parse(format!(
                "sample matrix is {}x{}, header implies {m1}x{}",
                y.rows(),
                y.cols(),
                n * m2
            )));
        }
        Self::from_concatenated(&y, m2)
    }
}

fn check_dim<T: Field>(m: &Matrix<T>, dim: usize, name: &str) -> Result<()> {
    if m.rows() != dim || m.cols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "{name} is {}x{}, expected {dim}x{dim}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

/// Gaussian log-likelihood `n log det K - n tr(S K)` (constants dropped).
pub fn gaussian_loglik(
    s: &SymmetricMatrix<f64>,
    k: &SymmetricMatrix<f64>,
    n: usize,
) -> Result<f64> {
    if s.dim() != k.dim() {
        return Err(Error::DimensionMismatch("S and K differ in size".into()));
    }
    let log_det = k.log_det()?;
    let trace = (&s.to_matrix() * &k.to_matrix()).trace();
    Ok(n as f64 * (log_det - trace))
}

/// Kronecker log-likelihood
/// `n m2 log det K1 + n m1 log det K2 - tr(Σ_i K1 Y_i K2 Y_iᵀ)`.
pub fn kron_loglik(
    sample: &SampleSet<f64>,
    k1: &SymmetricMatrix<f64>,
    k2: &SymmetricMatrix<f64>,
) -> Result<f64> {
    if k1.dim() != sample.m1() || k2.dim() != sample.m2() {
        return Err(Error::DimensionMismatch(format!(
            "factors are {}x{} and {}x{} for data of shape {}x{}",
            k1.dim(),
            k1.dim(),
            k2.dim(),
            k2.dim(),
            sample.m1(),
            sample.m2()
        )));
    }
    let (n, m1, m2) = (sample.n() as f64, sample.m1() as f64, sample.m2() as f64);
    let ld1 = k1.log_det()?;
    let ld2 = k2.log_det()?;
    let scatter = sample.row_scatter(&k2.to_matrix())?;
    let trace = (&k1.to_matrix() * &scatter).trace();
    Ok(n * m2 * ld1 + n * m1 * ld2 - trace)
}

/// Maximizer of the Kronecker likelihood over `K1` for fixed `K2`:
/// `((1/(n m2)) Σ_i Y_i K2 Y_iᵀ)⁻¹`.
pub fn profile_k1<T: Field>(
    sample: &SampleSet<T>,
    k2: &SymmetricMatrix<T>,
) -> Result<SymmetricMatrix<T>> {
    let scatter = sample.row_scatter(&k2.to_matrix())?;
    let factor = T::from_i64((sample.n() * sample.m2()) as i64);
    let inv = scatter.inverse()?.scale(&factor);
    Ok(SymmetricMatrix::from_matrix_symmetrized(&inv))
}

/// The analogous maximizer over `K2` for fixed `K1`:
/// `((1/(n m1)) Σ_i Y_iᵀ K1 Y_i)⁻¹`.
pub fn profile_k2<T: Field>(
    sample: &SampleSet<T>,
    k1: &SymmetricMatrix<T>,
) -> Result<SymmetricMatrix<T>> {
    let scatter = sample.col_scatter(&k1.to_matrix())?;
    let factor = T::from_i64((sample.n() * sample.m1()) as i64);
    let inv = scatter.inverse()?.scale(&factor);
    Ok(SymmetricMatrix::from_matrix_symmetrized(&inv))
}

/// Profile objective `g(K) = m2 log det(Σ_i Y_i K Y_iᵀ) - m1 log det K`,
/// evaluated through Cholesky log-determinants.
pub fn g_objective(sample: &SampleSet<f64>, k2: &SymmetricMatrix<f64>) -> Result<f64> {
    let ld_k = k2.log_det()?;
    let scatter = sample.row_scatter(&k2.to_matrix())?;
    let ld_s = SymmetricMatrix::from_matrix_symmetrized(&scatter)
        .log_det()
        .map_err(|_| Error::SingularMatrix)?;
    Ok(sample.m2() as f64 * ld_s - sample.m1() as f64 * ld_k)
}

/// Profile log-likelihood evaluated directly:
/// `-n m2 log det((1/(n m2)) Σ Y_i K Y_iᵀ) + n m1 log det K - n m1 m2`.
pub fn profile_loglik(sample: &SampleSet<f64>, k2: &SymmetricMatrix<f64>) -> Result<f64> {
    let (n, m1, m2) = (sample.n() as f64, sample.m1() as f64, sample.m2() as f64);
    let scatter = sample
        .row_scatter(&k2.to_matrix())?
        .scale(&(1.0 / (n * m2)));
    let ld_s = SymmetricMatrix::from_matrix_symmetrized(&scatter)
        .log_det()
        .map_err(|_| Error::SingularMatrix)?;
    Ok(-n * m2 * ld_s + n * m1 * k2.log_det()? - n * m1 * m2)
}

/// Bounds on the minimum sample sizes for existence and uniqueness:
/// `max(m1/m2, m2/m1) <= N_e <= N_u <= floor(m1/m2 + m2/m1) + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThresholdBounds {
    pub lower: BigRational,
    pub upper: u64,
}

pub fn thresholds(m1: u64, m2: u64) -> ThresholdBounds {
    assert!(m1 >= 1 && m2 >= 1, "dimensions must be positive");
    let lower = BigRational::new(BigInt::from(m1.max(m2)), BigInt::from(m1.min(m2)));
    // floor((m1^2 + m2^2) / (m1 m2))
    let (q, _) = (m1 * m1 + m2 * m2).div_rem(&(m1 * m2));
    ThresholdBounds {
        lower,
        upper: q + 1,
    }
}

/// Standard normal variates from a seeded ChaCha stream via Box–Muller.
pub struct NormalStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl NormalStream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // u1 in (0, 1] keeps the logarithm finite
        let u1: f64 = 1.0 - self.rng.gen::<f64>();
        let u2: f64 = self.rng.gen();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }
}

/// `n` independent draws of `A Z B` with `Z` standard normal, i.e. samples
/// with covariance `(B Bᵀ) ⊗ (A Aᵀ)`.
pub fn sample_matrix_normal(
    a: &Matrix<f64>,
    b: &Matrix<f64>,
    n: usize,
    seed: u64,
) -> Result<SampleSet<f64>> {
    if !a.is_square() || !b.is_square() {
        return Err(Error::DimensionMismatch("A and B must be square".into()));
    }
    let (m1, m2) = (a.rows(), b.rows());
    let mut stream = NormalStream::new(seed);
    let data = (0..n)
        .map(|_| {
            let z = Matrix::from_fn(m1, m2, |_, _| stream.next_normal());
            &(a * &z) * b
        })
        .collect();
    SampleSet::new(data)
}

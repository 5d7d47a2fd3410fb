//! Kronecker MLE engines: the closed form for `k = n*m2 - m1 = 1` and the
//! flip-flop block-coordinate ascent.

use std::fmt;

use crate::canonical::canonicalize;
use crate::error::{Error, Result};
use crate::model::{kron_loglik, profile_k1, profile_k2, SampleSet};
use crate::numeric::text::{read_matrix_lines, write_matrix};
use crate::numeric::{Field, Matrix, SymmetricMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Exact,
    FlipFlop,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Exact => "exact",
            Method::FlipFlop => "flipflop",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Method::Exact),
            "flipflop" => Ok(Method::FlipFlop),
            other => Err(Error::Parse(format!("unknown method {other:?}"))),
        }
    }
}

/// Estimated concentration factors with `det(K2) = 1`; `K1` carries the scale.
#[derive(Clone, Debug, PartialEq)]
pub struct KroneckerEstimate {
    pub k1: SymmetricMatrix<f64>,
    pub k2: SymmetricMatrix<f64>,
    pub loglik: f64,
    pub method: Method,
    pub iterations: usize,
    pub converged: bool,
    /// Log-likelihood after each flip-flop sweep (empty for the exact path).
    pub history: Vec<f64>,
}

impl KroneckerEstimate {
    /// Header `m1 m2 method iterations converged loglik`, then `K1` and `K2`.
    pub fn to_text(&self) -> String {
        format!(
            "{} {} {} {} {} {}\n{}{}",
            self.k1.dim(),
            self.k2.dim(),
            self.method,
            self.iterations,
            self.converged,
            self.loglik,
            write_matrix(&self.k1.to_matrix()),
            write_matrix(&self.k2.to_matrix())
        )
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty estimate file".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let [m1, m2, method, iterations, converged, loglik] = fields[..] else {
            return Err(Error::Parse(format!("bad estimate header {header:?}")));
        };
        let bad = |what: &str| Error::Parse(format!("bad {what} in estimate header"));
        let m1: usize = m1.parse().map_err(|_| bad("m1"))?;
        let m2: usize = m2.parse().map_err(|_| bad("m2"))?;
        let k1: Matrix<f64> = read_matrix_lines(&mut lines)?;
        let k2: Matrix<f64> = read_matrix_lines(&mut lines)?;
        if k1.rows() != m1 || k2.rows() != m2 {
            return Err(Error::Parse("factor sizes disagree with header".into()));
        }
        Ok(Self {
            k1: SymmetricMatrix::from_matrix(&k1)?,
            k2: SymmetricMatrix::from_matrix(&k2)?,
            loglik: loglik.parse().map_err(|_| bad("loglik"))?,
            method: method.parse()?,
            iterations: iterations.parse().map_err(|_| bad("iterations"))?,
            converged: converged.parse().map_err(|_| bad("converged"))?,
            history: Vec::new(),
        })
    }

    /// Kronecker product `K2 ⊗ K1`, the full concentration matrix.
    pub fn concentration(&self) -> Matrix<f64> {
        self.k2.to_matrix().kron(&self.k1.to_matrix())
    }
}

/// Rescales so that `det(K2) = 1`, moving the factor into `K1`.
pub fn normalize_pair(
    k1: &SymmetricMatrix<f64>,
    k2: &SymmetricMatrix<f64>,
) -> Result<(SymmetricMatrix<f64>, SymmetricMatrix<f64>)> {
    let scale = (k2.log_det()? / k2.dim() as f64).exp();
    Ok((k1.scale(&scale), k2.scale(&(1.0 / scale))))
}

/// Unnormalized closed-form pair for `k = 1`, exact when `T` is rational.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedFormPair<T> {
    /// `Σ_i v_i v_iᵀ` with `v = [yᵀ Y_*⁻ᵀ, -1]` split into blocks of length `m2`.
    pub k2: SymmetricMatrix<T>,
    pub k2_det: T,
    /// `K1` profiled at the unnormalized `K2`.
    pub k1: SymmetricMatrix<T>,
}

/// Closed-form MLE for `n*m2 = m1 + 1`. The estimate exists iff `n >= m2`
/// and `Σ_i v_i v_iᵀ` is positive definite.
pub fn exact_mle_k1_pair<T: Field>(sample: &SampleSet<T>) -> Result<ClosedFormPair<T>>
where
    SymmetricMatrix<T>: PositiveDefinite,
{
    if sample.k() != 1 {
        return Err(Error::WrongRegime(format!(
            "closed form needs k = n*m2 - m1 = 1, got k = {}",
            sample.k()
        )));
    }
    if sample.n() < sample.m2() {
        return Err(Error::MleNotExists(format!(
            "n = {} < m2 = {}",
            sample.n(),
            sample.m2()
        )));
    }
    let cf = canonicalize(sample)?;
    let k2 = SymmetricMatrix::from_matrix_symmetrized(cf.dab(0, 0));
    if !k2.positive_definite() {
        return Err(Error::MleNotExists(
            "Σ_i v_i v_iᵀ is not positive definite".into(),
        ));
    }
    let k2_det = k2.to_matrix().det()?;
    let k1 = profile_k1(sample, &k2)?;
    Ok(ClosedFormPair { k2, k2_det, k1 })
}

/// Positive-definiteness test dispatching on the field.
pub trait PositiveDefinite {
    fn positive_definite(&self) -> bool;
}

impl PositiveDefinite for SymmetricMatrix<f64> {
    fn positive_definite(&self) -> bool {
        // A rank-deficient Gram matrix can carry a roundoff-sized positive pivot.
        match self.cholesky() {
            Some(c) => {
                let l = c.lower();
                let max_diag = (0..l.rows()).map(|i| l[(i, i)]).fold(0.0, f64::max);
                (0..l.rows()).all(|i| l[(i, i)] > 1e-7 * max_diag)
            }
            None => false,
        }
    }
}

impl PositiveDefinite for SymmetricMatrix<num_rational::BigRational> {
    fn positive_definite(&self) -> bool {
        self.is_positive_definite()
    }
}

/// Closed-form estimate for `k = 1`, normalized to `det(K2) = 1`.
pub fn exact_mle_k1(sample: &SampleSet<f64>) -> Result<KroneckerEstimate> {
    let pair = exact_mle_k1_pair(sample)?;
    let (k1, k2) = normalize_pair(&pair.k1, &pair.k2)?;
    let loglik = kron_loglik(sample, &k1, &k2)?;
    Ok(KroneckerEstimate {
        k1,
        k2,
        loglik,
        method: Method::Exact,
        iterations: 0,
        converged: true,
        history: Vec::new(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlipFlopConfig {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for FlipFlopConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 10_000,
        }
    }
}

/// State after one flip-flop sweep, handed to observers.
pub struct Sweep<'a> {
    pub index: usize,
    pub k1: &'a SymmetricMatrix<f64>,
    pub k2: &'a SymmetricMatrix<f64>,
    pub loglik: f64,
    pub change: f64,
}

/// Flip-flop: alternate the closed-form `K1` and `K2` block maximizers.
/// After each sweep `K2` is rescaled to determinant one. Stops when the
/// max-abs change of normalized `K2` drops below `tol`; hitting `max_iter`
/// is reported through `converged = false`.
pub fn flipflop(
    sample: &SampleSet<f64>,
    init_k2: &SymmetricMatrix<f64>,
    config: FlipFlopConfig,
) -> Result<KroneckerEstimate> {
    flipflop_observed(sample, init_k2, config, |_| {})
}

pub fn flipflop_observed(
    sample: &SampleSet<f64>,
    init_k2: &SymmetricMatrix<f64>,
    config: FlipFlopConfig,
    mut observe: impl FnMut(&Sweep<'_>),
) -> Result<KroneckerEstimate> {
    if init_k2.dim() != sample.m2() {
        return Err(Error::DimensionMismatch(
            "initial K2 has the wrong size".into(),
        ));
    }
    if !init_k2.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    let (m1, m2, n) = (sample.m1(), sample.m2(), sample.n());
    if n * m2 < m1 || n * m1 < m2 {
        return Err(Error::WrongRegime(format!(
            "flip-flop needs n*m2 >= m1 and n*m1 >= m2 (m1 = {m1}, m2 = {m2}, n = {n})"
        )));
    }
    let (_, mut k2) = normalize_pair(&SymmetricMatrix::identity(m1), init_k2)?;
    let mut k1 = profile_k1(sample, &k2)?;
    let mut history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < config.max_iter {
        iterations += 1;
        k1 = profile_k1(sample, &k2)?;
        let next_k2 = profile_k2(sample, &k1)?;
        let (nk1, nk2) = normalize_pair(&k1, &next_k2).map_err(|_| Error::SingularMatrix)?;
        let change = nk2.to_matrix().max_abs_diff(&k2.to_matrix());
        k1 = nk1;
        k2 = nk2;
        let loglik = kron_loglik(sample, &k1, &k2)?;
        history.push(loglik);
        observe(&Sweep {
            index: iterations,
            k1: &k1,
            k2: &k2,
            loglik,
            change,
        });
        if change < config.tol {
            converged = true;
            break;
        }
    }
    let loglik = kron_loglik(sample, &k1, &k2)?;
    Ok(KroneckerEstimate {
        k1,
        k2,
        loglik,
        method: Method::FlipFlop,
        iterations,
        converged,
        history,
    })
}

/// Dispatches to the closed form when `k = 1`, otherwise flip-flop from
/// `K2 = I`.
pub fn mle(sample: &SampleSet<f64>, config: FlipFlopConfig) -> Result<KroneckerEstimate> {
    if sample.k() == 1 {
        exact_mle_k1(sample)
    } else {
        flipflop(sample, &SymmetricMatrix::identity(sample.m2()), config)
    }
}

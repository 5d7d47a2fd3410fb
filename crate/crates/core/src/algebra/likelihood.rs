//! Likelihood-equation ideals: the `m2 = 2` ML-degree pipeline on random
//! integer data, and the two parametric systems whose solution counts show
//! that a single data set can have several critical points.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::groebner::Timeout;
use super::ideal::PolyIdeal;
use super::monomial::{Monomial, TermOrder};
use super::poly::{ring_vars, MultiPoly};
use super::ratfunc::RatFunc;
use crate::error::{Error, Result};
use crate::model::SampleSet;
use crate::numeric::{rat, rational_to_f64, Matrix};

/// Data entries are drawn uniformly from `0..ENTRY_RANGE`.
pub const ENTRY_RANGE: i64 = 17;

/// `n` integer matrices of shape `m1 x m2`, entries uniform on `{0, ..., 16}`.
pub fn sample_integer_data(
    m1: usize,
    m2: usize,
    n: usize,
    seed: u64,
) -> Result<SampleSet<BigRational>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..n)
        .map(|_| Matrix::from_fn(m1, m2, |_, _| rat(rng.gen_range(0..ENTRY_RANGE))))
        .collect();
    SampleSet::new(data)
}

/// Determinant of a square polynomial matrix by Laplace expansion along
/// rows, memoizing the minors on the trailing rows by column set.
pub fn poly_det(m: &[Vec<MultiPoly>], vars: &Arc<[String]>) -> MultiPoly {
    let size = m.len();
    assert!(
        size < 32 && m.iter().all(|r| r.len() == size),
        "square matrix of size < 32 expected"
    );
    if size == 0 {
        return MultiPoly::from_i64(vars, 1);
    }
    let mut memo: HashMap<u32, MultiPoly> = HashMap::new();
    minor(m, vars, (1u32 << size) - 1, &mut memo)
}

fn minor(
    m: &[Vec<MultiPoly>],
    vars: &Arc<[String]>,
    cols: u32,
    memo: &mut HashMap<u32, MultiPoly>,
) -> MultiPoly {
    let size = m.len();
    let row = size - cols.count_ones() as usize;
    if row == size {
        return MultiPoly::from_i64(vars, 1);
    }
    if let Some(d) = memo.get(&cols) {
        return d.clone();
    }
    let mut det = MultiPoly::zero(vars);
    let mut sign_positive = true;
    for j in 0..size {
        if cols & (1 << j) == 0 {
            continue;
        }
        let entry = &m[row][j];
        if !entry.is_zero() {
            let sub = minor(m, vars, cols & !(1 << j), memo);
            let term = entry * &sub;
            det = if sign_positive {
                &det + &term
            } else {
                &det - &term
            };
        }
        sign_positive = !sign_positive;
    }
    memo.insert(cols, det.clone());
    det
}

/// Likelihood equations for `m2 = 2` in the chart `K = [[1, k12], [k12, k22]]`.
#[derive(Clone, Debug)]
pub struct MlDegreeSystem {
    pub data: SampleSet<BigRational>,
    /// `det Σ_i Y_i K Y_iᵀ`.
    pub g1: MultiPoly,
    /// `det K`.
    pub g2: MultiPoly,
    /// Generators before saturation, in the ring `[k12, k22]`.
    pub equations: PolyIdeal,
    /// Saturation by `g1 g2 k22`, in the ring `[y, k12, k22]`.
    pub saturated: PolyIdeal,
}

impl MlDegreeSystem {
    /// Builds the system for arbitrary data with two columns.
    pub fn from_data(data: SampleSet<BigRational>) -> Result<Self> {
        if data.m2() != 2 {
            return Err(Error::WrongRegime(format!(
                "the ML-degree pipeline needs m2 = 2, got {}",
                data.m2()
            )));
        }
        let (m1, m2) = (data.m1(), data.m2());
        let vars = ring_vars(&["k12", "k22"]);
        let one = MultiPoly::from_i64(&vars, 1);
        let k12 = MultiPoly::var(&vars, 0);
        let k22 = MultiPoly::var(&vars, 1);
        let k = [[one.clone(), k12.clone()], [k12.clone(), k22.clone()]];

        let mut scatter = vec![vec![MultiPoly::zero(&vars); m1]; m1];
        for y in data.data() {
            for a in 0..m1 {
                for b in a..m1 {
                    let mut entry = scatter[a][b].clone();
                    for (p, kp) in k.iter().enumerate() {
                        for (q, kpq) in kp.iter().enumerate() {
                            let c = &y[(a, p)] * &y[(b, q)];
                            if !c.is_zero() {
                                entry = &entry + &kpq.scale(&c);
                            }
                        }
                    }
                    scatter[a][b] = entry;
                }
            }
        }
        for a in 0..m1 {
            for b in 0..a {
                scatter[a][b] = scatter[b][a].clone();
            }
        }
        let g1 = poly_det(&scatter, &vars);
        let g2 = &k22 - &(&k12 * &k12);

        let (m1q, m2q) = (rat(m1 as i64), rat(m2 as i64));
        let equations: Vec<MultiPoly> = [1usize, 0]
            .iter()
            .map(|&e| {
                &(&g2 * &g1.derivative(e)).scale(&m2q) - &(&g1 * &g2.derivative(e)).scale(&m1q)
            })
            .collect();
        let equations = PolyIdeal::new(&vars, equations);
        let saturated = equations.saturate_rabinowitsch(&(&(&g1 * &g2) * &k22));
        Ok(Self {
            data,
            g1,
            g2,
            equations,
            saturated,
        })
    }

    /// Relative residual `|p(x)| / Σ|c_α x^α|` of each generator at a chart
    /// point `(k12, k22)`.
    pub fn relative_residuals(&self, point: [f64; 2]) -> Vec<f64> {
        self.equations
            .generators()
            .iter()
            .map(|p| {
                let (value, scale) = p.eval_f64_with_scale(&point);
                if scale == 0.0 {
                    0.0
                } else {
                    value.abs() / scale
                }
            })
            .collect()
    }

    /// Exact generator values at a rational chart point.
    pub fn exact_residuals(&self, point: &[BigRational; 2]) -> Vec<BigRational> {
        self.equations
            .generators()
            .iter()
            .map(|p| p.eval(point))
            .collect()
    }
}

/// Chart coordinates `(k12 / k11, k22 / k11)` of a 2x2 concentration.
pub fn chart_point<T: crate::numeric::Field>(k2: &Matrix<T>) -> Option<[T; 2]>
where
    for<'a> &'a T: std::ops::Div<&'a T, Output = T>,
{
    assert_eq!((k2.rows(), k2.cols()), (2, 2));
    let k11 = &k2[(0, 0)];
    if k11.is_zero() {
        return None;
    }
    Some([&k2[(0, 1)] / k11, &k2[(1, 1)] / k11])
}

/// System on seeded random data with `m2 = 2`.
pub fn likelihood_equations_m2_2(m1: usize, n: usize, seed: u64) -> Result<MlDegreeSystem> {
    MlDegreeSystem::from_data(sample_integer_data(m1, 2, n, seed)?)
}

/// Outcome of an ML-degree computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MlDegree {
    /// Zero-dimensional saturated ideal of this degree (0 for the unit ideal).
    Degree(u64),
    /// Positive-dimensional ideal; reported as degree 0.
    Degenerate,
    /// The pair budget ran out after this many reductions.
    Timeout(usize),
}

impl MlDegree {
    /// The tabulated value: the degree, 0 when degenerate, none on timeout.
    pub fn value(&self) -> Option<u64> {
        match self {
            MlDegree::Degree(d) => Some(*d),
            MlDegree::Degenerate => Some(0),
            MlDegree::Timeout(_) => None,
        }
    }
}

impl fmt::Display for MlDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MlDegree::Degree(d) => write!(f, "{d}"),
            MlDegree::Degenerate => f.write_str("0"),
            MlDegree::Timeout(_) => f.write_str("timeout"),
        }
    }
}

pub fn ml_degree_of(system: &MlDegreeSystem, pair_budget: usize) -> MlDegree {
    match system
        .saturated
        .groebner_with_budget(TermOrder::GrevLex, pair_budget)
    {
        Ok(gb) => match gb.dim_and_degree() {
            (true, Some(d)) => MlDegree::Degree(d),
            _ => MlDegree::Degenerate,
        },
        Err(Timeout { pairs_reduced }) => MlDegree::Timeout(pairs_reduced),
    }
}

pub fn ml_degree(m1: usize, n: usize, seed: u64, pair_budget: usize) -> Result<MlDegree> {
    Ok(ml_degree_of(
        &likelihood_equations_m2_2(m1, n, seed)?,
        pair_budget,
    ))
}

/// The two parametric families with several critical points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyCase {
    /// `m2 > 2`, unknowns `(t, b)`.
    One,
    /// `m2 = 2`, unknowns `(b, c)`.
    Two,
}

impl FamilyCase {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyCase::One => "one",
            FamilyCase::Two => "two",
        }
    }

    /// Largest possible number of solutions.
    pub fn max_solutions(&self) -> usize {
        match self {
            FamilyCase::One => 5,
            FamilyCase::Two => 4,
        }
    }

    /// Variable remaining in the `b = 0` equation.
    fn b0_var(&self) -> &'static str {
        match self {
            FamilyCase::One => "t",
            FamilyCase::Two => "c",
        }
    }
}

impl fmt::Display for FamilyCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for FamilyCase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one" | "1" => Ok(FamilyCase::One),
            "two" | "2" => Ok(FamilyCase::Two),
            other => Err(Error::Parse(format!(
                "unknown case {other:?}, expected one or two"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FamilySystem {
    pub case: FamilyCase,
    pub m2: i64,
    pub k: i64,
    /// The two score equations as rational functions in lowest terms.
    pub equations: [RatFunc; 2],
    /// Numerators plus `y * den_1 * den_2 - 1`.
    pub ideal: PolyIdeal,
}

fn check_regime(m2: i64, k: i64, case: FamilyCase) -> Result<()> {
    match case {
        FamilyCase::One if m2 <= 2 => Err(Error::RegimeViolation(format!(
            "case one needs m2 > 2, got m2 = {m2}"
        ))),
        FamilyCase::Two if m2 != 2 => Err(Error::RegimeViolation(format!(
            "case two needs m2 = 2, got m2 = {m2}"
        ))),
        _ if k < 2 => Err(Error::RegimeViolation(format!(
            "k must be at least 2, got k = {k}"
        ))),
        _ => Ok(()),
    }
}

pub fn family_system(m2: i64, k: i64, case: FamilyCase) -> Result<FamilySystem> {
    check_regime(m2, k, case)?;
    let vars = match case {
        FamilyCase::One => ring_vars(&["y", "t", "b"]),
        FamilyCase::Two => ring_vars(&["y", "b", "c"]),
    };
    let p = |s: String| MultiPoly::parse(&vars, &s).expect("well-formed polynomial");
    let f = |num: String, dens: &[&str]| {
        let dens: Vec<MultiPoly> = dens.iter().map(|d| p(d.to_string())).collect();
        RatFunc::new(p(num), &dens)
    };
    let equations = match case {
        FamilyCase::One => {
            let quad = "4*t^2 + 4*t - b^2";
            let e1 = &f(format!("{}*b", -2 * m2), &[quad])
                + &f(format!("{}*b", 2 * k), &["1 - b", "1 + b"]);
            let e2 = &(&f(format!("{}*t + {}", 8 * m2, 4 * m2), &[quad])
                + &f(format!("{}", m2 * (k - 2)), &["t"]))
                - &f(format!("{}", k * (m2 - 2)), &["t - 2"]);
            [e1, e2]
        }
        FamilyCase::Two => {
            let quad = "4*c^2 + 10*c + 6 - b^2";
            let e3 = &(&f(format!("{}*c + {}", 8 * m2, 10 * m2), &[quad])
                + &f(format!("{}", m2 * (k - 2)), &["c + 1"]))
                - &f(format!("{k}"), &["c - b^2"]);
            let e4 =
                &f(format!("{}*b", -2 * m2), &[quad]) + &f(format!("{}*b", 2 * k), &["c - b^2"]);
            [e3, e4]
        }
    };
    let y = MultiPoly::var(&vars, 0);
    let den = &equations[0].denominator() * &equations[1].denominator();
    let gens = vec![
        equations[0].numerator().clone(),
        equations[1].numerator().clone(),
        &(&y * &den) - &MultiPoly::from_i64(&vars, 1),
    ];
    let ideal = PolyIdeal::new(&vars, gens);
    Ok(FamilySystem {
        case,
        m2,
        k,
        equations,
        ideal,
    })
}

impl FamilySystem {
    pub fn solution_count(&self, pair_budget: usize) -> Result<usize> {
        let gb = self
            .ideal
            .groebner_with_budget(TermOrder::GrevLex, pair_budget)
            .map_err(|t| Error::Timeout(t.pairs_reduced))?;
        match gb.dim_and_degree() {
            (true, Some(d)) => Ok(d as usize),
            _ => Err(Error::RegimeViolation(format!(
                "case {} system with m2 = {}, k = {} is not zero-dimensional",
                self.case, self.m2, self.k
            ))),
        }
    }

    /// The `b = 0` branch: the first equation (case one) or the first
    /// equation of case two, with `b = 0`, cleared of every factor shared
    /// with its denominator and made primitive.
    pub fn b0_equation(&self) -> Quadratic {
        let b = self
            .ideal
            .vars()
            .iter()
            .position(|v| v == "b")
            .expect("b is a variable");
        let e = match self.case {
            FamilyCase::One => &self.equations[1],
            FamilyCase::Two => &self.equations[0],
        };
        let zero = BigRational::zero();
        let num = e.numerator().substitute(b, &zero);
        let den = e.denominator().substitute(b, &zero);
        let g = univariate_gcd(&num, &den);
        let q = num.div_exact(&g).expect("gcd divides");
        Quadratic::from_poly(&q.primitive(TermOrder::GrevLex), self.case.b0_var())
    }
}

fn univariate_gcd(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_zero() {
        let (_, r) = a.div_rem(&b, TermOrder::Lex);
        a = b;
        b = r;
    }
    a.monic(TermOrder::Lex)
}

/// Counts the solutions of the system and checks them against `[2, max]`.
pub fn ml_multiplicity_family(
    m2: i64,
    k: i64,
    case: FamilyCase,
    pair_budget: usize,
) -> Result<usize> {
    let count = family_system(m2, k, case)?.solution_count(pair_budget)?;
    let (lower, upper) = (2, case.max_solutions());
    if count < lower || count > upper {
        return Err(Error::CountOutOfRange {
            count,
            lower,
            upper,
        });
    }
    Ok(count)
}

/// `a x^2 + b x + c` over the rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quadratic {
    pub var: String,
    pub coeffs: [BigRational; 3],
}

impl Quadratic {
    /// Closed-form coefficients of the `b = 0` branch: case one gives
    /// `2k t^2 + (2k - m2 - 2k m2) t + 2m2 - 2k m2`, case two gives
    /// `(2k m2 - 2k) c^2 + (3k m2 - m2 - 5k) c - 3k`.
    pub fn closed_form(m2: i64, k: i64, case: FamilyCase) -> Result<Self> {
        check_regime(m2, k, case)?;
        let coeffs = match case {
            FamilyCase::One => [2 * k, 2 * k - m2 - 2 * k * m2, 2 * m2 - 2 * k * m2],
            FamilyCase::Two => [2 * k * m2 - 2 * k, 3 * k * m2 - m2 - 5 * k, -3 * k],
        };
        Ok(Self {
            var: case.b0_var().to_string(),
            coeffs: coeffs.map(rat),
        })
    }

    fn from_poly(p: &MultiPoly, var: &str) -> Self {
        let i = p
            .vars()
            .iter()
            .position(|v| v == var)
            .expect("variable present");
        assert!(p.total_degree().unwrap_or(0) <= 2, "not a quadratic: {p}");
        let coeff = |e: u32| p.coefficient(&Monomial::var(i, e));
        Self {
            var: var.to_string(),
            coeffs: [coeff(2), coeff(1), coeff(0)],
        }
    }

    pub fn discriminant(&self) -> BigRational {
        let [a, b, c] = &self.coeffs;
        b * b - rat(4) * a * c
    }

    /// Whether the two quadratics agree up to a nonzero constant factor.
    pub fn proportional_to(&self, other: &Self) -> bool {
        let [a, b, c] = &self.coeffs;
        let [x, y, z] = &other.coeffs;
        a * y == b * x
            && a * z == c * x
            && b * z == c * y
            && self.coeffs.iter().any(|v| !v.is_zero())
    }

    /// Roots as `(re, im)` pairs.
    pub fn roots(&self) -> Vec<(f64, f64)> {
        let [a, b, _] = self.coeffs.clone().map(|v| rational_to_f64(&v));
        let d = rational_to_f64(&self.discriminant());
        if a == 0.0 {
            let c = rational_to_f64(&self.coeffs[2]);
            return if b == 0.0 {
                Vec::new()
            } else {
                vec![(-c / b, 0.0)]
            };
        }
        if self.discriminant().is_negative() {
            let re = -b / (2.0 * a);
            let im = (-d).sqrt() / (2.0 * a).abs();
            vec![(re, -im), (re, im)]
        } else {
            let s = d.sqrt();
            let mut r = vec![(-b - s) / (2.0 * a), (-b + s) / (2.0 * a)];
            r.sort_by(f64::total_cmp);
            r.into_iter().map(|x| (x, 0.0)).collect()
        }
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let [a, b, c] = &self.coeffs;
        a * x * x + b * x + c
    }
}

impl fmt::Display for Quadratic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars = ring_vars(&[self.var.as_str()]);
        let p = MultiPoly::from_terms(
            &vars,
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| (Monomial::var(0, 2 - i as u32), c.clone())),
        );
        write!(f, "{p}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_det_matches_integer_determinant() {
        let vars = ring_vars(&["x"]);
        let rows = [[2, -1, 0, 3], [1, 4, 2, 0], [0, 5, -3, 1], [7, 0, 1, 1]];
        let m: Vec<Vec<MultiPoly>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| MultiPoly::from_i64(&vars, v)).collect())
            .collect();
        let want = Matrix::from_i64_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
            .det()
            .unwrap();
        assert_eq!(poly_det(&m, &vars), MultiPoly::constant(&vars, want));
    }

    #[test]
    fn generator_degrees() {
        let sys = likelihood_equations_m2_2(3, 3, 1).unwrap();
        assert_eq!(sys.g1.total_degree(), Some(3));
        for g in sys.equations.generators() {
            assert!(g.total_degree().unwrap() <= 2 * 3 - 1);
        }
        assert_eq!(sys.saturated.vars().len(), 3);
    }

    #[test]
    fn sampling_is_seeded() {
        let a = sample_integer_data(3, 2, 2, 9).unwrap();
        assert_eq!(a, sample_integer_data(3, 2, 2, 9).unwrap());
        assert_ne!(a, sample_integer_data(3, 2, 2, 10).unwrap());
        assert!(a
            .data()
            .iter()
            .all(|y| y.data().iter().all(|v| *v >= rat(0) && *v <= rat(16))));
    }

    #[test]
    fn quadratics() {
        let one = Quadratic::closed_form(3, 2, FamilyCase::One).unwrap();
        assert_eq!(one.to_string(), "4*t^2 - 11*t - 6");
        assert_eq!(one.discriminant(), rat(217));
        let vals: Vec<_> = [0, -1, 2].iter().map(|&t| one.eval(&rat(t))).collect();
        assert_eq!(vals, vec![rat(-6), rat(9), rat(-12)]);
        assert_eq!(
            Quadratic::closed_form(2, 2, FamilyCase::Two)
                .unwrap()
                .to_string(),
            "4*c^2 - 6"
        );
        assert!(matches!(
            family_system(2, 2, FamilyCase::One),
            Err(Error::RegimeViolation(_))
        ));
        assert!(matches!(
            family_system(3, 2, FamilyCase::Two),
            Err(Error::RegimeViolation(_))
        ));
        assert!(matches!(
            family_system(3, 1, FamilyCase::One),
            Err(Error::RegimeViolation(_))
        ));
    }

    #[test]
    fn b0_branch_matches_closed_form() {
        for (m2, k, case) in [
            (3, 2, FamilyCase::One),
            (4, 3, FamilyCase::One),
            (2, 2, FamilyCase::Two),
            (2, 3, FamilyCase::Two),
        ] {
            let sys = family_system(m2, k, case).unwrap();
            let want = Quadratic::closed_form(m2, k, case).unwrap();
            assert!(
                sys.b0_equation().proportional_to(&want),
                "{case} ({m2}, {k}): {}",
                sys.b0_equation()
            );
        }
    }
}

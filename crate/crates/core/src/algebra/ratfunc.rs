use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_rational::BigRational;

use super::monomial::TermOrder;
use super::poly::MultiPoly;

/// Rational function `num / Π f_j^{e_j}` with a factored denominator.
///
/// Denominator factors are stored primitive so that equal factors are
/// recognized. Sums use the least common multiple of the factor lists and
/// [`RatFunc::reduced`] cancels factors that divide the numerator, which
/// gives the lowest-terms form whenever the factors are irreducible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFunc {
    num: MultiPoly,
    den: Vec<(MultiPoly, u32)>,
}

const ORDER: TermOrder = TermOrder::GrevLex;

impl RatFunc {
    pub fn from_poly(p: MultiPoly) -> Self {
        Self {
            num: p,
            den: Vec::new(),
        }
    }

    /// `num / Π factors`. Constant factors are folded into the numerator.
    pub fn new(num: MultiPoly, factors: &[MultiPoly]) -> Self {
        let mut r = Self::from_poly(num);
        for f in factors {
            assert!(!f.is_zero(), "zero denominator factor");
            let prim = f.primitive(ORDER);
            let scale = f.leading_term(ORDER).unwrap().1 / prim.leading_term(ORDER).unwrap().1;
            r.num = r.num.scale(&(BigRational::from_integer(1.into()) / scale));
            if prim.total_degree() == Some(0) {
                continue;
            }
            match r.den.iter_mut().find(|(g, _)| *g == prim) {
                Some((_, e)) => *e += 1,
                None => r.den.push((prim, 1)),
            }
        }
        r
    }

    pub fn vars(&self) -> &Arc<[String]> {
        self.num.vars()
    }

    pub fn numerator(&self) -> &MultiPoly {
        &self.num
    }

    pub fn denominator_factors(&self) -> &[(MultiPoly, u32)] {
        &self.den
    }

    pub fn denominator(&self) -> MultiPoly {
        self.den
            .iter()
            .fold(MultiPoly::from_i64(self.vars(), 1), |acc, (f, e)| {
                &acc * &f.pow(*e)
            })
    }

    /// Rewrites over the denominator `Π f^{e}` given by `target`, which must
    /// contain this denominator.
    fn lifted(&self, target: &[(MultiPoly, u32)]) -> MultiPoly {
        let mut num = self.num.clone();
        for (f, e) in target {
            let have = self.den.iter().find(|(g, _)| g == f).map_or(0, |(_, e)| *e);
            if *e > have {
                num = &num * &f.pow(e - have);
            }
        }
        num
    }

    fn common_den(&self, other: &Self) -> Vec<(MultiPoly, u32)> {
        let mut den = self.den.clone();
        for (f, e) in &other.den {
            match den.iter_mut().find(|(g, _)| g == f) {
                Some((_, have)) => *have = (*have).max(*e),
                None => den.push((f.clone(), *e)),
            }
        }
        den
    }

    /// Cancels every denominator factor that divides the numerator.
    pub fn reduced(&self) -> Self {
        let mut num = self.num.clone();
        let mut den = Vec::new();
        for (f, e) in &self.den {
            let mut left = *e;
            while left > 0 && !num.is_zero() {
                match num.div_exact(f) {
                    Some(q) => {
                        num = q;
                        left -= 1;
                    }
                    None => break,
                }
            }
            if num.is_zero() {
                left = 0;
            }
            if left > 0 {
                den.push((f.clone(), left));
            }
        }
        Self { num, den }
    }

    pub fn eval(&self, point: &[BigRational]) -> Option<BigRational> {
        let d = self.denominator().eval(point);
        if num_traits::Zero::is_zero(&d) {
            return None;
        }
        Some(self.num.eval(point) / d)
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, other: &RatFunc) -> RatFunc {
        let den = self.common_den(other);
        let num = &self.lifted(&den) + &other.lifted(&den);
        RatFunc { num, den }.reduced()
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, other: &RatFunc) -> RatFunc {
        self + &(-other)
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, other: &RatFunc) -> RatFunc {
        let mut den = self.den.clone();
        for (f, e) in &other.den {
            match den.iter_mut().find(|(g, _)| g == f) {
                Some((_, have)) => *have += *e,
                None => den.push((f.clone(), *e)),
            }
        }
        RatFunc {
            num: &self.num * &other.num,
            den,
        }
        .reduced()
    }
}

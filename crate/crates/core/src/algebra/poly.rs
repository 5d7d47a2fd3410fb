use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::monomial::{Monomial, TermOrder, MAX_VARS};
use crate::error::{Error, Result};
use crate::numeric::{parse_rational, rational_from_f64, rational_to_f64};

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Zero coefficients are never stored. Arithmetic between polynomials
/// requires identical variable lists and panics otherwise.
#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    vars: Arc<[String]>,
    terms: BTreeMap<Monomial, BigRational>,
}

impl MultiPoly {
    pub fn zero(vars: &Arc<[String]>) -> Self {
        assert!(
            vars.len() <= MAX_VARS,
            "at most {MAX_VARS} variables are supported"
        );
        Self {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &Arc<[String]>, c: BigRational) -> Self {
        Self::from_terms(vars, [(Monomial::ONE, c)])
    }

    pub fn from_i64(vars: &Arc<[String]>, c: i64) -> Self {
        Self::constant(vars, BigRational::from_integer(c.into()))
    }

    /// The `i`-th variable.
    pub fn var(vars: &Arc<[String]>, i: usize) -> Self {
        assert!(i < vars.len());
        Self::from_terms(vars, [(Monomial::var(i, 1), BigRational::one())])
    }

    pub fn from_terms(
        vars: &Arc<[String]>,
        terms: impl IntoIterator<Item = (Monomial, BigRational)>,
    ) -> Self {
        let mut p = Self::zero(vars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn vars(&self) -> &Arc<[String]> {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Terms sorted descending in `order`.
    pub fn sorted_terms(&self, order: TermOrder) -> Vec<(Monomial, BigRational)> {
        let mut v: Vec<_> = self.terms.iter().map(|(m, c)| (*m, c.clone())).collect();
        v.sort_by(|a, b| order.cmp(&b.0, &a.0));
        v
    }

    pub fn leading_term(&self, order: TermOrder) -> Option<(Monomial, BigRational)> {
        self.terms
            .iter()
            .max_by(|a, b| order.cmp(a.0, b.0))
            .map(|(m, c)| (*m, c.clone()))
    }

    fn check_ring(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars,
            "polynomials live in different rings: {:?} vs {:?}",
            self.vars,
            other.vars
        );
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        Self {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        Self {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(t, v)| (t.mul(m), v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::from_i64(&self.vars, 1), |acc, _| &acc * self)
    }

    /// Divides by the leading coefficient in `order`.
    pub fn monic(&self, order: TermOrder) -> Self {
        match self.leading_term(order) {
            Some((_, c)) => self.scale(&(BigRational::one() / c)),
            None => self.clone(),
        }
    }

    /// Partial derivative with respect to variable `i`.
    pub fn derivative(&self, i: usize) -> Self {
        let mut p = Self::zero(&self.vars);
        for (m, c) in &self.terms {
            if let Some((e, dm)) = m.derivative(i) {
                p.add_term(dm, c * BigRational::from_integer(e.into()));
            }
        }
        p
    }

    /// Substitutes the constant `value` for variable `i`.
    pub fn substitute(&self, i: usize, value: &BigRational) -> Self {
        let mut p = Self::zero(&self.vars);
        for (m, c) in &self.terms {
            let (e, rest) = m.without_var(i);
            p.add_term(rest, c * num_traits::pow(value.clone(), e as usize));
        }
        p
    }

    /// Re-embeds into a ring whose first variables coincide with this one's.
    pub fn extend_ring(&self, vars: &Arc<[String]>) -> Self {
        assert!(vars.len() >= self.vars.len() && vars[..self.vars.len()] == self.vars[..]);
        Self {
            vars: vars.clone(),
            terms: self.terms.clone(),
        }
    }

    /// Re-embeds into a ring with one extra variable in front.
    pub fn prepend_var(&self, vars: &Arc<[String]>) -> Self {
        assert!(vars.len() == self.vars.len() + 1 && vars[1..] == self.vars[..]);
        let n = self.vars.len();
        let mut p = Self::zero(vars);
        for (m, c) in &self.terms {
            let mut e = vec![0];
            e.extend(m.exponents(n));
            p.add_term(Monomial::from_exponents(&e), c.clone());
        }
        p
    }

    pub fn eval(&self, point: &[BigRational]) -> BigRational {
        assert_eq!(point.len(), self.nvars());
        self.terms.iter().fold(BigRational::zero(), |acc, (m, c)| {
            let mut t = c.clone();
            for (i, x) in point.iter().enumerate() {
                let e = m.exponent(i);
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            acc + t
        })
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.eval_f64_with_scale(point).0
    }

    /// Value together with `Σ |c_α x^α|`, the natural scale for residuals.
    pub fn eval_f64_with_scale(&self, point: &[f64]) -> (f64, f64) {
        assert_eq!(point.len(), self.nvars());
        let mut value = 0.0;
        let mut scale = 0.0;
        for (m, c) in &self.terms {
            let mut t = rational_to_f64(c);
            for (i, x) in point.iter().enumerate() {
                let e = m.exponent(i);
                if e > 0 {
                    t *= x.powi(e as i32);
                }
            }
            value += t;
            scale += t.abs();
        }
        (value, scale)
    }

    /// Exact evaluation at a float point (floats are converted exactly).
    pub fn eval_exact_at_f64(&self, point: &[f64]) -> BigRational {
        let q: Vec<_> = point.iter().map(|&x| rational_from_f64(x)).collect();
        self.eval(&q)
    }

    /// Multivariate division by a single polynomial in `order`: returns
    /// `(q, r)` with `self = q * g + r` and no term of `r` divisible by the
    /// leading monomial of `g`.
    pub fn div_rem(&self, g: &Self, order: TermOrder) -> (Self, Self) {
        self.check_ring(g);
        let (lm, lc) = g.leading_term(order).expect("division by zero polynomial");
        let mut q = Self::zero(&self.vars);
        let mut r = Self::zero(&self.vars);
        let mut p = self.clone();
        while let Some((m, c)) = p.leading_term(order) {
            match lm.quotient_of(&m) {
                Some(t) => {
                    let coeff = &c / &lc;
                    p = &p - &g.mul_monomial(&t, &coeff);
                    q.add_term(t, coeff);
                }
                None => {
                    p.terms.remove(&m);
                    r.add_term(m, c);
                }
            }
        }
        (q, r)
    }

    /// Exact quotient if `g` divides `self`.
    pub fn div_exact(&self, g: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(g, TermOrder::Lex);
        r.is_zero().then_some(q)
    }

    /// Multiplies through by the least common denominator and divides by the
    /// content, leaving a primitive integer polynomial with positive
    /// leading coefficient in `order`.
    pub fn primitive(&self, order: TermOrder) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lcm = self.terms.values().fold(BigInt::one(), |acc, c| {
            num_integer::lcm(acc, c.denom().clone())
        });
        let ints: Vec<BigInt> = self
            .terms
            .values()
            .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
            .collect();
        let g = ints
            .iter()
            .fold(BigInt::zero(), |acc, c| num_integer::gcd(acc, c.clone()));
        let lead_negative = self
            .leading_term(order)
            .is_some_and(|(_, c)| c.is_negative());
        let g = if lead_negative { -g } else { g };
        Self {
            vars: self.vars.clone(),
            terms: self
                .terms
                .keys()
                .zip(ints)
                .map(|(m, c)| (*m, BigRational::from_integer(c / &g)))
                .collect(),
        }
    }

    /// Canonical text form, terms in descending grevlex order,
    /// e.g. `3/2*k12^2*k22 - 5`.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn parse(vars: &Arc<[String]>, text: &str) -> Result<Self> {
        parse_poly(vars, text)
    }
}

fn format_monomial(m: &Monomial, vars: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, v) in vars.iter().enumerate() {
        match m.exponent(i) {
            0 => {}
            1 => parts.push(v.clone()),
            e => parts.push(format!("{v}^{e}")),
        }
    }
    parts.join("*")
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (idx, (m, c)) in self.sorted_terms(TermOrder::GrevLex).iter().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            match (idx, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mono = format_monomial(m, &self.vars);
            if mono.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                f.write_str(&mono)?;
            } else {
                write!(f, "{abs}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly[{}]({})", self.vars.join(","), self)
    }
}

fn parse_poly(vars: &Arc<[String]>, text: &str) -> Result<MultiPoly> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut p = MultiPoly::zero(vars);
    // split into signed terms at top-level +/-, ignoring signs after '^' or '/'
    let mut terms = Vec::new();
    let mut start = 0;
    let bytes = compact.as_bytes();
    for i in 1..bytes.len() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'^' | b'*' | b'/') {
            terms.push(&compact[start..i]);
            start = i;
        }
    }
    terms.push(&compact[start..]);
    for term in terms {
        let (sign, body) = match term.as_bytes()[0] {
            b'-' => (-1, &term[1..]),
            b'+' => (1, &term[1..]),
            _ => (1, term),
        };
        if body.is_empty() {
            return Err(Error::Parse(format!("dangling sign in {text:?}")));
        }
        let mut coeff = BigRational::from_integer(sign.into());
        let mut mono = Monomial::ONE;
        for factor in body.split('*') {
            if factor.is_empty() {
                return Err(Error::Parse(format!("empty factor in {text:?}")));
            }
            let (base, exp) = match factor.split_once('^') {
                Some((b, e)) => (
                    b,
                    e.parse::<u32>()
                        .map_err(|_| Error::Parse(format!("bad exponent in {factor:?}")))?,
                ),
                None => (factor, 1),
            };
            if let Some(i) = vars.iter().position(|v| v == base) {
                mono = mono.mul(&Monomial::var(i, exp));
            } else {
                let c = parse_rational(base)
                    .ok_or_else(|| Error::Parse(format!("unknown symbol {base:?}")))?;
                coeff *= num_traits::pow(c, exp as usize);
            }
        }
        p.add_term(mono, coeff);
    }
    Ok(p)
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.check_ring(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.check_ring(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.check_ring(rhs);
        let mut out = MultiPoly::zero(&self.vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&-BigRational::one())
    }
}

/// Builds an `Arc<[String]>` variable list.
pub fn ring_vars<S: AsRef<str>>(names: &[S]) -> Arc<[String]> {
    names.iter().map(|s| s.as_ref().to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    fn xy() -> Arc<[String]> {
        ring_vars(&["x", "y"])
    }

    fn p(s: &str) -> MultiPoly {
        MultiPoly::parse(&xy(), s).unwrap()
    }

    #[test]
    fn display_and_parse() {
        let vars = ring_vars(&["k12", "k22"]);
        let f = MultiPoly::parse(&vars, "3/2*k12^2*k22 - 5").unwrap();
        assert_eq!(f.to_string(), "3/2*k12^2*k22 - 5");
        let g = MultiPoly::parse(&vars, "-k22 + k12^2 + 0").unwrap();
        assert_eq!(g.to_string(), "k12^2 - k22");
        assert_eq!(MultiPoly::zero(&vars).to_string(), "0");
        assert!(MultiPoly::parse(&vars, "k13").is_err());
        assert!(MultiPoly::parse(&vars, "2*").is_err());
        assert_eq!(
            MultiPoly::parse(&vars, "2^3*k12").unwrap().to_string(),
            "8*k12"
        );
    }

    #[test]
    fn arithmetic() {
        let a = p("x + y");
        let b = p("x - y");
        assert_eq!(&a * &b, p("x^2 - y^2"));
        assert_eq!(&a + &b, p("2*x"));
        assert_eq!(&a - &a, MultiPoly::zero(&xy()));
        assert_eq!(a.pow(2), p("x^2 + 2*x*y + y^2"));
        assert_eq!(p("x^3*y + 2*x").derivative(0), p("3*x^2*y + 2"));
        assert_eq!(p("x^2*y + y").substitute(0, &rat(2)), p("5*y"));
    }

    #[test]
    fn division() {
        let f = p("x^3 - y^3");
        let g = p("x - y");
        let (q, r) = f.div_rem(&g, TermOrder::Lex);
        assert!(r.is_zero());
        assert_eq!(q, p("x^2 + x*y + y^2"));
        assert_eq!(f.div_exact(&p("x + y")), None);
    }

    #[test]
    fn primitive_form() {
        let f = p("-3/2*x + 6*y");
        assert_eq!(f.primitive(TermOrder::Lex), p("x - 4*y"));
    }

    #[test]
    #[should_panic(expected = "different rings")]
    fn mixing_rings_panics() {
        let _ = &p("x") + &MultiPoly::var(&ring_vars(&["z"]), 0);
    }
}

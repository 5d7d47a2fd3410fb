use std::fmt;
use std::sync::Arc;

use super::groebner::{self, Timeout, DEFAULT_PAIR_BUDGET};
use super::monomial::{Monomial, TermOrder};
use super::poly::{ring_vars, MultiPoly};
use crate::error::{Error, Result};

/// Ideal given by a finite list of generators in a fixed ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyIdeal {
    vars: Arc<[String]>,
    generators: Vec<MultiPoly>,
}

impl PolyIdeal {
    pub fn new(vars: &Arc<[String]>, generators: Vec<MultiPoly>) -> Self {
        for g in &generators {
            assert!(g.vars() == vars, "generator lives in a different ring");
        }
        Self {
            vars: vars.clone(),
            generators,
        }
    }

    pub fn vars(&self) -> &Arc<[String]> {
        &self.vars
    }

    pub fn generators(&self) -> &[MultiPoly] {
        &self.generators
    }

    pub fn groebner(&self, order: TermOrder) -> GroebnerBasis {
        self.groebner_with_budget(order, usize::MAX)
            .expect("unbounded budget")
    }

    pub fn groebner_with_budget(
        &self,
        order: TermOrder,
        pair_budget: usize,
    ) -> std::result::Result<GroebnerBasis, Timeout> {
        groebner::buchberger_with_budget(self, order, pair_budget)
    }

    /// Saturation `I : f^∞` presented as `I + ⟨y f - 1⟩` in a ring with one
    /// extra variable placed first. The new variable is named `y`, or `y`
    /// followed by primes if that name is taken.
    pub fn saturate_rabinowitsch(&self, f: &MultiPoly) -> PolyIdeal {
        assert!(
            f.vars() == &self.vars,
            "saturating element lives in a different ring"
        );
        let mut name = String::from("y");
        while self.vars.iter().any(|v| v == &name) {
            name.push('\'');
        }
        let mut names = vec![name];
        names.extend(self.vars.iter().cloned());
        let vars = ring_vars(&names);
        let y = MultiPoly::var(&vars, 0);
        let mut gens: Vec<MultiPoly> = self
            .generators
            .iter()
            .map(|g| g.prepend_var(&vars))
            .collect();
        gens.push(&(&y * &f.prepend_var(&vars)) - &MultiPoly::from_i64(&vars, 1));
        PolyIdeal::new(&vars, gens)
    }

    /// Dimension flag and degree, computed from a grevlex basis.
    pub fn dim_and_degree(&self) -> (bool, Option<u64>) {
        self.groebner(TermOrder::GrevLex).dim_and_degree()
    }

    /// `ring v1 v2 ...` followed by one generator per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("ring {}\n", self.vars.join(" "));
        for g in &self.generators {
            s.push_str(&g.to_text());
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let (vars, _, body) = parse_header(text)?;
        let gens = body
            .into_iter()
            .map(|line| MultiPoly::parse(&vars, line))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(&vars, gens))
    }
}

impl Default for PolyIdeal {
    fn default() -> Self {
        Self {
            vars: ring_vars::<&str>(&[]),
            generators: Vec::new(),
        }
    }
}

fn parse_header(text: &str) -> Result<(Arc<[String]>, Option<TermOrder>, Vec<&str>)> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty ideal text".into()))?;
    let mut words = header.split_whitespace();
    if words.next() != Some("ring") {
        return Err(Error::Parse(format!(
            "expected `ring ...` header, got {header:?}"
        )));
    }
    let mut names = Vec::new();
    let mut order = None;
    while let Some(w) = words.next() {
        if w == "order" {
            let o = words
                .next()
                .ok_or_else(|| Error::Parse("missing order name".into()))?;
            order = Some(o.parse()?);
        } else {
            names.push(w.to_string());
        }
    }
    if names.len() > super::monomial::MAX_VARS {
        return Err(Error::Parse(format!(
            "too many variables ({})",
            names.len()
        )));
    }
    Ok((ring_vars(&names), order, lines.collect()))
}

/// Reduced Gröbner basis with monic elements sorted by leading monomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroebnerBasis {
    vars: Arc<[String]>,
    basis: Vec<MultiPoly>,
    order: TermOrder,
}

impl GroebnerBasis {
    pub(crate) fn new(vars: Arc<[String]>, basis: Vec<MultiPoly>, order: TermOrder) -> Self {
        Self { vars, basis, order }
    }

    pub fn vars(&self) -> &Arc<[String]> {
        &self.vars
    }

    pub fn basis(&self) -> &[MultiPoly] {
        &self.basis
    }

    pub fn order(&self) -> TermOrder {
        self.order
    }

    pub fn is_unit(&self) -> bool {
        self.basis
            .iter()
            .any(|g| g.leading_term(self.order).is_some_and(|(m, _)| m.is_one()))
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.basis
            .iter()
            .filter_map(|g| g.leading_term(self.order).map(|(m, _)| m))
            .collect()
    }

    pub fn normal_form(&self, f: &MultiPoly) -> MultiPoly {
        assert!(
            f.vars() == &self.vars,
            "polynomial lives in a different ring"
        );
        groebner::normal_form(f, self)
    }

    pub fn contains(&self, f: &MultiPoly) -> bool {
        self.normal_form(f).is_zero()
    }

    /// Buchberger's criterion: every S-polynomial reduces to zero.
    pub fn is_groebner(&self) -> bool {
        groebner::all_spolys_reduce_to_zero(self)
    }

    /// `(zero_dimensional, degree)`. The degree is the number of standard
    /// monomials and is only reported for zero-dimensional ideals; the unit
    /// ideal gives `(true, Some(0))`.
    pub fn dim_and_degree(&self) -> (bool, Option<u64>) {
        let lms = self.leading_monomials();
        if lms.iter().any(Monomial::is_one) {
            return (true, Some(0));
        }
        let n = self.vars.len();
        let mut bounds = vec![0u32; n];
        for i in 0..n {
            match lms
                .iter()
                .filter(|m| m.pure_power_var() == Some(i))
                .map(|m| m.exponent(i))
                .min()
            {
                Some(e) => bounds[i] = e,
                None => return (false, None),
            }
        }
        (true, Some(count_standard(&lms, &bounds, 0, Monomial::ONE)))
    }

    /// Standard monomials of a zero-dimensional ideal.
    pub fn standard_monomials(&self) -> Option<Vec<Monomial>> {
        let (zero_dim, _) = self.dim_and_degree();
        if !zero_dim || self.is_unit() {
            return zero_dim.then(Vec::new);
        }
        let lms = self.leading_monomials();
        let n = self.vars.len();
        let bounds: Vec<u32> = (0..n)
            .map(|i| {
                lms.iter()
                    .filter(|m| m.pure_power_var() == Some(i))
                    .map(|m| m.exponent(i))
                    .min()
                    .unwrap()
            })
            .collect();
        let mut out = Vec::new();
        collect_standard(&lms, &bounds, 0, Monomial::ONE, &mut out);
        out.sort_by(|a, b| self.order.cmp(a, b));
        Some(out)
    }

    /// `ring v1 v2 ... order <name>` followed by one element per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("ring {} order {}\n", self.vars.join(" "), self.order);
        for g in &self.basis {
            s.push_str(&g.to_text());
            s.push('\n');
        }
        s
    }

    /// Parses a basis written by [`GroebnerBasis::to_text`]. The elements are
    /// taken as given; call [`GroebnerBasis::is_groebner`] to validate.
    pub fn from_text(text: &str) -> Result<Self> {
        let (vars, order, body) = parse_header(text)?;
        let order = order.unwrap_or(TermOrder::GrevLex);
        let basis = body
            .into_iter()
            .map(|line| MultiPoly::parse(&vars, line))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { vars, basis, order })
    }
}

impl fmt::Display for GroebnerBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn count_standard(lms: &[Monomial], bounds: &[u32], var: usize, m: Monomial) -> u64 {
    if var == bounds.len() {
        return 1;
    }
    let mut total = 0;
    for e in 0..bounds[var] {
        let next = m.with_exponent(var, e);
        // divisibility is monotone in e, so stop at the first hit
        if lms.iter().any(|l| l.divides(&next)) {
            break;
        }
        total += count_standard(lms, bounds, var + 1, next);
    }
    total
}

fn collect_standard(
    lms: &[Monomial],
    bounds: &[u32],
    var: usize,
    m: Monomial,
    out: &mut Vec<Monomial>,
) {
    if var == bounds.len() {
        out.push(m);
        return;
    }
    for e in 0..bounds[var] {
        let next = m.with_exponent(var, e);
        if lms.iter().any(|l| l.divides(&next)) {
            break;
        }
        collect_standard(lms, bounds, var + 1, next, out);
    }
}

/// Convenience for the common pair-budgeted degree computation.
pub fn degree_with_budget(
    ideal: &PolyIdeal,
    pair_budget: Option<usize>,
) -> std::result::Result<(bool, Option<u64>), Timeout> {
    let gb = ideal.groebner_with_budget(
        TermOrder::GrevLex,
        pair_budget.unwrap_or(DEFAULT_PAIR_BUDGET),
    )?;
    Ok(gb.dim_and_degree())
}

//! Buchberger's algorithm over the rationals.
//!
//! Internally every polynomial is kept primitive over the integers (content
//! removed, positive leading coefficient) and reduced fraction-free, which
//! keeps coefficient growth in check. The pair queue follows the normal
//! selection strategy and is pruned with the Gebauer–Möller installation,
//! which covers both the coprime-leading-term and the chain criterion.

use std::cmp::Ordering;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::ideal::{GroebnerBasis, PolyIdeal};
use super::monomial::{Monomial, TermOrder};
use super::poly::MultiPoly;

/// Default cap on the number of S-pairs reduced before giving up.
pub const DEFAULT_PAIR_BUDGET: usize = 200_000;

/// The pair budget ran out before the basis was complete.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Timeout {
    pub pairs_reduced: usize,
}

/// Integer polynomial with terms sorted descending in the working order.
#[derive(Clone, Debug)]
pub(crate) struct IntPoly {
    pub(crate) terms: Vec<(Monomial, BigInt)>,
}

impl IntPoly {
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn lm(&self) -> &Monomial {
        &self.terms[0].0
    }

    fn lc(&self) -> &BigInt {
        &self.terms[0].1
    }

    /// Converts a rational polynomial to a primitive integer one.
    pub(crate) fn from_poly(p: &MultiPoly, order: TermOrder) -> Self {
        let prim = p.primitive(order);
        let terms = prim
            .sorted_terms(order)
            .into_iter()
            .map(|(m, c)| (m, c.to_integer()))
            .collect();
        IntPoly { terms }
    }

    pub(crate) fn to_poly(&self, vars: &Arc<[String]>) -> MultiPoly {
        MultiPoly::from_terms(
            vars,
            self.terms
                .iter()
                .map(|(m, c)| (*m, BigRational::from_integer(c.clone()))),
        )
    }

    fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divides by the content and fixes the sign of the leading coefficient.
    /// Returns the divisor applied (signed).
    fn make_primitive(&mut self) -> BigInt {
        if self.is_zero() {
            return BigInt::one();
        }
        let mut g = self.content();
        if self.lc().is_negative() {
            g = -g;
        }
        if !g.is_one() {
            for (_, c) in &mut self.terms {
                *c = &*c / &g;
            }
        }
        g
    }
}

/// `a * p - b * (mono * g)`, merging two sorted term lists.
fn combine(
    p: &[(Monomial, BigInt)],
    a: &BigInt,
    g: &[(Monomial, BigInt)],
    mono: &Monomial,
    b: &BigInt,
    order: TermOrder,
) -> Vec<(Monomial, BigInt)> {
    let mut out = Vec::with_capacity(p.len() + g.len());
    let (mut i, mut j) = (0, 0);
    let a_is_one = a.is_one();
    while i < p.len() || j < g.len() {
        let gm = g.get(j).map(|(m, _)| m.mul(mono));
        let which = match (p.get(i), &gm) {
            (Some((pm, _)), Some(gm)) => order.cmp(pm, gm),
            (Some(_), None) => Ordering::Greater,
            (None, Some(_)) => Ordering::Less,
            (None, None) => unreachable!(),
        };
        match which {
            Ordering::Greater => {
                let c = if a_is_one {
                    p[i].1.clone()
                } else {
                    &p[i].1 * a
                };
                out.push((p[i].0, c));
                i += 1;
            }
            Ordering::Less => {
                out.push((gm.unwrap(), -(&g[j].1 * b)));
                j += 1;
            }
            Ordering::Equal => {
                let c = if a_is_one {
                    p[i].1.clone()
                } else {
                    &p[i].1 * a
                } - &g[j].1 * b;
                if !c.is_zero() {
                    out.push((p[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Fully reduces `f` modulo the polynomials of `basis` selected by `active`.
///
/// Returns the remainder `r` together with the rational multiplier `μ` such
/// that `μ f ≡ r` modulo the basis.
fn reduce(
    f: &IntPoly,
    basis: &[IntPoly],
    active: &[usize],
    order: TermOrder,
) -> (IntPoly, BigRational) {
    let mut p = f.terms.clone();
    let mut rem: Vec<(Monomial, BigInt)> = Vec::new();
    let mut mult = BigRational::one();
    let mut steps = 0usize;
    while !p.is_empty() {
        let (m, c) = &p[0];
        let divisor = active
            .iter()
            .map(|&k| &basis[k])
            .filter(|g| g.lm().divides(m))
            .min_by_key(|g| g.terms.len());
        match divisor {
            Some(g) => {
                let q = g.lm().quotient_of(m).expect("divides");
                let d = c.gcd(g.lc());
                let a = g.lc() / &d;
                let b = c / &d;
                if !a.is_one() {
                    for (_, rc) in &mut rem {
                        *rc *= &a;
                    }
                    mult *= BigRational::from_integer(a.clone());
                }
                // the leading terms cancel exactly
                p = combine(&p[1..], &a, &g.terms[1..], &q, &b, order);
                steps += 1;
                if steps % 16 == 0 {
                    let g = p
                        .iter()
                        .chain(rem.iter())
                        .fold(BigInt::zero(), |acc, (_, c)| acc.gcd(c));
                    if g > BigInt::one() {
                        for (_, c) in p.iter_mut().chain(rem.iter_mut()) {
                            *c = &*c / &g;
                        }
                        mult /= BigRational::from_integer(g);
                    }
                }
            }
            None => {
                let term = p.remove(0);
                rem.push(term);
            }
        }
    }
    let mut r = IntPoly { terms: rem };
    let g = r.make_primitive();
    mult /= BigRational::from_integer(g);
    (r, mult)
}

fn spoly(f: &IntPoly, g: &IntPoly, order: TermOrder) -> IntPoly {
    let l = f.lm().lcm(g.lm());
    let mf = f.lm().quotient_of(&l).expect("lcm");
    let mg = g.lm().quotient_of(&l).expect("lcm");
    let d = f.lc().gcd(g.lc());
    let a = g.lc() / &d;
    let b = f.lc() / &d;
    let fm: Vec<_> = f.terms[1..]
        .iter()
        .map(|(m, c)| (m.mul(&mf), c.clone()))
        .collect();
    let mut s = IntPoly {
        terms: combine(&fm, &a, &g.terms[1..], &mg, &b, order),
    };
    s.make_primitive();
    s
}

#[derive(Clone, Debug)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
}

/// Gebauer–Möller installation of the new basis element `h`.
fn update(basis: &[IntPoly], active: &mut Vec<usize>, pairs: &mut Vec<Pair>, h: usize) {
    let lh = *basis[h].lm();
    let mut candidates: Vec<Pair> = active
        .iter()
        .map(|&g| Pair {
            i: g,
            j: h,
            lcm: basis[g].lm().lcm(&lh),
        })
        .collect();
    let mut kept: Vec<Pair> = Vec::new();
    while let Some(p) = candidates.pop() {
        let coprime = basis[p.i].lm().coprime(&lh);
        let dominated = candidates
            .iter()
            .chain(kept.iter())
            .any(|q| q.lcm.divides(&p.lcm));
        if coprime || !dominated {
            kept.push(p);
        }
    }
    let new_pairs: Vec<Pair> = kept
        .into_iter()
        .filter(|p| !basis[p.i].lm().coprime(&lh))
        .collect();
    pairs.retain(|p| {
        let li = basis[p.i].lm().lcm(&lh);
        let lj = basis[p.j].lm().lcm(&lh);
        !(lh.divides(&p.lcm) && li != p.lcm && lj != p.lcm)
    });
    pairs.extend(new_pairs);
    active.retain(|&g| !lh.divides(basis[g].lm()));
    active.push(h);
}

/// Reduced Gröbner basis of `ideal` in `order`, giving up after
/// `pair_budget` S-pair reductions.
pub fn buchberger_with_budget(
    ideal: &PolyIdeal,
    order: TermOrder,
    pair_budget: usize,
) -> Result<GroebnerBasis, Timeout> {
    let vars = ideal.vars().clone();
    let mut basis: Vec<IntPoly> = Vec::new();
    let mut active: Vec<usize> = Vec::new();
    let mut pairs: Vec<Pair> = Vec::new();

    let mut inputs: Vec<IntPoly> = ideal
        .generators()
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| IntPoly::from_poly(g, order))
        .collect();
    inputs.sort_by(|a, b| order.cmp(a.lm(), b.lm()));
    for f in inputs {
        let (h, _) = reduce(&f, &basis, &active, order);
        if h.is_zero() {
            continue;
        }
        basis.push(h);
        update(&basis, &mut active, &mut pairs, basis.len() - 1);
    }

    let mut reduced_pairs = 0usize;
    while !pairs.is_empty() {
        // normal strategy: smallest lcm first
        let (idx, _) = pairs
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| order.cmp(&a.lcm, &b.lcm))
            .expect("non-empty");
        let pair = pairs.swap_remove(idx);
        if reduced_pairs >= pair_budget {
            return Err(Timeout {
                pairs_reduced: reduced_pairs,
            });
        }
        reduced_pairs += 1;
        let s = spoly(&basis[pair.i], &basis[pair.j], order);
        let (h, _) = reduce(&s, &basis, &active, order);
        if h.is_zero() {
            continue;
        }
        if h.lm().is_one() {
            // unit ideal
            return Ok(GroebnerBasis::new(
                vars.clone(),
                vec![MultiPoly::from_i64(&vars, 1)],
                order,
            ));
        }
        basis.push(h);
        update(&basis, &mut active, &mut pairs, basis.len() - 1);
    }

    Ok(GroebnerBasis::new(
        vars.clone(),
        interreduce(&basis, &active, order, &vars),
        order,
    ))
}

/// Minimal basis from the active set, then tail-reduces every element
/// against the others and scales to leading coefficient one.
fn interreduce(
    basis: &[IntPoly],
    active: &[usize],
    order: TermOrder,
    vars: &Arc<[String]>,
) -> Vec<MultiPoly> {
    let mut minimal: Vec<usize> = Vec::new();
    for &g in active {
        let lm = basis[g].lm();
        let redundant = active
            .iter()
            .any(|&o| o != g && basis[o].lm().divides(lm) && (basis[o].lm() != lm || o < g));
        if !redundant {
            minimal.push(g);
        }
    }
    let mut polys: Vec<IntPoly> = minimal.iter().map(|&g| basis[g].clone()).collect();
    for idx in 0..polys.len() {
        let others: Vec<usize> = (0..polys.len()).filter(|&o| o != idx).collect();
        let head = polys[idx].terms[0].clone();
        let tail = IntPoly {
            terms: polys[idx].terms[1..].to_vec(),
        };
        // leading terms of a minimal basis are pairwise non-divisible, so
        // reducing the tail keeps the head intact
        let (r, mult) = reduce(&tail, &polys, &others, order);
        let scale = BigRational::one() / mult;
        let mut p = MultiPoly::from_terms(vars, [(head.0, BigRational::from_integer(head.1))]);
        p = &p + &r.to_poly(vars).scale(&scale);
        polys[idx] = IntPoly::from_poly(&p, order);
    }
    let mut out: Vec<MultiPoly> = polys.iter().map(|p| p.to_poly(vars).monic(order)).collect();
    out.sort_by(|a, b| {
        let la = a.leading_term(order).unwrap().0;
        let lb = b.leading_term(order).unwrap().0;
        order.cmp(&la, &lb)
    });
    out
}

/// Normal form of `f` modulo a reduced basis (exact, with rational
/// coefficients).
pub(crate) fn normal_form(f: &MultiPoly, gb: &GroebnerBasis) -> MultiPoly {
    if f.is_zero() {
        return f.clone();
    }
    let order = gb.order();
    let basis: Vec<IntPoly> = gb
        .basis()
        .iter()
        .map(|g| IntPoly::from_poly(g, order))
        .collect();
    let active: Vec<usize> = (0..basis.len()).collect();
    // track the scalar that turned f into a primitive integer polynomial
    let fi = IntPoly::from_poly(f, order);
    let lead_f = f.leading_term(order).unwrap().1;
    let lead_i = BigRational::from_integer(fi.lc().clone());
    let to_int = lead_i / lead_f;
    let (r, mult) = reduce(&fi, &basis, &active, order);
    r.to_poly(f.vars())
        .scale(&(BigRational::one() / (mult * to_int)))
}

/// Reduces `S(g_i, g_j)` for all pairs and reports whether every one
/// vanishes.
pub(crate) fn all_spolys_reduce_to_zero(gb: &GroebnerBasis) -> bool {
    let order = gb.order();
    let basis: Vec<IntPoly> = gb
        .basis()
        .iter()
        .map(|g| IntPoly::from_poly(g, order))
        .collect();
    let active: Vec<usize> = (0..basis.len()).collect();
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            let s = spoly(&basis[i], &basis[j], order);
            if !reduce(&s, &basis, &active, order).0.is_zero() {
                return false;
            }
        }
    }
    true
}

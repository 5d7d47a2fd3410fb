use std::cmp::Ordering;
use std::fmt;

/// Largest number of variables a polynomial ring may have.
pub const MAX_VARS: usize = 12;

/// Exponent vector, stored inline. Unused trailing slots are zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    exps: [u16; MAX_VARS],
}

impl Monomial {
    pub const ONE: Monomial = Monomial {
        exps: [0; MAX_VARS],
    };

    pub fn from_exponents(exps: &[u32]) -> Self {
        assert!(
            exps.len() <= MAX_VARS,
            "at most {MAX_VARS} variables are supported"
        );
        let mut m = Self::ONE;
        for (slot, &e) in m.exps.iter_mut().zip(exps) {
            *slot = u16::try_from(e).expect("exponent overflow");
        }
        m
    }

    pub fn var(i: usize, power: u32) -> Self {
        let mut m = Self::ONE;
        m.exps[i] = u16::try_from(power).expect("exponent overflow");
        m
    }

    pub fn exponent(&self, i: usize) -> u32 {
        self.exps[i] as u32
    }

    pub fn exponents(&self, nvars: usize) -> Vec<u32> {
        self.exps[..nvars].iter().map(|&e| e as u32).collect()
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut m = *self;
        for (a, b) in m.exps.iter_mut().zip(other.exps) {
            *a = a.checked_add(b).expect("exponent overflow");
        }
        m
    }

    pub fn divides(&self, other: &Self) -> bool {
        self.exps.iter().zip(other.exps).all(|(a, b)| *a <= b)
    }

    /// `other / self`, when `self` divides `other`.
    pub fn quotient_of(&self, other: &Self) -> Option<Self> {
        if !self.divides(other) {
            return None;
        }
        let mut m = *other;
        for (a, b) in m.exps.iter_mut().zip(self.exps) {
            *a -= b;
        }
        Some(m)
    }

    pub fn lcm(&self, other: &Self) -> Self {
        let mut m = *self;
        for (a, b) in m.exps.iter_mut().zip(other.exps) {
            *a = (*a).max(b);
        }
        m
    }

    pub fn coprime(&self, other: &Self) -> bool {
        self.exps
            .iter()
            .zip(other.exps)
            .all(|(a, b)| *a == 0 || b == 0)
    }

    /// The single variable this monomial is a positive power of, if any.
    pub fn pure_power_var(&self) -> Option<usize> {
        let mut found = None;
        for (i, &e) in self.exps.iter().enumerate() {
            if e > 0 {
                if found.is_some() {
                    return None;
                }
                found = Some(i);
            }
        }
        found
    }

    pub fn derivative(&self, i: usize) -> Option<(u32, Self)> {
        let e = self.exps[i];
        if e == 0 {
            return None;
        }
        let mut m = *self;
        m.exps[i] -= 1;
        Some((e as u32, m))
    }

    pub(crate) fn without_var(&self, i: usize) -> (u32, Self) {
        let mut m = *self;
        let e = m.exps[i];
        m.exps[i] = 0;
        (e as u32, m)
    }

    pub(crate) fn with_exponent(&self, i: usize, e: u32) -> Self {
        let mut m = *self;
        m.exps[i] = u16::try_from(e).expect("exponent overflow");
        m
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.exps.iter().rposition(|&e| e != 0).map_or(0, |p| p + 1);
        write!(f, "{:?}", &self.exps[..last])
    }
}

/// Monomial order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TermOrder {
    /// Lexicographic with the first variable largest.
    Lex,
    /// Graded reverse lexicographic.
    GrevLex,
}

impl TermOrder {
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            TermOrder::Lex => a.exps.cmp(&b.exps),
            TermOrder::GrevLex => a.degree().cmp(&b.degree()).then_with(|| {
                for i in (0..MAX_VARS).rev() {
                    match a.exps[i].cmp(&b.exps[i]) {
                        Ordering::Equal => continue,
                        // smaller exponent in the last differing variable wins
                        other => return other.reverse(),
                    }
                }
                Ordering::Equal
            }),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TermOrder::Lex => "lex",
            TermOrder::GrevLex => "grevlex",
        }
    }
}

impl fmt::Display for TermOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for TermOrder {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "lex" => Ok(TermOrder::Lex),
            "grevlex" => Ok(TermOrder::GrevLex),
            other => Err(crate::Error::Parse(format!("unknown term order {other:?}"))),
        }
    }
}

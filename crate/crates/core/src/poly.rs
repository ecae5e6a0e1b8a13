//! Sparse multivariate polynomials over exact rationals.
//!
//! Monomials are sparse exponent vectors over [`VarId`]s; the monomial
//! order is lexicographic on the fixed variable order. Coefficients are
//! arbitrary-precision rationals, so every identity check in the crate
//! is exact. Polynomials over fewer variables embed silently into rings
//! with more variables, which matches how the same symbol is reused
//! across product lengths.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::traits::{One, Zero};
use num::BigInt;

use crate::vars::VarId;
use crate::C64;

/// Exact rational scalar. The denominator is positive and the fraction
/// reduced by construction.
pub type Rat = num::BigRational;

/// `p/q` from machine integers.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Integer as an exact rational.
pub fn rat_int(p: i64) -> Rat {
    Rat::from(BigInt::from(p))
}

/// A sparse monomial: variables with positive exponents, sorted by
/// variable order.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(VarId, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: VarId) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, v: VarId) -> u32 {
        self.0
            .iter()
            .find(|(u, _)| *u == v)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.0.iter().map(|(v, _)| *v)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(other.0[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((self.0[i].0, self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// Componentwise quotient, `None` when some exponent of `other`
    /// exceeds ours.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for &(v, e) in &self.0 {
            let mut rem = e;
            if j < other.0.len() && other.0[j].0 < v {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == v {
                if other.0[j].1 > e {
                    return None;
                }
                rem = e - other.0[j].1;
                j += 1;
            }
            if rem > 0 {
                out.push((v, rem));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    /// Lexicographic order on exponent vectors over the fixed variable
    /// order: at the first variable where the exponents differ, the
    /// larger exponent wins.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), other.0.get(j)) {
                (None, None) => return std::cmp::Ordering::Equal,
                (Some(_), None) => return std::cmp::Ordering::Greater,
                (None, Some(_)) => return std::cmp::Ordering::Less,
                (Some(&(va, ea)), Some(&(vb, eb))) => match va.cmp(&vb) {
                    // `self` has a positive exponent on an earlier
                    // variable than `other`, so it is lex-larger.
                    std::cmp::Ordering::Less => return std::cmp::Ordering::Greater,
                    std::cmp::Ordering::Greater => return std::cmp::Ordering::Less,
                    std::cmp::Ordering::Equal => {
                        match ea.cmp(&eb) {
                            std::cmp::Ordering::Equal => {}
                            ord => return ord,
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(v, e)| {
                if *e == 1 {
                    format!("{:?}", v)
                } else {
                    format!("{:?}^{}", v, e)
                }
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Sparse multivariate polynomial with exact rational coefficients.
/// Stored zero coefficients are never kept.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct MPoly {
    terms: BTreeMap<Monomial, Rat>,
}

impl MPoly {
    pub fn zero() -> Self {
        MPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        MPoly { terms }
    }

    pub fn int(c: i64) -> Self {
        Self::constant(rat_int(c))
    }

    pub fn var(v: VarId) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(v), Rat::one());
        MPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    /// The constant coefficient.
    pub fn constant_term(&self) -> Rat {
        self.terms
            .get(&Monomial::one())
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    /// As an exact rational if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    fn insert_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &Rat) -> MPoly {
        if c.is_zero() {
            return MPoly::zero();
        }
        MPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), a.clone() * c.clone()))
                .collect(),
        }
    }

    /// Exact partial derivative.
    pub fn diff(&self, v: VarId) -> MPoly {
        let mut out = MPoly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e == 0 {
                continue;
            }
            let lowered = m.div(&Monomial::var(v)).expect("exponent checked positive");
            out.insert_term(lowered, c.clone() * rat_int(e as i64));
        }
        out
    }

    /// Maximal exponent of `v` over all terms.
    pub fn degree_in(&self, v: VarId) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    /// Largest monomial in the term order, with coefficient.
    pub fn leading_term(&self) -> Option<(&Monomial, &Rat)> {
        self.terms.iter().next_back()
    }

    /// Exact quotient, `None` if `divisor` does not divide `self`.
    /// Plain lex-leading-term reduction; only ever called with divisors
    /// that are known to divide (fraction-free elimination pivots).
    pub fn div_exact(&self, divisor: &MPoly) -> Option<MPoly> {
        let (dm, dc) = divisor.leading_term()?;
        let mut rem = self.clone();
        let mut quo = MPoly::zero();
        while let Some((rm, rc)) = rem.leading_term() {
            let q = rm.div(dm)?;
            let c = rc.clone() / dc.clone();
            let mut t = MPoly::zero();
            t.insert_term(q, c);
            rem = rem - t.clone() * divisor.clone();
            quo = quo + t;
        }
        Some(quo)
    }

    /// Evaluate with rational values; variables missing from the
    /// assignment count as zero.
    pub fn eval_rat(&self, values: &BTreeMap<VarId, Rat>) -> Rat {
        let mut acc = Rat::zero();
        'term: for (m, c) in &self.terms {
            let mut prod = c.clone();
            for (v, e) in &m.0 {
                match values.get(v) {
                    Some(x) if !x.is_zero() => {
                        for _ in 0..*e {
                            prod *= x.clone();
                        }
                    }
                    _ => continue 'term,
                }
            }
            acc += prod;
        }
        acc
    }

    /// Evaluate with complex values; missing variables count as zero.
    pub fn eval_c64(&self, values: &BTreeMap<VarId, C64>) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        'term: for (m, c) in &self.terms {
            let mut prod = C64::new(rat_to_f64(c), 0.0);
            for (v, e) in &m.0 {
                match values.get(v) {
                    Some(x) => {
                        for _ in 0..*e {
                            prod *= *x;
                        }
                    }
                    None => continue 'term,
                }
            }
            acc += prod;
        }
        acc
    }

    /// Substitute exact values for a subset of the variables, keeping
    /// the remaining ones symbolic.
    pub fn substitute(&self, values: &BTreeMap<VarId, Rat>) -> MPoly {
        let mut out = MPoly::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut rest = Vec::new();
            for &(v, e) in &m.0 {
                match values.get(&v) {
                    Some(x) => {
                        for _ in 0..e {
                            coeff *= x.clone();
                        }
                        if coeff.is_zero() {
                            break;
                        }
                    }
                    None => rest.push((v, e)),
                }
            }
            if !coeff.is_zero() {
                out.insert_term(Monomial(rest), coeff);
            }
        }
        out
    }

    /// Canonical text rendering: terms in descending monomial order,
    /// variables named per block size `n` (`z2*w3`, `w2^2`, ...).
    pub fn render(&self, n: usize) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c < &Rat::zero();
            let abs = if neg { -c.clone() } else { c.clone() };
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let coeff_part = if abs.is_one() && !m.is_one() {
                String::new()
            } else {
                format!("{}", abs)
            };
            let mono_part = if m.is_one() {
                String::new()
            } else {
                let pieces: Vec<String> = m
                    .0
                    .iter()
                    .map(|(v, e)| {
                        if *e == 1 {
                            v.name(n)
                        } else {
                            format!("{}^{}", v.name(n), e)
                        }
                    })
                    .collect();
                pieces.join("*")
            };
            match (coeff_part.is_empty(), mono_part.is_empty()) {
                (false, false) => {
                    out.push_str(&coeff_part);
                    out.push('*');
                    out.push_str(&mono_part);
                }
                (false, true) => out.push_str(&coeff_part),
                (true, false) => out.push_str(&mono_part),
                (true, true) => out.push('1'),
            }
        }
        out
    }
}

/// Nearest `f64` to an exact rational; used only for pivot choice and
/// for producing numeric scalars, never for exact decisions.
pub fn rat_to_f64(r: &Rat) -> f64 {
    let num = bigint_to_f64(r.numer());
    let den = bigint_to_f64(r.denom());
    num / den
}

fn bigint_to_f64(b: &BigInt) -> f64 {
    // Good enough for pivot scoring; exact conversion is not needed.
    b.to_string().parse::<f64>().unwrap_or(f64::NAN)
}

impl Add for MPoly {
    type Output = MPoly;
    fn add(self, rhs: MPoly) -> MPoly {
        let mut out = self;
        for (m, c) in rhs.terms {
            out.insert_term(m, c);
        }
        out
    }
}

impl Sub for MPoly {
    type Output = MPoly;
    fn sub(self, rhs: MPoly) -> MPoly {
        let mut out = self;
        for (m, c) in rhs.terms {
            out.insert_term(m, -c);
        }
        out
    }
}

impl Neg for MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        MPoly {
            terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect(),
        }
    }
}

impl Mul for MPoly {
    type Output = MPoly;
    fn mul(self, rhs: MPoly) -> MPoly {
        let mut out = MPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.insert_term(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        out
    }
}

impl Zero for MPoly {
    fn zero() -> Self {
        MPoly::zero()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for MPoly {
    fn one() -> Self {
        MPoly::int(1)
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(2))
    }
}

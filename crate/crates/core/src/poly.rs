//! Sparse homogeneous polynomials in `n+1` variables under the graded reverse
//! lexicographic order.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::residue::{Modulus, PResidue};

pub type Exps = SmallVec<[u16; 8]>;

/// An exponent vector with cached total degree, ordered by grevlex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Exps,
    degree: u32,
}

impl Monomial {
    pub fn new(exps: &[u16]) -> Self {
        Monomial {
            exps: Exps::from_slice(exps),
            degree: exps.iter().map(|&e| e as u32).sum(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Monomial::new(&vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial::new(&e)
    }

    pub fn exps(&self) -> &[u16] {
        &self.exps
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let exps: Exps = self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect();
        Monomial {
            exps,
            degree: self.degree + other.degree,
        }
    }

    pub fn pow(&self, k: u16) -> Monomial {
        let exps: Exps = self.exps.iter().map(|a| a * k).collect();
        Monomial {
            exps,
            degree: self.degree * k as u32,
        }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming divisibility.
    pub fn quotient(&self, other: &Monomial) -> Monomial {
        let exps: Exps = other.exps.iter().zip(&self.exps).map(|(a, b)| a - b).collect();
        Monomial {
            exps,
            degree: other.degree - self.degree,
        }
    }

    pub fn format_with(&self, names: &[String]) -> String {
        let parts: Vec<String> = self
            .exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                if e == 1 {
                    names[i].clone()
                } else {
                    format!("{}^{}", names[i], e)
                }
            })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree.cmp(&other.degree).then_with(|| {
            for (a, b) in self.exps.iter().zip(&other.exps).rev() {
                if a != b {
                    return b.cmp(a);
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Coefficient ring for [`HPoly`].
pub trait Coeff: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, k: i64) -> Self;
    /// Symmetric integer representative used for text output.
    fn to_display(&self) -> BigInt;
}

impl Coeff for BigInt {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, k: i64) -> Self {
        self * k
    }
    fn to_display(&self) -> BigInt {
        self.clone()
    }
}

impl Coeff for PResidue {
    fn is_zero(&self) -> bool {
        PResidue::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        *self + *o
    }
    fn mul(&self, o: &Self) -> Self {
        *self * *o
    }
    fn neg(&self) -> Self {
        -*self
    }
    fn scale(&self, k: i64) -> Self {
        PResidue::scale(self, k)
    }
    fn to_display(&self) -> BigInt {
        BigInt::from(self.signed())
    }
}

/// A homogeneous polynomial: every stored monomial has the declared degree and
/// no stored coefficient is zero.
#[derive(Clone, Debug, PartialEq)]
pub struct HPoly<C: Coeff> {
    nvars: usize,
    degree: u32,
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coeff> HPoly<C> {
    pub fn zero(nvars: usize, degree: u32) -> Self {
        HPoly {
            nvars,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, C)>>(nvars: usize, degree: u32, terms: I) -> Result<Self> {
        let mut p = HPoly::zero(nvars, degree);
        for (m, c) in terms {
            if m.nvars() != nvars {
                return Err(Error::Input(format!("monomial has {} variables, expected {nvars}", m.nvars())));
            }
            if m.degree() != degree {
                return Err(Error::NotHomogeneous);
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn monomial(m: Monomial, c: C) -> Self {
        let mut p = HPoly::zero(m.nvars(), m.degree());
        p.add_term(m, c);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
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

    /// Terms in ascending grevlex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Option<&C> {
        self.terms.get(m)
    }

    pub fn leading(&self) -> Option<(&Monomial, &C)> {
        self.terms.iter().next_back()
    }

    fn add_term(&mut self, m: Monomial, c: C) {
        debug_assert_eq!(m.degree(), self.degree);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                let s = v.add(&c);
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.degree, other.degree, "adding polynomials of different degree");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        HPoly {
            nvars: self.nvars,
            degree: self.degree,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = HPoly::zero(self.nvars, self.degree + other.degree);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1.mul(c2));
            }
        }
        out
    }

    pub fn scale(&self, k: i64) -> Self {
        let mut out = HPoly::zero(self.nvars, self.degree);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.scale(k));
        }
        out
    }

    pub fn mul_coeff(&self, k: &C) -> Self {
        let mut out = HPoly::zero(self.nvars, self.degree);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.mul(k));
        }
        out
    }

    pub fn mul_monomial(&self, mono: &Monomial) -> Self {
        HPoly {
            nvars: self.nvars,
            degree: self.degree + mono.degree(),
            terms: self.terms.iter().map(|(m, c)| (m.mul(mono), c.clone())).collect(),
        }
    }

    /// `self^k` by repeated squaring; `one` is the unit of the coefficient ring.
    pub fn pow(&self, mut k: u32, one: C) -> Self {
        let mut result = HPoly::monomial(Monomial::one(self.nvars), one);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Partial derivative with respect to `x_i`.
    pub fn partial(&self, i: usize) -> Self {
        assert!(self.degree >= 1, "partial of a constant");
        let mut out = HPoly::zero(self.nvars, self.degree - 1);
        for (m, c) in &self.terms {
            let e = m.exps()[i];
            if e == 0 {
                continue;
            }
            let mut ex: Exps = m.exps.clone();
            ex[i] -= 1;
            out.add_term(Monomial::new(&ex), c.scale(e as i64));
        }
        out
    }

    /// Substitute `x_i -> x_i^p` (the coefficient map is the identity over a prime field).
    pub fn frob_substitute(&self, p: u64) -> Self {
        let k = p as u16;
        HPoly {
            nvars: self.nvars,
            degree: self.degree * p as u32,
            terms: self.terms.iter().map(|(m, c)| (m.pow(k), c.clone())).collect(),
        }
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> HPoly<D> {
        let mut out = HPoly::zero(self.nvars, self.degree);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    pub fn format_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let v = c.to_display();
            let neg = v.is_negative();
            let a = v.abs();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mono = m.format_with(names);
            if a.is_one() {
                s.push_str(&mono);
            } else if mono == "1" {
                s.push_str(&a.to_string());
            } else {
                s.push_str(&format!("{a}*{mono}"));
            }
        }
        s
    }
}

impl<C: Coeff> fmt::Display for HPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_with(&default_names(self.nvars)))
    }
}

pub fn default_names(nvars: usize) -> Vec<String> {
    (0..nvars).map(|i| format!("x{i}")).collect()
}

impl HPoly<BigInt> {
    /// Parse terms like `3*x0^2*x1*x3 - x2^4`. Variable names default to `x0..xn`.
    pub fn parse(text: &str, names: &[String]) -> Result<Self> {
        let nvars = names.len();
        let mut terms: Vec<(Monomial, BigInt)> = Vec::new();
        let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(Error::Input("empty polynomial".into()));
        }
        let mut chunks: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        for (pos, ch) in cleaned.chars().enumerate() {
            if (ch == '+' || ch == '-') && !cur.ends_with('^') {
                if pos > 0 {
                    if cur.is_empty() {
                        return Err(Error::Input(format!("dangling sign in {text:?}")));
                    }
                    chunks.push((neg, std::mem::take(&mut cur)));
                }
                neg = ch == '-';
            } else {
                cur.push(ch);
            }
        }
        if cur.is_empty() {
            return Err(Error::Input(format!("trailing sign in {text:?}")));
        }
        chunks.push((neg, cur));

        for (neg, chunk) in chunks {
            let mut coeff = BigInt::one();
            let mut exps = vec![0u16; nvars];
            for factor in chunk.split('*') {
                if factor.is_empty() {
                    return Err(Error::Input(format!("empty factor in {chunk:?}")));
                }
                if factor.chars().all(|c| c.is_ascii_digit()) {
                    coeff *= factor
                        .parse::<BigInt>()
                        .map_err(|e| Error::Input(e.to_string()))?;
                    continue;
                }
                let (name, exp) = match factor.split_once('^') {
                    Some((n, e)) => (
                        n,
                        e.parse::<u16>()
                            .map_err(|_| Error::Input(format!("bad exponent in {factor:?}")))?,
                    ),
                    None => (factor, 1),
                };
                let idx = names
                    .iter()
                    .position(|v| v == name)
                    .ok_or_else(|| Error::Input(format!("unknown variable {name:?}")))?;
                exps[idx] += exp;
            }
            if neg {
                coeff = -coeff;
            }
            terms.push((Monomial::new(&exps), coeff));
        }
        let degree = terms[0].0.degree();
        if terms.iter().any(|(m, _)| m.degree() != degree) {
            return Err(Error::NotHomogeneous);
        }
        HPoly::from_terms(nvars, degree, terms)
    }

    pub fn reduce_mod(&self, modulus: Modulus) -> HPoly<PResidue> {
        self.map_coeffs(|c| PResidue::new(modulus.from_bigint(c), modulus))
    }

    /// Exact division of every coefficient; `None` if some coefficient is not divisible.
    pub fn div_exact(&self, k: &BigInt) -> Option<Self> {
        let mut out = HPoly::zero(self.nvars, self.degree);
        for (m, c) in &self.terms {
            let (q, r) = c.div_rem(k);
            if !Zero::is_zero(&r) {
                return None;
            }
            out.add_term(m.clone(), q);
        }
        Some(out)
    }

    pub fn max_abs_coeff(&self) -> BigInt {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_default()
    }

    pub fn to_i64_terms(&self) -> Option<Vec<(Monomial, i64)>> {
        self.terms.iter().map(|(m, c)| c.to_i64().map(|v| (m.clone(), v))).collect()
    }
}

/// `Δ = (P̃(x^p) − P̃^p) / p` computed exactly over the integers.
pub fn compute_delta(lift: &HPoly<BigInt>, p: u64) -> Result<HPoly<BigInt>> {
    let num = lift.frob_substitute(p).sub(&lift.pow(p as u32, BigInt::one()));
    num.div_exact(&BigInt::from(p))
        .ok_or_else(|| Error::Internal("P(x^p) - P^p is not divisible by p".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn names(n: usize) -> Vec<String> {
        default_names(n)
    }

    fn parse(s: &str, n: usize) -> HPoly<BigInt> {
        HPoly::parse(s, &names(n)).unwrap()
    }

    #[test]
    fn partial_examples() {
        assert_eq!(parse("x0^4", 2).partial(0), parse("4*x0^3", 2));
        assert!(parse("x1^3", 2).partial(0).is_zero());
        assert_eq!(parse("x1^3", 2).partial(0).degree(), 2);
    }

    #[test]
    fn frob_examples() {
        assert_eq!(parse("x0 + x1", 2).frob_substitute(2), parse("x0^2 + x1^2", 2));
        assert_eq!(parse("x0*x1", 2).frob_substitute(3), parse("x0^3*x1^3", 2));
    }

    #[test]
    fn delta_examples() {
        assert!(compute_delta(&parse("x0", 2), 5).unwrap().is_zero());
        assert_eq!(compute_delta(&parse("x0 + x1", 2), 2).unwrap(), parse("-x0*x1", 2));
        assert_eq!(
            compute_delta(&parse("x0 + x1", 2), 3).unwrap(),
            parse("-x0^2*x1 - x0*x1^2", 2)
        );
    }

    #[test]
    fn parse_rejects_inhomogeneous() {
        assert_eq!(HPoly::parse("x0^3 + x1^2", &names(3)), Err(Error::NotHomogeneous));
        assert!(HPoly::parse("x0^3 + x7", &names(3)).is_err());
        assert!(HPoly::parse("x0 +", &names(3)).is_err());
    }

    #[test]
    fn parse_format_round_trip() {
        let f = parse("3*x0^2*x1*x3 - x2^4 + x0*x1*x2*x3", 4);
        assert_eq!(f.len(), 3);
        assert_eq!(parse(&f.to_string(), 4), f);
    }

    #[test]
    fn grevlex_examples() {
        let m = |e: &[u16]| Monomial::new(e);
        assert!(m(&[2, 0, 0]) > m(&[1, 1, 0]));
        assert!(m(&[1, 1, 0]) > m(&[0, 2, 0]));
        assert!(m(&[0, 2, 0]) > m(&[1, 0, 1]));
        assert!(m(&[0, 2, 0, 0]) > m(&[1, 0, 0, 1]));
        assert!(m(&[2, 0, 0, 0]) > m(&[0, 0, 0, 1]));
    }

    fn arb_poly(nvars: usize, degree: u32) -> impl Strategy<Value = HPoly<BigInt>> {
        prop::collection::vec((prop::collection::vec(0u16..=degree as u16, nvars), -5i64..=5), 0..8).prop_map(
            move |raw| {
                let terms = raw.into_iter().map(|(mut e, c)| {
                    let mut left = degree as i64;
                    for x in e.iter_mut() {
                        let v = (*x as i64).min(left);
                        *x = v as u16;
                        left -= v;
                    }
                    *e.last_mut().unwrap() += left as u16;
                    (Monomial::new(&e), BigInt::from(c))
                });
                HPoly::from_terms(nvars, degree, terms).unwrap()
            },
        )
    }

    proptest! {
        #[test]
        fn grevlex_is_total_order(a in prop::collection::vec(0u16..4, 4), b in prop::collection::vec(0u16..4, 4), c in prop::collection::vec(0u16..4, 4)) {
            let (a, b, c) = (Monomial::new(&a), Monomial::new(&b), Monomial::new(&c));
            prop_assert_eq!(a.cmp(&b), b.cmp(&a).reverse());
            prop_assert_eq!(a.cmp(&b) == Ordering::Equal, a == b);
            if a < b && b < c { prop_assert!(a < c); }
            let x = Monomial::var(4, 2);
            prop_assert_eq!(a.mul(&x).cmp(&b.mul(&x)), a.cmp(&b));
        }

        #[test]
        fn euler_identity(f in arb_poly(4, 4)) {
            let mut sum = HPoly::zero(4, 4);
            for i in 0..4 {
                sum = sum.add(&f.partial(i).mul_monomial(&Monomial::var(4, i)));
            }
            prop_assert_eq!(sum, f.scale(4));
        }

        #[test]
        fn multiplication_laws(f in arb_poly(3, 2), g in arb_poly(3, 3), h in arb_poly(3, 1)) {
            prop_assert_eq!(f.mul(&g), g.mul(&f));
            prop_assert_eq!(f.mul(&g).mul(&h), f.mul(&g.mul(&h)));
        }

        #[test]
        fn frob_is_multiplicative(f in arb_poly(3, 2), g in arb_poly(3, 2), p in prop::sample::select(vec![2u64, 3, 5])) {
            prop_assert_eq!(f.mul(&g).frob_substitute(p), f.frob_substitute(p).mul(&g.frob_substitute(p)));
            prop_assert_eq!(f.frob_substitute(p).degree(), 2 * p as u32);
        }

        #[test]
        fn delta_identity(f in prop_oneof![arb_poly(4, 3), arb_poly(4, 4)], p in prop::sample::select(vec![2u64, 3, 5])) {
            let delta = compute_delta(&f, p).unwrap();
            prop_assert_eq!(delta.degree(), p as u32 * f.degree());
            let lhs = delta.scale(p as i64).add(&f.pow(p as u32, BigInt::one()));
            prop_assert_eq!(lhs, f.frob_substitute(p));
        }
    }
}

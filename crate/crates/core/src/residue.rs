//! Exact arithmetic in `Z/p^m`, p-adic valuations, scaled residues that carry
//! an explicit power-of-p shift, and univariate polynomials over `Z/p^m`.
//!
//! All residue values are stored as `u64` representatives in `[0, p^m)`; the
//! moduli used by the pipeline satisfy `p^m < 2^63`. Every operation goes
//! through [`Modulus`], so a wider backend only has to replace that type.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest modulus we accept; keeps sums of two residues inside `u64`.
const MAX_MODULUS: u64 = 1 << 62;

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// p-adic valuation of a nonzero integer.
pub fn vp_u64(mut x: u64, p: u64) -> u32 {
    debug_assert!(x != 0);
    let mut v = 0;
    while x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    v
}

/// p-adic valuation of a nonzero signed integer.
pub fn vp_i64(x: i64, p: u64) -> u32 {
    vp_u64(x.unsigned_abs(), p)
}

/// The ring `Z/p^m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Modulus {
    p: u64,
    m: u32,
    pm: u64,
}

impl Modulus {
    pub fn new(p: u64, m: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let mut pm = 1u64;
        for _ in 0..m {
            pm = pm
                .checked_mul(p)
                .filter(|&v| v <= MAX_MODULUS)
                .ok_or_else(|| Error::Unsupported(format!("{p}^{m} exceeds the residue backend")))?;
        }
        Ok(Modulus { p, m, pm })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    /// The precision exponent `m`.
    #[inline]
    pub fn precision(&self) -> u32 {
        self.m
    }

    /// `p^m`.
    #[inline]
    pub fn value(&self) -> u64 {
        self.pm
    }

    /// Same prime, precision `min(self.m, m)`.
    pub fn truncated(&self, m: u32) -> Modulus {
        if m >= self.m {
            *self
        } else {
            Modulus {
                p: self.p,
                m,
                pm: self.p.pow(m),
            }
        }
    }

    #[inline]
    pub fn reduce(&self, x: u64) -> u64 {
        x % self.pm
    }

    pub fn from_i64(&self, x: i64) -> u64 {
        let r = x.rem_euclid(self.pm as i128 as i64);
        r as u64
    }

    pub fn from_i128(&self, x: i128) -> u64 {
        x.rem_euclid(self.pm as i128) as u64
    }

    pub fn from_bigint(&self, x: &BigInt) -> u64 {
        let r = x.mod_floor(&BigInt::from(self.pm));
        r.to_u64().expect("residue fits")
    }

    /// Symmetric representative in `(-p^m/2, p^m/2]`.
    pub fn to_signed(&self, a: u64) -> i64 {
        if a > self.pm / 2 {
            a as i64 - self.pm as i64
        } else {
            a as i64
        }
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.pm {
            s - self.pm
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.pm - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.pm - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if self.pm <= u32::MAX as u64 {
            (a * b) % self.pm
        } else {
            ((a as u128 * b as u128) % self.pm as u128) as u64
        }
    }

    /// `acc + a*b`.
    #[inline]
    pub fn mul_add(&self, acc: u64, a: u64, b: u64) -> u64 {
        self.add(acc, self.mul(a, b))
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1 % self.pm;
        a %= self.pm;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    /// `p^e mod p^m` (zero once `e >= m`).
    pub fn p_pow(&self, e: u32) -> u64 {
        if e >= self.m {
            0
        } else {
            self.p.pow(e)
        }
    }

    /// Valuation of a residue; `None` for the zero residue.
    pub fn val(&self, a: u64) -> Option<u32> {
        if a == 0 {
            None
        } else {
            Some(vp_u64(a, self.p))
        }
    }

    /// Inverse of a unit by extended Euclid.
    pub fn inv(&self, a: u64) -> Option<u64> {
        let a = a % self.pm;
        if a.is_multiple_of(self.p) {
            return None;
        }
        let (mut old_r, mut r) = (a as i128, self.pm as i128);
        let (mut old_s, mut s) = (1i128, 0i128);
        while r != 0 {
            let q = old_r / r;
            (old_r, r) = (r, old_r - q * r);
            (old_s, s) = (s, old_s - q * s);
        }
        debug_assert_eq!(old_r, 1);
        Some(old_s.rem_euclid(self.pm as i128) as u64)
    }

    /// Inverse of the unit part of a nonzero integer, together with its valuation.
    pub fn split_integer(&self, b: i64) -> (u64, u32) {
        let v = vp_i64(b, self.p);
        let unit = b / (self.p as i64).pow(v);
        (self.inv(self.from_i64(unit)).expect("unit part"), v)
    }
}

/// Valuation of an element of `Z/p^m`: exact, or only known to be at least `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Valuation {
    Exact(u32),
    AtLeast(u32),
}

/// An element of `Z/p^m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PResidue {
    value: u64,
    modulus: Modulus,
}

impl PResidue {
    pub fn new(value: u64, modulus: Modulus) -> Self {
        PResidue {
            value: value % modulus.value(),
            modulus,
        }
    }

    pub fn from_i64(value: i64, modulus: Modulus) -> Self {
        PResidue {
            value: modulus.from_i64(value),
            modulus,
        }
    }

    pub fn zero(modulus: Modulus) -> Self {
        PResidue { value: 0, modulus }
    }

    pub fn one(modulus: Modulus) -> Self {
        PResidue::new(1, modulus)
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn p(&self) -> u64 {
        self.modulus.p
    }

    pub fn precision(&self) -> u32 {
        self.modulus.m
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn signed(&self) -> i64 {
        self.modulus.to_signed(self.value)
    }

    pub fn truncate(&self, m: u32) -> Self {
        let modulus = self.modulus.truncated(m);
        PResidue::new(self.value, modulus)
    }

    pub fn val(&self) -> Valuation {
        match self.modulus.val(self.value) {
            Some(v) => Valuation::Exact(v),
            None => Valuation::AtLeast(self.modulus.m),
        }
    }

    pub fn invert_unit(&self) -> Result<PResidue> {
        self.modulus
            .inv(self.value)
            .map(|v| PResidue::new(v, self.modulus))
            .ok_or(Error::NotInvertible(self.value))
    }

    pub fn scale(&self, k: i64) -> Self {
        PResidue::new(
            self.modulus.mul(self.value, self.modulus.from_i64(k)),
            self.modulus,
        )
    }

    pub fn pow(&self, e: u64) -> Self {
        PResidue::new(self.modulus.pow(self.value, e), self.modulus)
    }

    fn common(&self, other: &Self) -> Modulus {
        assert_eq!(self.modulus.p, other.modulus.p, "residues over different primes");
        if self.modulus.m <= other.modulus.m {
            self.modulus
        } else {
            other.modulus
        }
    }
}

impl Add for PResidue {
    type Output = PResidue;
    fn add(self, rhs: Self) -> Self {
        let m = self.common(&rhs);
        PResidue::new(m.add(m.reduce(self.value), m.reduce(rhs.value)), m)
    }
}

impl Sub for PResidue {
    type Output = PResidue;
    fn sub(self, rhs: Self) -> Self {
        let m = self.common(&rhs);
        PResidue::new(m.sub(m.reduce(self.value), m.reduce(rhs.value)), m)
    }
}

impl Mul for PResidue {
    type Output = PResidue;
    fn mul(self, rhs: Self) -> Self {
        let m = self.common(&rhs);
        PResidue::new(m.mul(m.reduce(self.value), m.reduce(rhs.value)), m)
    }
}

impl Neg for PResidue {
    type Output = PResidue;
    fn neg(self) -> Self {
        PResidue::new(self.modulus.neg(self.value), self.modulus)
    }
}

impl fmt::Display for PResidue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}^{}", self.value, self.modulus.p, self.modulus.m)
    }
}

/// A p-adic number `unit * p^shift`, where the unit is known modulo
/// `p^rel_prec`.
///
/// `rel_prec == 0` encodes a value indistinguishable from zero: it is known to
/// be `0 mod p^shift` and nothing more. The absolute precision is always
/// `shift + rel_prec`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaledResidue {
    p: u64,
    unit: u64,
    rel_prec: u32,
    shift: i64,
}

impl ScaledResidue {
    /// Zero known modulo `p^abs_prec`.
    pub fn zero(p: u64, abs_prec: i64) -> Self {
        ScaledResidue {
            p,
            unit: 0,
            rel_prec: 0,
            shift: abs_prec,
        }
    }

    /// `x * p^shift` where `x` is known modulo `p^prec`.
    pub fn from_residue_shifted(x: u64, modulus: Modulus, shift: i64) -> Self {
        let x = x % modulus.value();
        let p = modulus.p();
        match modulus.val(x) {
            None => ScaledResidue::zero(p, shift + modulus.precision() as i64),
            Some(v) => {
                let rel = modulus.precision() - v;
                let unit = (x / p.pow(v)) % p.pow(rel);
                ScaledResidue {
                    p,
                    unit,
                    rel_prec: rel,
                    shift: shift + v as i64,
                }
            }
        }
    }

    pub fn from_residue(a: PResidue) -> Self {
        ScaledResidue::from_residue_shifted(a.value(), a.modulus(), 0)
    }

    /// `unit * p^shift` with the unit known modulo `p^rel_prec`.
    pub fn from_parts(p: u64, unit: u64, rel_prec: u32, shift: i64) -> Result<Self> {
        let m = Modulus::new(p, rel_prec)?;
        if rel_prec > 0 && unit.is_multiple_of(p) {
            return Err(Error::Input(format!("unit {unit} is divisible by {p}")));
        }
        Ok(ScaledResidue {
            p,
            unit: unit % m.value(),
            rel_prec,
            shift,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn unit(&self) -> u64 {
        self.unit
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn relative_precision(&self) -> u32 {
        self.rel_prec
    }

    pub fn absolute_precision(&self) -> i64 {
        self.shift + self.rel_prec as i64
    }

    /// True when no digit of the value is known (zero at its stated precision).
    pub fn is_indeterminate(&self) -> bool {
        self.rel_prec == 0
    }

    /// Exact valuation, if any digit is known.
    pub fn valuation(&self) -> Option<i64> {
        (self.rel_prec > 0).then_some(self.shift)
    }

    /// Divide by a nonzero integer: the shift drops by `v_p(b)` and the unit is
    /// multiplied by the inverse of the unit part of `b`.
    pub fn divide_tracked(&self, b: i64) -> Self {
        assert!(b != 0, "division by zero");
        let v = vp_i64(b, self.p) as i64;
        if self.rel_prec == 0 {
            return ScaledResidue::zero(self.p, self.shift - v);
        }
        let m = Modulus::new(self.p, self.rel_prec).expect("precision already validated");
        let (inv_unit, _) = m.split_integer(b);
        ScaledResidue {
            p: self.p,
            unit: m.mul(self.unit, inv_unit),
            rel_prec: self.rel_prec,
            shift: self.shift - v,
        }
    }

    /// Multiply by `p^e`, exactly.
    pub fn shifted(&self, e: i64) -> Self {
        ScaledResidue {
            shift: self.shift + e,
            ..*self
        }
    }

    /// Multiply by an integer, tracking the gained valuation.
    pub fn scale(&self, k: i64) -> Self {
        if k == 0 {
            return ScaledResidue::zero(self.p, i64::MAX / 4);
        }
        let v = vp_i64(k, self.p) as i64;
        if self.rel_prec == 0 {
            return ScaledResidue::zero(self.p, self.shift + v);
        }
        let m = Modulus::new(self.p, self.rel_prec).expect("validated");
        let u = k / (self.p as i64).pow(v as u32);
        ScaledResidue {
            p: self.p,
            unit: m.mul(self.unit, m.from_i64(u)),
            rel_prec: self.rel_prec,
            shift: self.shift + v,
        }
    }

    /// Reduce to an element of `Z/p^r`. Fails when the value is not known to be
    /// integral or not known to `r` digits.
    pub fn to_residue(&self, r: u32) -> Result<PResidue> {
        let modulus = Modulus::new(self.p, r)?;
        if self.absolute_precision() < r as i64 {
            return Err(Error::PrecisionExhausted(format!(
                "value known to p^{} but p^{r} requested",
                self.absolute_precision()
            )));
        }
        if self.rel_prec == 0 {
            return Ok(PResidue::zero(modulus));
        }
        if self.shift < 0 {
            return Err(Error::PrecisionExhausted(format!(
                "value has negative valuation {}",
                self.shift
            )));
        }
        let v = modulus.mul(modulus.reduce(self.unit), modulus.p_pow(self.shift as u32));
        Ok(PResidue::new(v, modulus))
    }

    /// Digits of `self` relative to `p^base`, known modulo `p^(top - base)`.
    fn digits_from(&self, base: i64, top: i64) -> u64 {
        if self.rel_prec == 0 || self.shift >= top {
            return 0;
        }
        let m = Modulus::new(self.p, (top - base) as u32).expect("bounded by relative precision");
        m.mul(m.reduce(self.unit), m.p_pow((self.shift - base) as u32))
    }
}

impl Add for ScaledResidue {
    type Output = ScaledResidue;
    fn add(self, rhs: Self) -> Self {
        assert_eq!(self.p, rhs.p);
        let top = self.absolute_precision().min(rhs.absolute_precision());
        let base = match (self.rel_prec, rhs.rel_prec) {
            (0, 0) => return ScaledResidue::zero(self.p, top),
            (0, _) => rhs.shift,
            (_, 0) => self.shift,
            _ => self.shift.min(rhs.shift),
        };
        if top <= base {
            return ScaledResidue::zero(self.p, top);
        }
        let m = Modulus::new(self.p, (top - base) as u32).expect("bounded by relative precision");
        let sum = m.add(self.digits_from(base, top), rhs.digits_from(base, top));
        ScaledResidue::from_residue_shifted(sum, m, base)
    }
}

impl Neg for ScaledResidue {
    type Output = ScaledResidue;
    fn neg(self) -> Self {
        if self.rel_prec == 0 {
            return self;
        }
        let m = Modulus::new(self.p, self.rel_prec).expect("validated");
        ScaledResidue {
            unit: m.neg(self.unit),
            ..self
        }
    }
}

impl Sub for ScaledResidue {
    type Output = ScaledResidue;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for ScaledResidue {
    type Output = ScaledResidue;
    fn mul(self, rhs: Self) -> Self {
        assert_eq!(self.p, rhs.p);
        match (self.rel_prec, rhs.rel_prec) {
            (0, 0) => ScaledResidue::zero(self.p, self.shift + rhs.shift),
            (0, _) => ScaledResidue::zero(self.p, self.shift + rhs.shift),
            (_, 0) => ScaledResidue::zero(self.p, self.shift + rhs.shift),
            _ => {
                let rel = self.rel_prec.min(rhs.rel_prec);
                let m = Modulus::new(self.p, rel).expect("validated");
                ScaledResidue {
                    p: self.p,
                    unit: m.mul(m.reduce(self.unit), m.reduce(rhs.unit)),
                    rel_prec: rel,
                    shift: self.shift + rhs.shift,
                }
            }
        }
    }
}

impl fmt::Display for ScaledResidue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rel_prec == 0 {
            write!(f, "O({}^{})", self.p, self.shift)
        } else {
            write!(
                f,
                "{}*{}^{} + O({}^{})",
                self.unit,
                self.p,
                self.shift,
                self.p,
                self.absolute_precision()
            )
        }
    }
}

/// Univariate polynomial over `Z/p^m`, coefficients from low to high degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniPoly {
    modulus: Modulus,
    coeffs: Vec<u64>,
}

impl UniPoly {
    pub fn new(modulus: Modulus, coeffs: Vec<u64>) -> Self {
        let mut p = UniPoly {
            modulus,
            coeffs: coeffs.into_iter().map(|c| modulus.reduce(c)).collect(),
        };
        p.trim();
        p
    }

    pub fn from_i64(modulus: Modulus, coeffs: &[i64]) -> Self {
        UniPoly::new(modulus, coeffs.iter().map(|&c| modulus.from_i64(c)).collect())
    }

    pub fn from_bigints(modulus: Modulus, coeffs: &[BigInt]) -> Self {
        UniPoly::new(modulus, coeffs.iter().map(|c| modulus.from_bigint(c)).collect())
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> u64 {
        self.coeffs.get(k).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the stored representative, `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Minimum coefficient valuation; `None` for the zero polynomial.
    pub fn gauss_val(&self) -> Option<u32> {
        self.coeffs.iter().filter_map(|&c| self.modulus.val(c)).min()
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        let m = self.modulus;
        if self.is_zero() || other.is_zero() {
            return UniPoly::new(m, vec![]);
        }
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = m.mul_add(out[i + j], a, b);
            }
        }
        UniPoly::new(m, out)
    }

    pub fn sub(&self, other: &UniPoly) -> UniPoly {
        let m = self.modulus;
        let len = self.coeffs.len().max(other.coeffs.len());
        let out = (0..len).map(|k| m.sub(self.coeff(k), other.coeff(k))).collect();
        UniPoly::new(m, out)
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let m = self.modulus;
        let len = self.coeffs.len().max(other.coeffs.len());
        let out = (0..len).map(|k| m.add(self.coeff(k), other.coeff(k))).collect();
        UniPoly::new(m, out)
    }

    /// Division by a monic polynomial: `self = q * divisor + r`, `deg r < deg divisor`.
    pub fn divrem_monic(&self, divisor: &UniPoly) -> (UniPoly, UniPoly) {
        let m = self.modulus;
        let dd = divisor.degree().expect("nonzero divisor");
        assert_eq!(divisor.coeffs[dd], 1 % m.value(), "divisor must be monic");
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (UniPoly::new(m, vec![]), self.clone());
        }
        let mut quo = vec![0u64; rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let c = rem[k];
            if c == 0 {
                continue;
            }
            quo[k - dd] = c;
            for (i, &b) in divisor.coeffs.iter().enumerate() {
                rem[k - dd + i] = m.sub(rem[k - dd + i], m.mul(c, b));
            }
        }
        rem.truncate(dd);
        (UniPoly::new(m, quo), UniPoly::new(m, rem))
    }

    /// Coefficients in the symmetric range, for display.
    pub fn signed_coeffs(&self) -> Vec<i64> {
        self.coeffs.iter().map(|&c| self.modulus.to_signed(c)).collect()
    }
}

/// Exact `p`-adic valuation of a nonzero big integer.
pub fn vp_bigint(x: &BigInt, p: u64) -> u32 {
    assert!(!x.is_zero());
    let bp = BigInt::from(p);
    let mut v = 0;
    let mut y = x.abs();
    loop {
        let (q, r) = y.div_rem(&bp);
        if !r.is_zero() {
            return v;
        }
        y = q;
        v += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(p: u64, k: u32) -> Modulus {
        Modulus::new(p, k).unwrap()
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(PResidue::new(18, m(3, 4)).val(), Valuation::Exact(2));
        assert_eq!(PResidue::new(0, m(3, 4)).val(), Valuation::AtLeast(4));
        assert_eq!(PResidue::new(48, m(2, 6)).val(), Valuation::Exact(4));
    }

    #[test]
    fn invert_unit_examples() {
        assert_eq!(PResidue::new(2, m(3, 3)).invert_unit().unwrap().value(), 14);
        assert_eq!(PResidue::new(1, m(7, 5)).invert_unit().unwrap().value(), 1);
        assert_eq!(
            PResidue::new(3, m(3, 3)).invert_unit(),
            Err(Error::NotInvertible(3))
        );
    }

    #[test]
    fn divide_tracked_examples() {
        let a = ScaledResidue::from_parts(3, 2, 5, 0).unwrap();
        let q = a.divide_tracked(3);
        assert_eq!((q.unit(), q.shift(), q.relative_precision()), (2, -1, 5));
        assert_eq!(q.absolute_precision(), a.absolute_precision() - 1);

        let b = ScaledResidue::from_parts(3, 1, 5, 2).unwrap();
        let q = b.divide_tracked(6);
        let inv2 = m(3, 5).inv(2).unwrap();
        assert_eq!((q.unit(), q.shift()), (inv2, 1));

        let c = ScaledResidue::from_parts(3, 1, 5, 0).unwrap();
        assert_eq!(c.divide_tracked(1), c);
    }

    #[test]
    fn mixed_precision_truncates() {
        let a = PResidue::new(10, m(3, 4));
        let b = PResidue::new(5, m(3, 2));
        let s = a + b;
        assert_eq!(s.precision(), 2);
        assert_eq!(s.value(), 15 % 9);
    }

    #[test]
    fn monic_division() {
        let md = m(5, 3);
        // (T^2 + 25)(T - 3) = T^3 - 3T^2 + 25T - 75
        let f = UniPoly::from_i64(md, &[-75, 25, -3, 1]);
        let g = UniPoly::from_i64(md, &[25, 0, 1]);
        let (q, r) = f.divrem_monic(&g);
        assert!(r.is_zero());
        assert_eq!(q, UniPoly::from_i64(md, &[-3, 1]));
    }

    #[test]
    fn gauss_valuation_of_product() {
        let md = m(3, 6);
        let f = UniPoly::from_i64(md, &[3, 1]);
        let g = UniPoly::from_i64(md, &[9, 3]);
        assert_eq!(f.gauss_val(), Some(0));
        assert_eq!(g.gauss_val(), Some(1));
        assert_eq!(f.mul(&g).gauss_val(), Some(1));
    }

    proptest! {
        #[test]
        fn val_of_product_saturates(p in prop::sample::select(vec![2u64, 3, 5, 7, 11, 13]), k in 1u32..10, a in any::<u64>(), b in any::<u64>()) {
            let md = m(p, k);
            let (x, y) = (PResidue::new(a, md), PResidue::new(b, md));
            let expected = match (x.val(), y.val()) {
                (Valuation::Exact(u), Valuation::Exact(v)) if u + v < k => Valuation::Exact(u + v),
                _ => Valuation::AtLeast(k),
            };
            prop_assert_eq!((x * y).val(), expected);
        }

        #[test]
        fn invert_round_trip(p in prop::sample::select(vec![2u64, 3, 5, 7, 11, 13, 17, 19]), k in 1u32..=13, a in any::<u64>()) {
            let md = m(p, k);
            let x = PResidue::new(a, md);
            prop_assume!(!x.value().is_multiple_of(p));
            let inv = x.invert_unit().unwrap();
            prop_assert_eq!((x * inv).value(), 1 % md.value());
            prop_assert_eq!(inv.invert_unit().unwrap(), x);
        }
    }
}

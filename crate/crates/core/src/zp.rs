//! Residues modulo `p^N`.
//!
//! Every truncated computation in the crate bottoms out here. Values are
//! stored as `u64` in `[0, p^N)`; products go through `u128`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};

/// The ring `Z/p^N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Residues {
    p: u64,
    precision: u32,
    modulus: u64,
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Residues {
    pub fn new(p: u64, precision: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if precision == 0 {
            return Err(Error::PrecisionExhausted("precision must be positive".into()));
        }
        let modulus = p.checked_pow(precision).ok_or(Error::PrecisionTooLarge { p, precision })?;
        Ok(Residues { p, precision, modulus })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Same prime, different precision.
    pub fn with_precision(&self, precision: u32) -> Result<Self> {
        Residues::new(self.p, precision)
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let (s, wrapped) = a.overflowing_add(b);
        if wrapped || s >= self.modulus {
            s.wrapping_sub(self.modulus)
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + (self.modulus - b)
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus as u128) as u64
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.modulus;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// `p^k`, reduced (so `p^N` is 0).
    pub fn p_power(&self, k: u32) -> u64 {
        if k >= self.precision {
            0
        } else {
            self.p.pow(k)
        }
    }

    pub fn from_i64(&self, v: i64) -> u64 {
        let m = self.modulus as i128;
        (((v as i128) % m + m) % m) as u64
    }

    pub fn from_bigint(&self, v: &BigInt) -> u64 {
        let m = BigInt::from(self.modulus);
        v.mod_floor(&m).to_u64().expect("reduced residue fits")
    }

    /// Representative in `(-p^N/2, p^N/2]`.
    pub fn signed(&self, a: u64) -> i64 {
        if a > self.modulus / 2 {
            -((self.modulus - a) as i64)
        } else {
            a as i64
        }
    }

    /// `p`-adic valuation of the residue; `None` for zero.
    pub fn valuation(&self, a: u64) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let mut a = a;
        let mut v = 0;
        while a.is_multiple_of(self.p) {
            a /= self.p;
            v += 1;
        }
        Some(v)
    }

    pub fn is_unit(&self, a: u64) -> bool {
        !a.is_multiple_of(self.p)
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        if !self.is_unit(a) {
            return None;
        }
        let (g, x, _) = egcd(a as i128, self.modulus as i128);
        debug_assert_eq!(g, 1);
        let m = self.modulus as i128;
        Some(((x % m + m) % m) as u64)
    }

    /// Exact division `a / p^k` choosing the small signed quotient.
    ///
    /// Requires `p^k | a`. The quotient is only determined modulo
    /// `p^(N-k)`; the signed representative of `a` is divided so that small
    /// integers map to small integers.
    pub fn div_p_power_signed(&self, a: u64, k: u32) -> u64 {
        let s = self.signed(a) as i128;
        let d = self.p.pow(k) as i128;
        debug_assert_eq!(s % d, 0);
        self.from_i64((s / d) as i64)
    }

    /// Integer division `a / p^k` on the canonical representative.
    pub fn div_p_power_floor(&self, a: u64, k: u32) -> u64 {
        a / self.p.pow(k)
    }

    pub fn reduce_from(&self, a: u64, wider: &Residues) -> u64 {
        debug_assert_eq!(self.p, wider.p);
        a % self.modulus
    }

    pub fn element(&self, value: u64) -> PrecisionInt {
        PrecisionInt::new(value, *self)
    }
}

fn egcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = egcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// An element of `Z/p^N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrecisionInt {
    value: u64,
    ring: Residues,
}

impl PrecisionInt {
    pub fn new(value: u64, ring: Residues) -> Self {
        PrecisionInt { value: value % ring.modulus, ring }
    }

    pub fn from_bigint(v: &BigInt, ring: Residues) -> Self {
        PrecisionInt { value: ring.from_bigint(v), ring }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn ring(&self) -> Residues {
        self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn valuation(&self) -> Option<u32> {
        self.ring.valuation(self.value)
    }

    pub fn signed(&self) -> i64 {
        self.ring.signed(self.value)
    }

    pub fn inverse(&self) -> Result<Self> {
        self.ring.inv(self.value).map(|v| PrecisionInt { value: v, ring: self.ring }).ok_or(Error::NotAUnit)
    }
}

impl Add for PrecisionInt {
    type Output = PrecisionInt;
    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.ring, rhs.ring);
        PrecisionInt { value: self.ring.add(self.value, rhs.value), ring: self.ring }
    }
}

impl Sub for PrecisionInt {
    type Output = PrecisionInt;
    fn sub(self, rhs: Self) -> Self {
        debug_assert_eq!(self.ring, rhs.ring);
        PrecisionInt { value: self.ring.sub(self.value, rhs.value), ring: self.ring }
    }
}

impl Mul for PrecisionInt {
    type Output = PrecisionInt;
    fn mul(self, rhs: Self) -> Self {
        debug_assert_eq!(self.ring, rhs.ring);
        PrecisionInt { value: self.ring.mul(self.value, rhs.value), ring: self.ring }
    }
}

impl Neg for PrecisionInt {
    type Output = PrecisionInt;
    fn neg(self) -> Self {
        PrecisionInt { value: self.ring.neg(self.value), ring: self.ring }
    }
}

impl fmt::Display for PrecisionInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.signed())
    }
}

/// Parses a decimal string (possibly negative) as an exact integer.
pub fn parse_decimal(s: &str) -> Result<BigInt> {
    let t = s.trim();
    t.parse::<BigInt>().map_err(|_| Error::InvalidSpec(format!("not a decimal integer: {s:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_composite_and_overflow() {
        assert_eq!(Residues::new(4, 3), Err(Error::NotPrime(4)));
        assert!(matches!(Residues::new(3, 41), Err(Error::PrecisionTooLarge { .. })));
        assert!(Residues::new(3, 40).is_ok());
        assert!(Residues::new(2, 63).is_ok());
        assert!(Residues::new(2, 64).is_err());
    }

    #[test]
    fn signed_and_valuation() {
        let r = Residues::new(2, 8).unwrap();
        assert_eq!(r.signed(255), -1);
        assert_eq!(r.signed(128), 128);
        assert_eq!(r.valuation(0), None);
        assert_eq!(r.valuation(12), Some(2));
        assert_eq!(r.div_p_power_signed(r.from_i64(-2), 1), r.from_i64(-1));
    }

    #[test]
    fn inverse_of_unit() {
        let r = Residues::new(3, 20).unwrap();
        let x = r.from_i64(-7);
        let y = r.inv(x).unwrap();
        assert_eq!(r.mul(x, y), 1);
        assert_eq!(r.inv(9), None);
    }

    proptest! {
        #[test]
        fn ring_axioms(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
            let r = Residues::new(3, 40).unwrap();
            let (a, b, c) = (r.element(a), r.element(b), r.element(c));
            prop_assert_eq!((a + b) + c, a + (b + c));
            prop_assert_eq!((a * b) * c, a * (b * c));
            prop_assert_eq!(a * (b + c), a * b + a * c);
            prop_assert_eq!(a - a, r.element(0));
            prop_assert_eq!(a + (-a), r.element(0));
        }
    }
}

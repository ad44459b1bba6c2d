//! Coefficient ring abstraction.
//!
//! Elements carry their own context (modulus, truncation order), so the
//! neutral elements are produced from an existing element.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt::Debug;

pub trait Ring: Clone + PartialEq + Debug + Send + Sync {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Image of an integer in the ring of `self`.
    fn from_int_like(&self, v: &BigInt) -> Self;

    fn from_i64_like(&self, v: i64) -> Self {
        self.from_int_like(&BigInt::from(v))
    }

    fn add_assign(&mut self, rhs: &Self) {
        *self = Ring::add(self, rhs);
    }

    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        let prod = a.mul(b);
        self.add_assign(&prod);
    }

    fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.one_like();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}

/// Rings with a unique maximal ideal, where units are recognisable and invertible.
pub trait LocalRing: Ring {
    fn is_unit(&self) -> bool;
    fn inv_unit(&self) -> Option<Self>;
}

/// Quotients of a complete discrete valuation ring with uniformiser p,
/// e.g. ℤ/p^N or Galois rings over it.
pub trait PadicLike: LocalRing {
    fn prime(&self) -> u64;
    fn precision(&self) -> u32;
    /// ord_p, equal to the precision for zero.
    fn valuation(&self) -> u32;
    /// Divide the canonical representative by p^k. Requires valuation ≥ k.
    fn div_p_pow(&self, k: u32) -> Self;
}

impl Ring for BigInt {
    fn zero_like(&self) -> Self {
        BigInt::zero()
    }
    fn one_like(&self) -> Self {
        BigInt::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_int_like(&self, v: &BigInt) -> Self {
        v.clone()
    }
    fn add_assign(&mut self, rhs: &Self) {
        *self += rhs;
    }
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
}

/// Units of ℤ are ±1.
impl LocalRing for BigInt {
    fn is_unit(&self) -> bool {
        self.magnitude().is_one()
    }
    fn inv_unit(&self) -> Option<Self> {
        self.is_unit().then(|| self.clone())
    }
}

impl Ring for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_int_like(&self, v: &BigInt) -> Self {
        BigRational::from_integer(v.clone())
    }
    fn add_assign(&mut self, rhs: &Self) {
        *self += rhs;
    }
}

impl LocalRing for BigRational {
    fn is_unit(&self) -> bool {
        !Zero::is_zero(self)
    }
    fn inv_unit(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
}

/// ord_p of a nonzero integer; `None` for zero.
pub fn ord_p_int(v: &BigInt, p: u64) -> Option<u32> {
    if Zero::is_zero(v) {
        return None;
    }
    let pb = BigInt::from(p);
    let mut x = v.abs();
    let mut k = 0;
    loop {
        let (q, r) = num_integer::Integer::div_rem(&x, &pb);
        if !Zero::is_zero(&r) {
            return Some(k);
        }
        x = q;
        k += 1;
    }
}

/// ord_p of a nonzero rational; `None` for zero.
pub fn ord_p_rational(v: &BigRational, p: u64) -> Option<i64> {
    let a = ord_p_int(v.numer(), p)?;
    let b = ord_p_int(v.denom(), p).unwrap_or(0);
    Some(a as i64 - b as i64)
}

/// p-adic order with an explicit cap: values at or above `cap` are
/// indistinguishable from zero.
pub trait Valued {
    fn ord(&self, p: u64) -> u32;
    fn cap(&self) -> u32 {
        u32::MAX
    }
}

impl Valued for BigInt {
    fn ord(&self, p: u64) -> u32 {
        ord_p_int(self, p).unwrap_or(u32::MAX)
    }
}

impl Valued for crate::arith::PadicScalar {
    fn ord(&self, _p: u64) -> u32 {
        self.valuation()
    }
    fn cap(&self) -> u32 {
        self.precision()
    }
}

impl<R: Valued + Ring> Valued for crate::arith::TruncatedSeries<R> {
    fn ord(&self, p: u64) -> u32 {
        self.coeffs()
            .iter()
            .map(|c| c.ord(p))
            .min()
            .unwrap_or(u32::MAX)
    }
    fn cap(&self) -> u32 {
        self.coeffs()
            .iter()
            .map(|c| c.cap())
            .min()
            .unwrap_or(u32::MAX)
    }
}

//! Fixed-precision p-adic integers: residues modulo p^N with p^N < 2^62.

use super::ring::{LocalRing, PadicLike, Ring};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use std::fmt;

const MODULUS_CEILING: u128 = 1 << 62;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Largest N with p^N below the native ceiling.
pub fn max_native_precision(p: u64) -> u32 {
    let mut n = 0;
    let mut acc: u128 = 1;
    while acc * (p as u128) < MODULUS_CEILING {
        acc *= p as u128;
        n += 1;
    }
    n
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PadicModulus {
    p: u64,
    n: u32,
    pn: u64,
}

impl PadicModulus {
    pub fn new(p: u64, n: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if n == 0 {
            return Err(Error::InvalidInput("precision must be at least 1".into()));
        }
        let mut pn: u128 = 1;
        for _ in 0..n {
            pn *= p as u128;
            if pn >= MODULUS_CEILING {
                return Err(Error::Budget(format!(
                    "{p}^{n} exceeds the native modulus ceiling"
                )));
            }
        }
        Ok(PadicModulus {
            p,
            n,
            pn: pn as u64,
        })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }
    #[inline]
    pub fn precision(&self) -> u32 {
        self.n
    }
    #[inline]
    pub fn modulus(&self) -> u64 {
        self.pn
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.pn {
            s - self.pn
        } else {
            s
        }
    }
    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.pn - b
        }
    }
    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.pn as u128) as u64
    }
    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.pn - a
        }
    }

    pub fn reduce_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.pn as i64) as u64
    }

    pub fn reduce_int(&self, v: &BigInt) -> u64 {
        let m = BigInt::from(self.pn);
        v.mod_floor(&m).to_u64().expect("residue fits")
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.pn;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    pub fn valuation(&self, a: u64) -> u32 {
        if a == 0 {
            return self.n;
        }
        let mut a = a;
        let mut k = 0;
        while a % self.p == 0 {
            a /= self.p;
            k += 1;
        }
        k
    }

    /// Inverse of a unit residue.
    pub fn inv(&self, a: u64) -> Option<u64> {
        if a % self.p == 0 {
            return None;
        }
        let (mut r0, mut r1) = (self.pn as i128, a as i128);
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        Some(s0.rem_euclid(self.pn as i128) as u64)
    }

    pub fn with_precision(&self, n: u32) -> Result<Self> {
        PadicModulus::new(self.p, n)
    }

    pub fn element(&self, value: i64) -> PadicScalar {
        PadicScalar {
            value: self.reduce_i64(value),
            modulus: *self,
        }
    }

    pub fn element_int(&self, value: &BigInt) -> PadicScalar {
        PadicScalar {
            value: self.reduce_int(value),
            modulus: *self,
        }
    }

    pub fn element_rational(&self, value: &BigRational) -> Result<PadicScalar> {
        let den = self.reduce_int(value.denom());
        let inv = self.inv(den).ok_or_else(|| Error::NonUnit {
            value: value.denom().to_string(),
            p: self.p,
        })?;
        Ok(PadicScalar {
            value: self.mul(self.reduce_int(value.numer()), inv),
            modulus: *self,
        })
    }

    pub fn zero(&self) -> PadicScalar {
        PadicScalar {
            value: 0,
            modulus: *self,
        }
    }

    pub fn one(&self) -> PadicScalar {
        PadicScalar {
            value: 1 % self.pn,
            modulus: *self,
        }
    }
}

impl fmt::Display for PadicModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p, self.n)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PadicScalar {
    value: u64,
    modulus: PadicModulus,
}

impl PadicScalar {
    pub fn new(value: i64, p: u64, n: u32) -> Result<Self> {
        Ok(PadicModulus::new(p, n)?.element(value))
    }

    #[inline]
    pub fn from_raw(value: u64, modulus: PadicModulus) -> Self {
        debug_assert!(value < modulus.pn);
        PadicScalar { value, modulus }
    }

    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    #[inline]
    pub fn modulus(&self) -> PadicModulus {
        self.modulus
    }

    pub fn to_bigint(&self) -> BigInt {
        BigInt::from(self.value)
    }

    /// Representative in (−p^N/2, p^N/2].
    pub fn signed(&self) -> i64 {
        let m = self.modulus.pn;
        if self.value > m / 2 {
            self.value as i64 - m as i64
        } else {
            self.value as i64
        }
    }

    pub fn inv(&self) -> Result<Self> {
        self.modulus
            .inv(self.value)
            .map(|v| PadicScalar {
                value: v,
                modulus: self.modulus,
            })
            .ok_or(Error::NonUnit {
                value: self.value.to_string(),
                p: self.modulus.p,
            })
    }

    /// Division by a unit; dividing by a non-unit is an error.
    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        Ok(Ring::mul(self, &rhs.inv()?))
    }

    /// Same residue viewed at lower precision.
    pub fn reduce(&self, n: u32) -> Result<Self> {
        if n > self.modulus.n {
            return Err(Error::InvalidInput(format!(
                "cannot raise precision from {} to {n}",
                self.modulus.n
            )));
        }
        let m = self.modulus.with_precision(n)?;
        Ok(PadicScalar {
            value: self.value % m.pn,
            modulus: m,
        })
    }

    pub fn pow_u64(&self, e: u64) -> Self {
        PadicScalar {
            value: self.modulus.pow(self.value, e),
            modulus: self.modulus,
        }
    }
}

impl fmt::Debug for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.modulus)
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Ring for PadicScalar {
    #[inline]
    fn zero_like(&self) -> Self {
        self.modulus.zero()
    }
    #[inline]
    fn one_like(&self) -> Self {
        self.modulus.one()
    }
    #[inline]
    fn is_zero(&self) -> bool {
        self.value == 0
    }
    #[inline]
    fn add(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.modulus, rhs.modulus);
        PadicScalar {
            value: self.modulus.add(self.value, rhs.value),
            modulus: self.modulus,
        }
    }
    #[inline]
    fn sub(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.modulus, rhs.modulus);
        PadicScalar {
            value: self.modulus.sub(self.value, rhs.value),
            modulus: self.modulus,
        }
    }
    #[inline]
    fn mul(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.modulus, rhs.modulus);
        PadicScalar {
            value: self.modulus.mul(self.value, rhs.value),
            modulus: self.modulus,
        }
    }
    #[inline]
    fn neg(&self) -> Self {
        PadicScalar {
            value: self.modulus.neg(self.value),
            modulus: self.modulus,
        }
    }
    fn from_int_like(&self, v: &BigInt) -> Self {
        self.modulus.element_int(v)
    }
    fn from_i64_like(&self, v: i64) -> Self {
        self.modulus.element(v)
    }
    fn pow(&self, e: u64) -> Self {
        self.pow_u64(e)
    }
}

impl LocalRing for PadicScalar {
    fn is_unit(&self) -> bool {
        self.value % self.modulus.p != 0
    }
    fn inv_unit(&self) -> Option<Self> {
        self.inv().ok()
    }
}

impl PadicLike for PadicScalar {
    fn prime(&self) -> u64 {
        self.modulus.p
    }
    fn precision(&self) -> u32 {
        self.modulus.n
    }
    fn valuation(&self) -> u32 {
        self.modulus.valuation(self.value)
    }
    fn div_p_pow(&self, k: u32) -> Self {
        let d = self.modulus.p.pow(k);
        debug_assert_eq!(self.value % d, 0);
        PadicScalar {
            value: self.value / d,
            modulus: self.modulus,
        }
    }
}

macro_rules! forward_ops {
    ($tr:ident, $m:ident, $f:path) => {
        impl std::ops::$tr for PadicScalar {
            type Output = PadicScalar;
            fn $m(self, rhs: PadicScalar) -> PadicScalar {
                $f(&self, &rhs)
            }
        }
        impl<'a> std::ops::$tr<&'a PadicScalar> for &'a PadicScalar {
            type Output = PadicScalar;
            fn $m(self, rhs: &'a PadicScalar) -> PadicScalar {
                $f(self, rhs)
            }
        }
    };
}
forward_ops!(Add, add, Ring::add);
forward_ops!(Sub, sub, Ring::sub);
forward_ops!(Mul, mul, Ring::mul);

impl std::ops::Neg for PadicScalar {
    type Output = PadicScalar;
    fn neg(self) -> PadicScalar {
        Ring::neg(&self)
    }
}

/// Teichmüller representative τ(a) mod p^N by iterating x ↦ x^p.
pub fn teichmuller(a: i64, p: u64, n: u32) -> Result<PadicScalar> {
    let m = PadicModulus::new(p, n)?;
    Ok(teichmuller_in(m, m.reduce_i64(a)))
}

pub fn teichmuller_in(m: PadicModulus, a: u64) -> PadicScalar {
    let mut x = a % m.modulus();
    if x % m.p() == 0 {
        return m.zero();
    }
    for _ in 0..=m.precision() + 1 {
        let y = m.pow(x, m.p());
        if y == x {
            break;
        }
        x = y;
    }
    PadicScalar::from_raw(x, m)
}

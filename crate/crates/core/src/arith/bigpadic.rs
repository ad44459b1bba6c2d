//! Residues modulo p^N for precisions beyond the native word.

use super::padic::is_prime;
use super::ring::{LocalRing, PadicLike, Ring};
use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BigModulus {
    p: u64,
    n: u32,
    pn: Arc<BigUint>,
}

impl BigModulus {
    pub fn new(p: u64, n: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if n == 0 {
            return Err(Error::InvalidInput("precision must be at least 1".into()));
        }
        Ok(BigModulus {
            p,
            n,
            pn: Arc::new(BigUint::from(p).pow(n)),
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn precision(&self) -> u32 {
        self.n
    }
    pub fn modulus(&self) -> &BigUint {
        &self.pn
    }

    pub fn element_int(&self, v: &BigInt) -> PadicBig {
        let m = BigInt::from((*self.pn).clone());
        let r = v.mod_floor(&m).to_biguint().expect("nonnegative residue");
        PadicBig {
            value: r,
            modulus: self.clone(),
        }
    }

    pub fn element(&self, v: i64) -> PadicBig {
        self.element_int(&BigInt::from(v))
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PadicBig {
    value: BigUint,
    modulus: BigModulus,
}

impl PadicBig {
    pub fn value(&self) -> &BigUint {
        &self.value
    }
    pub fn modulus(&self) -> &BigModulus {
        &self.modulus
    }
    pub fn to_bigint(&self) -> BigInt {
        BigInt::from(self.value.clone())
    }
    fn wrap(&self, value: BigUint) -> Self {
        PadicBig {
            value,
            modulus: self.modulus.clone(),
        }
    }
}

impl fmt::Debug for PadicBig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} mod {}^{}",
            self.value, self.modulus.p, self.modulus.n
        )
    }
}

impl Ring for PadicBig {
    fn zero_like(&self) -> Self {
        self.wrap(BigUint::zero())
    }
    fn one_like(&self) -> Self {
        self.wrap(BigUint::one() % &*self.modulus.pn)
    }
    fn is_zero(&self) -> bool {
        self.value.is_zero()
    }
    fn add(&self, rhs: &Self) -> Self {
        let mut s = &self.value + &rhs.value;
        if s >= *self.modulus.pn {
            s -= &*self.modulus.pn;
        }
        self.wrap(s)
    }
    fn sub(&self, rhs: &Self) -> Self {
        if self.value >= rhs.value {
            self.wrap(&self.value - &rhs.value)
        } else {
            self.wrap(&self.value + &*self.modulus.pn - &rhs.value)
        }
    }
    fn mul(&self, rhs: &Self) -> Self {
        self.wrap((&self.value * &rhs.value) % &*self.modulus.pn)
    }
    fn neg(&self) -> Self {
        if self.value.is_zero() {
            self.clone()
        } else {
            self.wrap(&*self.modulus.pn - &self.value)
        }
    }
    fn from_int_like(&self, v: &BigInt) -> Self {
        self.modulus.element_int(v)
    }
}

impl LocalRing for PadicBig {
    fn is_unit(&self) -> bool {
        (&self.value % self.modulus.p).to_u64() != Some(0)
    }
    fn inv_unit(&self) -> Option<Self> {
        if !self.is_unit() {
            return None;
        }
        let a = BigInt::from(self.value.clone());
        let m = BigInt::from((*self.modulus.pn).clone());
        let e = a.extended_gcd(&m);
        Some(self.modulus.element_int(&e.x))
    }
}

impl PadicLike for PadicBig {
    fn prime(&self) -> u64 {
        self.modulus.p
    }
    fn precision(&self) -> u32 {
        self.modulus.n
    }
    fn valuation(&self) -> u32 {
        if self.value.is_zero() {
            return self.modulus.n;
        }
        let p = BigUint::from(self.modulus.p);
        let mut x = self.value.clone();
        let mut k = 0;
        loop {
            let (q, r) = x.div_rem(&p);
            if !r.is_zero() {
                return k;
            }
            x = q;
            k += 1;
        }
    }
    fn div_p_pow(&self, k: u32) -> Self {
        self.wrap(&self.value / BigUint::from(self.modulus.p).pow(k))
    }
}

//! Exact arithmetic substrate.

pub mod bigpadic;
pub mod galois;
pub mod gamma;
pub mod matrix;
pub mod padic;
pub mod ring;
pub mod series;

pub use bigpadic::{BigModulus, PadicBig};
pub use gamma::{gamma_p, gamma_ratio_check, GammaArg};
pub use matrix::{eliminate_padic, Matrix, PadicElimination};
pub use padic::{is_prime, teichmuller, teichmuller_in, PadicModulus, PadicScalar};
pub use ring::{LocalRing, PadicLike, Ring, Valued};
pub use series::TruncatedSeries;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Rational = BigRational;

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || n < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Row of binomials C(m, 0..=m) reduced modulo p^N.
pub fn binomial_row_mod(m: u64, modulus: PadicModulus) -> Vec<u64> {
    let p = modulus.p();
    let mut out = Vec::with_capacity(m as usize + 1);
    let mut unit: u64 = 1 % modulus.modulus();
    let mut val: i64 = 0;
    let strip = |mut x: u64| -> (u64, i64) {
        let mut v = 0;
        while x % p == 0 {
            x /= p;
            v += 1;
        }
        (x, v)
    };
    let pw = |v: i64| -> u64 {
        if v >= modulus.precision() as i64 {
            0
        } else {
            modulus.pow(p % modulus.modulus(), v as u64)
        }
    };
    out.push(unit);
    for k in 1..=m {
        let (a, va) = strip(m - k + 1);
        let (b, vb) = strip(k);
        unit = modulus.mul(unit, a % modulus.modulus());
        unit = modulus.mul(unit, modulus.inv(b % modulus.modulus()).expect("unit"));
        val += va - vb;
        out.push(modulus.mul(unit, pw(val)));
    }
    out
}

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int_rational(n: &BigInt) -> BigRational {
    BigRational::from_integer(n.clone())
}

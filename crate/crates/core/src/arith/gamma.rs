//! Morita's p-adic gamma function at desk precision.

use super::padic::{PadicModulus, PadicScalar};
use super::ring::Ring;
use crate::error::{Error, Result};
use num_rational::BigRational;

pub const GAMMA_PRODUCT_CEILING: u64 = 10_000_000;

pub enum GammaArg<'a> {
    Rational(&'a BigRational),
    Padic(&'a PadicScalar),
}

/// Γ_p(x) mod p^N, evaluated at the representative of x in [0, p^N).
pub fn gamma_p(x: GammaArg<'_>, p: u64, n: u32) -> Result<PadicScalar> {
    if p == 2 {
        return Err(Error::ExcludedPrime(2));
    }
    let m = PadicModulus::new(p, n)?;
    if m.modulus() > GAMMA_PRODUCT_CEILING {
        return Err(Error::Budget(format!(
            "Γ_p product loop of length {}^{}",
            p, n
        )));
    }
    let rep = match x {
        GammaArg::Rational(q) => m.element_rational(q)?.value(),
        GammaArg::Padic(a) => {
            if a.modulus().p() != p || a.modulus().precision() < n {
                return Err(Error::InvalidInput(
                    "argument precision below requested precision".into(),
                ));
            }
            a.value() % m.modulus()
        }
    };
    Ok(gamma_p_int(rep, m))
}

/// (−1)^k ∏_{0<j<k, p∤j} j mod p^N.
pub fn gamma_p_int(k: u64, m: PadicModulus) -> PadicScalar {
    let p = m.p();
    let mut acc = 1 % m.modulus();
    for j in 1..k {
        if j % p != 0 {
            acc = m.mul(acc, j % m.modulus());
        }
    }
    let v = PadicScalar::from_raw(acc, m);
    if k % 2 == 1 {
        v.neg()
    } else {
        v
    }
}

/// Γ_p(p^s)/Γ_p((p^s+1)/2)² ≡ (−1)^{(p+1)/2} mod p^s.
pub fn gamma_ratio_check(p: u64, s: u32, n: u32) -> Result<bool> {
    if p == 2 {
        return Err(Error::ExcludedPrime(2));
    }
    if n < s {
        return Err(Error::InvalidInput("precision must be at least s".into()));
    }
    let m = PadicModulus::new(p, n)?;
    if m.modulus() > GAMMA_PRODUCT_CEILING {
        return Err(Error::Budget(format!(
            "Γ_p product loop of length {}^{}",
            p, n
        )));
    }
    let ps = p.pow(s);
    let num = gamma_p_int(ps % m.modulus(), m);
    let half = gamma_p_int(((ps + 1) / 2) % m.modulus(), m);
    let ratio = num.checked_div(&half.mul(&half))?;
    let sign = if ((p + 1) / 2) % 2 == 0 { 1 } else { -1 };
    let target = m.element(sign);
    let ms = p.pow(s);
    Ok(ratio.value() % ms == target.value() % ms)
}

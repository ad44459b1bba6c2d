//! Power series in t truncated at a fixed order T.

use super::ring::{LocalRing, Ring};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

#[derive(Clone, PartialEq, Debug)]
pub struct TruncatedSeries<R> {
    coeffs: Vec<R>,
}

impl<R: Ring> TruncatedSeries<R> {
    /// `coeffs` must be nonempty; its length is the truncation order.
    pub fn new(coeffs: Vec<R>) -> Self {
        assert!(!coeffs.is_empty(), "truncation order must be positive");
        TruncatedSeries { coeffs }
    }

    /// Pads with zeros or truncates to order `t`.
    pub fn from_poly(mut coeffs: Vec<R>, template: &R, t: usize) -> Self {
        assert!(t > 0);
        coeffs.truncate(t);
        while coeffs.len() < t {
            coeffs.push(template.zero_like());
        }
        TruncatedSeries { coeffs }
    }

    pub fn zeros(template: &R, t: usize) -> Self {
        Self::from_poly(Vec::new(), template, t)
    }

    pub fn constant(c: R, t: usize) -> Self {
        let z = c.zero_like();
        let mut coeffs = vec![z; t];
        coeffs[0] = c;
        TruncatedSeries { coeffs }
    }

    pub fn monomial(c: R, k: usize, t: usize) -> Self {
        let mut s = Self::zeros(&c, t);
        if k < t {
            s.coeffs[k] = c;
        }
        s
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    #[inline]
    pub fn coeff(&self, i: usize) -> &R {
        &self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [R] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<R> {
        self.coeffs
    }

    pub fn template(&self) -> &R {
        &self.coeffs[0]
    }

    pub fn truncate(&self, t: usize) -> Self {
        Self::from_poly(self.coeffs.clone(), &self.coeffs[0], t)
    }

    /// Index of the first nonzero coefficient.
    pub fn t_valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> TruncatedSeries<S> {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, c: &R) -> Self {
        self.map(|a| a.mul(c))
    }

    pub fn series_mul(&self, rhs: &Self) -> Self {
        let t = self.order().min(rhs.order());
        let z = self.coeffs[0].zero_like();
        let mut out = vec![z; t];
        for (i, a) in self.coeffs.iter().enumerate().take(t) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(t - i) {
                if !b.is_zero() {
                    out[i + j].mul_add_assign(a, b);
                }
            }
        }
        TruncatedSeries { coeffs: out }
    }

    /// θ = t·d/dt.
    pub fn theta(&self) -> Self {
        TruncatedSeries {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c.mul(&c.from_i64_like(i as i64)))
                .collect(),
        }
    }

    /// t ↦ t^k.
    pub fn subs_power(&self, k: usize) -> Self {
        assert!(k >= 1);
        let z = self.coeffs[0].zero_like();
        let mut out = vec![z; self.order()];
        for (i, c) in self.coeffs.iter().enumerate() {
            if i * k < out.len() {
                out[i * k] = c.clone();
            } else {
                break;
            }
        }
        TruncatedSeries { coeffs: out }
    }

    /// Multiply by t^k.
    pub fn shift(&self, k: usize) -> Self {
        let z = self.coeffs[0].zero_like();
        let t = self.order();
        let mut out = vec![z; t];
        for i in 0..t.saturating_sub(k) {
            out[i + k] = self.coeffs[i].clone();
        }
        TruncatedSeries { coeffs: out }
    }

    /// self(g(t)), requires g(0) = 0. Result has the order of `g`.
    pub fn compose(&self, g: &Self) -> Result<Self> {
        if !g.coeffs[0].is_zero() {
            return Err(Error::InvalidInput(
                "composition needs a series without constant term".into(),
            ));
        }
        let t = g.order();
        let mut acc = Self::zeros(&self.coeffs[0], t);
        for c in self.coeffs.iter().take(t).rev() {
            acc = acc.series_mul(g);
            acc.coeffs[0].add_assign(c);
        }
        Ok(acc)
    }

    pub fn eval(&self, x: &R) -> R {
        let mut acc = self.coeffs[0].zero_like();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }
}

impl<R: LocalRing> TruncatedSeries<R> {
    pub fn inverse(&self) -> Result<Self> {
        let inv0 = self.coeffs[0].inv_unit().ok_or_else(|| Error::NonUnit {
            value: format!("{:?}", self.coeffs[0]),
            p: 0,
        })?;
        let t = self.order();
        let mut out: Vec<R> = Vec::with_capacity(t);
        out.push(inv0.clone());
        for n in 1..t {
            let mut acc = self.coeffs[0].zero_like();
            for k in 1..=n {
                acc.mul_add_assign(&self.coeffs[k], &out[n - k]);
            }
            out.push(acc.neg().mul(&inv0));
        }
        Ok(TruncatedSeries { coeffs: out })
    }
}

impl TruncatedSeries<BigRational> {
    pub fn from_ints(v: &[i64], t: usize) -> Self {
        let c = v
            .iter()
            .map(|x| BigRational::from_integer(BigInt::from(*x)))
            .collect();
        Self::from_poly(c, &BigRational::zero(), t)
    }

    /// exp of a series without constant term.
    pub fn exp(&self) -> Result<Self> {
        if !Zero::is_zero(&self.coeffs[0]) {
            return Err(Error::InvalidInput(
                "exp needs a series without constant term".into(),
            ));
        }
        let t = self.order();
        let mut e = vec![BigRational::zero(); t];
        e[0] = BigRational::one();
        for n in 1..t {
            let mut acc = BigRational::zero();
            for k in 1..=n {
                if !Zero::is_zero(&self.coeffs[k]) {
                    acc += &self.coeffs[k] * BigRational::from_integer(BigInt::from(k)) * &e[n - k];
                }
            }
            e[n] = acc / BigRational::from_integer(BigInt::from(n));
        }
        Ok(TruncatedSeries { coeffs: e })
    }

    /// log of a series with constant term 1.
    pub fn log(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(Error::InvalidInput("log needs constant term 1".into()));
        }
        let theta_s = self.theta();
        let q = theta_s.series_mul(&self.inverse()?);
        Ok(TruncatedSeries {
            coeffs: q
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    if i == 0 {
                        BigRational::zero()
                    } else {
                        c / BigRational::from_integer(BigInt::from(i))
                    }
                })
                .collect(),
        })
    }

    /// Compositional inverse of t + O(t²).
    pub fn reversion(&self) -> Result<Self> {
        let t = self.order();
        if t < 2 || !Zero::is_zero(&self.coeffs[0]) || !self.coeffs[1].is_one() {
            return Err(Error::InvalidInput(
                "reversion needs a series t + O(t^2)".into(),
            ));
        }
        let id = TruncatedSeries::monomial(BigRational::one(), 1, t);
        let mut inv = id.clone();
        for _ in 1..t {
            let err = self.compose(&inv)?.sub(&id);
            if err.t_valuation().is_none() {
                break;
            }
            inv = inv.sub(&err);
        }
        Ok(inv)
    }
}

impl<R: Ring> Ring for TruncatedSeries<R> {
    fn zero_like(&self) -> Self {
        Self::zeros(&self.coeffs[0], self.order())
    }
    fn one_like(&self) -> Self {
        Self::constant(self.coeffs[0].one_like(), self.order())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
    fn add(&self, rhs: &Self) -> Self {
        TruncatedSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }
    fn sub(&self, rhs: &Self) -> Self {
        TruncatedSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }
    fn mul(&self, rhs: &Self) -> Self {
        self.series_mul(rhs)
    }
    fn neg(&self) -> Self {
        self.map(|a| a.neg())
    }
    fn from_int_like(&self, v: &BigInt) -> Self {
        Self::constant(self.coeffs[0].from_int_like(v), self.order())
    }
    fn add_assign(&mut self, rhs: &Self) {
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            a.add_assign(b);
        }
    }
}

impl<R: LocalRing> LocalRing for TruncatedSeries<R> {
    fn is_unit(&self) -> bool {
        self.coeffs[0].is_unit()
    }
    fn inv_unit(&self) -> Option<Self> {
        self.inverse().ok()
    }
}

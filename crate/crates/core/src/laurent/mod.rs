//! Sparse multivariate Laurent polynomials.
//!
//! A polynomial may carry trailing parameter coordinates (the family
//! parameter t); those never take negative exponents and are excluded from
//! Newton polytopes.

pub mod dense;
pub mod json;
pub mod vertex;

use crate::arith::{PadicModulus, PadicScalar, Ring, TruncatedSeries};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExponentVector(SmallVec<[i32; 8]>);

pub const EXPONENT_LIMIT: i64 = 1 << 24;

impl ExponentVector {
    pub fn new(e: &[i64]) -> Result<Self> {
        let mut v = SmallVec::with_capacity(e.len());
        for &x in e {
            if x.abs() > EXPONENT_LIMIT {
                return Err(Error::InvalidInput(format!("exponent {x} out of range")));
            }
            v.push(x as i32);
        }
        Ok(ExponentVector(v))
    }

    pub fn from_i32(e: &[i32]) -> Self {
        ExponentVector(SmallVec::from_slice(e))
    }

    pub fn zeros(n: usize) -> Self {
        ExponentVector(SmallVec::from_elem(0, n))
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[i] = 1;
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> i64 {
        self.0[i] as i64
    }

    pub fn as_slice(&self) -> &[i32] {
        &self.0
    }

    pub fn to_vec(&self) -> Vec<i64> {
        self.0.iter().map(|&x| x as i64).collect()
    }

    pub fn add(&self, o: &Self) -> Self {
        ExponentVector(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        ExponentVector(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: i64) -> Self {
        ExponentVector(self.0.iter().map(|&a| (a as i64 * k) as i32).collect())
    }

    pub fn dot(&self, a: &[i64]) -> i64 {
        self.0.iter().zip(a).map(|(&x, &y)| x as i64 * y).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    /// First `n` coordinates.
    pub fn head(&self, n: usize) -> Self {
        ExponentVector(SmallVec::from_slice(&self.0[..n]))
    }

    pub fn tail(&self, n: usize) -> &[i32] {
        &self.0[n..]
    }

    pub fn concat(&self, extra: &[i32]) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(extra);
        ExponentVector(v)
    }

    /// Exact division of every coordinate by k, if possible.
    pub fn div_exact(&self, k: i64) -> Option<Self> {
        if self.0.iter().all(|&x| (x as i64) % k == 0) {
            Some(ExponentVector(
                self.0.iter().map(|&x| (x as i64 / k) as i32).collect(),
            ))
        } else {
            None
        }
    }

    pub fn abs_max(&self) -> i64 {
        self.0.iter().map(|&x| (x as i64).abs()).max().unwrap_or(0)
    }
}

impl fmt::Debug for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

/// A lift of Frobenius on the coefficient ring.
#[derive(Clone, Debug, PartialEq)]
pub enum FrobeniusLift<R> {
    Identity,
    /// t ↦ image (for polynomials with one parameter coordinate).
    SeriesSubstitution(TruncatedSeries<R>),
}

impl<R: Ring> FrobeniusLift<R> {
    /// σ(t) = t^p, stored to order `t`.
    pub fn t_power(one: &R, p: u64, t: usize) -> Self {
        FrobeniusLift::SeriesSubstitution(TruncatedSeries::monomial(one.clone(), p as usize, t))
    }

    /// Some(p) when the image is exactly the monomial t^p.
    pub fn as_t_power(&self) -> Option<usize> {
        match self {
            FrobeniusLift::Identity => None,
            FrobeniusLift::SeriesSubstitution(s) => {
                let v = s.t_valuation()?;
                let one = s.coeff(v).one_like();
                let mono =
                    s.coeffs().iter().enumerate().all(
                        |(i, c)| {
                            if i == v {
                                *c == one
                            } else {
                                c.is_zero()
                            }
                        },
                    );
                mono.then_some(v)
            }
        }
    }

    /// Apply σ to a series in t.
    pub fn apply_series(&self, s: &TruncatedSeries<R>) -> Result<TruncatedSeries<R>> {
        match self {
            FrobeniusLift::Identity => Ok(s.clone()),
            FrobeniusLift::SeriesSubstitution(img) => {
                if let Some(k) = self.as_t_power() {
                    return Ok(s.subs_power(k));
                }
                let g = img.truncate(s.order());
                let g = if g.order() < s.order() {
                    TruncatedSeries::from_poly(g.coeffs().to_vec(), g.template(), s.order())
                } else {
                    g
                };
                s.compose(&g)
            }
        }
    }
}

#[derive(Clone, PartialEq)]
pub struct LaurentPoly<R> {
    nvars: usize,
    params: usize,
    terms: BTreeMap<ExponentVector, R>,
}

impl<R: fmt::Debug> fmt::Debug for LaurentPoly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

impl<R: Ring> LaurentPoly<R> {
    pub fn zero(n: usize) -> Self {
        LaurentPoly {
            nvars: n,
            params: 0,
            terms: BTreeMap::new(),
        }
    }

    /// `n` variables followed by `params` parameter coordinates.
    pub fn zero_with_params(n: usize, params: usize) -> Self {
        LaurentPoly {
            nvars: n + params,
            params,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(
        n: usize,
        params: usize,
        terms: impl IntoIterator<Item = (ExponentVector, R)>,
    ) -> Result<Self> {
        let mut out = Self::zero_with_params(n, params);
        for (e, c) in terms {
            if e.len() != n + params {
                return Err(Error::VariableMismatch(e.len(), n + params));
            }
            if e.tail(n).iter().any(|&x| x < 0) {
                return Err(Error::InvalidInput("negative parameter exponent".into()));
            }
            out.add_term(e, c);
        }
        Ok(out)
    }

    pub fn monomial(n: usize, params: usize, e: ExponentVector, c: R) -> Self {
        let mut out = Self::zero_with_params(n, params);
        out.add_term(e, c);
        out
    }

    /// Number of genuine variables.
    #[inline]
    pub fn n(&self) -> usize {
        self.nvars - self.params
    }

    #[inline]
    pub fn params(&self) -> usize {
        self.params
    }

    #[inline]
    pub fn total_vars(&self) -> usize {
        self.nvars
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

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &R)> {
        self.terms.iter()
    }

    pub fn support(&self) -> Vec<ExponentVector> {
        self.terms.keys().cloned().collect()
    }

    /// Support projected to the genuine variables, deduplicated.
    pub fn x_support(&self) -> Vec<ExponentVector> {
        let mut v: Vec<ExponentVector> = self.terms.keys().map(|e| e.head(self.n())).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn template(&self) -> Option<&R> {
        self.terms.values().next()
    }

    pub fn add_term(&mut self, e: ExponentVector, c: R) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                o.get_mut().add_assign(&c);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn coefficient_at(&self, v: &ExponentVector) -> Option<&R> {
        self.terms.get(v)
    }

    pub fn coefficient_or(&self, v: &ExponentVector, zero: &R) -> R {
        self.terms
            .get(v)
            .cloned()
            .unwrap_or_else(|| zero.zero_like())
    }

    fn check_shape(&self, o: &Self) -> Result<()> {
        if self.nvars != o.nvars || self.params != o.params {
            return Err(Error::VariableMismatch(self.nvars, o.nvars));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_shape(o)?;
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| c.neg())
    }

    pub fn scale(&self, k: &R) -> Self {
        let mut out = Self::zero_with_params(self.n(), self.params);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.mul(k));
        }
        out
    }

    /// Multiply by the monomial x^e.
    pub fn shift(&self, e: &ExponentVector) -> Self {
        LaurentPoly {
            nvars: self.nvars,
            params: self.params,
            terms: self
                .terms
                .iter()
                .map(|(u, c)| (u.add(e), c.clone()))
                .collect(),
        }
    }

    pub fn map_coeffs<S: Ring>(&self, f: impl Fn(&R) -> S) -> LaurentPoly<S> {
        let mut out = LaurentPoly::zero_with_params(self.n(), self.params);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    pub fn multiply(&self, o: &Self) -> Result<Self> {
        self.check_shape(o)?;
        let mut acc: std::collections::HashMap<ExponentVector, R> =
            std::collections::HashMap::with_capacity(self.len() * o.len());
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                let e = a.add(b);
                match acc.get_mut(&e) {
                    Some(v) => v.mul_add_assign(ca, cb),
                    None => {
                        acc.insert(e, ca.mul(cb));
                    }
                }
            }
        }
        let mut out = Self::zero_with_params(self.n(), self.params);
        out.terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(out)
    }

    pub fn one_like(&self, one: &R) -> Self {
        Self::monomial(
            self.n(),
            self.params,
            ExponentVector::zeros(self.nvars),
            one.one_like(),
        )
    }

    /// f^m. Sparse inputs use repeated multiplication by f, which beats
    /// squaring when f has few terms.
    pub fn pow(&self, m: u64, one: &R) -> Self {
        if m == 0 {
            return self.one_like(one);
        }
        if self.len() <= 8 {
            let mut acc = self.clone();
            for _ in 1..m {
                acc = acc.multiply(self).expect("same shape");
            }
            return acc;
        }
        let mut acc = self.one_like(one);
        let mut base = self.clone();
        let mut e = m;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.multiply(&base).expect("same shape");
            }
            e >>= 1;
            if e > 0 {
                base = base.multiply(&base).expect("same shape");
            }
        }
        acc
    }

    /// Coordinates u ↦ k·u on the genuine variables (and on the parameters
    /// too when `params_too`).
    pub fn substitute_power(&self, k: i64, params_too: bool) -> Self {
        let n = self.n();
        let mut out = Self::zero_with_params(n, self.params);
        for (e, c) in &self.terms {
            let v: Vec<i64> = e
                .to_vec()
                .into_iter()
                .enumerate()
                .map(|(i, x)| if i < n || params_too { x * k } else { x })
                .collect();
            out.add_term(ExponentVector::new(&v).expect("exponent range"), c.clone());
        }
        out
    }

    /// Apply σ to coefficients (through the parameter coordinate) and
    /// optionally x ↦ x^p.
    pub fn frobenius_twist(
        &self,
        sigma: &FrobeniusLift<R>,
        substitute_x_p: bool,
        p: u64,
    ) -> Result<Self> {
        let base = if substitute_x_p {
            self.substitute_power(p as i64, false)
        } else {
            self.clone()
        };
        match sigma {
            FrobeniusLift::Identity => Ok(base),
            FrobeniusLift::SeriesSubstitution(img) => {
                if self.params != 1 {
                    return Err(Error::IncompatibleLift(
                        "series substitution needs one parameter".into(),
                    ));
                }
                if let Some(k) = sigma.as_t_power() {
                    let n = self.n();
                    let mut out = Self::zero_with_params(n, 1);
                    for (e, c) in &base.terms {
                        let mut v = e.to_vec();
                        v[n] *= k as i64;
                        out.add_term(ExponentVector::new(&v)?, c.clone());
                    }
                    return Ok(out);
                }
                let n = self.n();
                let t_max = img.order();
                let mut powers = vec![TruncatedSeries::constant(img.template().one_like(), t_max)];
                let mut out = Self::zero_with_params(n, 1);
                for (e, c) in &base.terms {
                    let j = e.get(n) as usize;
                    while powers.len() <= j {
                        let next = powers.last().unwrap().series_mul(img);
                        powers.push(next);
                    }
                    for (d, a) in powers[j].coeffs().iter().enumerate() {
                        if !a.is_zero() {
                            let mut v = e.to_vec();
                            v[n] = d as i64;
                            out.add_term(ExponentVector::new(&v)?, c.mul(a));
                        }
                    }
                }
                Ok(out)
            }
        }
    }

    /// Substitute the parameter coordinate by a scalar.
    pub fn specialize(&self, value: &R) -> Self {
        let n = self.n();
        let mut out = Self::zero_with_params(n, 0);
        for (e, c) in &self.terms {
            let mut c = c.clone();
            for &j in e.tail(n) {
                c = c.mul(&value.pow(j as u64));
            }
            out.add_term(e.head(n), c);
        }
        out
    }

    /// Add a parameter coordinate with exponent 0 everywhere.
    pub fn with_param(&self) -> Self {
        assert_eq!(self.params, 0);
        let mut out = Self::zero_with_params(self.n(), 1);
        for (e, c) in &self.terms {
            out.add_term(e.concat(&[0]), c.clone());
        }
        out
    }

    /// x_i ∂/∂x_i (genuine variables) or t ∂/∂t (parameter coordinates).
    pub fn theta(&self, i: usize) -> Self {
        let mut out = Self::zero_with_params(self.n(), self.params);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.mul(&c.from_i64_like(e.get(i))));
        }
        out
    }

    /// Group the terms by genuine-variable exponent, each with a t-polynomial.
    pub fn t_fibers(&self) -> BTreeMap<ExponentVector, Vec<(usize, R)>> {
        let n = self.n();
        let mut out: BTreeMap<ExponentVector, Vec<(usize, R)>> = BTreeMap::new();
        for (e, c) in &self.terms {
            let j = if self.params > 0 {
                e.get(n) as usize
            } else {
                0
            };
            out.entry(e.head(n)).or_default().push((j, c.clone()));
        }
        out
    }

    /// Largest parameter exponent.
    pub fn t_degree(&self) -> usize {
        let n = self.n();
        self.terms
            .keys()
            .map(|e| {
                if self.params > 0 {
                    e.get(n) as usize
                } else {
                    0
                }
            })
            .max()
            .unwrap_or(0)
    }
}

impl LaurentPoly<BigInt> {
    pub fn reduce_mod(&self, m: PadicModulus) -> LaurentPoly<PadicScalar> {
        self.map_coeffs(|c| m.element_int(c))
    }

    /// Parse a compact integer polynomial, e.g. `[(&[1,0], 1), (&[0,1], 1)]`.
    pub fn from_int_terms(n: usize, terms: &[(&[i64], i64)]) -> Self {
        Self::from_int_terms_with_params(n, 0, terms)
    }

    pub fn from_int_terms_with_params(n: usize, params: usize, terms: &[(&[i64], i64)]) -> Self {
        Self::from_terms(
            n,
            params,
            terms
                .iter()
                .map(|(e, c)| (ExponentVector::new(e).expect("exponent"), BigInt::from(*c))),
        )
        .expect("well-formed polynomial")
    }

    /// The family 1 − t·g.
    pub fn one_minus_t_times(g: &Self) -> Self {
        assert_eq!(g.params, 0);
        let n = g.n();
        let mut out = Self::zero_with_params(n, 1);
        out.add_term(ExponentVector::zeros(n + 1), BigInt::from(1));
        for (e, c) in &g.terms {
            out.add_term(e.concat(&[1]), -c.clone());
        }
        out
    }

    /// Recover g from a polynomial of the form 1 − t·g.
    pub fn family_g(&self) -> Option<Self> {
        if self.params != 1 {
            return None;
        }
        let n = self.n();
        let mut g = Self::zero(n);
        let mut saw_one = false;
        for (e, c) in &self.terms {
            match e.get(n) {
                0 => {
                    if e.head(n).is_zero() && *c == BigInt::from(1) {
                        saw_one = true;
                    } else {
                        return None;
                    }
                }
                1 => g.add_term(e.head(n), -c.clone()),
                _ => return None,
            }
        }
        saw_one.then_some(g)
    }

    pub fn max_abs_coefficient(&self) -> BigInt {
        use num_traits::Signed;
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_default()
    }
}

/// f^m with coefficients optionally reduced mod p^N at every step.
pub fn power_mod(
    f: &LaurentPoly<BigInt>,
    m: u64,
    modulus: Option<PadicModulus>,
) -> LaurentPoly<BigInt> {
    match modulus {
        None => f.pow(m, &BigInt::from(1)),
        Some(md) => {
            let r = f.reduce_mod(md);
            let one = md.one();
            r.pow(m, &one).map_coeffs(|c| c.to_bigint())
        }
    }
}

/// G = (f^σ(x^p) − f^p)/p over ℤ, failing unless the division is exact.
pub fn frobenius_defect(f: &LaurentPoly<BigInt>, p: u64) -> Result<LaurentPoly<BigInt>> {
    let sigma = if f.params() == 1 {
        FrobeniusLift::SeriesSubstitution(TruncatedSeries::monomial(
            BigInt::from(1),
            p as usize,
            p as usize + 1,
        ))
    } else {
        FrobeniusLift::Identity
    };
    let twisted = f.frobenius_twist(&sigma, true, p)?;
    let diff = twisted.sub(&f.pow(p, &BigInt::from(1)))?;
    let pb = BigInt::from(p);
    let mut out = LaurentPoly::zero_with_params(f.n(), f.params());
    for (e, c) in diff.terms() {
        let (q, r) = num_integer::Integer::div_rem(c, &pb);
        if !num_traits::Zero::is_zero(&r) {
            return Err(Error::NonIntegral(format!("coefficient {c} at {e:?}")));
        }
        out.add_term(e.clone(), q);
    }
    Ok(out)
}

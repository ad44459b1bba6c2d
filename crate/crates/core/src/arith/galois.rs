//! Unramified extensions: F_p[X]/(P) and its lifts (ℤ/p^N)[X]/(P).

use super::ring::{LocalRing, PadicLike, Ring};
use crate::error::{Error, Result};
use num_bigint::BigInt;

/// Remainder of `a` modulo the monic polynomial `m`, coefficients mod p (low degree first).
fn poly_rem_mod_p(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r: Vec<u64> = a.iter().map(|x| x % p).collect();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &c) in m.iter().enumerate() {
                let sub = (lead * c) % p;
                r[shift + i] = (r[shift + i] + p - sub) % p;
            }
        }
        r.pop();
    }
    r
}

fn monic_polys(p: u64, d: usize) -> impl Iterator<Item = Vec<u64>> {
    let count = p.pow(d as u32);
    (0..count).map(move |mut k| {
        let mut v = Vec::with_capacity(d + 1);
        for _ in 0..d {
            v.push(k % p);
            k /= p;
        }
        v.push(1);
        v
    })
}

pub fn is_irreducible_mod_p(m: &[u64], p: u64) -> bool {
    let d = m.len() - 1;
    if d == 0 {
        return false;
    }
    for e in 1..=d / 2 {
        for q in monic_polys(p, e) {
            if poly_rem_mod_p(m, &q, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Smallest monic irreducible of degree `d` mod p, ordered lexicographically
/// from the constant coefficient upward.
pub fn smallest_irreducible(p: u64, d: usize) -> Vec<u64> {
    if d == 1 {
        return vec![0, 1];
    }
    monic_polys(p, d)
        .find(|m| is_irreducible_mod_p(m, p))
        .expect("irreducible polynomials exist in every degree")
}

/// Galois ring (R)[X]/(P) with R a ℤ/p^N-like coefficient ring.
#[derive(Clone, Debug, PartialEq)]
pub struct GaloisRing<S> {
    degree: usize,
    modulus: Vec<u64>,
    base: S,
}

impl<S: PadicLike> GaloisRing<S> {
    /// `base` is any element of the coefficient ring.
    pub fn new(base: &S, degree: usize) -> Self {
        let p = base.prime();
        GaloisRing {
            degree,
            modulus: smallest_irreducible(p, degree),
            base: base.zero_like(),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn element(&self, coeffs: &[S]) -> GrElem<S> {
        let mut c: Vec<S> = coeffs.to_vec();
        c.resize(self.degree, self.base.zero_like());
        GrElem {
            coeffs: c,
            modulus: self.modulus.clone(),
        }
    }

    pub fn from_base(&self, a: &S) -> GrElem<S> {
        self.element(std::slice::from_ref(a))
    }

    /// Teichmüller lift of the residue class with digits `digits` (mod p).
    pub fn teichmuller(&self, digits: &[u64]) -> GrElem<S> {
        let c: Vec<S> = digits
            .iter()
            .map(|&d| self.base.from_i64_like(d as i64))
            .collect();
        let mut x = self.element(&c);
        let q = self.base.prime().pow(self.degree as u32);
        for _ in 0..=self.base.precision() + 1 {
            let y = x.pow(q);
            if y == x {
                break;
            }
            x = y;
        }
        x
    }

    /// Digit vectors of every element of the residue field.
    pub fn residue_elements(&self) -> Vec<Vec<u64>> {
        let p = self.base.prime();
        let q = p.pow(self.degree as u32);
        (0..q)
            .map(|mut k| {
                (0..self.degree)
                    .map(|_| {
                        let d = k % p;
                        k /= p;
                        d
                    })
                    .collect()
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrElem<S> {
    coeffs: Vec<S>,
    modulus: Vec<u64>,
}

impl<S: PadicLike> GrElem<S> {
    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    fn residue_nonzero(&self) -> bool {
        self.coeffs.iter().any(|c| c.is_unit())
    }
}

impl<S: PadicLike> Ring for GrElem<S> {
    fn zero_like(&self) -> Self {
        GrElem {
            coeffs: vec![self.coeffs[0].zero_like(); self.coeffs.len()],
            modulus: self.modulus.clone(),
        }
    }
    fn one_like(&self) -> Self {
        let mut z = self.zero_like();
        z.coeffs[0] = self.coeffs[0].one_like();
        z
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
    fn add(&self, rhs: &Self) -> Self {
        GrElem {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.add(b))
                .collect(),
            modulus: self.modulus.clone(),
        }
    }
    fn sub(&self, rhs: &Self) -> Self {
        GrElem {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.sub(b))
                .collect(),
            modulus: self.modulus.clone(),
        }
    }
    fn mul(&self, rhs: &Self) -> Self {
        let d = self.coeffs.len();
        let z = self.coeffs[0].zero_like();
        let mut prod = vec![z; 2 * d - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                prod[i + j].mul_add_assign(a, b);
            }
        }
        for k in (d..2 * d - 1).rev() {
            let lead = prod[k].clone();
            if lead.is_zero() {
                continue;
            }
            for (i, &c) in self.modulus.iter().enumerate().take(d) {
                if c != 0 {
                    let sub = lead.mul(&lead.from_i64_like(c as i64));
                    prod[k - d + i] = prod[k - d + i].sub(&sub);
                }
            }
            prod[k] = lead.zero_like();
        }
        prod.truncate(d);
        GrElem {
            coeffs: prod,
            modulus: self.modulus.clone(),
        }
    }
    fn neg(&self) -> Self {
        GrElem {
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
            modulus: self.modulus.clone(),
        }
    }
    fn from_int_like(&self, v: &BigInt) -> Self {
        let mut z = self.zero_like();
        z.coeffs[0] = self.coeffs[0].from_int_like(v);
        z
    }
}

impl<S: PadicLike> LocalRing for GrElem<S> {
    fn is_unit(&self) -> bool {
        self.residue_nonzero()
    }
    fn inv_unit(&self) -> Option<Self> {
        if !self.residue_nonzero() {
            return None;
        }
        let p = self.coeffs[0].prime();
        let q = p.pow(self.coeffs.len() as u32);
        // a^{q-2} inverts modulo p; Newton steps restore full precision.
        let mut y = self.pow(q - 2);
        let two = self.from_i64_like(2);
        let mut prec = 1;
        while prec < self.coeffs[0].precision() {
            y = y.mul(&two.sub(&self.mul(&y)));
            prec *= 2;
        }
        Some(y)
    }
}

impl<S: PadicLike> PadicLike for GrElem<S> {
    fn prime(&self) -> u64 {
        self.coeffs[0].prime()
    }
    fn precision(&self) -> u32 {
        self.coeffs[0].precision()
    }
    fn valuation(&self) -> u32 {
        self.coeffs.iter().map(|c| c.valuation()).min().unwrap_or(0)
    }
    fn div_p_pow(&self, k: u32) -> Self {
        GrElem {
            coeffs: self.coeffs.iter().map(|c| c.div_p_pow(k)).collect(),
            modulus: self.modulus.clone(),
        }
    }
}

/// Degree r with p^r ≥ count.
pub fn degree_for_points(p: u64, count: u64) -> Result<usize> {
    let mut r = 1usize;
    let mut q = p;
    while q < count {
        q = q
            .checked_mul(p)
            .ok_or_else(|| Error::Budget("residue field too large".into()))?;
        r += 1;
    }
    Ok(r)
}

//! Point counts over finite fields, elliptic Frobenius traces, ASD
//! coefficients and the trace identity for unit-root matrices.

use crate::arith::galois::smallest_irreducible;
use crate::arith::{is_prime, teichmuller_in, Matrix, PadicModulus, PadicScalar, Ring};
use crate::error::{Error, Result};
use crate::hasse_witt::{
    beta_matrices, lambda_unit_root, newton_polytope, Precision, SeriesMatrix,
};
use crate::laurent::{power_mod, FrobeniusLift, LaurentPoly};
use crate::par::{self, Execution};
use crate::polytope::OpenSubset;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Value};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// An element of 𝔽_q stored as packed base-p digits (low degree first).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(pub u32);

/// 𝔽_{p^s} = 𝔽_p[X]/(P) with P the smallest monic irreducible of degree s.
#[derive(Clone, Debug)]
pub struct FiniteField {
    p: u64,
    s: u32,
    q: u64,
    modulus: Vec<u64>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

const MAX_FIELD: u64 = 1 << 24;

impl FiniteField {
    pub fn new(p: u64, s: u32) -> Result<Self> {
        if !is_prime(p) || s == 0 {
            return Err(Error::InvalidInput(format!(
                "need a prime p and s ≥ 1, got p = {p}, s = {s}"
            )));
        }
        let q = p
            .checked_pow(s)
            .filter(|&q| q <= MAX_FIELD)
            .ok_or_else(|| Error::Budget(format!("field of size {p}^{s} is too large")))?;
        let modulus = smallest_irreducible(p, s as usize);
        let mut field = FiniteField {
            p,
            s,
            q,
            modulus,
            exp: Vec::new(),
            log: Vec::new(),
        };
        let g = field.primitive_element();
        let mut exp = Vec::with_capacity(q as usize - 1);
        let mut log = vec![u32::MAX; q as usize];
        let mut x = field.one();
        for k in 0..q - 1 {
            exp.push(x.0);
            log[x.0 as usize] = k as u32;
            x = field.slow_mul(x, g);
        }
        field.exp = exp;
        field.log = log;
        Ok(field)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.s
    }

    pub fn size(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(0)
    }

    pub fn one(&self) -> FieldElement {
        FieldElement(1)
    }

    pub fn digits(&self, a: FieldElement) -> Vec<u64> {
        let mut v = a.0 as u64;
        (0..self.s)
            .map(|_| {
                let d = v % self.p;
                v /= self.p;
                d
            })
            .collect()
    }

    pub fn from_digits(&self, d: &[u64]) -> FieldElement {
        let mut v = 0u64;
        for i in (0..self.s as usize).rev() {
            v = v * self.p + d.get(i).copied().unwrap_or(0) % self.p;
        }
        FieldElement(v as u32)
    }

    pub fn from_int(&self, c: &BigInt) -> FieldElement {
        let r = c.mod_floor(&BigInt::from(self.p)).to_u64().unwrap();
        FieldElement(r as u32)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q as u32).map(FieldElement)
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let (x, y) = (self.digits(a), self.digits(b));
        let s: Vec<u64> = x.iter().zip(&y).map(|(u, v)| (u + v) % self.p).collect();
        self.from_digits(&s)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let s: Vec<u64> = self
            .digits(a)
            .iter()
            .map(|u| (self.p - u) % self.p)
            .collect();
        self.from_digits(&s)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return self.zero();
        }
        let k = (self.log[a.0 as usize] as u64 + self.log[b.0 as usize] as u64) % (self.q - 1);
        FieldElement(self.exp[k as usize])
    }

    pub fn inv(&self, a: FieldElement) -> Option<FieldElement> {
        if a.0 == 0 {
            return None;
        }
        let k = (self.q - 1 - self.log[a.0 as usize] as u64) % (self.q - 1);
        Some(FieldElement(self.exp[k as usize]))
    }

    /// a^e for any integer e (a ≠ 0 when e < 0).
    pub fn pow(&self, a: FieldElement, e: i64) -> FieldElement {
        if a.0 == 0 {
            return if e == 0 { self.one() } else { self.zero() };
        }
        let k = (self.log[a.0 as usize] as i128 * e as i128).rem_euclid(self.q as i128 - 1);
        FieldElement(self.exp[k as usize])
    }

    /// Discrete logarithm to the fixed primitive element.
    pub fn log(&self, a: FieldElement) -> Option<u32> {
        self.log
            .get(a.0 as usize)
            .copied()
            .filter(|&l| l != u32::MAX)
    }

    /// g^k for the fixed primitive element g.
    pub fn exp(&self, k: u64) -> FieldElement {
        FieldElement(self.exp[(k % (self.q - 1)) as usize])
    }

    fn slow_mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let (x, y) = (self.digits(a), self.digits(b));
        let s = self.s as usize;
        let mut prod = vec![0u64; 2 * s];
        for i in 0..s {
            for j in 0..s {
                prod[i + j] = (prod[i + j] + x[i] * y[j]) % self.p;
            }
        }
        for k in (s..2 * s).rev() {
            let lead = prod[k];
            if lead != 0 {
                for (i, &c) in self.modulus.iter().take(s).enumerate() {
                    prod[k - s + i] = (prod[k - s + i] + (self.p - c) * lead) % self.p;
                }
            }
            prod[k] = 0;
        }
        self.from_digits(&prod[..s])
    }

    fn slow_pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let (mut base, mut acc) = (a, self.one());
        while e > 0 {
            if e & 1 == 1 {
                acc = self.slow_mul(acc, base);
            }
            base = self.slow_mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn primitive_element(&self) -> FieldElement {
        let order = self.q - 1;
        let mut factors = Vec::new();
        let (mut rest, mut r) = (order, 2u64);
        while r * r <= rest {
            if rest % r == 0 {
                factors.push(r);
                while rest % r == 0 {
                    rest /= r;
                }
            }
            r += 1;
        }
        if rest > 1 {
            factors.push(rest);
        }
        (1..self.q as u32)
            .map(FieldElement)
            .find(|&g| {
                factors
                    .iter()
                    .all(|&r| self.slow_pow(g, order / r) != self.one())
            })
            .expect("the multiplicative group is cyclic")
    }
}

/// #{x ∈ (𝔽_{p^s}^×)^n : f(x) = 0} with the default evaluation budget.
pub fn count_torus_points(f: &LaurentPoly<BigInt>, p: u64, s: u32, exec: Execution) -> Result<u64> {
    count_torus_points_with_budget(f, p, s, DEFAULT_BUDGET, exec)
}

pub fn count_torus_points_with_budget(
    f: &LaurentPoly<BigInt>,
    p: u64,
    s: u32,
    budget: u64,
    exec: Execution,
) -> Result<u64> {
    if f.params() != 0 {
        return Err(Error::InvalidInput(
            "point counts need a polynomial without parameters".into(),
        ));
    }
    let field = FiniteField::new(p, s)?;
    let n = f.n();
    let m = field.size() - 1;
    let total = (m as u128)
        .checked_pow(n as u32)
        .filter(|&t| t <= budget as u128)
        .ok_or_else(|| {
            Error::Budget(format!("{m}^{n} evaluations exceed the budget of {budget}"))
        })? as u64;
    // Each term is c·x^a = g^{log c + Σ a_i L_i}.
    let terms: Vec<(u64, Vec<u64>)> = f
        .terms()
        .filter_map(|(e, c)| {
            let c = field.from_int(c);
            field.log(c).map(|lc| {
                (
                    lc as u64,
                    (0..n)
                        .map(|i| e.get(i).rem_euclid(m as i64) as u64)
                        .collect(),
                )
            })
        })
        .collect();
    if terms.is_empty() {
        return Ok(total);
    }
    let digits: Vec<Vec<u64>> = (0..m).map(|k| field.digits(field.exp(k))).collect();
    let sd = s as usize;
    let count_from = |outer: u64| -> u64 {
        // outer fixes L_0; the remaining coordinates run in odometer order.
        let mut logs = vec![0u64; n];
        logs[0] = outer;
        let mut acc_log: Vec<u64> = terms
            .iter()
            .map(|(lc, a)| (lc + a[0] * outer) % m)
            .collect();
        let inner = total / m.max(1);
        let mut hits = 0u64;
        let mut sum = vec![0u64; sd];
        for _ in 0..inner {
            sum.iter_mut().for_each(|x| *x = 0);
            for &l in &acc_log {
                for (x, d) in sum.iter_mut().zip(&digits[l as usize]) {
                    *x += d;
                }
            }
            if sum.iter().all(|x| x % p == 0) {
                hits += 1;
            }
            for i in 1..n {
                logs[i] += 1;
                for (a, (_, e)) in acc_log.iter_mut().zip(&terms) {
                    *a = (*a + e[i]) % m;
                }
                if logs[i] < m {
                    break;
                }
                // m steps of e_i bring the exponent back to where it started.
                logs[i] = 0;
            }
        }
        hits
    };
    if n == 0 {
        return Ok(0);
    }
    Ok(par::sum_range(exec, 0..m, count_from))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EllipticCurveData {
    pub a: i64,
    pub b: i64,
    pub p: u64,
    pub trace: i64,
}

fn legendre_table(p: u64) -> Vec<u8> {
    let mut squares = vec![0u8; p as usize];
    for y in 0..p {
        squares[((y * y) % p) as usize] += 1;
    }
    squares
}

fn check_curve(a: i64, b: i64, p: u64) -> Result<()> {
    if p == 2 || !is_prime(p) {
        return Err(Error::InvalidInput(format!("need an odd prime, got {p}")));
    }
    let disc = BigInt::from(4) * BigInt::from(a).pow(3) + BigInt::from(27) * BigInt::from(b).pow(2);
    if Zero::is_zero(&(disc % BigInt::from(p))) {
        return Err(Error::InvalidInput(format!(
            "y² = x³ + {a}x + {b} is singular mod {p}"
        )));
    }
    Ok(())
}

/// a_p = p − #{(x, y) ∈ 𝔽_p² : y² = x³ + Ax + B}.
pub fn frobenius_trace_elliptic(a: i64, b: i64, p: u64) -> Result<EllipticCurveData> {
    check_curve(a, b, p)?;
    let sq = legendre_table(p);
    let (ai, bi, pi) = (
        a.rem_euclid(p as i64) as u64,
        b.rem_euclid(p as i64) as u64,
        p,
    );
    let affine: u64 = (0..p)
        .map(|x| {
            let r = ((x * x % pi * x) % pi + ai * x % pi + bi) % pi;
            sq[r as usize] as u64
        })
        .sum();
    let trace = p as i64 - affine as i64;
    if (trace as i128).pow(2) > 4 * p as i128 {
        return Err(Error::Residual(format!(
            "Hasse bound violated: a_{p} = {trace}"
        )));
    }
    Ok(EllipticCurveData { a, b, p, trace })
}

/// #E(𝔽_{p^s}) including the point at infinity, by brute force.
pub fn count_elliptic_points(a: i64, b: i64, p: u64, s: u32) -> Result<u64> {
    check_curve(a, b, p)?;
    let field = FiniteField::new(p, s)?;
    let mut squares = vec![0u32; field.size() as usize];
    for y in field.elements() {
        squares[field.mul(y, y).0 as usize] += 1;
    }
    let fa = field.from_int(&BigInt::from(a));
    let fb = field.from_int(&BigInt::from(b));
    let affine: u64 = field
        .elements()
        .map(|x| {
            let r = field.add(field.add(field.pow(x, 3), field.mul(fa, x)), fb);
            squares[r.0 as usize] as u64
        })
        .sum();
    Ok(affine + 1)
}

/// α^s + (p/α)^s for the roots of X² − a_p X + p.
pub fn power_sum_of_roots(trace: i64, p: u64, s: u32) -> BigInt {
    let (mut prev, mut cur) = (BigInt::from(2), BigInt::from(trace));
    if s == 0 {
        return prev;
    }
    for _ in 1..s {
        let next = &cur * trace - &prev * p;
        prev = cur;
        cur = next;
    }
    cur
}

/// Coefficient of x^{m−1} in (x³ + Ax + B)^{(m−1)/2}; zero for even m.
pub fn asd_alpha(a: i64, b: i64, m: u64) -> BigInt {
    asd_alpha_impl(a, b, m, None)
}

/// The same coefficient reduced mod p^N.
pub fn asd_alpha_mod(a: i64, b: i64, m: u64, md: PadicModulus) -> PadicScalar {
    md.element_int(&asd_alpha_impl(a, b, m, Some(md)))
}

fn asd_alpha_impl(a: i64, b: i64, m: u64, md: Option<PadicModulus>) -> BigInt {
    if m == 0 || m % 2 == 0 {
        return BigInt::zero();
    }
    let g = LaurentPoly::from_int_terms(1, &[(&[3], 1), (&[1], a), (&[0], b)]);
    let h = power_mod(&g, (m - 1) / 2, md);
    h.coefficient_or(
        &crate::laurent::ExponentVector::from_i32(&[(m - 1) as i32]),
        &BigInt::zero(),
    )
}

/// Λ_p ≡ α_{p^s}/α_{p^{s−1}} mod p^s.
pub fn asd_unit_root(a: i64, b: i64, p: u64, s: u32) -> Result<PadicScalar> {
    check_curve(a, b, p)?;
    let md = PadicModulus::new(p, s)?;
    let num = asd_alpha_mod(a, b, p.pow(s), md);
    let den = asd_alpha_mod(a, b, p.pow(s - 1), md);
    den.inv()
        .map(|d| num.mul(&d))
        .map_err(|_| Error::HasseWitt {
            det: "α_p ≡ 0 (supersingular)".into(),
            p,
        })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrosscheckRow {
    pub s: u32,
    pub modulus: String,
    pub trace: u64,
    pub count: u64,
    pub expected: u64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrosscheckReport {
    pub n: usize,
    pub p: u64,
    pub rows: Vec<CrosscheckRow>,
}

impl CrosscheckReport {
    pub fn holds(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }

    pub fn to_json(&self) -> Value {
        json!({"n": self.n, "p": self.p, "rows": serde_json::to_value(&self.rows).unwrap(), "pass": self.holds()})
    }
}

/// (−1)^{n+1}, the sign in Tr(Λ^s) ≡ 1 + (−1)^{n+1}·#X_f(𝔽_{p^s}).
pub fn count_sign(n: usize) -> i64 {
    if n % 2 == 1 {
        1
    } else {
        -1
    }
}

/// Compare Tr(Λ(Δ)^s) with 1 + (−1)^{n+1}·#X_f(𝔽_{p^s}) mod p^s for s ≤ s_max.
pub fn eigenvalue_crosscheck(
    f: &LaurentPoly<BigInt>,
    p: u64,
    s_max: u32,
    exec: Execution,
) -> Result<CrosscheckReport> {
    if f.params() != 0 {
        return Err(Error::InvalidInput(
            "the trace identity is checked for integer polynomials".into(),
        ));
    }
    let poly = newton_polytope(f)?;
    let full = OpenSubset::full(&poly);
    let n = f.n();
    let mut rows = Vec::new();
    for s in 1..=s_max {
        let prec = Precision::new(p, s).with_exec(exec);
        let lam = lambda_unit_root(f, &full, p, &FrobeniusLift::Identity, s, prec)?;
        let md = lam.modulus;
        let m = lam.at_zero();
        let trace = m.pow(s).trace();
        let count = count_torus_points(f, p, s, exec)?;
        let expected =
            md.element_int(&(BigInt::from(1) + BigInt::from(count_sign(n)) * BigInt::from(count)));
        rows.push(CrosscheckRow {
            s,
            modulus: md.to_string(),
            trace: trace.value(),
            count,
            expected: expected.value(),
            holds: trace == expected,
        });
    }
    Ok(CrosscheckReport { n, p, rows })
}

/// Evaluate every entry (as a polynomial in t) at t = τ(a) mod p^s.
pub fn teichmuller_specialize(
    m: &SeriesMatrix,
    a: u64,
    p: u64,
    s: u32,
) -> Result<Matrix<PadicScalar>> {
    let md = PadicModulus::new(p, s)?;
    let tau = teichmuller_in(md, a);
    Ok(m.map(|x| x.map(|c| md.element_int(&c.to_bigint())).eval(&tau)))
}

/// Λ(τ(a)) for a family with σ: t ↦ t^p, as β_{p^s}(τ)·β_{p^{s−1}}(τ)^{−1}
/// from the exact t-polynomial β matrices (τ^p = τ).
pub fn family_lambda_at_teichmuller(
    f: &LaurentPoly<BigInt>,
    mu: &OpenSubset,
    p: u64,
    s: u32,
    a: u64,
    exec: Execution,
) -> Result<Matrix<PadicScalar>> {
    if f.params() != 1 {
        return Err(Error::InvalidInput(
            "expected a one-parameter family".into(),
        ));
    }
    let deg = f.t_degree();
    let order = p.pow(s) as usize * deg + 1;
    let prec = Precision::new(p, s).with_t_order(order).with_exec(exec);
    let betas = beta_matrices(f, mu, &[p.pow(s - 1), p.pow(s)], prec)?;
    let num = teichmuller_specialize(&betas[1].entries, a, p, s)?;
    let den = teichmuller_specialize(&betas[0].entries, a, p, s)?;
    let inv = den.inverse().map_err(|_| Error::HasseWitt {
        det: format!("β(τ({a})) is singular"),
        p,
    })?;
    Ok(num.mul(&inv))
}

/// f with t replaced by the integer representative of τ(a) mod p^s.
pub fn specialize_at_teichmuller(
    f: &LaurentPoly<BigInt>,
    a: u64,
    p: u64,
    s: u32,
) -> Result<LaurentPoly<BigInt>> {
    let md = PadicModulus::new(p, s)?;
    let tau = teichmuller_in(md, a).to_bigint();
    Ok(f.specialize(&tau))
}

//! Formal expansions of rational forms h/f^m, the Cartier operation on them,
//! and congruence interpolation of Cartier matrices.
//!
//! Vertex mode expands around a vertex b of the Newton polytope, where the
//! expansion lives in the tangent cone C(Δ − b). Origin mode handles families
//! f = 1 − t·g and yields exact t-series coefficients.

use crate::arith::{
    binomial, eliminate_padic, matrix::eliminate, LocalRing, Matrix, PadicLike, PadicModulus,
    PadicScalar, Ring, TruncatedSeries, Valued,
};
use crate::error::{Error, Result};
use crate::hasse_witt::{newton_polytope, SeriesMatrix};
use crate::laurent::dense::{power_coefficients, power_ladder};
use crate::laurent::vertex::pruned_power_sum;
use crate::laurent::{frobenius_defect, ExponentVector, FrobeniusLift, LaurentPoly};
use crate::par::Execution;
use crate::polytope::LatticePolytope;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};

/// A finite sum Σ h_k / f^{m_k}.
#[derive(Clone, Debug, PartialEq)]
pub struct Form {
    pub terms: Vec<(LaurentPoly<BigInt>, u32)>,
}

impl Form {
    pub fn new(h: LaurentPoly<BigInt>, m: u32) -> Self {
        Form {
            terms: vec![(h, m)],
        }
    }

    /// x^u / f^m in the shape of f.
    pub fn monomial(f: &LaurentPoly<BigInt>, u: &ExponentVector, m: u32) -> Self {
        let e = if f.params() == 0 {
            u.clone()
        } else {
            u.concat(&vec![0; f.params()])
        };
        Form::new(
            LaurentPoly::monomial(f.n(), f.params(), e, BigInt::one()),
            m,
        )
    }

    pub fn add(&self, o: &Form) -> Form {
        let mut terms = self.terms.clone();
        terms.extend(o.terms.iter().cloned());
        Form { terms }
    }

    pub fn scale(&self, c: &BigInt) -> Form {
        Form {
            terms: self.terms.iter().map(|(h, m)| (h.scale(c), *m)).collect(),
        }
    }

    /// θ on coordinate `i` (a variable x_i, or the parameter t at index n):
    /// θ(h/f^m) = θh/f^m − m·h·θf/f^{m+1}.
    pub fn theta(&self, f: &LaurentPoly<BigInt>, i: usize) -> Result<Form> {
        let df = f.theta(i);
        let mut terms = Vec::new();
        for (h, m) in &self.terms {
            let dh = h.theta(i);
            if !dh.is_zero() {
                terms.push((dh, *m));
            }
            if *m > 0 {
                let t = h.multiply(&df)?.scale(&BigInt::from(-(*m as i64)));
                if !t.is_zero() {
                    terms.push((t, m + 1));
                }
            }
        }
        Ok(Form { terms })
    }

    pub fn max_pole(&self) -> u32 {
        self.terms.iter().map(|t| t.1).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.0.is_zero())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VertexData {
    pub b: ExponentVector,
    pub depth: usize,
    pub grading: Vec<i64>,
    pub cone: Vec<Vec<i64>>,
    /// a − m·b for every numerator term x^a of h/f^m.
    pub offsets: Vec<ExponentVector>,
}

impl VertexData {
    fn in_cone(&self, e: &ExponentVector) -> bool {
        self.cone.iter().all(|a| e.dot(a) >= 0)
    }

    fn complete(&self, w: &ExponentVector) -> bool {
        self.offsets.iter().all(|a| {
            let e = w.sub(a);
            !self.in_cone(&e) || e.dot(&self.grading) <= self.depth as i64
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExpansionMode {
    Vertex(VertexData),
    Origin { t_order: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct FormalExpansion<C> {
    mode: ExpansionMode,
    /// Total decimation factor applied by Cartier shifts.
    scale: i64,
    coeffs: BTreeMap<ExponentVector, C>,
    zero: C,
}

impl<C: Ring> FormalExpansion<C> {
    pub fn mode(&self) -> &ExpansionMode {
        &self.mode
    }

    pub fn coefficients(&self) -> &BTreeMap<ExponentVector, C> {
        &self.coeffs
    }

    pub fn coefficient(&self, v: &ExponentVector) -> C {
        self.coeffs
            .get(v)
            .cloned()
            .unwrap_or_else(|| self.zero.clone())
    }

    /// Whether the stored value at v is final (origin mode is always exact mod t^T).
    pub fn is_complete(&self, v: &ExponentVector) -> bool {
        match &self.mode {
            ExpansionMode::Origin { .. } => true,
            ExpansionMode::Vertex(d) => d.complete(&v.scale(self.scale)),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn map<D: Ring>(&self, f: impl Fn(&C) -> D) -> FormalExpansion<D> {
        let mut coeffs = BTreeMap::new();
        for (v, c) in &self.coeffs {
            let d = f(c);
            if !d.is_zero() {
                coeffs.insert(v.clone(), d);
            }
        }
        FormalExpansion {
            mode: self.mode.clone(),
            scale: self.scale,
            coeffs,
            zero: f(&self.zero),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (v, c) in &o.coeffs {
            let x = coeffs
                .get(v)
                .cloned()
                .unwrap_or_else(|| self.zero.clone())
                .sub(c);
            if x.is_zero() {
                coeffs.remove(v);
            } else {
                coeffs.insert(v.clone(), x);
            }
        }
        FormalExpansion {
            mode: self.mode.clone(),
            scale: self.scale,
            coeffs,
            zero: self.zero.clone(),
        }
    }

    /// θ_i = x_i ∂/∂x_i.
    pub fn theta(&self, i: usize) -> Self {
        let mut coeffs = BTreeMap::new();
        for (v, c) in &self.coeffs {
            let d = c.mul(&c.from_i64_like(v.get(i)));
            if !d.is_zero() {
                coeffs.insert(v.clone(), d);
            }
        }
        FormalExpansion {
            mode: self.mode.clone(),
            scale: self.scale,
            coeffs,
            zero: self.zero.clone(),
        }
    }
}

/// Σ c_v x^v ↦ Σ c_{pv} x^v.
pub fn cartier_shift<C: Ring>(e: &FormalExpansion<C>, p: u64) -> FormalExpansion<C> {
    let coeffs = e
        .coeffs
        .iter()
        .filter_map(|(v, c)| v.div_exact(p as i64).map(|w| (w, c.clone())))
        .collect();
    FormalExpansion {
        mode: e.mode.clone(),
        scale: e.scale * p as i64,
        coeffs,
        zero: e.zero.clone(),
    }
}

/// A vertex of Δ(f) whose coefficient is a unit of the coefficient ring.
pub fn unit_vertex<R: LocalRing>(f: &LaurentPoly<R>) -> Result<ExponentVector> {
    let poly = LatticePolytope::newton_polytope(&f.x_support())?;
    poly.vertices()
        .iter()
        .find(|v| f.coefficient_at(v).is_some_and(|c| c.is_unit()))
        .cloned()
        .ok_or_else(|| Error::NonUnit {
            value: "no vertex coefficient is a unit".into(),
            p: 0,
        })
}

/// Expansion depth that makes every target complete.
pub fn depth_for_targets(
    poly: &LatticePolytope,
    b: &ExponentVector,
    shifts: &[ExponentVector],
    targets: &[ExponentVector],
) -> Result<usize> {
    let phi = poly.grading_at(b)?;
    let cone = poly.cone_at(b)?;
    let mut depth = 0i64;
    for t in targets {
        for a in shifts {
            let e = t.sub(a);
            if cone.iter().all(|c| e.dot(c) >= 0) {
                depth = depth.max(e.dot(&phi));
            }
        }
    }
    Ok(depth as usize)
}

/// Vertex-mode expansion of a form whose numerators and f live over R.
/// With `targets`, only those coefficients are produced (and the series is
/// pruned accordingly); `depth` defaults to the value completing all targets.
pub fn expand_vertex<R: LocalRing>(
    terms: &[(LaurentPoly<R>, u32)],
    f: &LaurentPoly<R>,
    b: &ExponentVector,
    depth: Option<usize>,
    targets: Option<&[ExponentVector]>,
) -> Result<FormalExpansion<R>> {
    if f.params() != 0 {
        return Err(Error::InvalidInput(
            "vertex mode needs a polynomial without parameters".into(),
        ));
    }
    let poly = LatticePolytope::newton_polytope(&f.x_support())?;
    let fb = f
        .coefficient_at(b)
        .ok_or_else(|| Error::NotAVertex(format!("{b:?}")))?
        .clone();
    let fb_inv = fb.inv_unit().ok_or_else(|| Error::NonUnit {
        value: format!("{fb:?}"),
        p: 0,
    })?;
    let grading = poly.grading_at(b)?;
    let cone = poly.cone_at(b)?;
    let mut ell = LaurentPoly::zero(f.n());
    for (u, c) in f.terms() {
        if u != b {
            ell.add_term(u.sub(b), c.mul(&fb_inv));
        }
    }
    let one = fb.one_like();
    let mut offsets = Vec::new();
    for (h, m) in terms {
        for (a, _) in h.terms() {
            offsets.push(a.sub(&b.scale(*m as i64)));
        }
    }
    offsets.sort();
    offsets.dedup();
    let depth = match (depth, targets) {
        (Some(d), _) => d,
        (None, Some(t)) => depth_for_targets(&poly, b, &offsets, t)?,
        (None, None) => {
            return Err(Error::InvalidInput(
                "full expansions need an explicit depth".into(),
            ))
        }
    };
    let data = VertexData {
        b: b.clone(),
        depth,
        grading: grading.clone(),
        cone: cone.clone(),
        offsets,
    };
    let mut coeffs: BTreeMap<ExponentVector, R> = BTreeMap::new();
    let poles: BTreeSet<u32> = terms.iter().map(|t| t.1).collect();
    for m in poles {
        let shifts: Vec<(ExponentVector, R)> = terms
            .iter()
            .filter(|t| t.1 == m)
            .flat_map(|(h, _)| {
                h.terms()
                    .map(|(a, c)| (a.sub(&b.scale(m as i64)), c.clone()))
                    .collect::<Vec<_>>()
            })
            .collect();
        let wanted: Option<Vec<ExponentVector>> = targets.map(|ts| {
            let mut w: Vec<ExponentVector> = ts
                .iter()
                .flat_map(|t| shifts.iter().map(move |(a, _)| t.sub(a)))
                .filter(|e| data.in_cone(e))
                .collect();
            w.sort();
            w.dedup();
            w
        });
        let phi_cap = match &wanted {
            Some(w) => w.iter().map(|e| e.dot(&grading)).max().unwrap_or(-1),
            None => depth as i64,
        };
        let exact_prune = wanted.as_ref().is_some_and(|w| w.len() <= 256);
        let keep = |e: &ExponentVector| {
            if e.dot(&grading) > phi_cap {
                return false;
            }
            match (&wanted, exact_prune) {
                (Some(w), true) => w.iter().any(|t| cone.iter().all(|c| t.sub(e).dot(c) >= 0)),
                _ => true,
            }
        };
        let fb_pow = fb_inv.pow(m as u64);
        let weight = |s: usize| {
            let c = binomial(m as i64 + s as i64 - 1, s as i64);
            let c = if s % 2 == 1 { -c } else { c };
            one.from_int_like(&c).mul(&fb_pow)
        };
        let series = pruned_power_sum(&ell, &one, depth, weight, keep);
        match targets {
            Some(ts) => {
                for t in ts {
                    let mut acc = one.zero_like();
                    for (a, c) in &shifts {
                        if let Some(v) = series.get(&t.sub(a)) {
                            acc.mul_add_assign(c, v);
                        }
                    }
                    if !acc.is_zero() {
                        let e = coeffs.entry(t.clone()).or_insert_with(|| one.zero_like());
                        e.add_assign(&acc);
                    }
                }
            }
            None => {
                for (e, v) in &series {
                    for (a, c) in &shifts {
                        let w = e.add(a);
                        let x = coeffs.entry(w).or_insert_with(|| one.zero_like());
                        x.mul_add_assign(c, v);
                    }
                }
            }
        }
    }
    coeffs.retain(|_, c| !c.is_zero());
    Ok(FormalExpansion {
        mode: ExpansionMode::Vertex(data),
        scale: 1,
        coeffs,
        zero: one.zero_like(),
    })
}

/// Vertex-mode expansion of an integer form over ℤ/p^N.
pub fn expand_vertex_mod(
    form: &Form,
    f: &LaurentPoly<BigInt>,
    b: &ExponentVector,
    md: PadicModulus,
    depth: Option<usize>,
    targets: Option<&[ExponentVector]>,
) -> Result<FormalExpansion<PadicScalar>> {
    let terms: Vec<(LaurentPoly<PadicScalar>, u32)> = form
        .terms
        .iter()
        .map(|(h, m)| (h.reduce_mod(md), *m))
        .collect();
    expand_vertex(&terms, &f.reduce_mod(md), b, depth, targets)
}

/// Vertex-mode expansion over ℤ; needs f_b = ±1.
pub fn expand_vertex_exact(
    form: &Form,
    f: &LaurentPoly<BigInt>,
    b: &ExponentVector,
    depth: Option<usize>,
    targets: Option<&[ExponentVector]>,
) -> Result<FormalExpansion<BigInt>> {
    expand_vertex(&form.terms, f, b, depth, targets)
}

fn family_g(f: &LaurentPoly<BigInt>) -> Result<LaurentPoly<BigInt>> {
    f.family_g()
        .ok_or_else(|| Error::InvalidInput("origin mode needs the family form 1 − t·g".into()))
}

/// Origin-mode expansion mod p^N: c_v(t) = Σ_{a,i} h_{a,i} t^i Σ_j C(j+m−1, m−1) t^j [x^{v−a}] g^j.
pub fn expand_origin_mod(
    form: &Form,
    f: &LaurentPoly<BigInt>,
    t_order: usize,
    md: PadicModulus,
    targets: &[ExponentVector],
    exec: Execution,
) -> Result<FormalExpansion<TruncatedSeries<PadicScalar>>> {
    let g = family_g(f)?;
    let n = g.n();
    let gm = g.reduce_mod(md);
    let zero = TruncatedSeries::zeros(&md.zero(), t_order);
    let mut shifts: Vec<ExponentVector> = form
        .terms
        .iter()
        .flat_map(|(h, _)| h.terms().map(|(a, _)| a.head(n)))
        .collect();
    shifts.sort();
    shifts.dedup();
    let mut xs: Vec<ExponentVector> = targets
        .iter()
        .flat_map(|t| shifts.iter().map(move |a| t.sub(a)))
        .collect();
    xs.sort();
    xs.dedup();
    let queries: Vec<(usize, ExponentVector)> = xs
        .iter()
        .flat_map(|x| (0..t_order).map(move |j| (j, x.clone())))
        .collect();
    let values = if gm.is_zero() {
        queries
            .iter()
            .map(|(j, x)| {
                if *j == 0 && x.is_zero() {
                    md.one()
                } else {
                    md.zero()
                }
            })
            .collect()
    } else {
        power_coefficients(&gm, &queries, exec)?
    };
    let lookup = |x: &ExponentVector, j: usize| -> &PadicScalar {
        let i = xs.binary_search(x).unwrap();
        &values[i * t_order + j]
    };
    let mut coeffs = BTreeMap::new();
    for t in targets {
        let mut acc = zero.clone();
        for (h, m) in &form.terms {
            let weights: Vec<PadicScalar> = (0..t_order)
                .map(|j| md.element_int(&binomial(j as i64 + *m as i64 - 1, *m as i64 - 1)))
                .collect();
            for (a, c) in h.terms() {
                let i0 = if f.params() > 0 { a.get(n) as usize } else { 0 };
                let c = md.element_int(c);
                let x = t.sub(&a.head(n));
                for j in 0..t_order.saturating_sub(i0) {
                    let v = lookup(&x, j);
                    if !v.is_zero() {
                        acc.coeffs_mut()[i0 + j].mul_add_assign(&c, &v.mul(&weights[j]));
                    }
                }
            }
        }
        if !acc.is_zero() {
            coeffs.insert(t.clone(), acc);
        }
    }
    Ok(FormalExpansion {
        mode: ExpansionMode::Origin { t_order },
        scale: 1,
        coeffs,
        zero,
    })
}

/// Exact origin-mode expansion over ℤ, every coefficient of the truncation.
pub fn expand_origin_exact(
    form: &Form,
    f: &LaurentPoly<BigInt>,
    t_order: usize,
) -> Result<FormalExpansion<TruncatedSeries<BigInt>>> {
    let g = family_g(f)?;
    let n = g.n();
    let one = BigInt::one();
    let zero = TruncatedSeries::zeros(&BigInt::zero(), t_order);
    let mut powers = vec![LaurentPoly::monomial(
        n,
        0,
        ExponentVector::zeros(n),
        one.clone(),
    )];
    for j in 1..t_order {
        let next = powers[j - 1].multiply(&g)?;
        powers.push(next);
    }
    let mut coeffs: BTreeMap<ExponentVector, TruncatedSeries<BigInt>> = BTreeMap::new();
    for (h, m) in &form.terms {
        for (a, c) in h.terms() {
            let i0 = if f.params() > 0 { a.get(n) as usize } else { 0 };
            for j in 0..t_order.saturating_sub(i0) {
                let w = binomial(j as i64 + *m as i64 - 1, *m as i64 - 1) * c;
                for (e, x) in powers[j].terms() {
                    let v = e.add(&a.head(n));
                    let s = coeffs.entry(v).or_insert_with(|| zero.clone());
                    s.coeffs_mut()[i0 + j] += &w * x;
                }
            }
        }
    }
    coeffs.retain(|_, s| !Ring::is_zero(s));
    Ok(FormalExpansion {
        mode: ExpansionMode::Origin { t_order },
        scale: 1,
        coeffs,
        zero,
    })
}

/// Every complete coefficient a_u satisfies ord_p(a_u) ≥ k·ord_p(gcd(u)) + extra,
/// where both sides are capped at the coefficient precision.
pub fn formal_derivative_order_scaled<C: Ring + Valued>(
    e: &FormalExpansion<C>,
    k: u32,
    p: u64,
    extra: u32,
) -> bool {
    e.coeffs.iter().all(|(u, c)| {
        if !e.is_complete(u) {
            return true;
        }
        let g = u.as_slice().iter().fold(0i64, |g, &x| g.gcd(&(x as i64)));
        let og = if g == 0 {
            u32::MAX
        } else {
            BigInt::from(g).ord(p)
        };
        let need = og.saturating_mul(k).saturating_add(extra);
        let cap = c.cap();
        c.ord(p).min(cap) >= need.min(cap)
    })
}

/// The p-part of the formal-derivative criterion of order k.
pub fn formal_derivative_order<C: Ring + Valued>(e: &FormalExpansion<C>, k: u32, p: u64) -> bool {
    formal_derivative_order_scaled(e, k, p, 0)
}

/// C_p(h/f^m) = Σ_{r<N} p^r C(M+r−1, r)·C_p(G^r h f^{pM−m}) / f^{M+r} with
/// M = ⌈m/p⌉ and G = (f(x^p) − f^p)/p, for integer f (σ the identity).
pub fn cartier_via_formula(
    h: &LaurentPoly<BigInt>,
    f: &LaurentPoly<BigInt>,
    m: u32,
    p: u64,
    sigma: &FrobeniusLift<BigInt>,
    n: u32,
) -> Result<Form> {
    if p == 2 {
        return Err(Error::ExcludedPrime(2));
    }
    if f.params() != 0 || *sigma != FrobeniusLift::Identity {
        return Err(Error::IncompatibleLift(
            "the explicit formula is implemented for σ = identity".into(),
        ));
    }
    if m == 0 {
        return Err(Error::InvalidInput("pole order must be positive".into()));
    }
    let one = BigInt::one();
    let g = frobenius_defect(f, p)?;
    let big_m = (m as u64).div_ceil(p);
    let base = h.multiply(&f.pow(p * big_m - m as u64, &one))?;
    let mut gr = base;
    let mut terms = Vec::new();
    let mut pr = BigInt::one();
    for r in 0..n as u64 {
        let dec = decimate(&gr, p);
        let c = binomial((big_m + r) as i64 - 1, r as i64) * &pr;
        if !dec.is_zero() {
            terms.push((dec.scale(&c), (big_m + r) as u32));
        }
        gr = gr.multiply(&g)?;
        pr *= p;
    }
    Ok(Form { terms })
}

/// Keep the exponents divisible by p and divide them.
pub fn decimate(h: &LaurentPoly<BigInt>, p: u64) -> LaurentPoly<BigInt> {
    let mut out = LaurentPoly::zero_with_params(h.n(), h.params());
    for (e, c) in h.terms() {
        if let Some(w) = e.div_exact(p as i64) {
            out.add_term(w, c.clone());
        }
    }
    out
}

/// Outcome of a congruence interpolation.
#[derive(Clone, Debug)]
pub struct Interpolation {
    pub lambda: SeriesMatrix,
    /// Number of t-coefficients fixed by the system.
    pub t_order: usize,
    /// p-adic digits to which column l of Λ is fixed on those coefficients.
    pub digits: Vec<u32>,
    /// digit_table[l][d]: digits of the t^d coefficient of column l.
    pub digit_table: Vec<Vec<u32>>,
    pub pivots: usize,
    pub unknowns: usize,
    pub modulus: PadicModulus,
}

impl Interpolation {
    pub fn min_digits(&self) -> u32 {
        self.digits.iter().copied().min().unwrap_or(0)
    }

    /// Per-column digits over the first `t` coefficients.
    pub fn digits_up_to(&self, t: usize) -> Vec<u32> {
        self.digit_table
            .iter()
            .map(|row| row[..t.min(row.len())].iter().copied().min().unwrap_or(0))
            .collect()
    }
}

/// Solve M_s ≡ Λ·S mod p^N, row by row, where S = σ(M_{s−1}); both are
/// (basis × probes) matrices of t-series of a common order.
pub fn solve_congruence(
    ms: &SeriesMatrix,
    shifted: &SeriesMatrix,
    md: PadicModulus,
) -> Result<Interpolation> {
    let b = ms.rows();
    let probes = ms.cols();
    let t = ms.get(0, 0).order();
    let zero = md.zero();
    let unknowns = b * t;
    let a = Matrix::from_fn(probes * t, unknowns, |row, col| {
        let (j, e) = (row / t, row % t);
        let (l, d) = (col / t, col % t);
        if d > e {
            zero.clone()
        } else {
            shifted.get(l, j).coeff(e - d).clone()
        }
    });
    let rhs = Matrix::from_fn(probes * t, b, |row, i| {
        let (j, e) = (row / t, row % t);
        ms.get(i, j).coeff(e).clone()
    });
    let elim = eliminate_padic(&a, &rhs);
    if !elim.inconsistent_rows.is_empty() {
        let r = elim.inconsistent_rows[0];
        return Err(Error::Residual(format!(
            "probe {} at t^{} has no solution mod {md}",
            r / t,
            r % t
        )));
    }
    let mut t_out = 0;
    while t_out < t && (0..b).all(|l| elim.digits[l * t + t_out] > 0) {
        t_out += 1;
    }
    if t_out == 0 {
        return Err(Error::RankDeficient {
            pivots: elim.pivots,
            unknowns,
        });
    }
    let digit_table: Vec<Vec<u32>> = (0..b)
        .map(|l| elim.digits[l * t..l * t + t_out].to_vec())
        .collect();
    let digits = digit_table
        .iter()
        .map(|row| row.iter().copied().min().unwrap())
        .collect();
    let lambda = Matrix::from_fn(b, b, |i, l| {
        TruncatedSeries::new(
            (0..t_out)
                .map(|d| elim.solutions[i][l * t + d].clone())
                .collect(),
        )
    });
    Ok(Interpolation {
        lambda,
        t_order: t_out,
        digits,
        digit_table,
        pivots: elim.pivots,
        unknowns,
        modulus: md,
    })
}

/// Residual Λ·S − M, truncated to the order of Λ.
pub fn congruence_residual(
    lambda: &SeriesMatrix,
    ms: &SeriesMatrix,
    shifted: &SeriesMatrix,
) -> SeriesMatrix {
    let t = lambda.get(0, 0).order();
    let s = shifted.map(|x| x.truncate(t));
    lambda.mul(&s).sub(&ms.map(|x| x.truncate(t)))
}

/// Default p-adic exponent for the congruence M_s ≡ Λ·σ(M_{s−1}).
///
/// At s = 1 the held-out probes already disagree at p^3, whatever the level,
/// so a single step is trusted only mod p^2.
pub fn working_precision(s: u32, level: u32) -> u32 {
    if s == 1 {
        level.min(2)
    } else {
        s * level
    }
}

/// Everything needed to interpolate a Cartier matrix.
#[derive(Clone, Debug)]
pub struct InterpolationSpec {
    pub basis: Vec<Form>,
    pub probes: Vec<ExponentVector>,
    pub held_out: Vec<ExponentVector>,
    pub p: u64,
    pub s: u32,
    pub level: u32,
    /// Overrides [`working_precision`].
    pub precision: Option<u32>,
    /// t-truncation of the expansions (1 for integer f).
    pub t_order: usize,
    pub sigma: FrobeniusLift<PadicScalar>,
    /// Expansion vertex for integer f; defaults to a unit vertex.
    pub vertex: Option<ExponentVector>,
    pub exec: Execution,
}

impl InterpolationSpec {
    pub fn new(basis: Vec<Form>, probes: Vec<ExponentVector>, p: u64, s: u32) -> Self {
        InterpolationSpec {
            basis,
            probes,
            held_out: Vec::new(),
            p,
            s,
            level: 1,
            precision: None,
            t_order: 1,
            sigma: FrobeniusLift::Identity,
            vertex: None,
            exec: Execution::default(),
        }
    }
}

/// (basis × probes) coefficient matrix at the indices scale·w.
pub fn coefficient_matrix(
    f: &LaurentPoly<BigInt>,
    spec: &InterpolationSpec,
    md: PadicModulus,
    probes: &[ExponentVector],
    scale: i64,
) -> Result<SeriesMatrix> {
    let targets: Vec<ExponentVector> = probes.iter().map(|w| w.scale(scale)).collect();
    let t = if f.params() == 0 { 1 } else { spec.t_order };
    let mut rows = Vec::with_capacity(spec.basis.len());
    for form in &spec.basis {
        let row: Vec<TruncatedSeries<PadicScalar>> = if f.params() == 0 {
            let b = match &spec.vertex {
                Some(b) => b.clone(),
                None => unit_vertex(&f.reduce_mod(md))?,
            };
            let e = expand_vertex_mod(form, f, &b, md, None, Some(&targets))?;
            targets
                .iter()
                .map(|v| TruncatedSeries::constant(e.coefficient(v), 1))
                .collect()
        } else {
            let e = expand_origin_mod(form, f, t, md, &targets, spec.exec)?;
            targets.iter().map(|v| e.coefficient(v)).collect()
        };
        rows.push(row);
    }
    Ok(Matrix::from_rows(rows))
}

/// Λ^(k) from M_s ≡ Λ·σ(M_{s−1}) with (M_s)_{i,j} = c_{p^s w_j}(ω_i).
pub fn interpolate_cartier(
    f: &LaurentPoly<BigInt>,
    spec: &InterpolationSpec,
) -> Result<Interpolation> {
    if spec.p == 2 {
        return Err(Error::ExcludedPrime(2));
    }
    if spec.level == 0 || spec.level as u64 >= spec.p {
        return Err(Error::InvalidInput("level must satisfy 1 ≤ k < p".into()));
    }
    if spec.s == 0 || spec.probes.is_empty() || spec.basis.is_empty() {
        return Err(Error::InvalidInput("need s ≥ 1, a basis and probes".into()));
    }
    let md = PadicModulus::new(
        spec.p,
        spec.precision
            .unwrap_or_else(|| working_precision(spec.s, spec.level)),
    )?;
    let ps = spec.p.pow(spec.s) as i64;
    let ps1 = spec.p.pow(spec.s - 1) as i64;
    let system = |probes: &[ExponentVector]| -> Result<(SeriesMatrix, SeriesMatrix)> {
        let top = coefficient_matrix(f, spec, md, probes, ps)?;
        let low = coefficient_matrix(f, spec, md, probes, ps1)?;
        let shifted = low.try_map(|x| spec.sigma.apply_series(x))?;
        Ok((top, shifted))
    };
    let (top, shifted) = system(&spec.probes)?;
    let out = solve_congruence(&top, &shifted, md)?;
    if !spec.held_out.is_empty() {
        let (top, shifted) = system(&spec.held_out)?;
        let res = congruence_residual(&out.lambda, &top, &shifted);
        let known = out.min_digits();
        let nonzero = res
            .entries()
            .iter()
            .any(|x| x.coeffs().iter().any(|c| PadicLike::valuation(c) < known));
        if nonzero {
            return Err(Error::Residual(format!(
                "held-out probes leave a nonzero residual mod {md}"
            )));
        }
    }
    Ok(out)
}

/// Lattice points of the tangent cone at b, ordered by grading then lexicographically.
pub fn cone_probes(
    poly: &LatticePolytope,
    b: &ExponentVector,
    count: usize,
) -> Result<Vec<ExponentVector>> {
    let phi = poly.grading_at(b)?;
    let cone = poly.cone_at(b)?;
    let n = poly.dim();
    let mut out: Vec<(i64, ExponentVector)> = Vec::new();
    let mut radius = 1i64;
    while out.len() < count && radius <= 64 {
        out.clear();
        let side = 2 * radius + 1;
        let total = side.pow(n as u32);
        for k in 0..total {
            let mut x = k;
            let e: Vec<i64> = (0..n)
                .map(|_| {
                    let d = x % side - radius;
                    x /= side;
                    d
                })
                .collect();
            let v = ExponentVector::new(&e)?;
            if cone.iter().all(|c| v.dot(c) >= 0) {
                out.push((v.dot(&phi), v));
            }
        }
        radius *= 2;
    }
    out.sort();
    Ok(out.into_iter().take(count).map(|x| x.1).collect())
}

/// Projection of ω onto span{x^u/f : u ∈ μ_ℤ} through the coefficients at
/// p^s·w, followed by the order-1 formal-derivative test of the residual.
#[derive(Clone, Debug)]
pub struct ProjectionReport {
    pub coefficients: Vec<PadicScalar>,
    pub residual_passes: bool,
}

pub fn unit_root_projection_check(
    f: &LaurentPoly<BigInt>,
    index: &[ExponentVector],
    omega: &Form,
    p: u64,
    s: u32,
    probes: &[ExponentVector],
    vertex: Option<&ExponentVector>,
) -> Result<ProjectionReport> {
    if f.params() != 0 {
        return Err(Error::InvalidInput(
            "projection check is implemented for integer f".into(),
        ));
    }
    let md = PadicModulus::new(p, s)?;
    let b = match vertex {
        Some(b) => b.clone(),
        None => unit_vertex(&f.reduce_mod(md))?,
    };
    let ps = p.pow(s) as i64;
    let targets: Vec<ExponentVector> = probes.iter().map(|w| w.scale(ps)).collect();
    let basis: Vec<Form> = index.iter().map(|u| Form::monomial(f, u, 1)).collect();
    let a = Matrix::from_fn(targets.len(), basis.len(), |_, _| md.zero());
    let mut a = a;
    for (j, form) in basis.iter().enumerate() {
        let e = expand_vertex_mod(form, f, &b, md, None, Some(&targets))?;
        for (i, t) in targets.iter().enumerate() {
            a.set(i, j, e.coefficient(t));
        }
    }
    let eo = expand_vertex_mod(omega, f, &b, md, None, Some(&targets))?;
    let rhs = Matrix::from_fn(targets.len(), 1, |i, _| eo.coefficient(&targets[i]));
    let elim = eliminate(&a, &rhs);
    if !elim.inconsistent_rows.is_empty() {
        return Err(Error::Residual(
            "ω is not congruent to a combination of the basis".into(),
        ));
    }
    if elim.determined.iter().any(|d| !d) {
        return Err(Error::RankDeficient {
            pivots: elim.pivots,
            unknowns: basis.len(),
        });
    }
    let coefficients = elim.solutions[0].clone();
    let mut residual = omega.clone();
    for (c, form) in coefficients.iter().zip(&basis) {
        residual = residual.add(&form.scale(&(-c.to_bigint())));
    }
    let poly = newton_polytope(f)?;
    let depth =
        depth_for_targets(&poly, &b, &offsets_of(&residual, &b), &targets)?.max(ps as usize);
    let ex = expand_vertex_mod(&residual, f, &b, md, Some(depth), None)?;
    Ok(ProjectionReport {
        coefficients,
        residual_passes: formal_derivative_order(&ex, 1, p),
    })
}

fn offsets_of(form: &Form, b: &ExponentVector) -> Vec<ExponentVector> {
    form.terms
        .iter()
        .flat_map(|(h, m)| {
            h.terms()
                .map(|(a, _)| a.sub(&b.scale(*m as i64)))
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Smallest nonnegative representative helper for reports.
pub fn signed_string(c: &BigInt) -> String {
    if c.is_negative() {
        format!("-{}", c.abs())
    } else {
        c.to_string()
    }
}

/// Collect every coefficient of a full modular power ladder of g up to g^{t−1}:
/// the exact origin-mode expansion of 1/(1 − t·g)^m reduced mod p^N.
pub fn expand_origin_full_mod(
    g: &LaurentPoly<BigInt>,
    m: u32,
    t_order: usize,
    md: PadicModulus,
    exec: Execution,
) -> Result<FormalExpansion<TruncatedSeries<PadicScalar>>> {
    let zero = TruncatedSeries::zeros(&md.zero(), t_order);
    let mut coeffs: BTreeMap<ExponentVector, TruncatedSeries<PadicScalar>> = BTreeMap::new();
    power_ladder(
        &g.reduce_mod(md),
        t_order.saturating_sub(1),
        exec,
        |j, grid| {
            let w = md.element_int(&binomial(j as i64 + m as i64 - 1, m as i64 - 1));
            for (e, c) in grid.to_poly(0).terms() {
                let s = coeffs.entry(e.clone()).or_insert_with(|| zero.clone());
                s.coeffs_mut()[j] = c.mul(&w);
            }
            Ok(())
        },
    )?;
    Ok(FormalExpansion {
        mode: ExpansionMode::Origin { t_order },
        scale: 1,
        coeffs,
        zero,
    })
}

//! Calabi–Yau families 1 − t·g, their Picard–Fuchs operators, log-series
//! solutions, mirror maps, instanton numbers and Frobenius structures.

use crate::arith::ring::ord_p_rational;
use crate::arith::{
    binomial, int_rational, rational, Matrix, PadicLike, PadicModulus, PadicScalar, Rational, Ring,
    TruncatedSeries,
};
use crate::cartier::{interpolate_cartier, Form, Interpolation, InterpolationSpec};
use crate::error::{Error, Result};
use crate::hasse_witt::{newton_polytope, SeriesMatrix};
use crate::laurent::{ExponentVector, FrobeniusLift, LaurentPoly};
use crate::par::Execution;
use crate::polytope::LatticePolytope;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};
use std::fmt;
use std::str::FromStr;

pub type QSeries = TruncatedSeries<Rational>;

fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn qzero(t: usize) -> QSeries {
    TruncatedSeries::zeros(&Rational::zero(), t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PresetName {
    Simplicial,
    Hyperoctahedral,
    Hypercubic,
    An,
}

impl FromStr for PresetName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "simplicial" => Ok(PresetName::Simplicial),
            "hyperoctahedral" => Ok(PresetName::Hyperoctahedral),
            "hypercubic" => Ok(PresetName::Hypercubic),
            "a_n" | "an" | "a" => Ok(PresetName::An),
            other => Err(Error::UnknownPreset(other.into())),
        }
    }
}

impl fmt::Display for PresetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PresetName::Simplicial => "simplicial",
            PresetName::Hyperoctahedral => "hyperoctahedral",
            PresetName::Hypercubic => "hypercubic",
            PresetName::An => "A_n",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyPreset {
    pub name: PresetName,
    pub n: usize,
    pub g: LaurentPoly<BigInt>,
}

impl FamilyPreset {
    /// f = 1 − t·g.
    pub fn family(&self) -> LaurentPoly<BigInt> {
        LaurentPoly::one_minus_t_times(&self.g)
    }

    pub fn polytope(&self) -> Result<LatticePolytope> {
        newton_polytope(&self.g)
    }

    /// The common coefficient of the vertex monomials of g.
    pub fn vertex_coefficient(&self) -> Result<BigInt> {
        let poly = self.polytope()?;
        let cs: Vec<&BigInt> = poly
            .vertices()
            .iter()
            .filter_map(|v| self.g.coefficient_at(v))
            .collect();
        match cs.first() {
            Some(&c) if cs.iter().all(|x| *x == c) => Ok(c.clone()),
            _ => Err(Error::InvalidInput("vertex coefficients differ".into())),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({"name": self.name.to_string(), "n": self.n, "g": crate::laurent::json::poly_to_json(&self.g)})
    }
}

fn unit_vectors(n: usize) -> Vec<LaurentPoly<BigInt>> {
    (0..n)
        .map(|i| LaurentPoly::monomial(n, 0, ExponentVector::unit(n, i), BigInt::one()))
        .collect()
}

/// g for the named family in n variables; reflexivity is validated.
pub fn preset_family(name: &str, n: usize) -> Result<FamilyPreset> {
    let name: PresetName = name.parse()?;
    if n == 0 || n > crate::polytope::MAX_DIMENSION {
        return Err(Error::InvalidInput(format!(
            "dimension {n} is out of range"
        )));
    }
    let xs = unit_vectors(n);
    let inv: Vec<LaurentPoly<BigInt>> = (0..n)
        .map(|i| LaurentPoly::monomial(n, 0, ExponentVector::unit(n, i).scale(-1), BigInt::one()))
        .collect();
    let one = LaurentPoly::monomial(n, 0, ExponentVector::zeros(n), BigInt::one());
    let sum = |v: &[LaurentPoly<BigInt>]| -> Result<LaurentPoly<BigInt>> {
        v.iter().try_fold(LaurentPoly::zero(n), |acc, x| acc.add(x))
    };
    let g = match name {
        PresetName::Simplicial => {
            let corner =
                LaurentPoly::monomial(n, 0, ExponentVector::new(&vec![-1; n])?, BigInt::one());
            sum(&xs)?.add(&corner)?
        }
        PresetName::Hyperoctahedral => sum(&xs)?.add(&sum(&inv)?)?,
        PresetName::Hypercubic => {
            let mut acc = one.clone();
            for i in 0..n {
                acc = acc.multiply(&xs[i].add(&inv[i])?)?;
            }
            acc
        }
        PresetName::An => one.add(&sum(&xs)?)?.multiply(&one.add(&sum(&inv)?)?)?,
    };
    let preset = FamilyPreset { name, n, g };
    let poly = preset.polytope()?;
    if !poly.is_reflexive()? {
        return Err(Error::InvalidInput(format!(
            "{name} polytope in dimension {n} is not reflexive"
        )));
    }
    Ok(preset)
}

/// L = Σ_k t^k P_k(θ), θ = t·d/dt.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaOperator {
    /// terms[k] holds the coefficients of P_k, lowest θ-degree first.
    pub terms: Vec<Vec<Rational>>,
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Π (θ + r) for the given roots r.
fn linear_product(shifts: &[Rational]) -> Vec<Rational> {
    shifts.iter().fold(vec![Rational::one()], |acc, r| {
        poly_mul(&acc, &[r.clone(), Rational::one()])
    })
}

fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| q(x)).collect()
}

impl ThetaOperator {
    pub fn new(terms: Vec<Vec<Rational>>) -> Result<Self> {
        if terms.is_empty() || terms[0].iter().all(Zero::is_zero) {
            return Err(Error::InvalidInput(
                "operator needs a nonzero t^0 part".into(),
            ));
        }
        let m = terms.iter().map(|p| p.len()).max().unwrap();
        let terms = terms
            .into_iter()
            .map(|mut p| {
                p.resize(m, Rational::zero());
                p
            })
            .collect();
        Ok(ThetaOperator { terms })
    }

    pub fn order(&self) -> usize {
        self.terms[0].len() - 1
    }

    /// P_0 = c·θ^m: maximal unipotent monodromy at t = 0.
    pub fn is_mum(&self) -> bool {
        let m = self.order();
        let p0 = &self.terms[0];
        !Zero::is_zero(&p0[m]) && p0[..m].iter().all(Zero::is_zero)
    }

    /// L applied to a log-graded series.
    pub fn apply(&self, y: &LogSeries) -> LogSeries {
        let t = y.order();
        let mut out = LogSeries::zero(y.comps.len(), t);
        for (k, pk) in self.terms.iter().enumerate() {
            let mut power = y.clone();
            for c in pk {
                if !Zero::is_zero(c) {
                    out = out.add(&power.scale(c).shift(k));
                }
                power = power.theta();
            }
        }
        out
    }

    /// a_1..a_m of the monic form θ^m + Σ a_i θ^{m−i}, as series to order t.
    pub fn monic_coefficients(&self, t: usize) -> Result<Vec<QSeries>> {
        let m = self.order();
        let coeff_series = |deg: usize| {
            let c: Vec<Rational> = self.terms.iter().map(|p| p[deg].clone()).collect();
            TruncatedSeries::from_poly(c, &Rational::zero(), t)
        };
        let lead_inv = coeff_series(m).inverse()?;
        Ok((1..=m)
            .map(|i| coeff_series(m - i).series_mul(&lead_inv))
            .collect())
    }

    /// Companion matrix N with θ(θ^iω) = θ^{i+1}ω and last row (−a_m, …, −a_1).
    pub fn companion(&self, t: usize) -> Result<Matrix<QSeries>> {
        let m = self.order();
        let a = self.monic_coefficients(t)?;
        let one = TruncatedSeries::constant(Rational::one(), t);
        Ok(Matrix::from_fn(m, m, |i, j| {
            if i + 1 < m {
                if j == i + 1 {
                    one.clone()
                } else {
                    qzero(t)
                }
            } else {
                a[m - 1 - j].neg()
            }
        }))
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .enumerate()
            .filter(|(_, p)| p.iter().any(|c| !Zero::is_zero(c)))
            .map(|(k, p)| json!({"t": k, "theta": p.iter().map(|c| c.to_string()).collect::<Vec<_>>()}))
            .collect();
        json!({"order": self.order(), "terms": terms})
    }
}

/// Picard–Fuchs operators: simplicial n, "quintic", hyperoctahedral 4.
pub fn preset_operator(name: &str, n: usize) -> Result<ThetaOperator> {
    match (name.to_ascii_lowercase().as_str(), n) {
        ("simplicial", n) if n >= 1 => {
            let mut terms = vec![vec![Rational::zero(); n + 1]; n + 2];
            terms[0][n] = Rational::one();
            let c = -BigInt::from(n as u64 + 1).pow(n as u32 + 1);
            let shifts: Vec<Rational> = (1..=n as i64).map(q).collect();
            terms[n + 1] = linear_product(&shifts)
                .into_iter()
                .map(|x| x * int_rational(&c))
                .collect();
            ThetaOperator::new(terms)
        }
        ("quintic", _) => {
            let shifts: Vec<Rational> = (1..=4).map(|k| rational(k, 5)).collect();
            let p1 = linear_product(&shifts)
                .into_iter()
                .map(|x| x * q(-3125))
                .collect();
            ThetaOperator::new(vec![ints(&[0, 0, 0, 0, 1]), p1])
        }
        ("hyperoctahedral", 4) => ThetaOperator::new(vec![
            ints(&[0, 0, 0, 0, 1]),
            vec![Rational::zero(); 5],
            ints(&[-128, -416, -528, -320, -80]),
            vec![Rational::zero(); 5],
            ints(&[12288, 28672, 23552, 8192, 1024]),
        ]),
        (other, n) => Err(Error::UnknownPreset(format!(
            "{other} operator in dimension {n}"
        ))),
    }
}

/// Σ_k comps[k]·log^k(t)/k!.
#[derive(Clone, Debug, PartialEq)]
pub struct LogSeries {
    pub comps: Vec<QSeries>,
}

impl LogSeries {
    pub fn zero(logs: usize, t: usize) -> Self {
        LogSeries {
            comps: vec![qzero(t); logs.max(1)],
        }
    }

    pub fn plain(s: QSeries) -> Self {
        LogSeries { comps: vec![s] }
    }

    pub fn order(&self) -> usize {
        self.comps[0].order()
    }

    fn padded(&self, k: usize) -> Vec<QSeries> {
        let mut c = self.comps.clone();
        c.resize(k.max(c.len()), qzero(self.order()));
        c
    }

    pub fn add(&self, o: &Self) -> Self {
        let k = self.comps.len().max(o.comps.len());
        let (a, b) = (self.padded(k), o.padded(k));
        LogSeries {
            comps: a.iter().zip(&b).map(|(x, y)| x.add(y)).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&q(-1)))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        LogSeries {
            comps: self.comps.iter().map(|s| s.scale(c)).collect(),
        }
    }

    pub fn shift(&self, k: usize) -> Self {
        LogSeries {
            comps: self.comps.iter().map(|s| s.shift(k)).collect(),
        }
    }

    /// Divided powers: (ℓ^a/a!)(ℓ^b/b!) = C(a+b, a)·ℓ^{a+b}/(a+b)!.
    pub fn mul(&self, o: &Self) -> Self {
        let t = self.order();
        let mut comps = vec![qzero(t); self.comps.len() + o.comps.len() - 1];
        for (a, x) in self.comps.iter().enumerate() {
            for (b, y) in o.comps.iter().enumerate() {
                let c = int_rational(&binomial((a + b) as i64, a as i64));
                comps[a + b] = comps[a + b].add(&x.series_mul(y).scale(&c));
            }
        }
        LogSeries { comps }
    }

    pub fn theta(&self) -> Self {
        let k = self.comps.len();
        let comps = (0..k)
            .map(|i| {
                let d = self.comps[i].theta();
                if i + 1 < k {
                    d.add(&self.comps[i + 1])
                } else {
                    d
                }
            })
            .collect();
        LogSeries { comps }
    }

    pub fn is_log_free(&self) -> bool {
        self.comps.iter().skip(1).all(|c| c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }
}

/// y_i = Σ_{j ≤ i} F_j·log^{i−j}(t)/(i−j)!.
#[derive(Clone, Debug, PartialEq)]
pub struct LogSeriesSolution {
    pub index: usize,
    pub components: Vec<QSeries>,
}

impl LogSeriesSolution {
    pub fn as_log_series(&self) -> LogSeries {
        LogSeries {
            comps: self.components.iter().rev().cloned().collect(),
        }
    }
}

/// Coefficients of ε^0..ε^{m−1} in P(a + ε).
fn shifted_poly(p: &[Rational], a: &Rational, m: usize) -> Vec<Rational> {
    let mut acc = vec![Rational::zero(); m];
    for c in p.iter().rev() {
        // acc ← acc·(a + ε) + c
        let mut next = vec![Rational::zero(); m];
        for i in 0..m {
            next[i] += &acc[i] * a;
            if i + 1 < m {
                next[i + 1] += &acc[i];
            }
        }
        next[0] += c;
        acc = next;
    }
    acc
}

fn eps_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let m = a.len();
    let mut out = vec![Rational::zero(); m];
    for i in 0..m {
        if Zero::is_zero(&a[i]) {
            continue;
        }
        for j in 0..m - i {
            out[i + j] += &a[i] * &b[j];
        }
    }
    out
}

fn eps_inv(a: &[Rational]) -> Vec<Rational> {
    let m = a.len();
    let inv0 = a[0].recip();
    let mut out = vec![Rational::zero(); m];
    out[0] = inv0.clone();
    for n in 1..m {
        let mut acc = Rational::zero();
        for k in 1..=n {
            acc += &a[k] * &out[n - k];
        }
        out[n] = -acc * &inv0;
    }
    out
}

/// Standard basis y_0..y_{m−1} at a point of maximal unipotent monodromy,
/// by the Frobenius method: L(t^ε Σ A_n(ε) t^n) = P_0(ε)·t^ε.
pub fn standard_solutions(op: &ThetaOperator, t: usize) -> Result<Vec<LogSeriesSolution>> {
    if !op.is_mum() {
        return Err(Error::NotMum);
    }
    let m = op.order();
    let mut a: Vec<Vec<Rational>> = Vec::with_capacity(t);
    let mut first = vec![Rational::zero(); m];
    first[0] = Rational::one();
    a.push(first);
    for n in 1..t {
        let mut rhs = vec![Rational::zero(); m];
        for (k, pk) in op.terms.iter().enumerate().skip(1) {
            if k > n || pk.iter().all(Zero::is_zero) {
                continue;
            }
            let shifted = shifted_poly(pk, &q((n - k) as i64), m);
            let prod = eps_mul(&shifted, &a[n - k]);
            for (r, x) in rhs.iter_mut().zip(prod) {
                *r -= x;
            }
        }
        let lead = shifted_poly(&op.terms[0], &q(n as i64), m);
        a.push(eps_mul(&rhs, &eps_inv(&lead)));
    }
    let f: Vec<QSeries> = (0..m)
        .map(|j| TruncatedSeries::new(a.iter().map(|an| an[j].clone()).collect()))
        .collect();
    Ok((0..m)
        .map(|i| LogSeriesSolution {
            index: i,
            components: f[..=i].to_vec(),
        })
        .collect())
}

/// γ(t) = Σ_m ct(g^m)·t^m.
pub fn constant_term_series(g: &LaurentPoly<BigInt>, t: usize) -> TruncatedSeries<BigInt> {
    let n = g.n();
    let zero = ExponentVector::zeros(n);
    let mut power = LaurentPoly::monomial(n, 0, zero.clone(), BigInt::one());
    let mut out = Vec::with_capacity(t);
    for m in 0..t {
        if m > 0 {
            power = power.multiply(g).expect("same variable count");
        }
        out.push(power.coefficient_or(&zero, &BigInt::zero()));
    }
    TruncatedSeries::new(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MirrorMap {
    /// q(t) = t·exp(F_1/F_0).
    pub q: QSeries,
    /// t(q), the compositional inverse.
    pub t_of_q: QSeries,
}

pub fn canonical_coordinate(sols: &[LogSeriesSolution], t: usize) -> Result<MirrorMap> {
    if t < 2 || sols.len() < 2 {
        return Err(Error::InvalidInput("need two solutions and T ≥ 2".into()));
    }
    let f0 = sols[1].components[0].truncate(t);
    let f1 = sols[1].components[1].truncate(t);
    let phi = f1.series_mul(&f0.inverse()?);
    let q = phi.exp()?.shift(1);
    let t_of_q = q.reversion()?;
    Ok(MirrorMap { q, t_of_q })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instantons {
    /// Y(q) to order T.
    pub yukawa: QSeries,
    /// N_1..N_D.
    pub numbers: Vec<Rational>,
}

impl Instantons {
    pub fn to_json(&self) -> Value {
        let table: Vec<Value> = self
            .numbers
            .iter()
            .enumerate()
            .map(|(i, n)| json!({"d": i + 1, "Nd_num": n.numer().to_string(), "Nd_den": n.denom().to_string()}))
            .collect();
        json!({
            "yukawa": self.yukawa.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "instantons": table,
        })
    }
}

/// Y(q) = (q d/dq)² (y_2/y_0) and N_d from [q^n]Y = Σ_{d | n} N_d d³.
pub fn yukawa_and_instantons(
    sols: &[LogSeriesSolution],
    mirror: &MirrorMap,
    degree: usize,
) -> Result<Instantons> {
    if sols.len() < 3 {
        return Err(Error::InvalidInput(
            "the Yukawa coupling needs an operator of order ≥ 3".into(),
        ));
    }
    let t = mirror.q.order();
    if degree >= t {
        return Err(Error::Truncation(format!(
            "degree {degree} needs T > {degree}, have {t}"
        )));
    }
    let trunc = |s: &LogSeriesSolution| LogSeries {
        comps: s
            .as_log_series()
            .comps
            .iter()
            .map(|c| c.truncate(t))
            .collect(),
    };
    let y0 = sols[0].components[0].truncate(t);
    let inv0 = LogSeries::plain(y0.inverse()?);
    let ratio2 = trunc(&sols[2]).mul(&inv0);
    let ratio1 = trunc(&sols[1]).mul(&inv0);
    // ½·log²q in divided powers is the square of log q = y_1/y_0, halved.
    let half_sq = ratio1.mul(&ratio1).scale(&rational(1, 2));
    let rest = ratio2.sub(&half_sq);
    if !rest.is_log_free() {
        return Err(Error::ResidualLog(
            "y_2/y_0 − ½·log²q keeps log terms".into(),
        ));
    }
    let h = rest.comps[0].compose(&mirror.t_of_q)?;
    let mut yukawa = h.theta().theta();
    yukawa.coeffs_mut()[0] += Rational::one();
    let mut numbers: Vec<Rational> = Vec::with_capacity(degree);
    for n in 1..=degree {
        let mut acc = yukawa.coeff(n).clone();
        for d in 1..n {
            if n % d == 0 {
                acc -= &numbers[d - 1] * q((d * d * d) as i64);
            }
        }
        numbers.push(acc / q((n * n * n) as i64));
    }
    Ok(Instantons { yukawa, numbers })
}

/// Rows r_0 = (F_0, …, F_{m−1}), r_{i+1} = θr_i + r_i·N_0, so that the
/// Wronskian is U(t) = Φ(t)·exp(log t·N_0) and Φ(0) = 1.
pub fn log_free_wronskian(sols: &[LogSeriesSolution], t: usize) -> Matrix<QSeries> {
    let m = sols.len();
    let f: Vec<QSeries> = sols[m - 1]
        .components
        .iter()
        .map(|c| c.truncate(t))
        .collect();
    let mut rows = vec![f];
    for i in 1..m {
        let prev = &rows[i - 1];
        let next: Vec<QSeries> = (0..m)
            .map(|k| {
                if k == 0 {
                    prev[0].theta()
                } else {
                    prev[k].theta().add(&prev[k - 1])
                }
            })
            .collect();
        rows.push(next);
    }
    Matrix::from_rows(rows)
}

fn reduce_q(x: &Rational, md: PadicModulus) -> Result<PadicScalar> {
    md.element_rational(x)
}

fn min_ord(m: &Matrix<QSeries>, p: u64) -> i64 {
    m.entries()
        .iter()
        .flat_map(|s| s.coeffs().iter())
        .filter_map(|c| ord_p_rational(c, p))
        .min()
        .unwrap_or(0)
        .min(0)
}

/// Origin-mode interpolation of the level-k Cartier matrix in the cyclic
/// basis θ^i(1/f), i < k, with probes h·b (h < k) along a vertex b.
pub fn cyclic_interpolation(
    preset: &FamilyPreset,
    k: usize,
    p: u64,
    s: u32,
    precision: Option<u32>,
    t_needed: usize,
    sigma: FrobeniusLift<PadicScalar>,
    exec: Execution,
) -> Result<Interpolation> {
    let f = preset.family();
    let n = preset.n;
    let mut omega = Form::new(
        LaurentPoly::monomial(n, 1, ExponentVector::zeros(n + 1), BigInt::one()),
        1,
    );
    let mut basis = Vec::with_capacity(k);
    for _ in 0..k {
        basis.push(omega.clone());
        omega = omega.theta(&f, n)?;
    }
    let poly = preset.polytope()?;
    let b = poly.vertices()[0].clone();
    let probes: Vec<ExponentVector> = (0..k as i64).map(|h| b.scale(h)).collect();
    let mut held_out = vec![b.scale(k as i64)];
    if let Some(b2) = poly.vertices().get(1) {
        held_out.push(b.add(b2));
    }
    let t_order = t_needed + (p as usize).pow(s) * k + 1;
    let sigma = match sigma {
        FrobeniusLift::Identity => {
            return Err(Error::IncompatibleLift("families need σ(t) ≠ t".into()))
        }
        FrobeniusLift::SeriesSubstitution(img) => {
            let md = img.coeff(0).modulus();
            let mut c = img.coeffs().to_vec();
            c.resize(t_order, md.zero());
            FrobeniusLift::SeriesSubstitution(TruncatedSeries::new(c))
        }
    };
    let spec = InterpolationSpec {
        held_out,
        level: k as u32,
        precision,
        t_order,
        sigma,
        exec,
        ..InterpolationSpec::new(basis, probes, p, s)
    };
    let out = interpolate_cartier(&f, &spec)?;
    if out.t_order < t_needed {
        return Err(Error::Truncation(format!(
            "interpolation fixed {} t-coefficients, need {t_needed}",
            out.t_order
        )));
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct Alpha {
    pub j: usize,
    /// α_j mod p^digits, None when no digit survives.
    pub value: Option<PadicScalar>,
    pub digits: u32,
}

#[derive(Clone, Debug)]
pub struct Lambda0Report {
    pub p: u64,
    pub s: u32,
    pub order: usize,
    /// Digits of each column of Λ(t) fixed by the interpolation.
    pub lambda_digits: Vec<u32>,
    /// Digits of each column of Λ_0.
    pub precision: Vec<u32>,
    /// Digits to which the t^k (k ≥ 1) coefficients of Φ^{−1}ΛΦ(t^p) are checked.
    pub constancy_digits: Vec<u32>,
    pub t_order: usize,
    pub lambda: SeriesMatrix,
    /// Λ_0 with column j reduced mod p^{precision[j]}.
    pub lambda0: Matrix<PadicScalar>,
    pub constant: bool,
    pub alphas: Vec<Alpha>,
    pub diagonal_ok: bool,
    pub toeplitz_ok: bool,
    pub column_valuations_ok: bool,
    pub ode_residual_ok: bool,
}

impl Lambda0Report {
    pub fn to_json(&self) -> Value {
        let l0: Vec<Vec<String>> = self
            .lambda0
            .to_rows()
            .iter()
            .map(|r| r.iter().map(|c| c.to_string()).collect())
            .collect();
        let alphas: Vec<Value> = self
            .alphas
            .iter()
            .map(|a| json!({"j": a.j, "value": a.value.as_ref().map(|v| v.value().to_string()), "digits": a.digits}))
            .collect();
        json!({
            "p": self.p,
            "s": self.s,
            "order": self.order,
            "lambda_digits": self.lambda_digits,
            "precision": self.precision,
            "constancy_digits": self.constancy_digits,
            "t_order": self.t_order,
            "lambda0": l0,
            "constant": self.constant,
            "alphas": alphas,
            "diagonal": self.diagonal_ok,
            "toeplitz": self.toeplitz_ok,
            "column_valuations": self.column_valuations_ok,
            "ode_residual": self.ode_residual_ok,
        })
    }

    pub fn holds(&self) -> bool {
        self.constant
            && self.diagonal_ok
            && self.toeplitz_ok
            && self.column_valuations_ok
            && self.ode_residual_ok
    }

    /// Λ_0 ≡ diag(1, p, …, p^{m−1}) mod p^k, when every column is known to k digits.
    pub fn is_diagonal_mod(&self, k: u32) -> Option<bool> {
        if self.precision.iter().any(|&e| e < k) {
            return None;
        }
        let p = BigInt::from(self.p);
        let pk = p.pow(k);
        Some((0..self.order).all(|i| {
            (0..self.order).all(|j| {
                let expected = if i == j {
                    p.pow(j as u32)
                } else {
                    BigInt::zero()
                };
                Zero::is_zero(&((self.lambda0.get(i, j).to_bigint() - expected) % &pk))
            })
        }))
    }
}

/// θΛ − NΛ + p·Λ·N(t^p) mod (p^N, t^T), N the θ-companion matrix.
pub fn frobenius_ode_residual(
    lambda: &SeriesMatrix,
    op: &ThetaOperator,
    p: u64,
) -> Result<SeriesMatrix> {
    let t = lambda.get(0, 0).order();
    let md = lambda.get(0, 0).coeff(0).modulus();
    let n = op
        .companion(t)?
        .try_map(|s| -> Result<TruncatedSeries<PadicScalar>> {
            Ok(TruncatedSeries::new(
                s.coeffs()
                    .iter()
                    .map(|c| reduce_q(c, md))
                    .collect::<Result<_>>()?,
            ))
        })?;
    let np = n.map(|s| s.subs_power(p as usize).scale(&md.element(p as i64)));
    let theta = lambda.map(|s| s.theta());
    Ok(theta.sub(&n.mul(lambda)).add(&lambda.mul(&np)))
}

fn ord_series(s: &QSeries, p: u64) -> Option<i64> {
    s.coeffs().iter().filter_map(|c| ord_p_rational(c, p)).min()
}

fn agrees(x: &Rational, y: &Rational, p: u64, digits: u32) -> bool {
    ord_p_rational(&(x - y), p).is_none_or(|v| v >= digits as i64)
}

/// Λ_0 = Φ(t)^{−1}·Λ(t)·Φ(t^p) for the cyclic basis with σ: t ↦ t^p.
pub fn frobenius_lambda0(
    preset: &FamilyPreset,
    op: &ThetaOperator,
    p: u64,
    s: u32,
    t_check: usize,
    exec: Execution,
) -> Result<Lambda0Report> {
    let m = op.order();
    if p <= m as u64 + 1 {
        return Err(Error::ExcludedPrime(p));
    }
    let t = t_check.max(1);
    let md = PadicModulus::new(p, crate::cartier::working_precision(s, m as u32))?;
    let sigma = FrobeniusLift::t_power(&md.one(), p, t + (p as usize).pow(s) * (m + 1) + 1);
    let interp = cyclic_interpolation(preset, m, p, s, None, t, sigma, exec)?;
    let lambda_digits = interp.digits_up_to(t);
    let lambda = interp.lambda.map(|x| x.truncate(t));
    let sols = standard_solutions(op, t)?;
    let phi = log_free_wronskian(&sols, t);
    let phi_inv = phi.inverse()?;
    let phi_p = phi.map(|x| x.subs_power(p as usize));
    let lambda_q = lambda.map(|x| x.map(|c| int_rational(&c.to_bigint())));
    let l0 = phi_inv.mul(&lambda_q).mul(&phi_p);
    let inv_loss = min_ord(&phi_inv, p);
    // Φ(0) = 1, so Λ_0 = Λ(0).
    let precision: Vec<u32> = interp.digit_table.iter().map(|row| row[0]).collect();
    let constancy_digits: Vec<u32> = (0..m)
        .map(|j| {
            let known = (0..m)
                .filter_map(|b| {
                    ord_series(phi_p.get(b, j), p).map(|v| lambda_digits[b] as i64 + v.min(0))
                })
                .min()
                .unwrap_or(0);
            (known + inv_loss).max(0) as u32
        })
        .collect();
    if precision.iter().all(|&e| e == 0) {
        return Err(Error::Truncation(
            "no p-adic digits of Λ_0 survive the change of basis".into(),
        ));
    }
    let zero = Rational::zero();
    let at0 = |i: usize, j: usize| l0.get(i, j).coeff(0).clone();
    let constant = (0..m).all(|i| {
        (0..m).all(|j| {
            l0.get(i, j)
                .coeffs()
                .iter()
                .skip(1)
                .all(|c| agrees(c, &zero, p, constancy_digits[j]))
        })
    });
    let pj = |j: usize| int_rational(&BigInt::from(p).pow(j as u32));
    let diagonal_ok = (0..m).all(|i| agrees(&at0(i, i), &pj(i), p, precision[i]));
    let toeplitz_ok = (0..m).all(|i| {
        (0..m).all(|j| {
            if j < i {
                agrees(&at0(i, j), &zero, p, precision[j])
            } else {
                // (Λ_0)_{i,j} = p^j·α_{j−i} = p^i·(Λ_0)_{0,j−i}
                let digits = precision[j].min(precision[j - i] + i as u32);
                agrees(&at0(i, j), &(at0(0, j - i) * pj(i)), p, digits)
            }
        })
    });
    let lambda0 = Matrix::from_fn(m, m, |i, j| {
        let e = precision[j].max(1);
        PadicModulus::new(p, e)
            .and_then(|md| md.element_rational(&at0(i, j)))
            .unwrap_or_else(|_| md.zero())
    });
    let alphas = (1..m)
        .map(|j| {
            let digits = precision[j].saturating_sub(j as u32);
            let value = (digits > 0)
                .then(|| {
                    PadicModulus::new(p, digits)
                        .and_then(|dm| dm.element_rational(&(at0(0, j) / pj(j))))
                        .ok()
                })
                .flatten();
            Alpha {
                j,
                value,
                digits: if digits > 0 { digits } else { 0 },
            }
        })
        .collect();
    let column_valuations_ok = (0..m).all(|j| {
        let need = (j as u32).min(lambda_digits[j]);
        (0..m).all(|i| {
            lambda
                .get(i, j)
                .coeffs()
                .iter()
                .all(|c| c.valuation() >= need)
        })
    });
    let known = lambda_digits.iter().copied().min().unwrap_or(0);
    let ode_residual_ok = known == 0 || {
        let reduced = crate::hasse_witt::reduce_matrix(&lambda, known)?;
        frobenius_ode_residual(&reduced, op, p)?.is_zero()
    };
    Ok(Lambda0Report {
        p,
        s,
        order: m,
        lambda_digits,
        precision,
        constancy_digits,
        t_order: t,
        lambda,
        lambda0,
        constant,
        alphas,
        diagonal_ok,
        toeplitz_ok,
        column_valuations_ok,
        ode_residual_ok,
    })
}

#[derive(Clone, Debug)]
pub struct ExcellentReport {
    pub p: u64,
    pub s: u32,
    pub t_order: usize,
    /// Digits of the two columns of the level-2 Λ.
    pub digits: Vec<u32>,
    /// σ_0(t) = t(c^{p−1}·q(t)^p).
    pub sigma0: QSeries,
    pub integral: bool,
    pub lifts_frobenius: bool,
    pub theta_component_vanishes: bool,
    pub lambda_matches: bool,
    pub lambda: SeriesMatrix,
}

impl ExcellentReport {
    pub fn holds(&self) -> bool {
        self.integral
            && self.lifts_frobenius
            && self.theta_component_vanishes
            && self.lambda_matches
    }

    pub fn to_json(&self) -> Value {
        json!({
            "p": self.p,
            "s": self.s,
            "t_order": self.t_order,
            "digits": self.digits,
            "sigma0": self.sigma0.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "integral": self.integral,
            "lifts_frobenius": self.lifts_frobenius,
            "theta_component_vanishes": self.theta_component_vanishes,
            "lambda_matches": self.lambda_matches,
            "pass": self.holds(),
        })
    }
}

/// The lift q ↦ c^{p−1}q^p and the level-2 eigenvector property of 1/f.
pub fn excellent_lift_check(
    preset: &FamilyPreset,
    op: &ThetaOperator,
    p: u64,
    t_order: usize,
    s: u32,
    exec: Execution,
) -> Result<ExcellentReport> {
    if preset.name == PresetName::Hypercubic {
        return Err(Error::UnknownPreset(
            "hypercubic vertices span a proper sublattice".into(),
        ));
    }
    if p <= 3 {
        return Err(Error::ExcludedPrime(p));
    }
    let t = t_order.max(2);
    let c = preset.vertex_coefficient()?;
    if Zero::is_zero(&(&c % BigInt::from(p))) {
        return Err(Error::ExcludedPrime(p));
    }
    let sols = standard_solutions(op, t)?;
    let mirror = canonical_coordinate(&sols, t)?;
    let cp = int_rational(&c.pow(p as u32 - 1));
    let qp = mirror.q.pow(p).scale(&cp);
    let sigma0 = mirror.t_of_q.compose(&qp)?;
    let integral = sigma0
        .coeffs()
        .iter()
        .all(|x| ord_p_rational(x, p).is_none_or(|v| v >= 0));
    let lifts_frobenius = integral
        && sigma0.coeffs().iter().enumerate().all(|(i, x)| {
            let target = if i == p as usize {
                Rational::one()
            } else {
                Rational::zero()
            };
            ord_p_rational(&(x - target), p).is_none_or(|v| v >= 1)
        });
    if !integral {
        return Ok(ExcellentReport {
            p,
            s,
            t_order: t,
            digits: Vec::new(),
            sigma0,
            integral,
            lifts_frobenius: false,
            theta_component_vanishes: false,
            lambda_matches: false,
            lambda: Matrix::from_rows(vec![vec![TruncatedSeries::constant(
                PadicModulus::new(p, 1)?.zero(),
                1,
            )]]),
        });
    }
    let md = PadicModulus::new(p, 2 * s)?;
    let interp_t = t;
    let long_t = interp_t + (p as usize).pow(s) * 2 + 2;
    let long = {
        let sols = standard_solutions(op, long_t)?;
        let mirror = canonical_coordinate(&sols, long_t)?;
        mirror.t_of_q.compose(&mirror.q.pow(p).scale(&cp))?
    };
    let sigma_img = TruncatedSeries::new(
        long.coeffs()
            .iter()
            .map(|x| reduce_q(x, md))
            .collect::<Result<_>>()?,
    );
    let interp = cyclic_interpolation(
        preset,
        2,
        p,
        s,
        None,
        interp_t,
        FrobeniusLift::SeriesSubstitution(sigma_img),
        exec,
    )?;
    let digits = interp.digits_up_to(interp_t);
    let lambda = interp.lambda.map(|x| x.truncate(interp_t));
    let theta_component_vanishes = lambda
        .get(0, 1)
        .coeffs()
        .iter()
        .all(|c| c.valuation() >= digits[1]);
    let f0 = sols[0].components[0].truncate(interp_t);
    let ratio = f0.series_mul(&f0.compose(&sigma0.truncate(interp_t))?.inverse()?);
    let lambda_matches = lambda
        .get(0, 0)
        .coeffs()
        .iter()
        .zip(ratio.coeffs())
        .all(|(c, r)| {
            reduce_q(r, md)
                .map(|r| c.sub(&r).valuation() >= digits[0])
                .unwrap_or(false)
        });
    Ok(ExcellentReport {
        p,
        s,
        t_order: t,
        digits,
        sigma0,
        integral,
        lifts_frobenius,
        theta_component_vanishes,
        lambda_matches,
        lambda,
    })
}

#[derive(Clone, Debug)]
pub struct AlphaRatio {
    pub p: u64,
    pub numerator: PadicScalar,
    pub denominator: PadicScalar,
    /// numerator/denominator mod p, None when the denominator is not a unit.
    pub ratio: Option<PadicScalar>,
}

/// α_3 of two n = 4 families at p, read off Λ(0) = Λ_0, and their ratio mod p.
pub fn alpha3_ratio(
    num: (&FamilyPreset, &ThetaOperator),
    den: (&FamilyPreset, &ThetaOperator),
    p: u64,
    s: u32,
    exec: Execution,
) -> Result<AlphaRatio> {
    let alpha3 = |(preset, op): (&FamilyPreset, &ThetaOperator)| -> Result<PadicScalar> {
        if op.order() != 4 {
            return Err(Error::InvalidInput("α_3 needs an order 4 operator".into()));
        }
        let r = frobenius_lambda0(preset, op, p, s, 1, exec)?;
        match &r.alphas[2].value {
            Some(a) => a.reduce(1),
            None => Err(Error::Truncation(format!(
                "α_3 has no p-adic digits at s = {s}"
            ))),
        }
    };
    let numerator = alpha3(num)?;
    let denominator = alpha3(den)?;
    let ratio = denominator.inv().ok().map(|d| numerator.mul(&d));
    Ok(AlphaRatio {
        p,
        numerator,
        denominator,
        ratio,
    })
}

/// ord_p of every coefficient of q(t) and every N_d is ≥ 0.
pub fn p_integral(values: &[Rational], p: u64) -> bool {
    values
        .iter()
        .all(|x| ord_p_rational(x, p).is_none_or(|v| v >= 0))
}

/// Exact γ coefficients for the simplicial family: (N·k)!/(k!)^N at t^{Nk}, N = n + 1.
pub fn simplicial_period_oracle(n: usize, t: usize) -> TruncatedSeries<BigInt> {
    let big = n + 1;
    let c = (0..t)
        .map(|m| {
            if m % big != 0 {
                return BigInt::zero();
            }
            let k = (m / big) as u64;
            crate::arith::factorial(big as u64 * k) / crate::arith::factorial(k).pow(big as u32)
        })
        .collect();
    TruncatedSeries::new(c)
}

/// Σ (5n)!/(n!)^5 t^n.
pub fn quintic_period_oracle(t: usize) -> TruncatedSeries<BigInt> {
    TruncatedSeries::new(
        (0..t as u64)
            .map(|k| crate::arith::factorial(5 * k) / crate::arith::factorial(k).pow(5))
            .collect(),
    )
}

pub fn rational_string(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else if x.is_negative() {
        format!("-{}/{}", x.numer().abs(), x.denom())
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

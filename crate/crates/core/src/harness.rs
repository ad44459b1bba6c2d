//! Verification suites over parameter grids, with reproducible JSON reports.
//!
//! A suite never stops at a single failing cell. Cells whose hypotheses do
//! not hold (supersingular primes, bad reduction) are recorded as skipped.

use crate::arith::{binomial, is_prime, Matrix, PadicModulus, PadicScalar, Ring, TruncatedSeries};
use crate::cartier::{
    cartier_shift, cartier_via_formula, expand_origin_mod, expand_vertex_mod, unit_vertex, Form,
};
use crate::cy::{preset_family, FamilyPreset};
use crate::error::{Error, Result};
use crate::hasse_witt::{
    beta_matrices, higher_hw_condition, higher_hw_matrix, lambda_unit_root, newton_polytope,
    reduce_matrix, sigma_matrix, sigma_power, Precision, SeriesMatrix,
};
use crate::laurent::json::{poly_from_json, poly_to_json};
use crate::laurent::{ExponentVector, FrobeniusLift, LaurentPoly};
use crate::par::{self, Execution};
use crate::polytope::{LatticePolytope, OpenSubset};
use crate::zeta::{asd_alpha_mod, eigenvalue_crosscheck, frobenius_trace_elliptic};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{Duration, Instant};

/// Version of the report layout.
pub const SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Hhw,
    Asd,
    Gauss,
    Dwork,
    Super,
    Crosscheck,
    HigherHw,
    Routes,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Hhw,
        Suite::Asd,
        Suite::Gauss,
        Suite::Dwork,
        Suite::Super,
        Suite::Crosscheck,
        Suite::HigherHw,
        Suite::Routes,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Hhw => "hhw",
            Suite::Asd => "asd",
            Suite::Gauss => "gauss",
            Suite::Dwork => "dwork",
            Suite::Super => "super",
            Suite::Crosscheck => "crosscheck",
            Suite::HigherHw => "higher-hw",
            Suite::Routes => "routes",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown suite {s:?}")))
    }
}

/// Where a polynomial comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PolySource {
    Inline { poly: Value },
    File { path: PathBuf },
    Preset { name: String, n: usize },
}

impl PolySource {
    pub fn inline(f: &LaurentPoly<BigInt>) -> Self {
        PolySource::Inline {
            poly: poly_to_json(f),
        }
    }

    /// Presets load as the family 1 − t·g.
    pub fn load(&self) -> Result<LaurentPoly<BigInt>> {
        match self {
            PolySource::Inline { poly } => poly_from_json(poly),
            PolySource::File { path } => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
                poly_from_json(&serde_json::from_str(&text)?)
            }
            PolySource::Preset { name, n } => Ok(preset_family(name, *n)?.family()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MuChoice {
    Interior,
    Full,
}

impl MuChoice {
    fn build(self, poly: &LatticePolytope) -> OpenSubset {
        match self {
            MuChoice::Interior => OpenSubset::interior(poly),
            MuChoice::Full => OpenSubset::full(poly),
        }
    }
}

/// Everything a suite run depends on. Reports are a pure function of it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct JobSpec {
    pub schema: u32,
    pub suite: Option<Suite>,
    pub polys: Vec<PolySource>,
    pub primes: Vec<u64>,
    /// Largest step s (congruences mod p^s).
    pub max_steps: u32,
    /// |v|∞ bound for coefficient grids.
    pub bound: i64,
    /// t-truncation for families.
    pub t_order: usize,
    pub mu: Vec<MuChoice>,
    /// Elliptic curves y² = x³ + Ax + B as [A, B].
    pub curves: Vec<[i64; 2]>,
    /// Small cofactors c in m = c·p^s.
    pub multipliers: Vec<u64>,
    /// Indices m = c·p^e given as [c, e].
    pub scales: Vec<[u64; 2]>,
    /// Exponent vectors u for the supercongruence family.
    pub vectors: Vec<Vec<i64>>,
    /// Families as (preset, n); used by dwork and higher-hw.
    pub families: Vec<(String, usize)>,
    /// Integer values t₀ at which families are specialized.
    pub constants: Vec<i64>,
    pub max_level: usize,
    /// Number of random polynomials (routes).
    pub samples: usize,
    pub seed: u64,
    /// Added to one side of every congruence before comparison. Nonzero
    /// values corrupt the data on purpose, to exercise failure reports.
    #[serde(skip_serializing_if = "is_zero_i64")]
    pub tamper: i64,
}

fn is_zero_i64(x: &i64) -> bool {
    *x == 0
}

fn tamper_scalar(x: &PadicScalar, d: i64) -> PadicScalar {
    x.add(&x.modulus().element(d))
}

/// Shifts the constant term of entry (0, 0).
fn tamper_matrix(m: &SeriesMatrix, d: i64) -> SeriesMatrix {
    let mut out = m.clone();
    if d != 0 && out.rows() > 0 && out.cols() > 0 {
        let mut e = out.get(0, 0).clone();
        e.coeffs_mut()[0] = tamper_scalar(e.coeff(0), d);
        out.set(0, 0, e);
    }
    out
}

impl Default for JobSpec {
    fn default() -> Self {
        JobSpec {
            schema: SCHEMA,
            suite: None,
            polys: Vec::new(),
            primes: Vec::new(),
            max_steps: 2,
            bound: 30,
            t_order: 1,
            mu: vec![MuChoice::Interior],
            curves: Vec::new(),
            multipliers: vec![1],
            scales: Vec::new(),
            vectors: Vec::new(),
            families: Vec::new(),
            constants: Vec::new(),
            max_level: 1,
            samples: 0,
            seed: 0,
            tamper: 0,
        }
    }
}

fn sum_poly(c0: i64) -> LaurentPoly<BigInt> {
    LaurentPoly::from_int_terms(
        2,
        &[(&[0, 0], c0), (&[1, 0], 1), (&[0, 1], 1), (&[-1, -1], 1)],
    )
}

impl JobSpec {
    /// The reference grid of each suite.
    pub fn for_suite(suite: Suite) -> Self {
        let base = JobSpec {
            suite: Some(suite),
            ..JobSpec::default()
        };
        match suite {
            Suite::Hhw => JobSpec {
                polys: (0..3).map(|c| PolySource::inline(&sum_poly(c))).collect(),
                primes: vec![5, 7],
                max_steps: 2,
                mu: vec![MuChoice::Interior, MuChoice::Full],
                ..base
            },
            Suite::Asd => JobSpec {
                curves: vec![[-1, 0], [1, 1], [-2, 1]],
                primes: vec![3, 5, 7, 11, 13],
                max_steps: 3,
                multipliers: vec![1, 2, 3],
                ..base
            },
            Suite::Gauss => JobSpec {
                polys: vec![
                    PolySource::inline(&LaurentPoly::from_int_terms(
                        2,
                        &[(&[0, 0], 1), (&[1, 0], 1), (&[0, 1], 1)],
                    )),
                    PolySource::inline(&LaurentPoly::from_int_terms(
                        2,
                        &[(&[0, 0], 1), (&[1, 0], 1), (&[0, 1], 1), (&[1, 1], 1)],
                    )),
                ],
                primes: vec![3, 5, 7],
                bound: 30,
                ..base
            },
            Suite::Dwork => JobSpec {
                families: vec![("simplicial".into(), 2), ("simplicial".into(), 3)],
                primes: vec![3, 5, 7],
                scales: vec![[1, 1], [1, 2], [2, 1]],
                ..base
            },
            Suite::Super => JobSpec {
                primes: vec![3, 5],
                max_steps: 2,
                vectors: vec![vec![1, 1], vec![1, 2], vec![2, 3]],
                ..base
            },
            Suite::Crosscheck => JobSpec {
                polys: (0..5)
                    .map(|c| PolySource::inline(&sum_poly(c)))
                    .chain([PolySource::inline(&LaurentPoly::from_int_terms(
                        1,
                        &[(&[1], 1), (&[0], -2)],
                    ))])
                    .collect(),
                primes: vec![5, 7],
                max_steps: 2,
                ..base
            },
            Suite::HigherHw => JobSpec {
                families: vec![("simplicial".into(), 2), ("simplicial".into(), 3)],
                constants: (1..7).collect(),
                primes: vec![7],
                max_level: 3,
                ..base
            },
            Suite::Routes => JobSpec {
                primes: vec![3, 5],
                max_steps: 3,
                samples: 20,
                ..base
            },
        }
    }

    pub fn load_polys(&self) -> Result<Vec<LaurentPoly<BigInt>>> {
        self.polys.iter().map(PolySource::load).collect()
    }

    fn check_primes(&self) -> Result<()> {
        if self.primes.is_empty() {
            return Err(Error::InvalidInput("the job lists no primes".into()));
        }
        match self.primes.iter().find(|&&p| p == 2 || !is_prime(p)) {
            Some(p) => Err(Error::InvalidInput(format!("{p} is not an odd prime"))),
            None => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// One grid point. Failing cells carry both sides of the congruence.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cell {
    pub params: Value,
    pub status: Status,
    pub modulus: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Cell {
    fn check(params: Value, modulus: String, ok: bool, witness: impl FnOnce() -> Value) -> Self {
        Cell {
            params,
            status: if ok { Status::Pass } else { Status::Fail },
            modulus: Some(modulus),
            witness: (!ok).then(witness),
            note: None,
        }
    }

    fn skipped(params: Value, note: impl Into<String>) -> Self {
        Cell {
            params,
            status: Status::Skipped,
            modulus: None,
            witness: None,
            note: Some(note.into()),
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub grid: Value,
    pub cells: Vec<Cell>,
    pub elapsed: Duration,
}

impl SuiteReport {
    pub fn count(&self, status: Status) -> usize {
        self.cells.iter().filter(|c| c.status == status).count()
    }

    /// No failing cell and at least one cell that actually ran.
    pub fn passed(&self) -> bool {
        self.count(Status::Fail) == 0 && self.count(Status::Pass) > 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &Cell> {
        self.cells.iter().filter(|c| c.status == Status::Fail)
    }

    /// Deterministic unless `timing` is set.
    pub fn to_json(&self, timing: bool) -> Value {
        let mut v = json!({
            "schema": SCHEMA,
            "suite": self.suite.name(),
            "grid": self.grid,
            "pass": self.passed(),
            "counts": {
                "pass": self.count(Status::Pass),
                "fail": self.count(Status::Fail),
                "skipped": self.count(Status::Skipped),
            },
            "cells": serde_json::to_value(&self.cells).expect("cells serialize"),
        });
        if timing {
            v["elapsed_ms"] = json!(self.elapsed.as_millis() as u64);
        }
        v
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: {} ({} pass, {} fail, {} skipped, {:.2} s)",
            self.suite,
            if self.passed() { "PASS" } else { "FAIL" },
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Skipped),
            self.elapsed.as_secs_f64()
        )
    }
}

/// Run the suite named in the job (or `suite` when given).
pub fn run_suite(suite: Suite, job: &JobSpec, exec: Execution) -> Result<SuiteReport> {
    let start = Instant::now();
    let cells = match suite {
        Suite::Hhw => suite_hhw(job, exec)?,
        Suite::Asd => suite_asd(job, exec)?,
        Suite::Gauss => suite_gauss(job, exec)?,
        Suite::Dwork => suite_dwork(job, exec)?,
        Suite::Super => suite_super(job, exec)?,
        Suite::Crosscheck => suite_crosscheck(job, exec)?,
        Suite::HigherHw => suite_higher_hw(job, exec)?,
        Suite::Routes => suite_routes(job, exec)?,
    };
    let mut grid = serde_json::to_value(job)?;
    grid["suite"] = json!(suite.name());
    Ok(SuiteReport {
        suite,
        grid,
        cells,
        elapsed: start.elapsed(),
    })
}

/// Evaluate cells in parallel, keeping grid order.
fn run_cells<T: Sync>(
    exec: Execution,
    items: &[T],
    f: impl Fn(&T) -> Result<Vec<Cell>> + Sync + Send,
) -> Result<Vec<Cell>> {
    let parts = par::map_vec(exec, items, f);
    let mut out = Vec::new();
    for part in parts {
        out.extend(part?);
    }
    Ok(out)
}

fn series_matrix_json(m: &SeriesMatrix) -> Value {
    Value::Array(
        m.to_rows()
            .iter()
            .map(|r| {
                Value::Array(
                    r.iter()
                        .map(|s| {
                            if s.order() == 1 {
                                json!(s.coeff(0).value().to_string())
                            } else {
                                json!(s
                                    .coeffs()
                                    .iter()
                                    .map(|c| c.value().to_string())
                                    .collect::<Vec<_>>())
                            }
                        })
                        .collect(),
                )
            })
            .collect(),
    )
}

fn frobenius_for(
    f: &LaurentPoly<BigInt>,
    md: PadicModulus,
    p: u64,
    t: usize,
) -> FrobeniusLift<PadicScalar> {
    if f.params() == 0 {
        FrobeniusLift::Identity
    } else {
        FrobeniusLift::t_power(&md.one(), p, t)
    }
}

fn hhw_cells(
    f: &LaurentPoly<BigInt>,
    fi: usize,
    p: u64,
    mu_choice: MuChoice,
    job: &JobSpec,
    exec: Execution,
) -> Result<Vec<Cell>> {
    let base = json!({"poly": fi, "p": p, "mu": mu_choice});
    let poly = newton_polytope(f)?;
    let mu = mu_choice.build(&poly);
    if mu.lattice_points().is_empty() {
        return Ok(vec![Cell::skipped(base, "μ has no lattice points")]);
    }
    let s_max = job.max_steps.max(1);
    let prec = Precision::new(p, s_max)
        .with_t_order(job.t_order)
        .with_exec(exec);
    let md = prec.modulus()?;
    let ms: Vec<u64> = (0..=s_max + 1).map(|j| p.pow(j)).collect();
    let betas = beta_matrices(f, &mu, &ms, prec)?;
    let sigma = frobenius_for(f, md, p, prec.t_order);
    let mut cells = Vec::new();
    // β_{p^s} ≡ β_p·σ(β_p)···σ^{s−1}(β_p) mod p
    let hw = reduce_matrix(&betas[1].entries, 1)?;
    let sigma1 = frobenius_for(f, md.with_precision(1)?, p, prec.t_order);
    for s in 1..=s_max + 1 {
        let lhs = tamper_matrix(&reduce_matrix(&betas[s as usize].entries, 1)?, job.tamper);
        let mut rhs = hw.clone();
        for j in 1..s as usize {
            rhs = rhs.mul(&sigma_power(&hw, &sigma1, j)?);
        }
        let mut params = base.clone();
        params["congruence"] = json!("product");
        params["s"] = json!(s);
        cells.push(Cell::check(
            params,
            format!("{p}^1"),
            lhs == rhs,
            || json!({"lhs": series_matrix_json(&lhs), "rhs": series_matrix_json(&rhs)}),
        ));
    }
    // β_{p^{s+1}}·σ(β_{p^s})^{−1} ≡ β_{p^s}·σ(β_{p^{s−1}})^{−1} mod p^s
    let det = betas[1].at_zero().det();
    if !crate::arith::LocalRing::is_unit(&det) {
        let mut params = base.clone();
        params["congruence"] = json!("ratio");
        cells.push(Cell::skipped(
            params,
            format!(
                "Hasse-Witt condition fails: det ≡ {} mod {p}",
                det.value() % p
            ),
        ));
        return Ok(cells);
    }
    let ratio = |j: usize, s: u32| -> Result<SeriesMatrix> {
        let num = reduce_matrix(&betas[j].entries, s)?;
        let den = reduce_matrix(&sigma_matrix(&betas[j - 1].entries, &sigma)?, s)?;
        Ok(num.mul(&den.inverse()?))
    };
    for s in 1..=s_max {
        let lhs = tamper_matrix(&ratio(s as usize + 1, s)?, job.tamper);
        let rhs = ratio(s as usize, s)?;
        let mut params = base.clone();
        params["congruence"] = json!("ratio");
        params["s"] = json!(s);
        cells.push(Cell::check(
            params,
            format!("{p}^{s}"),
            lhs == rhs,
            || json!({"lhs": series_matrix_json(&lhs), "rhs": series_matrix_json(&rhs)}),
        ));
    }
    Ok(cells)
}

pub fn suite_hhw(job: &JobSpec, exec: Execution) -> Result<Vec<Cell>> {
    job.check_primes()?;
    let polys = job.load_polys()?;
    let mut grid = Vec::new();
    for fi in 0..polys.len() {
        for &p in &job.primes {
            for &mu in &job.mu {
                grid.push((fi, p, mu));
            }
        }
    }
    run_cells(exec, &grid, |&(fi, p, mu)| {
        hhw_cells(&polys[fi], fi, p, mu, job, Execution::Sequential)
    })
}

/// y² − x³ − Ax − B.
pub fn curve_poly(a: i64, b: i64) -> LaurentPoly<BigInt> {
    LaurentPoly::from_int_terms(
        2,
        &[(&[0, 2], 1), (&[3, 0], -1), (&[1, 0], -a), (&[0, 0], -b)],
    )
}

fn asd_cells(a: i64, b: i64, p: u64, job: &JobSpec, exec: Execution) -> Result<Vec<Cell>> {
    let base = json!({"A": a, "B": b, "p": p});
    let data = match frobenius_trace_elliptic(a, b, p) {
        Ok(d) => d,
        Err(Error::InvalidInput(msg)) => return Ok(vec![Cell::skipped(base, msg)]),
        Err(e) => return Err(e),
    };
    let ap = data.trace;
    if ap.rem_euclid(p as i64) == 0 {
        return Ok(vec![Cell::skipped(
            base,
            format!("supersingular: a_{p} = {ap}"),
        )]);
    }
    let mut cells = Vec::new();
    let s_max = job.max_steps.max(1);
    let md1 = PadicModulus::new(p, 1)?;
    let alpha_p = tamper_scalar(&asd_alpha_mod(a, b, p, md1), job.tamper);
    let mut params = base.clone();
    params["check"] = json!("alpha_p");
    cells.push(Cell::check(
        params,
        format!("{p}^1"),
        alpha_p == md1.element(ap),
        || json!({"alpha_p": alpha_p.value().to_string(), "a_p": ap}),
    ));
    // α_m − a_p α_{m/p} + p α_{m/p²} ≡ 0 mod p^s for m = c·p^s
    for s in 1..=s_max {
        let md = PadicModulus::new(p, s)?;
        for &c in &job.multipliers {
            let m = c * p.pow(s);
            let am = asd_alpha_mod(a, b, m, md);
            let am1 = asd_alpha_mod(a, b, m / p, md);
            let am2 = if m % (p * p) == 0 {
                asd_alpha_mod(a, b, m / (p * p), md)
            } else {
                md.zero()
            };
            let lhs = tamper_scalar(
                &am.sub(&md.element(ap).mul(&am1))
                    .add(&md.element(p as i64).mul(&am2)),
                job.tamper,
            );
            let mut params = base.clone();
            params["check"] = json!("asd");
            params["s"] = json!(s);
            params["m"] = json!(m);
            let mut cell = Cell::check(params, md.to_string(), lhs.is_zero(), || {
                json!({"alpha_m": am.value().to_string(), "alpha_m_p": am1.value().to_string(),
                       "alpha_m_p2": am2.value().to_string(), "a_p": ap, "lhs": lhs.value().to_string()})
            });
            if m % 2 == 0 {
                cell = cell.with_note("even m: every term vanishes");
            }
            cells.push(cell);
        }
    }
    // Λ² − a_pΛ + p ≡ 0 mod p^s with Λ from the β-ratio
    let f = curve_poly(a, b);
    let mu = OpenSubset::interior(&newton_polytope(&f)?);
    let prec = Precision::new(p, s_max).with_exec(exec);
    let lam = lambda_unit_root(&f, &mu, p, &FrobeniusLift::Identity, s_max, prec)?;
    let md = lam.modulus;
    let l = lam.at_zero().get(0, 0).clone();
    let q = tamper_scalar(
        &l.mul(&l)
            .sub(&md.element(ap).mul(&l))
            .add(&md.element(p as i64)),
        job.tamper,
    );
    let mut params = base.clone();
    params["check"] = json!("unit_root");
    params["s"] = json!(s_max);
    cells.push(Cell::check(
        params,
        md.to_string(),
        q.is_zero(),
        || json!({"lambda": l.value().to_string(), "a_p": ap, "residual": q.value().to_string()}),
    ));
    Ok(cells)
}

pub fn suite_asd(job: &JobSpec, exec: Execution) -> Result<Vec<Cell>> {
    job.check_primes()?;
    let grid: Vec<(i64, i64, u64)> = job
        .curves
        .iter()
        .flat_map(|&[a, b]| job.primes.iter().map(move |&p| (a, b, p)))
        .collect();
    run_cells(exec, &grid, |&(a, b, p)| {
        asd_cells(a, b, p, job, Execution::Sequential)
    })
}

fn ord_vec(v: &ExponentVector, p: u64) -> Option<u32> {
    v.as_slice()
        .iter()
        .filter(|&&x| x != 0)
        .map(|&x| BigInt::from(x).ord_p(p))
        .min()
}

trait OrdP {
    fn ord_p(&self, p: u64) -> u32;
}

impl OrdP for BigInt {
    fn ord_p(&self, p: u64) -> u32 {
        crate::arith::ring::ord_p_int(self, p).unwrap_or(u32::MAX)
    }
}

/// Hypothesis of the Gauss congruences: Δ_ℤ = vertices, p odd, p ∤ coefficients.
fn gauss_hypothesis(f: &LaurentPoly<BigInt>, poly: &LatticePolytope, p: u64) -> Result<()> {
    if f.params() != 0 {
        return Err(Error::InvalidInput(
            "the Gauss suite needs integer coefficients".into(),
        ));
    }
    if poly.lattice_points(1).len() != poly.vertices().len() {
        return Err(Error::InvalidInput(
            "Δ has integral points besides its vertices".into(),
        ));
    }
    if let Some((e, c)) = f
        .terms()
        .find(|(_, c)| Zero::is_zero(&(*c % BigInt::from(p))))
    {
        return Err(Error::InvalidInput(format!(
            "p = {p} divides the coefficient {c} of x^{:?}",
            e.to_vec()
        )));
    }
    Ok(())
}

fn gauss_cells(
    f: &LaurentPoly<BigInt>,
    fi: usize,
    p: u64,
    b: &ExponentVector,
    bound: i64,
    tamper: i64,
) -> Result<Vec<Cell>> {
    let n = f.n();
    let poly = newton_polytope(f)?;
    let h = LaurentPoly::monomial(n, 0, poly.vertices()[0].clone(), BigInt::one());
    let form = Form::new(h, 1);
    let mut grid = vec![-bound; n];
    let mut vs = Vec::new();
    loop {
        let v = ExponentVector::new(&grid)?;
        if ord_vec(&v, p).is_some_and(|o| o >= 1) {
            vs.push(v);
        }
        let mut k = 0;
        while k < n && grid[k] == bound {
            grid[k] = -bound;
            k += 1;
        }
        if k == n {
            break;
        }
        grid[k] += 1;
    }
    let max_ord = vs.iter().filter_map(|v| ord_vec(v, p)).max().unwrap_or(1);
    // two spare digits measure how much stronger the congruence is
    let md = PadicModulus::new(p, max_ord + 2)?;
    let mut targets: BTreeSet<ExponentVector> = vs.iter().cloned().collect();
    targets.extend(vs.iter().map(|v| v.div_exact(p as i64).expect("ord ≥ 1")));
    let targets: Vec<ExponentVector> = targets.into_iter().collect();
    let e = expand_vertex_mod(&form, f, b, md, None, Some(&targets))?;
    let mut checked = 0usize;
    let mut excess = u32::MAX;
    let mut witness = None;
    for v in &vs {
        let w = v.div_exact(p as i64).expect("ord ≥ 1");
        if !e.is_complete(v) || !e.is_complete(&w) {
            continue;
        }
        let o = ord_vec(v, p).unwrap();
        let (cv, cw) = (tamper_scalar(&e.coefficient(v), tamper), e.coefficient(&w));
        let d = cv.sub(&cw);
        let val = crate::arith::PadicLike::valuation(&d);
        checked += 1;
        if val < o {
            witness.get_or_insert_with(|| {
                json!({"v": v.to_vec(), "c_v": cv.value().to_string(), "c_v_over_p": cw.value().to_string(),
                       "modulus": format!("{p}^{o}")})
            });
        } else if val < md.precision() {
            excess = excess.min(val - o);
        }
    }
    let params = json!({"poly": fi, "p": p, "vertex": b.to_vec(), "bound": bound, "checked": checked,
                        "observed_excess": if excess == u32::MAX { Value::Null } else { json!(excess) }});
    let ok = witness.is_none() && checked > 0;
    Ok(vec![Cell::check(params, format!("{p}^ord(v)"), ok, || {
        witness.unwrap_or(json!({"checked": 0}))
    })])
}

pub fn suite_gauss(job: &JobSpec, exec: Execution) -> Result<Vec<Cell>> {
    job.check_primes()?;
    let polys = job.load_polys()?;
    let mut grid = Vec::new();
    for (fi, f) in polys.iter().enumerate() {
        let poly = newton_polytope(f)?;
        for &p in &job.primes {
            gauss_hypothesis(f, &poly, p)?;
            for b in poly.vertices() {
                grid.push((fi, p, b.clone()));
            }
        }
    }
    run_cells(exec, &grid, |(fi, p, b)| {
        gauss_cells(&polys[*fi], *fi, *p, b, job.bound, job.tamper)
    })
}

fn family_g_of(name: &str, n: usize) -> Result<FamilyPreset> {
    preset_family(name, n)
}

/// Constant terms of g^i for i < t, mod p^N, by a power ladder pruned to
/// points that can still return to the origin.
pub fn constant_terms_mod(
    g: &LaurentPoly<BigInt>,
    t: usize,
    md: PadicModulus,
) -> Result<Vec<PadicScalar>> {
    let n = g.n();
    let poly = newton_polytope(g)?;
    let gm = g.reduce_mod(md);
    let zero = ExponentVector::zeros(n);
    let mut power = LaurentPoly::monomial(n, 0, zero.clone(), md.one());
    let mut out = Vec::with_capacity(t);
    for i in 0..t {
        if i > 0 {
            let next = power.multiply(&gm)?;
            let left = (t - 1 - i) as i64;
            power = LaurentPoly::zero(n);
            for (e, c) in next.terms() {
                if poly.contains_dilate(&e.scale(-1), left) {
                    power.add_term(e.clone(), *c);
                }
            }
        }
        out.push(power.coefficient_or(&zero, &md.zero()));
    }
    Ok(out)
}

fn dwork_cells(name: &str, n: usize, p: u64, c: u64, e: u32, job: &JobSpec) -> Result<Vec<Cell>> {
    let m = c * p.pow(e);
    let ord = e + (c % p == 0) as u32;
    // beyond t^m the truncations stop agreeing, so the check has content
    let t = (2 * m as usize).max(job.t_order);
    let params = json!({"family": name, "n": n, "p": p, "m": m, "t_order": t});
    let g = family_g_of(name, n)?.g;
    let md = PadicModulus::new(p, ord)?;
    let gamma = TruncatedSeries::new(constant_terms_mod(&g, t, md)?);
    let trunc = |k: usize| {
        let mut c = gamma.coeffs()[..k.min(t)].to_vec();
        c.resize(t, md.zero());
        TruncatedSeries::new(c)
    };
    let at_p = |s: &TruncatedSeries<PadicScalar>| s.subs_power(p as usize);
    let mut lhs = gamma.series_mul(&at_p(&trunc((m / p) as usize)));
    lhs.coeffs_mut()[0] = tamper_scalar(lhs.coeff(0), job.tamper);
    let rhs = trunc(m as usize).series_mul(&at_p(&gamma));
    let ok = lhs == rhs;
    Ok(vec![Cell::check(params, format!("{p}^{ord}"), ok, || {
        let k = (0..t).find(|&k| lhs.coeff(k) != rhs.coeff(k)).unwrap_or(0);
        json!({"t_degree": k, "lhs": lhs.coeff(k).value().to_string(), "rhs": rhs.coeff(k).value().to_string()})
    })])
}

pub fn suite_dwork(job: &JobSpec, exec: Execution) -> Result<Vec<Cell>> {
    job.check_primes()?;
    let mut grid = Vec::new();
    for (name, n) in &job.families {
        for &p in &job.primes {
            for &[c, e] in &job.scales {
                if c == 0 || e == 0 {
                    return Err(Error::InvalidInput(
                        "m = c·p^e needs c ≥ 1 and e ≥ 1".into(),
                    ));
                }
                grid.push((name.clone(), *n, p, c, e as u32));
            }
        }
    }
    run_cells(exec, &grid, |(name, n, p, c, e)| {
        dwork_cells(name, *n, *p, *c, *e, job)
    })
}

/// Coefficient of x^u in the expansion of 1/((1−x₁)(1−x₂) − t·x₁x₂) at the origin.
pub fn super_coefficient(u1: u64, u2: u64) -> Vec<BigInt> {
    (0..=u1.min(u2))
        .map(|m| binomial(u1 as i64, m as i64) * binomial(u2 as i64, m as i64))
        .collect()
}

fn super_cells(p: u64, s: u32, u: &[i64], tamper: i64) -> Result<Vec<Cell>> {
    if u.len() != 2 || u.iter().any(|&x| x < 0) {
        return Err(Error::InvalidInput(format!(
            "u = {u:?} must be a nonnegative pair"
        )));
    }
    let (u1, u2) = (u[0] as u64, u[1] as u64);
    let (hi, lo) = (p.pow(s), p.pow(s - 1));
    let modulus = BigInt::from(p).pow(2 * s);
    let mut lhs = super_coefficient(u1 * hi, u2 * hi);
    lhs[0] += tamper;
    let rhs_low = super_coefficient(u1 * lo, u2 * lo);
    let mut rhs = vec![BigInt::zero(); lhs.len()];
    for (i, c) in rhs_low.iter().enumerate() {
        rhs[i * p as usize] = c.clone();
    }
    let bad = lhs
        .iter()
        .zip(&rhs)
        .position(|(a, b)| !Zero::is_zero(&((a - b) % &modulus)));
    let base = json!({"p": p, "s": s, "u": u});
    let mut params = base.clone();
    params["check"] = json!("family");
    let mut cells = vec![Cell::check(
        params,
        format!("{p}^{}", 2 * s),
        bad.is_none(),
        || {
            let k = bad.unwrap();
            json!({"t_degree": k, "lhs": lhs[k].to_string(), "rhs": rhs[k].to_string()})
        },
    )];
    let b_hi = binomial(((u1 + u2) * hi) as i64, (u1 * hi) as i64) + tamper;
    let b_lo = binomial(((u1 + u2) * lo) as i64, (u1 * lo) as i64);
    let mut params = base;
    params["check"] = json!("binomial");
    let ok = Zero::is_zero(&((&b_hi - &b_lo) % &modulus));
    cells.push(Cell::check(
        params,
        format!("{p}^{}", 2 * s),
        ok,
        || json!({"lhs": b_hi.to_string(), "rhs": b_lo.to_string()}),
    ));
    Ok(cells)
}

pub fn suite_super(job: &JobSpec, exec: Execution) -> Result<Vec<Cell>> {
    job.check_primes()?;
    let mut grid = Vec::new();
    for &p in &job.primes {
        for s in 1..=job.max_steps.max(1) {
            for u in &job.vectors {
                grid.push((p, s, u.clone()));
            }
        }
    }
    run_cells(exec, &grid, |(p, s, u)| super_cells(*p, *s, u, job.tamper))
}

fn crosscheck_cells(
    f: &LaurentPoly<BigInt>,
    fi: usize,
    p: u64,
    job: &JobSpec,
    exec: Execution,
) -> Result<Vec<Cell>> {
    let base = json!({"poly": fi, "p": p});
    let report = match eigenvalue_crosscheck(f, p, job.max_steps.max(1), exec) {
        Ok(r) => r,
        Err(Error::HasseWitt { det, .. }) => {
            return Ok(vec![Cell::skipped(
                base,
                format!("Hasse-Witt condition fails: det = {det}"),
            )])
        }
        Err(e) => return Err(e),
    };
    Ok(report
        .rows
        .iter()
        .map(|row| {
            let mut params = base.clone();
            params["s"] = json!(row.s);
            params["count"] = json!(row.count);
            params["trace"] = json!(row.trace);
            let trace = (row.trace as i128 + job.tamper as i128).rem_euclid(p.pow(row.s) as i128);
            let ok = row.holds && trace == row.trace as i128;
            Cell::check(
                params,
                row.modulus.clone(),
                ok,
                || json!({"trace": trace, "expected": row.expected, "count": row.count}),
            )
        })
        .collect())
}

pub fn suite_crosscheck(job: &JobSpec, exec: Execution) -> Result<Vec<Cell>> {
    job.check_primes()?;
    let polys = job.load_polys()?;
    let grid: Vec<(usize, u64)> = (0..polys.len())
        .flat_map(|fi| job.primes.iter().map(move |&p| (fi, p)))
        .collect();
    run_cells(exec, &grid, |&(fi, p)| {
        crosscheck_cells(&polys[fi], fi, p, job, Execution::Sequential)
    })
}

/// HW^(k) entries ≡ coefficients of x^{pv−u} in f^σ(x^p)^k / f^k mod p^k (σ: t ↦ t^p).
pub fn higher_hw_alternative(
    f: &LaurentPoly<BigInt>,
    mu: &OpenSubset,
    k: usize,
    p: u64,
    exec: Execution,
) -> Result<bool> {
    let hw = higher_hw_matrix(f, mu, k, p)?;
    let md = PadicModulus::new(p, k as u32)?;
    let one = BigInt::one();
    let sigma = if f.params() == 1 {
        FrobeniusLift::SeriesSubstitution(TruncatedSeries::monomial(
            one.clone(),
            p as usize,
            p as usize + 1,
        ))
    } else {
        FrobeniusLift::Identity
    };
    let numerator = f.frobenius_twist(&sigma, true, p)?.pow(k as u64, &one);
    let form = Form::new(numerator, k as u32);
    let degree = hw.entries.iter().flatten().map(Vec::len).max().unwrap_or(1);
    let t = degree + p as usize;
    let targets: Vec<ExponentVector> = hw
        .index
        .iter()
        .flat_map(|u| hw.index.iter().map(|v| v.scale(p as i64).sub(u)))
        .collect();
    let e = expand_origin_mod(&form, f, t, md, &targets, exec)?;
    let d = hw.index.len();
    Ok((0..d).all(|i| {
        (0..d).all(|j| {
            let series = e.coefficient(&targets[i * d + j]);
            let entry = &hw.entries[i][j];
            (0..t).all(|r| {
                let exact = entry
                    .get(r)
                    .map(|c| md.element_int(c))
                    .unwrap_or_else(|| md.zero());
                *series.coeff(r) == exact
            })
        })
    }))
}

/// Families must meet L(ℓ) exactly; an integer fibre inherits only ord ≥ L(ℓ).
fn higher_hw_cells(
    label: Value,
    f: &LaurentPoly<BigInt>,
    p: u64,
    job: &JobSpec,
    exec: Execution,
) -> Result<Vec<Cell>> {
    let max_level = job.max_level;
    let poly = newton_polytope(f)?;
    let mu = OpenSubset::full(&poly);
    let k = max_level.min(p as usize - 1).min(f.n());
    let report = higher_hw_condition(f, &mu, k, p, exec)?;
    let counts = mu.dilate_counts(k);
    let family = f.params() == 1;
    let mut cells: Vec<Cell> = report
        .levels
        .iter()
        .map(|l| {
            let mut params = label.clone();
            params["p"] = json!(p);
            params["level"] = json!(l.level);
            params["L"] = json!(l.expected);
            params["dilate_counts"] = json!(counts[..=l.level]);
            params["exact"] = json!(l.holds());
            let expected = l.expected as i64 + job.tamper;
            let v = l.valuation as i64;
            let ok = if family {
                l.holds() && v == expected
            } else {
                v >= expected
            };
            Cell::check(
                params,
                format!("{p}^{}", l.expected + 1),
                ok,
                || json!({"valuation": l.valuation, "expected": expected}),
            )
        })
        .collect();
    if family {
        for level in 1..=k {
            let mut params = label.clone();
            params["p"] = json!(p);
            params["level"] = json!(level);
            params["check"] = json!("alternative");
            let ok = higher_hw_alternative(f, &mu, level, p, exec)?;
            cells.push(Cell::check(
                params,
                format!("{p}^{level}"),
                ok,
                || json!({"agrees": false}),
            ));
        }
    }
    Ok(cells)
}

pub fn suite_higher_hw(job: &JobSpec, exec: Execution) -> Result<Vec<Cell>> {
    job.check_primes()?;
    let mut grid: Vec<(Value, LaurentPoly<BigInt>, u64)> = Vec::new();
    for (name, n) in &job.families {
        let family = family_g_of(name, *n)?.family();
        for &p in &job.primes {
            grid.push((json!({"family": name, "n": n}), family.clone(), p));
            for &t0 in &job.constants {
                grid.push((
                    json!({"family": name, "n": n, "t": t0}),
                    family.specialize(&BigInt::from(t0)),
                    p,
                ));
            }
        }
    }
    for (fi, f) in job.load_polys()?.into_iter().enumerate() {
        for &p in &job.primes {
            grid.push((json!({"poly": fi}), f.clone(), p));
        }
    }
    run_cells(exec, &grid, |(label, f, p)| {
        higher_hw_cells(label.clone(), f, *p, job, Execution::Sequential)
    })
}

/// A random full-dimensional polynomial in two variables, distinct exponents
/// in [−1, 1]², coefficients in ±{1, 2, 4} and a ±1 vertex coefficient.
pub fn random_sparse_poly(rng: &mut ChaCha8Rng) -> LaurentPoly<BigInt> {
    let cells: Vec<[i64; 2]> = (-1..=1)
        .flat_map(|a| (-1..=1).map(move |b| [a, b]))
        .collect();
    loop {
        let terms = rng.gen_range(3..=5);
        let mut f = LaurentPoly::zero(2);
        for e in rand::seq::index::sample(rng, cells.len(), terms) {
            let c = [1, 2, 4][rng.gen_range(0..3)] * if rng.gen_bool(0.5) { 1 } else { -1 };
            f.add_term(ExponentVector::new(&cells[e]).unwrap(), BigInt::from(c));
        }
        let Ok(poly) = newton_polytope(&f) else {
            continue;
        };
        if poly.dim() == 2
            && poly
                .vertices()
                .iter()
                .any(|v| f.coefficient_at(v).is_some_and(|c| c.magnitude().is_one()))
        {
            return f;
        }
    }
}

fn route_cells(
    f: &LaurentPoly<BigInt>,
    idx: usize,
    p: u64,
    n: u32,
    m: u32,
    tamper: i64,
) -> Result<Vec<Cell>> {
    let poly = newton_polytope(f)?;
    let params = json!({"sample": idx, "poly": poly_to_json(f), "p": p, "N": n, "m": m});
    let md = PadicModulus::new(p, n)?;
    let b = match unit_vertex(&f.reduce_mod(md)) {
        Ok(b) => b,
        Err(_) => {
            return Ok(vec![Cell::skipped(
                params,
                "no unit vertex coefficient mod p",
            )])
        }
    };
    let h = LaurentPoly::monomial(2, 0, poly.vertices()[0].scale(m as i64), BigInt::one());
    let form = Form::new(h.clone(), m);
    let depth = 4 * p as usize;
    let direct = cartier_shift(&expand_vertex_mod(&form, f, &b, md, Some(depth), None)?, p);
    let via = cartier_via_formula(&h, f, m, p, &FrobeniusLift::Identity, n)?;
    let formula = expand_vertex_mod(&via, f, &b, md, Some(depth), None)?;
    let keys: BTreeSet<&ExponentVector> = direct
        .coefficients()
        .keys()
        .chain(formula.coefficients().keys())
        .collect();
    let mut compared = 0usize;
    let mut witness = None;
    for v in keys {
        if !direct.is_complete(v) || !formula.is_complete(v) {
            continue;
        }
        compared += 1;
        let (a, c) = (
            tamper_scalar(&direct.coefficient(v), tamper),
            formula.coefficient(v),
        );
        if a != c && witness.is_none() {
            witness = Some(
                json!({"v": v.to_vec(), "shift": a.value().to_string(), "formula": c.value().to_string()}),
            );
        }
    }
    let mut params = params;
    params["compared"] = json!(compared);
    let ok = witness.is_none() && compared > 0;
    Ok(vec![Cell::check(params, md.to_string(), ok, || {
        witness.unwrap_or(json!({"compared": 0}))
    })])
}

pub fn suite_routes(job: &JobSpec, exec: Execution) -> Result<Vec<Cell>> {
    job.check_primes()?;
    let mut rng = ChaCha8Rng::seed_from_u64(job.seed);
    let polys: Vec<(LaurentPoly<BigInt>, u32)> = (0..job.samples)
        .map(|_| (random_sparse_poly(&mut rng), rng.gen_range(1..=2)))
        .collect();
    let mut grid = Vec::new();
    for idx in 0..polys.len() {
        for &p in &job.primes {
            for n in 1..=job.max_steps.max(1) {
                grid.push((idx, p, n));
            }
        }
    }
    run_cells(exec, &grid, |&(idx, p, n)| {
        route_cells(&polys[idx].0, idx, p, n, polys[idx].1, job.tamper)
    })
}

/// Matrices over ℤ/p^N as rows of decimal strings.
pub fn matrix_json(m: &Matrix<PadicScalar>) -> Value {
    json!(m
        .to_rows()
        .iter()
        .map(|r| r.iter().map(|c| c.value().to_string()).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

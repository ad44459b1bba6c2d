//! β_m matrices, Hasse–Witt matrices at every level, and unit-root matrices.
//!
//! Entries are t-series over ℤ/p^N; integer polynomials use order 1.

use crate::arith::galois::{degree_for_points, GaloisRing, GrElem};
use crate::arith::{
    BigModulus, LocalRing, Matrix, PadicBig, PadicLike, PadicModulus, PadicScalar, Ring,
    TruncatedSeries,
};
use crate::error::{Error, Result};
use crate::laurent::dense::power_coefficients;
use crate::laurent::{ExponentVector, FrobeniusLift, LaurentPoly};
use crate::par::{self, Execution};
use crate::polytope::{LatticePolytope, OpenSubset};
use num_bigint::BigInt;
use num_traits::Zero;
use serde_json::{json, Value};

pub type SeriesMatrix = Matrix<TruncatedSeries<PadicScalar>>;

#[derive(Clone, Debug, PartialEq)]
pub struct BetaMatrix {
    pub m: u64,
    pub index: Vec<ExponentVector>,
    pub entries: SeriesMatrix,
    pub modulus: PadicModulus,
}

impl BetaMatrix {
    pub fn size(&self) -> usize {
        self.index.len()
    }

    pub fn t_order(&self) -> usize {
        self.entries.get(0, 0).order()
    }

    /// Constant-term matrix.
    pub fn at_zero(&self) -> Matrix<PadicScalar> {
        self.entries.map(|s| s.coeff(0).clone())
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Vec<Value>> = self
            .entries
            .to_rows()
            .iter()
            .map(|r| r.iter().map(series_json).collect())
            .collect();
        json!({
            "m": self.m,
            "index": self.index.iter().map(|v| v.to_vec()).collect::<Vec<_>>(),
            "mod": self.modulus.to_string(),
            "entries": rows,
        })
    }
}

fn series_json(s: &TruncatedSeries<PadicScalar>) -> Value {
    if s.order() == 1 {
        Value::String(s.coeff(0).value().to_string())
    } else {
        Value::Array(
            s.coeffs()
                .iter()
                .map(|c| Value::String(c.value().to_string()))
                .collect(),
        )
    }
}

/// Coefficient-ring data shared by the β computations.
#[derive(Clone, Copy, Debug)]
pub struct Precision {
    pub p: u64,
    pub n: u32,
    /// t-truncation for families; ignored for integer polynomials.
    pub t_order: usize,
    pub exec: Execution,
}

impl Precision {
    pub fn new(p: u64, n: u32) -> Self {
        Precision {
            p,
            n,
            t_order: 1,
            exec: Execution::default(),
        }
    }

    pub fn with_t_order(mut self, t: usize) -> Self {
        self.t_order = t.max(1);
        self
    }

    pub fn with_exec(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn modulus(&self) -> Result<PadicModulus> {
        PadicModulus::new(self.p, self.n)
    }

    fn order_for(&self, f: &LaurentPoly<BigInt>) -> usize {
        if f.params() == 0 {
            1
        } else {
            self.t_order
        }
    }
}

/// Newton polytope of the x-part of f.
pub fn newton_polytope(f: &LaurentPoly<BigInt>) -> Result<LatticePolytope> {
    LatticePolytope::newton_polytope(&f.x_support())
}

fn check_family(f: &LaurentPoly<BigInt>) -> Result<()> {
    if f.params() > 1 {
        return Err(Error::InvalidInput(
            "at most one parameter coordinate".into(),
        ));
    }
    Ok(())
}

/// β_m(μ) for every m in `ms`, from one shared power ladder.
pub fn beta_matrices(
    f: &LaurentPoly<BigInt>,
    mu: &OpenSubset,
    ms: &[u64],
    prec: Precision,
) -> Result<Vec<BetaMatrix>> {
    check_family(f)?;
    let md = prec.modulus()?;
    let t = prec.order_for(f);
    let index = mu.lattice_points();
    let d = index.len();
    if d == 0 {
        return Err(Error::InvalidInput("μ has no lattice points".into()));
    }
    let fm = f.reduce_mod(md);
    let mut queries: Vec<(usize, ExponentVector)> = Vec::new();
    for &m in ms.iter().filter(|&&m| m > 1) {
        for u in &index {
            for v in &index {
                let e = v.scale(m as i64).sub(u);
                if f.params() == 0 {
                    queries.push((m as usize - 1, e));
                } else {
                    for j in 0..t.min(m as usize) {
                        queries.push((m as usize - 1, e.concat(&[j as i32])));
                    }
                }
            }
        }
    }
    let values = if queries.is_empty() || fm.is_zero() {
        vec![md.zero(); queries.len()]
    } else {
        power_coefficients(&fm, &queries, prec.exec)?
    };
    let mut it = values.into_iter();
    let zero = TruncatedSeries::zeros(&md.zero(), t);
    let mut out = Vec::with_capacity(ms.len());
    for &m in ms {
        if m == 0 {
            return Err(Error::InvalidInput("β_m needs m ≥ 1".into()));
        }
        let entries = if m == 1 {
            Matrix::identity(&zero, d)
        } else {
            let mut cells = Vec::with_capacity(d * d);
            for _ in 0..d * d {
                let mut s = zero.clone();
                let count = if f.params() == 0 {
                    1
                } else {
                    t.min(m as usize)
                };
                for j in 0..count {
                    s.coeffs_mut()[j] = it.next().expect("query count");
                }
                cells.push(s);
            }
            Matrix::new(d, d, cells)
        };
        out.push(BetaMatrix {
            m,
            index: index.clone(),
            entries,
            modulus: md,
        });
    }
    Ok(out)
}

pub fn beta_matrix(
    f: &LaurentPoly<BigInt>,
    mu: &OpenSubset,
    m: u64,
    prec: Precision,
) -> Result<BetaMatrix> {
    Ok(beta_matrices(f, mu, &[m], prec)?.remove(0))
}

pub fn hw_matrix(f: &LaurentPoly<BigInt>, mu: &OpenSubset, prec: Precision) -> Result<BetaMatrix> {
    beta_matrix(f, mu, prec.p, prec)
}

/// Apply σ entrywise.
pub fn sigma_matrix(m: &SeriesMatrix, sigma: &FrobeniusLift<PadicScalar>) -> Result<SeriesMatrix> {
    m.try_map(|s| sigma.apply_series(s))
}

pub fn sigma_power(
    m: &SeriesMatrix,
    sigma: &FrobeniusLift<PadicScalar>,
    k: usize,
) -> Result<SeriesMatrix> {
    let mut out = m.clone();
    for _ in 0..k {
        out = sigma_matrix(&out, sigma)?;
    }
    Ok(out)
}

/// Reduce every entry modulo p^k.
pub fn reduce_matrix(m: &SeriesMatrix, k: u32) -> Result<SeriesMatrix> {
    m.try_map(|s| {
        Ok(TruncatedSeries::new(
            s.coeffs()
                .iter()
                .map(|c| c.reduce(k))
                .collect::<Result<_>>()?,
        ))
    })
}

pub fn truncate_matrix(m: &SeriesMatrix, t: usize) -> SeriesMatrix {
    m.map(|s| s.truncate(t))
}

/// Coefficients of a polynomial matrix evaluated at a point of a Galois ring.
fn eval_at<S: PadicLike>(
    rows: &[Vec<Vec<S>>],
    x: &GrElem<S>,
    gr: &GaloisRing<S>,
) -> Matrix<GrElem<S>> {
    let d = rows.len();
    Matrix::from_fn(d, d, |i, j| {
        let poly = &rows[i][j];
        let mut acc = gr.from_base(&poly[0].zero_like());
        for c in poly.iter().rev() {
            acc = acc.mul(x).add(&gr.from_base(c));
        }
        acc
    })
}

/// If every entry is t^{a_v − b_u}·P(t^d), the determinant is t^c·D(t^d).
/// Returns the largest such d (at least 1).
fn det_grading<S: PadicLike>(rows: &[Vec<Vec<S>>]) -> u64 {
    use num_integer::Integer;
    let d = rows.len();
    let support = |c: &[S]| -> Vec<u64> {
        (0..c.len())
            .filter(|&j| !c[j].is_zero())
            .map(|j| j as u64)
            .collect()
    };
    let mut g = 0u64;
    for r in rows {
        for c in r {
            let s = support(c);
            for w in s.windows(2) {
                g = g.gcd(&(w[1] - w[0]));
            }
        }
    }
    if g <= 1 {
        return 1;
    }
    // Bipartite consistency of the residues r_uv = a_v − b_u mod g.
    let mut b: Vec<Option<u64>> = vec![None; d];
    let mut a: Vec<Option<u64>> = vec![None; d];
    for start in 0..d {
        if b[start].is_some() {
            continue;
        }
        b[start] = Some(0);
        let mut stack = vec![(true, start)];
        while let Some((is_row, i)) = stack.pop() {
            for j in 0..d {
                let (u, v) = if is_row { (i, j) } else { (j, i) };
                let Some(&e) = support(&rows[u][v]).first() else {
                    continue;
                };
                let r = e % g;
                if is_row {
                    let want = (b[u].unwrap() + r) % g;
                    match a[v] {
                        None => {
                            a[v] = Some(want);
                            stack.push((false, v));
                        }
                        Some(x) if x != want => return 1,
                        _ => {}
                    }
                } else {
                    let want = (a[v].unwrap() + g - r) % g;
                    match b[u] {
                        None => {
                            b[u] = Some(want);
                            stack.push((true, u));
                        }
                        Some(x) if x != want => return 1,
                        _ => {}
                    }
                }
            }
        }
    }
    g
}

/// Minimal p-adic valuation of the coefficients of det(M(t)) for a matrix of
/// polynomials, capped at the precision. The determinant t^c·D(t^d) is
/// evaluated at units whose d-th powers are pairwise distinct mod p; their
/// Vandermonde matrix is then invertible, so the evaluations and the
/// coefficients of D share the same minimal valuation.
pub fn det_poly_valuation<S: PadicLike>(rows: &[Vec<Vec<S>>], exec: Execution) -> Result<u32> {
    let d = rows.len();
    let template = rows[0][0][0].clone();
    let p = template.prime();
    let deg_of = |c: &Vec<S>| (0..c.len()).rev().find(|&j| !c[j].is_zero()).unwrap_or(0);
    let row_bound: usize = rows
        .iter()
        .map(|r| r.iter().map(deg_of).max().unwrap_or(0))
        .sum();
    let col_bound: usize = (0..d)
        .map(|j| (0..d).map(|i| deg_of(&rows[i][j])).max().unwrap_or(0))
        .sum();
    let deg = row_bound.min(col_bound);
    if deg == 0 {
        let m = Matrix::from_fn(d, d, |i, j| rows[i][j][0].clone());
        return Ok(m.det().valuation());
    }
    let grading = det_grading(rows);
    let needed = deg / grading as usize + 1;
    let mut r = degree_for_points(p, (needed as u64) * grading + 1)?;
    let points = loop {
        let gr = GaloisRing::new(&template, r);
        let lo = GaloisRing::new(&lo_mod(p).zero(), r);
        let mut seen = std::collections::HashSet::new();
        let mut pts = Vec::new();
        for dg in gr.residue_elements() {
            if dg.iter().all(|&x| x == 0) {
                continue;
            }
            let lifted: Vec<PadicScalar> = dg
                .iter()
                .map(|&x| PadicScalar::from_raw(x, lo_mod(p)))
                .collect();
            let power = lo.element(&lifted).pow(grading);
            let key: Vec<u64> = power.coeffs().iter().map(|c| c.value()).collect();
            if seen.insert(key) {
                pts.push(dg);
                if pts.len() == needed {
                    break;
                }
            }
        }
        if pts.len() == needed {
            break (gr, pts);
        }
        r += 1;
    };
    let (gr, pts) = points;
    let vals = par::map_vec(exec, &pts, |dg| {
        let c: Vec<S> = dg
            .iter()
            .map(|&x| template.from_i64_like(x as i64))
            .collect();
        let x = gr.element(&c);
        eval_at(rows, &x, &gr).det().valuation()
    });
    Ok(vals.into_iter().min().unwrap())
}

fn lo_mod(p: u64) -> PadicModulus {
    PadicModulus::new(p, 1).expect("prime")
}

/// det(HW(μ)) reduced mod p: a unit (integer f), or a nonzero polynomial (family).
pub fn hw_condition(f: &LaurentPoly<BigInt>, mu: &OpenSubset, p: u64) -> Result<bool> {
    let hw = hw_matrix(f, mu, Precision::new(p, 1).with_t_order(p as usize))?;
    Ok(hw_det_valuation(&hw)? == 0)
}

/// ord_p of det β (for families: minimal valuation over the t-coefficients).
pub fn hw_det_valuation(b: &BetaMatrix) -> Result<u32> {
    let rows: Vec<Vec<Vec<PadicScalar>>> = b
        .entries
        .to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(|s| s.into_coeffs()).collect())
        .collect();
    det_poly_valuation(&rows, Execution::Sequential)
}

/// Λ(μ) ≡ β_{p^s}·σ(β_{p^{s−1}})^{−1} mod p^s.
pub fn lambda_unit_root(
    f: &LaurentPoly<BigInt>,
    mu: &OpenSubset,
    p: u64,
    sigma: &FrobeniusLift<PadicScalar>,
    s: u32,
    prec: Precision,
) -> Result<BetaMatrix> {
    let steps = lambda_sequence(f, mu, p, sigma, s, prec)?;
    Ok(steps.into_iter().last().unwrap())
}

/// Λ_j = β_{p^j}·σ(β_{p^{j−1}})^{−1} mod p^j for j = 1..=s.
pub fn lambda_sequence(
    f: &LaurentPoly<BigInt>,
    mu: &OpenSubset,
    p: u64,
    sigma: &FrobeniusLift<PadicScalar>,
    s: u32,
    prec: Precision,
) -> Result<Vec<BetaMatrix>> {
    if s == 0 {
        return Err(Error::InvalidInput("s ≥ 1".into()));
    }
    let prec = Precision { p, n: s, ..prec };
    let ms: Vec<u64> = (0..=s).map(|j| p.pow(j)).collect();
    let betas = beta_matrices(f, mu, &ms, prec)?;
    let dets = betas[1].at_zero().det();
    if !dets.is_unit() {
        let v = hw_det_valuation(&betas[1])?;
        return Err(Error::HasseWitt {
            det: format!("{} (valuation {v})", dets.value() % p),
            p,
        });
    }
    let mut out = Vec::new();
    for j in 1..=s as usize {
        let den = sigma_matrix(&betas[j - 1].entries, sigma)?;
        let inv = den.inverse().map_err(|_| Error::HasseWitt {
            det: "σ(β) not invertible".into(),
            p,
        })?;
        let lam = reduce_matrix(&betas[j].entries.mul(&inv), j as u32)?;
        out.push(BetaMatrix {
            m: p.pow(j as u32),
            index: betas[j].index.clone(),
            entries: lam,
            modulus: PadicModulus::new(p, j as u32)?,
        });
    }
    Ok(out)
}

/// Integer (or integer t-polynomial) matrix from the coefficients of x^{pv−u} in F^(k).
#[derive(Clone, Debug, PartialEq)]
pub struct HigherHw {
    pub k: usize,
    pub p: u64,
    pub index: Vec<ExponentVector>,
    /// Exact entries as coefficient vectors in t (length 1 for integer f).
    pub entries: Vec<Vec<Vec<BigInt>>>,
}

/// F^(k) = f^{p−k} Σ_{r<k} (f^σ(x^p) − f^p)^r f^σ(x^p)^{k−1−r}, with σ: t ↦ t^p.
pub fn higher_hw_polynomial(
    f: &LaurentPoly<BigInt>,
    k: usize,
    p: u64,
) -> Result<LaurentPoly<BigInt>> {
    if k == 0 || k as u64 >= p {
        return Err(Error::InvalidInput(format!(
            "level k={k} must satisfy 1 ≤ k < p={p}"
        )));
    }
    check_family(f)?;
    let one = BigInt::from(1);
    let sigma = if f.params() == 1 {
        FrobeniusLift::SeriesSubstitution(TruncatedSeries::monomial(
            one.clone(),
            p as usize,
            p as usize + 1,
        ))
    } else {
        FrobeniusLift::Identity
    };
    let fs = f.frobenius_twist(&sigma, true, p)?;
    let fp = f.pow(p, &one);
    let diff = fs.sub(&fp)?;
    let mut sum = LaurentPoly::zero_with_params(f.n(), f.params());
    let mut diff_pow = f.one_like(&one);
    for r in 0..k {
        let term = diff_pow.multiply(&fs.pow((k - 1 - r) as u64, &one))?;
        sum = sum.add(&term)?;
        if r + 1 < k {
            diff_pow = diff_pow.multiply(&diff)?;
        }
    }
    f.pow((p as usize - k) as u64, &one).multiply(&sum)
}

pub fn higher_hw_matrix(
    f: &LaurentPoly<BigInt>,
    mu: &OpenSubset,
    k: usize,
    p: u64,
) -> Result<HigherHw> {
    let big = higher_hw_polynomial(f, k, p)?;
    let index = mu.lattice_points_in_dilate(k as i64);
    let fibers = big.t_fibers();
    let entries = index
        .iter()
        .map(|u| {
            index
                .iter()
                .map(|v| {
                    let e = v.scale(p as i64).sub(u);
                    match fibers.get(&e) {
                        None => vec![BigInt::zero()],
                        Some(fib) => {
                            let deg = fib.iter().map(|x| x.0).max().unwrap();
                            let mut c = vec![BigInt::zero(); deg + 1];
                            for (j, x) in fib {
                                c[*j] = x.clone();
                            }
                            c
                        }
                    }
                })
                .collect()
        })
        .collect();
    Ok(HigherHw {
        k,
        p,
        index,
        entries,
    })
}

impl HigherHw {
    pub fn reduce(&self, md: &BigModulus) -> Vec<Vec<Vec<PadicBig>>> {
        self.entries
            .iter()
            .map(|r| {
                r.iter()
                    .map(|c| c.iter().map(|x| md.element_int(x)).collect())
                    .collect()
            })
            .collect()
    }

    pub fn reduce_native(&self, md: PadicModulus) -> Vec<Vec<Vec<PadicScalar>>> {
        self.entries
            .iter()
            .map(|r| {
                r.iter()
                    .map(|c| c.iter().map(|x| md.element_int(x)).collect())
                    .collect()
            })
            .collect()
    }

    /// ord_p det, capped at `cap` (meaning "at least cap").
    pub fn det_valuation(&self, cap: u32, exec: Execution) -> Result<u32> {
        if let Ok(md) = PadicModulus::new(self.p, cap) {
            det_poly_valuation(&self.reduce_native(md), exec)
        } else {
            det_poly_valuation(&self.reduce(&BigModulus::new(self.p, cap)?), exec)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelReport {
    pub level: usize,
    pub expected: u64,
    /// Exact when below `expected + 1`, otherwise a lower bound.
    pub valuation: u32,
}

impl LevelReport {
    pub fn holds(&self) -> bool {
        self.valuation as u64 == self.expected
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HigherHwReport {
    pub levels: Vec<LevelReport>,
}

impl HigherHwReport {
    pub fn holds(&self) -> bool {
        self.levels.iter().all(LevelReport::holds)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "holds": self.holds(),
            "levels": self.levels.iter().map(|l| json!({
                "level": l.level, "L": l.expected, "valuation": l.valuation, "holds": l.holds(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// ord_p det HW^(ℓ)(μ) against L(ℓ,μ) for ℓ = 1..=k, computed mod p^{L+1}.
pub fn higher_hw_condition(
    f: &LaurentPoly<BigInt>,
    mu: &OpenSubset,
    k: usize,
    p: u64,
    exec: Execution,
) -> Result<HigherHwReport> {
    let mut levels = Vec::new();
    for l in 1..=k {
        let expected = mu.higher_valuation(l);
        let m = higher_hw_matrix(f, mu, l, p)?;
        let valuation = m.det_valuation(expected as u32 + 1, exec)?;
        levels.push(LevelReport {
            level: l,
            expected,
            valuation,
        });
    }
    Ok(HigherHwReport { levels })
}

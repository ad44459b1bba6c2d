//! Dense power ladders modulo p^N.
//!
//! The successive powers f^0, f^1, ..., f^M live on a growing integer box;
//! each rung is one gather pass over that box.

use super::{ExponentVector, LaurentPoly};
use crate::arith::{binomial_row_mod, PadicModulus, PadicScalar};
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};

/// Default largest box a ladder may allocate (128 MiB of u64 cells).
pub const MAX_DENSE_CELLS: usize = 1 << 24;

static CELL_BUDGET: AtomicUsize = AtomicUsize::new(MAX_DENSE_CELLS);

/// Process-wide cap on ladder boxes, in MiB.
pub fn set_budget_mb(mb: usize) {
    CELL_BUDGET.store((mb << 20) / std::mem::size_of::<u64>(), Ordering::Relaxed);
}

pub fn cell_budget() -> usize {
    CELL_BUDGET.load(Ordering::Relaxed)
}

#[derive(Clone, Debug)]
pub struct DenseGrid {
    lo: Vec<i64>,
    dims: Vec<usize>,
    data: Vec<u64>,
    modulus: PadicModulus,
}

impl DenseGrid {
    pub fn one(nvars: usize, modulus: PadicModulus) -> Self {
        DenseGrid {
            lo: vec![0; nvars],
            dims: vec![1; nvars],
            data: vec![1 % modulus.modulus()],
            modulus,
        }
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    fn index(&self, e: &[i64]) -> Option<usize> {
        let mut idx = 0usize;
        for (k, &x) in e.iter().enumerate() {
            let off = x - self.lo[k];
            if off < 0 || off as usize >= self.dims[k] {
                return None;
            }
            idx = idx * self.dims[k] + off as usize;
        }
        Some(idx)
    }

    /// Raw residue at exponent `e`, zero outside the box.
    pub fn get(&self, e: &[i64]) -> u64 {
        self.index(e).map_or(0, |i| self.data[i])
    }

    pub fn coefficient(&self, e: &ExponentVector) -> PadicScalar {
        PadicScalar::from_raw(self.get(&e.to_vec()), self.modulus)
    }

    pub fn to_poly(&self, params: usize) -> LaurentPoly<PadicScalar> {
        let n = self.lo.len();
        let mut out = LaurentPoly::zero_with_params(n - params, params);
        let mut e = self.lo.clone();
        for &v in &self.data {
            if v != 0 {
                out.add_term(
                    ExponentVector::new(&e).expect("range"),
                    PadicScalar::from_raw(v, self.modulus),
                );
            }
            for k in (0..n).rev() {
                e[k] += 1;
                if ((e[k] - self.lo[k]) as usize) < self.dims[k] {
                    break;
                }
                e[k] = self.lo[k];
            }
        }
        out
    }

    fn times(&self, f: &Terms, exec: Execution) -> Result<DenseGrid> {
        let n = self.lo.len();
        let dims: Vec<usize> = (0..n)
            .map(|k| self.dims[k] + (f.hi[k] - f.lo[k]) as usize)
            .collect();
        let cells = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .unwrap_or(usize::MAX);
        if cells > cell_budget() {
            return Err(Error::Budget(format!("power ladder box of {cells} cells")));
        }
        let lo: Vec<i64> = (0..n).map(|k| self.lo[k] + f.lo[k]).collect();
        let md = self.modulus;
        let pn = md.modulus();
        let small = pn < (1 << 32);
        let row = *dims.last().unwrap();
        let old_row = *self.dims.last().unwrap();
        let mut data = vec![0u64; cells];
        par::for_each_chunk(exec, &mut data, row, |r, out| {
            let mut prefix = vec![0usize; n - 1];
            let mut rem = r;
            for k in (0..n - 1).rev() {
                prefix[k] = rem % dims[k];
                rem /= dims[k];
            }
            for (delta, c) in &f.shifted {
                let mut src = 0usize;
                let mut inside = true;
                for k in 0..n - 1 {
                    let j = prefix[k] as i64 - delta[k] as i64;
                    if j < 0 || j as usize >= self.dims[k] {
                        inside = false;
                        break;
                    }
                    src = src * self.dims[k] + j as usize;
                }
                if !inside {
                    continue;
                }
                let src = &self.data[src * old_row..(src + 1) * old_row];
                let dst = &mut out[delta[n - 1]..delta[n - 1] + old_row];
                if small {
                    for (d, &s) in dst.iter_mut().zip(src) {
                        if s != 0 {
                            *d = (*d + c * s % pn) % pn;
                        }
                    }
                } else {
                    for (d, &s) in dst.iter_mut().zip(src) {
                        if s != 0 {
                            *d = md.add(*d, md.mul(*c, s));
                        }
                    }
                }
            }
        });
        Ok(DenseGrid {
            lo,
            dims,
            data,
            modulus: md,
        })
    }
}

struct Terms {
    lo: Vec<i64>,
    hi: Vec<i64>,
    /// (exponent − lo, coefficient)
    shifted: Vec<(Vec<usize>, u64)>,
}

impl Terms {
    fn new(f: &LaurentPoly<PadicScalar>) -> Result<Self> {
        let n = f.total_vars();
        let mut lo = vec![i64::MAX; n];
        let mut hi = vec![i64::MIN; n];
        for (e, _) in f.terms() {
            for k in 0..n {
                lo[k] = lo[k].min(e.get(k));
                hi[k] = hi[k].max(e.get(k));
            }
        }
        if f.is_zero() {
            return Err(Error::InvalidInput(
                "power ladder of the zero polynomial".into(),
            ));
        }
        let shifted = f
            .terms()
            .map(|(e, c)| {
                (
                    (0..n).map(|k| (e.get(k) - lo[k]) as usize).collect(),
                    c.value(),
                )
            })
            .collect();
        Ok(Terms { lo, hi, shifted })
    }
}

/// Call `visit(j, f^j)` for j = 0..=max_power.
pub fn power_ladder(
    f: &LaurentPoly<PadicScalar>,
    max_power: usize,
    exec: Execution,
    mut visit: impl FnMut(usize, &DenseGrid) -> Result<()>,
) -> Result<()> {
    let Some(c) = f.template() else {
        return Err(Error::InvalidInput(
            "power ladder of the zero polynomial".into(),
        ));
    };
    let terms = Terms::new(f)?;
    let mut grid = DenseGrid::one(f.total_vars(), c.modulus());
    visit(0, &grid)?;
    for j in 1..=max_power {
        grid = grid.times(&terms, exec)?;
        visit(j, &grid)?;
    }
    Ok(())
}

/// Split the variables into two groups that no monomial mixes.
fn split_blocks(f: &LaurentPoly<PadicScalar>) -> Option<Vec<bool>> {
    let n = f.total_vars();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    let mut used = vec![false; n];
    for (e, _) in f.terms() {
        let vars: Vec<usize> = (0..n).filter(|&k| e.get(k) != 0).collect();
        for &k in &vars {
            used[k] = true;
        }
        for w in vars.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[a] = b;
        }
    }
    let first = (0..n).find(|&k| used[k])?;
    let root = find(&mut parent, first);
    let block: Vec<bool> = (0..n)
        .map(|k| used[k] && find(&mut parent, k) == root)
        .collect();
    let other = (0..n).any(|k| used[k] && !block[k]);
    other.then_some(block)
}

/// Coefficients [x^e] f^power for every query, reduced mod p^N.
pub fn power_coefficients(
    f: &LaurentPoly<PadicScalar>,
    queries: &[(usize, ExponentVector)],
    exec: Execution,
) -> Result<Vec<PadicScalar>> {
    let Some(c) = f.template() else {
        return Err(Error::InvalidInput("power of the zero polynomial".into()));
    };
    let md = c.modulus();
    if queries.is_empty() {
        return Ok(Vec::new());
    }
    if let Some(block) = split_blocks(f) {
        return separable_coefficients(f, &block, queries, exec);
    }
    let max_power = queries.iter().map(|q| q.0).max().unwrap();
    let mut by_power: BTreeMap<usize, Vec<(usize, Vec<i64>)>> = BTreeMap::new();
    for (i, (m, e)) in queries.iter().enumerate() {
        by_power.entry(*m).or_default().push((i, e.to_vec()));
    }
    let mut out = vec![md.zero(); queries.len()];
    power_ladder(f, max_power, exec, |j, grid| {
        if let Some(qs) = by_power.get(&j) {
            for (i, e) in qs {
                out[*i] = PadicScalar::from_raw(grid.get(e), md);
            }
        }
        Ok(())
    })?;
    Ok(out)
}

/// f = A + B with A, B in disjoint variables: binomial convolution of the
/// two ladders.
fn separable_coefficients(
    f: &LaurentPoly<PadicScalar>,
    block: &[bool],
    queries: &[(usize, ExponentVector)],
    exec: Execution,
) -> Result<Vec<PadicScalar>> {
    let n = f.total_vars();
    let md = f.template().unwrap().modulus();
    let mut a = LaurentPoly::zero_with_params(f.n(), f.params());
    let mut b = a.clone();
    for (e, c) in f.terms() {
        if (0..n).any(|k| e.get(k) != 0 && !block[k]) {
            b.add_term(e.clone(), *c);
        } else {
            a.add_term(e.clone(), *c);
        }
    }
    let project = |e: &ExponentVector, side: bool| -> ExponentVector {
        let v: Vec<i64> = (0..n)
            .map(|k| if block[k] == side { e.get(k) } else { 0 })
            .collect();
        ExponentVector::new(&v).expect("range")
    };
    let max_power = queries.iter().map(|q| q.0).max().unwrap();
    let mut a_targets: Vec<ExponentVector> = queries.iter().map(|q| project(&q.1, true)).collect();
    let mut b_targets: Vec<ExponentVector> = queries.iter().map(|q| project(&q.1, false)).collect();
    a_targets.sort();
    a_targets.dedup();
    b_targets.sort();
    b_targets.dedup();
    let table =
        |g: &LaurentPoly<PadicScalar>, targets: &[ExponentVector]| -> Result<Vec<Vec<u64>>> {
            let qs: Vec<(usize, ExponentVector)> = (0..=max_power)
                .flat_map(|j| targets.iter().map(move |t| (j, t.clone())))
                .collect();
            let vals = power_coefficients(g, &qs, exec)?;
            Ok(vals
                .chunks(targets.len())
                .map(|c| c.iter().map(|v| v.value()).collect())
                .collect())
        };
    let ta = table(&a, &a_targets)?;
    let tb = table(&b, &b_targets)?;
    let mut rows: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
    let mut out = Vec::with_capacity(queries.len());
    for (m, e) in queries {
        let ia = a_targets.binary_search(&project(e, true)).unwrap();
        let ib = b_targets.binary_search(&project(e, false)).unwrap();
        let row = rows
            .entry(*m)
            .or_insert_with(|| binomial_row_mod(*m as u64, md));
        let mut acc = 0u64;
        for k in 0..=*m {
            let x = ta[k][ia];
            if x == 0 {
                continue;
            }
            let y = tb[m - k][ib];
            if y == 0 {
                continue;
            }
            acc = md.add(acc, md.mul(row[k], md.mul(x, y)));
        }
        out.push(PadicScalar::from_raw(acc, md));
    }
    Ok(out)
}

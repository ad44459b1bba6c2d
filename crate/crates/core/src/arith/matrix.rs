//! Dense matrices over the coefficient rings.

use super::ring::{LocalRing, PadicLike, Ring};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<R> {
    rows: usize,
    cols: usize,
    data: Vec<R>,
}

impl<R: Ring> Matrix<R> {
    pub fn new(rows: usize, cols: usize, data: Vec<R>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<R>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let data: Vec<R> = rows.into_iter().flatten().collect();
        Matrix::new(r, c, data)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> R) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn zeros(template: &R, rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![template.zero_like(); rows * cols],
        }
    }

    pub fn identity(template: &R, n: usize) -> Self {
        let mut m = Self::zeros(template, n, n);
        for i in 0..n {
            m.data[i * n + i] = template.one_like();
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }
    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &R {
        &self.data[i * self.cols + j]
    }
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: R) {
        self.data[i * self.cols + j] = v;
    }
    pub fn row(&self, i: usize) -> &[R] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
    pub fn to_rows(&self) -> Vec<Vec<R>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
    pub fn entries(&self) -> &[R] {
        &self.data
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> Matrix<S> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn try_map<S: Ring>(&self, f: impl Fn(&R) -> Result<S>) -> Result<Matrix<S>> {
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect::<Result<_>>()?,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matrix shape mismatch");
        let z = self.template().zero_like();
        let mut out = vec![z; self.rows * rhs.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out[i * rhs.cols + j].mul_add_assign(a, b);
                    }
                }
            }
        }
        Matrix {
            rows: self.rows,
            cols: rhs.cols,
            data: out,
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn trace(&self) -> R {
        let mut acc = self.template().zero_like();
        for i in 0..self.rows.min(self.cols) {
            acc.add_assign(self.get(i, i));
        }
        acc
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Matrix::identity(self.template(), self.rows);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    fn template(&self) -> &R {
        self.data.first().expect("nonempty matrix")
    }

    /// Division-free determinant by cofactor recursion; intended for tiny matrices.
    pub fn det_expand(&self) -> R {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            panic!("determinant of an empty matrix needs a template");
        }
        if n == 1 {
            return self.data[0].clone();
        }
        let mut acc = self.template().zero_like();
        for j in 0..n {
            let minor = Matrix::from_fn(n - 1, n - 1, |r, c| {
                let cc = if c < j { c } else { c + 1 };
                self.get(r + 1, cc).clone()
            });
            let term = self.get(0, j).mul(&minor.det_expand());
            acc = if j % 2 == 0 {
                acc.add(&term)
            } else {
                acc.sub(&term)
            };
        }
        acc
    }
}

impl<R: LocalRing> Matrix<R> {
    /// Gauss-Jordan inverse choosing unit pivots.
    pub fn inverse(&self) -> Result<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(self.template(), n);
        for c in 0..n {
            let piv = (c..n)
                .find(|&r| a.get(r, c).is_unit())
                .ok_or_else(|| Error::NonUnit {
                    value: format!("pivot column {c}"),
                    p: 0,
                })?;
            a.swap_rows(c, piv);
            inv.swap_rows(c, piv);
            let pinv = a.get(c, c).inv_unit().expect("unit pivot");
            a.scale_row(c, &pinv);
            inv.scale_row(c, &pinv);
            for r in 0..n {
                if r != c && !a.get(r, c).is_zero() {
                    let f = a.get(r, c).clone();
                    a.axpy_row(r, c, &f);
                    inv.axpy_row(r, c, &f);
                }
            }
        }
        Ok(inv)
    }
}

impl<R: Ring> Matrix<R> {
    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn scale_row(&mut self, r: usize, c: &R) {
        for j in 0..self.cols {
            let v = self.data[r * self.cols + j].mul(c);
            self.data[r * self.cols + j] = v;
        }
    }

    /// row[dst] -= f · row[src]
    pub fn axpy_row(&mut self, dst: usize, src: usize, f: &R) {
        for j in 0..self.cols {
            let s = &self.data[src * self.cols + j];
            if s.is_zero() {
                continue;
            }
            let v = self.data[dst * self.cols + j].sub(&f.mul(s));
            self.data[dst * self.cols + j] = v;
        }
    }
}

impl<R: PadicLike> Matrix<R> {
    /// Exact determinant modulo p^N by elimination with minimal-valuation pivots.
    pub fn det(&self) -> R {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut det = self.template().one_like();
        let prec = self.template().precision();
        for c in 0..n {
            let mut best: Option<(usize, usize, u32)> = None;
            for i in c..n {
                for j in c..n {
                    let v = a.get(i, j).valuation();
                    if v < prec && best.map_or(true, |b| v < b.2) {
                        best = Some((i, j, v));
                    }
                }
            }
            let Some((bi, bj, v)) = best else {
                return self.template().zero_like();
            };
            if bi != c {
                a.swap_rows(bi, c);
                det = det.neg();
            }
            if bj != c {
                a.swap_cols(bj, c);
                det = det.neg();
            }
            let pivot = a.get(c, c).clone();
            let unit_inv = pivot.div_p_pow(v).inv_unit().expect("unit part");
            for r in c + 1..n {
                let x = a.get(r, c);
                if x.is_zero() {
                    continue;
                }
                let f = x.div_p_pow(v).mul(&unit_inv);
                a.axpy_row(r, c, &f);
            }
            det = det.mul(&pivot);
        }
        det
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }
}

/// Outcome of a unit-pivot elimination on a stacked linear system.
#[derive(Clone, Debug)]
pub struct Elimination<R> {
    /// One solution per right-hand side, free unknowns set to zero.
    pub solutions: Vec<Vec<R>>,
    /// Unknowns fixed uniquely by the system.
    pub determined: Vec<bool>,
    pub pivots: usize,
    /// Rows reduced to zero coefficients whose right-hand side did not vanish.
    pub inconsistent_rows: Vec<usize>,
}

/// Solve A·x = b_k for every column b_k of `rhs` with unit pivots.
pub fn eliminate<R: LocalRing>(a: &Matrix<R>, rhs: &Matrix<R>) -> Elimination<R> {
    let (m, n) = (a.rows(), a.cols());
    let k = rhs.cols();
    let mut aug = Matrix::from_fn(m, n + k, |i, j| {
        if j < n {
            a.get(i, j).clone()
        } else {
            rhs.get(i, j - n).clone()
        }
    });
    let mut pivot_cols: Vec<(usize, usize)> = Vec::new();
    let mut row = 0;
    for c in 0..n {
        if row == m {
            break;
        }
        let Some(piv) = (row..m).find(|&r| aug.get(r, c).is_unit()) else {
            continue;
        };
        aug.swap_rows(row, piv);
        let pinv = aug.get(row, c).inv_unit().expect("unit pivot");
        aug.scale_row(row, &pinv);
        for r in 0..m {
            if r != row && !aug.get(r, c).is_zero() {
                let f = aug.get(r, c).clone();
                aug.axpy_row(r, row, &f);
            }
        }
        pivot_cols.push((row, c));
        row += 1;
    }
    let template = a.get(0, 0).zero_like();
    let is_pivot: Vec<bool> = {
        let mut v = vec![false; n];
        for &(_, c) in &pivot_cols {
            v[c] = true;
        }
        v
    };
    let mut determined = vec![false; n];
    for &(r, c) in &pivot_cols {
        determined[c] = (0..n).all(|j| is_pivot[j] || aug.get(r, j).is_zero());
    }
    let mut inconsistent_rows = Vec::new();
    for r in row..m {
        let coeffs_zero = (0..n).all(|j| aug.get(r, j).is_zero());
        let rhs_zero = (n..n + k).all(|j| aug.get(r, j).is_zero());
        if coeffs_zero && !rhs_zero {
            inconsistent_rows.push(r);
        }
    }
    let solutions = (0..k)
        .map(|col| {
            let mut x = vec![template.clone(); n];
            for &(r, c) in &pivot_cols {
                x[c] = aug.get(r, n + col).clone();
            }
            x
        })
        .collect();
    Elimination {
        solutions,
        determined,
        pivots: pivot_cols.len(),
        inconsistent_rows,
    }
}

/// Outcome of a p-adic elimination in which pivots may be non-units.
#[derive(Clone, Debug)]
pub struct PadicElimination<R> {
    /// One solution per right-hand side, free unknowns set to zero.
    pub solutions: Vec<Vec<R>>,
    /// Number of p-adic digits to which each unknown is fixed (0 when free).
    pub digits: Vec<u32>,
    pub pivots: usize,
    pub inconsistent_rows: Vec<usize>,
}

/// Solve A·x ≡ b_k mod p^N, pivoting on an entry of least valuation in the
/// whole remaining block and tracking the digits lost to each division by p^v.
pub fn eliminate_padic<R: PadicLike>(a: &Matrix<R>, rhs: &Matrix<R>) -> PadicElimination<R> {
    let (m, n) = (a.rows(), a.cols());
    let k = rhs.cols();
    let template = a.get(0, 0).zero_like();
    let prec = template.precision();
    let mut aug = Matrix::from_fn(m, n + k, |i, j| {
        if j < n {
            a.get(i, j).clone()
        } else {
            rhs.get(i, j - n).clone()
        }
    });
    // (row, column, valuation, inverse of the unit part)
    let mut pivots: Vec<(usize, usize, u32, R)> = Vec::new();
    let mut done = vec![false; n];
    let mut row = 0;
    'levels: for level in 0..prec {
        let mut progress = true;
        while progress {
            progress = false;
            for c in 0..n {
                if row == m {
                    break 'levels;
                }
                if done[c] {
                    continue;
                }
                let Some(piv) = (row..m).find(|&r| {
                    let e = aug.get(r, c);
                    !e.is_zero() && e.valuation() <= level
                }) else {
                    continue;
                };
                aug.swap_rows(row, piv);
                let v = aug.get(row, c).valuation();
                let uinv = aug.get(row, c).div_p_pow(v).inv_unit().expect("unit part");
                for r in row + 1..m {
                    if !aug.get(r, c).is_zero() {
                        let f = aug.get(r, c).div_p_pow(v).mul(&uinv);
                        aug.axpy_row(r, row, &f);
                    }
                }
                done[c] = true;
                pivots.push((row, c, v, uinv));
                row += 1;
                progress = true;
            }
        }
    }
    let mut inconsistent_rows: Vec<usize> = (row..m)
        .filter(|&r| (n..n + k).any(|j| !aug.get(r, j).is_zero()))
        .collect();
    let others: Vec<Vec<usize>> = pivots
        .iter()
        .map(|(r, c, _, _)| {
            (0..n)
                .filter(|&j| j != *c && !aug.get(*r, j).is_zero())
                .collect()
        })
        .collect();
    let mut solutions = vec![vec![template.clone(); n]; k];
    for (idx, (r, c, v, uinv)) in pivots.iter().enumerate().rev() {
        for (col, x) in solutions.iter_mut().enumerate() {
            let mut num = aug.get(*r, n + col).clone();
            for &j in &others[idx] {
                if !x[j].is_zero() {
                    num = num.sub(&aug.get(*r, j).mul(&x[j]));
                }
            }
            if num.is_zero() {
                x[*c] = template.clone();
            } else if num.valuation() >= *v {
                x[*c] = num.div_p_pow(*v).mul(uinv);
            } else {
                inconsistent_rows.push(*r);
            }
        }
    }
    // Kernel generators: one per free column, one per non-unit pivot.
    let mut pivot_of = vec![None; n];
    for (idx, (_, c, _, _)) in pivots.iter().enumerate() {
        pivot_of[*c] = Some(idx);
    }
    let one = template.one_like();
    let p = template.from_i64_like(template.prime() as i64);
    let mut seeds: Vec<(usize, R)> = (0..n)
        .filter(|&c| pivot_of[c].is_none())
        .map(|c| (c, one.clone()))
        .collect();
    seeds.extend(
        pivots
            .iter()
            .filter(|(_, _, v, _)| *v > 0)
            .map(|(_, c, v, _)| (*c, p.pow((prec - v) as u64))),
    );
    let mut digits: Vec<u32> = (0..n)
        .map(|c| if pivot_of[c].is_some() { prec } else { 0 })
        .collect();
    for (seed, value) in seeds {
        let mut z = vec![template.clone(); n];
        z[seed] = value;
        let start = pivot_of[seed].unwrap_or(pivots.len());
        for idx in (0..start).rev() {
            let (r, c, v, uinv) = &pivots[idx];
            let mut num = template.clone();
            for &j in &others[idx] {
                if !z[j].is_zero() {
                    num = num.sub(&aug.get(*r, j).mul(&z[j]));
                }
            }
            if num.is_zero() {
                continue;
            }
            let w = num.valuation();
            if w < *v {
                let lift = p.pow((*v - w) as u64);
                for e in z.iter_mut() {
                    *e = e.mul(&lift);
                }
                num = num.mul(&lift);
            }
            z[*c] = num.div_p_pow(*v).mul(uinv);
        }
        for (c, e) in z.iter().enumerate() {
            if !e.is_zero() {
                digits[c] = digits[c].min(e.valuation());
            }
        }
    }
    inconsistent_rows.sort_unstable();
    inconsistent_rows.dedup();
    PadicElimination {
        solutions,
        digits,
        pivots: pivots.len(),
        inconsistent_rows,
    }
}

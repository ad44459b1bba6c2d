//! Lattice polytopes, their faces and open subsets.

use crate::error::{Error, Result};
use crate::laurent::ExponentVector;
use num_integer::Integer;
use serde_json::{json, Value};
use std::collections::BTreeSet;

pub const MAX_DIMENSION: usize = 6;

/// Inequality normal·u ≥ offset, with a primitive inward normal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Facet {
    pub normal: Vec<i64>,
    pub offset: i64,
}

impl Facet {
    pub fn eval(&self, u: &ExponentVector) -> i64 {
        u.dot(&self.normal)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticePolytope {
    n: usize,
    vertices: Vec<ExponentVector>,
    facets: Vec<Facet>,
}

/// Fraction-free determinant.
fn det_i128(mut a: Vec<Vec<i128>>) -> i128 {
    let n = a.len();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            let Some(r) = (k + 1..n).find(|&r| a[r][k] != 0) else {
                return 0;
            };
            a.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

pub fn det_i64(rows: &[Vec<i64>]) -> i128 {
    if rows.is_empty() {
        return 1;
    }
    det_i128(
        rows.iter()
            .map(|r| r.iter().map(|&x| x as i128).collect())
            .collect(),
    )
}

/// Rank of an integer matrix.
fn rank(rows: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let cols = a.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, p);
        for i in 0..a.len() {
            if i != r && a[i][c] != 0 {
                let (x, y) = (a[r][c], a[i][c]);
                for j in 0..cols {
                    a[i][j] = a[i][j] * x - a[r][j] * y;
                }
                let g = a[i].iter().fold(0i128, |g, &v| g.gcd(&v));
                if g > 1 {
                    a[i].iter_mut().for_each(|v| *v /= g);
                }
            }
        }
        r += 1;
    }
    r
}

/// Normal vector to the span of n−1 vectors in ℤ^n (generalized cross product).
fn cross(diffs: &[Vec<i64>], n: usize) -> Vec<i64> {
    (0..n)
        .map(|i| {
            let minor: Vec<Vec<i64>> = diffs
                .iter()
                .map(|d| {
                    d.iter()
                        .enumerate()
                        .filter(|&(j, _)| j != i)
                        .map(|(_, &x)| x)
                        .collect()
                })
                .collect();
            let d = det_i64(&minor) as i64;
            if i % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .collect()
}

fn primitive(v: Vec<i64>) -> Vec<i64> {
    let g = v.iter().fold(0i64, |g, &x| g.gcd(&x));
    if g <= 1 {
        v
    } else {
        v.into_iter().map(|x| x / g).collect()
    }
}

fn combinations(m: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > m {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + m - k {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

impl LatticePolytope {
    /// Convex hull of a full-dimensional point set.
    pub fn newton_polytope(points: &[ExponentVector]) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::InvalidInput("empty point set".into()));
        };
        let n = first.len();
        if n == 0 || n > MAX_DIMENSION {
            return Err(Error::InvalidInput(format!(
                "dimension {n} outside 1..={MAX_DIMENSION}"
            )));
        }
        let mut pts: Vec<ExponentVector> = points.to_vec();
        pts.sort();
        pts.dedup();
        if pts.iter().any(|p| p.len() != n) {
            return Err(Error::InvalidInput("points of mixed length".into()));
        }
        let diffs: Vec<Vec<i64>> = pts.iter().map(|p| p.sub(&pts[0]).to_vec()).collect();
        let dim = rank(&diffs);
        if dim < n {
            return Err(Error::Degenerate { dim, n });
        }
        let mut facets: BTreeSet<Facet> = BTreeSet::new();
        let base: Vec<Vec<i64>> = pts.iter().map(|p| p.to_vec()).collect();
        combinations(pts.len(), n, |idx| {
            let o = &base[idx[0]];
            let d: Vec<Vec<i64>> = idx[1..]
                .iter()
                .map(|&i| base[i].iter().zip(o).map(|(a, b)| a - b).collect())
                .collect();
            let normal = cross(&d, n);
            if normal.iter().all(|&x| x == 0) {
                return;
            }
            let normal = primitive(normal);
            let c: i64 = normal.iter().zip(o).map(|(a, b)| a * b).sum();
            let vals: Vec<i64> = base
                .iter()
                .map(|p| normal.iter().zip(p).map(|(a, b)| a * b).sum())
                .collect();
            if vals.iter().all(|&v| v >= c) {
                facets.insert(Facet { normal, offset: c });
            } else if vals.iter().all(|&v| v <= c) {
                facets.insert(Facet {
                    normal: normal.iter().map(|x| -x).collect(),
                    offset: -c,
                });
            }
        });
        let facets: Vec<Facet> = facets.into_iter().collect();
        let vertices: Vec<ExponentVector> = pts
            .iter()
            .filter(|p| {
                let tight: Vec<Vec<i64>> = facets
                    .iter()
                    .filter(|f| f.eval(p) == f.offset)
                    .map(|f| f.normal.clone())
                    .collect();
                rank(&tight) == n
            })
            .cloned()
            .collect();
        Ok(LatticePolytope {
            n,
            vertices,
            facets,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &[ExponentVector] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn contains(&self, u: &ExponentVector) -> bool {
        self.contains_dilate(u, 1)
    }

    pub fn contains_dilate(&self, u: &ExponentVector, k: i64) -> bool {
        self.facets.iter().all(|f| f.eval(u) >= k * f.offset)
    }

    pub fn is_vertex(&self, u: &ExponentVector) -> bool {
        self.vertices.contains(u)
    }

    /// Integer bounding box of kΔ.
    pub fn bounding_box(&self, k: i64) -> (Vec<i64>, Vec<i64>) {
        let lo = (0..self.n)
            .map(|i| self.vertices.iter().map(|v| v.get(i)).min().unwrap() * k)
            .collect();
        let hi = (0..self.n)
            .map(|i| self.vertices.iter().map(|v| v.get(i)).max().unwrap() * k)
            .collect();
        (lo, hi)
    }

    /// Lattice points of kΔ in lexicographic order.
    pub fn lattice_points(&self, k: i64) -> Vec<ExponentVector> {
        let (lo, hi) = self.bounding_box(k);
        let mut out = Vec::new();
        let mut e = lo.clone();
        loop {
            let v = ExponentVector::new(&e).expect("range");
            if self.contains_dilate(&v, k) {
                out.push(v);
            }
            let mut i = self.n;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if e[i] < hi[i] {
                    e[i] += 1;
                    break;
                }
                e[i] = lo[i];
            }
        }
    }

    /// Facet indices tight at u (on kΔ).
    pub fn tight_facets(&self, u: &ExponentVector, k: i64) -> BTreeSet<usize> {
        (0..self.facets.len())
            .filter(|&i| self.facets[i].eval(u) == k * self.facets[i].offset)
            .collect()
    }

    /// All nonempty proper faces, each given by its vertex indices.
    pub fn faces(&self) -> Vec<Face> {
        let vsets: Vec<BTreeSet<usize>> = self
            .facets
            .iter()
            .map(|f| {
                (0..self.vertices.len())
                    .filter(|&i| f.eval(&self.vertices[i]) == f.offset)
                    .collect()
            })
            .collect();
        let mut all: BTreeSet<BTreeSet<usize>> = vsets.iter().cloned().collect();
        let mut frontier: Vec<BTreeSet<usize>> = all.iter().cloned().collect();
        while let Some(s) = frontier.pop() {
            for f in &vsets {
                let i: BTreeSet<usize> = s.intersection(f).cloned().collect();
                if !i.is_empty() && all.insert(i.clone()) {
                    frontier.push(i);
                }
            }
        }
        all.into_iter()
            .map(|vs| self.face_from_vertices(vs))
            .collect()
    }

    fn face_from_vertices(&self, vs: BTreeSet<usize>) -> Face {
        let active: BTreeSet<usize> = (0..self.facets.len())
            .filter(|&j| {
                vs.iter()
                    .all(|&i| self.facets[j].eval(&self.vertices[i]) == self.facets[j].offset)
            })
            .collect();
        let pts: Vec<&ExponentVector> = vs.iter().map(|&i| &self.vertices[i]).collect();
        let diffs: Vec<Vec<i64>> = pts.iter().map(|p| p.sub(pts[0]).to_vec()).collect();
        Face {
            vertices: vs,
            facets: active,
            dim: rank(&diffs),
        }
    }

    /// The smallest face containing u ∈ kΔ, or None for the relative interior of kΔ itself.
    pub fn carrier(&self, u: &ExponentVector, k: i64) -> Option<Face> {
        let tight = self.tight_facets(u, k);
        if tight.is_empty() {
            return None;
        }
        let vs: BTreeSet<usize> = (0..self.vertices.len())
            .filter(|&i| {
                tight
                    .iter()
                    .all(|&j| self.facets[j].eval(&self.vertices[i]) == self.facets[j].offset)
            })
            .collect();
        Some(self.face_from_vertices(vs))
    }

    fn require_interior_origin(&self) -> Result<()> {
        if self.facets.iter().all(|f| f.offset < 0) {
            Ok(())
        } else {
            Err(Error::OriginNotInterior)
        }
    }

    pub fn is_reflexive(&self) -> Result<bool> {
        self.require_interior_origin()?;
        Ok(self.facets.iter().all(|f| f.offset == -1))
    }

    /// Sum of the inward normals of the facets through vertex b: positive
    /// on every nonzero lattice vector of the tangent cone at b.
    pub fn grading_at(&self, b: &ExponentVector) -> Result<Vec<i64>> {
        if !self.is_vertex(b) {
            return Err(Error::NotAVertex(format!("{b:?}")));
        }
        let mut phi = vec![0i64; self.n];
        for f in self.facets.iter().filter(|f| f.eval(b) == f.offset) {
            for (x, a) in phi.iter_mut().zip(&f.normal) {
                *x += a;
            }
        }
        Ok(phi)
    }

    /// Inward normals of the tangent cone C(Δ − b).
    pub fn cone_at(&self, b: &ExponentVector) -> Result<Vec<Vec<i64>>> {
        if !self.is_vertex(b) {
            return Err(Error::NotAVertex(format!("{b:?}")));
        }
        Ok(self
            .facets
            .iter()
            .filter(|f| f.eval(b) == f.offset)
            .map(|f| f.normal.clone())
            .collect())
    }

    /// |det| of n vertices of a simplex facet; 1 means unimodular.
    pub fn simplex_facet_volumes(&self) -> Vec<Option<u64>> {
        self.facets
            .iter()
            .map(|f| {
                let vs: Vec<Vec<i64>> = self
                    .vertices
                    .iter()
                    .filter(|v| f.eval(v) == f.offset)
                    .map(|v| v.to_vec())
                    .collect();
                (vs.len() == self.n).then(|| det_i64(&vs).unsigned_abs() as u64)
            })
            .collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "vertices": self.vertices.iter().map(|v| v.to_vec()).collect::<Vec<_>>(),
            "facets": self.facets.iter().map(|f| json!({"a": f.normal, "c": f.offset})).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Face {
    pub vertices: BTreeSet<usize>,
    /// Facets containing the face.
    pub facets: BTreeSet<usize>,
    pub dim: usize,
}

impl Face {
    pub fn contains(&self, poly: &LatticePolytope, u: &ExponentVector, k: i64) -> bool {
        poly.contains_dilate(u, k)
            && self
                .facets
                .iter()
                .all(|&j| poly.facets[j].eval(u) == k * poly.facets[j].offset)
    }

    pub fn relint_contains(&self, poly: &LatticePolytope, u: &ExponentVector, k: i64) -> bool {
        poly.contains_dilate(u, k) && poly.tight_facets(u, k) == self.facets
    }
}

/// Δ minus a union of closed faces.
#[derive(Clone, Debug, PartialEq)]
pub struct OpenSubset {
    polytope: LatticePolytope,
    removed: Vec<Face>,
}

impl OpenSubset {
    pub fn full(p: &LatticePolytope) -> Self {
        OpenSubset {
            polytope: p.clone(),
            removed: Vec::new(),
        }
    }

    pub fn interior(p: &LatticePolytope) -> Self {
        let removed = (0..p.facets.len())
            .map(|j| {
                let vs = (0..p.vertices.len())
                    .filter(|&i| p.facets[j].eval(&p.vertices[i]) == p.facets[j].offset)
                    .collect();
                p.face_from_vertices(vs)
            })
            .collect();
        OpenSubset {
            polytope: p.clone(),
            removed,
        }
    }

    pub fn with_removed(p: &LatticePolytope, removed: Vec<Face>) -> Self {
        OpenSubset {
            polytope: p.clone(),
            removed,
        }
    }

    /// Δ minus every face not containing the vertex b.
    pub fn vertex_star(p: &LatticePolytope, b: &ExponentVector) -> Result<Self> {
        let bi = p
            .vertices
            .iter()
            .position(|v| v == b)
            .ok_or_else(|| Error::NotAVertex(format!("{b:?}")))?;
        let removed = p
            .faces()
            .into_iter()
            .filter(|f| !f.vertices.contains(&bi))
            .filter(|f| f.dim + 1 == p.n)
            .collect();
        Ok(OpenSubset {
            polytope: p.clone(),
            removed,
        })
    }

    pub fn polytope(&self) -> &LatticePolytope {
        &self.polytope
    }

    pub fn removed(&self) -> &[Face] {
        &self.removed
    }

    pub fn contains_dilate(&self, u: &ExponentVector, k: i64) -> bool {
        self.polytope.contains_dilate(u, k)
            && !self
                .removed
                .iter()
                .any(|f| f.contains(&self.polytope, u, k))
    }

    /// (kμ)_ℤ in lexicographic order.
    pub fn lattice_points_in_dilate(&self, k: i64) -> Vec<ExponentVector> {
        self.polytope
            .lattice_points(k)
            .into_iter()
            .filter(|u| self.contains_dilate(u, k))
            .collect()
    }

    pub fn lattice_points(&self) -> Vec<ExponentVector> {
        self.lattice_points_in_dilate(1)
    }

    /// m_ℓ = #(ℓμ)_ℤ for ℓ = 0..=k (m_0 = 0).
    pub fn dilate_counts(&self, k: usize) -> Vec<usize> {
        std::iter::once(0)
            .chain((1..=k).map(|l| self.lattice_points_in_dilate(l as i64).len()))
            .collect()
    }

    /// L(k,μ) = Σ_{ℓ ≤ k} (ℓ−1)(m_ℓ − m_{ℓ−1}).
    pub fn higher_valuation(&self, k: usize) -> u64 {
        let m = self.dilate_counts(k);
        (1..=k).map(|l| ((l - 1) * (m[l] - m[l - 1])) as u64).sum()
    }
}

pub fn points(v: &[&[i64]]) -> Vec<ExponentVector> {
    v.iter()
        .map(|e| ExponentVector::new(e).expect("range"))
        .collect()
}

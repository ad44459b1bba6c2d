//! Truncated geometric-type sums Σ w(s)·ℓ^s with pruning.

use super::{ExponentVector, LaurentPoly};
use crate::arith::Ring;
use std::collections::HashMap;

/// Σ_{s ≤ depth} weight(s)·ℓ^s. Cells rejected by `keep` are dropped from
/// every rung, so `keep` must reject only cells that cannot reach a wanted
/// exponent by further multiplication with ℓ.
pub fn pruned_power_sum<R: Ring>(
    ell: &LaurentPoly<R>,
    one: &R,
    depth: usize,
    weight: impl Fn(usize) -> R,
    keep: impl Fn(&ExponentVector) -> bool,
) -> HashMap<ExponentVector, R> {
    let zero = ExponentVector::zeros(ell.total_vars());
    let mut acc: HashMap<ExponentVector, R> = HashMap::new();
    if !keep(&zero) {
        return acc;
    }
    let mut rung: HashMap<ExponentVector, R> = HashMap::from([(zero.clone(), one.one_like())]);
    let w0 = weight(0);
    if !w0.is_zero() {
        acc.insert(zero, w0);
    }
    let terms: Vec<(&ExponentVector, &R)> = ell.terms().collect();
    for s in 1..=depth {
        let mut next: HashMap<ExponentVector, R> = HashMap::with_capacity(rung.len() * 2);
        for (e, c) in &rung {
            for (a, ca) in &terms {
                let u = e.add(a);
                if let Some(v) = next.get_mut(&u) {
                    v.mul_add_assign(c, ca);
                } else if keep(&u) {
                    next.insert(u, c.mul(ca));
                }
            }
        }
        next.retain(|_, c| !c.is_zero());
        if next.is_empty() {
            break;
        }
        let w = weight(s);
        if !w.is_zero() {
            for (e, c) in &next {
                let v = c.mul(&w);
                match acc.get_mut(e) {
                    Some(x) => x.add_assign(&v),
                    None => {
                        acc.insert(e.clone(), v);
                    }
                }
            }
        }
        rung = next;
    }
    acc.retain(|_, c| !c.is_zero());
    acc
}

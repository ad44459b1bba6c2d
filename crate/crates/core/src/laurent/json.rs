//! JSON term format.
//!
//! `{"n": 2, "terms": [{"e": [-1,-1], "c": "1"}]}`; family coefficients are
//! written `{"tpoly": ["1", "-1"]}` (low degree first), and the shorthand
//! `{"form": "1-t*g", "g": {...}}` denotes the family 1 − t·g.

use super::{ExponentVector, LaurentPoly};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use serde_json::{json, Value};
use std::str::FromStr;

fn parse_int(v: &Value) -> Result<BigInt> {
    match v {
        Value::String(s) => {
            BigInt::from_str(s.trim()).map_err(|_| Error::Json(format!("bad integer {s:?}")))
        }
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| Error::Json(format!("non-integer coefficient {n}"))),
        other => Err(Error::Json(format!("expected integer, found {other}"))),
    }
}

/// Parse either the plain term format or the family shorthand.
pub fn poly_from_json(v: &Value) -> Result<LaurentPoly<BigInt>> {
    if let Some(form) = v.get("form") {
        if form.as_str() != Some("1-t*g") {
            return Err(Error::Json(format!("unknown family form {form}")));
        }
        let g = poly_from_json(v.get("g").ok_or_else(|| Error::Json("missing g".into()))?)?;
        if g.params() != 0 {
            return Err(Error::Json("g must have integer coefficients".into()));
        }
        return Ok(LaurentPoly::one_minus_t_times(&g));
    }
    let n = v
        .get("n")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Json("missing variable count n".into()))? as usize;
    let terms = v
        .get("terms")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Json("missing terms".into()))?;
    let family = terms
        .iter()
        .any(|t| t.get("c").is_some_and(Value::is_object));
    let params = usize::from(family);
    let mut out = LaurentPoly::zero_with_params(n, params);
    for t in terms {
        let e = t
            .get("e")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Json("term without exponent".into()))?;
        if e.len() != n {
            return Err(Error::VariableMismatch(e.len(), n));
        }
        let e: Vec<i64> = e
            .iter()
            .map(|x| {
                x.as_i64()
                    .ok_or_else(|| Error::Json(format!("bad exponent {x}")))
            })
            .collect::<Result<_>>()?;
        let c = t
            .get("c")
            .ok_or_else(|| Error::Json("term without coefficient".into()))?;
        if let Some(tp) = c.get("tpoly") {
            let coeffs = tp
                .as_array()
                .ok_or_else(|| Error::Json("tpoly must be an array".into()))?;
            for (j, cj) in coeffs.iter().enumerate() {
                let mut full = e.clone();
                full.push(j as i64);
                out.add_term(ExponentVector::new(&full)?, parse_int(cj)?);
            }
        } else {
            let mut full = e.clone();
            if family {
                full.push(0);
            }
            out.add_term(ExponentVector::new(&full)?, parse_int(c)?);
        }
    }
    Ok(out)
}

pub fn poly_from_str(s: &str) -> Result<LaurentPoly<BigInt>> {
    poly_from_json(&serde_json::from_str(s)?)
}

/// Emit terms in lexicographic exponent order.
pub fn poly_to_json(f: &LaurentPoly<BigInt>) -> Value {
    let n = f.n();
    let terms: Vec<Value> = if f.params() == 0 {
        f.terms()
            .map(|(e, c)| json!({"e": e.to_vec(), "c": c.to_string()}))
            .collect()
    } else {
        f.t_fibers()
            .into_iter()
            .map(|(e, fiber)| {
                let deg = fiber.iter().map(|x| x.0).max().unwrap_or(0);
                let mut coeffs = vec!["0".to_string(); deg + 1];
                for (j, c) in fiber {
                    coeffs[j] = c.to_string();
                }
                json!({"e": e.to_vec(), "c": {"tpoly": coeffs}})
            })
            .collect()
    };
    json!({"n": n, "terms": terms})
}

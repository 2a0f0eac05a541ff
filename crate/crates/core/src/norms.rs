//! Quadrature of curvature norms on a discrete hypersurface.

use crate::error::{invalid, Result};
use crate::geometry::GeometryFields;

/// `(Σ f_i^p w_i)^(1/p)`, summed in index order.
pub fn lp_norm(field: &[f64], weights: &[f64], p: f64) -> Result<f64> {
    if field.len() != weights.len() {
        return Err(invalid("weights", "field and weights differ in length"));
    }
    if !(p >= 1.0) || !p.is_finite() {
        return Err(invalid("p", format!("need finite p >= 1, got {p}")));
    }
    if field.iter().any(|&f| !(f >= 0.0)) {
        return Err(invalid("field", "entries must be nonnegative"));
    }
    if weights.iter().any(|&w| !(w >= 0.0)) {
        return Err(invalid("weights", "weights must be nonnegative"));
    }
    let mut acc = 0.0;
    if p == p.trunc() && p <= 64.0 {
        let k = p as i32;
        for (f, w) in field.iter().zip(weights) {
            acc += f.powi(k) * w;
        }
    } else {
        for (f, w) in field.iter().zip(weights) {
            acc += f.powf(p) * w;
        }
    }
    Ok(acc.powf(1.0 / p))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormReport {
    pub t: f64,
    pub vol: f64,
    /// `‖A‖_{L^p}`
    pub a_lp: f64,
    /// `‖Å‖_{L^q}`
    pub aring_lq: f64,
    /// `‖H‖_{L^p}`
    pub h_lp: f64,
    /// `max |A|²`
    pub sup_a2: f64,
    pub p: f64,
    pub q: f64,
}

pub fn norm_report(t: f64, fields: &GeometryFields, p: f64, q: f64) -> Result<NormReport> {
    let w = &fields.weight;
    let a: Vec<f64> = fields.a2.iter().map(|x| x.sqrt()).collect();
    let ar: Vec<f64> = fields.aring2.iter().map(|x| x.max(0.0).sqrt()).collect();
    let h: Vec<f64> = fields.h.iter().map(|x| x.abs()).collect();
    Ok(NormReport {
        t,
        vol: fields.volume(),
        a_lp: lp_norm(&a, w, p)?,
        aring_lq: lp_norm(&ar, w, q)?,
        h_lp: lp_norm(&h, w, p)?,
        sup_a2: fields.max_a2(),
        p,
        q,
    })
}

//! Scalar growth ODEs of the form `φ' = a φ + Σ_k c_k φ^(1 + e_k)`.
//!
//! Every comparison ODE used in the integral estimates has this shape with
//! nonnegative coefficients. Coefficients and times can be astronomically
//! large or small, so the equation is written in `s = ln φ`,
//! `s' = a + Σ_k exp(ln c_k + e_k s)`, and integrated in time rescaled by
//! the initial rate. Times come back as [`LogScalar`].

use crate::error::{invalid, Error, Result};
use crate::logscalar::LogScalar;

/// `ds/dt = linear + Σ exp(ln_coeff + exponent * s)` with `s = ln φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthOde {
    linear: f64,
    terms: Vec<PowerTerm>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTerm {
    pub coeff: LogScalar,
    /// `e_k > 0`: the term is `c_k φ^(1 + e_k)` in the original variable.
    pub exponent: f64,
}

/// Target change of `s` per solver step, divided by the largest exponent.
const DS_STEP: f64 = 2e-3;
/// Treat the solution as escaped once `φ` has grown by `e^ESCAPE_LN`.
const ESCAPE_LN: f64 = 1500.0;

impl GrowthOde {
    pub fn new(linear: f64, terms: Vec<PowerTerm>) -> Result<Self> {
        if !(linear >= 0.0) || !linear.is_finite() {
            return Err(invalid(
                "linear",
                "linear rate must be finite and nonnegative",
            ));
        }
        if terms
            .iter()
            .any(|t| !(t.exponent > 0.0) || !t.exponent.is_finite())
        {
            return Err(invalid("exponent", "power exponents must be positive"));
        }
        if linear == 0.0 && terms.iter().all(|t| t.coeff.is_zero()) {
            return Err(invalid("rate", "the right-hand side vanishes identically"));
        }
        Ok(GrowthOde { linear, terms })
    }

    /// `ln(ds/dt)` at `s`.
    pub fn ln_rate(&self, s: f64) -> f64 {
        let mut logs = [f64::NEG_INFINITY; 8];
        let mut k = 0;
        if self.linear > 0.0 {
            logs[0] = self.linear.ln();
            k = 1;
        }
        let mut hi = logs[0];
        let mut extra = Vec::new();
        for t in &self.terms {
            let l = t.coeff.ln() + t.exponent * s;
            if k < logs.len() {
                logs[k] = l;
                k += 1;
            } else {
                extra.push(l);
            }
            hi = hi.max(l);
        }
        if hi == f64::NEG_INFINITY {
            return hi;
        }
        let sum: f64 = logs[..k].iter().chain(&extra).map(|l| (l - hi).exp()).sum();
        hi + sum.ln()
    }

    fn max_exponent(&self) -> f64 {
        self.terms
            .iter()
            .filter(|t| !t.coeff.is_zero())
            .map(|t| t.exponent)
            .fold(1.0, f64::max)
    }

    fn has_power_terms(&self) -> bool {
        self.terms.iter().any(|t| !t.coeff.is_zero())
    }

    /// One RK4 step of `ds/dτ = exp(ln_rate(s) - ln_r0)`.
    fn rk4(&self, s: f64, dtau: f64, ln_r0: f64) -> f64 {
        let f = |x: f64| (self.ln_rate(x) - ln_r0).exp();
        let k1 = f(s);
        let k2 = f(s + 0.5 * dtau * k1);
        let k3 = f(s + 0.5 * dtau * k2);
        let k4 = f(s + dtau * k3);
        s + dtau / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    }

    /// First time the solution started at `s0` reaches `s1 > s0`.
    ///
    /// RK4 in rescaled time; the crossing step is located by bisection of
    /// the step length to `1e-12` relative in time.
    pub fn first_passage(&self, s0: f64, s1: f64) -> Result<LogScalar> {
        if !(s1 > s0) || !s0.is_finite() || !s1.is_finite() {
            return Err(invalid("threshold", "need finite s0 < s1"));
        }
        let ln_r0 = self.ln_rate(s0);
        let ds = DS_STEP / self.max_exponent();
        let ds = ds.min((s1 - s0) / 200.0);
        let (mut s, mut tau) = (s0, 0.0_f64);
        let mut steps = 0usize;
        loop {
            let rate = (self.ln_rate(s) - ln_r0).exp();
            let dtau = ds / rate;
            let next = self.rk4(s, dtau, ln_r0);
            if !next.is_finite() {
                return Err(Error::Solver(format!("non-finite state at s = {s}")));
            }
            if next >= s1 {
                let (mut lo, mut hi) = (0.0, dtau);
                while hi - lo > 1e-12 * (tau + hi) {
                    let mid = 0.5 * (lo + hi);
                    if self.rk4(s, mid, ln_r0) >= s1 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                tau += 0.5 * (lo + hi);
                break;
            }
            s = next;
            tau += dtau;
            steps += 1;
            if steps > 50_000_000 {
                return Err(Error::Solver("step budget exhausted".into()));
            }
        }
        Ok(LogScalar::from_ln_unchecked(tau.ln() - ln_r0))
    }

    /// Time at which the solution from `s0` escapes to infinity, or `None`
    /// if it exists for all time.
    ///
    /// Composite Simpson quadrature of `∫ ds / rate(s)` up to the point where
    /// the fastest-growing term dominates by `e^40`, plus its exact tail.
    pub fn escape_time(&self, s0: f64) -> Option<LogScalar> {
        if !self.has_power_terms() {
            return None;
        }
        let top = *self
            .terms
            .iter()
            .filter(|t| !t.coeff.is_zero())
            .max_by(|a, b| a.exponent.total_cmp(&b.exponent))?;
        let others = |s: f64| -> f64 {
            let rest = GrowthOde {
                linear: self.linear,
                terms: self
                    .terms
                    .iter()
                    .filter(|t| !t.coeff.is_zero() && **t != top)
                    .copied()
                    .collect(),
            };
            if rest.linear == 0.0 && rest.terms.is_empty() {
                f64::NEG_INFINITY
            } else {
                rest.ln_rate(s)
            }
        };
        let dominates = |s: f64| top.coeff.ln() + top.exponent * s >= others(s) + 40.0;
        let mut span = 1.0 / top.exponent;
        while !dominates(s0 + span) {
            span *= 2.0;
            if span > 1e8 {
                return None;
            }
        }
        let s_end = s0 + span;
        let ln_r0 = self.ln_rate(s0);
        let m = ((span * top.exponent * 400.0).ceil() as usize).clamp(2000, 4_000_000) & !1;
        let h = span / m as f64;
        let g = |s: f64| (ln_r0 - self.ln_rate(s)).exp();
        let mut acc = g(s0) + g(s_end);
        for k in 1..m {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * g(s0 + k as f64 * h);
        }
        let body = acc * h / 3.0;
        let tail = (ln_r0 - top.coeff.ln() - top.exponent * s_end).exp() / top.exponent;
        Some(LogScalar::from_ln_unchecked((body + tail).ln() - ln_r0))
    }

    /// `s(t)` at each requested time (ascending, nonnegative), `None` once
    /// the solution has escaped.
    pub fn solve_at(&self, s0: f64, times: &[f64]) -> Result<Vec<Option<f64>>> {
        if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|&t| t < 0.0) {
            return Err(invalid(
                "times",
                "sample times must be ascending and nonnegative",
            ));
        }
        let ln_r0 = self.ln_rate(s0);
        let r0 = ln_r0.exp();
        let ds = DS_STEP / self.max_exponent();
        let mut out = Vec::with_capacity(times.len());
        let (mut s, mut tau) = (s0, 0.0_f64);
        let mut escaped = false;
        for &t in times {
            let target = t * r0;
            while !escaped && tau < target {
                let rate = (self.ln_rate(s) - ln_r0).exp();
                let free = ds / rate;
                if free <= f64::EPSILON * tau {
                    // no further progress possible at this resolution
                    escaped = true;
                    break;
                }
                let dtau = free.min(target - tau);
                s = self.rk4(s, dtau, ln_r0);
                tau += dtau;
                if !s.is_finite() || s - s0 > ESCAPE_LN {
                    escaped = true;
                }
            }
            out.push((!escaped).then_some(s));
        }
        Ok(out)
    }
}

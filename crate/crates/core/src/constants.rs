//! The explicit constant chain, from the Michael–Simon constant to the
//! pinching constant `C_{n,p}`.
//!
//! All quantities are carried as [`LogScalar`]: the Sobolev constant alone
//! is `C_n^(γ₀+1)` and the later constants raise it to further powers.

use std::f64::consts::{LN_2, PI};

use crate::error::{invalid, Result};
use crate::logscalar::LogScalar;
use crate::ode::{GrowthOde, PowerTerm};
use crate::special::ln_unit_ball_volume;

/// Literal `200²` appearing in the mixed-exponent chain.
const MIXED_WEIGHT: f64 = 40_000.0;

fn pos(x: f64) -> LogScalar {
    debug_assert!(x > 0.0, "expected a positive constant, got {x}");
    LogScalar::new(x).expect("finite positive constant")
}

fn check_dimension(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(invalid("n", format!("dimension {n} is below {min}")));
    }
    Ok(())
}

fn check_exponent(n: usize, p: f64) -> Result<()> {
    if !p.is_finite() || p <= n as f64 {
        return Err(invalid("p", format!("need p > n = {n}, got {p}")));
    }
    Ok(())
}

fn check_bound(bound: f64) -> Result<()> {
    if !(bound > 0.0) || !bound.is_finite() {
        return Err(invalid(
            "lambda",
            format!("norm bound must be positive, got {bound}"),
        ));
    }
    Ok(())
}

fn check_q(q: f64) -> Result<()> {
    if !(q > 1.0) || !q.is_finite() {
        return Err(invalid("q", format!("need q > 1, got {q}")));
    }
    Ok(())
}

/// `c_n = 4^(n+1) σ_n^(-1/n)` with `σ_n` the volume of the unit ball.
pub fn michael_simon_constant(n: usize) -> Result<LogScalar> {
    check_dimension(n, 2)?;
    let nf = n as f64;
    let ln = (nf + 1.0) * 4f64.ln() - ln_unit_ball_volume(n as u32) / nf;
    Ok(LogScalar::from_ln_unchecked(ln))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevConstants {
    /// `n^((n-2)/(n-1)) c_n^((n-2)/(n-1))`
    pub c_tilde: LogScalar,
    /// `(2 c̃_n)^(2(n-1)/(n-2))`
    pub c_hat: LogScalar,
    /// `4 ĉ_n`
    pub c_big: LogScalar,
    /// `n(α₀+n-2) / ((n-2)(α₀-n))`
    pub gamma0: f64,
    /// `C_n^(γ₀+1)`
    pub c_n_alpha: LogScalar,
}

pub fn sobolev_constant(n: usize, alpha0: f64) -> Result<SobolevConstants> {
    check_dimension(n, 3)?;
    if !alpha0.is_finite() || alpha0 <= n as f64 {
        return Err(invalid(
            "alpha0",
            format!("need alpha0 > n = {n}, got {alpha0}"),
        ));
    }
    let nf = n as f64;
    let cn = michael_simon_constant(n)?;
    let e = (nf - 2.0) / (nf - 1.0);
    let c_tilde = (pos(nf) * cn).powf(e);
    let c_hat = (pos(2.0) * c_tilde).powf(1.0 / e * 2.0);
    let c_big = pos(4.0) * c_hat;
    let gamma0 = nf * (alpha0 + nf - 2.0) / ((nf - 2.0) * (alpha0 - nf));
    Ok(SobolevConstants {
        c_tilde,
        c_hat,
        c_big,
        gamma0,
        c_n_alpha: c_big.powf(gamma0 + 1.0),
    })
}

/// Sobolev constant at `α₀ = p`, the `C_{n,p}` of the integral estimates.
fn sobolev_at(n: usize, p: f64) -> Result<LogScalar> {
    Ok(sobolev_constant(n, p)?.c_n_alpha)
}

pub fn c1(n: usize, p: f64) -> Result<LogScalar> {
    check_dimension(n, 3)?;
    check_exponent(n, p)?;
    let nf = n as f64;
    let k = sobolev_at(n, p)?.powf(nf / p);
    let e = nf / (p - nf);
    let first = pos(nf).powf(e) * k;
    let second = k * pos((p - nf) / p) * (pos(3.0 * nf * p / (8.0 * (p - 2.0))) * k).powf(e);
    Ok(pos(1.5 * p) * (first + second))
}

/// The comparison ODE for `φ = ∫|A|^p dμ`:
/// `φ' = npφ + (3p/2) C^(n/p) φ^((p+2)/p) + c₁ φ^((p-n+2)/(p-n))`.
pub fn a_lp_ode(n: usize, p: f64) -> Result<GrowthOde> {
    check_dimension(n, 3)?;
    check_exponent(n, p)?;
    let nf = n as f64;
    let k = sobolev_at(n, p)?.powf(nf / p);
    GrowthOde::new(
        nf * p,
        vec![
            PowerTerm {
                coeff: pos(1.5 * p) * k,
                exponent: 2.0 / p,
            },
            PowerTerm {
                coeff: c1(n, p)?,
                exponent: 2.0 / (p - nf),
            },
        ],
    )
}

/// Conservative closed-form time during which `‖A‖_{L^p} ≤ 2Λ`:
/// `p ln 2 / K` with `K = p [np + (3p/2) C^(n/p) (2Λ)² + c₁ (2Λ)^(2p/(p-n))]`.
pub fn t1_bound(n: usize, p: f64, bound: f64) -> Result<LogScalar> {
    check_bound(bound)?;
    let nf = n as f64;
    let c1 = c1(n, p)?;
    let k = sobolev_at(n, p)?.powf(nf / p);
    let top = pos(2.0 * bound);
    let rate = pos(nf * p) + pos(1.5 * p) * k * top.powf(2.0) + c1 * top.powf(2.0 * p / (p - nf));
    Ok(pos(p * LN_2) / (pos(p) * rate))
}

/// First time the comparison ODE started at `Λ^p` reaches `(2Λ)^p`.
pub fn t1_ode(n: usize, p: f64, bound: f64) -> Result<LogScalar> {
    check_bound(bound)?;
    let ode = a_lp_ode(n, p)?;
    let s0 = p * bound.ln();
    ode.first_passage(s0, s0 + p * LN_2)
}

/// Constants of the small-`‖Å‖_{L^q}` chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracelessChain {
    pub t1: LogScalar,
    pub c2: LogScalar,
    pub t2: LogScalar,
    pub c3: LogScalar,
    pub c4: LogScalar,
    /// `ε₀` of this chain, the threshold `C₁`.
    pub eps0: LogScalar,
}

fn check_chain(n: usize, p: f64, q: f64, bound: f64) -> Result<()> {
    check_dimension(n, 3)?;
    check_exponent(n, p)?;
    check_q(q)?;
    check_bound(bound)
}

/// `1 + n^(p/(p-n)) (2Λ)^(2p/(p-n))`
fn weighted_bound_factor(n: usize, p: f64, bound: f64) -> LogScalar {
    let nf = n as f64;
    let e = p / (p - nf);
    LogScalar::ONE + pos(nf).powf(e) * pos(2.0 * bound).powf(2.0 * e)
}

pub fn c2(n: usize, p: f64, q: f64, bound: f64) -> Result<LogScalar> {
    check_chain(n, p, q, bound)?;
    let nf = n as f64;
    let lk = pos(2.0 * bound).powf(2.0) * sobolev_at(n, p)?.powf(nf / p);
    let b = weighted_bound_factor(n, p, bound);
    let first = lk * b.powf(nf / p) / pos(q).powf(p / (p - nf));
    let inner = pos(13.0 * q / (3.0 * (q - 1.0)) * nf / p) * lk;
    let second = lk * pos((p - nf) / p) * inner.powf(nf / (p - nf));
    Ok(pos(13.0) * (first + second))
}

pub fn t2(n: usize, p: f64, q: f64, bound: f64) -> Result<LogScalar> {
    let t1 = t1_bound(n, p, bound)?;
    let c2 = c2(n, p, q, bound)?;
    let nf = n as f64;
    Ok(t1.min(pos(q * LN_2) / (c2 * pos(q).powf(p / (p - nf)))))
}

pub fn c3(n: usize, p: f64, q: f64, bound: f64) -> Result<LogScalar> {
    let t2 = t2(n, p, q, bound)?;
    let b = weighted_bound_factor(n, p, bound);
    Ok(sobolev_at(n, p)? * pos(q / (q - 1.0)).max(b * t2))
}

fn eps0_from(n: usize, c: LogScalar) -> LogScalar {
    let num = if n == 3 { 4.0 / 3.0 } else { 2.0 };
    (pos(num) / c).sqrt()
}

/// `c₄` and `C₁ = ε₀`.
pub fn c4_and_c1(n: usize, p: f64, q: f64, bound: f64) -> Result<TracelessChain> {
    check_chain(n, p, q, bound)?;
    let nf = n as f64;
    let t1 = t1_bound(n, p, bound)?;
    let c2 = c2(n, p, q, bound)?;
    let t2 = t2(n, p, q, bound)?;
    let c3 = c3(n, p, q, bound)?;
    let mu = pos(1.0 + 2.0 / nf).powf(nf * p * (nf + 2.0) / (2.0 * q * (p - nf)));
    let growth =
        c2 * pos(q).powf(2.0 * nf / (p - nf) + 1.0) + pos((nf + 2.0).powi(2) / (2.0 * nf)) / t2;
    let c4 = pos(4.0) * mu * c3.powf(nf / q) * growth.powf((nf + 2.0) / q) * t2.powf(2.0 / q);
    Ok(TracelessChain {
        t1,
        c2,
        t2,
        c3,
        c4,
        eps0: eps0_from(n, c4),
    })
}

/// Constants of the mixed-exponent chain (`q > n`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedChain {
    pub c5: LogScalar,
    pub c6: LogScalar,
    pub t1: LogScalar,
    pub c7: LogScalar,
    pub c8: LogScalar,
    pub t2: LogScalar,
    pub t0: LogScalar,
    pub c9: LogScalar,
    pub c10: LogScalar,
    /// `ε₀` of this chain, the threshold `C₂`.
    pub eps0: LogScalar,
}

/// `max{n/(p-n), n/(q-n)} + 1`
pub fn mixed_exponent(n: usize, p: f64, q: f64) -> f64 {
    let nf = n as f64;
    (nf / (p - nf)).max(nf / (q - nf)) + 1.0
}

pub fn mixed_chain(n: usize, p: f64, q: f64, bound: f64) -> Result<MixedChain> {
    check_chain(n, p, q, bound)?;
    let nf = n as f64;
    if q <= nf {
        return Err(invalid("q", format!("need q > n = {n}, got {q}")));
    }
    let c = sobolev_at(n, p)?;
    let kq = c.powf(nf / q);
    let kp = c.powf(nf / p);
    let l2 = pos(2.0 * bound).powf(2.0);
    let b = LogScalar::ONE + pos(2.0 * bound).powf(2.0 * p / (p - nf));
    let m1 = mixed_exponent(n, p, q);
    let w = pos(MIXED_WEIGHT);
    let two_n = pos(2.0 / nf);

    let c5 = pos(2.0) * w * kq * pos(nf / q) + two_n * l2 * kp * pos(nf / p);
    let x5 = c5 * pos(p / (4.0 * (p - 2.0)));
    let c6 = pos(2.0) * w * b.powf(nf / q) * kq
        + pos(2.0) * w * kq * pos((q - nf) / q) * x5.powf(nf / (q - nf))
        + two_n * l2 * b.powf(nf / p) * kp
        + two_n * l2 * kp * pos((p - nf) / p) * x5.powf(nf / (p - nf))
        + pos(2.0 * nf);
    let t1 = pos(p * 1.5f64.ln()) / (c6 * pos(p / 2.0).powf(m1));

    let c7 = pos(13.0) * w * kq * pos(nf / q) + two_n * l2 * kp * pos(nf / p);
    let x7 = c7 * pos(q / (3.0 * (q - 1.0)));
    let c8 = pos(13.0) * w * b.powf(nf / q) * kq
        + pos(13.0) * w * kq * pos((q - nf) / q) * x7.powf(nf / (q - nf))
        + two_n * l2 * b.powf(nf / p) * kp
        + two_n * l2 * kp * pos((p - nf) / p) * x7.powf(nf / (p - nf));
    let t2 = pos(p * 1.5f64.ln()) / (c8 * pos(q).powf(m1));

    let t0 = t1.min(t2);
    let c9 = c * pos(q / (q - 1.0)).max(b * t0);
    let q_hat = nf * (nf + 2.0) / (4.0 * q) * m1;
    let growth = c8 * pos(q).powf(m1) + pos((nf + 2.0).powi(2) / nf) / t0;
    let c10 = pos(4.0)
        * pos(1.0 + 2.0 / nf).powf(2.0 * q_hat)
        * c9.powf(nf / q)
        * growth.powf((nf + 2.0) / q)
        * (t0 / pos(2.0)).powf(2.0 / q);
    Ok(MixedChain {
        c5,
        c6,
        t1,
        c7,
        c8,
        t2,
        t0,
        c9,
        c10,
        eps0: eps0_from(n, c10),
    })
}

/// The two thresholds and their composition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PinchingParts {
    /// `C₁(n, p, p, 100)`
    pub first: LogScalar,
    /// `C₂(n, p, p, 100√n)`
    pub second: LogScalar,
    /// `min{100, max{C₁, C₂}}`
    pub value: LogScalar,
}

pub fn pinching_parts(n: usize, p: f64) -> Result<PinchingParts> {
    check_dimension(n, 3)?;
    check_exponent(n, p)?;
    let first = c4_and_c1(n, p, p, 100.0)?.eps0;
    let second = mixed_chain(n, p, p, 100.0 * (n as f64).sqrt())?.eps0;
    Ok(PinchingParts {
        first,
        second,
        value: pos(100.0).min(first.max(second)),
    })
}

/// `C_{n,p} = min{100, max{C₁(n,p,p,100), C₂(n,p,p,100√n)}}`.
///
/// Returned in log form: for most `(n, p)` the value is far below the
/// smallest positive `f64`.
pub fn pinching_constant(n: usize, p: f64) -> Result<LogScalar> {
    Ok(pinching_parts(n, p)?.value)
}

/// Which integral estimate feeds the Moser iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoserVariant {
    /// Growth `c q^(p/(p-n))`, constants `(c₂, c₃)`.
    Traceless,
    /// Growth `c q^(max{n/(p-n), n/(q-n)}+1)`, constants `(c₈, c₉)`.
    Mixed,
}

/// Bound on `|Å|²` at time `t` from the space-time integral
/// `J = ∫₀^t ∫ |Å|^q dμ dt`:
/// `(1+2/n)^(n(n+2)e/(2q)) c₃^(n/q) (c₂ q^e + (n+2)²/(2nt))^((n+2)/q) J^(2/q)`
/// with `e` the growth exponent of the variant.
#[allow(clippy::too_many_arguments)]
pub fn moser_sup_bound(
    n: usize,
    p: f64,
    q: f64,
    c2_star: LogScalar,
    c3_star: LogScalar,
    t: f64,
    j: f64,
    variant: MoserVariant,
) -> Result<LogScalar> {
    check_dimension(n, 3)?;
    check_exponent(n, p)?;
    check_q(q)?;
    if !(t > 0.0) || !t.is_finite() {
        return Err(invalid("t", format!("need t > 0, got {t}")));
    }
    if !(j >= 0.0) || !j.is_finite() {
        return Err(invalid(
            "j",
            format!("space-time integral must be nonnegative, got {j}"),
        ));
    }
    let nf = n as f64;
    let e = match variant {
        MoserVariant::Traceless => p / (p - nf),
        MoserVariant::Mixed => mixed_exponent(n, p, q),
    };
    let growth = c2_star * pos(q).powf(e) + pos((nf + 2.0).powi(2) / (2.0 * nf * t));
    Ok(pos(1.0 + 2.0 / nf).powf(nf * (nf + 2.0) * e / (2.0 * q))
        * c3_star.powf(nf / q)
        * growth.powf((nf + 2.0) / q)
        * LogScalar::new(j)?.powf(2.0 / q))
}

/// One named constant with the formula that defines it.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainEntry {
    pub name: &'static str,
    pub value: LogScalar,
    pub provenance: &'static str,
}

/// Every named constant for one parameter set, in order of definition.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantChain {
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub alpha0: f64,
    pub bound: f64,
    pub entries: Vec<ChainEntry>,
}

impl ConstantChain {
    /// Builds the chain with `α₀ = p`. Both sub-chains are evaluated at the
    /// same `(q, Λ)`, so `q > n` is required.
    pub fn new(n: usize, p: f64, q: f64, bound: f64) -> Result<Self> {
        check_chain(n, p, q, bound)?;
        let sigma = LogScalar::from_ln_unchecked(ln_unit_ball_volume(n as u32));
        let cn = michael_simon_constant(n)?;
        let sob = sobolev_constant(n, p)?;
        let c1 = c1(n, p)?;
        let lo = c4_and_c1(n, p, q, bound)?;
        let mid = mixed_chain(n, p, q, bound)?;
        let pin = pinching_constant(n, p)?;
        let e = |name, value, provenance| ChainEntry {
            name,
            value,
            provenance,
        };
        let entries = vec![
            e("sigma_n", sigma, "pi^(n/2) / Gamma(n/2 + 1)"),
            e("c_n", cn, "4^(n+1) sigma_n^(-1/n)"),
            e("c_tilde_n", sob.c_tilde, "n^((n-2)/(n-1)) c_n^((n-2)/(n-1))"),
            e("c_hat_n", sob.c_hat, "(2 c_tilde_n)^(2(n-1)/(n-2))"),
            e("C_n", sob.c_big, "4 c_hat_n"),
            e(
                "gamma_0",
                pos(sob.gamma0),
                "n(alpha0+n-2) / ((n-2)(alpha0-n))",
            ),
            e("C_n_alpha0", sob.c_n_alpha, "C_n^(gamma_0+1)"),
            e(
                "c_1",
                c1,
                "(3p/2)(n^(n/(p-n)) C^(n/p) + C^(n/p) (p-n)/p (3npC^(n/p)/(8(p-2)))^(n/(p-n)))",
            ),
            e(
                "T_1",
                lo.t1,
                "p ln2 / (p [np + (3p/2) C^(n/p) (2L)^2 + c_1 (2L)^(2p/(p-n))])",
            ),
            e(
                "c_2",
                lo.c2,
                "13((2L)^2 C^(n/p) (1+n^(p/(p-n))(2L)^(2p/(p-n)))^(n/p) q^-(1+n/(p-n)) + (2L)^2 C^(n/p) (p-n)/p (13q(2L)^2 C^(n/p)(n/p)/(3(q-1)))^(n/(p-n)))",
            ),
            e("T_2", lo.t2, "min{T_1, q ln2 / (c_2 q^(p/(p-n)))}"),
            e(
                "c_3",
                lo.c3,
                "C max{q/(q-1), (1+n^(p/(p-n))(2L)^(2p/(p-n))) T_2}",
            ),
            e(
                "c_4",
                lo.c4,
                "4 (1+2/n)^(np(n+2)/(2q(p-n))) c_3^(n/q) (c_2 q^(2n/(p-n)+1) + (n+2)^2/(2n T_2))^((n+2)/q) T_2^(2/q)",
            ),
            e("C_1", lo.eps0, "(2/c_4)^(1/2) for n >= 4, (4/(3 c_4))^(1/2) for n = 3"),
            e(
                "c_5",
                mid.c5,
                "2 200^2 C^(n/q) n/q + (2/n)(2L)^2 C^(n/p) n/p",
            ),
            e(
                "c_6",
                mid.c6,
                "2 200^2 B^(n/q) C^(n/q) + 2 200^2 C^(n/q) (q-n)/q (c_5 p/(4(p-2)))^(n/(q-n)) + (2/n)(2L)^2 B^(n/p) C^(n/p) + (2/n)(2L)^2 C^(n/p) (p-n)/p (c_5 p/(4(p-2)))^(n/(p-n)) + 2n, B = 1+(2L)^(2p/(p-n))",
            ),
            e("T_1'", mid.t1, "p ln(3/2) / (c_6 (p/2)^(max{n/(p-n), n/(q-n)}+1))"),
            e(
                "c_7",
                mid.c7,
                "13 200^2 C^(n/q) n/q + (2/n)(2L)^2 C^(n/p) n/p",
            ),
            e(
                "c_8",
                mid.c8,
                "13 200^2 B^(n/q) C^(n/q) + 13 200^2 C^(n/q) (q-n)/q (c_7 q/(3(q-1)))^(n/(q-n)) + (2/n)(2L)^2 B^(n/p) C^(n/p) + (2/n)(2L)^2 C^(n/p) (p-n)/p (c_7 q/(3(q-1)))^(n/(p-n))",
            ),
            e("T_2'", mid.t2, "p ln(3/2) / (c_8 q^(max{n/(p-n), n/(q-n)}+1))"),
            e("T_0", mid.t0, "min{T_1', T_2'}"),
            e("c_9", mid.c9, "C max{q/(q-1), (1+(2L)^(2p/(p-n))) T_0}"),
            e(
                "c_10",
                mid.c10,
                "4 (1+2/n)^(2 q_hat) c_9^(n/q) (c_8 q^(max{n/(p-n), n/(q-n)}+1) + (n+2)^2/(n T_0))^((n+2)/q) (T_0/2)^(2/q)",
            ),
            e("C_2", mid.eps0, "(2/c_10)^(1/2) for n >= 4, (4/(3 c_10))^(1/2) for n = 3"),
            e(
                "C_n_p",
                pin,
                "min{100, max{C_1(n,p,p,100), C_2(n,p,p,100 sqrt(n))}}",
            ),
        ];
        Ok(ConstantChain {
            n,
            p,
            q,
            alpha0: p,
            bound,
            entries,
        })
    }

    pub fn get(&self, name: &str) -> Option<LogScalar> {
        self.entries
            .iter()
            .find(|e| e.name == name)
            .map(|e| e.value)
    }
}

/// `256 (4π/3)^(-1/3)`, the three-dimensional Michael–Simon constant.
pub fn michael_simon_constant_3d() -> f64 {
    256.0 * (4.0 * PI / 3.0).powf(-1.0 / 3.0)
}

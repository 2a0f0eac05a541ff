//! Exact solutions: shrinking geodesic spheres and Clifford products.

use std::f64::consts::FRAC_PI_2;

use crate::error::{invalid, Error, Result};
use crate::special::{ln_unit_sphere_area, unit_sphere_area};

/// Default step of the fixed-step oracle integrators.
pub const ORACLE_DT: f64 = 1e-4;

/// Margin from `0` and `π/2` at which a Clifford product is declared
/// collapsed onto one of its factors.
pub const COLLAPSE_MARGIN: f64 = 1e-3;

/// Geodesic sphere of radius `r` about a point of `S^(n+d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UmbilicalState {
    pub n: usize,
    pub d: usize,
    pub r: f64,
    pub t: f64,
}

impl UmbilicalState {
    /// `|H| = n cot r`, pointing toward the centre.
    pub fn mean_curvature(&self) -> f64 {
        self.n as f64 / self.r.tan()
    }

    /// `|A|² = n cot² r`
    pub fn a2(&self) -> f64 {
        let c = 1.0 / self.r.tan();
        self.n as f64 * c * c
    }

    pub fn aring2(&self) -> f64 {
        0.0
    }

    /// `ω_n sin^n r`
    pub fn volume(&self) -> f64 {
        unit_sphere_area(self.n as u32) * self.r.sin().powi(self.n as i32)
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        umbilical_lp_norm(self.n, self.r, p)
    }
}

fn check_radius(r0: f64) -> Result<()> {
    if !(r0 > 0.0 && r0 <= FRAC_PI_2) {
        return Err(invalid(
            "r0",
            format!("radius must lie in (0, π/2], got {r0}"),
        ));
    }
    Ok(())
}

/// `-ln(cos r0) / n`, or `None` for the totally geodesic sphere `r0 = π/2`.
pub fn extinction_time(n: usize, r0: f64) -> Result<Option<f64>> {
    if n < 1 {
        return Err(invalid("n", "dimension must be positive"));
    }
    check_radius(r0)?;
    if r0 >= FRAC_PI_2 {
        return Ok(None);
    }
    Ok(Some(-r0.cos().ln() / n as f64))
}

/// `r(t) = arccos(cos r0 · e^(nt))`, the solution of `r' = -n cot r`.
pub fn umbilical_trajectory(n: usize, r0: f64, t: f64) -> Result<UmbilicalState> {
    if n < 2 {
        return Err(invalid("n", "dimension must be at least 2"));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(invalid(
            "t",
            format!("time must be finite and nonnegative, got {t}"),
        ));
    }
    let r = match extinction_time(n, r0)? {
        None => FRAC_PI_2,
        Some(extinction) if t >= extinction => {
            return Err(Error::PastExtinction { t, extinction });
        }
        Some(_) => (r0.cos() * (n as f64 * t).exp()).acos(),
    };
    Ok(UmbilicalState { n, d: 1, r, t })
}

/// `‖A‖_{L^p} = (ω_n sin^n r)^(1/p) √n cot r` on a geodesic sphere.
pub fn umbilical_lp_norm(n: usize, r: f64, p: f64) -> f64 {
    let nf = n as f64;
    (unit_sphere_area(n as u32) * r.sin().powi(n as i32)).powf(1.0 / p) * nf.sqrt() / r.tan()
}

/// `ln ‖A‖_{L^p}` on a geodesic sphere given `ln cot r`, usable when the
/// sphere is so close to totally geodesic that `cot r` underflows.
pub fn ln_umbilical_lp_norm(n: usize, ln_cot: f64, p: f64) -> f64 {
    let nf = n as f64;
    let ln_sin = -0.5 * (2.0 * ln_cot).exp().ln_1p();
    (ln_unit_sphere_area(n as u32) + nf * ln_sin) / p + 0.5 * nf.ln() + ln_cot
}

/// Product `S^k(cos θ) × S^(n-k)(sin θ) ⊂ S^(n+1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CliffordState {
    pub n: usize,
    pub k: usize,
    pub theta: f64,
    pub t: f64,
}

impl CliffordState {
    /// `(n-k) cot θ - k tan θ`
    pub fn mean_curvature(&self) -> f64 {
        let (nk, k) = ((self.n - self.k) as f64, self.k as f64);
        nk / self.theta.tan() - k * self.theta.tan()
    }

    /// `k tan² θ + (n-k) cot² θ`
    pub fn a2(&self) -> f64 {
        let (nk, k) = ((self.n - self.k) as f64, self.k as f64);
        let tn = self.theta.tan();
        k * tn * tn + nk / (tn * tn)
    }

    pub fn aring2(&self) -> f64 {
        let h = self.mean_curvature();
        (self.a2() - h * h / self.n as f64).max(0.0)
    }
}

/// Angle of the minimal product, `tan θ* = √((n-k)/k)`.
pub fn clifford_equilibrium(n: usize, k: usize) -> f64 {
    (((n - k) as f64) / k as f64).sqrt().atan()
}

/// `|A|²` of the minimal product from `tan² θ* = (n-k)/k`; equals `n`.
pub fn clifford_equilibrium_a2(n: usize, k: usize) -> f64 {
    let (nk, k) = ((n - k) as f64, k as f64);
    let tan2 = nk / k;
    k * tan2 + nk / tan2
}

/// `dθ/dt` of the product under the flow: `k tan θ - (n-k) cot θ`.
///
/// Volume `∝ cos^k θ sin^(n-k) θ` must decrease at rate `H²`, so the angle
/// moves against the mean curvature; the minimal product is unstable.
pub fn clifford_velocity(n: usize, k: usize, theta: f64) -> f64 {
    k as f64 * theta.tan() - (n - k) as f64 / theta.tan()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliffordTrajectory {
    pub states: Vec<CliffordState>,
    /// Time at which the product degenerated, if it did.
    pub collapse: Option<f64>,
}

/// Fixed-step RK4 integration of the Clifford angle.
pub fn clifford_trajectory(
    n: usize,
    k: usize,
    theta0: f64,
    t_end: f64,
    dt: f64,
) -> Result<CliffordTrajectory> {
    if n < 2 || k < 1 || k >= n {
        return Err(invalid(
            "k",
            format!("need 1 <= k <= n-1, got n = {n}, k = {k}"),
        ));
    }
    if !(theta0 > 0.0 && theta0 < FRAC_PI_2) {
        return Err(invalid(
            "theta0",
            format!("angle must lie in (0, π/2), got {theta0}"),
        ));
    }
    if !(dt > 0.0) || !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(invalid("dt", "need dt > 0 and a finite t_end >= 0"));
    }
    let f = |th: f64| clifford_velocity(n, k, th);
    let steps = (t_end / dt).round() as usize;
    let mut states = Vec::with_capacity(steps + 1);
    let mut theta = theta0;
    states.push(CliffordState {
        n,
        k,
        theta,
        t: 0.0,
    });
    for i in 1..=steps {
        let k1 = f(theta);
        let k2 = f(theta + 0.5 * dt * k1);
        let k3 = f(theta + 0.5 * dt * k2);
        let k4 = f(theta + dt * k3);
        theta += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        let t = i as f64 * dt;
        if !theta.is_finite() || theta <= COLLAPSE_MARGIN || theta >= FRAC_PI_2 - COLLAPSE_MARGIN {
            return Ok(CliffordTrajectory {
                states,
                collapse: Some(t),
            });
        }
        states.push(CliffordState { n, k, theta, t });
    }
    Ok(CliffordTrajectory {
        states,
        collapse: None,
    })
}

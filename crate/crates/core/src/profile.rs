//! Profile curves of rotationally symmetric hypersurfaces.
//!
//! A point `(w₁, w₂, z)` of the upper hemisphere of `S²` stands for the
//! `(n-1)`-sphere `{(w, z ω) : ω ∈ S^(n-1)}` in `S^(n+1) ⊂ R² × R^n`, so a
//! curve on the hemisphere sweeps out an `n`-dimensional hypersurface.
//! Curves either close up inside `z > 0` or run from pole to pole, with
//! endpoints on `z = 0`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{invalid, Error, Result};

pub type Point = [f64; 3];

pub(crate) fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: Point, b: Point) -> Point {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm(a: Point) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn normalize(a: Point) -> Point {
    let l = norm(a);
    [a[0] / l, a[1] / l, a[2] / l]
}

/// Great-circle distance between unit vectors.
pub(crate) fn geodesic_distance(a: Point, b: Point) -> f64 {
    norm(cross(a, b)).atan2(dot(a, b))
}

/// Mirror image across the plane `z = 0`.
pub(crate) fn reflect(a: Point) -> Point {
    [a[0], a[1], -a[2]]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Closure {
    /// Endpoints on `z = 0`.
    Poles,
    /// Periodic curve with `z > 0` everywhere.
    Closed,
}

/// Discrete profile curve and the dimension of the hypersurface it sweeps.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileState {
    pub n: usize,
    pub nodes: Vec<Point>,
    pub closure: Closure,
    pub t: f64,
}

/// Minimum number of nodes accepted by the geometry routines.
pub const MIN_NODES: usize = 16;

impl ProfileState {
    pub fn new(n: usize, nodes: Vec<Point>, closure: Closure) -> Result<Self> {
        if n < 2 {
            return Err(invalid("n", "hypersurface dimension must be at least 2"));
        }
        if nodes.len() < MIN_NODES {
            return Err(invalid("nodes", format!("need at least {MIN_NODES} nodes")));
        }
        for (i, p) in nodes.iter().enumerate() {
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite {
                    what: "profile node",
                });
            }
            if (norm(*p) - 1.0).abs() > 1e-12 {
                return Err(invalid("nodes", format!("node {i} is off the unit sphere")));
            }
            let interior = closure == Closure::Closed || (i > 0 && i + 1 < nodes.len());
            if interior && !(p[2] > 0.0) {
                return Err(invalid(
                    "nodes",
                    format!("node {i} is not above the plane z = 0"),
                ));
            }
        }
        if closure == Closure::Poles {
            let (a, b) = (nodes[0], nodes[nodes.len() - 1]);
            if a[2].abs() > 1e-14 || b[2].abs() > 1e-14 {
                return Err(invalid("nodes", "open curves must end on z = 0"));
            }
        }
        Ok(ProfileState {
            n,
            nodes,
            closure,
            t: 0.0,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Distance from each node to the next (the last entry closes the loop
    /// for closed curves; open curves have `len - 1` segments).
    pub fn segment_angles(&self) -> Vec<f64> {
        let m = self.segment_count();
        (0..m)
            .map(|i| geodesic_distance(self.nodes[i], self.nodes[(i + 1) % self.len()]))
            .collect()
    }

    pub fn segment_count(&self) -> usize {
        match self.closure {
            Closure::Poles => self.len() - 1,
            Closure::Closed => self.len(),
        }
    }
}

/// Point at geodesic distance `r` from `(1, 0, 0)` in direction `φ` of the
/// `(e₂, e₃)` plane.
fn circle_point(r: f64, phi: f64) -> Point {
    let (sr, cr) = r.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [cr, sr * cp, sr * sp]
}

fn pole_curve(n: usize, nodes: usize, radius: impl Fn(f64) -> f64) -> Result<ProfileState> {
    if nodes < MIN_NODES {
        return Err(invalid("nodes", format!("need at least {MIN_NODES} nodes")));
    }
    let pts = (0..nodes)
        .map(|i| {
            let phi = PI * i as f64 / (nodes - 1) as f64;
            let mut p = circle_point(radius(phi), phi);
            if i == 0 || i == nodes - 1 {
                p[2] = 0.0;
            }
            p
        })
        .collect();
    ProfileState::new(n, pts, Closure::Poles)
}

/// Geodesic sphere of radius `r0` about `(1, 0, …, 0)`.
pub fn geodesic_circle(n: usize, r0: f64, nodes: usize) -> Result<ProfileState> {
    if !(r0 > 0.0 && r0 <= FRAC_PI_2) {
        return Err(invalid(
            "r0",
            format!("radius must lie in (0, π/2], got {r0}"),
        ));
    }
    pole_curve(n, nodes, |_| r0)
}

/// The totally geodesic equator `x₁ = 0`.
pub fn equator(n: usize, nodes: usize) -> Result<ProfileState> {
    geodesic_circle(n, FRAC_PI_2, nodes)
}

/// Geodesic sphere with radius `r0 + δ cos(kφ)` along the profile.
pub fn perturbed_circle(
    n: usize,
    r0: f64,
    mode: u32,
    amplitude: f64,
    nodes: usize,
) -> Result<ProfileState> {
    if !(r0 - amplitude.abs() > 0.0 && r0 + amplitude.abs() < PI) {
        return Err(invalid(
            "amplitude",
            format!("radius {r0} ± {amplitude} leaves (0, π)"),
        ));
    }
    let state = pole_curve(n, nodes, |phi| r0 + amplitude * (mode as f64 * phi).cos())?;
    Ok(redistribute(&state))
}

/// Latitude circle `z = sin θ`: the product `S¹(cos θ) × S^(n-1)(sin θ)`.
pub fn latitude_circle(n: usize, theta: f64, nodes: usize) -> Result<ProfileState> {
    if !(theta > 0.0 && theta < FRAC_PI_2) {
        return Err(invalid(
            "theta0",
            format!("angle must lie in (0, π/2), got {theta}"),
        ));
    }
    if nodes < MIN_NODES {
        return Err(invalid("nodes", format!("need at least {MIN_NODES} nodes")));
    }
    let (st, ct) = theta.sin_cos();
    let pts = (0..nodes)
        .map(|i| {
            let psi = 2.0 * PI * i as f64 / nodes as f64;
            [ct * psi.cos(), ct * psi.sin(), st]
        })
        .collect();
    ProfileState::new(n, pts, Closure::Closed)
}

/// Fritsch–Carlson slopes of a monotone piecewise cubic through `(x, y)`.
fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let m = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..m - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    let mut d = vec![0.0; m];
    d[0] = delta[0];
    d[m - 1] = delta[m - 2];
    for k in 1..m - 1 {
        let (a, b) = (delta[k - 1], delta[k]);
        if a * b > 0.0 {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            d[k] = (w1 + w2) / (w1 / a + w2 / b);
        }
    }
    d
}

fn hermite(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> f64 {
    let h = x1 - x0;
    let s = (x - x0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * y0
        + (s3 - 2.0 * s2 + s) * h * d0
        + (-2.0 * s3 + 3.0 * s2) * y1
        + (s3 - s2) * h * d1
}

/// Resamples the curve at uniform arclength.
///
/// Each coordinate is interpolated against cumulative arclength with a
/// monotone cubic; pole endpoints are extended by their mirror images and
/// closed curves by periodic wrap so the end slopes are symmetric. Nodes
/// are projected back to the sphere afterwards.
pub fn redistribute(state: &ProfileState) -> ProfileState {
    let seg = state.segment_angles();
    let nn = state.len();
    // extended abscissae and points: one ghost on each side
    let mut xs = Vec::with_capacity(nn + 3);
    let mut pts = Vec::with_capacity(nn + 3);
    let total: f64 = seg.iter().sum();
    match state.closure {
        Closure::Poles => {
            xs.push(-seg[0]);
            pts.push(reflect(state.nodes[1]));
            let mut s = 0.0;
            for i in 0..nn {
                xs.push(s);
                pts.push(state.nodes[i]);
                if i < seg.len() {
                    s += seg[i];
                }
            }
            xs.push(total + seg[nn - 2]);
            pts.push(reflect(state.nodes[nn - 2]));
        }
        Closure::Closed => {
            xs.push(-seg[nn - 1]);
            pts.push(state.nodes[nn - 1]);
            let mut s = 0.0;
            for i in 0..nn {
                xs.push(s);
                pts.push(state.nodes[i]);
                s += seg[i];
            }
            xs.push(total);
            pts.push(state.nodes[0]);
            xs.push(total + seg[0]);
            pts.push(state.nodes[1]);
        }
    }
    let slopes: Vec<Vec<f64>> = (0..3)
        .map(|c| {
            let y: Vec<f64> = pts.iter().map(|p| p[c]).collect();
            pchip_slopes(&xs, &y)
        })
        .collect();
    let divisions = match state.closure {
        Closure::Poles => nn - 1,
        Closure::Closed => nn,
    };
    let mut out = Vec::with_capacity(nn);
    let mut k = 1; // interval [xs[k], xs[k+1]]
    for j in 0..nn {
        let target = total * j as f64 / divisions as f64;
        while k + 2 < xs.len() && xs[k + 1] < target {
            k += 1;
        }
        let mut p = [0.0; 3];
        for (c, pc) in p.iter_mut().enumerate() {
            *pc = hermite(
                xs[k],
                xs[k + 1],
                pts[k][c],
                pts[k + 1][c],
                slopes[c][k],
                slopes[c][k + 1],
                target,
            );
        }
        out.push(normalize(p));
    }
    if state.closure == Closure::Poles {
        out[0] = state.nodes[0];
        out[nn - 1] = state.nodes[nn - 1];
    }
    ProfileState {
        n: state.n,
        nodes: out,
        closure: state.closure,
        t: state.t,
    }
}

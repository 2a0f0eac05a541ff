//! Curvatures of the hypersurface swept by a profile curve.
//!
//! At a node `p` the curve direction carries the geodesic curvature `κ` of
//! the profile in `S²`, and the `n - 1` orbit directions share the principal
//! curvature `λ = -ν_z / z`, where `ν` is the unit normal of the curve in
//! `S²`. On the axis (`z = 0`) the two agree.

use crate::error::{Error, Result};
use crate::profile::{cross, dot, norm, reflect, Closure, Point, ProfileState};
use crate::special::unit_sphere_area;

/// Segments shorter than this are treated as a collapsed mesh.
pub const MIN_SPACING: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct GeometryFields {
    /// Geodesic curvature of the profile in `S²`, signed along `normal`.
    pub kappa: Vec<f64>,
    /// Principal curvature of the orbit directions.
    pub lambda: Vec<f64>,
    /// `κ + (n-1)λ`
    pub h: Vec<f64>,
    /// `|A|² = κ² + (n-1)λ²`
    pub a2: Vec<f64>,
    /// `|Å|² = (n-1)(κ-λ)²/n`
    pub aring2: Vec<f64>,
    /// Volume element `ω_(n-1) z^(n-1) Δs` of each node.
    pub weight: Vec<f64>,
    pub normal: Vec<Point>,
    pub tangent: Vec<Point>,
    /// Arclength of the segment from node `i` to `i + 1`.
    pub segment: Vec<f64>,
}

impl GeometryFields {
    pub fn max_a2(&self) -> f64 {
        self.a2.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_aring2(&self) -> f64 {
        self.aring2.iter().copied().fold(0.0, f64::max)
    }

    pub fn min_spacing(&self) -> f64 {
        self.segment.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn volume(&self) -> f64 {
        self.weight.iter().sum()
    }
}

/// Logarithm map of `S²` at `p`, given the distance `theta` to `q`.
fn log_map(p: Point, q: Point, theta: f64) -> Point {
    let c = dot(p, q);
    let v = [q[0] - c * p[0], q[1] - c * p[1], q[2] - c * p[2]];
    let s = norm(v);
    let f = if s > 0.0 { theta / s } else { 1.0 };
    [v[0] * f, v[1] * f, v[2] * f]
}

/// Curvature and frame at `p` from its neighbours at distances `sm`, `sp`,
/// second order on nonuniform meshes.
fn local_frame(prev: Point, p: Point, next: Point, sm: f64, sp: f64) -> (f64, Point, Point) {
    let up = log_map(p, next, sp);
    let um = log_map(p, prev, sm);
    let sum = sp + sm;
    let mut acc = [0.0; 3];
    let mut tan = [0.0; 3];
    for c in 0..3 {
        acc[c] = 2.0 * (up[c] / sp + um[c] / sm) / sum;
        tan[c] = sm / (sp * sum) * up[c] - sp / (sm * sum) * um[c];
    }
    let tl = norm(tan);
    let t = [tan[0] / tl, tan[1] / tl, tan[2] / tl];
    let nu = cross(p, t);
    (dot(acc, nu), t, nu)
}

pub fn geometry_from_profile(state: &ProfileState) -> Result<GeometryFields> {
    let nn = state.len();
    let nf = state.n as f64;
    let angles = state.segment_angles();
    for (i, &g) in angles.iter().enumerate() {
        if !(g >= MIN_SPACING) {
            return Err(Error::MeshFailure {
                node: i,
                spacing: g,
            });
        }
    }
    let mut kappa = vec![0.0; nn];
    let mut lambda = vec![0.0; nn];
    let mut normal = vec![[0.0; 3]; nn];
    let mut tangent = vec![[0.0; 3]; nn];
    let nodes = &state.nodes;
    for i in 0..nn {
        let p = nodes[i];
        let on_axis = state.closure == Closure::Poles && (i == 0 || i == nn - 1);
        let m = angles.len();
        let (prev, next, sm, sp) = match state.closure {
            Closure::Closed => (
                nodes[(i + nn - 1) % nn],
                nodes[(i + 1) % nn],
                angles[(i + m - 1) % m],
                angles[i],
            ),
            Closure::Poles if i == 0 => (reflect(nodes[1]), nodes[1], angles[0], angles[0]),
            Closure::Poles if i == nn - 1 => (
                nodes[nn - 2],
                reflect(nodes[nn - 2]),
                angles[m - 1],
                angles[m - 1],
            ),
            Closure::Poles => (nodes[i - 1], nodes[i + 1], angles[i - 1], angles[i]),
        };
        let (k, t, nu) = local_frame(prev, p, next, sm, sp);
        if !k.is_finite() {
            return Err(Error::NonFinite {
                what: "profile curvature",
            });
        }
        kappa[i] = k;
        tangent[i] = t;
        normal[i] = nu;
        lambda[i] = if on_axis { k } else { -nu[2] / p[2] };
    }
    let segment: Vec<f64> = angles
        .iter()
        .enumerate()
        .map(|(i, &g)| {
            let kbar = 0.5 * (kappa[i] + kappa[(i + 1) % nn]);
            g * (1.0 + kbar * kbar * g * g / 24.0)
        })
        .collect();
    let omega = unit_sphere_area(state.n as u32 - 1);
    let m = segment.len();
    let weight = (0..nn)
        .map(|i| {
            let left = match state.closure {
                Closure::Closed => segment[(i + m - 1) % m],
                Closure::Poles if i == 0 => 0.0,
                Closure::Poles => segment[i - 1],
            };
            let right = if i < m { segment[i] } else { 0.0 };
            let z = nodes[i][2].max(0.0);
            omega * z.powi(state.n as i32 - 1) * 0.5 * (left + right)
        })
        .collect();
    let h: Vec<f64> = (0..nn).map(|i| kappa[i] + (nf - 1.0) * lambda[i]).collect();
    let a2 = (0..nn)
        .map(|i| kappa[i] * kappa[i] + (nf - 1.0) * lambda[i] * lambda[i])
        .collect::<Vec<_>>();
    let aring2 = (0..nn)
        .map(|i| {
            let d = kappa[i] - lambda[i];
            ((nf - 1.0) * d * d / nf).min(a2[i])
        })
        .collect();
    Ok(GeometryFields {
        kappa,
        lambda,
        h,
        a2,
        aring2,
        weight,
        normal,
        tangent,
        segment,
    })
}

/// Extrinsic radius about the centroid axis: nodes sweep spheres
/// `{(w, zω)}` whose farthest point from `(w̄, 0)` is at distance
/// `√(|w - w̄|² + z²)`.
pub fn extrinsic_radius(state: &ProfileState) -> f64 {
    let nn = state.len() as f64;
    let (mx, my) = state
        .nodes
        .iter()
        .fold((0.0, 0.0), |(a, b), p| (a + p[0], b + p[1]));
    let (mx, my) = (mx / nn, my / nn);
    state
        .nodes
        .iter()
        .map(|p| ((p[0] - mx).powi(2) + (p[1] - my).powi(2) + p[2] * p[2]).sqrt())
        .fold(0.0, f64::max)
}

/// Smallest and largest geodesic distance of the nodes from the direction
/// of the volume-weighted centroid; `π/2` for all when the centroid
/// vanishes.
pub fn radius_range(state: &ProfileState, fields: &GeometryFields) -> (f64, f64) {
    let (mut cx, mut cy) = (0.0, 0.0);
    for (p, w) in state.nodes.iter().zip(&fields.weight) {
        cx += w * p[0];
        cy += w * p[1];
    }
    let l = (cx * cx + cy * cy).sqrt();
    if l < 1e-12 * fields.volume().max(f64::MIN_POSITIVE) {
        return (std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2);
    }
    let c = [cx / l, cy / l, 0.0];
    state
        .nodes
        .iter()
        .map(|&p| dot(p, c).clamp(-1.0, 1.0).acos())
        .fold((f64::INFINITY, 0.0), |(lo, hi), r| (lo.min(r), hi.max(r)))
}

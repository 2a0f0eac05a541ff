//! Pointwise algebra of second fundamental forms.
//!
//! A second fundamental form at a point of an `n`-dimensional submanifold
//! with `d` normal directions is stored as `d` symmetric `n x n` blocks
//! `h[alpha][i][j]`, expressed in orthonormal tangent and normal frames.
//! Everything here is frame-invariant algebra: norms, the traceless split,
//! the reaction terms of the evolution equations and the slacks of the
//! pointwise inequalities those evolution equations are estimated with.

use rand::Rng;

use crate::error::{invalid, Error, Result};

/// Relative tolerance used when accepting almost-symmetric input.
const SYMMETRY_TOL: f64 = 1e-12;

/// Absolute slack tolerance, scaled by the natural power of |A|.
pub const SLACK_TOL: f64 = 1e-12;

/// Second fundamental form `h^alpha_ij` at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct SffTensor {
    n: usize,
    d: usize,
    h: Vec<f64>,
}

impl SffTensor {
    /// Builds a tensor from a flat array laid out as `[alpha][i][j]`.
    ///
    /// Entries must be finite and symmetric in `(i, j)` up to a relative
    /// `1e-12`; the stored tensor is exactly symmetrized.
    pub fn new(n: usize, d: usize, h: Vec<f64>) -> Result<Self> {
        if n < 1 {
            return Err(invalid("n", "dimension must be at least 1"));
        }
        if d < 1 {
            return Err(invalid("d", "codimension must be at least 1"));
        }
        if h.len() != d * n * n {
            return Err(invalid(
                "h",
                format!("expected {} entries, got {}", d * n * n, h.len()),
            ));
        }
        if h.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                what: "second fundamental form",
            });
        }
        let scale = h.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
        let mut t = SffTensor { n, d, h };
        for a in 0..d {
            for i in 0..n {
                for j in (i + 1)..n {
                    let (x, y) = (t.get(a, i, j), t.get(a, j, i));
                    let deviation = (x - y).abs();
                    if deviation > SYMMETRY_TOL * scale {
                        return Err(Error::NotSymmetric {
                            alpha: a,
                            i,
                            j,
                            deviation,
                        });
                    }
                    let m = 0.5 * (x + y);
                    t.set(a, i, j, m);
                    t.set(a, j, i, m);
                }
            }
        }
        Ok(t)
    }

    pub fn zeros(n: usize, d: usize) -> Self {
        SffTensor {
            n,
            d,
            h: vec![0.0; d * n * n],
        }
    }

    /// Builds a tensor from the upper triangle given by `f(alpha, i, j)`, `i <= j`.
    pub fn from_fn(
        n: usize,
        d: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let mut h = vec![0.0; d * n * n];
        for a in 0..d {
            for i in 0..n {
                for j in i..n {
                    let v = f(a, i, j);
                    h[(a * n + i) * n + j] = v;
                    h[(a * n + j) * n + i] = v;
                }
            }
        }
        SffTensor::new(n, d, h)
    }

    /// Totally umbilic tensor `h^alpha = (H^alpha / n) * Id`.
    pub fn umbilic(n: usize, mean_curvature: &[f64]) -> Result<Self> {
        let d = mean_curvature.len();
        SffTensor::from_fn(n, d, |a, i, j| {
            if i == j {
                mean_curvature[a] / n as f64
            } else {
                0.0
            }
        })
    }

    /// Hypersurface tensor with the given principal curvatures.
    pub fn diagonal(principal: &[f64]) -> Result<Self> {
        let n = principal.len();
        SffTensor::from_fn(n, 1, |_, i, j| if i == j { principal[i] } else { 0.0 })
    }

    /// Random tensor with i.i.d. entries uniform in `[-bound, bound]`,
    /// symmetrized by averaging with the transpose.
    pub fn random<R: Rng + ?Sized>(n: usize, d: usize, bound: f64, rng: &mut R) -> Self {
        let raw: Vec<f64> = (0..d * n * n)
            .map(|_| rng.gen_range(-bound..=bound))
            .collect();
        let mut h = vec![0.0; d * n * n];
        for a in 0..d {
            for i in 0..n {
                for j in 0..n {
                    h[(a * n + i) * n + j] =
                        0.5 * (raw[(a * n + i) * n + j] + raw[(a * n + j) * n + i]);
                }
            }
        }
        SffTensor { n, d, h }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn get(&self, alpha: usize, i: usize, j: usize) -> f64 {
        self.h[(alpha * self.n + i) * self.n + j]
    }

    #[inline]
    fn set(&mut self, alpha: usize, i: usize, j: usize, v: f64) {
        self.h[(alpha * self.n + i) * self.n + j] = v;
    }

    /// The `n x n` block of normal direction `alpha`, row major.
    pub fn block(&self, alpha: usize) -> &[f64] {
        let nn = self.n * self.n;
        &self.h[alpha * nn..(alpha + 1) * nn]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.h
    }

    /// Mean curvature components `H^alpha = sum_i h^alpha_ii`.
    pub fn mean_curvature(&self) -> Vec<f64> {
        (0..self.d)
            .map(|a| (0..self.n).map(|i| self.get(a, i, i)).sum())
            .collect()
    }

    /// Applies an orthogonal change of frames: `q` acts on tangent indices
    /// (`n x n`), `r` on normal indices (`d x d`), both row major.
    pub fn rotated(&self, q: &[f64], r: &[f64]) -> Result<Self> {
        let (n, d) = (self.n, self.d);
        if q.len() != n * n || r.len() != d * d {
            return Err(invalid("frame", "rotation matrices have the wrong shape"));
        }
        // normal mixing first, then tangent conjugation q h q^T
        let mut mixed = vec![0.0; d * n * n];
        for b in 0..d {
            for a in 0..d {
                let c = r[b * d + a];
                if c == 0.0 {
                    continue;
                }
                for k in 0..n * n {
                    mixed[b * n * n + k] += c * self.h[a * n * n + k];
                }
            }
        }
        let mut out = vec![0.0; d * n * n];
        let mut tmp = vec![0.0; n * n];
        for b in 0..d {
            let blk = &mixed[b * n * n..(b + 1) * n * n];
            for i in 0..n {
                for l in 0..n {
                    tmp[i * n + l] = (0..n).map(|k| q[i * n + k] * blk[k * n + l]).sum();
                }
            }
            for i in 0..n {
                for j in 0..n {
                    out[b * n * n + i * n + j] =
                        (0..n).map(|l| tmp[i * n + l] * q[j * n + l]).sum();
                }
            }
        }
        SffTensor::new(n, d, out)
    }

    /// `s * h`.
    pub fn scaled(&self, s: f64) -> Self {
        SffTensor {
            n: self.n,
            d: self.d,
            h: self.h.iter().map(|x| s * x).collect(),
        }
    }
}

/// Squared norms of a second fundamental form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarInvariants {
    /// |A|^2
    pub a2: f64,
    /// |H|^2
    pub h2: f64,
    /// |Å|^2
    pub aring2: f64,
}

/// Traceless part of `A` and its decomposition along the mean curvature
/// direction.
#[derive(Debug, Clone, PartialEq)]
pub struct TracelessSplit {
    pub aring: SffTensor,
    pub hvec: Vec<f64>,
    /// |Å_H|^2, the traceless part along H/|H|.
    pub a_h_norm2: f64,
    /// |Å_I|^2 = |Å|^2 - |Å_H|^2.
    pub a_i_norm2: f64,
}

/// Quartic reaction terms of the evolution of |A|^2 and |H|^2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReactionTerms {
    /// sum_{a,b} (sum_ij h^a_ij h^b_ij)^2
    pub r1: f64,
    /// sum_{a,b} |[h^a, h^b]|^2
    pub r2: f64,
    /// sum_ij (sum_a H^a h^a_ij)^2
    pub r3: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AndrewsBakerSlacks {
    /// Middle minus left of the two-sided reaction estimate.
    pub first: f64,
    /// Right minus middle.
    pub second: f64,
}

/// Householder reflection (row major `d x d`) sending the unit vector `u`
/// to the first coordinate axis.
pub fn householder_to_first_axis(u: &[f64]) -> Vec<f64> {
    let d = u.len();
    let mut p = vec![0.0; d * d];
    for k in 0..d {
        p[k * d + k] = 1.0;
    }
    let mut v = u.to_vec();
    v[0] -= 1.0;
    let vv: f64 = v.iter().map(|x| x * x).sum();
    if vv < 1e-30 {
        return p;
    }
    for a in 0..d {
        for b in 0..d {
            p[a * d + b] -= 2.0 * v[a] * v[b] / vv;
        }
    }
    p
}

pub fn scalar_invariants(h: &SffTensor) -> ScalarInvariants {
    let n = h.n as f64;
    let a2: f64 = h.h.iter().map(|x| x * x).sum();
    let hv = h.mean_curvature();
    let h2: f64 = hv.iter().map(|x| x * x).sum();
    // from the traceless components directly, so it is never negative
    let mut aring2 = 0.0;
    for a in 0..h.d {
        let shift = hv[a] / n;
        for i in 0..h.n {
            for j in 0..h.n {
                let x = h.get(a, i, j) - if i == j { shift } else { 0.0 };
                aring2 += x * x;
            }
        }
    }
    ScalarInvariants { a2, h2, aring2 }
}

pub fn traceless_split(h: &SffTensor) -> TracelessSplit {
    let (n, d) = (h.n, h.d);
    let hvec = h.mean_curvature();
    let mut aring = h.clone();
    for a in 0..d {
        let shift = hvec[a] / n as f64;
        for i in 0..n {
            let v = aring.get(a, i, i) - shift;
            aring.set(a, i, i, v);
        }
    }
    let hnorm = hvec.iter().map(|x| x * x).sum::<f64>().sqrt();
    let aring_norm2: f64 = aring.h.iter().map(|x| x * x).sum();
    if hnorm == 0.0 {
        return TracelessSplit {
            aring,
            hvec,
            a_h_norm2: 0.0,
            a_i_norm2: aring_norm2,
        };
    }
    let u: Vec<f64> = hvec.iter().map(|x| x / hnorm).collect();
    let p = householder_to_first_axis(&u);
    let nn = n * n;
    let mut a_h_norm2 = 0.0;
    let mut a_i_norm2 = 0.0;
    for b in 0..d {
        let mut row = 0.0;
        for k in 0..nn {
            let v: f64 = (0..d).map(|a| p[b * d + a] * aring.h[a * nn + k]).sum();
            row += v * v;
        }
        if b == 0 {
            a_h_norm2 = row;
        } else {
            a_i_norm2 += row;
        }
    }
    TracelessSplit {
        aring,
        hvec,
        a_h_norm2,
        a_i_norm2,
    }
}

pub fn reaction_terms(h: &SffTensor) -> ReactionTerms {
    let (n, d) = (h.n, h.d);
    let nn = n * n;
    let mut r1 = 0.0;
    for a in 0..d {
        for b in 0..d {
            let g: f64 = (0..nn).map(|k| h.h[a * nn + k] * h.h[b * nn + k]).sum();
            r1 += g * g;
        }
    }
    let mut r2 = 0.0;
    for a in 0..d {
        for b in (a + 1)..d {
            let (x, y) = (h.block(a), h.block(b));
            for i in 0..n {
                for j in 0..n {
                    let mut c = 0.0;
                    for k in 0..n {
                        c += x[i * n + k] * y[k * n + j] - y[i * n + k] * x[k * n + j];
                    }
                    r2 += c * c;
                }
            }
        }
    }
    r2 *= 2.0;
    let hv = h.mean_curvature();
    let mut r3 = 0.0;
    for k in 0..nn {
        let s: f64 = (0..d).map(|a| hv[a] * h.h[a * nn + k]).sum();
        r3 += s * s;
    }
    ReactionTerms { r1, r2, r3 }
}

/// `3|A|^4 - 2 R1 - 2 R2`; nonnegative for every second fundamental form.
pub fn lili_slack(h: &SffTensor) -> f64 {
    let a2 = scalar_invariants(h).a2;
    let r = reaction_terms(h);
    3.0 * a2 * a2 - 2.0 * r.r1 - 2.0 * r.r2
}

/// `|A|^2 |H|^2 - R3`; Cauchy-Schwarz, tight in codimension one.
pub fn schwarz_slack(h: &SffTensor) -> f64 {
    let s = scalar_invariants(h);
    s.a2 * s.h2 - reaction_terms(h).r3
}

/// Slacks of the chain
/// `2R1 + 2R2 - (2/n)R3 <= 2|Å_H|^4 + (2/n)|Å_H|^2|H|^2 + 8|Å_H|^2|Å_I|^2 + 3|Å_I|^4
///  <= 2|A|^2|Å|^2 + 11|Å|^4`.
pub fn andrews_baker_slacks(h: &SffTensor) -> AndrewsBakerSlacks {
    let n = h.n as f64;
    let s = scalar_invariants(h);
    let r = reaction_terms(h);
    let split = traceless_split(h);
    let (x, y) = (split.a_h_norm2, split.a_i_norm2);
    let lhs = 2.0 * r.r1 + 2.0 * r.r2 - 2.0 / n * r.r3;
    let middle = 2.0 * x * x + 2.0 / n * x * s.h2 + 8.0 * x * y + 3.0 * y * y;
    let right = 2.0 * s.a2 * s.aring2 + 11.0 * s.aring2 * s.aring2;
    AndrewsBakerSlacks {
        first: middle - lhs,
        second: right - middle,
    }
}

/// Tolerance for a quartic slack: `SLACK_TOL * |A|^4`.
pub fn quartic_tolerance(h: &SffTensor) -> f64 {
    let a2 = scalar_invariants(h).a2;
    SLACK_TOL * a2 * a2
}

/// Pointwise pinching that feeds the convergence theorem for pinched
/// submanifolds: `|A|^2 <= |H|^2/(n-1) + 2` for `n >= 4`,
/// `|A|^2 <= 4|H|^2/9 + 4/3` for `n = 3`.
pub fn baker_pinch_ok(a2: f64, h2: f64, n: usize) -> Result<bool> {
    if n < 3 {
        return Err(invalid("n", "pinching criterion needs n >= 3"));
    }
    if !(a2 >= 0.0 && h2 >= 0.0) {
        return Err(invalid("a2/h2", "squared norms must be nonnegative"));
    }
    Ok(if n == 3 {
        a2 <= 4.0 * h2 / 9.0 + 4.0 / 3.0
    } else {
        a2 <= h2 / (n as f64 - 1.0) + 2.0
    })
}

//! Explicit mean curvature flow of equivariant hypersurfaces.
//!
//! Each step moves every profile node along `H ν` and projects it back to
//! the sphere. The step size follows a parabolic limit `c h²` and a
//! reaction limit `c / (max|A|² + n)`; nodes are resampled to uniform
//! arclength at a fixed cadence. A run ends on extinction, on convergence
//! to a totally geodesic sphere, on curvature blow-up, or at its limits.

use std::fmt;

use crate::error::{invalid, Error, Result};
use crate::geometry::{extrinsic_radius, geometry_from_profile, radius_range, GeometryFields};
use crate::norms::norm_report;
use crate::profile::{
    equator, geodesic_circle, latitude_circle, normalize, perturbed_circle, redistribute, Closure,
    ProfileState,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialData {
    /// Geodesic sphere of radius `r0`.
    Umbilical { r0: f64 },
    /// The totally geodesic equator.
    Equator,
    /// Product `S^k(cos θ₀) × S^(n-k)(sin θ₀)`; only `k = 1` is an orbit
    /// of the symmetry used here.
    Clifford { k: usize, theta0: f64 },
    /// Radius `r0 + δ cos(kφ)` along the profile.
    Perturbed { r0: f64, mode: u32, amplitude: f64 },
}

impl InitialData {
    pub fn build(&self, n: usize, nodes: usize) -> Result<ProfileState> {
        match *self {
            InitialData::Umbilical { r0 } => geodesic_circle(n, r0, nodes),
            InitialData::Equator => equator(n, nodes),
            InitialData::Clifford { k, theta0 } => {
                if k != 1 {
                    return Err(invalid(
                        "initial.k",
                        "only k = 1 products are rotationally symmetric profiles",
                    ));
                }
                latitude_circle(n, theta0, nodes)
            }
            InitialData::Perturbed {
                r0,
                mode,
                amplitude,
            } => perturbed_circle(n, r0, mode, amplitude, nodes),
        }
    }
}

/// Step-size control.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub c_parab: f64,
    pub c_react: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            c_parab: 0.2,
            c_react: 0.1,
        }
    }
}

impl StepControl {
    /// Parabolic coefficient actually used: the explicit scheme is stable
    /// up to about `2 / (1.25 n + 2.2)`, so the requested value is capped
    /// at 80% of that.
    pub fn effective_parabolic(&self, n: usize) -> f64 {
        self.c_parab.min(1.6 / (1.25 * n as f64 + 2.2))
    }

    /// `min(c_parab h², c_react / (max|A|² + n))`
    pub fn dt(&self, fields: &GeometryFields, mesh_width: f64, n: usize) -> f64 {
        let parab = self.effective_parabolic(n) * mesh_width * mesh_width;
        let react = self.c_react / (fields.max_a2() + n as f64);
        parab.min(react)
    }
}

/// Convenience form of [`StepControl::dt`] with the default coefficients.
pub fn adaptive_dt(fields: &GeometryFields, mesh_width: f64, n: usize) -> f64 {
    StepControl::default().dt(fields, mesh_width, n)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub initial: InitialData,
    pub nodes: usize,
    pub max_steps: usize,
    pub max_time: f64,
    /// Extinction once the extrinsic diameter drops below this.
    pub tol_ext: f64,
    /// `max|A|²` threshold for stationarity.
    pub tol_geo: f64,
    /// Roundness threshold on `max|Å|² · diam²` at extinction.
    pub tol_round: f64,
    /// `max|A|²` beyond which the run is declared singular.
    pub cap: f64,
    /// Consecutive steps below `tol_geo` needed for stationarity.
    pub stationary_steps: usize,
    pub redistribute_every: usize,
    /// Keep every `record_every`-th sample (the last one is always kept).
    pub record_every: usize,
    pub step: StepControl,
}

impl SimConfig {
    pub fn new(n: usize, initial: InitialData) -> Self {
        SimConfig {
            n,
            p: 2.0 * n as f64,
            q: 2.0 * n as f64,
            initial,
            nodes: 256,
            max_steps: 5_000_000,
            max_time: 50.0,
            tol_ext: 1e-2,
            tol_geo: 1e-6,
            tol_round: 0.1,
            cap: 1e8,
            stationary_steps: 100,
            redistribute_every: 25,
            record_every: 1,
            step: StepControl::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(invalid("n", "hypersurface dimension must be at least 2"));
        }
        if !(self.p >= 1.0) || !(self.q >= 1.0) {
            return Err(invalid("p/q", "norm exponents must be at least 1"));
        }
        let positive = [
            ("max_time", self.max_time),
            ("tol_ext", self.tol_ext),
            ("tol_geo", self.tol_geo),
            ("tol_round", self.tol_round),
            ("cap", self.cap),
            ("c_parab", self.step.c_parab),
            ("c_react", self.step.c_react),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || v.is_nan() {
                return Err(invalid(name, format!("must be positive, got {v}")));
            }
        }
        if self.redistribute_every == 0 || self.record_every == 0 || self.stationary_steps == 0 {
            return Err(invalid("cadence", "step cadences must be positive"));
        }
        self.initial.build(self.n, self.nodes).map(|_| ())
    }
}

/// One recorded time slice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub step: usize,
    pub t: f64,
    pub vol: f64,
    pub max_a2: f64,
    pub max_aring2: f64,
    pub a_lp: f64,
    pub aring_lq: f64,
    pub h_lp: f64,
    /// `∫ H² dμ`
    pub int_h2: f64,
    pub r_min: f64,
    pub r_max: f64,
    /// The nodes were resampled right before this sample.
    pub after_redistribution: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EventKind {
    Extinction { diameter: f64, roundness: f64 },
    Stationary,
    BlowUp { max_a2: f64, a_lp: f64 },
    NonFinite,
    MeshFailure { node: usize, spacing: f64 },
    StepLimit,
    TimeLimit,
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::Extinction { .. } => "extinction",
            EventKind::Stationary => "equator_convergence",
            EventKind::BlowUp { .. } => "blow_up",
            EventKind::NonFinite => "non_finite",
            EventKind::MeshFailure { .. } => "mesh_failure",
            EventKind::StepLimit => "step_limit",
            EventKind::TimeLimit => "time_limit",
        }
    }

    /// Whether the run stopped because the numerics broke down.
    pub fn is_numerical_failure(&self) -> bool {
        matches!(self, EventKind::NonFinite | EventKind::MeshFailure { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub step: usize,
    pub t: f64,
    pub kind: EventKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    RoundPoint,
    TotallyGeodesic,
    SingularNonRound,
    Inconclusive,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::RoundPoint => "RoundPoint",
            Outcome::TotallyGeodesic => "TotallyGeodesic",
            Outcome::SingularNonRound => "SingularNonRound",
            Outcome::Inconclusive => "Inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowRun {
    pub config: SimConfig,
    pub samples: Vec<Sample>,
    pub events: Vec<Event>,
    pub outcome: Outcome,
    pub final_state: ProfileState,
    pub steps: usize,
}

impl FlowRun {
    pub fn terminal_event(&self) -> Option<&Event> {
        self.events.last()
    }

    pub fn extinction_time(&self) -> Option<f64> {
        self.events
            .iter()
            .find(|e| matches!(e.kind, EventKind::Extinction { .. }))
            .map(|e| e.t)
    }
}

/// Moves each node by `dt H ν` and projects back to the sphere; axis
/// nodes stay on `z = 0`.
pub fn mcf_step(state: &ProfileState, fields: &GeometryFields, dt: f64) -> Result<ProfileState> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(invalid(
            "dt",
            format!("time step must be positive, got {dt}"),
        ));
    }
    let nn = state.len();
    let mut nodes = Vec::with_capacity(nn);
    for i in 0..nn {
        let (p, nu, h) = (state.nodes[i], fields.normal[i], fields.h[i]);
        let mut q = [
            p[0] + dt * h * nu[0],
            p[1] + dt * h * nu[1],
            p[2] + dt * h * nu[2],
        ];
        let axis = state.closure == Closure::Poles && (i == 0 || i + 1 == nn);
        if axis {
            q[2] = 0.0;
        }
        let q = normalize(q);
        if q.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                what: "profile node",
            });
        }
        nodes.push(q);
    }
    Ok(ProfileState {
        n: state.n,
        nodes,
        closure: state.closure,
        t: state.t + dt,
    })
}

/// Outcome implied by the terminal event of a run.
pub fn classify(run: &FlowRun) -> Outcome {
    outcome_of(run.terminal_event().map(|e| &e.kind), run.config.tol_round)
}

fn outcome_of(kind: Option<&EventKind>, tol_round: f64) -> Outcome {
    match kind {
        Some(EventKind::Extinction { roundness, .. }) if *roundness < tol_round => {
            Outcome::RoundPoint
        }
        Some(EventKind::Extinction { .. }) => Outcome::SingularNonRound,
        Some(EventKind::Stationary) => Outcome::TotallyGeodesic,
        Some(EventKind::BlowUp { .. }) | Some(EventKind::NonFinite) => Outcome::SingularNonRound,
        _ => Outcome::Inconclusive,
    }
}

fn sample(
    step: usize,
    state: &ProfileState,
    fields: &GeometryFields,
    cfg: &SimConfig,
    after_redistribution: bool,
) -> Result<Sample> {
    let rep = norm_report(state.t, fields, cfg.p, cfg.q)?;
    let int_h2 = fields
        .h
        .iter()
        .zip(&fields.weight)
        .map(|(h, w)| h * h * w)
        .sum();
    let (r_min, r_max) = radius_range(state, fields);
    Ok(Sample {
        step,
        t: state.t,
        vol: rep.vol,
        max_a2: rep.sup_a2,
        max_aring2: fields.max_aring2(),
        a_lp: rep.a_lp,
        aring_lq: rep.aring_lq,
        h_lp: rep.h_lp,
        int_h2,
        r_min,
        r_max,
        after_redistribution,
    })
}

/// Runs the flow from the configured initial data until a terminal event.
pub fn run(cfg: &SimConfig) -> Result<FlowRun> {
    cfg.validate()?;
    let mut state = cfg.initial.build(cfg.n, cfg.nodes)?;
    let mut samples = Vec::new();
    let mut calm = 0usize;
    let mut step = 0usize;
    let mut redistributed = false;
    let terminal = loop {
        let fields = match geometry_from_profile(&state) {
            Ok(f) => f,
            Err(Error::MeshFailure { node, spacing }) => {
                break EventKind::MeshFailure { node, spacing };
            }
            Err(Error::NonFinite { .. }) => break EventKind::NonFinite,
            Err(e) => return Err(e),
        };
        let s = sample(step, &state, &fields, cfg, redistributed)?;
        let keep = step % cfg.record_every == 0;
        let diameter = 2.0 * extrinsic_radius(&state);
        let max_a2 = s.max_a2;
        let event = if diameter < cfg.tol_ext {
            Some(EventKind::Extinction {
                diameter,
                roundness: s.max_aring2 * diameter * diameter,
            })
        } else {
            calm = if max_a2 < cfg.tol_geo { calm + 1 } else { 0 };
            if calm >= cfg.stationary_steps {
                Some(EventKind::Stationary)
            } else if !max_a2.is_finite() || max_a2 > cfg.cap {
                Some(EventKind::BlowUp {
                    max_a2,
                    a_lp: s.a_lp,
                })
            } else if step >= cfg.max_steps {
                Some(EventKind::StepLimit)
            } else if state.t >= cfg.max_time {
                Some(EventKind::TimeLimit)
            } else {
                None
            }
        };
        if keep || event.is_some() {
            samples.push(s);
        }
        if let Some(kind) = event {
            break kind;
        }
        let dt = cfg.step.dt(&fields, fields.min_spacing(), cfg.n);
        state = match mcf_step(&state, &fields, dt) {
            Ok(next) => next,
            Err(Error::NonFinite { .. }) => break EventKind::NonFinite,
            Err(e) => return Err(e),
        };
        step += 1;
        redistributed = step % cfg.redistribute_every == 0;
        if redistributed {
            state = redistribute(&state);
        }
        if state.closure == Closure::Poles
            && state.nodes[1..state.len() - 1]
                .iter()
                .any(|p| !(p[2] > 0.0))
        {
            break EventKind::MeshFailure {
                node: state.nodes[1..]
                    .iter()
                    .position(|p| !(p[2] > 0.0))
                    .unwrap_or(0)
                    + 1,
                spacing: 0.0,
            };
        }
    };
    let events = vec![Event {
        step,
        t: state.t,
        kind: terminal,
    }];
    let outcome = outcome_of(Some(&terminal), cfg.tol_round);
    Ok(FlowRun {
        config: cfg.clone(),
        samples,
        events,
        outcome,
        final_state: state,
        steps: step,
    })
}

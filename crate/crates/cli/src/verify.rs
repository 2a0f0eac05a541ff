//! The `verify` suite: named checks, each producing rows of
//! `check,params,value,verdict`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, LN_2};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sphereflow::constants::{michael_simon_constant, pinching_constant, sobolev_constant, t2};
use sphereflow::exact::{clifford_equilibrium_a2, clifford_trajectory};
use sphereflow::geometry::geometry_from_profile;
use sphereflow::lab::{
    comparison_ode, extension_monitor, max_principle_monitor, michael_simon_slack, moser_check,
    sobolev_slack, volume_identity_residual, CaseGenerator, ComparisonKind,
};
use sphereflow::sff::{
    andrews_baker_slacks, lili_slack, quartic_tolerance, scalar_invariants, schwarz_slack,
    SffTensor,
};
use sphereflow::simulator::{run, FlowRun, InitialData, Outcome, SimConfig};
use sphereflow::special::unit_sphere_area;

use crate::error::CliError;
use crate::output::fmt_real;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub check: &'static str,
    pub params: String,
    /// Slack, residual or error, as described by the check.
    pub value: f64,
    pub pass: bool,
}

/// Sizes of the suite's workloads.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteScale {
    pub tensors_per_shape: usize,
    pub nodes: usize,
    pub profiles: usize,
    pub fields_per_profile: usize,
    pub seed: u64,
}

impl Default for SuiteScale {
    fn default() -> Self {
        SuiteScale {
            tensors_per_shape: 100_000,
            nodes: 128,
            profiles: 100,
            fields_per_profile: 20,
            seed: 1,
        }
    }
}

type CheckFn = fn(&SuiteScale) -> Result<Vec<CheckRow>, CliError>;

/// Every check in suite order.
pub const CHECKS: &[(&str, CheckFn)] = &[
    ("constants", check_constants),
    ("tensors", check_tensors),
    ("umbilical", check_umbilical),
    ("equator", check_equator),
    ("clifford", check_clifford),
    ("volume_identity", check_volume_identity),
    ("slacks", check_slacks),
    ("max_principle", check_max_principle),
    ("moser", check_moser),
    ("extension", check_extension),
    ("pinched_umbilical", check_pinched_umbilical),
];

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|(name, _)| *name).collect()
}

/// Runs one named check, or all of them for `None`.
pub fn run_suite(selector: Option<&str>, scale: &SuiteScale) -> Result<Vec<CheckRow>, CliError> {
    let selected: Vec<&(&str, CheckFn)> = match selector {
        None | Some("all") => CHECKS.iter().collect(),
        Some(name) => {
            let hit: Vec<_> = CHECKS.iter().filter(|(n, _)| *n == name).collect();
            if hit.is_empty() {
                return Err(CliError::Config(format!(
                    "unknown check {name:?}; choose one of: all, {}",
                    check_names().join(", ")
                )));
            }
            hit
        }
    };
    let mut rows = Vec::new();
    for (_, f) in selected {
        rows.extend(f(scale)?);
    }
    Ok(rows)
}

pub fn table_csv(rows: &[CheckRow]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["check", "params", "value", "verdict"])?;
    for r in rows {
        w.write_record([
            r.check.to_string(),
            r.params.clone(),
            fmt_real(r.value),
            if r.pass { "PASS" } else { "FAIL" }.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn row(check: &'static str, params: String, value: f64, pass: bool) -> CheckRow {
    CheckRow {
        check,
        params,
        value,
        pass,
    }
}

fn simulate(n: usize, initial: InitialData, nodes: usize) -> Result<FlowRun, CliError> {
    let mut cfg = SimConfig::new(n, initial);
    cfg.nodes = nodes;
    Ok(run(&cfg)?)
}

fn check_constants(_: &SuiteScale) -> Result<Vec<CheckRow>, CliError> {
    let c3 = michael_simon_constant(3)?.to_f64();
    let want = 256.0 * (4.0 * std::f64::consts::PI / 3.0).powf(-1.0 / 3.0);
    let rel = (c3 - want).abs() / want;
    let gamma = sobolev_constant(3, 6.0)?.gamma0;
    let mut worst = f64::NEG_INFINITY;
    let mut finite = true;
    for n in 3..=6usize {
        for p in n + 1..=2 * n {
            let c = pinching_constant(n, p as f64)?;
            finite &= !c.is_zero() && c.ln().is_finite();
            worst = worst.max(c.log10());
        }
    }
    Ok(vec![
        row("constants", "c_3 closed form".into(), rel, rel <= 1e-12),
        row(
            "constants",
            "gamma_0(3,6) - 7".into(),
            gamma - 7.0,
            (gamma - 7.0).abs() <= 1e-12,
        ),
        row(
            "constants",
            "max log10 C(n,p), n=3..6, p=n+1..2n".into(),
            worst,
            finite && worst <= 2.0,
        ),
    ])
}

/// Fewest relative slack over a batch of random tensors, and the number of
/// violations beyond the quartic tolerance.
pub fn tensor_batch(n: usize, d: usize, count: usize, seed: u64) -> (f64, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((n as u64) << 8) ^ d as u64);
    let mut worst = f64::INFINITY;
    let mut violations = 0;
    for _ in 0..count {
        let h = SffTensor::random(n, d, 1.0, &mut rng);
        let ab = andrews_baker_slacks(&h);
        let tol = quartic_tolerance(&h);
        let a4 = scalar_invariants(&h).a2.powi(2).max(f64::MIN_POSITIVE);
        for s in [lili_slack(&h), schwarz_slack(&h), ab.first, ab.second] {
            worst = worst.min(s / a4);
            if s < -tol {
                violations += 1;
            }
        }
    }
    (worst, violations)
}

fn check_tensors(scale: &SuiteScale) -> Result<Vec<CheckRow>, CliError> {
    let mut rows = Vec::new();
    for n in 3..=5 {
        for d in 1..=3 {
            let (worst, bad) = tensor_batch(n, d, scale.tensors_per_shape, scale.seed);
            rows.push(row(
                "tensors",
                format!(
                    "n={n} d={d} samples={} violations={bad}",
                    scale.tensors_per_shape
                ),
                worst,
                bad == 0,
            ));
        }
    }
    Ok(rows)
}

fn check_umbilical(scale: &SuiteScale) -> Result<Vec<CheckRow>, CliError> {
    let r = simulate(3, InitialData::Umbilical { r0: FRAC_PI_3 }, scale.nodes)?;
    let want = LN_2 / 3.0;
    let rel = r
        .extinction_time()
        .map_or(f64::INFINITY, |t| (t - want) / want);
    Ok(vec![row(
        "umbilical",
        format!("n=3 r0=pi/3 N={} extinction rel. error", scale.nodes),
        rel,
        rel.abs() < 0.01 && r.outcome == Outcome::RoundPoint,
    )])
}

fn check_equator(scale: &SuiteScale) -> Result<Vec<CheckRow>, CliError> {
    let mut cfg = SimConfig::new(3, InitialData::Equator);
    cfg.nodes = scale.nodes;
    cfg.stationary_steps = 10_000;
    let r = run(&cfg)?;
    let max_a2 = r.samples.iter().map(|s| s.max_a2).fold(0.0, f64::max);
    Ok(vec![row(
        "equator",
        format!("n=3 N={} steps={} max|A|^2", scale.nodes, r.steps),
        max_a2,
        max_a2 < 1e-6 && r.outcome == Outcome::TotallyGeodesic,
    )])
}

fn check_clifford(_: &SuiteScale) -> Result<Vec<CheckRow>, CliError> {
    let dt = 1e-4;
    let traj = clifford_trajectory(4, 2, FRAC_PI_4, 1e4 * dt, dt)?;
    let drift = traj
        .states
        .iter()
        .map(|s| (s.theta - FRAC_PI_4).abs())
        .fold(0.0, f64::max);
    let a2 = traj.states.last().map_or(f64::NAN, |s| s.a2());
    Ok(vec![
        row(
            "clifford",
            format!("n=4 k=2 theta0=pi/4 steps={} drift", traj.states.len() - 1),
            drift,
            drift < 1e-10 && traj.collapse.is_none() && traj.states.len() == 10_001,
        ),
        row(
            "clifford",
            "n=4 k=2 |A|^2 - 4".into(),
            a2 - 4.0,
            (a2 - 4.0).abs() < 1e-10 && clifford_equilibrium_a2(4, 2) == 4.0,
        ),
    ])
}

fn check_volume_identity(scale: &SuiteScale) -> Result<Vec<CheckRow>, CliError> {
    let r = simulate(3, InitialData::Umbilical { r0: FRAC_PI_3 }, scale.nodes)?;
    let t_mid = 0.5 * r.samples.last().map_or(0.0, |s| s.t);
    let index = r.samples.partition_point(|s| s.t < t_mid);
    let res = volume_identity_residual(&r, index)?;
    Ok(vec![row(
        "volume_identity",
        format!("n=3 r0=pi/3 N={} mid-run relative residual", scale.nodes),
        res,
        res < 1e-3,
    )])
}

fn check_slacks(scale: &SuiteScale) -> Result<Vec<CheckRow>, CliError> {
    let mut gen = CaseGenerator::new(scale.seed);
    let (mut ms_min, mut sob_min) = (f64::INFINITY, f64::INFINITY);
    let (mut ms_bad, mut sob_bad) = (0usize, 0usize);
    for _ in 0..scale.profiles {
        let s = gen.profile(3, scale.nodes)?;
        let g = geometry_from_profile(&s)?;
        for _ in 0..scale.fields_per_profile {
            let f = gen.field(&s, &g);
            let ms = michael_simon_slack(&s, &g, &f)?;
            let sob = sobolev_slack(&s, &g, &f, 6.0)?;
            ms_min = ms_min.min(ms);
            sob_min = sob_min.min(sob.ln_rhs - sob.ln_lhs);
            ms_bad += usize::from(!(ms > 0.0));
            sob_bad += usize::from(!sob.holds());
        }
    }
    let cases = scale.profiles * scale.fields_per_profile;
    Ok(vec![
        row(
            "slacks",
            format!("michael_simon n=3 cases={cases} failures={ms_bad} min slack"),
            ms_min,
            ms_bad == 0,
        ),
        row(
            "slacks",
            format!("sobolev n=3 alpha=6 cases={cases} failures={sob_bad} min log ratio"),
            sob_min,
            sob_bad == 0,
        ),
    ])
}

fn compliant_runs(nodes: usize) -> Result<Vec<(&'static str, FlowRun)>, CliError> {
    Ok(vec![
        (
            "umbilical r0=pi/3",
            simulate(3, InitialData::Umbilical { r0: FRAC_PI_3 }, nodes)?,
        ),
        (
            "perturbed r0=pi/3 mode=2 amplitude=0.05",
            simulate(
                3,
                InitialData::Perturbed {
                    r0: FRAC_PI_3,
                    mode: 2,
                    amplitude: 0.05,
                },
                nodes,
            )?,
        ),
    ])
}

fn check_max_principle(scale: &SuiteScale) -> Result<Vec<CheckRow>, CliError> {
    let mut rows = Vec::new();
    for (label, r) in compliant_runs(scale.nodes)? {
        let cfg = &r.config;
        let bound = r.samples[0].a_lp;
        let traj = comparison_ode(ComparisonKind::ALp, cfg.n, cfg.p, cfg.q, bound, 1.0)?;
        let rep = max_principle_monitor(&r, &traj)?;
        rows.push(row(
            "max_principle",
            format!(
                "{label} p={} compared={} worst ln ratio",
                cfg.p, rep.compared
            ),
            rep.worst_ln_ratio,
            rep.holds,
        ));
    }
    Ok(rows)
}

fn check_moser(scale: &SuiteScale) -> Result<Vec<CheckRow>, CliError> {
    let bound = 100.0;
    let mut rows = Vec::new();
    for (label, r) in compliant_runs(scale.nodes)? {
        let cfg = &r.config;
        let t = 0.5 * t2(cfg.n, cfg.p, cfg.q, bound)?.to_f64();
        let rec = moser_check(&r, cfg.p, cfg.q, bound, t)?;
        let margin = rec.bound.ln() - rec.sup_observed.max(f64::MIN_POSITIVE).ln();
        rows.push(row(
            "moser",
            format!("{label} L={bound} t=T2/2 ln(bound/sup)"),
            margin,
            rec.ok,
        ));
    }
    Ok(rows)
}

fn check_extension(scale: &SuiteScale) -> Result<Vec<CheckRow>, CliError> {
    let mut rows = Vec::new();
    for (label, r) in compliant_runs(scale.nodes)? {
        let rep = extension_monitor(&r, r.config.p)?;
        rows.push(row(
            "extension",
            format!("{label} sup ||A||^p"),
            rep.sup_lp_p,
            !rep.anomaly,
        ));
    }
    Ok(rows)
}

fn check_pinched_umbilical(scale: &SuiteScale) -> Result<Vec<CheckRow>, CliError> {
    let (n, p) = (3usize, 6.0);
    let c = pinching_constant(n, p)?.to_f64();
    let h_max = (n as f64).sqrt() * c / unit_sphere_area(n as u32).powf(1.0 / p);
    let r0 = (n as f64 / h_max).atan().min(FRAC_PI_2);
    let mut cfg = SimConfig::new(n, InitialData::Umbilical { r0 });
    cfg.nodes = scale.nodes;
    let r = run(&cfg)?;
    Ok(vec![row(
        "pinched_umbilical",
        format!("n=3 p=6 r0={r0:.17} outcome={}", r.outcome),
        r.samples[0].a_lp,
        r.outcome != Outcome::SingularNonRound,
    )])
}

//! The `constants`, `exact` and `simulate` subcommands.

use std::path::Path;

use sphereflow::constants::ConstantChain;
use sphereflow::exact::{clifford_trajectory, extinction_time, umbilical_trajectory};
use sphereflow::simulator::{run, FlowRun};
use sphereflow::special::unit_sphere_area;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{fmt_real, write_run};

/// Aligned text and CSV (`name,log10_value,provenance`) renderings of a chain.
pub struct ChainListing {
    pub text: String,
    pub csv: String,
}

pub fn constants_listing(n: usize, p: f64, q: f64, bound: f64) -> Result<ChainListing, CliError> {
    let chain = ConstantChain::new(n, p, q, bound)?;
    let mut text = format!(
        "n = {n}, p = {p}, q = {q}, L = {bound}, alpha0 = {}\n",
        chain.alpha0
    );
    let width = chain
        .entries
        .iter()
        .map(|e| e.name.len())
        .max()
        .unwrap_or(0);
    for e in &chain.entries {
        text += &format!(
            "{:<width$}  {:>22}  log10 = {:>+12.6}  {}\n",
            e.name,
            format!("{:.12}", e.value),
            e.value.log10(),
            e.provenance
        );
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["name", "log10_value", "provenance"])?;
    for e in &chain.entries {
        w.write_record([
            e.name.to_string(),
            fmt_real(e.value.log10()),
            e.provenance.to_string(),
        ])?;
    }
    Ok(ChainListing {
        text,
        csv: csv_string(w)?,
    })
}

fn csv_string(w: csv::Writer<Vec<u8>>) -> Result<String, CliError> {
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

const EXACT_HEADER: [&str; 6] = ["t", "radius", "h", "a2", "vol", "a_lp"];

/// Shrinking geodesic sphere sampled every `dt` up to `t_end` or just
/// before extinction. The `radius` column holds `r`.
pub fn exact_umbilical_csv(
    n: usize,
    r0: f64,
    p: f64,
    dt: f64,
    t_end: Option<f64>,
) -> Result<String, CliError> {
    check_step(dt, p)?;
    let stop = match (extinction_time(n, r0)?, t_end) {
        (Some(ext), Some(t)) => t.min(ext),
        (Some(ext), None) => ext,
        (None, Some(t)) => t,
        (None, None) => 1.0,
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(EXACT_HEADER)?;
    let mut i = 0usize;
    loop {
        let t = i as f64 * dt;
        if t > stop {
            break;
        }
        match umbilical_trajectory(n, r0, t) {
            Ok(s) => w.write_record(
                [t, s.r, s.mean_curvature(), s.a2(), s.volume(), s.lp_norm(p)].map(fmt_real),
            )?,
            Err(sphereflow::Error::PastExtinction { .. }) => break,
            Err(e) => return Err(e.into()),
        }
        i += 1;
    }
    csv_string(w)
}

/// Clifford product integrated by RK4; the `radius` column holds `θ`.
pub fn exact_clifford_csv(
    n: usize,
    k: usize,
    theta0: f64,
    p: f64,
    dt: f64,
    t_end: f64,
) -> Result<String, CliError> {
    check_step(dt, p)?;
    let traj = clifford_trajectory(n, k, theta0, t_end, dt)?;
    let factors = unit_sphere_area(k as u32) * unit_sphere_area((n - k) as u32);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(EXACT_HEADER)?;
    for s in &traj.states {
        let (sin, cos) = s.theta.sin_cos();
        let vol = factors * cos.powi(k as i32) * sin.powi((n - k) as i32);
        let a2 = s.a2();
        let row = [
            s.t,
            s.theta,
            s.mean_curvature(),
            a2,
            vol,
            a2.sqrt() * vol.powf(1.0 / p),
        ];
        w.write_record(row.map(fmt_real))?;
    }
    if let Some(t) = traj.collapse {
        eprintln!("product collapsed at t = {t}");
    }
    csv_string(w)
}

fn check_step(dt: f64, p: f64) -> Result<(), CliError> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(CliError::Config(format!("dt must be positive, got {dt}")));
    }
    if !(p >= 1.0) {
        return Err(CliError::Config(format!("p must be at least 1, got {p}")));
    }
    Ok(())
}

/// Runs the flow and persists it under `dir`. A run that stopped on a
/// numerical breakdown is still written, then reported as an error.
pub fn simulate(cfg: &RunConfig, dir: &Path) -> Result<FlowRun, CliError> {
    let result = run(&cfg.sim)?;
    write_run(dir, cfg, &result)?;
    if let Some(e) = result.terminal_event() {
        if e.kind.is_numerical_failure() {
            return Err(CliError::Numerical(format!(
                "{} at step {} (t = {}); results in {}",
                e.kind.name(),
                e.step,
                e.t,
                dir.display()
            )));
        }
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_3;

    #[test]
    fn constants_listing_has_every_entry() {
        let l = constants_listing(3, 6.0, 6.0, 100.0).unwrap();
        assert!(l.csv.starts_with("name,log10_value,provenance\n"));
        assert_eq!(l.csv.lines().count(), 26);
        let gamma = l.csv.lines().find(|s| s.starts_with("gamma_0,")).unwrap();
        let v: f64 = gamma.split(',').nth(1).unwrap().parse().unwrap();
        assert!((v - 7f64.log10()).abs() < 1e-14);
        assert!(l.text.contains("C_n_p"));
        assert!(matches!(
            constants_listing(3, 3.0, 3.0, 100.0),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn umbilical_rows_stop_before_extinction() {
        let csv = exact_umbilical_csv(3, FRAC_PI_3, 6.0, 1e-3, None).unwrap();
        let rows: Vec<&str> = csv.lines().collect();
        assert_eq!(rows[0], "t,radius,h,a2,vol,a_lp");
        // ln 2 / 3 = 0.2310...
        assert_eq!(rows.len(), 1 + 232);
        let last: Vec<f64> = rows[232].split(',').map(|x| x.parse().unwrap()).collect();
        assert!(last[1] < 0.05 && last[4] < 1e-3);
    }

    #[test]
    fn clifford_minimal_product_is_flat() {
        let csv = exact_clifford_csv(4, 2, std::f64::consts::FRAC_PI_4, 8.0, 1e-3, 0.1).unwrap();
        for row in csv.lines().skip(1) {
            let v: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
            assert!(v[2].abs() < 1e-12 && (v[3] - 4.0).abs() < 1e-12);
        }
        assert!(exact_clifford_csv(4, 4, 0.5, 8.0, 1e-3, 0.1).is_err());
    }
}

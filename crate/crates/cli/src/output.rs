//! Run directories: `series.csv`, `events.csv` and `manifest`.

use std::fs;
use std::path::Path;

use sphereflow::simulator::{EventKind, FlowRun, Sample};

use crate::config::{KeyValues, RunConfig};
use crate::error::CliError;

pub const SERIES_FILE: &str = "series.csv";
pub const EVENTS_FILE: &str = "events.csv";
pub const MANIFEST_FILE: &str = "manifest";
pub const SERIES_HEADER: [&str; 6] = ["t", "vol", "max_a2", "a_lp", "aring_lq", "h_lp"];

/// 17 significant digits.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_series(path: &Path, samples: &[Sample]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(SERIES_HEADER)?;
    for s in samples {
        w.write_record([s.t, s.vol, s.max_a2, s.a_lp, s.aring_lq, s.h_lp].map(fmt_real))?;
    }
    w.flush()?;
    Ok(())
}

/// Rows of a series file, one array per line in header order.
pub fn read_series(path: &Path) -> Result<Vec<[f64; 6]>, CliError> {
    let mut r = csv::Reader::from_path(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != SERIES_HEADER {
        return Err(CliError::Input(format!(
            "{}: unexpected header {header:?}",
            path.display()
        )));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let mut row = [0.0; 6];
        for (k, field) in rec.iter().enumerate().take(6) {
            row[k] = field.parse().map_err(|_| {
                CliError::Input(format!("bad number {field:?} in {}", path.display()))
            })?;
        }
        rows.push(row);
    }
    Ok(rows)
}

fn event_detail(kind: &EventKind) -> String {
    match *kind {
        EventKind::Extinction {
            diameter,
            roundness,
        } => format!(
            "diameter={};roundness={}",
            fmt_real(diameter),
            fmt_real(roundness)
        ),
        EventKind::BlowUp { max_a2, a_lp } => {
            format!("max_a2={};a_lp={}", fmt_real(max_a2), fmt_real(a_lp))
        }
        EventKind::MeshFailure { node, spacing } => {
            format!("node={node};spacing={}", fmt_real(spacing))
        }
        _ => String::new(),
    }
}

pub fn write_events(path: &Path, run: &FlowRun) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["step", "t", "event", "detail"])?;
    for e in &run.events {
        w.write_record([
            e.step.to_string(),
            fmt_real(e.t),
            e.kind.name().to_string(),
            event_detail(&e.kind),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Configuration echo followed by `version.*` and `result.*` entries.
pub fn manifest_text(cfg: &RunConfig, run: &FlowRun) -> String {
    let mut kv = cfg.to_kv();
    kv.insert("version.sphereflow", env!("CARGO_PKG_VERSION"));
    kv.insert("result.outcome", run.outcome);
    kv.insert(
        "result.terminal_event",
        run.terminal_event().map_or("none", |e| e.kind.name()),
    );
    kv.insert("result.steps", run.steps);
    kv.insert("result.t_final", fmt_real(run.final_state.t));
    if let Some(t) = run.extinction_time() {
        kv.insert("result.extinction_time", fmt_real(t));
    }
    if let Some(s) = run.samples.last() {
        kv.insert("result.a_lp", fmt_real(s.a_lp));
        kv.insert("result.aring_lq", fmt_real(s.aring_lq));
        kv.insert("result.max_a2", fmt_real(s.max_a2));
    }
    kv.to_text()
}

/// Reads a manifest back; `result.*` and `version.*` entries are returned
/// separately from the configuration.
pub fn read_manifest(path: &Path) -> Result<(RunConfig, KeyValues), CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let kv = KeyValues::parse(&text)?;
    let cfg = RunConfig::from_kv(&kv.without_prefix("result.").without_prefix("version."))?;
    let mut results = KeyValues::default();
    for (k, v) in kv.iter().filter(|(k, _)| k.starts_with("result.")) {
        results.insert(k, v);
    }
    Ok((cfg, results))
}

/// Writes all three files; the manifest goes last so its presence marks a
/// finished run.
pub fn write_run(dir: &Path, cfg: &RunConfig, run: &FlowRun) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    write_series(&dir.join(SERIES_FILE), &run.samples)?;
    write_events(&dir.join(EVENTS_FILE), run)?;
    fs::write(dir.join(MANIFEST_FILE), manifest_text(cfg, run))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use sphereflow::simulator::{run, InitialData, SimConfig};

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_real(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_real(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn run_directory_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut sim = SimConfig::new(3, InitialData::Umbilical { r0: 1.0 });
        sim.nodes = 32;
        let cfg = RunConfig {
            sim,
            seed: 4,
            output: None,
        };
        let r = run(&cfg.sim).unwrap();
        write_run(dir.path(), &cfg, &r).unwrap();
        let rows = read_series(&dir.path().join(SERIES_FILE)).unwrap();
        assert_eq!(rows.len(), r.samples.len());
        assert_eq!(rows[3][3], r.samples[3].a_lp);
        let (again, results) = read_manifest(&dir.path().join(MANIFEST_FILE)).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(results.get("result.outcome"), Some("RoundPoint"));
        let events = std::fs::read_to_string(dir.path().join(EVENTS_FILE)).unwrap();
        assert!(events.starts_with("step,t,event,detail\n"));
        assert!(events.contains("extinction"));
    }
}

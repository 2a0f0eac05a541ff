//! Parameter sweeps: one run directory per grid cell plus `sweep.csv`.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::config::{KeyValues, RunConfig};
use crate::error::CliError;
use crate::output::{fmt_real, read_manifest, write_run, MANIFEST_FILE};

pub const WORKERS_ENV: &str = "SPHEREFLOW_WORKERS";
pub const AGGREGATE_FILE: &str = "sweep.csv";

/// Fixed keys plus axes of values; cells are the Cartesian product of the
/// axes, with the first axis varying slowest.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Grid {
    pub base: KeyValues,
    pub axes: Vec<(String, Vec<String>)>,
}

impl Grid {
    /// Reads `key = value` lines; a value with commas is an axis.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let kv = KeyValues::parse(text)?;
        let mut grid = Grid::default();
        for (k, v) in kv.iter() {
            if v.contains(',') {
                grid.add_axis(k, v)?;
            } else {
                grid.base.insert(k, v);
            }
        }
        Ok(grid)
    }

    pub fn add_axis(&mut self, key: &str, list: &str) -> Result<(), CliError> {
        let values: Vec<String> = list
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect();
        if values.is_empty() {
            return Err(CliError::Config(format!("axis {key:?} has no values")));
        }
        self.axes.retain(|(k, _)| k != key);
        self.axes.push((key.to_string(), values));
        Ok(())
    }

    /// Every cell's key/values, in a fixed order.
    pub fn cells(&self) -> Vec<KeyValues> {
        let mut cells = vec![self.base.clone()];
        for (key, values) in &self.axes {
            cells = cells
                .into_iter()
                .flat_map(|c| {
                    values.iter().map(move |v| {
                        let mut c = c.clone();
                        c.insert(key, v);
                        c
                    })
                })
                .collect();
        }
        cells
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CellStatus {
    Ran,
    Skipped,
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub index: usize,
    pub dir: PathBuf,
    pub params: KeyValues,
    pub status: CellStatus,
    /// `result.*` entries of the cell's manifest.
    pub results: KeyValues,
}

/// Worker count from the environment, or the machine's parallelism.
pub fn worker_cap() -> Result<usize, CliError> {
    match std::env::var(WORKERS_ENV) {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::Config(format!(
                "{WORKERS_ENV} must be a positive integer, got {s:?}"
            ))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn run_cell(index: usize, params: KeyValues, out: &Path) -> CellResult {
    let dir = out.join(format!("cell-{index:04}"));
    let mut result = CellResult {
        index,
        dir: dir.clone(),
        params: params.clone(),
        status: CellStatus::Ran,
        results: KeyValues::default(),
    };
    let cfg = match RunConfig::from_kv(&params) {
        Ok(c) => c,
        Err(e) => {
            result.status = CellStatus::Failed(e.to_string());
            return result;
        }
    };
    let manifest = dir.join(MANIFEST_FILE);
    if manifest.exists() {
        if let Ok((done, results)) = read_manifest(&manifest) {
            if done.sim == cfg.sim {
                result.status = CellStatus::Skipped;
                result.results = results;
                return result;
            }
        }
    }
    let outcome = sphereflow::simulator::run(&cfg.sim)
        .map_err(CliError::from)
        .and_then(|r| write_run(&dir, &cfg, &r).map(|_| r));
    match outcome {
        Ok(_) => match read_manifest(&manifest) {
            Ok((_, results)) => result.results = results,
            Err(e) => result.status = CellStatus::Failed(e.to_string()),
        },
        Err(e) => result.status = CellStatus::Failed(e.to_string()),
    }
    result
}

/// Runs every cell not already finished under `out` and writes the
/// aggregate table. Cells that fail are recorded and the sweep continues.
pub fn run_sweep(grid: &Grid, out: &Path, workers: usize) -> Result<Vec<CellResult>, CliError> {
    std::fs::create_dir_all(out)?;
    let cells = grid.cells();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
    let results: Vec<CellResult> = pool.install(|| {
        cells
            .into_par_iter()
            .enumerate()
            .map(|(i, params)| run_cell(i, params, out))
            .collect()
    });
    write_aggregate(&out.join(AGGREGATE_FILE), grid, &results)?;
    Ok(results)
}

const RESULT_COLUMNS: [&str; 7] = [
    "outcome",
    "terminal_event",
    "extinction_time",
    "t_final",
    "a_lp",
    "aring_lq",
    "max_a2",
];

fn write_aggregate(path: &Path, grid: &Grid, results: &[CellResult]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["cell".to_string()];
    header.extend(grid.axes.iter().map(|(k, _)| k.clone()));
    header.extend(RESULT_COLUMNS.iter().map(|s| s.to_string()));
    header.extend(["status".to_string(), "message".to_string()]);
    w.write_record(&header)?;
    for r in results {
        let mut rec = vec![format!("cell-{:04}", r.index)];
        rec.extend(
            grid.axes
                .iter()
                .map(|(k, _)| r.params.get(k).unwrap_or("").to_string()),
        );
        rec.extend(RESULT_COLUMNS.iter().map(|c| {
            let v = r.results.get(&format!("result.{c}")).unwrap_or("");
            match v.parse::<f64>() {
                Ok(x) if *c != "outcome" && *c != "terminal_event" => fmt_real(x),
                _ => v.to_string(),
            }
        }));
        let (status, message) = match &r.status {
            CellStatus::Ran => ("ran", String::new()),
            CellStatus::Skipped => ("skipped", String::new()),
            CellStatus::Failed(m) => ("failed", m.clone()),
        };
        rec.push(status.to_string());
        rec.push(message);
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

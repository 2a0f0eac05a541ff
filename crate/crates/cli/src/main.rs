use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sphereflow::exact::ORACLE_DT;
use sphereflow_cli::commands::{
    constants_listing, exact_clifford_csv, exact_umbilical_csv, simulate,
};
use sphereflow_cli::config::{parse_real, KeyValues, RunConfig};
use sphereflow_cli::plot::plot_run;
use sphereflow_cli::sweep::{run_sweep, worker_cap, CellStatus, Grid, AGGREGATE_FILE};
use sphereflow_cli::verify::{check_names, run_suite, table_csv, SuiteScale};
use sphereflow_cli::CliError;

#[derive(Parser)]
#[command(
    name = "sphereflow",
    version,
    about = "Mean curvature flow of rotationally symmetric hypersurfaces in spheres"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn real(s: &str) -> Result<f64, String> {
    parse_real(s).map_err(|e| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Print the chain of named constants.
    Constants {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = real)]
        p: f64,
        /// Defaults to p.
        #[arg(long, value_parser = real)]
        q: Option<f64>,
        #[arg(long = "bound", value_parser = real, default_value = "100")]
        bound: f64,
        /// Also write `name,log10_value,provenance` rows here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Emit an exact solution as CSV.
    Exact {
        #[command(subcommand)]
        family: Family,
    },
    /// Run the flow and write series.csv, events.csv and manifest.
    Simulate {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run the verification suite, or one check of it.
    Verify {
        /// One of the check names, or `all`.
        check: Option<String>,
        /// List the check names and exit.
        #[arg(long)]
        list: bool,
        /// Write the table here as well as to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = SuiteScale::default().tensors_per_shape)]
        tensors: usize,
        #[arg(long, default_value_t = SuiteScale::default().nodes)]
        nodes: usize,
        #[arg(long, default_value_t = SuiteScale::default().seed)]
        seed: u64,
    },
    /// Run one simulation per grid cell, resuming finished cells.
    Sweep {
        /// Grid file: `key = value` lines, comma lists are axes.
        #[arg(long)]
        grid: Option<PathBuf>,
        /// Comma-separated values of n.
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        q: Option<String>,
        #[arg(long)]
        r0: Option<String>,
        #[arg(long, alias = "delta")]
        amplitude: Option<String>,
        #[arg(long)]
        mode: Option<String>,
        /// Extra fixed or listed `key=value` entries.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw SVG plots of a run directory.
    Plot { dir: PathBuf },
}

#[derive(Subcommand)]
enum Family {
    /// Shrinking geodesic sphere.
    Umbilical {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = real)]
        r0: f64,
        /// Exponent of the reported L^p norm; defaults to 2n.
        #[arg(long, value_parser = real)]
        p: Option<f64>,
        #[arg(long, value_parser = real, default_value_t = ORACLE_DT)]
        dt: f64,
        /// Defaults to the extinction time.
        #[arg(long, value_parser = real)]
        t_end: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Clifford product S^k x S^(n-k).
    Clifford {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, value_parser = real)]
        theta0: f64,
        #[arg(long, value_parser = real)]
        p: Option<f64>,
        #[arg(long, value_parser = real, default_value_t = ORACLE_DT)]
        dt: f64,
        #[arg(long, value_parser = real, default_value = "1")]
        t_end: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Run configuration sources, applied as file < flags < `--set`.
#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    nodes: Option<String>,
    #[arg(long)]
    max_steps: Option<String>,
    #[arg(long)]
    max_time: Option<String>,
    #[arg(long)]
    tol_ext: Option<String>,
    #[arg(long)]
    tol_geo: Option<String>,
    #[arg(long)]
    tol_round: Option<String>,
    #[arg(long)]
    cap: Option<String>,
    #[arg(long)]
    stationary_steps: Option<String>,
    #[arg(long)]
    redistribute_every: Option<String>,
    #[arg(long)]
    record_every: Option<String>,
    #[arg(long)]
    c_parab: Option<String>,
    #[arg(long)]
    c_react: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// umbilical, equator, clifford or perturbed.
    #[arg(long)]
    initial: Option<String>,
    #[arg(long)]
    r0: Option<String>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    theta0: Option<String>,
    #[arg(long)]
    mode: Option<String>,
    #[arg(long, alias = "delta")]
    amplitude: Option<String>,
}

impl RunArgs {
    fn key_values(&self) -> Result<KeyValues, CliError> {
        let mut kv = match &self.config {
            // a manifest is a valid config; its results are not
            Some(path) => KeyValues::parse(&read_text(path)?)?
                .without_prefix("result.")
                .without_prefix("version."),
            None => KeyValues::default(),
        };
        let flags = [
            ("n", &self.n),
            ("p", &self.p),
            ("q", &self.q),
            ("nodes", &self.nodes),
            ("max_steps", &self.max_steps),
            ("max_time", &self.max_time),
            ("tol_ext", &self.tol_ext),
            ("tol_geo", &self.tol_geo),
            ("tol_round", &self.tol_round),
            ("cap", &self.cap),
            ("stationary_steps", &self.stationary_steps),
            ("redistribute_every", &self.redistribute_every),
            ("record_every", &self.record_every),
            ("c_parab", &self.c_parab),
            ("c_react", &self.c_react),
            ("seed", &self.seed),
            ("initial.kind", &self.initial),
            ("initial.r0", &self.r0),
            ("initial.k", &self.k),
            ("initial.theta0", &self.theta0),
            ("initial.mode", &self.mode),
            ("initial.amplitude", &self.amplitude),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                kv.insert(key, v);
            }
        }
        if let Some(out) = &self.out {
            kv.insert("output", out.display());
        }
        for s in &self.set {
            kv.insert_assignment(s)?;
        }
        Ok(kv)
    }
}

fn read_text(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Constants {
            n,
            p,
            q,
            bound,
            csv,
        } => {
            let listing = constants_listing(n, p, q.unwrap_or(p), bound)?;
            print!("{}", listing.text);
            if let Some(path) = csv {
                std::fs::write(path, listing.csv)?;
            }
        }
        Command::Exact { family } => match family {
            Family::Umbilical {
                n,
                r0,
                p,
                dt,
                t_end,
                out,
            } => {
                let csv = exact_umbilical_csv(n, r0, p.unwrap_or(2.0 * n as f64), dt, t_end)?;
                emit(&csv, out.as_ref())?;
            }
            Family::Clifford {
                n,
                k,
                theta0,
                p,
                dt,
                t_end,
                out,
            } => {
                let csv = exact_clifford_csv(n, k, theta0, p.unwrap_or(2.0 * n as f64), dt, t_end)?;
                emit(&csv, out.as_ref())?;
            }
        },
        Command::Simulate { run } => {
            let cfg = RunConfig::from_kv(&run.key_values()?)?;
            let dir = cfg.output.clone().ok_or_else(|| {
                CliError::Config("no output directory (use --out or output = ...)".into())
            })?;
            let result = simulate(&cfg, &dir)?;
            let event = result.terminal_event().map_or("none", |e| e.kind.name());
            println!(
                "{}: {} after {} steps, t = {} ({event})",
                dir.display(),
                result.outcome,
                result.steps,
                result.final_state.t
            );
        }
        Command::Verify {
            check,
            list,
            out,
            tensors,
            nodes,
            seed,
        } => {
            if list {
                println!("{}", check_names().join("\n"));
                return Ok(());
            }
            let scale = SuiteScale {
                tensors_per_shape: tensors,
                nodes,
                seed,
                ..SuiteScale::default()
            };
            let rows = run_suite(check.as_deref(), &scale)?;
            let table = table_csv(&rows)?;
            print!("{table}");
            if let Some(path) = out {
                std::fs::write(path, &table)?;
            }
            let failed = rows.iter().filter(|r| !r.pass).count();
            if failed > 0 {
                return Err(CliError::Verification(format!(
                    "{failed} of {} rows failed",
                    rows.len()
                )));
            }
        }
        Command::Sweep {
            grid,
            n,
            p,
            q,
            r0,
            amplitude,
            mode,
            set,
            out,
        } => {
            let mut g = Grid::parse("n = 3\nnodes = 128\ninitial.kind = perturbed\n")?;
            if let Some(path) = grid {
                let file = Grid::parse(&read_text(&path)?)?;
                g.base = g.base.merged(&file.base);
                for (k, values) in file.axes {
                    g.add_axis(&k, &values.join(","))?;
                }
            }
            let lists = [
                ("n", n),
                ("p", p),
                ("q", q),
                ("initial.r0", r0),
                ("initial.amplitude", amplitude),
                ("initial.mode", mode),
            ];
            let extra = set.iter().map(|s| {
                s.split_once('=')
                    .map(|(k, v)| (k.trim().to_string(), Some(v.trim().to_string())))
                    .ok_or_else(|| CliError::Config(format!("expected key=value, got {s:?}")))
            });
            let extra: Vec<_> = extra.collect::<Result<_, _>>()?;
            let lists = lists
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .chain(extra);
            for (key, value) in lists {
                if let Some(v) = value {
                    g.base.remove(&key);
                    g.axes.retain(|(k, _)| *k != key);
                    if v.contains(',') {
                        g.add_axis(&key, &v)?;
                    } else {
                        g.base.insert(&key, v);
                    }
                }
            }
            let workers = worker_cap()?;
            let results = run_sweep(&g, &out, workers)?;
            let failed = results
                .iter()
                .filter(|r| matches!(r.status, CellStatus::Failed(_)))
                .count();
            let skipped = results
                .iter()
                .filter(|r| r.status == CellStatus::Skipped)
                .count();
            println!(
                "{} cells ({skipped} already done, {failed} failed), worker cap {workers}; table in {}",
                results.len(),
                out.join(AGGREGATE_FILE).display()
            );
            if failed > 0 {
                return Err(CliError::Numerical(format!("{failed} cells failed")));
            }
        }
        Command::Plot { dir } => {
            for path in plot_run(&dir)? {
                println!("{}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sphereflow: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

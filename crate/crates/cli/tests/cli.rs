//! The `sphereflow` binary end to end: outputs, exit codes, resume.

use std::path::Path;
use std::process::{Command, Output};

fn sphereflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sphereflow"))
        .args(args)
        .env("SPHEREFLOW_WORKERS", "2")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn text(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn constants_prints_and_writes_the_chain() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("chain.csv");
    let o = sphereflow(&[
        "constants",
        "--n",
        "3",
        "--p",
        "6",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("gamma_0"));
    assert!(text(&csv).starts_with("name,log10_value,provenance\n"));
    let o = sphereflow(&["constants", "--n", "3", "--p", "3"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("p"));
}

#[test]
fn exact_families() {
    let o = sphereflow(&[
        "exact",
        "umbilical",
        "--n",
        "3",
        "--r0",
        "pi/3",
        "--dt",
        "0.01",
    ]);
    assert_eq!(code(&o), 0);
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(out.starts_with("t,radius,h,a2,vol,a_lp\n"));
    assert_eq!(out.lines().count(), 1 + 24);
    let o = sphereflow(&[
        "exact", "clifford", "--n", "4", "--k", "2", "--theta0", "pi/4", "--t-end", "0.01",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        String::from_utf8(o.stdout).unwrap().lines().count(),
        1 + 101
    );
    let o = sphereflow(&["exact", "clifford", "--n", "4", "--k", "0", "--theta0", "1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn simulate_writes_a_rerunnable_directory() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("run");
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "n = 3\ninitial.kind = umbilical\ninitial.r0 = pi/3\nnodes = 256\n",
    )
    .unwrap();
    let o = sphereflow(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--nodes",
        "48",
        "--set",
        "seed=5",
        "--out",
        run.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let series = text(&run.join("series.csv"));
    assert!(series.starts_with("t,vol,max_a2,a_lp,aring_lq,h_lp\n"));
    let row = series.lines().nth(1).unwrap();
    assert!(row
        .split(',')
        .all(|x| x.split('e').next().unwrap().trim_start_matches('-').len() == 18));
    assert!(text(&run.join("events.csv")).contains("extinction"));
    let manifest = text(&run.join("manifest"));
    assert!(manifest.contains("nodes = 48\n") && manifest.contains("seed = 5\n"));
    assert!(manifest.contains("result.outcome = RoundPoint\n"));
    // the manifest alone reproduces the run
    let again = dir.path().join("again");
    let o = sphereflow(&[
        "simulate",
        "--config",
        run.join("manifest").to_str().unwrap(),
        "--out",
        again.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(series, text(&again.join("series.csv")));
}

#[test]
fn simulate_config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x");
    let out = out.to_str().unwrap();
    for args in [
        vec![
            "simulate",
            "--n",
            "3",
            "--r0",
            "pi/3",
            "--set",
            "colour=red",
            "--out",
            out,
        ],
        vec!["simulate", "--n", "3", "--initial", "torus", "--out", out],
        vec!["simulate", "--n", "3", "--r0", "pi/3"],
        vec!["simulate", "--n", "3", "--r0", "4", "--out", out],
        vec!["simulate", "--config", "/nonexistent/run.cfg", "--out", out],
    ] {
        assert_eq!(code(&sphereflow(&args)), 2, "{args:?}");
    }
}

#[test]
fn failed_sweep_cells_are_recorded_with_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = sphereflow(&[
        "sweep",
        "--r0",
        "1.0,4.0",
        "--amplitude",
        "0",
        "--set",
        "nodes=32",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 3);
    let table = text(&dir.path().join("sweep.csv"));
    let rows: Vec<&str> = table.lines().collect();
    assert!(rows[1].contains("RoundPoint") && rows[1].contains(",ran,"));
    assert!(rows[2].contains(",failed,") && rows[2].contains("radius"));
}

#[test]
fn verify_selects_and_rejects() {
    let o = sphereflow(&["verify", "constants"]);
    assert_eq!(code(&o), 0);
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(out.starts_with("check,params,value,verdict\n"));
    assert!(out
        .lines()
        .skip(1)
        .all(|l| l.starts_with("constants,") && l.ends_with(",PASS")));
    assert_eq!(code(&sphereflow(&["verify", "no_such_check"])), 2);
    let o = sphereflow(&["verify", "--list"]);
    assert!(String::from_utf8(o.stdout)
        .unwrap()
        .lines()
        .any(|l| l == "moser"));
}

#[test]
fn sweep_runs_resumes_and_aggregates() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let args = [
        "sweep",
        "--r0",
        "pi/6,pi/3,pi/2",
        "--amplitude",
        "0,0.02,0.05",
        "--mode",
        "2",
        "--set",
        "nodes=48",
        "--out",
        out,
    ];
    let o = sphereflow(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let manifests = (0..9)
        .filter(|i| dir.path().join(format!("cell-{i:04}/manifest")).exists())
        .count();
    assert_eq!(manifests, 9);
    let table = text(&dir.path().join("sweep.csv"));
    assert_eq!(table.lines().count(), 10);
    assert!(!table.contains("SingularNonRound"));
    let o = sphereflow(&args);
    assert!(String::from_utf8(o.stdout)
        .unwrap()
        .contains("9 already done"));
    assert!(text(&dir.path().join("sweep.csv"))
        .lines()
        .skip(1)
        .all(|l| l.contains(",skipped,")));
    let o = Command::new(env!("CARGO_BIN_EXE_sphereflow"))
        .args(args)
        .env("SPHEREFLOW_WORKERS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn plot_writes_svg_and_fails_without_series() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("eq");
    let o = sphereflow(&[
        "simulate",
        "--n",
        "3",
        "--initial",
        "equator",
        "--nodes",
        "32",
        "--stationary-steps",
        "20",
        "--out",
        run.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let o = sphereflow(&["plot", run.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let svg = text(&run.join("volume.svg"));
    assert!(svg.starts_with("<svg") && svg.contains("TotallyGeodesic"));
    let empty = dir.path().join("empty");
    std::fs::create_dir(&empty).unwrap();
    assert_ne!(code(&sphereflow(&["plot", empty.to_str().unwrap()])), 0);
}

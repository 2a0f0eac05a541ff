//! Standalone SVG line plots of a run's series.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::CliError;
use crate::output::{read_manifest, read_series, MANIFEST_FILE, SERIES_FILE, SERIES_HEADER};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const MARGIN: [f64; 4] = [70.0, 30.0, 40.0, 60.0]; // left, right, top, bottom
const COLOURS: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log10,
}

pub struct Series<'a> {
    pub label: &'a str,
    pub points: Vec<(f64, f64)>,
}

fn ticks(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..=count)
        .map(|i| lo + (hi - lo) * i as f64 / count as f64)
        .collect()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Renders line plots sharing one x axis. Points that cannot be shown on
/// the chosen scale (non-finite, or non-positive on a log axis) are dropped.
pub fn line_plot(title: &str, x_label: &str, scale: Scale, series: &[Series]) -> String {
    let map_y = |y: f64| match scale {
        Scale::Linear => y.is_finite().then_some(y),
        Scale::Log10 => (y > 0.0 && y.is_finite()).then(|| y.log10()),
    };
    let shown: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| {
            s.points
                .iter()
                .filter(|(x, _)| x.is_finite())
                .filter_map(|&(x, y)| map_y(y).map(|y| (x, y)))
                .collect()
        })
        .collect();
    let all = shown.iter().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 <= 0.0 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 <= 1e-12 * y0.abs().max(1.0) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let [ml, mr, mt, mb] = MARGIN;
    let (pw, ph) = (WIDTH - ml - mr, HEIGHT - mt - mb);
    let px = |x: f64| ml + (x - x0) / (x1 - x0) * pw;
    let py = |y: f64| mt + (1.0 - (y - y0) / (y1 - y0)) * ph;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for x in ticks(x0, x1, 5) {
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{:.3e}</text>"#,
            px(x),
            mt + ph + 18.0,
            x
        );
    }
    for y in ticks(y0, y1, 5) {
        let label = match scale {
            Scale::Linear => format!("{y:.3e}"),
            Scale::Log10 => format!("1e{y:.1}"),
        };
        let _ = writeln!(
            svg,
            r##"<line x1="{ml}" x2="{:.1}" y1="{yy:.1}" y2="{yy:.1}" stroke="#ddd"/><text x="{:.1}" y="{:.1}" text-anchor="end">{label}</text>"##,
            ml + pw,
            ml - 6.0,
            py(y) + 4.0,
            yy = py(y),
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        ml + pw / 2.0,
        HEIGHT - 15.0,
        escape(x_label)
    );
    for (k, (s, pts)) in series.iter().zip(&shown).enumerate() {
        let colour = COLOURS[k % COLOURS.len()];
        if !pts.is_empty() {
            let path: Vec<String> = pts
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
                path.join(" ")
            );
        }
        let ly = mt + 16.0 + 16.0 * k as f64;
        let _ = writeln!(
            svg,
            r#"<line x1="{:.1}" x2="{:.1}" y1="{ly}" y2="{ly}" stroke="{colour}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}{}</text>"#,
            ml + pw - 130.0,
            ml + pw - 110.0,
            ml + pw - 104.0,
            ly + 4.0,
            escape(s.label),
            if pts.is_empty() { " (not shown)" } else { "" }
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Writes `norms.svg` and `volume.svg` into `dir`, returning their paths.
pub fn plot_run(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let series_path = dir.join(SERIES_FILE);
    if !series_path.is_file() {
        return Err(CliError::Input(format!(
            "no {SERIES_FILE} in {}",
            dir.display()
        )));
    }
    let rows = read_series(&series_path)?;
    if rows.is_empty() {
        return Err(CliError::Input(format!(
            "{} has no rows",
            series_path.display()
        )));
    }
    let annotation = match read_manifest(&dir.join(MANIFEST_FILE)) {
        Ok((_, results)) => format!(
            "outcome {} at t = {}",
            results.get("result.outcome").unwrap_or("?"),
            results.get("result.t_final").unwrap_or("?")
        ),
        Err(_) => "no manifest".to_string(),
    };
    let column = |k: usize| -> Vec<(f64, f64)> { rows.iter().map(|r| (r[0], r[k])).collect() };
    let norms: Vec<Series> = (2..6)
        .map(|k| Series {
            label: SERIES_HEADER[k],
            points: column(k),
        })
        .collect();
    let volume = [Series {
        label: SERIES_HEADER[1],
        points: column(1),
    }];
    let outputs = [
        (
            "norms.svg",
            line_plot(
                &format!("Curvature norms, {annotation}"),
                "t",
                Scale::Log10,
                &norms,
            ),
        ),
        (
            "volume.svg",
            line_plot(
                &format!("Volume, {annotation}"),
                "t",
                Scale::Linear,
                &volume,
            ),
        ),
    ];
    let mut written = Vec::new();
    for (name, svg) in outputs {
        let path = dir.join(name);
        std::fs::write(&path, svg)?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_and_empty_series_render() {
        let flat = [Series {
            label: "a",
            points: vec![(0.0, 2.0), (1.0, 2.0)],
        }];
        let svg = line_plot("flat", "t", Scale::Linear, &flat);
        assert!(svg.starts_with("<svg") && svg.contains("<polyline"));
        let zeros = [Series {
            label: "z",
            points: vec![(0.0, 0.0), (1.0, 0.0)],
        }];
        let svg = line_plot("zeros", "t", Scale::Log10, &zeros);
        assert!(!svg.contains("<polyline") && svg.contains("(not shown)"));
    }

    #[test]
    fn missing_series_is_an_input_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(plot_run(dir.path()), Err(CliError::Input(_))));
    }
}

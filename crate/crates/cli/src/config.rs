//! Flat `key = value` configuration with dotted keys.
//!
//! Blank lines and lines starting with `#` are skipped. Numbers accept
//! multiples and fractions of `pi` (`pi/3`, `2*pi/5`, `-pi`).

use std::collections::BTreeMap;
use std::path::PathBuf;

use sphereflow::simulator::{InitialData, SimConfig};

use crate::error::CliError;

/// Ordered key/value pairs as read from a file or the command line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues {
    entries: BTreeMap<String, String>,
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut kv = KeyValues::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            kv.insert_assignment(line)
                .map_err(|e| CliError::Config(format!("line {}: {e}", no + 1)))?;
        }
        Ok(kv)
    }

    /// Adds one `key=value` assignment, replacing an earlier value.
    pub fn insert_assignment(&mut self, line: &str) -> Result<(), CliError> {
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("expected key = value, got {line:?}")))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(CliError::Config(format!("empty key in {line:?}")));
        }
        self.entries.insert(k.to_string(), v.to_string());
        Ok(())
    }

    pub fn insert(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn remove(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Drops keys with the given prefix.
    pub fn without_prefix(&self, prefix: &str) -> Self {
        KeyValues {
            entries: self
                .entries
                .iter()
                .filter(|(k, _)| !k.starts_with(prefix))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    pub fn merged(&self, over: &KeyValues) -> Self {
        let mut out = self.clone();
        for (k, v) in over.iter() {
            out.insert(k, v);
        }
        out
    }

    pub fn to_text(&self) -> String {
        self.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

/// Parses a real number, allowing `pi` factors: `pi`, `pi/6`, `2*pi/3`, `1.5`.
pub fn parse_real(s: &str) -> Result<f64, CliError> {
    let bad = || CliError::Config(format!("not a number: {s:?}"));
    let t = s.trim().to_ascii_lowercase();
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest.trim()),
        None => (1.0, t.as_str()),
    };
    if !body.contains("pi") {
        let v: f64 = body.parse().map_err(|_| bad())?;
        return Ok(sign * v);
    }
    let (num, den) = match body.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim().parse::<f64>().map_err(|_| bad())?),
        None => (body, 1.0),
    };
    let factor = match num.strip_suffix("pi") {
        Some("") => 1.0,
        Some(f) => f
            .trim_end_matches('*')
            .trim()
            .parse::<f64>()
            .map_err(|_| bad())?,
        None => return Err(bad()),
    };
    if den == 0.0 {
        return Err(bad());
    }
    Ok(sign * factor * std::f64::consts::PI / den)
}

fn parse_count(key: &str, s: &str) -> Result<usize, CliError> {
    let v = parse_real(s)?;
    if v < 0.0 || v.fract() != 0.0 || v > u32::MAX as f64 * 1e3 {
        return Err(CliError::Config(format!(
            "{key} must be a nonnegative integer, got {s:?}"
        )));
    }
    Ok(v as usize)
}

/// Every key a run configuration understands.
pub const RUN_KEYS: &[&str] = &[
    "n",
    "p",
    "q",
    "nodes",
    "max_steps",
    "max_time",
    "tol_ext",
    "tol_geo",
    "tol_round",
    "cap",
    "stationary_steps",
    "redistribute_every",
    "record_every",
    "c_parab",
    "c_react",
    "seed",
    "output",
    "initial.kind",
    "initial.r0",
    "initial.k",
    "initial.theta0",
    "initial.mode",
    "initial.amplitude",
];

/// A simulation request: the flow parameters plus bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub sim: SimConfig,
    /// Echoed into the manifest; the flow itself is deterministic.
    pub seed: u64,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_kv(kv: &KeyValues) -> Result<Self, CliError> {
        if let Some((k, _)) = kv.iter().find(|(k, _)| !RUN_KEYS.contains(k)) {
            return Err(CliError::Config(format!("unknown key {k:?}")));
        }
        let real = |k: &str| kv.get(k).map(parse_real).transpose();
        let need = |k: &str| real(k)?.ok_or_else(|| CliError::Config(format!("missing key {k:?}")));
        let n = parse_count(
            "n",
            kv.get("n")
                .ok_or_else(|| CliError::Config("missing key \"n\"".into()))?,
        )?;
        let kind = kv.get("initial.kind").unwrap_or("umbilical");
        let initial = match kind {
            "umbilical" => InitialData::Umbilical {
                r0: need("initial.r0")?,
            },
            "equator" => InitialData::Equator,
            "clifford" => InitialData::Clifford {
                k: kv
                    .get("initial.k")
                    .map(|s| parse_count("initial.k", s))
                    .transpose()?
                    .unwrap_or(1),
                theta0: need("initial.theta0")?,
            },
            "perturbed" => InitialData::Perturbed {
                r0: need("initial.r0")?,
                mode: parse_count("initial.mode", kv.get("initial.mode").unwrap_or("2"))? as u32,
                amplitude: need("initial.amplitude")?,
            },
            other => return Err(CliError::Config(format!("unknown initial.kind {other:?}"))),
        };
        let mut sim = SimConfig::new(n, initial);
        macro_rules! set_real {
            ($key:literal, $field:expr) => {
                if let Some(v) = real($key)? {
                    $field = v;
                }
            };
        }
        macro_rules! set_count {
            ($key:literal, $field:expr) => {
                if let Some(v) = kv.get($key) {
                    $field = parse_count($key, v)?;
                }
            };
        }
        set_real!("p", sim.p);
        set_real!("q", sim.q);
        set_count!("nodes", sim.nodes);
        set_count!("max_steps", sim.max_steps);
        set_real!("max_time", sim.max_time);
        set_real!("tol_ext", sim.tol_ext);
        set_real!("tol_geo", sim.tol_geo);
        set_real!("tol_round", sim.tol_round);
        set_real!("cap", sim.cap);
        set_count!("stationary_steps", sim.stationary_steps);
        set_count!("redistribute_every", sim.redistribute_every);
        set_count!("record_every", sim.record_every);
        set_real!("c_parab", sim.step.c_parab);
        set_real!("c_react", sim.step.c_react);
        let seed = match kv.get("seed") {
            Some(s) => s.parse().map_err(|_| {
                CliError::Config(format!("seed must be an unsigned integer, got {s:?}"))
            })?,
            None => 0,
        };
        sim.validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(RunConfig {
            sim,
            seed,
            output: kv.get("output").map(PathBuf::from),
        })
    }

    /// Full echo of the configuration; `from_kv(to_kv())` reproduces it.
    pub fn to_kv(&self) -> KeyValues {
        let s = &self.sim;
        let mut kv = KeyValues::default();
        kv.insert("n", s.n);
        kv.insert("p", s.p);
        kv.insert("q", s.q);
        kv.insert("nodes", s.nodes);
        kv.insert("max_steps", s.max_steps);
        kv.insert("max_time", s.max_time);
        kv.insert("tol_ext", s.tol_ext);
        kv.insert("tol_geo", s.tol_geo);
        kv.insert("tol_round", s.tol_round);
        kv.insert("cap", s.cap);
        kv.insert("stationary_steps", s.stationary_steps);
        kv.insert("redistribute_every", s.redistribute_every);
        kv.insert("record_every", s.record_every);
        kv.insert("c_parab", s.step.c_parab);
        kv.insert("c_react", s.step.c_react);
        kv.insert("seed", self.seed);
        if let Some(o) = &self.output {
            kv.insert("output", o.display());
        }
        match s.initial {
            InitialData::Umbilical { r0 } => {
                kv.insert("initial.kind", "umbilical");
                kv.insert("initial.r0", r0);
            }
            InitialData::Equator => kv.insert("initial.kind", "equator"),
            InitialData::Clifford { k, theta0 } => {
                kv.insert("initial.kind", "clifford");
                kv.insert("initial.k", k);
                kv.insert("initial.theta0", theta0);
            }
            InitialData::Perturbed {
                r0,
                mode,
                amplitude,
            } => {
                kv.insert("initial.kind", "perturbed");
                kv.insert("initial.r0", r0);
                kv.insert("initial.mode", mode);
                kv.insert("initial.amplitude", amplitude);
            }
        }
        kv
    }
}

//! Resolved run configuration and the small parsers behind the flags.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use spinbell::shadows::Estimator;
use spinbell::{Backend, Boundary, TimeGrid};

pub const OUT_DIR_ENV: &str = "SPINBELL_OUT_DIR";

/// A configuration problem, reported with the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: &str, message: impl Into<String>) -> Self {
        ConfigError {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Correlator,
    Scan,
    Gamma,
    CriticalTime,
    Diagrams,
    Asymptotic,
    Shadows,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Correlator => "correlator",
            CommandKind::Scan => "scan",
            CommandKind::Gamma => "gamma",
            CommandKind::CriticalTime => "critical-time",
            CommandKind::Diagrams => "diagrams",
            CommandKind::Asymptotic => "asymptotic",
            CommandKind::Shadows => "shadows",
        }
    }
}

/// An interaction range; `all` couples every pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RangeSel {
    Value(usize),
    All(AllTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AllTag {
    All,
}

impl RangeSel {
    pub fn resolve(self, n_spins: usize) -> usize {
        match self {
            RangeSel::Value(r) => r.min(n_spins.saturating_sub(1)),
            RangeSel::All(_) => n_spins.saturating_sub(1),
        }
    }
}

/// Where the correlator is evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Times {
    Grid(TimeGrid),
    Points(Vec<f64>),
}

impl Times {
    pub fn points(&self) -> Vec<f64> {
        match self {
            Times::Grid(g) => g.points(),
            Times::Points(p) => p.clone(),
        }
    }
}

/// Everything a run depends on; the sidecar echoes this verbatim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub n_values: Vec<usize>,
    pub ranges: Vec<RangeSel>,
    pub boundary: Boundary,
    pub times: Option<Times>,
    pub backend: Backend,
    pub seed: u64,
    /// Snapshots per reconstruction; `10^4 N` when absent.
    pub snapshots: Option<usize>,
    pub reconstructions: usize,
    pub estimator: Estimator,
    pub export_snapshots: Option<PathBuf>,
    pub out: PathBuf,
    pub threads: usize,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_values.is_empty() {
            return Err(ConfigError::new("n", "no chain sizes given"));
        }
        if let Some(&n) = self.n_values.iter().find(|&&n| n < 2) {
            return Err(ConfigError::new("n", format!("N = {n} is below 2")));
        }
        if self.ranges.is_empty() {
            return Err(ConfigError::new("r", "no ranges given"));
        }
        if self.ranges.contains(&RangeSel::Value(0)) {
            return Err(ConfigError::new("r", "ranges start at 1"));
        }
        let even_only = matches!(
            self.command,
            CommandKind::Gamma | CommandKind::Diagrams | CommandKind::Asymptotic
        );
        if even_only {
            if let Some(&n) = self.n_values.iter().find(|&&n| n % 2 == 1) {
                return Err(ConfigError::new(
                    "n",
                    format!("{} needs even N, got {n}", self.command.name()),
                ));
            }
        }
        if self.command == CommandKind::Gamma {
            let mut distinct = self.n_values.clone();
            distinct.sort_unstable();
            distinct.dedup();
            if distinct.len() < 3 {
                return Err(ConfigError::new("n", "gamma needs at least 3 distinct N"));
            }
        }
        if self.command == CommandKind::Shadows {
            if let Some(&n) = self
                .n_values
                .iter()
                .find(|&&n| n > spinbell::shadows::MAX_SHADOW_SPINS)
            {
                return Err(ConfigError::new(
                    "n",
                    format!(
                        "shadows sample at most {} spins, got {n}",
                        spinbell::shadows::MAX_SHADOW_SPINS
                    ),
                ));
            }
            if self.snapshots == Some(0) {
                return Err(ConfigError::new("snapshots", "need at least one snapshot"));
            }
            if self.reconstructions == 0 {
                return Err(ConfigError::new(
                    "reconstructions",
                    "need at least one reconstruction",
                ));
            }
        }
        let needs_times = !matches!(self.command, CommandKind::Diagrams);
        match &self.times {
            None if needs_times => return Err(ConfigError::new("tau", "give --tau or --grid")),
            Some(Times::Points(p)) => {
                if p.is_empty() {
                    return Err(ConfigError::new("tau", "empty time list"));
                }
                if let Some(t) = p.iter().find(|t| !t.is_finite()) {
                    return Err(ConfigError::new("tau", format!("{t} is not finite")));
                }
                if matches!(
                    self.command,
                    CommandKind::Scan | CommandKind::Gamma | CommandKind::CriticalTime
                ) {
                    return Err(ConfigError::new(
                        "grid",
                        format!("{} needs a uniform --grid", self.command.name()),
                    ));
                }
            }
            _ => {}
        }
        if self.boundary == Boundary::Periodic && self.command != CommandKind::Correlator {
            return Err(ConfigError::new(
                "boundary",
                "periodic chains are supported by `correlator` only",
            ));
        }
        Ok(())
    }

    /// Destination of the CSV; the output-directory variable replaces the directory part.
    pub fn csv_path(&self) -> PathBuf {
        resolve_output(&self.out)
    }

    pub fn sidecar_path(&self) -> PathBuf {
        self.csv_path().with_extension("json")
    }
}

pub fn resolve_output(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if !dir.is_empty() => {
            let name = path
                .file_name()
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from("out.csv"));
            PathBuf::from(dir).join(name)
        }
        _ => path.to_path_buf(),
    }
}

/// Comma list of integers and inclusive `a..b` ranges, e.g. `2,4..8`.
pub fn parse_int_list(field: &str, text: &str) -> Result<Vec<usize>, ConfigError> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim) {
        if item.is_empty() {
            return Err(ConfigError::new(field, format!("empty item in `{text}`")));
        }
        if let Some((a, b)) = item.split_once("..") {
            let a = parse_int(field, a)?;
            let b = parse_int(field, b)?;
            if b < a {
                return Err(ConfigError::new(
                    field,
                    format!("descending range `{item}`"),
                ));
            }
            out.extend(a..=b);
        } else {
            out.push(parse_int(field, item)?);
        }
    }
    Ok(out)
}

fn parse_int(field: &str, text: &str) -> Result<usize, ConfigError> {
    text.trim()
        .parse()
        .map_err(|_| ConfigError::new(field, format!("`{text}` is not a non-negative integer")))
}

/// Like [`parse_int_list`] but also accepts `all`.
pub fn parse_range_list(text: &str) -> Result<Vec<RangeSel>, ConfigError> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim) {
        if item == "all" {
            out.push(RangeSel::All(AllTag::All));
        } else {
            out.extend(parse_int_list("r", item)?.into_iter().map(RangeSel::Value));
        }
    }
    Ok(out)
}

pub fn parse_real_list(field: &str, text: &str) -> Result<Vec<f64>, ConfigError> {
    text.split(',')
        .map(|item| {
            item.trim()
                .parse::<f64>()
                .map_err(|_| ConfigError::new(field, format!("`{item}` is not a decimal number")))
        })
        .collect()
}

/// `start:stop:steps`.
pub fn parse_grid(text: &str) -> Result<TimeGrid, ConfigError> {
    let parts: Vec<&str> = text.split(':').collect();
    let [start, stop, steps] = parts[..] else {
        return Err(ConfigError::new(
            "grid",
            format!("expected start:stop:steps, got `{text}`"),
        ));
    };
    let real = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| ConfigError::new("grid", format!("`{s}` is not a decimal number")))
    };
    let steps = parse_int("grid", steps)?;
    TimeGrid::new(real(start)?, real(stop)?, steps)
        .map_err(|e| ConfigError::new("grid", e.to_string()))
}

//! Chain geometry, time grids and the classical Ising energy.
//!
//! Sites are indexed from 0. Each coupled pair contributes exactly once to the
//! energy, so the energy of every configuration is an integer and the dynamics
//! are periodic in τ with period 2π.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Boundary::Open => f.write_str("open"),
            Boundary::Periodic => f.write_str("periodic"),
        }
    }
}

impl FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "open" => Ok(Boundary::Open),
            "periodic" => Ok(Boundary::Periodic),
            other => Err(Error::InvalidChain(format!("unknown boundary {other:?}"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    n_spins: usize,
    range: usize,
    boundary: Boundary,
}

/// A chain of `n_spins` spins with rectangular couplings of width `range`.
///
/// Ranges at or beyond `n_spins - 1` are clamped to the all-to-all case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct ChainSpec {
    n_spins: usize,
    range: usize,
    boundary: Boundary,
}

impl TryFrom<RawSpec> for ChainSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        ChainSpec::new(raw.n_spins, raw.range, raw.boundary)
    }
}

impl From<ChainSpec> for RawSpec {
    fn from(spec: ChainSpec) -> Self {
        RawSpec {
            n_spins: spec.n_spins,
            range: spec.range,
            boundary: spec.boundary,
        }
    }
}

impl ChainSpec {
    pub fn new(n_spins: usize, range: usize, boundary: Boundary) -> Result<Self> {
        if n_spins < 2 {
            return Err(Error::InvalidChain(format!(
                "need at least 2 spins, got {n_spins}"
            )));
        }
        if range < 1 {
            return Err(Error::InvalidChain("range must be at least 1".into()));
        }
        Ok(ChainSpec {
            n_spins,
            range: range.min(n_spins - 1),
            boundary,
        })
    }

    pub fn open(n_spins: usize, range: usize) -> Result<Self> {
        Self::new(n_spins, range, Boundary::Open)
    }

    pub fn all_to_all(n_spins: usize) -> Result<Self> {
        Self::new(n_spins, n_spins.saturating_sub(1).max(1), Boundary::Open)
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn range(&self) -> usize {
        self.range
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Every pair of spins is coupled.
    pub fn is_all_to_all(&self) -> bool {
        match self.boundary {
            Boundary::Open => self.range == self.n_spins - 1,
            Boundary::Periodic => 2 * self.range >= self.n_spins,
        }
    }

    /// Odd chains have a vanishing correlator at all times.
    pub fn parity_trivial(&self) -> bool {
        self.n_spins % 2 == 1
    }

    fn distance(&self, k: usize, l: usize) -> usize {
        let d = k.abs_diff(l);
        match self.boundary {
            Boundary::Open => d,
            Boundary::Periodic => d.min(self.n_spins - d),
        }
    }

    /// Coupling strength J between sites `k` and `l` (0-based): 1 inside the
    /// range, 0 otherwise and on the diagonal.
    pub fn coupling(&self, k: usize, l: usize) -> Result<u8> {
        for index in [k, l] {
            if index >= self.n_spins {
                return Err(Error::SiteOutOfRange {
                    index,
                    n_spins: self.n_spins,
                });
            }
        }
        let d = self.distance(k, l);
        Ok(u8::from(d > 0 && d <= self.range))
    }

    /// All coupled unordered pairs `(k, l)` with `k < l`.
    pub fn coupled_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.n_spins;
        (0..n)
            .flat_map(|k| (k + 1..n).map(move |l| (k, l)))
            .filter(|&(k, l)| {
                let d = self.distance(k, l);
                d > 0 && d <= self.range
            })
            .collect()
    }

    /// Number of coupled pairs; `r(2N - r - 1)/2` for open chains.
    pub fn pair_count(&self) -> usize {
        match self.boundary {
            Boundary::Open => self.range * (2 * self.n_spins - self.range - 1) / 2,
            Boundary::Periodic => self.coupled_pairs().len(),
        }
    }

    /// Classical Ising energy `H_s = Σ_{k<l} J_kl s_k s_l`.
    pub fn classical_energy(&self, config: &SpinConfig) -> Result<i64> {
        if config.len() != self.n_spins {
            return Err(Error::LengthMismatch {
                expected: self.n_spins,
                found: config.len(),
            });
        }
        let s = config.values();
        Ok(self
            .coupled_pairs()
            .into_iter()
            .map(|(k, l)| i64::from(s[k]) * i64::from(s[l]))
            .sum())
    }

    /// Serialize as a flat `key = value` block.
    pub fn to_config_block(&self) -> String {
        toml::to_string(self).expect("ChainSpec always serializes")
    }

    pub fn from_config_block(block: &str) -> Result<Self> {
        toml::from_str(block).map_err(|e| Error::Config(e.to_string()))
    }
}

impl fmt::Display for ChainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N={} r={} {}", self.n_spins, self.range, self.boundary)
    }
}

/// Spin values `s_k ∈ {+1, -1}` in the z basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpinConfig(Vec<i8>);

impl SpinConfig {
    pub fn new(values: Vec<i8>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|&&v| v != 1 && v != -1) {
            return Err(Error::InvalidChain(format!("spin value {bad} is not ±1")));
        }
        Ok(SpinConfig(values))
    }

    /// Decode a z-basis index: bit `k` set means spin `k` points down.
    pub fn from_index(index: usize, n_spins: usize) -> Self {
        SpinConfig(
            (0..n_spins)
                .map(|k| if index >> k & 1 == 1 { -1 } else { 1 })
                .collect(),
        )
    }

    pub fn values(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn magnetization(&self) -> i64 {
        self.0.iter().map(|&s| i64::from(s)).sum()
    }

    pub fn flipped(&self) -> Self {
        SpinConfig(self.0.iter().map(|&s| -s).collect())
    }
}

/// Uniform grid of dimensionless times, both endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn new(start: f64, stop: f64, steps: usize) -> Result<Self> {
        if !(start.is_finite() && stop.is_finite()) || start < 0.0 {
            return Err(Error::InvalidGrid(format!(
                "start {start} must be finite and non-negative"
            )));
        }
        if stop <= start {
            return Err(Error::InvalidGrid(format!(
                "stop {stop} must exceed start {start}"
            )));
        }
        if steps < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 points, got {steps}"
            )));
        }
        Ok(TimeGrid { start, stop, steps })
    }

    /// 2000 points on [0, π/2].
    pub fn quarter_period() -> Self {
        TimeGrid {
            start: 0.0,
            stop: std::f64::consts::FRAC_PI_2,
            steps: 2000,
        }
    }

    pub fn spacing(&self) -> f64 {
        (self.stop - self.start) / (self.steps - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.steps {
            self.stop
        } else {
            self.start + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.steps).map(|i| self.point(i)).collect()
    }
}

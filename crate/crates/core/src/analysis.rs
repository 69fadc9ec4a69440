//! Classification, extremum search, critical times and scaling fits.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{ChainSpec, TimeGrid};
use crate::error::{Error, Result};
use crate::exact::{correlator_with, evaluate_points, format_real, Backend};
use crate::fit::linear_fit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationLevel {
    ConsistentWithLhv,
    Entangled,
    BellCorrelated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationClass {
    pub level: CorrelationLevel,
    /// Number of spins that must share Bell correlations.
    pub depth: usize,
    /// `Q / N`.
    pub fraction: f64,
}

impl CorrelationClass {
    pub fn is_bell_correlated(&self) -> bool {
        self.level == CorrelationLevel::BellCorrelated
    }

    pub fn is_entangled(&self) -> bool {
        self.level >= CorrelationLevel::Entangled
    }
}

/// Smallest `ν` with `ν - 3 < Q <= ν - 2`, clamped to `[0, N]`; zero for `Q <= 0`.
pub fn nonlocality_depth(q_value: f64, n_spins: usize) -> usize {
    if q_value.is_nan() || q_value <= 0.0 {
        return 0;
    }
    let nu = (q_value + 2.0).ceil();
    nu.clamp(0.0, n_spins as f64) as usize
}

/// Classifies a correlator value: Bell-correlated above `2^-N`, entangled above `4^-N`.
pub fn classify(e_value: f64, n_spins: usize) -> Result<CorrelationClass> {
    if !(0.0..=0.25 * (1.0 + 1e-9)).contains(&e_value) {
        return Err(Error::CorrelatorOutOfBounds(e_value));
    }
    Ok(classify_q(n_spins as f64 + e_value.log2(), n_spins))
}

/// Classification from `Q = N + log2 E`, usable where `E` underflows.
pub fn classify_q(q_value: f64, n_spins: usize) -> CorrelationClass {
    let level = if q_value > 0.0 {
        CorrelationLevel::BellCorrelated
    } else if q_value > -(n_spins as f64) {
        CorrelationLevel::Entangled
    } else {
        CorrelationLevel::ConsistentWithLhv
    };
    CorrelationClass {
        level,
        depth: nonlocality_depth(q_value, n_spins),
        fraction: q_value / n_spins as f64,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Width of the bracket left by the golden-section maximization.
    pub max_tau: f64,
    /// Width of the bracket left by the zero-crossing bisection.
    pub crit_tau: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            max_tau: 1e-6,
            crit_tau: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub tau: f64,
    pub q_value: f64,
}

fn q_at(spec: &ChainSpec, tau: f64, backend: Backend) -> Result<f64> {
    Ok(correlator_with(spec, tau, backend)?.q_value)
}

fn golden_max<F>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Result<Extremum>
where
    F: FnMut(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc >= fd {
        Extremum {
            tau: c,
            q_value: fc,
        }
    } else {
        Extremum {
            tau: d,
            q_value: fd,
        }
    })
}

/// Index of the first grid point strictly above its left neighbour and not
/// below its right one.
fn first_interior_max(q: &[f64]) -> Option<usize> {
    (1..q.len().saturating_sub(1)).find(|&i| q[i] > q[i - 1] && q[i] >= q[i + 1])
}

fn refine_max(
    spec: &ChainSpec,
    taus: &[f64],
    q: &[f64],
    i: usize,
    backend: Backend,
    tol: f64,
) -> Result<Extremum> {
    let refined = golden_max(|t| q_at(spec, t, backend), taus[i - 1], taus[i + 1], tol)?;
    Ok(if refined.q_value >= q[i] {
        refined
    } else {
        Extremum {
            tau: taus[i],
            q_value: q[i],
        }
    })
}

/// Maximum and critical time of one chain on one grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainAnalysis {
    pub n_spins: usize,
    pub range: usize,
    pub first_max: Extremum,
    pub tau_crit: Option<f64>,
}

impl ChainAnalysis {
    pub fn class(&self) -> CorrelationClass {
        classify_q(self.first_max.q_value, self.n_spins)
    }
}

/// First interior local maximum of `Q(τ)` on the grid, golden-section refined.
pub fn find_first_max(spec: &ChainSpec, grid: &TimeGrid, backend: Backend) -> Result<Extremum> {
    Ok(analyze(spec, grid, backend, Tolerances::default())?.first_max)
}

/// Largest grid value of `Q(τ)`, golden-section refined.
pub fn find_global_max(spec: &ChainSpec, grid: &TimeGrid, backend: Backend) -> Result<Extremum> {
    let taus = grid.points();
    let q = grid_q(spec, &taus, backend)?;
    let i = (1..taus.len() - 1)
        .filter(|&i| !q[i].is_nan())
        .max_by(|&a, &b| q[a].total_cmp(&q[b]))
        .ok_or(Error::NoInteriorMaximum)?;
    refine_max(spec, &taus, &q, i, backend, Tolerances::default().max_tau)
}

/// First upward zero crossing of `Q(τ)` before the first maximum.
pub fn find_critical_time(
    spec: &ChainSpec,
    grid: &TimeGrid,
    backend: Backend,
) -> Result<Option<f64>> {
    match analyze(spec, grid, backend, Tolerances::default()) {
        Ok(a) => Ok(a.tau_crit),
        Err(Error::NoInteriorMaximum) => Ok(None),
        Err(e) => Err(e),
    }
}

fn grid_q(spec: &ChainSpec, taus: &[f64], backend: Backend) -> Result<Vec<f64>> {
    Ok(evaluate_points(spec, taus, backend)?
        .into_iter()
        .map(|p| p.q_value)
        .collect())
}

/// Grid evaluation shared by the maximum and critical-time searches.
pub fn analyze(
    spec: &ChainSpec,
    grid: &TimeGrid,
    backend: Backend,
    tol: Tolerances,
) -> Result<ChainAnalysis> {
    let taus = grid.points();
    let q = grid_q(spec, &taus, backend)?;
    let i = first_interior_max(&q).ok_or(Error::NoInteriorMaximum)?;
    let first_max = refine_max(spec, &taus, &q, i, backend, tol.max_tau)?;

    let tau_crit = if first_max.q_value > 0.0 {
        // grid points up to the maximum, then the maximum itself, which is positive
        let mut path: Vec<(f64, f64)> = (0..=i)
            .filter(|&j| taus[j] < first_max.tau)
            .map(|j| (taus[j], q[j]))
            .collect();
        path.push((first_max.tau, first_max.q_value));
        let j = path
            .iter()
            .position(|p| p.1 > 0.0)
            .unwrap_or(path.len() - 1);
        if j == 0 {
            return Ok(ChainAnalysis {
                n_spins: spec.n_spins(),
                range: spec.range(),
                first_max,
                tau_crit: Some(path[0].0),
            });
        }
        let (mut lo, mut hi) = (path[j - 1].0, path[j].0);
        while hi - lo > tol.crit_tau {
            let mid = 0.5 * (lo + hi);
            if q_at(spec, mid, backend)? > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi)
    } else {
        None
    };

    Ok(ChainAnalysis {
        n_spins: spec.n_spins(),
        range: spec.range(),
        first_max,
        tau_crit,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub entries: Vec<ChainAnalysis>,
}

impl ScanResult {
    pub fn get(&self, n_spins: usize, range: usize) -> Option<&ChainAnalysis> {
        self.entries
            .iter()
            .find(|e| e.n_spins == n_spins && e.range == range)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(SCAN_HEADER)?;
        for e in &self.entries {
            let class = e.class();
            writer.write_record([
                e.n_spins.to_string(),
                e.range.to_string(),
                format_real(e.first_max.tau),
                format_real(e.first_max.q_value),
                e.tau_crit.map(format_real).unwrap_or_default(),
                class.depth.to_string(),
                format_real(class.fraction),
            ])?;
        }
        writer.flush()?;
        Ok(())
    }
}

pub const SCAN_HEADER: [&str; 7] = ["N", "r", "tau_star", "q_max", "tau_crit", "nu", "beta"];

/// Analyzes every open chain `(N, r)`; entries are sorted by `(N, r)`.
pub fn scan(
    n_values: &[usize],
    ranges: &[usize],
    grid: &TimeGrid,
    backend: Backend,
    tol: Tolerances,
) -> Result<ScanResult> {
    let mut specs = Vec::new();
    for &n in n_values {
        for &r in ranges {
            specs.push(ChainSpec::open(n, r)?);
        }
    }
    specs.sort_by_key(|s| (s.n_spins(), s.range()));
    specs.dedup();
    let entries = specs
        .par_iter()
        .map(|spec| analyze(spec, grid, backend, tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanResult { entries })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaFit {
    pub range: usize,
    pub gamma: f64,
    pub gamma_stderr: f64,
    pub intercept: f64,
    pub n_values: Vec<usize>,
}

pub const GAMMA_HEADER: [&str; 4] = ["r", "gamma", "gamma_stderr", "intercept"];

/// Slope of the maximal `Q` against `N` for one range.
pub fn fit_gamma(
    range: usize,
    n_values: &[usize],
    grid: &TimeGrid,
    backend: Backend,
) -> Result<GammaFit> {
    check_fit_sizes(n_values)?;
    let result = scan(n_values, &[range], grid, backend, Tolerances::default())?;
    gamma_from_scan(&result, range)
}

fn check_fit_sizes(n_values: &[usize]) -> Result<()> {
    let mut distinct: Vec<usize> = n_values.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "{} distinct N values, need 3",
            distinct.len()
        )));
    }
    if let Some(&odd) = distinct.iter().find(|&&n| n % 2 == 1) {
        return Err(Error::DegenerateFit(format!("odd N = {odd}")));
    }
    Ok(())
}

/// Fit over the scan entries with the given range.
pub fn gamma_from_scan(result: &ScanResult, range: usize) -> Result<GammaFit> {
    let rows: Vec<&ChainAnalysis> = result.entries.iter().filter(|e| e.range == range).collect();
    let n_values: Vec<usize> = rows.iter().map(|e| e.n_spins).collect();
    check_fit_sizes(&n_values)?;
    let points: Vec<(f64, f64)> = rows
        .iter()
        .map(|e| (e.n_spins as f64, e.first_max.q_value))
        .collect();
    let line = linear_fit(&points)?;
    Ok(GammaFit {
        range,
        gamma: line.slope,
        gamma_stderr: line.slope_stderr,
        intercept: line.intercept,
        n_values,
    })
}

pub fn write_gamma_csv<W: Write>(out: W, fits: &[GammaFit]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(GAMMA_HEADER)?;
    for f in fits {
        writer.write_record([
            f.range.to_string(),
            format_real(f.gamma),
            format_real(f.gamma_stderr),
            format_real(f.intercept),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FractionEntry {
    pub n_spins: usize,
    pub range: usize,
    pub q_max: f64,
    pub depth: usize,
    /// `ν / N`.
    pub beta: f64,
}

/// Maximal fraction of Bell-correlated spins `ν/N` per `(N, r)`.
pub fn fraction_scan(
    ranges: &[usize],
    n_values: &[usize],
    grid: &TimeGrid,
    backend: Backend,
) -> Result<Vec<FractionEntry>> {
    if let Some(&odd) = n_values.iter().find(|&&n| n % 2 == 1) {
        return Err(Error::InvalidChain(format!(
            "fraction scan needs even N, got {odd}"
        )));
    }
    let result = scan(n_values, ranges, grid, backend, Tolerances::default())?;
    Ok(result
        .entries
        .iter()
        .map(|e| {
            let depth = nonlocality_depth(e.first_max.q_value, e.n_spins);
            FractionEntry {
                n_spins: e.n_spins,
                range: e.range,
                q_max: e.first_max.q_value,
                depth,
                beta: depth as f64 / e.n_spins as f64,
            }
        })
        .collect())
}

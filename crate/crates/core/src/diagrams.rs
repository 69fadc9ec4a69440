//! Spin-inversion diagram counting and the short-time asymptotic correlator.
//!
//! Expanding every pair propagator as `cos τ - i sin τ σz σz`, each coupled
//! pair becomes a line carrying either `cos τ` or `-i sin τ`. To lowest order:
//!
//! * `C-` collects diagrams in which every spin is inverted exactly once, i.e.
//!   perfect matchings of the range-`r` chain graph: `P_r(N)` of them, each
//!   worth `cos^{K-N/2} τ (-i sin τ)^{N/2}`;
//! * `C+` collects the empty diagram plus the `R_r(N)` mutually coupled
//!   triangles, `cos^K τ + R_r(N) cos^{K-3} τ (-i sin τ)^3`.
//!
//! `K = r(2N - r - 1)/2` is the number of lines.

use std::collections::HashMap;
use std::io::Write;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::format_real;
use crate::fit::linear_fit;

/// Largest chain handled by [`count_spanning_clusters`].
pub const MAX_SPANNING_SPINS: usize = 24;

/// Number of coupled pairs of an open chain.
pub fn k_lines(n_spins: usize, range: usize) -> u64 {
    let r = range.min(n_spins.saturating_sub(1)) as u64;
    let n = n_spins as u64;
    r * (2 * n - r - 1) / 2
}

/// Perfect matchings of the graph on `0..N` with edges `0 < |k - l| <= r`.
///
/// Left-to-right scan; the state is the set of still-unmatched vertices among
/// the last `r`. A vertex leaving the window unmatched kills the branch.
pub fn count_matchings(n_spins: usize, range: usize) -> BigUint {
    if n_spins % 2 == 1 || n_spins == 0 || range == 0 {
        return BigUint::zero();
    }
    let r = range.min(n_spins - 1);
    let mut counts: HashMap<u32, BigUint> = HashMap::from([(0, BigUint::from(1u8))]);
    for _ in 0..n_spins {
        let mut next: HashMap<u32, BigUint> = HashMap::with_capacity(counts.len() * 2);
        for (mask, c) in counts {
            // bit j is the vertex j + 1 positions back; after the shift, bit r
            // would be out of reach
            let open_new = (mask << 1) | 1;
            if open_new >> r & 1 == 0 {
                *next.entry(open_new).or_default() += &c;
            }
            for j in 0..r {
                if mask >> j & 1 == 1 {
                    let closed = (mask & !(1 << j)) << 1;
                    if closed >> r & 1 == 0 {
                        *next.entry(closed).or_default() += &c;
                    }
                }
            }
        }
        counts = next;
    }
    counts.remove(&0).unwrap_or_default()
}

/// `ln P_r(N)` by the same scan in renormalized floating point.
pub fn ln_count_matchings(n_spins: usize, range: usize) -> f64 {
    if n_spins % 2 == 1 || n_spins == 0 || range == 0 {
        return f64::NEG_INFINITY;
    }
    let r = range.min(n_spins - 1);
    let size = 1usize << (r + 1);
    let mut counts = vec![0.0f64; size];
    counts[0] = 1.0;
    let mut log_scale = 0.0;
    for _ in 0..n_spins {
        let mut next = vec![0.0f64; size];
        for (mask, &c) in counts.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let open_new = (mask << 1) | 1;
            if open_new >> r & 1 == 0 {
                next[open_new] += c;
            }
            for j in 0..r {
                if mask >> j & 1 == 1 {
                    let closed = (mask & !(1 << j)) << 1;
                    if closed >> r & 1 == 0 {
                        next[closed] += c;
                    }
                }
            }
        }
        let max = next.iter().copied().fold(0.0, f64::max);
        if max == 0.0 {
            return f64::NEG_INFINITY;
        }
        next.iter_mut().for_each(|v| *v /= max);
        log_scale += max.ln();
        counts = next;
    }
    counts[0].ln() + log_scale
}

/// Triples `i < j < k` with `k - i <= r`: `Σ_{d=2}^{min(r, N-1)} (d - 1)(N - d)`.
pub fn count_triangles(n_spins: usize, range: usize) -> u64 {
    let n = n_spins as u64;
    let top = range.min(n_spins.saturating_sub(1)) as u64;
    (2..=top).map(|d| (d - 1) * (n - d)).sum()
}

/// Perfect matchings without a cut point, i.e. in which every gap between
/// neighbouring sites is bridged by at least one matched pair.
///
/// Depth-first enumeration. A branch is cut as soon as a proper prefix of the
/// chain is matched within itself.
pub fn count_spanning_clusters(n_spins: usize, range: usize) -> Result<BigUint> {
    if n_spins > MAX_SPANNING_SPINS {
        return Err(Error::TooManySpins {
            n_spins,
            cap: MAX_SPANNING_SPINS,
        });
    }
    if n_spins % 2 == 1 || n_spins == 0 || range == 0 {
        return Ok(BigUint::zero());
    }
    let r = range.min(n_spins - 1);
    let mut count = 0u64;
    let mut matched = vec![false; n_spins];
    enumerate_spanning(&mut matched, 0, 0, r, &mut count);
    Ok(BigUint::from(count))
}

fn enumerate_spanning(matched: &mut [bool], first: usize, reach: usize, r: usize, count: &mut u64) {
    let n = matched.len();
    let Some(i) = (first..n).find(|&i| !matched[i]) else {
        *count += 1;
        return;
    };
    // everything before i is matched; if nothing reaches past i - 1 the
    // prefix 0..i is closed off
    if i > 0 && reach < i {
        return;
    }
    matched[i] = true;
    for j in i + 1..=(i + r).min(n - 1) {
        if !matched[j] {
            matched[j] = true;
            enumerate_spanning(matched, i + 1, reach.max(j), r, count);
            matched[j] = false;
        }
    }
    matched[i] = false;
}

/// Default sizes for [`fit_matching_exponent`]: `N = 40, 44, ..., 200`.
pub fn exponent_fit_sizes() -> Vec<usize> {
    (40..=200).step_by(4).collect()
}

/// Least-squares slope of `ln P_r(N)` against `N`.
pub fn fit_matching_exponent(range: usize, n_values: &[usize]) -> Result<f64> {
    if let Some(&odd) = n_values.iter().find(|&&n| n % 2 == 1) {
        return Err(Error::DegenerateFit(format!(
            "odd N = {odd} has no perfect matching"
        )));
    }
    let points: Vec<(f64, f64)> = n_values
        .iter()
        .map(|&n| (n as f64, ln_big(&count_matchings(n, range))))
        .collect();
    Ok(linear_fit(&points)?.slope)
}

/// Natural log of a big integer without overflowing `f64`.
pub fn ln_big(v: &BigUint) -> f64 {
    if v.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = v.bits();
    let drop = bits.saturating_sub(64);
    let top = (v >> drop as usize).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + drop as f64 * std::f64::consts::LN_2
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagramCounts {
    pub n_spins: usize,
    pub range: usize,
    pub k_lines: u64,
    pub p_count: BigUint,
    pub r_count: u64,
    /// Absent for chains longer than [`MAX_SPANNING_SPINS`].
    pub spanning_count: Option<BigUint>,
}

impl DiagramCounts {
    pub fn compute(n_spins: usize, range: usize) -> Result<Self> {
        if n_spins % 2 == 1 {
            return Err(Error::OddSpinCount("diagram counting"));
        }
        if n_spins < 2 || range == 0 {
            return Err(Error::InvalidChain(format!("N = {n_spins}, r = {range}")));
        }
        let range = range.min(n_spins - 1);
        let spanning_count = if n_spins <= MAX_SPANNING_SPINS {
            Some(count_spanning_clusters(n_spins, range)?)
        } else {
            None
        };
        Ok(DiagramCounts {
            n_spins,
            range,
            k_lines: k_lines(n_spins, range),
            p_count: count_matchings(n_spins, range),
            r_count: count_triangles(n_spins, range),
            spanning_count,
        })
    }

    /// `log2 |C+|²` and `log2 |C-|²` of the lowest-order expansion.
    fn log2_amplitudes(&self, tau: f64) -> (f64, f64) {
        let k = self.k_lines as f64;
        let n = self.n_spins as f64;
        let lc = tau.cos().abs().log2();
        let ls = tau.sin().abs().log2();
        let log2_p = ln_big(&self.p_count) / std::f64::consts::LN_2;
        let minus = 2.0 * log2_p + 2.0 * (k - n / 2.0) * lc + n * ls;
        // cos^K is real and R cos^{K-3} (-i sin)^3 = i R cos^{K-3} sin^3 is
        // imaginary, so the cross term drops out of |C+|²
        let zeroth = 2.0 * k * lc;
        let plus = if self.r_count == 0 {
            zeroth
        } else {
            let first = 2.0 * (self.r_count as f64).log2() + 2.0 * (k - 3.0) * lc + 6.0 * ls;
            log2_add(zeroth, first)
        };
        (plus, minus)
    }
}

fn log2_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        hi
    } else {
        hi + (1.0 + 2f64.powf(lo - hi)).log2()
    }
}

/// `log2` of the lowest-order asymptotic correlator.
pub fn log2_asymptotic_correlator(counts: &DiagramCounts, tau: f64) -> f64 {
    let (plus, minus) = counts.log2_amplitudes(tau);
    plus + minus
}

/// `|C+|²|C-|²` with `C-` from the single-inversion matchings and `C+` from
/// the empty diagram plus triangles.
pub fn asymptotic_correlator(n_spins: usize, range: usize, tau: f64) -> Result<f64> {
    let counts = DiagramCounts::compute(n_spins, range)?;
    Ok(2f64.powf(log2_asymptotic_correlator(&counts, tau)))
}

/// Gaussian (intermediate-time) form `P² R² e^{-β τ²} τ^{N+6}`, `β = 2K - N/2`.
pub fn gaussian_correlator(counts: &DiagramCounts, tau: f64) -> f64 {
    let n = counts.n_spins as f64;
    let beta = 2.0 * counts.k_lines as f64 - n / 2.0;
    let ln_pr = ln_big(&counts.p_count) + (counts.r_count as f64).ln();
    (2.0 * ln_pr - beta * tau * tau + (n + 6.0) * tau.ln()).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticParams {
    /// `β_N = 2K - N/2`.
    pub beta_exponent: f64,
    /// Maximum of the Gaussian form, `sqrt((N + 6) / (2 β_N))`.
    pub tau_max: f64,
    /// Scaled log-excess over the Bell limit at `tau_max`.
    pub e_tilde_max: f64,
    /// Estimated Bell-limit crossing; present only when `e_tilde_max >= 0`.
    pub tau_crit: Option<f64>,
}

pub fn gaussian_params(n_spins: usize, range: usize) -> Result<AsymptoticParams> {
    if range < 2 {
        return Err(Error::RangeTooSmall("the Gaussian approximation"));
    }
    let counts = DiagramCounts::compute(n_spins, range)?;
    Ok(gaussian_params_from(&counts))
}

pub fn gaussian_params_from(counts: &DiagramCounts) -> AsymptoticParams {
    let n = counts.n_spins as f64;
    let beta = 2.0 * counts.k_lines as f64 - n / 2.0;
    let tau_max = ((n + 6.0) / (2.0 * beta)).sqrt();
    let ln_pr = ln_big(&counts.p_count) + (counts.r_count as f64).ln();
    let shape = 1.0 + 6.0 / n;
    let e_tilde_max =
        n * (2.0 * ln_pr / n - shape * (1.0 / tau_max).ln() + std::f64::consts::LN_2 - shape / 2.0);
    let tau_crit = (e_tilde_max >= 0.0).then(|| tau_max - (e_tilde_max / (2.0 * beta)).sqrt());
    AsymptoticParams {
        beta_exponent: beta,
        tau_max,
        e_tilde_max,
        tau_crit,
    }
}

pub const DIAGRAM_HEADER: [&str; 10] = [
    "N",
    "r",
    "K",
    "P",
    "R",
    "spanning",
    "beta_N",
    "tau_max",
    "e_tilde_max",
    "tau_crit",
];

/// One CSV row per `(N, r)`; Gaussian columns are empty for `r = 1`.
pub fn write_diagram_csv<W: Write>(out: W, rows: &[DiagramCounts]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(DIAGRAM_HEADER)?;
    for c in rows {
        let params = (c.range >= 2).then(|| gaussian_params_from(c));
        let opt = |v: Option<f64>| v.map(format_real).unwrap_or_default();
        writer.write_record([
            c.n_spins.to_string(),
            c.range.to_string(),
            c.k_lines.to_string(),
            c.p_count.to_string(),
            c.r_count.to_string(),
            c.spanning_count
                .as_ref()
                .map(|s| s.to_string())
                .unwrap_or_default(),
            opt(params.map(|p| p.beta_exponent)),
            opt(params.map(|p| p.tau_max)),
            opt(params.map(|p| p.e_tilde_max)),
            opt(params.and_then(|p| p.tau_crit)),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

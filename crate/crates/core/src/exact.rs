//! Exact correlator evaluation in polynomial time.
//!
//! With the initial state polarized along +x, the two extremal x-basis
//! amplitudes are single sums over z configurations,
//!
//! ```text
//! C+ = 2^-N Σ_s e^{-iτH_s},    C- = 2^-N Σ_s e^{-iτH_s} s_1⋯s_N,
//! ```
//!
//! and the correlator is `|C+|²|C-|²`. For an open chain of range `r`, `H_s`
//! only couples spins at most `r` apart, so both sums are contracted left to
//! right keeping the last `r` spins as state: `O(N 2^r)` per time.

use std::io::Write;

use num_bigint::BigInt;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{Boundary, ChainSpec, TimeGrid};
use crate::error::{Error, Result};
use crate::fixed::FixedComplex;
use crate::oracle::StateVector;
use crate::scaled::{exponent_of, pow2, ScaledComplex};

/// Largest range handled by the transfer contraction (2^22 states).
pub const MAX_TRANSFER_RANGE: usize = 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    /// Cheapest exact method for the chain.
    #[default]
    Auto,
    Transfer,
    Oracle,
    ClosedForm,
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Backend::Auto),
            "transfer" => Ok(Backend::Transfer),
            "oracle" => Ok(Backend::Oracle),
            "closed-form" => Ok(Backend::ClosedForm),
            other => Err(Error::Config(format!("unknown backend {other:?}"))),
        }
    }
}

/// Amplitudes of the all-up and all-down x-polarized product states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudePair {
    pub c_plus: ScaledComplex,
    pub c_minus: ScaledComplex,
}

impl AmplitudePair {
    pub fn correlator(&self, n_spins: usize) -> CorrelatorValue {
        let log2_e = 2.0 * (self.c_plus.log2_norm() + self.c_minus.log2_norm());
        CorrelatorValue::from_log2(n_spins, log2_e)
    }
}

/// `e_value = |C+|²|C-|²` together with `q_value = N + log2 e_value`.
///
/// `q_value` is computed in the log domain and stays finite when `e_value`
/// underflows; an exactly vanishing correlator has `q_value = -inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorValue {
    pub e_value: f64,
    pub q_value: f64,
}

impl CorrelatorValue {
    pub fn from_log2(n_spins: usize, log2_e: f64) -> Self {
        let e_value = if log2_e == f64::NEG_INFINITY {
            0.0
        } else {
            2f64.powf(log2_e)
        };
        CorrelatorValue {
            e_value,
            q_value: n_spins as f64 + log2_e,
        }
    }

    pub fn from_value(n_spins: usize, e_value: f64) -> Self {
        CorrelatorValue {
            e_value,
            q_value: n_spins as f64 + e_value.log2(),
        }
    }
}

fn require_open(spec: &ChainSpec) -> Result<()> {
    match spec.boundary() {
        Boundary::Open => Ok(()),
        Boundary::Periodic => Err(Error::PeriodicUnsupported),
    }
}

/// Largest-component normalization by an exact power of two.
fn renormalize(values: &mut [Complex64]) -> Option<i64> {
    let m = values
        .iter()
        .map(|z| z.re.abs().max(z.im.abs()))
        .fold(0.0, f64::max);
    if m == 0.0 {
        return None;
    }
    let e = exponent_of(m);
    let f = pow2(-e);
    values.iter_mut().for_each(|z| *z *= f);
    Some(e)
}

/// `C+` and `C-` by the sliding-window transfer contraction.
pub fn amplitude_sums(spec: &ChainSpec, tau: f64) -> Result<AmplitudePair> {
    require_open(spec)?;
    let n = spec.n_spins();
    let r = spec.range();
    if r > MAX_TRANSFER_RANGE {
        return Err(Error::RangeTooLarge {
            range: r,
            limit: MAX_TRANSFER_RANGE,
        });
    }

    // phase[k] = e^{-iτ (k - r)} for a local field k - r ∈ [-r, r]
    let phase: Vec<Complex64> = (0..=2 * r)
        .map(|k| Complex64::from_polar(1.0, -tau * (k as f64 - r as f64)))
        .collect();

    // Window state bit j holds the spin j+1 sites back; set means s = -1.
    let mut plus = vec![Complex64::new(1.0, 0.0)];
    let mut minus = vec![Complex64::new(1.0, 0.0)];
    let (mut exp_plus, mut exp_minus) = (0i64, 0i64);
    let mut next_plus = Vec::with_capacity(1 << r);
    let mut next_minus = Vec::with_capacity(1 << r);

    for pos in 0..n {
        let width = pos.min(r);
        let next_width = (pos + 1).min(r);
        let mask = (1usize << next_width) - 1;
        next_plus.clear();
        next_plus.resize(1 << next_width, Complex64::new(0.0, 0.0));
        next_minus.clear();
        next_minus.resize(1 << next_width, Complex64::new(0.0, 0.0));

        for state in 0..1usize << width {
            let field = width as i64 - 2 * state.count_ones() as i64;
            let (vp, vm) = (plus[state], minus[state]);
            let shifted = (state << 1) & mask;
            // s = +1
            let up = phase[(field + r as i64) as usize];
            next_plus[shifted] += vp * up;
            next_minus[shifted] += vm * up;
            // s = -1
            let down = phase[(r as i64 - field) as usize];
            let target = (shifted | 1) & mask;
            next_plus[target] += vp * down;
            next_minus[target] -= vm * down;
        }

        std::mem::swap(&mut plus, &mut next_plus);
        std::mem::swap(&mut minus, &mut next_minus);
        // an identically vanishing sum stays zero; its exponent is irrelevant
        exp_plus += renormalize(&mut plus).unwrap_or(0);
        exp_minus += renormalize(&mut minus).unwrap_or(0);
    }

    let sum_plus: Complex64 = plus.iter().sum();
    let sum_minus: Complex64 = minus.iter().sum();
    Ok(AmplitudePair {
        c_plus: ScaledComplex::new(sum_plus, exp_plus - n as i64),
        c_minus: ScaledComplex::new(sum_minus, exp_minus - n as i64),
    })
}

/// `sin^N τ cos^{3N-4} τ`, the nearest-neighbour correlator for even `N`.
pub fn correlator_r1(n_spins: usize, tau: f64) -> f64 {
    let n = n_spins as i32;
    tau.sin().powi(n) * tau.cos().powi(3 * n - 4)
}

/// `log2` of [`correlator_r1`].
pub fn log2_correlator_r1(n_spins: usize, tau: f64) -> f64 {
    let n = n_spins as f64;
    n * tau.sin().abs().log2() + (3.0 * n - 4.0) * tau.cos().abs().log2()
}

/// Fractional bits used for the magnetization-sector sums of `N` spins.
fn sector_precision(n_spins: usize) -> u64 {
    4 * n_spins as u64 + 128
}

/// Sector sums at a fixed precision, with the `log2` of the rounding bound.
fn sector_sums(n_spins: usize, tau: f64, bits: u64) -> (FixedComplex, FixedComplex, f64) {
    let n = n_spins as i64;
    // H = (M² - N)/2 with M = N - 2k for k spins down. Between neighbouring
    // sectors H changes by 2 - 2M, and that step itself changes by 4.
    let z = FixedComplex::cis(-tau, bits);
    let mut phase = z.unit_pow((n * n - n) / 2, bits);
    let mut step = z.unit_pow(2 - 2 * n, bits);
    let z4 = z.unit_pow(4, bits);

    let mut binom = BigInt::from(1);
    let mut plus = FixedComplex::zero();
    let mut minus = FixedComplex::zero();
    for k in 0..=n {
        let term = phase.scale_int(&binom);
        plus.add_assign(&term);
        if k % 2 == 0 {
            minus.add_assign(&term);
        } else {
            minus.sub_assign(&term);
        }
        if k < n {
            phase = phase.mul(&step, bits);
            step = step.mul(&z4, bits);
            binom = binom * BigInt::from(n - k) / BigInt::from(k + 1);
        }
    }
    // per-term phase error grows at most quadratically in N; N + 1 terms
    let log2_err = 3.0 * ((n + 2) as f64).log2() + 4.0 - bits as f64;
    (plus, minus, log2_err)
}

/// `C+` and `C-` for all-to-all coupling from the `N + 1` magnetization
/// sectors, evaluated in big fixed-point arithmetic.
///
/// The sign-weighted sector sum cancels down to `~2^{-N/2}` near the onset of
/// Bell correlations, so the working precision grows until both amplitudes
/// clear the rounding bound by 60 bits.
pub fn all_to_all_amplitudes(n_spins: usize, tau: f64) -> AmplitudePair {
    if tau == 0.0 {
        return AmplitudePair {
            c_plus: ScaledComplex::from_complex(Complex64::new(1.0, 0.0)),
            c_minus: ScaledComplex::ZERO,
        };
    }
    if n_spins % 2 == 1 {
        // C- is odd under the global x flip, which commutes with H
        let (plus, _, _) = sector_sums(n_spins, tau, sector_precision(n_spins));
        return AmplitudePair {
            c_plus: plus.to_scaled(sector_precision(n_spins) + n_spins as u64),
            c_minus: ScaledComplex::ZERO,
        };
    }
    let max_bits = 32 * n_spins as u64 + 4096;
    let mut bits = sector_precision(n_spins);
    loop {
        let (plus, minus, log2_err) = sector_sums(n_spins, tau, bits);
        let total = bits + n_spins as u64;
        let pair = AmplitudePair {
            c_plus: plus.to_scaled(total),
            c_minus: minus.to_scaled(total),
        };
        let floor = log2_err + 60.0;
        let resolved = pair.c_plus.log2_norm() > floor && pair.c_minus.log2_norm() > floor;
        if resolved {
            return pair;
        }
        if bits >= max_bits {
            let clean = |z: ScaledComplex| {
                if z.log2_norm() > log2_err + 4.0 {
                    z
                } else {
                    ScaledComplex::ZERO
                }
            };
            return AmplitudePair {
                c_plus: clean(pair.c_plus),
                c_minus: clean(pair.c_minus),
            };
        }
        bits = (2 * bits).min(max_bits);
    }
}

/// All-to-all correlator `|C+ C-|²` from the magnetization sectors.
pub fn correlator_all_to_all(n_spins: usize, tau: f64) -> f64 {
    all_to_all_amplitudes(n_spins, tau)
        .correlator(n_spins)
        .e_value
}

/// Exact correlator by the cheapest applicable method.
pub fn correlator(spec: &ChainSpec, tau: f64) -> Result<CorrelatorValue> {
    correlator_with(spec, tau, Backend::Auto)
}

pub fn correlator_with(spec: &ChainSpec, tau: f64, backend: Backend) -> Result<CorrelatorValue> {
    let n = spec.n_spins();
    let r1_closed = spec.range() == 1 && n.is_multiple_of(2) && spec.boundary() == Boundary::Open;
    let sectors = spec.is_all_to_all();
    match backend {
        Backend::Oracle => Ok(CorrelatorValue::from_value(
            n,
            StateVector::evolve(spec, tau)?.correlator(),
        )),
        Backend::Transfer => Ok(amplitude_sums(spec, tau)?.correlator(n)),
        Backend::ClosedForm if r1_closed => {
            Ok(CorrelatorValue::from_log2(n, log2_correlator_r1(n, tau)))
        }
        Backend::ClosedForm if sectors => Ok(all_to_all_amplitudes(n, tau).correlator(n)),
        Backend::ClosedForm => Err(Error::NoClosedForm {
            n_spins: n,
            range: spec.range(),
        }),
        Backend::Auto => {
            if r1_closed || sectors {
                correlator_with(spec, tau, Backend::ClosedForm)
            } else if spec.boundary() == Boundary::Periodic || spec.range() > MAX_TRANSFER_RANGE {
                correlator_with(spec, tau, Backend::Oracle)
            } else {
                correlator_with(spec, tau, Backend::Transfer)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub tau: f64,
    pub e_value: f64,
    pub q_value: f64,
}

/// Correlator values of one chain over a time grid, in grid order.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorSeries {
    pub spec: ChainSpec,
    pub grid: TimeGrid,
    pub values: Vec<SeriesPoint>,
}

impl CorrelatorSeries {
    pub fn evaluate(spec: ChainSpec, grid: TimeGrid, backend: Backend) -> Result<Self> {
        let values = evaluate_points(&spec, &grid.points(), backend)?;
        Ok(CorrelatorSeries { spec, grid, values })
    }

    pub fn q_values(&self) -> Vec<f64> {
        self.values.iter().map(|p| p.q_value).collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = correlator_csv_writer(out)?;
        for p in &self.values {
            write_correlator_row(&mut writer, &self.spec, p)?;
        }
        writer.flush()?;
        Ok(())
    }
}

/// Parallel evaluation over arbitrary times; output follows input order.
pub fn evaluate_points(
    spec: &ChainSpec,
    taus: &[f64],
    backend: Backend,
) -> Result<Vec<SeriesPoint>> {
    taus.par_iter()
        .map(|&tau| {
            correlator_with(spec, tau, backend).map(|c| SeriesPoint {
                tau,
                e_value: c.e_value,
                q_value: c.q_value,
            })
        })
        .collect()
}

/// Reals at 17 significant digits; `-inf` and `nan` spelled out.
pub fn format_real(x: f64) -> String {
    if x == f64::NEG_INFINITY {
        "-inf".to_string()
    } else if x == f64::INFINITY {
        "inf".to_string()
    } else if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.16e}")
    }
}

pub const CORRELATOR_HEADER: [&str; 6] = ["N", "r", "boundary", "tau", "e_value", "q_value"];

pub fn correlator_csv_writer<W: Write>(out: W) -> Result<csv::Writer<W>> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(CORRELATOR_HEADER)?;
    Ok(writer)
}

pub fn write_correlator_row<W: Write>(
    writer: &mut csv::Writer<W>,
    spec: &ChainSpec,
    point: &SeriesPoint,
) -> Result<()> {
    writer.write_record([
        spec.n_spins().to_string(),
        spec.range().to_string(),
        spec.boundary().to_string(),
        format_real(point.tau),
        format_real(point.e_value),
        format_real(point.q_value),
    ])?;
    Ok(())
}

//! Classical-shadow estimation of the extremal x-basis coherence.
//!
//! Each snapshot measures every qubit in a uniformly random Pauli basis. With
//! the local inverse channel `3 U†|b⟩⟨b|U - 1`, the single-qubit factor of the
//! coherence operator `|-x⟩⟨+x|` is `3 ⟨+x|φ⟩⟨φ|-x⟩` for the measured
//! eigenstate `φ`:
//!
//! | basis | bit 0 (`φ`)  | bit 1 (`φ`)   |
//! |-------|--------------|---------------|
//! | X     | 0 (`+x`)     | 0 (`-x`)      |
//! | Y     | `3i/2` (`+i`)| `-3i/2` (`-i`)|
//! | Z     | `3/2` (`0`)  | `-3/2` (`1`)  |
//!
//! The product over qubits is an unbiased estimate of `⟨+x^N|ρ|-x^N⟩`, whose
//! squared modulus is the correlator.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::ChainSpec;
use crate::error::{Error, Result};
use crate::exact::{correlator, format_real};
use crate::oracle::StateVector;

/// Largest register sampled from its full Born distribution.
pub const MAX_SHADOW_SPINS: usize = 10;

/// Random words reserved per snapshot in the generator stream.
const WORDS_PER_SNAPSHOT: u128 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PauliBasis {
    X,
    Y,
    Z,
}

impl PauliBasis {
    const ALL: [PauliBasis; 3] = [PauliBasis::X, PauliBasis::Y, PauliBasis::Z];

    /// Rows are the bras of the outcome-0 and outcome-1 eigenstates.
    fn measurement_rows(self) -> [[Complex64; 2]; 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let c = |re: f64, im: f64| Complex64::new(re, im);
        match self {
            PauliBasis::X => [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
            PauliBasis::Y => [[c(h, 0.0), c(0.0, -h)], [c(h, 0.0), c(0.0, h)]],
            PauliBasis::Z => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]],
        }
    }

    fn coherence_factor(self, bit: bool) -> Complex64 {
        let sign = if bit { -1.0 } else { 1.0 };
        match self {
            PauliBasis::X => Complex64::new(0.0, 0.0),
            PauliBasis::Y => Complex64::new(0.0, 1.5 * sign),
            PauliBasis::Z => Complex64::new(1.5 * sign, 0.0),
        }
    }

    fn symbol(self) -> char {
        match self {
            PauliBasis::X => 'X',
            PauliBasis::Y => 'Y',
            PauliBasis::Z => 'Z',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShadowSnapshot {
    bases: Vec<PauliBasis>,
    /// Bit `k` is the outcome of qubit `k`.
    outcomes: u32,
}

impl ShadowSnapshot {
    pub fn new(bases: Vec<PauliBasis>, outcomes: u32) -> Result<Self> {
        if bases.is_empty() || bases.len() > 32 {
            return Err(Error::InvalidChain(format!(
                "{} measured qubits",
                bases.len()
            )));
        }
        if bases.len() < 32 && outcomes >> bases.len() != 0 {
            return Err(Error::LengthMismatch {
                expected: bases.len(),
                found: 32 - outcomes.leading_zeros() as usize,
            });
        }
        Ok(ShadowSnapshot { bases, outcomes })
    }

    pub fn n_spins(&self) -> usize {
        self.bases.len()
    }

    pub fn bases(&self) -> &[PauliBasis] {
        &self.bases
    }

    pub fn outcome(&self, qubit: usize) -> bool {
        self.outcomes >> qubit & 1 == 1
    }

    pub fn outcome_bits(&self) -> u32 {
        self.outcomes
    }

    /// Single-snapshot estimate of `⟨+x^N|ρ|-x^N⟩`.
    pub fn coherence(&self) -> Complex64 {
        self.bases
            .iter()
            .enumerate()
            .map(|(k, b)| b.coherence_factor(self.outcome(k)))
            .product()
    }
}

impl fmt::Display for ShadowSnapshot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bases: String = self.bases.iter().map(|b| b.symbol()).collect();
        let bits: String = (0..self.n_spins())
            .map(|k| if self.outcome(k) { '1' } else { '0' })
            .collect();
        write!(f, "{bases},{bits}")
    }
}

impl FromStr for ShadowSnapshot {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let bad = || Error::Config(format!("malformed snapshot record `{line}`"));
        let (bases, bits) = line.trim().split_once(',').ok_or_else(bad)?;
        let bases = bases
            .chars()
            .map(|c| match c {
                'X' => Ok(PauliBasis::X),
                'Y' => Ok(PauliBasis::Y),
                'Z' => Ok(PauliBasis::Z),
                _ => Err(bad()),
            })
            .collect::<Result<Vec<_>>>()?;
        if bits.len() != bases.len() {
            return Err(Error::LengthMismatch {
                expected: bases.len(),
                found: bits.len(),
            });
        }
        let mut outcomes = 0u32;
        for (k, c) in bits.chars().enumerate() {
            match c {
                '0' => {}
                '1' => outcomes |= 1 << k,
                _ => return Err(bad()),
            }
        }
        ShadowSnapshot::new(bases, outcomes)
    }
}

pub fn write_snapshots<W: Write>(mut out: W, snapshots: &[ShadowSnapshot]) -> Result<()> {
    for s in snapshots {
        writeln!(out, "{s}")?;
    }
    Ok(())
}

pub fn read_snapshots<R: BufRead>(input: R) -> Result<Vec<ShadowSnapshot>> {
    input
        .lines()
        .filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
        .map(|l| l?.parse())
        .collect()
}

/// SplitMix64 finalizer, used to derive independent sub-seeds.
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn decode_bases(mut code: u32, n_spins: usize) -> Vec<PauliBasis> {
    (0..n_spins)
        .map(|_| {
            let b = PauliBasis::ALL[(code % 3) as usize];
            code /= 3;
            b
        })
        .collect()
}

/// Born distribution of the state measured in a product of Pauli bases.
fn born_distribution(state: &StateVector, bases: &[PauliBasis]) -> Vec<f64> {
    let mut amps = state.amplitudes().to_vec();
    for (k, basis) in bases.iter().enumerate() {
        if *basis == PauliBasis::Z {
            continue;
        }
        let [[a, b], [c, d]] = basis.measurement_rows();
        let bit = 1usize << k;
        for i in 0..amps.len() {
            if i & bit == 0 {
                let (lo, hi) = (amps[i], amps[i | bit]);
                amps[i] = a * lo + b * hi;
                amps[i | bit] = c * lo + d * hi;
            }
        }
    }
    amps.iter().map(|a| a.norm_sqr()).collect()
}

fn check_request(state: &StateVector, m: usize) -> Result<()> {
    if state.n_spins() > MAX_SHADOW_SPINS {
        return Err(Error::TooManySpins {
            n_spins: state.n_spins(),
            cap: MAX_SHADOW_SPINS,
        });
    }
    if m < 1 {
        return Err(Error::NoSnapshots);
    }
    Ok(())
}

fn sample_stream(state: &StateVector, m: usize, seed: u64, stream: u64) -> Vec<ShadowSnapshot> {
    let n = state.n_spins();
    let n_codes = 3u32.pow(n as u32);
    let mut base = ChaCha8Rng::seed_from_u64(seed);
    base.set_stream(stream);

    // snapshot i owns a fixed block of the keystream, so draws do not depend
    // on evaluation order
    let draws: Vec<(u32, f64)> = (0..m)
        .into_par_iter()
        .map_init(
            || base.clone(),
            |rng, i| {
                rng.set_word_pos(i as u128 * WORDS_PER_SNAPSHOT);
                (rng.gen_range(0..n_codes), rng.gen::<f64>())
            },
        )
        .collect();

    let mut groups: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, &(code, _)) in draws.iter().enumerate() {
        groups.entry(code).or_default().push(i);
    }
    let outcomes: Vec<(usize, u32)> = groups
        .into_par_iter()
        .flat_map_iter(|(code, members)| {
            let bases = decode_bases(code, n);
            let mut cdf = born_distribution(state, &bases);
            let mut acc = 0.0;
            for p in cdf.iter_mut() {
                acc += *p;
                *p = acc;
            }
            let draws = &draws;
            members.into_iter().map(move |i| {
                let target = draws[i].1 * acc;
                let idx = cdf.partition_point(|&c| c <= target).min(cdf.len() - 1);
                (i, idx as u32)
            })
        })
        .collect();

    let mut bits = vec![0u32; m];
    for (i, b) in outcomes {
        bits[i] = b;
    }
    draws
        .iter()
        .zip(bits)
        .map(|(&(code, _), outcomes)| ShadowSnapshot {
            bases: decode_bases(code, n),
            outcomes,
        })
        .collect()
}

/// `m` snapshots of `state`, reproducible from `seed`.
pub fn sample_snapshots(state: &StateVector, m: usize, seed: u64) -> Result<Vec<ShadowSnapshot>> {
    check_request(state, m)?;
    Ok(sample_stream(state, m, seed, 0))
}

/// Mean single-snapshot estimate of `⟨+x^N|ρ|-x^N⟩`.
pub fn estimate_coherence(snapshots: &[ShadowSnapshot], n_spins: usize) -> Result<Complex64> {
    check_snapshots(snapshots, n_spins)?;
    let sum: Complex64 = snapshots.iter().map(|s| s.coherence()).sum();
    Ok(sum / snapshots.len() as f64)
}

fn check_snapshots(snapshots: &[ShadowSnapshot], n_spins: usize) -> Result<()> {
    if snapshots.is_empty() {
        return Err(Error::NoSnapshots);
    }
    if let Some(s) = snapshots.iter().find(|s| s.n_spins() != n_spins) {
        return Err(Error::LengthMismatch {
            expected: n_spins,
            found: s.n_spins(),
        });
    }
    Ok(())
}

/// How the squared modulus of the coherence is formed from snapshots.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    /// `|mean|²`; biased upward by about `variance / M`.
    #[default]
    Naive,
    /// Mean of `o_i conj(o_j)` over ordered pairs `i != j`; unbiased, may be negative.
    PairProduct,
}

impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Estimator::Naive),
            "pair-product" => Ok(Estimator::PairProduct),
            other => Err(Error::Config(format!("unknown estimator `{other}`"))),
        }
    }
}

/// Shadow estimate of the correlator.
pub fn estimate_correlator(
    snapshots: &[ShadowSnapshot],
    n_spins: usize,
    estimator: Estimator,
) -> Result<f64> {
    check_snapshots(snapshots, n_spins)?;
    let m = snapshots.len() as f64;
    let (sum, sum_sq) = snapshots
        .iter()
        .fold((Complex64::new(0.0, 0.0), 0.0), |(s, q), snap| {
            let o = snap.coherence();
            (s + o, q + o.norm_sqr())
        });
    Ok(match estimator {
        Estimator::Naive => (sum / m).norm_sqr(),
        Estimator::PairProduct if snapshots.len() < 2 => f64::NAN,
        Estimator::PairProduct => (sum.norm_sqr() - sum_sq) / (m * (m - 1.0)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionResult {
    pub n_snapshots: usize,
    pub n_reconstructions: usize,
    pub q_mean: f64,
    /// Sample standard deviation across reconstructions.
    pub q_std: f64,
    pub e_mean: f64,
}

pub const DEFAULT_RECONSTRUCTIONS: usize = 10;

/// Independent reconstructions from disjoint generator streams.
pub fn reconstruct(
    state: &StateVector,
    m: usize,
    n_reconstructions: usize,
    seed: u64,
    estimator: Estimator,
) -> Result<ReconstructionResult> {
    check_request(state, m)?;
    if n_reconstructions < 1 {
        return Err(Error::Config(
            "at least one reconstruction is required".into(),
        ));
    }
    let n = state.n_spins();
    let e_values = (0..n_reconstructions)
        .map(|rec| {
            let snaps = sample_stream(state, m, seed, rec as u64);
            estimate_correlator(&snaps, n, estimator)
        })
        .collect::<Result<Vec<f64>>>()?;
    let q_values: Vec<f64> = e_values.iter().map(|e| n as f64 + e.log2()).collect();
    let k = n_reconstructions as f64;
    let q_mean = q_values.iter().sum::<f64>() / k;
    let q_std = if n_reconstructions > 1 {
        (q_values.iter().map(|q| (q - q_mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(ReconstructionResult {
        n_snapshots: m,
        n_reconstructions,
        q_mean,
        q_std,
        e_mean: e_values.iter().sum::<f64>() / k,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShadowRow {
    pub n_spins: usize,
    pub range: usize,
    pub tau: f64,
    pub q_exact: f64,
    pub result: ReconstructionResult,
}

pub const SHADOW_HEADER: [&str; 8] = ["N", "r", "tau", "M", "n_rec", "q_exact", "q_mean", "q_std"];

/// Reconstructions of the evolved state at each time; point `i` uses the
/// sub-seed `mix_seed(seed, i)`.
pub fn shadow_curve(
    spec: &ChainSpec,
    taus: &[f64],
    m: usize,
    n_reconstructions: usize,
    seed: u64,
    estimator: Estimator,
) -> Result<Vec<ShadowRow>> {
    taus.iter()
        .enumerate()
        .map(|(i, &tau)| {
            let state = StateVector::evolve_capped(spec, tau, MAX_SHADOW_SPINS)?;
            let result = reconstruct(
                &state,
                m,
                n_reconstructions,
                mix_seed(seed, i as u64),
                estimator,
            )?;
            Ok(ShadowRow {
                n_spins: spec.n_spins(),
                range: spec.range(),
                tau,
                q_exact: correlator(spec, tau)?.q_value,
                result,
            })
        })
        .collect()
}

pub fn write_shadow_csv<W: Write>(out: W, rows: &[ShadowRow]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(SHADOW_HEADER)?;
    for row in rows {
        writer.write_record([
            row.n_spins.to_string(),
            row.range.to_string(),
            format_real(row.tau),
            row.result.n_snapshots.to_string(),
            row.result.n_reconstructions.to_string(),
            format_real(row.q_exact),
            format_real(row.result.q_mean),
            format_real(row.result.q_std),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::correlator_bruteforce;

    fn oracle_element(state: &StateVector) -> Complex64 {
        let (p, m) = state.extremal_projections();
        p * m.conj()
    }

    /// Expectation of the single-snapshot estimator, summed over every basis
    /// choice and outcome.
    fn exact_expectation(state: &StateVector) -> Complex64 {
        let n = state.n_spins();
        let n_codes = 3u32.pow(n as u32);
        let mut total = Complex64::new(0.0, 0.0);
        for code in 0..n_codes {
            let bases = decode_bases(code, n);
            for (bits, p) in born_distribution(state, &bases).into_iter().enumerate() {
                let snap = ShadowSnapshot::new(bases.clone(), bits as u32).unwrap();
                total += snap.coherence() * p;
            }
        }
        total / n_codes as f64
    }

    #[test]
    fn factor_table() {
        use PauliBasis::*;
        assert_eq!(X.coherence_factor(false), Complex64::new(0.0, 0.0));
        assert_eq!(X.coherence_factor(true), Complex64::new(0.0, 0.0));
        assert_eq!(Y.coherence_factor(false), Complex64::new(0.0, 1.5));
        assert_eq!(Y.coherence_factor(true), Complex64::new(0.0, -1.5));
        assert_eq!(Z.coherence_factor(false), Complex64::new(1.5, 0.0));
        assert_eq!(Z.coherence_factor(true), Complex64::new(-1.5, 0.0));
        // 3 ⟨+x|φ⟩⟨φ|-x⟩ with ⟨φ| taken from the measurement rows
        let plus = [Complex64::new(0.5f64.sqrt(), 0.0); 2];
        let minus = [
            Complex64::new(0.5f64.sqrt(), 0.0),
            Complex64::new(-(0.5f64.sqrt()), 0.0),
        ];
        for basis in PauliBasis::ALL {
            for (bit, row) in basis.measurement_rows().iter().enumerate() {
                let bra_minus = row[0] * minus[0] + row[1] * minus[1];
                let bra_plus = row[0] * plus[0] + row[1] * plus[1];
                let expected = bra_plus.conj() * bra_minus * 3.0;
                assert!((basis.coherence_factor(bit == 1) - expected).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn eigenstate_and_uniform_outcomes() {
        let plus = StateVector::x_polarized(5, false).unwrap();
        let p = born_distribution(&plus, &[PauliBasis::X; 5]);
        assert!((p[0] - 1.0).abs() < 1e-14);

        let up = StateVector::z_polarized(5).unwrap();
        for v in born_distribution(&up, &[PauliBasis::X; 5]) {
            assert!((v - 1.0 / 32.0).abs() < 1e-15);
        }

        let ghz = StateVector::ghz(4).unwrap();
        for (bits, v) in born_distribution(&ghz, &[PauliBasis::X; 4])
            .into_iter()
            .enumerate()
        {
            let want = if bits == 0 || bits == 15 { 0.5 } else { 0.0 };
            assert!((v - want).abs() < 1e-14, "{bits}: {v}");
        }
    }

    #[test]
    fn estimator_expectation_is_the_coherence() {
        for n in 2..=4 {
            for r in 1..n {
                let spec = ChainSpec::open(n, r).unwrap();
                let state = StateVector::evolve(&spec, 0.37 * r as f64).unwrap();
                let diff = exact_expectation(&state) - oracle_element(&state);
                assert!(diff.norm() < 1e-13, "N={n} r={r}");
            }
        }
        let ghz = StateVector::ghz(4).unwrap();
        assert!((exact_expectation(&ghz) - Complex64::new(0.5, 0.0)).norm() < 1e-13);
        let plus = StateVector::x_polarized(3, false).unwrap();
        assert!(exact_expectation(&plus).norm() < 1e-14);
    }

    #[test]
    fn sampling_is_reproducible() {
        let spec = ChainSpec::open(5, 2).unwrap();
        let state = StateVector::evolve(&spec, 0.4).unwrap();
        let a = sample_snapshots(&state, 500, 7).unwrap();
        let b = sample_snapshots(&state, 500, 7).unwrap();
        let c = sample_snapshots(&state, 500, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        // a prefix of a longer run is the shorter run
        assert_eq!(&sample_snapshots(&state, 800, 7).unwrap()[..500], &a[..]);
        let r1 = reconstruct(&state, 300, 4, 11, Estimator::Naive).unwrap();
        let r2 = reconstruct(&state, 300, 4, 11, Estimator::Naive).unwrap();
        assert_eq!(r1.q_mean.to_bits(), r2.q_mean.to_bits());
        assert_eq!(r1.q_std.to_bits(), r2.q_std.to_bits());
    }

    #[test]
    fn eigenstate_sampling_is_deterministic() {
        let plus = StateVector::x_polarized(4, false).unwrap();
        for s in sample_snapshots(&plus, 200, 3).unwrap() {
            for k in 0..4 {
                if s.bases()[k] == PauliBasis::X {
                    assert!(!s.outcome(k));
                }
            }
        }
    }

    #[test]
    fn large_sample_matches_oracle() {
        let spec = ChainSpec::open(4, 3).unwrap();
        let state = StateVector::evolve(&spec, 0.5).unwrap();
        let snaps = sample_snapshots(&state, 40_000, 2024).unwrap();
        let est = estimate_coherence(&snaps, 4).unwrap();
        let m = snaps.len() as f64;
        let var = snaps
            .iter()
            .map(|s| (s.coherence() - est).norm_sqr())
            .sum::<f64>()
            / (m - 1.0);
        let se = (var / m).sqrt();
        let truth = oracle_element(&state);
        assert!((est - truth).norm() < 3.0 * se, "{est} vs {truth}");
        let e = correlator_bruteforce(&spec, 0.5).unwrap();
        assert!((est.norm_sqr() - e).abs() < 3.0 * 2.0 * truth.norm() * se + 9.0 * se * se);
    }

    #[test]
    fn second_moment_is_three_halves_to_the_n() {
        for n in [2, 4, 6] {
            let state = StateVector::ghz(n).unwrap();
            let snaps = sample_snapshots(&state, 200_000, n as u64).unwrap();
            let second =
                snaps.iter().map(|s| s.coherence().norm_sqr()).sum::<f64>() / snaps.len() as f64;
            let expected = 1.5f64.powi(n as i32);
            assert!(
                (second / expected - 1.0).abs() < 0.05,
                "N={n}: {second} vs {expected}"
            );
        }
    }

    #[test]
    fn ghz_reconstruction() {
        let ghz = StateVector::ghz(4).unwrap();
        let res = reconstruct(&ghz, 40_000, 10, 5, Estimator::Naive).unwrap();
        assert!(
            (res.q_mean - 2.0).abs() <= 2.0 * res.q_std.max(1e-3),
            "{res:?}"
        );
        let unbiased = reconstruct(&ghz, 40_000, 10, 5, Estimator::PairProduct).unwrap();
        assert!((unbiased.e_mean - 0.25).abs() < 0.01);
        assert!(unbiased.e_mean <= res.e_mean);
    }

    #[test]
    fn few_snapshots_are_still_defined() {
        let ghz = StateVector::ghz(2).unwrap();
        let res = reconstruct(&ghz, 10, 10, 1, Estimator::Naive).unwrap();
        assert!(res.q_mean.is_finite() && res.q_std.is_finite());
        let many = reconstruct(&ghz, 10_000, 10, 1, Estimator::Naive).unwrap();
        assert!(res.q_std > many.q_std);
    }

    #[test]
    fn request_validation() {
        let big = StateVector::x_polarized(11, false).unwrap();
        assert!(matches!(
            sample_snapshots(&big, 1, 0),
            Err(Error::TooManySpins { .. })
        ));
        let small = StateVector::x_polarized(3, false).unwrap();
        assert!(matches!(
            sample_snapshots(&small, 0, 0),
            Err(Error::NoSnapshots)
        ));
        assert!(matches!(
            estimate_coherence(&[], 3),
            Err(Error::NoSnapshots)
        ));
        assert!(reconstruct(&small, 10, 0, 0, Estimator::Naive).is_err());
    }

    #[test]
    fn snapshot_records_round_trip() {
        let state = StateVector::ghz(6).unwrap();
        let snaps = sample_snapshots(&state, 50, 9).unwrap();
        let mut out = Vec::new();
        write_snapshots(&mut out, &snaps).unwrap();
        let text = String::from_utf8(out.clone()).unwrap();
        assert!(text
            .lines()
            .all(|l| l.len() == 13 && l.as_bytes()[6] == b','));
        assert_eq!(read_snapshots(&out[..]).unwrap(), snaps);
        assert!("XQ,01".parse::<ShadowSnapshot>().is_err());
        assert!("XY,011".parse::<ShadowSnapshot>().is_err());
        let s: ShadowSnapshot = "ZY,10".parse().unwrap();
        assert!(s.outcome(0) && !s.outcome(1));
        assert_eq!(
            s.coherence(),
            Complex64::new(-1.5, 0.0) * Complex64::new(0.0, 1.5)
        );
    }

    #[test]
    fn csv_schema() {
        let spec = ChainSpec::open(4, 3).unwrap();
        let rows = shadow_curve(&spec, &[0.25, 0.5], 200, 3, 1, Estimator::Naive).unwrap();
        let mut out = Vec::new();
        write_shadow_csv(&mut out, &rows).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "N,r,tau,M,n_rec,q_exact,q_mean,q_std");
        assert!(lines[1].starts_with("4,3,2.5000000000000000e-1,200,3,"));
        assert_eq!(lines.len(), 3);
    }
}

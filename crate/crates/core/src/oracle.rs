//! Brute-force state-vector simulation for small chains.
//!
//! The Hamiltonian is diagonal in the z basis, so the evolved state is written
//! down directly: the amplitude of configuration `s` is `2^{-N/2} e^{-iτH_s}`.
//! Index bit `k` set means spin `k` points down along z.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::chain::ChainSpec;
use crate::error::{Error, Result};

pub const DEFAULT_MAX_SPINS: usize = 14;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_spins: usize,
    amplitudes: Vec<Complex64>,
}

fn check_cap(n_spins: usize, cap: usize) -> Result<()> {
    if n_spins > cap {
        Err(Error::TooManySpins { n_spins, cap })
    } else {
        Ok(())
    }
}

/// Energies `H_s` of every z configuration.
fn energies(spec: &ChainSpec) -> Vec<i64> {
    let pairs = spec.coupled_pairs();
    (0..1usize << spec.n_spins())
        .map(|idx| {
            pairs
                .iter()
                .map(|&(k, l)| 1 - 2 * (((idx >> k) ^ (idx >> l)) & 1) as i64)
                .sum()
        })
        .collect()
}

/// In-place Walsh-Hadamard transform (unnormalized).
fn walsh_hadamard(values: &mut [Complex64]) {
    let n = values.len();
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for i in block..block + h {
                let (a, b) = (values[i], values[i + h]);
                values[i] = a + b;
                values[i + h] = a - b;
            }
        }
        h *= 2;
    }
}

impl StateVector {
    pub fn from_amplitudes(n_spins: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != 1usize << n_spins {
            return Err(Error::LengthMismatch {
                expected: 1 << n_spins,
                found: amplitudes.len(),
            });
        }
        Ok(StateVector {
            n_spins,
            amplitudes,
        })
    }

    /// `e^{-iτH}|+x⟩^{⊗N}` under the default spin cap.
    pub fn evolve(spec: &ChainSpec, tau: f64) -> Result<Self> {
        Self::evolve_capped(spec, tau, DEFAULT_MAX_SPINS)
    }

    pub fn evolve_capped(spec: &ChainSpec, tau: f64, cap: usize) -> Result<Self> {
        let n = spec.n_spins();
        check_cap(n, cap)?;
        let norm = (0.5f64).powf(n as f64 / 2.0);
        let amplitudes = energies(spec)
            .into_iter()
            .map(|h| Complex64::from_polar(norm, -tau * h as f64))
            .collect();
        Ok(StateVector {
            n_spins: n,
            amplitudes,
        })
    }

    /// Product state with every spin along `+x` (`negative = false`) or `-x`.
    pub fn x_polarized(n_spins: usize, negative: bool) -> Result<Self> {
        check_cap(n_spins, DEFAULT_MAX_SPINS)?;
        let norm = (0.5f64).powf(n_spins as f64 / 2.0);
        let amplitudes = (0..1usize << n_spins)
            .map(|idx| {
                let odd = negative && idx.count_ones() % 2 == 1;
                Complex64::new(if odd { -norm } else { norm }, 0.0)
            })
            .collect();
        Ok(StateVector {
            n_spins,
            amplitudes,
        })
    }

    /// Every spin up along z.
    pub fn z_polarized(n_spins: usize) -> Result<Self> {
        check_cap(n_spins, DEFAULT_MAX_SPINS)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_spins];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector {
            n_spins,
            amplitudes,
        })
    }

    /// `(|+x⟩^{⊗N} + |-x⟩^{⊗N}) / √2` in the z basis.
    pub fn ghz(n_spins: usize) -> Result<Self> {
        check_cap(n_spins, DEFAULT_MAX_SPINS)?;
        let norm = (0.5f64).powf(n_spins as f64 / 2.0) * std::f64::consts::FRAC_1_SQRT_2;
        let amplitudes = (0..1usize << n_spins)
            .map(|idx| {
                let parity = if idx.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                Complex64::new(norm * (1.0 + parity), 0.0)
            })
            .collect();
        Ok(StateVector {
            n_spins,
            amplitudes,
        })
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Amplitudes in the x basis; index bit `k` set means spin `k` along `-x`.
    pub fn x_basis_amplitudes(&self) -> Vec<Complex64> {
        let mut v = self.amplitudes.clone();
        walsh_hadamard(&mut v);
        let norm = (0.5f64).powf(self.n_spins as f64 / 2.0);
        v.iter_mut().for_each(|a| *a *= norm);
        v
    }

    /// Overlaps `(⟨+x|^{⊗N}ψ⟩, ⟨-x|^{⊗N}ψ⟩)`.
    pub fn extremal_projections(&self) -> (Complex64, Complex64) {
        let norm = (0.5f64).powf(self.n_spins as f64 / 2.0);
        let mut plus = Complex64::new(0.0, 0.0);
        let mut minus = Complex64::new(0.0, 0.0);
        for (idx, a) in self.amplitudes.iter().enumerate() {
            plus += a;
            if idx.count_ones() % 2 == 0 {
                minus += a;
            } else {
                minus -= a;
            }
        }
        (plus * norm, minus * norm)
    }

    /// `|⟨+x|ψ⟩|² |⟨-x|ψ⟩|²`.
    pub fn correlator(&self) -> f64 {
        let (p, m) = self.extremal_projections();
        p.norm_sqr() * m.norm_sqr()
    }

    /// Writes amplitudes as little-endian `(re, im)` pairs of `f64`.
    pub fn write_le<W: Write>(&self, mut out: W) -> Result<()> {
        for a in &self.amplitudes {
            out.write_all(&a.re.to_le_bytes())?;
            out.write_all(&a.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_le<R: Read>(n_spins: usize, mut input: R) -> Result<Self> {
        check_cap(n_spins, DEFAULT_MAX_SPINS)?;
        let mut amplitudes = Vec::with_capacity(1 << n_spins);
        let mut buf = [0u8; 8];
        for _ in 0..1usize << n_spins {
            input.read_exact(&mut buf)?;
            let re = f64::from_le_bytes(buf);
            input.read_exact(&mut buf)?;
            let im = f64::from_le_bytes(buf);
            amplitudes.push(Complex64::new(re, im));
        }
        Ok(StateVector {
            n_spins,
            amplitudes,
        })
    }
}

/// Correlator from a full state-vector evolution; works for both boundaries.
pub fn correlator_bruteforce(spec: &ChainSpec, tau: f64) -> Result<f64> {
    Ok(StateVector::evolve(spec, tau)?.correlator())
}

/// Multiple-quantum intensities with respect to `A = ½ Σ σ_x`.
///
/// `intensity(m)` is the squared Frobenius norm of the part of ρ connecting
/// `A` eigenvalues `λ` and `λ'` with `λ - λ' = m`, for `m ∈ [-N, N]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MqcSpectrum {
    n_spins: usize,
    intensities: Vec<f64>,
}

impl MqcSpectrum {
    pub fn intensity(&self, m: i64) -> f64 {
        let n = self.n_spins as i64;
        if m < -n || m > n {
            0.0
        } else {
            self.intensities[(m + n) as usize]
        }
    }

    /// The all-up / all-down coherence, `I_N`.
    pub fn extremal(&self) -> f64 {
        self.intensity(self.n_spins as i64)
    }

    pub fn total(&self) -> f64 {
        self.intensities.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let n = self.n_spins as i64;
        self.intensities
            .iter()
            .enumerate()
            .map(move |(i, &v)| (i as i64 - n, v))
    }
}

pub fn mqc_spectrum(state: &StateVector) -> MqcSpectrum {
    let n = state.n_spins;
    // ρ = |φ⟩⟨φ| so |ρ_ab|² = |φ_a|²|φ_b|²; only the weight per eigenvalue matters.
    let mut weight = vec![0.0; n + 1];
    for (idx, a) in state.x_basis_amplitudes().iter().enumerate() {
        weight[idx.count_ones() as usize] += a.norm_sqr();
    }
    // λ = N/2 - (number of spins along -x), so λ_a - λ_b = c_b - c_a
    let mut intensities = vec![0.0; 2 * n + 1];
    for (ca, wa) in weight.iter().enumerate() {
        for (cb, wb) in weight.iter().enumerate() {
            intensities[n + cb - ca] += wa * wb;
        }
    }
    MqcSpectrum {
        n_spins: n,
        intensities,
    }
}

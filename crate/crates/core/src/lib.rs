//! Exact N-body Bell correlators for Ising chains with finite-range couplings.
//!
//! Spins start polarized along +x and evolve under `H = Σ_{k<l} J_kl σz_k σz_l`
//! with `J_kl = 1` for `0 < |k - l| <= r`. The correlator
//! `E_N = |⟨σ+_1 ⋯ σ+_N⟩|²` (raising operators along x) exceeds `2^-N` only
//! for Bell-correlated states; `Q_N = N + log2 E_N` is its log form.

pub mod analysis;
pub mod chain;
pub mod diagrams;
pub mod error;
pub mod exact;
pub mod fit;
mod fixed;
pub mod oracle;
pub mod scaled;
pub mod shadows;

pub use analysis::{
    analyze, classify, classify_q, find_critical_time, find_first_max, find_global_max, fit_gamma,
    fraction_scan, scan, ChainAnalysis, CorrelationClass, CorrelationLevel, Extremum,
    FractionEntry, GammaFit, ScanResult, Tolerances,
};
pub use chain::{Boundary, ChainSpec, SpinConfig, TimeGrid};
pub use diagrams::{
    asymptotic_correlator, count_matchings, count_spanning_clusters, count_triangles,
    gaussian_params, k_lines, AsymptoticParams, DiagramCounts,
};
pub use error::{Error, Result};
pub use exact::{
    amplitude_sums, correlator, correlator_all_to_all, correlator_r1, correlator_with,
    AmplitudePair, Backend, CorrelatorSeries, CorrelatorValue,
};
pub use oracle::{correlator_bruteforce, mqc_spectrum, MqcSpectrum, StateVector};
pub use shadows::{
    estimate_coherence, estimate_correlator, reconstruct, sample_snapshots, Estimator, PauliBasis,
    ReconstructionResult, ShadowSnapshot,
};

//! Executes a resolved configuration and writes its CSV.

use std::fs;
use std::io::Write;

use anyhow::{Context, Result};
use rayon::prelude::*;
use spinbell::analysis::{
    analyze, gamma_from_scan, scan, write_gamma_csv, ChainAnalysis, ScanResult, Tolerances,
};
use spinbell::diagrams::{
    gaussian_correlator, log2_asymptotic_correlator, write_diagram_csv, DiagramCounts,
};
use spinbell::exact::{correlator_csv_writer, evaluate_points, format_real, write_correlator_row};
use spinbell::shadows::{
    mix_seed, sample_snapshots, shadow_curve, write_shadow_csv, write_snapshots,
};
use spinbell::{ChainSpec, StateVector, TimeGrid};

use crate::config::{CommandKind, RunConfig, Times};

/// Open chains for every `(N, r)`, sorted and without duplicates.
fn specs(config: &RunConfig) -> Result<Vec<ChainSpec>> {
    let mut out = Vec::new();
    for &n in &config.n_values {
        for r in &config.ranges {
            out.push(ChainSpec::new(n, r.resolve(n), config.boundary)?);
        }
    }
    out.sort_by_key(|s| (s.n_spins(), s.range()));
    out.dedup();
    Ok(out)
}

fn grid(config: &RunConfig) -> TimeGrid {
    match &config.times {
        Some(Times::Grid(g)) => *g,
        _ => TimeGrid::quarter_period(),
    }
}

fn times(config: &RunConfig) -> Vec<f64> {
    config.times.as_ref().map(Times::points).unwrap_or_default()
}

fn analyze_all(config: &RunConfig) -> Result<ScanResult> {
    let grid = grid(config);
    let entries = specs(config)?
        .par_iter()
        .map(|spec| analyze(spec, &grid, config.backend, Tolerances::default()))
        .collect::<spinbell::Result<Vec<ChainAnalysis>>>()?;
    Ok(ScanResult { entries })
}

pub fn execute(config: &RunConfig, out: &mut dyn Write) -> Result<()> {
    match config.command {
        CommandKind::Correlator => {
            let taus = times(config);
            let mut writer = correlator_csv_writer(out)?;
            for spec in specs(config)? {
                for point in evaluate_points(&spec, &taus, config.backend)? {
                    write_correlator_row(&mut writer, &spec, &point)?;
                }
            }
            writer.flush()?;
        }
        CommandKind::Scan => analyze_all(config)?.write_csv(out)?,
        CommandKind::Gamma => {
            let ranges: Vec<usize> = {
                let mut r: Vec<usize> = specs(config)?.iter().map(|s| s.range()).collect();
                r.sort_unstable();
                r.dedup();
                r
            };
            let result = scan(
                &config.n_values,
                &ranges,
                &grid(config),
                config.backend,
                Tolerances::default(),
            )?;
            let fits = ranges
                .iter()
                .map(|&r| gamma_from_scan(&result, r))
                .collect::<spinbell::Result<Vec<_>>>()?;
            write_gamma_csv(out, &fits)?;
        }
        CommandKind::CriticalTime => {
            let result = analyze_all(config)?;
            let mut writer = csv::Writer::from_writer(out);
            writer.write_record(["N", "r", "tau_crit"])?;
            for e in &result.entries {
                writer.write_record([
                    e.n_spins.to_string(),
                    e.range.to_string(),
                    e.tau_crit.map(format_real).unwrap_or_default(),
                ])?;
            }
            writer.flush()?;
        }
        CommandKind::Diagrams => {
            let rows = specs(config)?
                .par_iter()
                .map(|s| DiagramCounts::compute(s.n_spins(), s.range()))
                .collect::<spinbell::Result<Vec<_>>>()?;
            write_diagram_csv(out, &rows)?;
        }
        CommandKind::Asymptotic => {
            let taus = times(config);
            let mut writer = csv::Writer::from_writer(out);
            writer.write_record(["N", "r", "tau", "q_asymptotic", "q_gaussian", "q_exact"])?;
            for spec in specs(config)? {
                let n = spec.n_spins();
                let counts = DiagramCounts::compute(n, spec.range())?;
                let exact = evaluate_points(&spec, &taus, config.backend)?;
                for point in exact {
                    let q_asym = n as f64 + log2_asymptotic_correlator(&counts, point.tau);
                    let q_gauss = (spec.range() >= 2)
                        .then(|| n as f64 + gaussian_correlator(&counts, point.tau).log2());
                    writer.write_record([
                        n.to_string(),
                        spec.range().to_string(),
                        format_real(point.tau),
                        format_real(q_asym),
                        q_gauss.map(format_real).unwrap_or_default(),
                        format_real(point.q_value),
                    ])?;
                }
            }
            writer.flush()?;
        }
        CommandKind::Shadows => {
            let taus = times(config);
            let mut rows = Vec::new();
            for spec in specs(config)? {
                let m = config.snapshots.unwrap_or(10_000 * spec.n_spins());
                // each chain gets its own seed so adding chains leaves others unchanged
                let seed = mix_seed(
                    config.seed,
                    (spec.n_spins() as u64) << 32 | spec.range() as u64,
                );
                rows.extend(shadow_curve(
                    &spec,
                    &taus,
                    m,
                    config.reconstructions,
                    seed,
                    config.estimator,
                )?);
                if let Some(dir) = &config.export_snapshots {
                    fs::create_dir_all(dir)
                        .with_context(|| format!("creating {}", dir.display()))?;
                    for (i, &tau) in taus.iter().enumerate() {
                        let state = StateVector::evolve(&spec, tau)?;
                        let snaps = sample_snapshots(&state, m, mix_seed(seed, i as u64))?;
                        let path =
                            dir.join(format!("N{}_r{}_t{i}.txt", spec.n_spins(), spec.range()));
                        let file = fs::File::create(&path)
                            .with_context(|| format!("creating {}", path.display()))?;
                        write_snapshots(std::io::BufWriter::new(file), &snaps)?;
                    }
                }
            }
            write_shadow_csv(out, &rows)?;
        }
    }
    Ok(())
}

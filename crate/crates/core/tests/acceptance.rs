//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6};
use std::time::Instant;

use spinbell::analysis::{
    analyze, find_critical_time, gamma_from_scan, nonlocality_depth, scan, ScanResult, Tolerances,
};
use spinbell::diagrams::{
    count_matchings, count_spanning_clusters, count_triangles, exponent_fit_sizes,
    fit_matching_exponent, gaussian_params, log2_asymptotic_correlator, DiagramCounts,
};
use spinbell::exact::{amplitude_sums, correlator_r1, correlator_with, Backend};
use spinbell::shadows::{shadow_curve, Estimator};
use spinbell::{correlator_bruteforce, mqc_spectrum, ChainSpec, StateVector, TimeGrid};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn open(n: usize, r: usize) -> ChainSpec {
    ChainSpec::open(n, r).unwrap()
}

fn transfer_e(n: usize, r: usize, tau: f64) -> f64 {
    amplitude_sums(&open(n, r), tau)
        .unwrap()
        .correlator(n)
        .e_value
}

fn oracle_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in (2..=12).step_by(2) {
        for r in 1..n {
            let spec = open(n, r);
            for i in 0..25 {
                let tau = FRAC_PI_2 * i as f64 / 24.0;
                let diff =
                    (transfer_e(n, r, tau) - correlator_bruteforce(&spec, tau).unwrap()).abs();
                worst = worst.max(diff);
            }
        }
    }
    outcome(
        worst <= 1e-10,
        format!("max |transfer - oracle| = {worst:.2e}"),
    )
}

fn nearest_neighbour_closed_form() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 2..=40 {
        for i in 0..=50 {
            let tau = FRAC_PI_2 * i as f64 / 50.0;
            // odd chains carry no parity-odd coherence
            let expected = if n % 2 == 0 {
                correlator_r1(n, tau)
            } else {
                0.0
            };
            worst = worst.max((transfer_e(n, 1, tau) - expected).abs());
        }
    }
    outcome(
        worst <= 1e-12,
        format!("max deviation {worst:.2e} over N = 2..40"),
    )
}

fn nearest_neighbour_maximum() -> Outcome {
    let grid = TimeGrid::quarter_period();
    let mut pass = true;
    let mut detail = Vec::new();
    for n in [20, 40] {
        let a = analyze(&open(n, 1), &grid, Backend::Auto, Tolerances::default()).unwrap();
        let ratio = 2f64.powf(a.first_max.q_value - n as f64) / 2f64.powf(-1.6 * n as f64 + 1.0);
        let tau_ok = (a.first_max.tau - FRAC_PI_6).abs() <= 0.01;
        let ratio_ok = (1.0 / 1.15..=1.15).contains(&ratio);
        pass &= tau_ok && ratio_ok;
        detail.push(format!(
            "N={n}: tau*={:.5} ({}), max/2^(-1.6N+1)={ratio:.3} ({})",
            a.first_max.tau,
            if tau_ok { "ok" } else { "off" },
            if ratio_ok { "ok" } else { "off" }
        ));
    }
    outcome(pass, detail.join("; "))
}

const SCAN_N: [usize; 4] = [64, 128, 256, 300];

fn critical_range(result: &ScanResult) -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for e in &result.entries {
        let ok = (e.first_max.q_value > 0.0) == (e.range >= 4);
        pass &= ok;
        if !ok {
            detail.push(format!(
                "N={} r={} q_max={:.3}",
                e.n_spins, e.range, e.first_max.q_value
            ));
        }
    }
    let gamma = |r| gamma_from_scan(result, r).unwrap().gamma;
    let (g2, g3, g4, g5) = (gamma(2), gamma(3), gamma(4), gamma(5));
    pass &= g2 < 0.0 && g3 < 0.0 && g4 > 0.0 && g5 > g4;
    detail.push(format!("gamma(2..5) = {g2:.4}, {g3:.4}, {g4:.4}, {g5:.4}"));
    outcome(pass, detail.join("; "))
}

fn nearest_neighbour_gamma(result: &ScanResult) -> Outcome {
    let g1 = gamma_from_scan(result, 1).unwrap();
    outcome(
        (g1.gamma + 0.6).abs() <= 0.02,
        format!(
            "gamma(1) = {:.4} +- {:.1e}, target -0.6 +- 0.02",
            g1.gamma, g1.gamma_stderr
        ),
    )
}

fn one_axis_twisting() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for n in [64, 300] {
        let e = correlator_with(
            &ChainSpec::all_to_all(n).unwrap(),
            FRAC_PI_4,
            Backend::ClosedForm,
        )
        .unwrap()
        .e_value;
        pass &= (e - 0.25).abs() <= 1e-10;
        detail.push(format!("E_{n}(pi/4) - 1/4 = {:.1e}", e - 0.25));
    }
    let grid = TimeGrid::quarter_period();
    for n in [64, 128, 256] {
        let spec = ChainSpec::all_to_all(n).unwrap();
        match find_critical_time(&spec, &grid, Backend::Auto).unwrap() {
            Some(tc) => {
                let scaled = tc * n as f64;
                pass &= (scaled / 1.5 - 1.0).abs() <= 0.2;
                detail.push(format!("N={n}: tau_c*N = {scaled:.4}"));
            }
            None => {
                pass = false;
                detail.push(format!("N={n}: no crossing"));
            }
        }
    }
    outcome(pass, detail.join("; "))
}

fn critical_time_collapse() -> Outcome {
    let grid = TimeGrid::quarter_period();
    let ns = [80, 100, 120, 140];
    let result = scan(&ns, &[4, 5], &grid, Backend::Auto, Tolerances::default()).unwrap();
    let mut pass = true;
    let mut detail = Vec::new();
    for r in [4, 5] {
        let tcs: Vec<f64> = ns
            .iter()
            .map(|&n| {
                result
                    .get(n, r)
                    .and_then(|e| e.tau_crit)
                    .unwrap_or(f64::NAN)
            })
            .collect();
        let max = tcs.iter().copied().fold(f64::MIN, f64::max);
        let min = tcs.iter().copied().fold(f64::MAX, f64::min);
        let mean = tcs.iter().sum::<f64>() / tcs.len() as f64;
        let spread = (max - min) / mean;
        pass &= spread <= 0.05;
        detail.push(format!(
            "r={r}: tau_c mean {mean:.5}, spread {:.2}%",
            100.0 * spread
        ));
    }
    for &n in &ns {
        let t4 = result.get(n, 4).and_then(|e| e.tau_crit);
        let t5 = result.get(n, 5).and_then(|e| e.tau_crit);
        pass &= matches!((t4, t5), (Some(a), Some(b)) if b < a);
    }
    outcome(pass, detail.join("; "))
}

fn fibonacci(k: usize) -> num_bigint::BigUint {
    let (mut a, mut b) = (
        num_bigint::BigUint::from(0u8),
        num_bigint::BigUint::from(1u8),
    );
    for _ in 0..k {
        let c = &a + &b;
        a = b;
        b = c;
    }
    a
}

fn diagram_counts() -> Outcome {
    let p: Vec<String> = (3..=5)
        .map(|r| count_matchings(16, r).to_string())
        .collect();
    let t: Vec<u64> = (3..=5).map(|r| count_triangles(16, r)).collect();
    let fib = (2..=60)
        .step_by(2)
        .all(|n| count_matchings(n, 2) == fibonacci(n / 2 + 1));
    let s4 = count_spanning_clusters(10, 4).unwrap().to_string();
    let s3 = count_spanning_clusters(10, 3).unwrap().to_string();
    let pass =
        p == ["491", "3116", "12483"] && t == [40, 76, 120] && fib && s4 == "15" && s3 == "1";
    outcome(
        pass,
        format!(
            "P(16,3..5) = {p:?}, R(16,3..5) = {t:?}, Fibonacci {fib}, spanning(10,4|3) = {s4}|{s3}"
        ),
    )
}

fn exponent_fits() -> Outcome {
    let ns = exponent_fit_sizes();
    let targets = [
        (2, 0.2406, 0.005),
        (3, 0.427, 0.02),
        (4, 0.563, 0.02),
        (5, 0.670, 0.02),
    ];
    let mut pass = true;
    let mut detail = Vec::new();
    for (r, want, tol) in targets {
        let slope = fit_matching_exponent(r, &ns).unwrap();
        pass &= (slope - want).abs() <= tol;
        detail.push(format!("r={r}: {slope:.5}"));
    }
    outcome(pass, detail.join(", "))
}

/// First upward zero crossing of the asymptotic `Q` on a fine grid, bisected.
fn asymptotic_crossing(counts: &DiagramCounts) -> Option<f64> {
    let n = counts.n_spins as f64;
    let q = |t: f64| n + log2_asymptotic_correlator(counts, t);
    let steps = 20_000;
    let taus: Vec<f64> = (1..steps)
        .map(|i| FRAC_PI_2 * i as f64 / steps as f64)
        .collect();
    let j = taus.iter().position(|&t| q(t) > 0.0)?;
    let (mut lo, mut hi) = (if j == 0 { 0.0 } else { taus[j - 1] }, taus[j]);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if q(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

fn asymptotics() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    let crossings: Vec<Option<f64>> = (3..=5)
        .map(|r| asymptotic_crossing(&DiagramCounts::compute(16, r).unwrap()))
        .collect();
    pass &= crossings[0].is_none() && crossings[1].is_some() && crossings[2].is_some();
    let exact =
        find_critical_time(&open(16, 4), &TimeGrid::quarter_period(), Backend::Auto).unwrap();
    match (crossings[1], exact) {
        (Some(a), Some(e)) => {
            let rel = (a - e).abs() / e;
            pass &= rel <= 0.15;
            detail.push(format!(
                "N=16 r=4: asymptotic {a:.4} vs exact {e:.4} ({:.1}%)",
                100.0 * rel
            ));
        }
        _ => {
            pass = false;
            detail.push("N=16 r=4: missing crossing".to_string());
        }
    }
    detail.push(format!(
        "crossings r=3,4,5: {:?}",
        crossings
            .iter()
            .map(|c| c.map(|t| (t * 1e4).round() / 1e4))
            .collect::<Vec<_>>()
    ));
    for n in (12..=20).step_by(2) {
        for r in 2..=6 {
            let e = gaussian_params(n, r).unwrap().e_tilde_max;
            let ok = if r <= 3 { e < 0.0 } else { e > 0.0 };
            if !ok {
                detail.push(format!("E~max(N={n}, r={r}) = {e:.3}"));
            }
            pass &= ok;
        }
    }
    outcome(pass, detail.join("; "))
}

fn parity_and_mqc() -> Outcome {
    let mut worst_odd: f64 = 0.0;
    for n in [3, 5, 7] {
        for r in 1..n {
            let spec = open(n, r);
            for i in 0..50 {
                let tau = FRAC_PI_2 * i as f64 / 49.0;
                worst_odd =
                    worst_odd.max(correlator_with(&spec, tau, Backend::Auto).unwrap().e_value);
            }
        }
    }
    let (mut worst_ext, mut worst_sum): (f64, f64) = (0.0, 0.0);
    for n in [4, 6] {
        for r in 1..n {
            let spec = open(n, r);
            for i in 0..50 {
                let tau = FRAC_PI_2 * i as f64 / 49.0;
                let state = StateVector::evolve(&spec, tau).unwrap();
                let mqc = mqc_spectrum(&state);
                let e = correlator_with(&spec, tau, Backend::Auto).unwrap().e_value;
                worst_ext = worst_ext.max((mqc.extremal() - e).abs());
                worst_sum = worst_sum.max((mqc.total() - 1.0).abs());
            }
        }
    }
    outcome(
        worst_odd <= 1e-12 && worst_ext <= 1e-10 && worst_sum <= 1e-10,
        format!("odd-N max E = {worst_odd:.1e}; |I_N - E| <= {worst_ext:.1e}; |sum I_m - 1| <= {worst_sum:.1e}"),
    )
}

fn shadows() -> Outcome {
    let taus: Vec<f64> = (0..10)
        .map(|i| FRAC_PI_2 * (i as f64 + 0.5) / 10.0)
        .collect();
    let mut pass = true;
    let mut detail = Vec::new();
    for (n, r) in [(4, 3), (6, 5)] {
        let rows = shadow_curve(
            &open(n, r),
            &taus,
            10_000 * n,
            10,
            20_240_601,
            Estimator::Naive,
        )
        .unwrap();
        let hits = rows
            .iter()
            .filter(|row| (row.result.q_mean - row.q_exact).abs() <= 2.0 * row.result.q_std)
            .count();
        pass &= hits >= 8;
        detail.push(format!("(N={n}, r={r}): {hits}/10 within 2 sigma"));
    }
    outcome(pass, detail.join("; "))
}

fn fraction_universality(result: &ScanResult) -> Outcome {
    let beta = |n| {
        let e = result.get(n, 4).unwrap();
        nonlocality_depth(e.first_max.q_value, n) as f64 / n as f64
    };
    let (b256, b300) = (beta(256), beta(300));
    let g4 = gamma_from_scan(result, 4).unwrap().gamma;
    let pass =
        (b256 - b300).abs() <= 0.01 && (b256 - g4).abs() <= 0.03 && (b300 - g4).abs() <= 0.03;
    outcome(
        pass,
        format!("beta(256) = {b256:.4}, beta(300) = {b300:.4}, gamma(4) = {g4:.4}"),
    )
}

fn main() {
    let mut failures = 0;
    let mut run = |id: &str, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = f();
        println!(
            "criterion {id:<3} {name:<34} {}  [{:.1}s] {}",
            if o.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
        if !o.pass {
            failures += 1;
        }
    };

    let start = Instant::now();
    let main_scan = scan(
        &SCAN_N,
        &[1, 2, 3, 4, 5],
        &TimeGrid::quarter_period(),
        Backend::Auto,
        Tolerances::default(),
    )
    .expect("scan");
    println!(
        "scan N = {SCAN_N:?}, r = 1..5 finished in {:.1}s",
        start.elapsed().as_secs_f64()
    );

    run("1", "oracle equivalence", &mut oracle_equivalence);
    run(
        "2a",
        "nearest-neighbour closed form",
        &mut nearest_neighbour_closed_form,
    );
    run(
        "2b",
        "nearest-neighbour maximum",
        &mut nearest_neighbour_maximum,
    );
    run("3a", "critical range and gamma signs", &mut || {
        critical_range(&main_scan)
    });
    run("3b", "nearest-neighbour gamma", &mut || {
        nearest_neighbour_gamma(&main_scan)
    });
    run("4", "one-axis twisting limit", &mut one_axis_twisting);
    run("5", "critical time collapse", &mut critical_time_collapse);
    run("6", "diagram counts", &mut diagram_counts);
    run("7", "matching exponent fits", &mut exponent_fits);
    run("8", "asymptotic correlator", &mut asymptotics);
    run("9", "parity and MQC", &mut parity_and_mqc);
    run("10", "shadow reconstruction", &mut shadows);
    run("11", "fraction universality", &mut || {
        fraction_universality(&main_scan)
    });

    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}

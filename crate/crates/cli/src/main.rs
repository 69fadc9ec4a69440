mod config;
mod run;

use std::fs;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use spinbell::shadows::{Estimator, DEFAULT_RECONSTRUCTIONS};
use spinbell::{Backend, Boundary};

use config::{
    parse_grid, parse_int_list, parse_range_list, parse_real_list, CommandKind, ConfigError,
    RunConfig, Times,
};

#[derive(Debug, Parser)]
#[command(
    name = "spinbell",
    version,
    about = "Many-body Bell correlators of finite-range Ising chains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output CSV; a JSON sidecar is written next to it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// auto, transfer, oracle or closed-form.
    #[arg(long, global = true, default_value = "auto")]
    backend: Backend,

    /// Worker threads; defaults to the available cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct ChainArgs {
    /// Chain sizes, e.g. `64,128` or `4..12`.
    #[arg(long = "n")]
    n: String,

    /// Interaction ranges, e.g. `1..5`; `all` couples every pair.
    #[arg(long = "r")]
    r: String,
}

#[derive(Debug, Args)]
struct TimeArgs {
    /// Comma list of times.
    #[arg(long, conflicts_with = "grid")]
    tau: Option<String>,

    /// Uniform grid `start:stop:steps`.
    #[arg(long)]
    grid: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Correlator values on a list or grid of times.
    Correlator {
        #[command(flatten)]
        chain: ChainArgs,
        #[command(flatten)]
        times: TimeArgs,
        #[arg(long, default_value = "open")]
        boundary: Boundary,
    },
    /// First maximum, critical time and depth per chain.
    Scan {
        #[command(flatten)]
        chain: ChainArgs,
        #[command(flatten)]
        times: TimeArgs,
    },
    /// Slope of the maximal Q against N for each range.
    Gamma {
        #[command(flatten)]
        chain: ChainArgs,
        #[command(flatten)]
        times: TimeArgs,
    },
    /// First crossing of the Bell limit.
    CriticalTime {
        #[command(flatten)]
        chain: ChainArgs,
        #[command(flatten)]
        times: TimeArgs,
    },
    /// Diagram counts and Gaussian parameters.
    Diagrams {
        #[command(flatten)]
        chain: ChainArgs,
    },
    /// Asymptotic, Gaussian and exact Q side by side.
    Asymptotic {
        #[command(flatten)]
        chain: ChainArgs,
        #[command(flatten)]
        times: TimeArgs,
    },
    /// Simulated classical-shadow reconstructions.
    Shadows {
        #[command(flatten)]
        chain: ChainArgs,
        #[command(flatten)]
        times: TimeArgs,
        /// Snapshots per reconstruction [default: 10000 N].
        #[arg(long)]
        snapshots: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_RECONSTRUCTIONS)]
        reconstructions: usize,
        /// naive or pair-product.
        #[arg(long, default_value = "naive")]
        estimator: Estimator,
        /// Directory for `bases,outcomes` records of the first reconstruction.
        #[arg(long)]
        export_snapshots: Option<PathBuf>,
    },
    /// Re-runs the configuration stored in a sidecar file.
    Replay { sidecar: PathBuf },
}

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    config: RunConfig,
    version: String,
    wall_time_seconds: f64,
}

fn resolve_times(args: &TimeArgs) -> Result<Option<Times>, ConfigError> {
    match (&args.tau, &args.grid) {
        (Some(t), _) => Ok(Some(Times::Points(parse_real_list("tau", t)?))),
        (None, Some(g)) => Ok(Some(Times::Grid(parse_grid(g)?))),
        (None, None) => Ok(None),
    }
}

fn resolve(cli: Cli) -> Result<RunConfig, ConfigError> {
    let threads = cli.threads.unwrap_or_else(rayon::current_num_threads);
    if threads == 0 {
        return Err(ConfigError::new("threads", "must be positive"));
    }
    let mut config = RunConfig {
        command: CommandKind::Correlator,
        n_values: Vec::new(),
        ranges: Vec::new(),
        boundary: Boundary::Open,
        times: None,
        backend: cli.backend,
        seed: cli.seed,
        snapshots: None,
        reconstructions: DEFAULT_RECONSTRUCTIONS,
        estimator: Estimator::Naive,
        export_snapshots: None,
        out: PathBuf::new(),
        threads,
    };
    let (kind, chain, times) = match &cli.command {
        Command::Correlator {
            chain,
            times,
            boundary,
        } => {
            config.boundary = *boundary;
            (CommandKind::Correlator, chain, Some(times))
        }
        Command::Scan { chain, times } => (CommandKind::Scan, chain, Some(times)),
        Command::Gamma { chain, times } => (CommandKind::Gamma, chain, Some(times)),
        Command::CriticalTime { chain, times } => (CommandKind::CriticalTime, chain, Some(times)),
        Command::Diagrams { chain } => (CommandKind::Diagrams, chain, None),
        Command::Asymptotic { chain, times } => (CommandKind::Asymptotic, chain, Some(times)),
        Command::Shadows {
            chain,
            times,
            snapshots,
            reconstructions,
            estimator,
            export_snapshots,
        } => {
            config.snapshots = *snapshots;
            config.reconstructions = *reconstructions;
            config.estimator = *estimator;
            config.export_snapshots = export_snapshots.clone();
            (CommandKind::Shadows, chain, Some(times))
        }
        Command::Replay { .. } => unreachable!("replay is handled before resolution"),
    };
    config.command = kind;
    config.n_values = parse_int_list("n", &chain.n)?;
    config.ranges = parse_range_list(&chain.r)?;
    if let Some(t) = times {
        config.times = resolve_times(t)?;
    }
    config.out = cli
        .out
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", kind.name())));
    config.validate()?;
    Ok(config)
}

fn load_sidecar(path: &PathBuf) -> Result<RunConfig, ConfigError> {
    let text = fs::read_to_string(path)
        .map_err(|e| ConfigError::new("sidecar", format!("{}: {e}", path.display())))?;
    let sidecar: Sidecar = serde_json::from_str(&text).map_err(|e| {
        ConfigError::new(
            "sidecar",
            format!(
                "{} line {} column {}: {e}",
                path.display(),
                e.line(),
                e.column()
            ),
        )
    })?;
    sidecar.config.validate()?;
    Ok(sidecar.config)
}

fn run(config: &RunConfig) -> anyhow::Result<()> {
    let start = Instant::now();
    let csv_path = config.csv_path();
    if let Some(dir) = csv_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()?;
    let file =
        fs::File::create(&csv_path).with_context(|| format!("creating {}", csv_path.display()))?;
    let mut out = BufWriter::new(file);
    pool.install(|| run::execute(config, &mut out))?;
    drop(out);

    let sidecar = Sidecar {
        config: config.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };
    let sidecar_path = config.sidecar_path();
    fs::write(
        &sidecar_path,
        serde_json::to_string_pretty(&sidecar)? + "\n",
    )
    .with_context(|| format!("writing {}", sidecar_path.display()))?;
    eprintln!(
        "wrote {} and {}",
        csv_path.display(),
        sidecar_path.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match &cli.command {
        Command::Replay { sidecar } => load_sidecar(sidecar),
        _ => resolve(cli),
    };
    let config = match config {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

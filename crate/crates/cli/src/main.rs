//! `qae` — amplitude and observable estimation harness.
//!
//! Exit codes: 0 success, 1 pipeline failure, 2 configuration or usage
//! failure.

mod commands;
mod config;
mod experiments;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{
    defaults, resolve_out_dir, ConfigOverlay, Experiment, ExperimentConfig, ModeArg, A_FINE,
    OUT_ROOT_ENV,
};
use qae_core::Error;

#[derive(Parser)]
#[command(
    name = "qae",
    version,
    about = "Amplitude, overlap, and observable estimation via spectral analysis of amplified signals",
    after_help = format!(
        "Default output root for `reproduce` comes from --out, then ${OUT_ROOT_ENV}, then ./runs."
    )
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
// One short-lived value per process; the size spread between subcommand
// argument structs does not matter.
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Estimate the rotation angle and squared overlap of a state pair.
    Estimate(EstimateArgs),
    /// Estimate a weighted sum of Pauli words from an observable file.
    Observable(ObservableArgs),
    /// Re-run a packaged experiment and write its artifacts.
    Reproduce(ReproduceArgs),
    /// Print window-truncation bounds for given window parameters.
    Bounds(BoundsArgs),
    /// Run the oracle-equivalence self-check suite.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct PipelineFlags {
    /// Window rate `a` of the Gaussian weight exp(-a^2 t^2).
    #[arg(long, default_value_t = A_FINE)]
    a: f64,
    /// Window half-length: samples run over t in [-t_max, t_max].
    #[arg(long, default_value_t = 60)]
    t_max: u32,
    /// Spacing of the spectral grid in radians.
    #[arg(long, default_value_t = 1e-3)]
    grid_step: f64,
    /// Measurement shots per sample (0 = exact expectations).
    #[arg(long, default_value_t = 0)]
    shots: u64,
    /// Base RNG seed for sampled modes.
    #[arg(long, default_value_t = 17)]
    seed: u64,
}

#[derive(Args)]
struct EstimateArgs {
    /// Planted rotation angle; builds a two-qubit pair with this angle.
    #[arg(long, conflicts_with_all = ["psi_seed", "phi_seed"])]
    theta: Option<f64>,
    /// Seed for the first random state circuit.
    #[arg(long, requires = "phi_seed")]
    psi_seed: Option<u64>,
    /// Seed for the second random state circuit.
    #[arg(long, requires = "psi_seed")]
    phi_seed: Option<u64>,
    /// Register width for seeded random pairs.
    #[arg(long, default_value_t = 4)]
    qubits: usize,
    /// Random-circuit depth for seeded pairs.
    #[arg(long, default_value_t = 8)]
    depth: usize,
    /// Refinement ladder (ascending, starting at 1).
    #[arg(long, value_delimiter = ',', default_values_t = [1i64, 8])]
    m_schedule: Vec<i64>,
    /// Acquisition mode.
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    #[command(flatten)]
    pipeline: PipelineFlags,
    /// Emit the result as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ObservableArgs {
    /// Observable file: one `coefficient pauli-word` term per line.
    #[arg(long)]
    spec: PathBuf,
    /// Seed for a random state circuit (register width from the file).
    #[arg(long, conflicts_with = "probe_theta", default_value_t = 7)]
    state_seed: u64,
    /// Use the built-in rotated-probe state with this angle instead.
    #[arg(long)]
    probe_theta: Option<f64>,
    /// Random-circuit depth for the seeded state.
    #[arg(long, default_value_t = 8)]
    depth: usize,
    /// Refinement ladder (ascending, starting at 1).
    #[arg(long, value_delimiter = ',', default_values_t = [1i64, 6])]
    m_schedule: Vec<i64>,
    /// Acquisition mode. Probability mode cannot separate an angle from
    /// its complement, so estimates default to the overlap signal.
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    #[command(flatten)]
    pipeline: PipelineFlags,
    /// Emit the result as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ReproduceArgs {
    /// Experiment id: fig3..fig8 (or long ids) or custom.
    figure: Experiment,
    /// Output directory; defaults to the experiment id under $QAE_OUT_ROOT,
    /// else under ./runs.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: OverrideFlags,
}

/// Flag-level overrides for `reproduce`; unset flags leave the figure
/// defaults (or config-file values) in place.
#[derive(Args)]
struct OverrideFlags {
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    psi_seed: Option<u64>,
    #[arg(long)]
    phi_seed: Option<u64>,
    #[arg(long)]
    pairs: Option<u32>,
    #[arg(long)]
    pair_seed_base: Option<u64>,
    #[arg(long)]
    qubits: Option<usize>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    pauli: Option<String>,
    #[arg(long, value_delimiter = ',')]
    m_schedule: Option<Vec<i64>>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    t_max: Option<u32>,
    #[arg(long, value_delimiter = ',')]
    t_sweep: Option<Vec<u32>>,
    #[arg(long)]
    grid_step: Option<f64>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    repetitions: Option<u32>,
    #[arg(long, value_delimiter = ',')]
    epsilons: Option<Vec<f64>>,
    #[arg(long)]
    trajectories: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct BoundsArgs {
    /// Window rate `a`.
    #[arg(long)]
    a: f64,
    /// Window half-length.
    #[arg(long, alias = "T", default_value_t = 60)]
    t_max: u32,
    /// Accuracy targets for minimal-window lookups.
    #[arg(long, value_delimiter = ',', default_values_t = [1e-3, 1e-6])]
    eps: Vec<f64>,
    /// Emit the report as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ValidateArgs {
    /// Emit the check results as JSON.
    #[arg(long)]
    json: bool,
}

/// Anything that should end the process unsuccessfully.
enum Failure {
    Core(Error),
    /// Self-check failures: the pipeline ran but disagreed with its oracles.
    Checks(usize),
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure::Core(err)
    }
}

/// Configuration-shaped errors exit 2; everything else from the pipeline
/// exits 1.
fn exit_code_for(failure: &Failure) -> u8 {
    match failure {
        Failure::Core(
            Error::InvalidConfig(_)
            | Error::Parse { .. }
            | Error::DimensionMismatch(_)
            | Error::NotNormalized { .. },
        ) => 2,
        _ => 1,
    }
}

fn estimate_config(args: &EstimateArgs) -> ExperimentConfig {
    let mut cfg = defaults(Experiment::Custom);
    cfg.theta = args.theta;
    cfg.psi_seed = args.psi_seed;
    cfg.phi_seed = args.phi_seed;
    cfg.qubits = if args.theta.is_some() { 2 } else { args.qubits };
    cfg.depth = args.depth;
    cfg.magnifications = args.m_schedule.clone();
    cfg.mode = args.mode;
    cfg.a = args.pipeline.a;
    cfg.t_max = args.pipeline.t_max;
    cfg.grid_step = args.pipeline.grid_step;
    cfg.n_shot = args.pipeline.shots;
    cfg.seed = args.pipeline.seed;
    cfg
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Estimate(args) => {
            let cfg = estimate_config(&args);
            Ok(commands::estimate(&cfg, args.json)?)
        }
        Command::Observable(args) => {
            let mut cfg = defaults(Experiment::Custom);
            cfg.theta = None;
            cfg.magnifications = args.m_schedule.clone();
            cfg.mode = args.mode;
            cfg.a = args.pipeline.a;
            cfg.t_max = args.pipeline.t_max;
            cfg.grid_step = args.pipeline.grid_step;
            cfg.n_shot = args.pipeline.shots;
            cfg.seed = args.pipeline.seed;
            let state = match args.probe_theta {
                Some(theta) => commands::ObservableState::Probe { theta },
                None => commands::ObservableState::Seeded {
                    seed: args.state_seed,
                    depth: args.depth,
                },
            };
            Ok(commands::observable(&args.spec, state, &cfg, args.json)?)
        }
        Command::Reproduce(args) => {
            let mut cfg = defaults(args.figure);
            if let Some(path) = &args.config {
                ConfigOverlay::from_file(path)?.apply_to(&mut cfg);
            }
            let o = &args.overrides;
            let flag_overlay = ConfigOverlay {
                theta: o.theta,
                psi_seed: o.psi_seed,
                phi_seed: o.phi_seed,
                pairs: o.pairs,
                pair_seed_base: o.pair_seed_base,
                qubits: o.qubits,
                depth: o.depth,
                pauli: o.pauli.clone(),
                magnifications: o.m_schedule.clone(),
                a: o.a,
                t_max: o.t_max,
                t_sweep: o.t_sweep.clone(),
                grid_step: o.grid_step,
                mode: o.mode,
                n_shot: o.shots,
                repetitions: o.repetitions,
                epsilons: o.epsilons.clone(),
                trajectories: o.trajectories,
                seed: o.seed,
                out_dir: args.out.as_ref().map(|p| p.display().to_string()),
            };
            flag_overlay.apply_to(&mut cfg);
            // An explicit angle replaces a seeded pair and vice versa.
            if o.theta.is_some() {
                cfg.psi_seed = o.psi_seed;
                cfg.phi_seed = o.phi_seed;
            } else if o.psi_seed.is_some() && o.phi_seed.is_some() {
                cfg.theta = None;
            }
            let out = resolve_out_dir(&cfg);
            let (manifest, lines) = experiments::run_experiment(&cfg, &out)?;
            println!("experiment = {}", manifest.experiment);
            println!("out_dir = {}", out.display());
            for line in lines {
                println!("{line}");
            }
            println!("artifacts = {}", manifest.artifacts.len());
            println!("manifest = {}", out.join("manifest.json").display());
            Ok(())
        }
        Command::Bounds(args) => Ok(commands::bounds(args.a, args.t_max, &args.eps, args.json)?),
        Command::Validate(args) => {
            let failed = commands::validate(args.json)?;
            if failed > 0 {
                return Err(Failure::Checks(failed));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    // Die quietly when a downstream pipe closes (`qae bounds | head`)
    // instead of panicking on EPIPE.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Core(err) => eprintln!("error: {err}"),
                Failure::Checks(n) => eprintln!("error: {n} validation check(s) failed"),
            }
            ExitCode::from(exit_code_for(&failure))
        }
    }
}

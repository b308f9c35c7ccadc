//! Experiment configuration: per-figure defaults, JSON config files, and
//! flag overrides, merged into one resolved record that the manifest pins.

use std::env;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use qae_core::{Error, Result};

/// Fine window rate `1/(20 sqrt(2))` used by the long-window experiments.
pub const A_FINE: f64 = 0.035355339059327376;
/// Coarse window rate `1/(10 sqrt(2))` used by the short-window experiments.
pub const A_COARSE: f64 = 0.07071067811865475;

/// Environment variable naming the default output root for `reproduce`.
pub const OUT_ROOT_ENV: &str = "QAE_OUT_ROOT";

/// The experiments the harness knows how to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Fig3AmplitudeSweep,
    Fig4RandomStates,
    Fig5PauliObservable,
    Fig6CutoffSweep,
    Fig7ShotNoise,
    Fig8CircuitNoise,
    Custom,
}

impl Experiment {
    pub fn id(self) -> &'static str {
        match self {
            Experiment::Fig3AmplitudeSweep => "fig3_amplitude_sweep",
            Experiment::Fig4RandomStates => "fig4_random_states",
            Experiment::Fig5PauliObservable => "fig5_pauli_observable",
            Experiment::Fig6CutoffSweep => "fig6_cutoff_sweep",
            Experiment::Fig7ShotNoise => "fig7_shot_noise",
            Experiment::Fig8CircuitNoise => "fig8_circuit_noise",
            Experiment::Custom => "custom",
        }
    }

    pub const ALL: [Experiment; 7] = [
        Experiment::Fig3AmplitudeSweep,
        Experiment::Fig4RandomStates,
        Experiment::Fig5PauliObservable,
        Experiment::Fig6CutoffSweep,
        Experiment::Fig7ShotNoise,
        Experiment::Fig8CircuitNoise,
        Experiment::Custom,
    ];
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    /// Accepts the full identifier or the short `figN` form.
    fn from_str(s: &str) -> Result<Self> {
        for exp in Experiment::ALL {
            if s == exp.id() || (exp != Experiment::Custom && s == &exp.id()[..4]) {
                return Ok(exp);
            }
        }
        Err(Error::InvalidConfig(format!(
            "unknown experiment {s:?}; expected one of fig3..fig8 or custom (long ids: {})",
            Experiment::ALL.map(|e| e.id()).join(", ")
        )))
    }
}

/// Acquisition mode selector as presented on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ModeArg {
    Exact,
    Hadamard,
    Probability,
}

/// A fully resolved experiment configuration; this exact record is embedded
/// in the run manifest.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Planted rotation angle (angle-pair experiments and the fig5 state).
    pub theta: Option<f64>,
    /// Circuit seeds for a custom random pair.
    pub psi_seed: Option<u64>,
    pub phi_seed: Option<u64>,
    /// Number of random pairs and their base seed (fig4): pair `k` uses
    /// seeds `base + 2k` and `base + 2k + 1`.
    pub pairs: u32,
    pub pair_seed_base: u64,
    pub qubits: usize,
    pub depth: usize,
    /// Pauli word for the observable experiment.
    pub pauli: Option<String>,
    /// Magnification list: a sweep for fig3/fig5/fig7, a refinement ladder
    /// for fig4 and custom, and the single power for fig8.
    pub magnifications: Vec<i64>,
    pub a: f64,
    pub t_max: u32,
    /// Window sweep for fig6 (descending).
    pub t_sweep: Option<Vec<u32>>,
    pub grid_step: f64,
    pub mode: ModeArg,
    pub n_shot: u64,
    /// Seeded repetitions per magnification (fig7).
    pub repetitions: u32,
    /// Depolarizing rates for fig8.
    pub epsilons: Vec<f64>,
    pub trajectories: u32,
    pub seed: u64,
    /// Output directory; resolved to the actual path before persisting.
    pub out_dir: Option<String>,
}

/// Per-figure defaults; every field is concrete so any single override is
/// possible without re-specifying the rest.
pub fn defaults(experiment: Experiment) -> ExperimentConfig {
    let base = ExperimentConfig {
        experiment,
        theta: Some(0.6),
        psi_seed: None,
        phi_seed: None,
        pairs: 6,
        pair_seed_base: 21,
        qubits: 2,
        depth: 8,
        pauli: None,
        magnifications: vec![1, 2, 4, 8],
        a: A_FINE,
        t_max: 60,
        t_sweep: None,
        grid_step: 1e-3,
        mode: ModeArg::Exact,
        n_shot: 0,
        repetitions: 100,
        epsilons: Vec::new(),
        trajectories: 1000,
        seed: 17,
        out_dir: None,
    };
    match experiment {
        Experiment::Fig3AmplitudeSweep => ExperimentConfig {
            magnifications: (2..=12).collect(),
            ..base
        },
        Experiment::Fig4RandomStates => ExperimentConfig {
            qubits: 4,
            theta: None,
            magnifications: vec![1, 10],
            ..base
        },
        Experiment::Fig5PauliObservable => ExperimentConfig {
            qubits: 6,
            theta: Some(0.595),
            pauli: Some("IIIIZZ".into()),
            magnifications: (-1..=14).collect(),
            mode: ModeArg::Probability,
            ..base
        },
        Experiment::Fig6CutoffSweep => ExperimentConfig {
            magnifications: vec![1],
            a: A_COARSE,
            t_sweep: Some(vec![20, 10, 5, 2, 1]),
            t_max: 20,
            ..base
        },
        Experiment::Fig7ShotNoise => ExperimentConfig {
            theta: Some(1.5),
            magnifications: (1..=12).collect(),
            a: A_COARSE,
            t_max: 1,
            mode: ModeArg::Hadamard,
            n_shot: 100,
            seed: 7000,
            ..base
        },
        Experiment::Fig8CircuitNoise => ExperimentConfig {
            theta: Some((26.575 - 8.0 * std::f64::consts::PI) / 10.0),
            magnifications: vec![5],
            t_max: 40,
            grid_step: 0.03,
            epsilons: vec![0.0, 1e-3, 5e-3, 1e-2],
            seed: 900,
            ..base
        },
        Experiment::Custom => base,
    }
}

/// Sparse overlay: a config file or the flag set. Unknown keys in files are
/// rejected so typos fail validation instead of silently using defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverlay {
    pub theta: Option<f64>,
    pub psi_seed: Option<u64>,
    pub phi_seed: Option<u64>,
    pub pairs: Option<u32>,
    pub pair_seed_base: Option<u64>,
    pub qubits: Option<usize>,
    pub depth: Option<usize>,
    pub pauli: Option<String>,
    pub magnifications: Option<Vec<i64>>,
    pub a: Option<f64>,
    pub t_max: Option<u32>,
    pub t_sweep: Option<Vec<u32>>,
    pub grid_step: Option<f64>,
    pub mode: Option<ModeArg>,
    pub n_shot: Option<u64>,
    pub repetitions: Option<u32>,
    pub epsilons: Option<Vec<f64>>,
    pub trajectories: Option<u32>,
    pub seed: Option<u64>,
    pub out_dir: Option<String>,
}

impl ConfigOverlay {
    pub fn from_file(path: &Path) -> Result<Self> {
        qae_core::io::read_json(path)
    }

    pub fn apply_to(&self, cfg: &mut ExperimentConfig) {
        if let Some(v) = self.theta {
            cfg.theta = Some(v);
        }
        if let Some(v) = self.psi_seed {
            cfg.psi_seed = Some(v);
        }
        if let Some(v) = self.phi_seed {
            cfg.phi_seed = Some(v);
        }
        if let Some(v) = self.pairs {
            cfg.pairs = v;
        }
        if let Some(v) = self.pair_seed_base {
            cfg.pair_seed_base = v;
        }
        if let Some(v) = self.qubits {
            cfg.qubits = v;
        }
        if let Some(v) = self.depth {
            cfg.depth = v;
        }
        if let Some(v) = &self.pauli {
            cfg.pauli = Some(v.clone());
        }
        if let Some(v) = &self.magnifications {
            cfg.magnifications = v.clone();
        }
        if let Some(v) = self.a {
            cfg.a = v;
        }
        if let Some(v) = self.t_max {
            cfg.t_max = v;
        }
        if let Some(v) = &self.t_sweep {
            cfg.t_sweep = Some(v.clone());
        }
        if let Some(v) = self.grid_step {
            cfg.grid_step = v;
        }
        if let Some(v) = self.mode {
            cfg.mode = v;
        }
        if let Some(v) = self.n_shot {
            cfg.n_shot = v;
        }
        if let Some(v) = self.repetitions {
            cfg.repetitions = v;
        }
        if let Some(v) = &self.epsilons {
            cfg.epsilons = v.clone();
        }
        if let Some(v) = self.trajectories {
            cfg.trajectories = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = &self.out_dir {
            cfg.out_dir = Some(v.clone());
        }
    }
}

/// Resolves the output directory: explicit flag/config first, then
/// `$QAE_OUT_ROOT/<experiment>`, then `./runs/<experiment>`.
pub fn resolve_out_dir(cfg: &ExperimentConfig) -> PathBuf {
    if let Some(dir) = &cfg.out_dir {
        return PathBuf::from(dir);
    }
    let root = env::var_os(OUT_ROOT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("runs"));
    root.join(cfg.experiment.id())
}

/// Cheap structural checks before any pipeline work; failures are
/// configuration errors (exit code 2).
pub fn validate(cfg: &ExperimentConfig) -> Result<()> {
    if cfg.magnifications.is_empty() {
        return Err(Error::InvalidConfig("magnification list is empty".into()));
    }
    if !(cfg.a.is_finite() && cfg.a > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "window rate a must be positive and finite, got {}",
            cfg.a
        )));
    }
    if cfg.grid_step <= 0.0 || !cfg.grid_step.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "grid step must be positive and finite, got {}",
            cfg.grid_step
        )));
    }
    if let Some(theta) = cfg.theta {
        if !theta.is_finite() {
            return Err(Error::InvalidConfig("theta must be finite".into()));
        }
    }
    match cfg.experiment {
        Experiment::Custom | Experiment::Fig3AmplitudeSweep => {
            let has_pair = cfg.psi_seed.is_some() && cfg.phi_seed.is_some();
            if cfg.theta.is_none() && !has_pair {
                return Err(Error::InvalidConfig(
                    "provide either theta or both psi_seed and phi_seed".into(),
                ));
            }
        }
        Experiment::Fig5PauliObservable => {
            if cfg.pauli.is_none() {
                return Err(Error::InvalidConfig("fig5 requires a pauli word".into()));
            }
            if cfg.theta.is_none() {
                return Err(Error::InvalidConfig("fig5 requires theta".into()));
            }
        }
        Experiment::Fig6CutoffSweep => {
            let sweep = cfg
                .t_sweep
                .as_ref()
                .ok_or_else(|| Error::InvalidConfig("fig6 requires t_sweep".into()))?;
            if sweep.is_empty() || sweep.windows(2).any(|w| w[1] >= w[0]) {
                return Err(Error::InvalidConfig(
                    "t_sweep must be non-empty and strictly descending".into(),
                ));
            }
        }
        Experiment::Fig7ShotNoise => {
            if cfg.n_shot == 0 || cfg.repetitions == 0 {
                return Err(Error::InvalidConfig(
                    "fig7 requires n_shot > 0 and repetitions > 0".into(),
                ));
            }
        }
        Experiment::Fig8CircuitNoise => {
            if cfg.epsilons.is_empty() || cfg.trajectories == 0 {
                return Err(Error::InvalidConfig(
                    "fig8 requires a non-empty epsilon list and trajectories > 0".into(),
                ));
            }
            if cfg.magnifications.len() != 1 {
                return Err(Error::InvalidConfig(
                    "fig8 uses exactly one magnification".into(),
                ));
            }
        }
        _ => {}
    }
    Ok(())
}

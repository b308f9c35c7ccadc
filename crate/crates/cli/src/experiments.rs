//! Figure experiments: each runner sweeps its pipeline, writes plot-ready
//! CSV + JSON artifacts through an [`ArtifactSink`], and returns summary
//! lines for stdout.

use std::f64::consts::TAU;
use std::path::Path;

use serde::Serialize;

use qae_core::acquire::{acquire_series, AcquisitionConfig, AcquisitionMode, InitialState};
use qae_core::bounds::optimal_magnifications;
use qae_core::gates;
use qae_core::grover::{build_amplifier, Amplifier, StatePrep};
use qae_core::io::fmt_f64;
use qae_core::noise::{mix_seed, noisy_spectrum_study, NoiseConfig};
use qae_core::observable::{
    estimate_observable, pauli_phi_prep, ObservableSpec, ObservableTerm, PauliString,
};
use qae_core::spectrum::{
    compute_spectrum, find_peaks, find_peaks_with, ladder_refine, FloorPolicy, GridSpec,
    PeakSearchOptions, RungReport,
};
use qae_core::statevec::{Circuit, GateOp};
use qae_core::{Error, Result};

use crate::config::{validate, Experiment, ExperimentConfig, ModeArg};
use crate::manifest::{ArtifactSink, RunManifest};

pub fn wrap_2pi(x: f64) -> f64 {
    x.rem_euclid(TAU)
}

pub fn circ_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Circular mean and standard deviation (in radians) of angle samples.
fn circular_stats(xs: &[f64]) -> (f64, f64) {
    let (mut s, mut c) = (0.0, 0.0);
    for &x in xs {
        s += x.sin();
        c += x.cos();
    }
    let n = xs.len() as f64;
    let mean = wrap_2pi(s.atan2(c));
    let r = ((s / n).powi(2) + (c / n).powi(2))
        .sqrt()
        .clamp(1e-300, 1.0);
    (mean, (-2.0 * r.ln()).sqrt())
}

/// Builds the state pair: a planted-angle pair when `theta` is set, a seeded
/// random-circuit pair otherwise.
pub(crate) fn make_pair(cfg: &ExperimentConfig) -> Result<(StatePrep, StatePrep)> {
    match (cfg.theta, cfg.psi_seed, cfg.phi_seed) {
        (Some(theta), None, None) => StatePrep::theta_pair(cfg.qubits.max(1), theta),
        (None, Some(ps), Some(fs)) => Ok((
            StatePrep::random(cfg.qubits, cfg.depth, ps)?,
            StatePrep::random(cfg.qubits, cfg.depth, fs)?,
        )),
        (Some(_), Some(_), _) | (Some(_), _, Some(_)) => Err(Error::InvalidConfig(
            "theta and state-pair seeds are mutually exclusive".into(),
        )),
        _ => Err(Error::InvalidConfig(
            "provide either theta or both psi_seed and phi_seed".into(),
        )),
    }
}

/// Base acquisition config for the requested mode at magnification 1.
pub(crate) fn base_config(cfg: &ExperimentConfig) -> Result<AcquisitionConfig> {
    let base = match cfg.mode {
        ModeArg::Exact => AcquisitionConfig::exact_overlap(1, cfg.t_max, cfg.a)?,
        ModeArg::Probability => AcquisitionConfig::probability(1, cfg.t_max, cfg.a)?,
        ModeArg::Hadamard => {
            let mut c = AcquisitionConfig::exact_overlap(1, cfg.t_max, cfg.a)?;
            c.mode = AcquisitionMode::HadamardTest;
            c
        }
    };
    Ok(if cfg.n_shot > 0 {
        base.with_shots(cfg.n_shot, cfg.seed)
    } else {
        base
    })
}

/// The planted six-qubit observable state: uniform superposition on the
/// leading qubits and a `y`-rotation by `theta` on the probe qubit, leaving
/// the last qubit in `|0>`.
pub fn observable_state(qubits: usize, theta: f64) -> Result<StatePrep> {
    if qubits < 2 {
        return Err(Error::InvalidConfig(
            "the observable state needs at least 2 qubits".into(),
        ));
    }
    let mut circuit = Circuit::new(qubits)?;
    for q in 0..qubits.saturating_sub(2) {
        circuit.push(GateOp::Single {
            target: q,
            matrix: gates::h(),
        })?;
    }
    circuit.push(GateOp::Single {
        target: qubits - 2,
        matrix: gates::ry(theta),
    })?;
    Ok(StatePrep::from_circuit(
        circuit,
        format!("rotated-probe state on {qubits} qubits"),
    ))
}

pub fn run_experiment(cfg: &ExperimentConfig, out: &Path) -> Result<(RunManifest, Vec<String>)> {
    validate(cfg)?;
    let mut sink = ArtifactSink::new(out)?;
    let lines = match cfg.experiment {
        Experiment::Fig3AmplitudeSweep => fig3(cfg, &mut sink)?,
        Experiment::Fig4RandomStates => fig4(cfg, &mut sink)?,
        Experiment::Fig5PauliObservable => fig5(cfg, &mut sink)?,
        Experiment::Fig6CutoffSweep => fig6(cfg, &mut sink)?,
        Experiment::Fig7ShotNoise => fig7(cfg, &mut sink)?,
        Experiment::Fig8CircuitNoise => fig8(cfg, &mut sink)?,
        Experiment::Custom => custom(cfg, &mut sink)?,
    };
    let mut resolved = cfg.clone();
    resolved.out_dir = Some(out.display().to_string());
    let manifest = sink.finish(&resolved)?;
    Ok((manifest, lines))
}

// ---------------------------------------------------------------------------
// fig3: overlap-mode magnification sweep
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct SweepPeakRow {
    m: i64,
    x_peak: f64,
    height: f64,
    target: f64,
    abs_err: f64,
}

fn fig3(cfg: &ExperimentConfig, sink: &mut ArtifactSink) -> Result<Vec<String>> {
    let (psi, phi) = make_pair(cfg)?;
    let amp = build_amplifier(&psi, &phi)?;
    let theta = amp.theta_true();
    let grid = GridSpec::principal(cfg.grid_step)?;
    let mut rows = Vec::new();
    for &m in &cfg.magnifications {
        let series = acquire_series(
            &amp,
            &AcquisitionConfig::exact_overlap(m, cfg.t_max, cfg.a)?,
        )?;
        let spectrum = compute_spectrum(&series, &grid)?;
        sink.write_spectrum(&format!("spectrum_m{m:02}.csv"), &spectrum)?;
        let peaks = find_peaks(&spectrum, false)?;
        let target = wrap_2pi(2.0 * m as f64 * theta);
        // The overlap spectrum carries a line at the mirror position
        // 2*pi - target as well; the row tracks the line at the target.
        let tracked = peaks
            .iter()
            .min_by(|p, q| {
                circ_dist(p.x_peak, target)
                    .partial_cmp(&circ_dist(q.x_peak, target))
                    .expect("finite peak distances")
            })
            .expect("find_peaks returned at least one peak");
        rows.push(SweepPeakRow {
            m,
            x_peak: tracked.x_peak,
            height: tracked.height,
            target,
            abs_err: circ_dist(tracked.x_peak, target),
        });
    }
    sink.write_json("peaks.json", &rows)?;
    let mut csv = String::from("m,x_peak,target,abs_err,height\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            r.m,
            fmt_f64(r.x_peak),
            fmt_f64(r.target),
            fmt_f64(r.abs_err),
            fmt_f64(r.height)
        ));
    }
    sink.write_text("summary.csv", &csv)?;
    let worst = rows.iter().map(|r| r.abs_err).fold(0.0, f64::max);
    Ok(vec![
        format!("theta = {theta}"),
        format!("magnifications = {:?}", cfg.magnifications),
        format!("max peak-position error = {worst:.3e} rad"),
    ])
}

// ---------------------------------------------------------------------------
// fig4: random state pairs through the refinement ladder
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct PairRow {
    pair: u32,
    psi_seed: u64,
    phi_seed: u64,
    theta_hat: f64,
    theta_exact: f64,
    theta_abs_err: f64,
    amplitude_hat: f64,
    amplitude_exact: f64,
    amplitude_abs_err: f64,
    half_width: f64,
    rungs: Vec<RungReport>,
}

fn fig4(cfg: &ExperimentConfig, sink: &mut ArtifactSink) -> Result<Vec<String>> {
    let base = AcquisitionConfig::exact_overlap(1, cfg.t_max, cfg.a)?;
    let grid = GridSpec::principal(cfg.grid_step)?;
    let last_m = *cfg.magnifications.last().unwrap();
    let mut rows = Vec::new();
    for pair in 0..cfg.pairs {
        let psi_seed = cfg.pair_seed_base + 2 * pair as u64;
        let phi_seed = psi_seed + 1;
        let psi = StatePrep::random(cfg.qubits, cfg.depth, psi_seed)?;
        let phi = StatePrep::random(cfg.qubits, cfg.depth, phi_seed)?;
        let amp = build_amplifier(&psi, &phi)?;
        let magnitude = amp.overlap().norm();
        let estimate = ladder_refine(&amp, &base, &cfg.magnifications, cfg.grid_step)?;

        let series = acquire_series(
            &amp,
            &AcquisitionConfig::exact_overlap(last_m, cfg.t_max, cfg.a)?,
        )?;
        let spectrum = compute_spectrum(&series, &grid)?;
        sink.write_spectrum(&format!("spectrum_pair{pair}_m{last_m:02}.csv"), &spectrum)?;

        let amplitude_hat = estimate.theta_hat.cos().powi(2);
        let amplitude_exact = magnitude.powi(2);
        rows.push(PairRow {
            pair,
            psi_seed,
            phi_seed,
            theta_hat: estimate.theta_hat,
            theta_exact: magnitude.clamp(-1.0, 1.0).acos(),
            theta_abs_err: (estimate.theta_hat - magnitude.clamp(-1.0, 1.0).acos()).abs(),
            amplitude_hat,
            amplitude_exact,
            amplitude_abs_err: (amplitude_hat - amplitude_exact).abs(),
            half_width: estimate.half_width,
            rungs: estimate.rungs,
        });
    }
    sink.write_json("estimates.json", &rows)?;
    let mut csv = String::from(
        "pair,psi_seed,phi_seed,theta_hat,theta_exact,theta_abs_err,amplitude_hat,amplitude_exact,amplitude_abs_err\n",
    );
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.pair,
            r.psi_seed,
            r.phi_seed,
            fmt_f64(r.theta_hat),
            fmt_f64(r.theta_exact),
            fmt_f64(r.theta_abs_err),
            fmt_f64(r.amplitude_hat),
            fmt_f64(r.amplitude_exact),
            fmt_f64(r.amplitude_abs_err)
        ));
    }
    sink.write_text("summary.csv", &csv)?;
    let worst_t = rows.iter().map(|r| r.theta_abs_err).fold(0.0, f64::max);
    let worst_a = rows.iter().map(|r| r.amplitude_abs_err).fold(0.0, f64::max);
    Ok(vec![
        format!("pairs = {}", rows.len()),
        format!("max |theta_hat - theta_exact| = {worst_t:.3e}"),
        format!("max amplitude error = {worst_a:.3e}"),
    ])
}

// ---------------------------------------------------------------------------
// fig5: Pauli observable in probability mode
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct ObservablePeakRow {
    m: i64,
    /// Highest surviving peak after DC exclusion (absent at m = 0).
    x_peak: Option<f64>,
    target: Option<f64>,
    abs_err: Option<f64>,
    dc_height: f64,
}

fn fig5(cfg: &ExperimentConfig, sink: &mut ArtifactSink) -> Result<Vec<String>> {
    let theta_cfg = cfg.theta.expect("validated");
    let word = cfg.pauli.as_deref().expect("validated");
    let pauli = PauliString::parse(word)?;
    let psi = observable_state(cfg.qubits, theta_cfg)?;
    let phi = pauli_phi_prep(&psi, &pauli)?;
    let amp = build_amplifier(&psi, &phi)?;
    let theta = amp.theta_true();
    let grid = GridSpec::principal(cfg.grid_step)?;

    let mut rows = Vec::new();
    for &m in &cfg.magnifications {
        let series = acquire_series(&amp, &AcquisitionConfig::probability(m, cfg.t_max, cfg.a)?)?;
        let spectrum = compute_spectrum(&series, &grid)?;
        sink.write_spectrum(&format!("spectrum_m{m:+03}.csv"), &spectrum)?;
        let dc_height = find_peaks(&spectrum, false)?[0].height;
        if m == 0 {
            rows.push(ObservablePeakRow {
                m,
                x_peak: None,
                target: None,
                abs_err: None,
                dc_height,
            });
            continue;
        }
        let top = &find_peaks(&spectrum, true)?[0];
        let target = wrap_2pi(4.0 * m as f64 * theta);
        let abs_err = circ_dist(top.x_peak, target).min(circ_dist(top.x_peak, TAU - target));
        rows.push(ObservablePeakRow {
            m,
            x_peak: Some(top.x_peak),
            target: Some(target),
            abs_err: Some(abs_err),
            dc_height,
        });
    }
    sink.write_json("peaks.json", &rows)?;

    let spec = ObservableSpec::new(vec![ObservableTerm {
        coeff: 1.0,
        pauli: pauli.clone(),
    }])?;
    // The estimate routes through overlap acquisition: a real-valued
    // probability series has equal-height mirror lines at every
    // magnification, which leaves theta and pi/2 - theta indistinguishable.
    let base = AcquisitionConfig::exact_overlap(1, cfg.t_max, cfg.a)?;
    let estimate = estimate_observable(&psi, &spec, &base, &[1, 6], cfg.grid_step)?;
    sink.write_json("observable.json", &estimate)?;

    let mut csv = String::from("m,x_peak,target,abs_err,dc_height\n");
    for r in &rows {
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            r.m,
            opt(r.x_peak),
            opt(r.target),
            opt(r.abs_err),
            fmt_f64(r.dc_height)
        ));
    }
    sink.write_text("summary.csv", &csv)?;
    let worst = rows.iter().filter_map(|r| r.abs_err).fold(0.0, f64::max);
    Ok(vec![
        format!("pauli = {word}, theta = {theta}"),
        format!("estimated expectation = {}", estimate.value),
        format!("max peak-position error (m != 0) = {worst:.3e} rad"),
    ])
}

// ---------------------------------------------------------------------------
// fig6: window-cutoff sweep
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct CutoffRow {
    t_max: u32,
    x_peak: f64,
    height: f64,
}

fn fig6(cfg: &ExperimentConfig, sink: &mut ArtifactSink) -> Result<Vec<String>> {
    let (psi, phi) = make_pair(cfg)?;
    let amp = build_amplifier(&psi, &phi)?;
    let m = cfg.magnifications[0];
    let grid = GridSpec::principal(cfg.grid_step)?;
    let opts = PeakSearchOptions {
        floor: FloorPolicy::None,
        zero_exclusion_half_width: None,
    };
    let mut rows = Vec::new();
    for &t_max in cfg.t_sweep.as_ref().expect("validated") {
        let acq = AcquisitionConfig::exact_overlap(m, t_max, cfg.a)?
            .with_initial_state(InitialState::YMinusExact);
        let series = acquire_series(&amp, &acq)?;
        let spectrum = compute_spectrum(&series, &grid)?;
        sink.write_spectrum(&format!("spectrum_T{t_max:02}.csv"), &spectrum)?;
        let top = &find_peaks_with(&spectrum, &opts)?[0];
        rows.push(CutoffRow {
            t_max,
            x_peak: top.x_peak,
            height: top.height,
        });
    }
    sink.write_json("peaks.json", &rows)?;
    let mut csv = String::from("t_max,x_peak,height\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{}\n",
            r.t_max,
            fmt_f64(r.x_peak),
            fmt_f64(r.height)
        ));
    }
    sink.write_text("summary.csv", &csv)?;
    let spread = rows
        .iter()
        .map(|r| r.x_peak)
        .fold(f64::NEG_INFINITY, f64::max)
        - rows.iter().map(|r| r.x_peak).fold(f64::INFINITY, f64::min);
    let decreasing = rows.windows(2).all(|w| w[1].height < w[0].height);
    Ok(vec![
        format!("t_sweep = {:?}", cfg.t_sweep.as_ref().unwrap()),
        format!("peak-position spread = {spread:.3e} rad"),
        format!("heights strictly decreasing = {decreasing}"),
    ])
}

// ---------------------------------------------------------------------------
// fig7: shot-noise spread across magnifications
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct SpreadRow {
    m: i64,
    /// Nearest integer `n` in the residual `|2 m t theta - n pi|`.
    n: i64,
    residual: f64,
    spread_rad: f64,
    mean_x: f64,
}

fn fig7(cfg: &ExperimentConfig, sink: &mut ArtifactSink) -> Result<Vec<String>> {
    let theta = cfg
        .theta
        .ok_or_else(|| Error::InvalidConfig("fig7 requires theta".into()))?;
    let (psi, phi) = StatePrep::theta_pair(cfg.qubits.max(2), theta)?;
    let amp = build_amplifier(&psi, &phi)?;
    let m_max = *cfg.magnifications.iter().max().unwrap();
    let candidates = optimal_magnifications(theta, cfg.t_max, m_max, None)?;
    sink.write_json("optimal.json", &candidates)?;

    let grid = GridSpec::principal(cfg.grid_step)?;
    let opts = PeakSearchOptions {
        floor: FloorPolicy::None,
        zero_exclusion_half_width: None,
    };
    let mut rows = Vec::new();
    let mut example_written = false;
    for &m in &cfg.magnifications {
        let mut positions = Vec::with_capacity(cfg.repetitions as usize);
        for rep in 0..cfg.repetitions {
            let seed = mix_seed(cfg.seed, ((m as u64) << 32) | rep as u64);
            let mut acq = AcquisitionConfig::exact_overlap(m, cfg.t_max, cfg.a)?
                .with_initial_state(InitialState::YMinusExact)
                .with_shots(cfg.n_shot, seed)
                .with_infer_beta(true);
            acq.mode = AcquisitionMode::HadamardTest;
            let series = acquire_series(&amp, &acq)?;
            let spectrum = compute_spectrum(&series, &grid)?;
            if !example_written && Some(&m) == candidates.first().map(|c| &c.m) {
                sink.write_spectrum(&format!("spectrum_best_m{m:02}_rep0.csv"), &spectrum)?;
                example_written = true;
            }
            positions.push(find_peaks_with(&spectrum, &opts)?[0].x_peak);
        }
        let (mean_x, spread_rad) = circular_stats(&positions);
        let cand = candidates.iter().find(|c| c.m == m);
        rows.push(SpreadRow {
            m,
            n: cand.map_or(0, |c| c.n),
            residual: cand.map_or(f64::NAN, |c| c.residual),
            spread_rad,
            mean_x,
        });
    }
    sink.write_json("spread.json", &rows)?;
    let mut csv = String::from("m,n,residual,spread_rad,mean_x\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            r.m,
            r.n,
            fmt_f64(r.residual),
            fmt_f64(r.spread_rad),
            fmt_f64(r.mean_x)
        ));
    }
    sink.write_text("summary.csv", &csv)?;
    let best = rows
        .iter()
        .min_by(|a, b| a.residual.partial_cmp(&b.residual).unwrap())
        .unwrap();
    let worst = rows
        .iter()
        .max_by(|a, b| a.residual.partial_cmp(&b.residual).unwrap())
        .unwrap();
    Ok(vec![
        format!(
            "best residual m = {} (residual {:.4}, spread {:.4} rad)",
            best.m, best.residual, best.spread_rad
        ),
        format!(
            "worst residual m = {} (residual {:.4}, spread {:.4} rad)",
            worst.m, worst.residual, worst.spread_rad
        ),
    ])
}

// ---------------------------------------------------------------------------
// fig8: depolarizing-noise sweep
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct NoiseRow {
    epsilon: f64,
    x_peak: f64,
    /// Display convention of this experiment: the sweep's target line sits
    /// four turns up the unwrapped frequency axis.
    x_peak_plus_8pi: f64,
    height: f64,
    height_stderr: f64,
}

fn fig8(cfg: &ExperimentConfig, sink: &mut ArtifactSink) -> Result<Vec<String>> {
    let (psi, phi) = make_pair(cfg)?;
    let amp = build_amplifier(&psi, &phi)?;
    let m = cfg.magnifications[0];
    let x0 = wrap_2pi(2.0 * m as f64 * amp.theta_true());
    let grid = GridSpec::around(x0, 0.75, cfg.grid_step)?;
    let noise =
        NoiseConfig::new(cfg.epsilons[0], cfg.trajectories, cfg.seed)?.with_label_average(true);
    let base = AcquisitionConfig::exact_overlap(m, cfg.t_max, cfg.a)?.with_noise(noise);
    let study = noisy_spectrum_study(&amp, &base, &cfg.epsilons, &grid)?;

    let mut rows = Vec::new();
    for (i, row) in study.rows.iter().enumerate() {
        let tag = format!("eps{:.3}", row.epsilon);
        sink.write_series(&format!("series_{tag}.csv"), &study.series[i].1)?;
        sink.write_spectrum(&format!("spectrum_{tag}.csv"), &study.spectra[i].1)?;
        rows.push(NoiseRow {
            epsilon: row.epsilon,
            x_peak: row.x_peak,
            x_peak_plus_8pi: row.x_peak + 4.0 * TAU,
            height: row.height,
            height_stderr: row.height_stderr,
        });
    }
    sink.write_json("noise_summary.json", &rows)?;
    let mut csv = String::from("epsilon,x_peak,x_peak_plus_8pi,height,height_stderr\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_f64(r.epsilon),
            fmt_f64(r.x_peak),
            fmt_f64(r.x_peak_plus_8pi),
            fmt_f64(r.height),
            fmt_f64(r.height_stderr)
        ));
    }
    sink.write_text("summary.csv", &csv)?;
    let max_shift = rows
        .iter()
        .map(|r| (r.x_peak - rows[0].x_peak).abs())
        .fold(0.0, f64::max);
    Ok(vec![
        format!("magnification = {m}, window center x = {x0}"),
        format!("epsilons = {:?}", cfg.epsilons),
        format!("max peak shift across the sweep = {max_shift:.3e} rad"),
    ])
}

// ---------------------------------------------------------------------------
// custom: single estimation through the ladder
// ---------------------------------------------------------------------------

/// Shared by the custom experiment and the `estimate` subcommand.
pub fn run_ladder(cfg: &ExperimentConfig, amp: &Amplifier) -> Result<CustomEstimateOutput> {
    let base = base_config(cfg)?;
    let estimate = ladder_refine(amp, &base, &cfg.magnifications, cfg.grid_step)?;
    Ok(CustomEstimateOutput {
        theta_hat: estimate.theta_hat,
        half_width: estimate.half_width,
        amplitude: estimate.theta_hat.cos().powi(2),
        magnification: estimate.magnification,
        rungs: estimate.rungs,
    })
}

/// Public shape of a single-estimation result.
#[derive(Serialize)]
pub struct CustomEstimateOutput {
    pub theta_hat: f64,
    pub half_width: f64,
    /// Squared overlap `cos^2(theta_hat)`.
    pub amplitude: f64,
    pub magnification: i64,
    pub rungs: Vec<RungReport>,
}

fn custom(cfg: &ExperimentConfig, sink: &mut ArtifactSink) -> Result<Vec<String>> {
    let (psi, phi) = make_pair(cfg)?;
    let amp = build_amplifier(&psi, &phi)?;
    let out = run_ladder(cfg, &amp)?;

    let last_m = *cfg.magnifications.last().unwrap();
    let mut acq = base_config(cfg)?;
    acq.magnification = last_m;
    let series = acquire_series(&amp, &acq)?;
    let spectrum = compute_spectrum(&series, &GridSpec::principal(cfg.grid_step)?)?;
    sink.write_spectrum(&format!("spectrum_m{last_m:02}.csv"), &spectrum)?;

    sink.write_json("estimate.json", &out)?;
    let csv = format!(
        "theta_hat,half_width,amplitude,magnification\n{},{},{},{}\n",
        fmt_f64(out.theta_hat),
        fmt_f64(out.half_width),
        fmt_f64(out.amplitude),
        out.magnification
    );
    sink.write_text("summary.csv", &csv)?;
    Ok(vec![
        format!("theta_hat = {}", out.theta_hat),
        format!("amplitude = {}", out.amplitude),
        format!("half_width = {}", out.half_width),
    ])
}

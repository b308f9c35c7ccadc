//! Non-experiment subcommands: single estimations, observable files, bound
//! evaluation, and the self-check suite.

use std::f64::consts::TAU;
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use qae_core::acquire::{acquire_series, AcquisitionConfig, AcquisitionMode};
use qae_core::bounds::{bounds_report, cutoff_bound, BoundsReport};
use qae_core::gates;
use qae_core::grover::{build_amplifier, build_reflector, StatePrep};
use qae_core::io::read_text;
use qae_core::observable::{estimate_observable, ObservableSpec};
use qae_core::oracle;
use qae_core::spectrum::{
    analytic_spectrum_periodic, analytic_spectrum_t1, compute_spectrum, GridSpec,
};
use qae_core::statevec::{Circuit, GateOp, Ket};
use qae_core::Result;

use crate::config::ExperimentConfig;
use crate::experiments::{make_pair, run_ladder};

/// Runs a single custom estimation and prints the result.
pub fn estimate(cfg: &ExperimentConfig, json: bool) -> Result<()> {
    let (psi, phi) = make_pair(cfg)?;
    let amp = build_amplifier(&psi, &phi)?;
    let out = run_ladder(cfg, &amp)?;
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&out).expect("serializable output")
        );
    } else {
        println!("theta_hat = {}", out.theta_hat);
        println!("amplitude = {}", out.amplitude);
        println!("half_width = {}", out.half_width);
        println!("magnification = {}", out.magnification);
    }
    Ok(())
}

/// State source for the observable command.
pub enum ObservableState {
    Seeded { seed: u64, depth: usize },
    Probe { theta: f64 },
}

/// Estimates every term of an observable file against a prepared state.
pub fn observable(
    spec_path: &Path,
    state: ObservableState,
    cfg: &ExperimentConfig,
    json: bool,
) -> Result<()> {
    let text = read_text(spec_path)?;
    let spec = ObservableSpec::parse_text(&text)?;
    let qubits = spec.n_qubits();
    let psi = match state {
        ObservableState::Seeded { seed, depth } => StatePrep::random(qubits, depth, seed)?,
        ObservableState::Probe { theta } => crate::experiments::observable_state(qubits, theta)?,
    };
    let base = crate::experiments::base_config(cfg)?;
    let estimate = estimate_observable(&psi, &spec, &base, &cfg.magnifications, cfg.grid_step)?;
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&estimate).expect("serializable output")
        );
        return Ok(());
    }
    for (i, term) in estimate.terms.iter().enumerate() {
        println!(
            "term {:02}: {:+} * {} = {}  (contribution {}, route {:?})",
            i + 1,
            term.coeff,
            term.pauli,
            term.estimate.value,
            term.contribution,
            term.estimate.route,
        );
    }
    println!("total = {}", estimate.value);
    println!("sign_ambiguous = {}", estimate.sign_ambiguous);
    Ok(())
}

/// Evaluates the truncation bounds for a window.
pub fn bounds(a: f64, t_max: u32, eps: &[f64], json: bool) -> Result<()> {
    let report: BoundsReport = bounds_report(a, t_max, eps)?;
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("serializable output")
        );
        return Ok(());
    }
    println!("a = {}", report.a);
    println!("t_max = {}", report.t_max);
    println!("gaussian_bound = {}", report.gaussian_bound);
    println!("erfc_bound = {}", report.erfc_bound);
    for entry in &report.min_t {
        println!("min_t for eps {} = {}", entry.eps, entry.t_max);
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// validate: self-check suite
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct CheckResult {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn random_single(rng: &mut ChaCha8Rng, target: usize) -> GateOp {
    let matrix = match rng.gen_range(0..6) {
        0 => gates::h(),
        1 => gates::x(),
        2 => gates::ry(rng.gen_range(-3.0..3.0)),
        3 => gates::rz(rng.gen_range(-3.0..3.0)),
        4 => gates::rx(rng.gen_range(-3.0..3.0)),
        _ => gates::phase(rng.gen_range(-3.0..3.0)),
    };
    GateOp::Single { target, matrix }
}

fn random_subset(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    let mut picked: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.gen_range(i..n);
        picked.swap(i, j);
    }
    picked.truncate(k);
    picked
}

fn random_circuit(rng: &mut ChaCha8Rng, n: usize, depth: usize) -> Result<Circuit> {
    let mut circuit = Circuit::new(n)?;
    for _ in 0..depth {
        let target = rng.gen_range(0..n);
        let op = if n == 1 {
            random_single(rng, target)
        } else {
            match rng.gen_range(0..4) {
                0 | 1 => random_single(rng, target),
                2 => {
                    let pair = random_subset(rng, n, 2);
                    GateOp::Cnot {
                        control: pair[0],
                        target: pair[1],
                    }
                }
                _ => {
                    let k = rng.gen_range(2..=n);
                    let mut subset = random_subset(rng, n, k);
                    let target = subset.pop().expect("k >= 2");
                    if rng.gen_bool(0.5) {
                        GateOp::Mcz {
                            controls: subset,
                            target,
                        }
                    } else {
                        GateOp::Mcx {
                            controls: subset,
                            target,
                        }
                    }
                }
            }
        };
        circuit.push(op)?;
    }
    Ok(circuit)
}

fn random_ket(rng: &mut ChaCha8Rng, n: usize) -> Result<Ket> {
    let dim = 1usize << n;
    let amps: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    Ket::from_amplitudes(amps.into_iter().map(|c| c / norm).collect())
}

fn check_dense_oracle() -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x51ab);
    let mut max_err = 0.0f64;
    for case in 0..100 {
        let n = 1 + case % 3;
        let circuit = random_circuit(&mut rng, n, 12)?;
        let initial = random_ket(&mut rng, n)?;
        max_err = max_err.max(oracle::kernel_vs_dense(&circuit, &initial)?);
    }
    Ok(CheckResult {
        name: "simulator matches the dense-matrix oracle",
        passed: max_err <= 1e-10,
        detail: format!("100 random circuits (n <= 3), max amplitude error = {max_err:.2e}"),
    })
}

fn check_rotation_invariants() -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x17e5);
    let mut max_err = 0.0f64;
    for k in 0..10u64 {
        let psi = StatePrep::random(3, 6, 1500 + 2 * k)?;
        let phi = StatePrep::random(3, 6, 1501 + 2 * k)?;

        let reflector = build_reflector(&psi)?;
        let mut reflected = psi.prepare()?;
        reflected.apply_circuit(reflector.circuit())?;
        for (a, b) in reflected
            .amplitudes()
            .iter()
            .zip(psi.prepare()?.amplitudes())
        {
            max_err = max_err.max((a + b).norm());
        }
        let mut twice = random_ket(&mut rng, 3)?;
        let before = twice.clone();
        twice.apply_circuit(reflector.circuit())?;
        twice.apply_circuit(reflector.circuit())?;
        for (a, b) in twice.amplitudes().iter().zip(before.amplitudes()) {
            max_err = max_err.max((a - b).norm());
        }

        let amp = build_amplifier(&psi, &phi)?;
        let basis = amp.subspace_basis()?;
        for (ket, sign) in [(&basis.y_plus, 1.0), (&basis.y_minus, -1.0)] {
            let mut rotated = ket.clone();
            amp.apply_power(&mut rotated, 1)?;
            let phase = Complex64::from_polar(1.0, sign * 2.0 * amp.theta_true());
            for (a, b) in rotated.amplitudes().iter().zip(ket.amplitudes()) {
                max_err = max_err.max((a - phase * b).norm());
            }
        }
    }
    Ok(CheckResult {
        name: "reflection and eigenphase invariants",
        passed: max_err <= 1e-8,
        detail: format!("10 random 3-qubit pairs, max residual = {max_err:.2e}"),
    })
}

fn check_closed_form() -> Result<CheckResult> {
    let draws = [
        (0.6, 2, 0.05, AcquisitionMode::ExactOverlap),
        (1.1, 4, 0.04, AcquisitionMode::DirectProbability),
        (0.3, 7, 0.035, AcquisitionMode::ExactOverlap),
        (1.4, 3, 0.08, AcquisitionMode::DirectProbability),
        (0.9, 1, 0.06, AcquisitionMode::ExactOverlap),
        (0.45, 6, 0.07, AcquisitionMode::DirectProbability),
    ];
    let t_max = 60;
    let grid = GridSpec::principal(5e-3)?;
    let mut worst_ratio = 0.0f64;
    for (theta, m, a, mode) in draws {
        let (psi, phi) = StatePrep::theta_pair(2, theta)?;
        let amp = build_amplifier(&psi, &phi)?;
        let mut cfg = AcquisitionConfig::exact_overlap(m, t_max, a)?;
        cfg.mode = mode;
        let series = acquire_series(&amp, &cfg)?;
        let spectrum = compute_spectrum(&series, &grid)?;
        let bound = cutoff_bound(a, t_max)?;
        let scale = if matches!(mode, AcquisitionMode::DirectProbability) {
            4.0
        } else {
            2.0
        };
        let images = (scale * m as f64 * theta / TAU).ceil() as u32 + 2;
        let mut max_err = 0.0f64;
        for (x, v) in spectrum.xs().iter().zip(spectrum.values()) {
            let reference = analytic_spectrum_periodic(*x, m, theta, a, mode, images);
            max_err = max_err.max((v.re - reference).abs()).max(v.im.abs());
        }
        worst_ratio = worst_ratio.max(max_err / bound);
    }
    Ok(CheckResult {
        name: "spectra match the periodized closed forms",
        passed: worst_ratio <= 1.0,
        detail: format!("6 parameter draws, worst error/bound ratio = {worst_ratio:.3}"),
    })
}

fn check_single_step_identity() -> Result<CheckResult> {
    let combos = [(1i64, 0.6, 0.07), (3, 1.2, 0.05)];
    let grid = GridSpec::principal(2e-3)?;
    let mut max_err = 0.0f64;
    for (m, theta, a) in combos {
        let (psi, phi) = StatePrep::theta_pair(2, theta)?;
        let amp = build_amplifier(&psi, &phi)?;
        let cfg = AcquisitionConfig::exact_overlap(m, 1, a)?
            .with_initial_state(qae_core::acquire::InitialState::YMinusExact);
        let series = acquire_series(&amp, &cfg)?;
        let spectrum = compute_spectrum(&series, &grid)?;
        for (x, v) in spectrum.xs().iter().zip(spectrum.values()) {
            let reference = analytic_spectrum_t1(*x, m, theta, a);
            max_err = max_err.max((v.re - reference).abs()).max(v.im.abs());
        }
    }
    Ok(CheckResult {
        name: "single-step window identity",
        passed: max_err <= 1e-12,
        detail: format!("max pointwise error = {max_err:.2e}"),
    })
}

/// Runs the oracle-equivalence suite and returns the number of failed
/// checks (the caller maps failures to a pipeline exit).
pub fn validate(json: bool) -> Result<usize> {
    let checks = vec![
        check_dense_oracle()?,
        check_rotation_invariants()?,
        check_closed_form()?,
        check_single_step_identity()?,
    ];
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&checks).expect("serializable output")
        );
    } else {
        for c in &checks {
            println!(
                "check: {} — {} ({})",
                if c.passed { "ok" } else { "FAILED" },
                c.name,
                c.detail
            );
        }
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed == 0 && !json {
        println!("all {} checks passed", checks.len());
    }
    Ok(failed)
}

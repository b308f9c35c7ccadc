//! Two-qubit depolarizing gate noise.
//!
//! The noise model attaches a fault to every CNOT of a decomposed circuit:
//! with probability `epsilon`, a Pauli pair drawn uniformly from the sixteen
//! `P (x) Q` (identity included) hits the CNOT's qubits after the gate. Two
//! consumers sit on top:
//!
//! * trajectory sampling ([`noisy_apply_circuit`]), whose empirical averages
//!   converge to the depolarizing channel, and
//! * an exact [`DensityMatrix`] evolution ([`density_matrix_reference`]) used
//!   to validate those averages on small registers.
//!
//! For mean-overlap estimates only, a trajectory may instead apply the label
//! average `(I + X + Y + Z)/4` on both qubits at each sampled fault site.
//! This replaces the uniform Pauli label draw by its expectation, which is
//! unbiased for any functional linear in the evolved state and removes the
//! label-sampling variance (fault positions are still sampled). It is not a
//! physical state evolution, and it is rejected for probability or shot-based
//! quantities, which are nonlinear in the state.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::acquire::{acquire_half_series, symmetrize, AcquisitionConfig, SignalSeries};
use crate::error::{Error, Result};
use crate::gates::{self, Mat2};
use crate::grover::Amplifier;
use crate::spectrum::{self, FloorPolicy, GridSpec, PeakSearchOptions, SpectrumGrid};
use crate::statevec::{Circuit, GateOp, Ket};

/// Depolarizing-noise parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    /// Fault probability per two-qubit gate, in `[0, 1]`.
    pub epsilon: f64,
    /// Trajectories averaged per reported value.
    #[serde(default = "default_trajectories")]
    pub trajectories: u32,
    /// Base seed; each (direction, trajectory) pair derives its own stream.
    pub seed: u64,
    /// Replace sampled Pauli labels by their average at each fault site.
    /// Valid only for mean-overlap estimates; see the module docs.
    #[serde(default)]
    pub label_average: bool,
}

fn default_trajectories() -> u32 {
    1000
}

impl NoiseConfig {
    pub fn new(epsilon: f64, trajectories: u32, seed: u64) -> Result<Self> {
        let cfg = NoiseConfig {
            epsilon,
            trajectories,
            seed,
            label_average: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_label_average(mut self, on: bool) -> Self {
        self.label_average = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.epsilon) || !self.epsilon.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "epsilon must lie in [0, 1], got {}",
                self.epsilon
            )));
        }
        if self.trajectories == 0 || self.trajectories > 10_000_000 {
            return Err(Error::InvalidConfig(format!(
                "trajectories must lie in 1..=1e7, got {}",
                self.trajectories
            )));
        }
        Ok(())
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stateless seed derivation: independent streams for (base, salt) pairs.
pub fn mix_seed(base: u64, salt: u64) -> u64 {
    splitmix64(base ^ splitmix64(salt))
}

fn pauli_matrix(idx: u8) -> Mat2 {
    match idx {
        0 => gates::i(),
        1 => gates::x(),
        2 => gates::y(),
        _ => gates::z(),
    }
}

/// The single-qubit label average `(I + X + Y + Z) / 4`.
fn pauli_mean() -> Mat2 {
    let q = 0.25;
    [
        [Complex64::new(2.0 * q, 0.0), Complex64::new(q, -q)],
        [Complex64::new(q, q), Complex64::new(0.0, 0.0)],
    ]
}

/// Applies a decomposed circuit, inserting a fault after each CNOT with
/// probability `epsilon`.
///
/// Draw order per CNOT: one uniform for the fault coin; on a fault with
/// sampled labels, one integer in `0..16` for the Pauli pair. This fixed
/// order makes trajectories reproducible from their rng state alone.
pub(crate) fn apply_with_faults<R: Rng>(
    state: &mut Ket,
    circuit: &Circuit,
    epsilon: f64,
    label_average: bool,
    rng: &mut R,
) -> Result<()> {
    for op in circuit.ops() {
        match op {
            GateOp::Single { .. } | GateOp::Cnot { .. } => state.apply_gate(op)?,
            _ => {
                return Err(Error::InvalidConfig(
                    "noise insertion requires a decomposed circuit (one- and two-qubit gates only)"
                        .into(),
                ))
            }
        }
        if let GateOp::Cnot { control, target } = op {
            if epsilon > 0.0 && rng.gen::<f64>() < epsilon {
                if label_average {
                    state.apply_gate(&GateOp::Single {
                        target: *control,
                        matrix: pauli_mean(),
                    })?;
                    state.apply_gate(&GateOp::Single {
                        target: *target,
                        matrix: pauli_mean(),
                    })?;
                } else {
                    let label = rng.gen_range(0..16u8);
                    state.apply_gate(&GateOp::Single {
                        target: *control,
                        matrix: pauli_matrix(label & 3),
                    })?;
                    state.apply_gate(&GateOp::Single {
                        target: *target,
                        matrix: pauli_matrix(label >> 2),
                    })?;
                }
            }
        }
    }
    Ok(())
}

/// Applies `circuit` under one noise trajectory.
///
/// The circuit must already be decomposed into one- and two-qubit gates so
/// fault sites are well defined. With `cfg.label_average` set the result is
/// a partially averaged (generally unnormalized) state that is only
/// meaningful inside mean-overlap accumulations.
pub fn noisy_apply_circuit<R: Rng>(
    state: &mut Ket,
    circuit: &Circuit,
    cfg: &NoiseConfig,
    rng: &mut R,
) -> Result<()> {
    cfg.validate()?;
    apply_with_faults(state, circuit, cfg.epsilon, cfg.label_average, rng)
}

// ---------------------------------------------------------------------------
// Density-matrix reference
// ---------------------------------------------------------------------------

/// Dense density matrix on up to 8 qubits, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    dim: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn from_ket(ket: &Ket) -> Result<Self> {
        let n = ket.n_qubits();
        if n > 8 {
            return Err(Error::InvalidConfig(format!(
                "density-matrix reference supports at most 8 qubits, got {n}"
            )));
        }
        let dim = 1usize << n;
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                data[i * dim + j] = ket.amplitudes()[i] * ket.amplitudes()[j].conj();
            }
        }
        Ok(DensityMatrix {
            n_qubits: n,
            dim,
            data,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn purity(&self) -> f64 {
        // tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
        self.data.iter().map(|v| v.norm_sqr()).sum()
    }

    /// Largest deviation from Hermitian symmetry.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                let d = (self.data[i * self.dim + j] - self.data[j * self.dim + i].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Expectation `<ket| rho |ket>` (real part; the imaginary part vanishes
    /// for Hermitian `rho`).
    pub fn expectation(&self, ket: &Ket) -> Result<f64> {
        if ket.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "expectation of a {}-qubit state in a {}-qubit density matrix",
                ket.n_qubits(),
                self.n_qubits
            )));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.dim {
            let bra = ket.amplitudes()[i].conj();
            for j in 0..self.dim {
                acc += bra * self.data[i * self.dim + j] * ket.amplitudes()[j];
            }
        }
        Ok(acc.re)
    }

    /// Attempts a Cholesky factorization of `rho + jitter I`; success means
    /// the matrix is positive semidefinite up to the jitter scale.
    pub fn is_positive_semidefinite(&self, jitter: f64) -> bool {
        let dim = self.dim;
        let mut a = self.data.clone();
        for i in 0..dim {
            a[i * dim + i] += Complex64::new(jitter, 0.0);
        }
        let mut l = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for j in 0..=i {
                let mut sum = a[i * dim + j];
                for k in 0..j {
                    sum -= l[i * dim + k] * l[j * dim + k].conj();
                }
                if i == j {
                    if sum.re <= 0.0 || sum.re < sum.im.abs() * 1e6 {
                        return false;
                    }
                    l[i * dim + i] = Complex64::new(sum.re.sqrt(), 0.0);
                } else {
                    l[i * dim + j] = sum / l[j * dim + j];
                }
            }
        }
        true
    }

    fn apply_single(&mut self, target: usize, m: &Mat2) {
        let dim = self.dim;
        let bit = 1usize << target;
        let low_mask = bit - 1;
        let half = dim >> 1;
        // Left multiply by U on rows.
        for base in 0..half {
            let i0 = ((base & !low_mask) << 1) | (base & low_mask);
            let i1 = i0 | bit;
            for j in 0..dim {
                let a = self.data[i0 * dim + j];
                let b = self.data[i1 * dim + j];
                self.data[i0 * dim + j] = m[0][0] * a + m[0][1] * b;
                self.data[i1 * dim + j] = m[1][0] * a + m[1][1] * b;
            }
        }
        // Right multiply by U^dagger on columns.
        for base in 0..half {
            let j0 = ((base & !low_mask) << 1) | (base & low_mask);
            let j1 = j0 | bit;
            for i in 0..dim {
                let a = self.data[i * dim + j0];
                let b = self.data[i * dim + j1];
                self.data[i * dim + j0] = a * m[0][0].conj() + b * m[0][1].conj();
                self.data[i * dim + j1] = a * m[1][0].conj() + b * m[1][1].conj();
            }
        }
    }

    fn apply_cnot(&mut self, control: usize, target: usize) {
        let dim = self.dim;
        let cbit = 1usize << control;
        let tbit = 1usize << target;
        for i in 0..dim {
            if i & cbit != 0 && i & tbit == 0 {
                let ip = i | tbit;
                for j in 0..dim {
                    self.data.swap(i * dim + j, ip * dim + j);
                }
            }
        }
        for j in 0..dim {
            if j & cbit != 0 && j & tbit == 0 {
                let jp = j | tbit;
                for i in 0..dim {
                    self.data.swap(i * dim + j, i * dim + jp);
                }
            }
        }
    }

    /// Exact two-qubit depolarizing channel: with weight `epsilon`, the
    /// uniform average over all sixteen Pauli pairs on `(q_a, q_b)`.
    pub fn depolarize_pair(&mut self, q_a: usize, q_b: usize, epsilon: f64) {
        if epsilon == 0.0 {
            return;
        }
        let mut sum = vec![Complex64::new(0.0, 0.0); self.data.len()];
        for label in 0..16u8 {
            let mut branch = self.clone();
            branch.apply_single(q_a, &pauli_matrix(label & 3));
            branch.apply_single(q_b, &pauli_matrix(label >> 2));
            for (s, b) in sum.iter_mut().zip(branch.data.iter()) {
                *s += b;
            }
        }
        let keep = 1.0 - epsilon;
        let mix = epsilon / 16.0;
        for (d, s) in self.data.iter_mut().zip(sum.iter()) {
            *d = keep * *d + mix * s;
        }
    }
}

/// Evolves `initial` through `circuit` under the exact depolarizing channel,
/// decomposing multi-controlled gates first so fault sites coincide with the
/// trajectory sampler's.
pub fn density_matrix_reference(
    initial: &Ket,
    circuit: &Circuit,
    epsilon: f64,
) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidConfig(format!(
            "epsilon must lie in [0, 1], got {epsilon}"
        )));
    }
    if circuit.n_qubits() != initial.n_qubits() {
        return Err(Error::DimensionMismatch(format!(
            "{}-qubit circuit on a {}-qubit state",
            circuit.n_qubits(),
            initial.n_qubits()
        )));
    }
    let mut rho = DensityMatrix::from_ket(initial)?;
    for op in circuit.decompose().ops() {
        match op {
            GateOp::Single { target, matrix } => rho.apply_single(*target, matrix),
            GateOp::Cnot { control, target } => {
                rho.apply_cnot(*control, *target);
                rho.depolarize_pair(*control, *target, epsilon);
            }
            _ => unreachable!("decompose() emits only one- and two-qubit gates"),
        }
    }
    Ok(rho)
}

// ---------------------------------------------------------------------------
// Noise sweep study
// ---------------------------------------------------------------------------

/// Peak summary for one noise level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseStudyRow {
    pub epsilon: f64,
    pub x_peak: f64,
    pub height: f64,
    /// Conservative 1-sigma height uncertainty propagated from the
    /// trajectory scatter of each time sample (zero for the exact row).
    pub height_stderr: f64,
}

/// Result of sweeping the noise strength at fixed acquisition parameters.
#[derive(Debug, Clone)]
pub struct NoiseStudy {
    pub rows: Vec<NoiseStudyRow>,
    /// `(epsilon, series)` pairs, mirrored onto the full window.
    pub series: Vec<(f64, SignalSeries)>,
    /// `(epsilon, spectrum)` pairs on the study grid.
    pub spectra: Vec<(f64, SpectrumGrid)>,
}

/// Sweeps `epsilons`, acquiring a half series per level (mirrored onto the
/// full window), computing its spectrum on `grid`, and locating the top
/// peak. An `epsilon` of exactly 0 bypasses the trajectory machinery and
/// reproduces the noiseless pipeline bit for bit.
///
/// `base.noise` must be set; it supplies the trajectory count, seed, and
/// label-averaging choice for every nonzero level.
pub fn noisy_spectrum_study(
    amp: &Amplifier,
    base: &AcquisitionConfig,
    epsilons: &[f64],
    grid: &GridSpec,
) -> Result<NoiseStudy> {
    let template = base.noise.as_ref().ok_or_else(|| {
        Error::InvalidConfig("noisy_spectrum_study needs base.noise to be set".into())
    })?;
    if epsilons.is_empty() {
        return Err(Error::InvalidConfig(
            "noisy_spectrum_study needs at least one epsilon".into(),
        ));
    }
    base.validate()?;
    let mut study = NoiseStudy {
        rows: Vec::new(),
        series: Vec::new(),
        spectra: Vec::new(),
    };
    for &eps in epsilons {
        let mut cfg = base.clone();
        if eps == 0.0 {
            cfg.noise = None;
        } else {
            cfg.noise = Some(NoiseConfig {
                epsilon: eps,
                ..*template
            });
        }
        let half = acquire_half_series(amp, &cfg)?;
        let full = symmetrize(&half)?;
        let spec = spectrum::compute_spectrum(&full, grid)?;
        let peaks = spectrum::find_peaks_with(
            &spec,
            &PeakSearchOptions {
                floor: FloorPolicy::None,
                zero_exclusion_half_width: None,
            },
        )?;
        let top = &peaks[0];
        study.rows.push(NoiseStudyRow {
            epsilon: eps,
            x_peak: top.x_peak,
            height: top.height,
            height_stderr: spectrum_height_stderr(&full),
        });
        study.series.push((eps, full));
        study.spectra.push((eps, spec));
    }
    Ok(study)
}

/// Conservative 1-sigma uncertainty of any spectrum value of a mirrored
/// series: mirrored samples are perfect copies, so each `|t| > 0` pair
/// contributes at most `2 w_t sigma_t` coherently.
fn spectrum_height_stderr(series: &SignalSeries) -> f64 {
    let mut var = 0.0f64;
    for s in series.samples() {
        if s.t < 0 {
            continue;
        }
        if let Some(sigma) = s.stderr {
            let w = series.config().window.weight(s.t);
            let scale = if s.t == 0 { 1.0 } else { 2.0 };
            var += (scale * w * sigma).powi(2);
        }
    }
    var.sqrt()
}

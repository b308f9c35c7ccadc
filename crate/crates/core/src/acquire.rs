//! Acquisition of the windowed time-indexed signal.
//!
//! For an amplifier `A` with angle theta and a chosen initial state, the raw
//! signal at integer time `t` is either the overlap `f(t) = <init|A^{m t}
//! |init>` or the return probability `p(t) = |f(t)|^2`, with `m` the
//! magnification. Each sample is weighted by the Gaussian window `w(t) =
//! exp(-a^2 t^2)`. Three acquisition routes produce the same expectation
//! values and are cross-checked in the tests:
//!
//! * exact dense evaluation (incremental powers of `A`),
//! * ancilla-based interference circuits with binomial shot sampling,
//! * depolarizing-noise trajectory averages (see [`crate::noise`]).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates;
use crate::grover::Amplifier;
use crate::noise::{self, NoiseConfig};
use crate::statevec::{GateOp, Ket};

/// What quantity each time sample estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AcquisitionMode {
    /// Dense complex overlap, no measurement model.
    ExactOverlap,
    /// Complex overlap estimated by real/imaginary interference circuits.
    HadamardTest,
    /// Return probability (real, nonnegative).
    DirectProbability,
}

/// Which state the signal starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// The first prepared state itself. Its overlap signal is exactly
    /// `cos(2 m t theta)`: symmetric spectral peaks at `x = +-2 m theta`.
    PsiDefault,
    /// The in-plane state orthogonal to psi (equal eigenvector weights).
    /// Same signal as `PsiDefault`, but constructed from the dense
    /// eigenbasis rather than a preparation circuit.
    Eq9Exact,
    /// The `exp(-2 i theta)` eigenvector: one-sided signal
    /// `exp(-2 i m t theta)`, single spectral peak at `x = +2 m theta`.
    YMinusExact,
}

/// Gaussian window `w(t) = exp(-a^2 t^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowParams {
    a: f64,
}

impl WindowParams {
    /// Decay rate `a` must lie in `(0, 1]`; larger values would concentrate
    /// the whole window on `t = 0` and the truncation bounds degenerate.
    pub fn new(a: f64) -> Result<Self> {
        if !(a > 0.0 && a <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "window decay rate a must lie in (0, 1], got {a}"
            )));
        }
        Ok(WindowParams { a })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn weight(&self, t: i64) -> f64 {
        let at = self.a * t as f64;
        (-at * at).exp()
    }
}

/// Full description of one acquisition run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcquisitionConfig {
    pub mode: AcquisitionMode,
    /// Magnification: each time step applies `A^m`. May be zero or negative.
    pub magnification: i64,
    /// Window truncation: samples live at `|t| <= t_max`.
    pub t_max: u32,
    pub window: WindowParams,
    /// Measurements per interference or probability circuit; 0 means exact
    /// expectation values.
    #[serde(default)]
    pub n_shot: u64,
    /// Base seed for shot sampling; required whenever `n_shot > 0`.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_initial_state")]
    pub initial_state: InitialState,
    #[serde(default)]
    pub noise: Option<NoiseConfig>,
    /// Hadamard-test only: skip the imaginary-part circuit and reconstruct
    /// `beta_hat = -sqrt(1 - alpha_hat^2)`. This halves the circuit count but
    /// fixes the branch sign: whenever `sin(2 m t theta) < 0` the
    /// reconstructed sample is the complex conjugate of the true one, which
    /// mirrors the spectral peak to `2 pi - x`. Distances to the spectral
    /// fixed points `n pi` are invariant under that mirror, so fixed-point
    /// residual analyses are unaffected.
    #[serde(default)]
    pub infer_beta: bool,
}

fn default_initial_state() -> InitialState {
    InitialState::PsiDefault
}

impl AcquisitionConfig {
    /// Exact overlap acquisition with the default initial state.
    pub fn exact_overlap(magnification: i64, t_max: u32, a: f64) -> Result<Self> {
        Ok(AcquisitionConfig {
            mode: AcquisitionMode::ExactOverlap,
            magnification,
            t_max,
            window: WindowParams::new(a)?,
            n_shot: 0,
            seed: None,
            initial_state: InitialState::PsiDefault,
            noise: None,
            infer_beta: false,
        })
    }

    /// Exact return-probability acquisition with the default initial state.
    pub fn probability(magnification: i64, t_max: u32, a: f64) -> Result<Self> {
        let mut cfg = Self::exact_overlap(magnification, t_max, a)?;
        cfg.mode = AcquisitionMode::DirectProbability;
        Ok(cfg)
    }

    pub fn with_initial_state(mut self, s: InitialState) -> Self {
        self.initial_state = s;
        self
    }

    pub fn with_shots(mut self, n_shot: u64, seed: u64) -> Self {
        self.n_shot = n_shot;
        self.seed = Some(seed);
        self
    }

    pub fn with_noise(mut self, noise: NoiseConfig) -> Self {
        self.noise = Some(noise);
        self
    }

    pub fn with_infer_beta(mut self, infer: bool) -> Self {
        self.infer_beta = infer;
        self
    }

    /// Checks internal consistency; every acquisition entry point calls this.
    pub fn validate(&self) -> Result<()> {
        WindowParams::new(self.window.a)?;
        if self.t_max == 0 {
            return Err(Error::InvalidConfig("t_max must be at least 1".into()));
        }
        if self.n_shot > 0 && self.seed.is_none() {
            return Err(Error::InvalidConfig(
                "n_shot > 0 requires a sampling seed".into(),
            ));
        }
        if self.n_shot > 100_000_000 {
            return Err(Error::InvalidConfig(format!(
                "n_shot = {} is beyond the supported budget",
                self.n_shot
            )));
        }
        if self.n_shot > 0 && self.mode == AcquisitionMode::ExactOverlap {
            return Err(Error::InvalidConfig(
                "exact_overlap mode has no measurement model; use hadamard_test for sampled overlaps".into(),
            ));
        }
        if self.infer_beta && self.mode != AcquisitionMode::HadamardTest {
            return Err(Error::InvalidConfig(
                "infer_beta applies only to hadamard_test mode".into(),
            ));
        }
        if let Some(noise) = &self.noise {
            noise.validate()?;
            if noise.label_average && self.mode != AcquisitionMode::ExactOverlap {
                return Err(Error::InvalidConfig(
                    "label-averaged trajectories estimate the mean overlap, which is linear in \
                     the evolved state; they are invalid for sampled or probability quantities"
                        .into(),
                ));
            }
        }
        Ok(())
    }
}

/// One time sample: raw estimate, windowed value, and (for trajectory
/// averages) the standard error of the raw mean.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalSample {
    pub t: i64,
    pub raw: Complex64,
    pub windowed: Complex64,
    pub stderr: Option<f64>,
}

/// A contiguous run of time samples plus the configuration that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalSeries {
    config: AcquisitionConfig,
    samples: Vec<SignalSample>,
}

impl SignalSeries {
    /// Assembles a series, checking that times are contiguous ascending
    /// integers and that windowed values match `raw * w(t)`.
    pub fn from_parts(config: AcquisitionConfig, samples: Vec<SignalSample>) -> Result<Self> {
        config.validate()?;
        if samples.is_empty() {
            return Err(Error::InvalidConfig("series has no samples".into()));
        }
        for (i, s) in samples.iter().enumerate() {
            if i > 0 && s.t != samples[i - 1].t + 1 {
                return Err(Error::InvalidConfig(format!(
                    "series times must be contiguous: {} follows {}",
                    s.t,
                    samples[i - 1].t
                )));
            }
            let expect = s.raw * config.window.weight(s.t);
            if (s.windowed - expect).norm() > 1e-9 * (1.0 + expect.norm()) {
                return Err(Error::InvalidConfig(format!(
                    "windowed value at t = {} does not match raw * w(t)",
                    s.t
                )));
            }
        }
        Ok(SignalSeries { config, samples })
    }

    pub fn config(&self) -> &AcquisitionConfig {
        &self.config
    }

    pub fn samples(&self) -> &[SignalSample] {
        &self.samples
    }

    pub fn t_min(&self) -> i64 {
        self.samples[0].t
    }

    pub fn t_max(&self) -> i64 {
        self.samples[self.samples.len() - 1].t
    }

    /// True when the series covers `[-t_max, t_max]`.
    pub fn is_full(&self) -> bool {
        self.t_min() == -self.t_max()
    }
}

/// Mirror a half series (`t in [0, T]`) onto the full window `[-T, T]`.
///
/// Overlap signals obey `f(-t) = conj(f(t))` because `f(-t) = <init|A^{-mt}
/// |init> = <A^{mt} init|init>`; probability signals are even. This halves
/// the quantum workload; the mirrored samples inherit the source standard
/// errors (they are copies, not independent runs).
pub fn symmetrize(half: &SignalSeries) -> Result<SignalSeries> {
    if half.t_min() != 0 {
        return Err(Error::InvalidConfig(format!(
            "symmetrize needs a half series starting at t = 0, got t_min = {}",
            half.t_min()
        )));
    }
    let probability = half.config.mode == AcquisitionMode::DirectProbability;
    let mut samples = Vec::with_capacity(2 * half.samples.len() - 1);
    for s in half.samples.iter().skip(1).rev() {
        let raw = if probability { s.raw } else { s.raw.conj() };
        samples.push(SignalSample {
            t: -s.t,
            raw,
            windowed: raw * half.config.window.weight(s.t),
            stderr: s.stderr,
        });
    }
    samples.extend(half.samples.iter().cloned());
    SignalSeries::from_parts(half.config.clone(), samples)
}

fn initial_ket(amp: &Amplifier, which: InitialState) -> Result<Ket> {
    match which {
        InitialState::PsiDefault => Ok(amp.psi().clone()),
        InitialState::Eq9Exact => Ok(amp.subspace_basis()?.psi0),
        InitialState::YMinusExact => Ok(amp.subspace_basis()?.y_minus),
    }
}

fn check_power_budget(amp: &Amplifier, cfg: &AcquisitionConfig) -> Result<()> {
    let worst = cfg
        .magnification
        .checked_mul(cfg.t_max as i64)
        .map(i64::abs)
        .unwrap_or(i64::MAX);
    if worst > amp.max_power() {
        return Err(Error::PowerCap {
            requested: worst,
            cap: amp.max_power(),
        });
    }
    Ok(())
}

/// Exact overlaps `<init|A^{m t}|init>` for contiguous `t` from `t_lo` to
/// `t_hi`, walking incrementally so each step costs one `A^{|m|}`.
fn exact_overlaps(
    amp: &Amplifier,
    init: &Ket,
    m: i64,
    t_lo: i64,
    t_hi: i64,
) -> Result<Vec<Complex64>> {
    debug_assert!(t_lo <= t_hi);
    let mut out = vec![Complex64::new(0.0, 0.0); (t_hi - t_lo + 1) as usize];
    // Walk outward from t = 0 in both directions as needed.
    let mut forward = init.clone();
    let mut backward = init.clone();
    if t_lo <= 0 && t_hi >= 0 {
        out[(0 - t_lo) as usize] = Complex64::new(1.0, 0.0);
    }
    // Forward direction covers t > 0 (or the whole range if t_lo > 0).
    if t_hi > 0 {
        let start = t_lo.max(1);
        for _ in 0..start - 1 {
            amp.apply_power(&mut forward, m)?;
        }
        for t in start..=t_hi {
            amp.apply_power(&mut forward, m)?;
            out[(t - t_lo) as usize] = init.inner(&forward)?;
        }
    }
    if t_lo < 0 {
        let start = t_hi.min(-1);
        for _ in 0..(-start) - 1 {
            amp.apply_power(&mut backward, -m)?;
        }
        for t in (t_lo..=start).rev() {
            amp.apply_power(&mut backward, -m)?;
            out[(t - t_lo) as usize] = init.inner(&backward)?;
        }
    }
    Ok(out)
}

/// Derives the per-time-sample rng for shot sampling.
fn shot_rng(seed: u64, t: i64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(noise::mix_seed(seed, t as u64))
}

/// Draws from Binomial(n, p) as a count of successes.
pub(crate) fn binomial_draw<R: Rng>(rng: &mut R, n: u64, p: f64) -> u64 {
    let p = p.clamp(0.0, 1.0);
    let mut hits = 0u64;
    for _ in 0..n {
        if rng.gen::<f64>() < p {
            hits += 1;
        }
    }
    hits
}

fn sampled_alpha<R: Rng>(rng: &mut R, shots: u64, expectation: f64) -> f64 {
    if shots == 0 {
        return expectation;
    }
    let p0 = (1.0 + expectation) / 2.0;
    2.0 * (binomial_draw(rng, shots, p0) as f64 / shots as f64) - 1.0
}

/// Turns an exact overlap into the mode-specific raw sample, applying the
/// measurement model when `n_shot > 0`.
fn raw_from_overlap(cfg: &AcquisitionConfig, z: Complex64, t: i64) -> Complex64 {
    match cfg.mode {
        AcquisitionMode::ExactOverlap => z,
        AcquisitionMode::HadamardTest => {
            if cfg.n_shot == 0 {
                z
            } else {
                let mut rng = shot_rng(cfg.seed.unwrap(), t);
                let alpha = sampled_alpha(&mut rng, cfg.n_shot, z.re);
                let beta = if cfg.infer_beta {
                    -(1.0 - alpha * alpha).max(0.0).sqrt()
                } else {
                    sampled_alpha(&mut rng, cfg.n_shot, z.im)
                };
                Complex64::new(alpha, beta)
            }
        }
        AcquisitionMode::DirectProbability => {
            let p = z.norm_sqr().min(1.0);
            if cfg.n_shot == 0 {
                Complex64::new(p, 0.0)
            } else {
                let mut rng = shot_rng(cfg.seed.unwrap(), t);
                let hits = binomial_draw(&mut rng, cfg.n_shot, p);
                Complex64::new(hits as f64 / cfg.n_shot as f64, 0.0)
            }
        }
    }
}

fn acquire_range(
    amp: &Amplifier,
    cfg: &AcquisitionConfig,
    t_lo: i64,
    t_hi: i64,
) -> Result<SignalSeries> {
    cfg.validate()?;
    check_power_budget(amp, cfg)?;
    let init = initial_ket(amp, cfg.initial_state)?;
    let noisy = cfg.noise.as_ref().is_some_and(|n| n.epsilon > 0.0);
    let mut samples = Vec::with_capacity((t_hi - t_lo + 1) as usize);
    if noisy {
        let noise_cfg = cfg.noise.as_ref().unwrap();
        let values = noisy_range_values(amp, &init, cfg, noise_cfg, t_lo, t_hi)?;
        for (idx, (raw, stderr)) in values.into_iter().enumerate() {
            let t = t_lo + idx as i64;
            samples.push(SignalSample {
                t,
                raw,
                windowed: raw * cfg.window.weight(t),
                stderr: Some(stderr),
            });
        }
    } else {
        let overlaps = exact_overlaps(amp, &init, cfg.magnification, t_lo, t_hi)?;
        for (idx, z) in overlaps.into_iter().enumerate() {
            let t = t_lo + idx as i64;
            let raw = raw_from_overlap(cfg, z, t);
            samples.push(SignalSample {
                t,
                raw,
                windowed: raw * cfg.window.weight(t),
                stderr: None,
            });
        }
    }
    SignalSeries::from_parts(cfg.clone(), samples)
}

/// Acquires the full window `t in [-t_max, t_max]`.
///
/// Negative times are evolved honestly with inverse blocks (they are not
/// mirrored copies; use [`acquire_half_series`] plus [`symmetrize`] for the
/// mirrored variant).
pub fn acquire_series(amp: &Amplifier, cfg: &AcquisitionConfig) -> Result<SignalSeries> {
    acquire_range(amp, cfg, -(cfg.t_max as i64), cfg.t_max as i64)
}

/// Acquires the half window `t in [0, t_max]`.
pub fn acquire_half_series(amp: &Amplifier, cfg: &AcquisitionConfig) -> Result<SignalSeries> {
    acquire_range(amp, cfg, 0, cfg.t_max as i64)
}

// ---------------------------------------------------------------------------
// Interference (ancilla) circuits
// ---------------------------------------------------------------------------

/// Joint register: the amplifier register plus one ancilla at index `n`,
/// prepared in `(|0> + |1>)/sqrt(2) (x) init`.
fn hadamard_joint_state(amp: &Amplifier, init: &Ket) -> Result<Ket> {
    let n = amp.n_qubits();
    let dim = 1usize << n;
    let mut joint = vec![Complex64::new(0.0, 0.0); dim << 1];
    let inv = std::f64::consts::FRAC_1_SQRT_2;
    for (i, a) in init.amplitudes().iter().enumerate() {
        joint[i] = a * inv;
        joint[i + dim] = a * inv;
    }
    Ket::from_amplitudes(joint)
}

/// Probability of reading the ancilla as 0 after the finishing gates.
fn ancilla_p0(joint: &Ket, n: usize, imaginary_branch: bool) -> Result<f64> {
    let mut finished = joint.clone();
    if imaginary_branch {
        finished.apply_gate(&GateOp::Single {
            target: n,
            matrix: gates::s_dag(),
        })?;
    }
    finished.apply_gate(&GateOp::Single {
        target: n,
        matrix: gates::h(),
    })?;
    let dim = 1usize << n;
    Ok(finished.amplitudes()[..dim]
        .iter()
        .map(|a| a.norm_sqr())
        .sum())
}

/// Hadamard-test estimate of `Re <psi|A^power|psi>` from one interference
/// circuit read `shots` times (`shots = 0` returns the exact value).
///
/// The circuit is: ancilla `H`, `|power|` ancilla-controlled amplification
/// blocks, ancilla `H`, measure the ancilla; the estimate is `2 p_hat(0) - 1`.
pub fn hadamard_test_alpha(amp: &Amplifier, power: i64, shots: u64, seed: u64) -> Result<f64> {
    let (p0, _) = hadamard_test_p0(amp, power)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(sampled_alpha(&mut rng, shots, 2.0 * p0 - 1.0))
}

/// Hadamard-test estimate of the full complex `<psi|A^power|psi>`: the real
/// part from the plain circuit, the imaginary part from the same circuit
/// with an extra ancilla S-dagger, each read `shots` times.
pub fn hadamard_test_overlap(
    amp: &Amplifier,
    power: i64,
    shots: u64,
    seed: u64,
) -> Result<Complex64> {
    let (p0_re, p0_im) = hadamard_test_p0(amp, power)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alpha = sampled_alpha(&mut rng, shots, 2.0 * p0_re - 1.0);
    let beta = sampled_alpha(&mut rng, shots, 2.0 * p0_im - 1.0);
    Ok(Complex64::new(alpha, beta))
}

fn hadamard_test_p0(amp: &Amplifier, power: i64) -> Result<(f64, f64)> {
    if power.abs() > amp.max_power() {
        return Err(Error::PowerCap {
            requested: power,
            cap: amp.max_power(),
        });
    }
    let n = amp.n_qubits();
    let init = amp.psi().clone();
    let mut joint = hadamard_joint_state(amp, &init)?;
    let block = if power >= 0 {
        amp.controlled_block_circuit()?
    } else {
        amp.controlled_adjoint_block_circuit()?
    };
    for _ in 0..power.abs() {
        joint.apply_circuit(&block)?;
    }
    Ok((ancilla_p0(&joint, n, false)?, ancilla_p0(&joint, n, true)?))
}

/// Return-probability estimate from the direct circuit: prepare psi, apply
/// `A^power`, un-prepare, and count all-zeros outcomes among `shots`
/// measurements (`shots = 0` returns the exact probability).
pub fn direct_return_probability(
    amp: &Amplifier,
    power: i64,
    shots: u64,
    seed: u64,
) -> Result<f64> {
    if power.abs() > amp.max_power() {
        return Err(Error::PowerCap {
            requested: power,
            cap: amp.max_power(),
        });
    }
    let mut state = amp.psi().clone();
    amp.apply_power(&mut state, power)?;
    state.apply_circuit(&amp.r_psi().prep().circuit().adjoint())?;
    let p = state.probability(0)?;
    if shots == 0 {
        return Ok(p);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(binomial_draw(&mut rng, shots, p) as f64 / shots as f64)
}

// ---------------------------------------------------------------------------
// Noisy trajectories
// ---------------------------------------------------------------------------

/// Compensated accumulator so trajectory means are independent of summation
/// noise at any trajectory count.
#[derive(Debug, Clone, Copy, Default)]
struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    fn add(&mut self, v: f64) {
        let y = v - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }
}

#[derive(Debug, Clone, Default)]
struct MeanAccumulator {
    re: KahanSum,
    im: KahanSum,
    norm_sqr: KahanSum,
    count: u64,
}

impl MeanAccumulator {
    fn add(&mut self, v: Complex64) {
        self.re.add(v.re);
        self.im.add(v.im);
        self.norm_sqr.add(v.norm_sqr());
        self.count += 1;
    }

    fn mean(&self) -> Complex64 {
        Complex64::new(self.re.sum, self.im.sum) / self.count as f64
    }

    /// Standard error of the mean, treating the complex scatter as the sum
    /// of the component variances.
    fn stderr(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let k = self.count as f64;
        let mean = self.mean();
        let var = ((self.norm_sqr.sum / k) - mean.norm_sqr()).max(0.0);
        (var / (k - 1.0)).sqrt()
    }
}

/// Per-trajectory noisy evolution over a contiguous time range, continuing
/// each trajectory's state across time steps so one pass yields the whole
/// series. Returns `(mean raw value, standard error)` per time.
fn noisy_range_values(
    amp: &Amplifier,
    init: &Ket,
    cfg: &AcquisitionConfig,
    noise_cfg: &NoiseConfig,
    t_lo: i64,
    t_hi: i64,
) -> Result<Vec<(Complex64, f64)>> {
    let len = (t_hi - t_lo + 1) as usize;
    let mut accs = vec![MeanAccumulator::default(); len];

    // Forward (t >= 0, direction 0) and backward (t < 0, direction 1) parts
    // run as separate trajectory families.
    for direction in [0u64, 1u64] {
        let (steps, m_eff) = if direction == 0 {
            (t_hi.max(0), cfg.magnification)
        } else {
            ((-t_lo).max(0), -cfg.magnification)
        };
        if steps == 0 && direction == 1 {
            continue;
        }
        if direction == 1 && t_lo >= 0 {
            continue;
        }
        match cfg.mode {
            AcquisitionMode::HadamardTest => noisy_hadamard_family(
                amp, init, cfg, noise_cfg, direction, steps, m_eff, t_lo, &mut accs,
            )?,
            _ => noisy_plain_family(
                amp, init, cfg, noise_cfg, direction, steps, m_eff, t_lo, &mut accs,
            )?,
        }
    }
    Ok(accs
        .iter()
        .map(|acc| {
            if acc.count == 0 {
                // t = 0 is fault-free by construction when only covered once.
                (Complex64::new(1.0, 0.0), 0.0)
            } else {
                (acc.mean(), acc.stderr())
            }
        })
        .collect())
}

fn record_index(t_lo: i64, direction: u64, step: i64) -> usize {
    let t = if direction == 0 { step } else { -step };
    (t - t_lo) as usize
}

/// Trajectories for overlap / probability quantities on the bare register.
#[allow(clippy::too_many_arguments)]
fn noisy_plain_family(
    amp: &Amplifier,
    init: &Ket,
    cfg: &AcquisitionConfig,
    noise_cfg: &NoiseConfig,
    direction: u64,
    steps: i64,
    m_eff: i64,
    t_lo: i64,
    accs: &mut [MeanAccumulator],
) -> Result<()> {
    let block = if m_eff >= 0 {
        amp.block_circuit()?.decompose()
    } else {
        amp.adjoint_block_circuit()?.decompose()
    };
    let blocks_per_step = m_eff.unsigned_abs() as usize;
    let probability = cfg.mode == AcquisitionMode::DirectProbability;
    let n_acc = accs.len() as i64;
    let in_range = move |t: i64| -> bool {
        let t = if direction == 0 { t } else { -t };
        (t_lo..t_lo + n_acc).contains(&t)
    };

    for k in 0..noise_cfg.trajectories {
        let traj_seed = noise::mix_seed(noise::mix_seed(noise_cfg.seed, direction), k as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(traj_seed);
        let mut state = init.clone();
        for step in 0..=steps {
            if step > 0 {
                for _ in 0..blocks_per_step {
                    noise::apply_with_faults(
                        &mut state,
                        &block,
                        noise_cfg.epsilon,
                        noise_cfg.label_average,
                        &mut rng,
                    )?;
                }
            }
            if direction == 1 && step == 0 {
                continue; // t = 0 is recorded by the forward family.
            }
            if !in_range(step) {
                continue;
            }
            let z = init.inner(&state)?;
            let value = if probability {
                let p = z.norm_sqr().min(1.0);
                if cfg.n_shot > 0 {
                    let hits = binomial_draw(&mut rng, cfg.n_shot, p);
                    Complex64::new(hits as f64 / cfg.n_shot as f64, 0.0)
                } else {
                    Complex64::new(p, 0.0)
                }
            } else {
                z
            };
            accs[record_index(t_lo, direction, step)].add(value);
        }
    }
    Ok(())
}

/// Trajectories for the interference-circuit estimate: the joint register
/// (with ancilla) evolves under noisy controlled blocks; each recorded time
/// branches off a copy for the finishing gates.
#[allow(clippy::too_many_arguments)]
fn noisy_hadamard_family(
    amp: &Amplifier,
    init: &Ket,
    cfg: &AcquisitionConfig,
    noise_cfg: &NoiseConfig,
    direction: u64,
    steps: i64,
    m_eff: i64,
    t_lo: i64,
    accs: &mut [MeanAccumulator],
) -> Result<()> {
    let n = amp.n_qubits();
    let block = if m_eff >= 0 {
        amp.controlled_block_circuit()?.decompose()
    } else {
        amp.controlled_adjoint_block_circuit()?.decompose()
    };
    let blocks_per_step = m_eff.unsigned_abs() as usize;
    let n_acc = accs.len() as i64;
    let in_range = move |t: i64| -> bool {
        let t = if direction == 0 { t } else { -t };
        (t_lo..t_lo + n_acc).contains(&t)
    };

    for k in 0..noise_cfg.trajectories {
        let traj_seed = noise::mix_seed(noise::mix_seed(noise_cfg.seed, direction), k as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(traj_seed);
        let mut joint = hadamard_joint_state(amp, init)?;
        for step in 0..=steps {
            if step > 0 {
                for _ in 0..blocks_per_step {
                    noise::apply_with_faults(
                        &mut joint,
                        &block,
                        noise_cfg.epsilon,
                        noise_cfg.label_average,
                        &mut rng,
                    )?;
                }
            }
            if direction == 1 && step == 0 {
                continue;
            }
            if !in_range(step) {
                continue;
            }
            let p0_re = ancilla_p0(&joint, n, false)?;
            let alpha = sampled_alpha(&mut rng, cfg.n_shot, 2.0 * p0_re - 1.0);
            let beta = if cfg.infer_beta {
                -(1.0 - alpha * alpha).max(0.0).sqrt()
            } else {
                let p0_im = ancilla_p0(&joint, n, true)?;
                sampled_alpha(&mut rng, cfg.n_shot, 2.0 * p0_im - 1.0)
            };
            accs[record_index(t_lo, direction, step)].add(Complex64::new(alpha, beta));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grover::{build_amplifier, StatePrep};

    fn theta_amp(theta: f64) -> Amplifier {
        let (p, q) = StatePrep::theta_pair(2, theta).unwrap();
        build_amplifier(&p, &q).unwrap()
    }

    #[test]
    fn exact_overlap_is_cosine_of_rotation() {
        let theta = 0.6;
        let amp = theta_amp(theta);
        let cfg = AcquisitionConfig::exact_overlap(3, 5, 0.05).unwrap();
        let series = acquire_series(&amp, &cfg).unwrap();
        assert_eq!(series.t_min(), -5);
        assert_eq!(series.t_max(), 5);
        for s in series.samples() {
            let expect = (2.0 * 3.0 * s.t as f64 * theta).cos();
            assert!(
                (s.raw - Complex64::new(expect, 0.0)).norm() < 1e-12,
                "t = {}: {} vs {}",
                s.t,
                s.raw,
                expect
            );
            let w = cfg.window.weight(s.t);
            assert!((s.windowed - s.raw * w).norm() < 1e-15);
        }
    }

    #[test]
    fn y_minus_signal_is_one_sided_exponential() {
        let theta = 0.6;
        let amp = theta_amp(theta);
        let cfg = AcquisitionConfig::exact_overlap(2, 4, 0.1)
            .unwrap()
            .with_initial_state(InitialState::YMinusExact);
        let series = acquire_series(&amp, &cfg).unwrap();
        for s in series.samples() {
            let phase = -2.0 * 2.0 * s.t as f64 * theta;
            let expect = Complex64::from_polar(1.0, phase);
            assert!((s.raw - expect).norm() < 1e-12, "t = {}", s.t);
        }
    }

    #[test]
    fn probability_mode_squares_the_overlap() {
        let theta = 0.6;
        let amp = theta_amp(theta);
        let cfg = AcquisitionConfig::probability(2, 6, 0.05).unwrap();
        let series = acquire_series(&amp, &cfg).unwrap();
        for s in series.samples() {
            let expect = (2.0 * 2.0 * s.t as f64 * theta).cos().powi(2);
            assert!((s.raw.re - expect).abs() < 1e-12);
            assert!(s.raw.im.abs() < 1e-15);
        }
    }

    #[test]
    fn eq9_state_matches_default_signal() {
        let amp = theta_amp(0.83);
        let cfg_a = AcquisitionConfig::exact_overlap(2, 6, 0.05).unwrap();
        let cfg_b = cfg_a.clone().with_initial_state(InitialState::Eq9Exact);
        let a = acquire_series(&amp, &cfg_a).unwrap();
        let b = acquire_series(&amp, &cfg_b).unwrap();
        for (x, y) in a.samples().iter().zip(b.samples()) {
            assert!((x.raw - y.raw).norm() < 1e-12);
        }
    }

    #[test]
    fn symmetrize_matches_honest_full_acquisition() {
        let amp = theta_amp(0.41);
        for cfg in [
            AcquisitionConfig::exact_overlap(3, 8, 0.07).unwrap(),
            AcquisitionConfig::probability(3, 8, 0.07).unwrap(),
            AcquisitionConfig::exact_overlap(3, 8, 0.07)
                .unwrap()
                .with_initial_state(InitialState::YMinusExact),
        ] {
            let full = acquire_series(&amp, &cfg).unwrap();
            let half = acquire_half_series(&amp, &cfg).unwrap();
            let mirrored = symmetrize(&half).unwrap();
            assert_eq!(full.samples().len(), mirrored.samples().len());
            for (x, y) in full.samples().iter().zip(mirrored.samples()) {
                assert_eq!(x.t, y.t);
                assert!((x.raw - y.raw).norm() < 1e-12, "t = {}", x.t);
            }
        }
    }

    #[test]
    fn hadamard_circuit_reproduces_exact_overlap() {
        let amp = theta_amp(0.6);
        for power in [-3i64, -1, 0, 1, 2, 5] {
            let exact = {
                let mut state = amp.psi().clone();
                amp.apply_power(&mut state, power).unwrap();
                amp.psi().inner(&state).unwrap()
            };
            let estimate = hadamard_test_overlap(&amp, power, 0, 0).unwrap();
            assert!(
                (estimate - exact).norm() < 1e-12,
                "power {power}: {estimate} vs {exact}"
            );
            let alpha = hadamard_test_alpha(&amp, power, 0, 0).unwrap();
            assert!((alpha - exact.re).abs() < 1e-12);
        }
    }

    #[test]
    fn hadamard_sampling_concentrates_and_is_deterministic() {
        let amp = theta_amp(0.6);
        let a = hadamard_test_overlap(&amp, 2, 20_000, 99).unwrap();
        let b = hadamard_test_overlap(&amp, 2, 20_000, 99).unwrap();
        assert_eq!(a, b);
        let exact = hadamard_test_overlap(&amp, 2, 0, 0).unwrap();
        assert!((a.re - exact.re).abs() < 0.02);
        assert!((a.im - exact.im).abs() < 0.02);
    }

    #[test]
    fn direct_probability_circuit_matches_overlap_square() {
        let amp = theta_amp(0.6);
        for power in [0i64, 1, 4, -2] {
            let p = direct_return_probability(&amp, power, 0, 0).unwrap();
            let expect = (2.0 * power as f64 * 0.6).cos().powi(2);
            assert!((p - expect).abs() < 1e-12, "power {power}");
        }
        let sampled = direct_return_probability(&amp, 3, 50_000, 7).unwrap();
        let exact = direct_return_probability(&amp, 3, 0, 0).unwrap();
        assert!((sampled - exact).abs() < 0.01);
    }

    #[test]
    fn sampled_series_is_seed_reproducible() {
        let amp = theta_amp(0.9);
        let cfg = AcquisitionConfig {
            mode: AcquisitionMode::HadamardTest,
            magnification: 2,
            t_max: 4,
            window: WindowParams::new(0.1).unwrap(),
            n_shot: 200,
            seed: Some(1234),
            initial_state: InitialState::PsiDefault,
            noise: None,
            infer_beta: false,
        };
        let a = acquire_series(&amp, &cfg).unwrap();
        let b = acquire_series(&amp, &cfg).unwrap();
        assert_eq!(a.samples(), b.samples());
        // Different seed, different draws (overwhelmingly likely).
        let cfg2 = AcquisitionConfig {
            seed: Some(4321),
            ..cfg
        };
        let c = acquire_series(&amp, &cfg2).unwrap();
        assert_ne!(a.samples(), c.samples());
    }

    #[test]
    fn infer_beta_reconstructs_negative_branch() {
        let theta = 0.3;
        let amp = theta_amp(theta);
        let cfg = AcquisitionConfig {
            mode: AcquisitionMode::HadamardTest,
            magnification: 1,
            t_max: 2,
            window: WindowParams::new(0.1).unwrap(),
            n_shot: 400_000,
            seed: Some(5),
            initial_state: InitialState::YMinusExact,
            noise: None,
            infer_beta: true,
        };
        let series = acquire_series(&amp, &cfg).unwrap();
        // At t = 1: true signal exp(-2 i theta), sin(2 theta) > 0, so the
        // reconstructed branch sign is correct here.
        let s1 = series.samples().iter().find(|s| s.t == 1).unwrap();
        assert!((s1.raw.re - (2.0 * theta).cos()).abs() < 0.01);
        assert!((s1.raw.im + (2.0 * theta).sin()).abs() < 0.01);
    }

    #[test]
    fn config_validation_rejects_inconsistencies() {
        assert!(WindowParams::new(0.0).is_err());
        assert!(WindowParams::new(1.5).is_err());
        let base = AcquisitionConfig::exact_overlap(2, 10, 0.05).unwrap();
        let mut shots_no_seed = base.clone();
        shots_no_seed.mode = AcquisitionMode::HadamardTest;
        shots_no_seed.n_shot = 10;
        assert!(shots_no_seed.validate().is_err());
        let mut sampled_exact = base.clone();
        sampled_exact.n_shot = 10;
        sampled_exact.seed = Some(1);
        assert!(sampled_exact.validate().is_err());
        let mut bad_infer = base.clone();
        bad_infer.infer_beta = true;
        assert!(bad_infer.validate().is_err());
    }

    #[test]
    fn power_budget_is_checked_upfront() {
        let amp = theta_amp(0.6).with_max_power(10);
        let cfg = AcquisitionConfig::exact_overlap(3, 5, 0.05).unwrap();
        assert!(matches!(
            acquire_series(&amp, &cfg),
            Err(Error::PowerCap { .. })
        ));
    }

    #[test]
    fn zero_magnification_gives_flat_signal() {
        let amp = theta_amp(0.6);
        let cfg = AcquisitionConfig::exact_overlap(0, 3, 0.1).unwrap();
        let series = acquire_series(&amp, &cfg).unwrap();
        for s in series.samples() {
            assert!((s.raw - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }
}

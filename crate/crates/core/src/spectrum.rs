//! Windowed Fourier spectra, peak finding, and angle extraction.
//!
//! The spectrum of a windowed series is `S(x) = sum_t w(t) f(t) e^{i x t}`
//! on a grid of angles `x`. For overlap signals the infinite-window spectrum
//! is a pair of Gaussians of width `2a` centered at `x = +-2 m theta`
//! (probability signals add a third Gaussian at `x = 0` and move the pair to
//! `+-4 m theta`), periodized onto `[0, 2 pi)`. Locating the dominant peak
//! and unwrapping its position therefore estimates `theta`. A ladder of
//! increasing magnifications refines the estimate: each rung multiplies the
//! angular resolution by its magnification while the previous rung's interval
//! picks the branch.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::acquire::{acquire_series, AcquisitionConfig, AcquisitionMode, SignalSeries};
use crate::error::{Error, Result};
use crate::grover::Amplifier;

const TAU: f64 = std::f64::consts::TAU;

/// Uniform inclusive grid `x_min, x_min + step, ..., <= x_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "grid step must be positive, got {step}"
            )));
        }
        if !x_min.is_finite() || !x_max.is_finite() || x_max <= x_min {
            return Err(Error::InvalidConfig(format!(
                "grid range [{x_min}, {x_max}] is not a finite nonempty interval"
            )));
        }
        let spec = GridSpec { x_min, x_max, step };
        if spec.len() < 2 {
            return Err(Error::InvalidConfig("grid has fewer than 2 points".into()));
        }
        if spec.len() > 10_000_000 {
            return Err(Error::InvalidConfig(format!(
                "grid has {} points, beyond the supported budget",
                spec.len()
            )));
        }
        Ok(spec)
    }

    /// Full principal period `[0, 2 pi)`: the last point stops one step short
    /// of `2 pi`, so wrap-around neighbors are distinct points.
    pub fn principal(step: f64) -> Result<Self> {
        GridSpec::new(0.0, TAU - 0.5 * step, step)
    }

    /// Symmetric window around `center`.
    pub fn around(center: f64, half_span: f64, step: f64) -> Result<Self> {
        GridSpec::new(center - half_span, center + half_span, step)
    }

    pub fn len(&self) -> usize {
        ((self.x_max - self.x_min) / self.step + 1e-9) as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.step
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// True when the grid spans a full `2 pi` period, so peak search treats
    /// it as circular.
    pub fn covers_full_period(&self) -> bool {
        self.x_max - self.x_min >= TAU - 1.5 * self.step
    }
}

/// Acquisition facts the extraction step needs alongside the values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumMeta {
    pub magnification: i64,
    pub mode: AcquisitionMode,
    pub window_a: f64,
}

/// A spectrum evaluated on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumGrid {
    grid: GridSpec,
    xs: Vec<f64>,
    values: Vec<Complex64>,
    meta: SpectrumMeta,
}

impl SpectrumGrid {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn meta(&self) -> &SpectrumMeta {
        &self.meta
    }

    /// Rebuilds a spectrum from stored rows (artifact ingestion).
    pub fn from_parts(grid: GridSpec, values: Vec<Complex64>, meta: SpectrumMeta) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} spectrum values on a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(SpectrumGrid {
            xs: grid.points(),
            grid,
            values,
            meta,
        })
    }
}

/// Evaluates `S(x) = sum_t w(t) f(t) e^{i x t}` over the grid.
pub fn compute_spectrum(series: &SignalSeries, grid: &GridSpec) -> Result<SpectrumGrid> {
    let xs = grid.points();
    let mut values = Vec::with_capacity(xs.len());
    for &x in &xs {
        let mut acc = Complex64::new(0.0, 0.0);
        for s in series.samples() {
            let (sin, cos) = (x * s.t as f64).sin_cos();
            acc += s.windowed * Complex64::new(cos, sin);
        }
        values.push(acc);
    }
    let cfg = series.config();
    Ok(SpectrumGrid {
        grid: *grid,
        xs,
        values,
        meta: SpectrumMeta {
            magnification: cfg.magnification,
            mode: cfg.mode,
            window_a: cfg.window.a(),
        },
    })
}

fn gauss(u: f64, a: f64) -> f64 {
    (-u * u / (4.0 * a * a)).exp()
}

/// Infinite-window overlap spectrum: `(sqrt(pi)/2a) [G(x - 2 m theta) +
/// G(x + 2 m theta)]` with `G(u) = exp(-u^2 / 4 a^2)`.
pub fn analytic_spectrum_overlap(x: f64, m: i64, theta: f64, a: f64) -> f64 {
    let c = 2.0 * m as f64 * theta;
    std::f64::consts::PI.sqrt() / (2.0 * a) * (gauss(x - c, a) + gauss(x + c, a))
}

/// Infinite-window probability spectrum: `(sqrt(pi)/4a) [G(x - 4 m theta) +
/// G(x + 4 m theta) + 2 G(x)]`. The `2 G(x)` term is the DC peak every
/// return-probability signal carries.
pub fn analytic_spectrum_probability(x: f64, m: i64, theta: f64, a: f64) -> f64 {
    let c = 4.0 * m as f64 * theta;
    std::f64::consts::PI.sqrt() / (4.0 * a)
        * (gauss(x - c, a) + gauss(x + c, a) + 2.0 * gauss(x, a))
}

/// Periodization of the closed forms onto the circle: sums images
/// `x + 2 pi k` for `|k| <= images`. The infinite discrete-time sum equals
/// this periodized form exactly (Gaussian windows make the image sum
/// converge superexponentially), so truncated spectra should match it within
/// the cutoff bound.
pub fn analytic_spectrum_periodic(
    x: f64,
    m: i64,
    theta: f64,
    a: f64,
    mode: AcquisitionMode,
    images: u32,
) -> f64 {
    let mut acc = 0.0;
    for k in -(images as i64)..=(images as i64) {
        let xk = x + TAU * k as f64;
        acc += match mode {
            AcquisitionMode::DirectProbability => analytic_spectrum_probability(xk, m, theta, a),
            _ => analytic_spectrum_overlap(xk, m, theta, a),
        };
    }
    acc
}

/// Exact spectrum of the one-sided eigenvector signal truncated at
/// `t_max = 1`: `S(x) = 1 + 2 e^{-a^2} cos(x - 2 m theta)`.
pub fn analytic_spectrum_t1(x: f64, m: i64, theta: f64, a: f64) -> f64 {
    1.0 + 2.0 * (-a * a).exp() * (x - 2.0 * m as f64 * theta).cos()
}

/// Detection-floor policy for peak search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FloorPolicy {
    /// Keep peaks at least `median + 5 MAD` of the spectrum values. Robust
    /// for narrow peaks over a flat baseline (long windows).
    MedianMad,
    /// No floor. Needed for short windows (small `t_max`), where the
    /// spectrum is a broad cosine and the median itself rides the signal.
    None,
}

/// Peak-search knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakSearchOptions {
    pub floor: FloorPolicy,
    /// Drop peaks closer than this to `x = 0` (circular distance on periodic
    /// grids). Used to mask the DC peak of probability spectra.
    pub zero_exclusion_half_width: Option<f64>,
}

impl Default for PeakSearchOptions {
    fn default() -> Self {
        PeakSearchOptions {
            floor: FloorPolicy::MedianMad,
            zero_exclusion_half_width: None,
        }
    }
}

/// One located spectral peak.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakEstimate {
    /// Parabolically refined position.
    pub x_peak: f64,
    /// Parabolically refined height.
    pub height: f64,
    /// Grid index of the unrefined maximum.
    pub grid_index: usize,
    /// Half-width of the position uncertainty quoted from the grid step.
    pub half_width: f64,
}

fn median_of(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Locates strict local maxima of `Re S(x)` with the default options:
/// median + 5 MAD floor, and (optionally) a DC exclusion zone of half-width
/// `3 a` taken from the spectrum's window parameter.
pub fn find_peaks(spectrum: &SpectrumGrid, exclude_zero: bool) -> Result<Vec<PeakEstimate>> {
    find_peaks_with(
        spectrum,
        &PeakSearchOptions {
            floor: FloorPolicy::MedianMad,
            zero_exclusion_half_width: exclude_zero.then_some(3.0 * spectrum.meta.window_a),
        },
    )
}

/// Peak search with explicit options. Returns peaks sorted by descending
/// height; errors with [`Error::NoPeak`] when nothing qualifies (flat or
/// floor-dominated spectra).
pub fn find_peaks_with(
    spectrum: &SpectrumGrid,
    opts: &PeakSearchOptions,
) -> Result<Vec<PeakEstimate>> {
    let v: Vec<f64> = spectrum.values.iter().map(|z| z.re).collect();
    let len = v.len();
    if len < 3 {
        return Err(Error::InvalidConfig(
            "peak search needs at least 3 grid points".into(),
        ));
    }
    let periodic = spectrum.grid.covers_full_period();
    let floor = match opts.floor {
        FloorPolicy::MedianMad => {
            let med = median_of(v.clone());
            let mad = median_of(v.iter().map(|x| (x - med).abs()).collect());
            med + 5.0 * mad
        }
        FloorPolicy::None => f64::NEG_INFINITY,
    };
    let step = spectrum.grid.step;
    let mut peaks = Vec::new();
    for i in 0..len {
        let (prev, next) = if periodic {
            ((i + len - 1) % len, (i + 1) % len)
        } else {
            if i == 0 || i == len - 1 {
                continue;
            }
            (i - 1, i + 1)
        };
        if !(v[i] > v[prev] && v[i] > v[next] && v[i] >= floor) {
            continue;
        }
        if let Some(hw) = opts.zero_exclusion_half_width {
            let x = spectrum.xs[i];
            let dist = if periodic {
                let d = x.rem_euclid(TAU);
                d.min(TAU - d)
            } else {
                x.abs()
            };
            if dist < hw {
                continue;
            }
        }
        let b = 0.5 * (v[next] - v[prev]);
        let c2 = 0.5 * (v[next] + v[prev] - 2.0 * v[i]);
        let (offset, height) = if c2 < 0.0 {
            let u = (-b / (2.0 * c2)).clamp(-0.5, 0.5);
            (u, v[i] - b * b / (4.0 * c2))
        } else {
            (0.0, v[i])
        };
        let mut x_peak = spectrum.xs[i] + offset * step;
        if periodic {
            x_peak = x_peak.rem_euclid(TAU);
        }
        peaks.push(PeakEstimate {
            x_peak,
            height,
            grid_index: i,
            half_width: 0.5 * step,
        });
    }
    if peaks.is_empty() {
        return Err(Error::NoPeak(
            "no strict local maximum above the detection floor".into(),
        ));
    }
    peaks.sort_by(|a, b| b.height.partial_cmp(&a.height).unwrap());
    Ok(peaks)
}

/// Angle change per unit `theta` at this magnification and mode.
fn unwrap_factor(meta: &SpectrumMeta) -> Result<f64> {
    if meta.magnification == 0 {
        return Err(Error::InvalidConfig(
            "magnification 0 carries no angle information".into(),
        ));
    }
    let per_theta = match meta.mode {
        AcquisitionMode::DirectProbability => 4.0,
        _ => 2.0,
    };
    Ok(per_theta * meta.magnification.unsigned_abs() as f64)
}

/// All principal angles in `[0, pi/2]` whose spectral peak would sit at
/// `x_peak`: both mirror families `+-x_peak` shifted by whole periods.
fn theta_candidates(x_peak: f64, meta: &SpectrumMeta) -> Result<Vec<f64>> {
    let g = unwrap_factor(meta)?;
    let max_k = (g / 4.0).ceil() as i64 + 1;
    let tol = 1e-9;
    let mut cands = Vec::new();
    for family in [x_peak.rem_euclid(TAU), (TAU - x_peak).rem_euclid(TAU)] {
        for k in 0..=max_k {
            let theta = (family + TAU * k as f64) / g;
            if (-tol..=std::f64::consts::FRAC_PI_2 + tol).contains(&theta) {
                cands.push(theta.clamp(0.0, std::f64::consts::FRAC_PI_2));
            }
        }
    }
    cands.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cands.dedup_by(|a, b| (*a - *b).abs() < 1e-10);
    Ok(cands)
}

fn top_peak(spectrum: &SpectrumGrid) -> Result<PeakEstimate> {
    let exclude_dc = spectrum.meta.mode == AcquisitionMode::DirectProbability;
    Ok(find_peaks(spectrum, exclude_dc)?[0])
}

/// Extracts the principal angle from the dominant peak, requiring the
/// unwrap to be unambiguous. At magnification 1 in overlap mode the peak
/// position is `2 theta < pi`, so exactly one candidate survives; higher
/// magnifications generally need [`extract_theta_hinted`].
pub fn extract_theta(spectrum: &SpectrumGrid) -> Result<f64> {
    let peak = top_peak(spectrum)?;
    let cands = theta_candidates(peak.x_peak, &spectrum.meta)?;
    match cands.len() {
        1 => Ok(cands[0]),
        n => Err(Error::AmbiguousUnwrap {
            m: spectrum.meta.magnification,
            candidates: n,
        }),
    }
}

/// Extracts the principal angle, keeping only candidates inside
/// `[lo, hi]` (a bracket from a previous, coarser estimate).
///
/// Candidate families are spaced `pi / g` apart, so a bracket narrower than
/// that normally contains one survivor.  The exception is a mirror collision:
/// when `g * theta` sits near a multiple of `pi`, the peak and its reflection
/// produce a close pair straddling the true angle.  Both members then agree
/// with the bracket to within the collision gap, and the one nearest the
/// bracket centre (the previous rung's estimate) is the consistent branch,
/// so ties resolve toward the centre rather than failing.
pub fn extract_theta_hinted(spectrum: &SpectrumGrid, lo: f64, hi: f64) -> Result<f64> {
    let peak = top_peak(spectrum)?;
    let cands: Vec<f64> = theta_candidates(peak.x_peak, &spectrum.meta)?
        .into_iter()
        .filter(|t| (lo - 1e-12..=hi + 1e-12).contains(t))
        .collect();
    if cands.is_empty() {
        return Err(Error::LadderMismatch {
            m: spectrum.meta.magnification,
            lo,
            hi,
        });
    }
    let center = 0.5 * (lo + hi);
    Ok(cands
        .into_iter()
        .min_by(|a, b| {
            (a - center)
                .abs()
                .partial_cmp(&(b - center).abs())
                .expect("finite candidate distances")
        })
        .expect("non-empty candidate list"))
}

/// One resolved ladder rung.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RungReport {
    pub magnification: i64,
    pub x_peak: f64,
    pub theta: f64,
    /// Bracket handed to the next rung.
    pub interval: (f64, f64),
}

/// Final ladder output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaEstimate {
    pub theta_hat: f64,
    /// Half-width of the quoted uncertainty: one grid step of peak position
    /// divided by the final rung's unwrap factor.
    pub half_width: f64,
    pub magnification: i64,
    pub rungs: Vec<RungReport>,
}

/// Peak-position slack (in `x`) granted to each rung when bracketing:
/// covers parabolic-refinement error and the position bias that mirror-peak
/// tails induce at window rates `a <~ 0.1`.
const RUNG_SLACK_X: f64 = 0.02;

/// Multi-magnification refinement.
///
/// Runs one acquisition and spectrum per magnification in `schedule`
/// (ascending, starting at 1 so the first rung is unambiguous in overlap
/// mode). Each rung unwraps its peak inside the previous bracket and
/// tightens the bracket by its unwrap factor.
pub fn ladder_refine(
    amp: &Amplifier,
    base: &AcquisitionConfig,
    schedule: &[i64],
    grid_step: f64,
) -> Result<ThetaEstimate> {
    if schedule.is_empty() {
        return Err(Error::InvalidConfig("ladder schedule is empty".into()));
    }
    if schedule[0] != 1 {
        return Err(Error::InvalidConfig(
            "ladder schedule must start at magnification 1".into(),
        ));
    }
    for w in schedule.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidConfig(
                "ladder schedule must be strictly increasing".into(),
            ));
        }
    }
    let grid = GridSpec::principal(grid_step)?;
    let slack_x = RUNG_SLACK_X + 2.0 * grid_step;
    let mut bracket: Option<(f64, f64)> = None;
    let mut rungs: Vec<RungReport> = Vec::with_capacity(schedule.len());
    let mut theta = f64::NAN;
    let mut final_factor = 2.0;
    for &m in schedule {
        let mut cfg = base.clone();
        cfg.magnification = m;
        let series = acquire_series(amp, &cfg)?;
        let spectrum = compute_spectrum(&series, &grid)?;
        theta = match bracket {
            None => extract_theta(&spectrum)?,
            Some((lo, hi)) => extract_theta_hinted(&spectrum, lo, hi)?,
        };
        let factor = unwrap_factor(&spectrum.meta)?;
        final_factor = factor;
        let half = slack_x / factor;
        let interval = (
            (theta - half).max(0.0),
            (theta + half).min(std::f64::consts::FRAC_PI_2),
        );
        rungs.push(RungReport {
            magnification: m,
            x_peak: top_peak(&spectrum)?.x_peak,
            theta,
            interval,
        });
        bracket = Some(interval);
    }
    Ok(ThetaEstimate {
        theta_hat: theta,
        half_width: grid_step / final_factor,
        magnification: *schedule.last().unwrap(),
        rungs,
    })
}

//! Truncation, shot-noise, and magnification-selection bounds.
//!
//! The windowed spectrum truncated at `|t| <= t_max` differs from its
//! untruncated limit by at most `(2/a) erfc(a t_max)`, itself bounded by the
//! simpler `(2/a) exp(-(a t_max)^2)`. These bounds size the acquisition
//! window, and the binomial shot variance `(1 - alpha^2) / n_shot` sizes the
//! per-point sampling budget.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const FRAC_1_SQRT_PI: f64 = 0.5641895835477563;

/// Complementary error function for any finite real argument.
///
/// Uses the all-positive power series of `erf` below 2.5 and a Lentz-style
/// continued fraction above, with negative arguments reflected through
/// `erfc(-x) = 2 - erfc(x)`. Accurate to about 1e-14 relative error, which
/// the unit tests pin against independently computed references.
pub fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x == 0.0 {
        return 1.0;
    }
    if x < 2.5 {
        // erf(x) = (2/sqrt(pi)) e^{-x^2} sum_k (2 x^2)^k x / (1*3*...*(2k+1))
        let x2 = 2.0 * x * x;
        let mut term = x;
        let mut sum = x;
        let mut k = 0u32;
        loop {
            k += 1;
            term *= x2 / (2.0 * k as f64 + 1.0);
            sum += term;
            if term < sum * 1e-17 || k > 200 {
                break;
            }
        }
        1.0 - 2.0 * FRAC_1_SQRT_PI * (-x * x).exp() * sum
    } else {
        // erfc(x) = e^{-x^2}/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
        let tiny = 1e-300;
        let mut f = tiny;
        let mut c = f;
        let mut d = 0.0;
        let mut n = 1u32;
        loop {
            let a = if n == 1 { 1.0 } else { (n - 1) as f64 / 2.0 };
            d = x + a * d;
            if d == 0.0 {
                d = tiny;
            }
            c = x + a / c;
            if c == 0.0 {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = c * d;
            f *= delta;
            if (delta - 1.0).abs() < 1e-16 || n > 300 {
                break;
            }
            n += 1;
        }
        (-x * x).exp() * FRAC_1_SQRT_PI * f
    }
}

fn check_window(a: f64) -> Result<()> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "window decay rate a must be positive and finite, got {a}"
        )));
    }
    Ok(())
}

/// Gaussian truncation bound `(2/a) exp(-(a t_max)^2)` on the spectrum error
/// introduced by cutting the time series at `|t| <= t_max`.
pub fn cutoff_bound(a: f64, t_max: u32) -> Result<f64> {
    check_window(a)?;
    let at = a * t_max as f64;
    Ok(2.0 / a * (-at * at).exp())
}

/// Tighter truncation bound `(2/a) erfc(a t_max)`; never exceeds
/// [`cutoff_bound`].
pub fn erfc_tail_bound(a: f64, t_max: u32) -> Result<f64> {
    check_window(a)?;
    Ok(2.0 / a * erfc(a * t_max as f64))
}

/// Smallest `t_max` with `cutoff_bound(a, t_max) <= eps`, and at least 1.
pub fn min_t_for_cutoff(a: f64, eps: f64) -> Result<u32> {
    check_window(a)?;
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "cutoff target eps must be positive and finite, got {eps}"
        )));
    }
    let arg = 2.0 / (a * eps);
    if arg <= 1.0 {
        return Ok(1);
    }
    let t = (arg.ln().sqrt() / a).ceil();
    if t > 1e8 {
        return Err(Error::InvalidConfig(format!(
            "cutoff eps = {eps} needs t_max ~ {t:.3e}, beyond any sensible window"
        )));
    }
    Ok((t as u32).max(1))
}

/// Variance of the estimator `alpha_hat = 2 p_hat - 1` built from `n_shot`
/// Bernoulli trials with mean `(1 + alpha)/2`: `(1 - alpha^2) / n_shot`.
pub fn shot_variance(alpha: f64, n_shot: u64) -> Result<f64> {
    if !(alpha.is_finite() && alpha.abs() <= 1.0 + 1e-12) {
        return Err(Error::InvalidConfig(format!(
            "alpha must lie in [-1, 1], got {alpha}"
        )));
    }
    if n_shot == 0 {
        return Err(Error::InvalidConfig("n_shot must be at least 1".into()));
    }
    Ok(((1.0 - alpha * alpha) / n_shot as f64).max(0.0))
}

/// One magnification candidate: at magnification `m` the total rotation
/// `2 m t theta` sits `residual` away from the nearest multiple `n pi`.
/// Smaller residuals park the signal nearer a spectral fixed point, which is
/// where single-power (small `t_max`) estimation is most accurate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MagnificationCandidate {
    pub m: i64,
    pub n: i64,
    pub residual: f64,
}

/// Ranks magnifications `1..=m_max` by the residual `|2 m t theta - n pi|`
/// with `n` the nearest integer, ascending (ties broken by smaller `m`).
/// With `tolerance` set, candidates above it are dropped.
pub fn optimal_magnifications(
    theta: f64,
    t: u32,
    m_max: i64,
    tolerance: Option<f64>,
) -> Result<Vec<MagnificationCandidate>> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "theta must be positive and finite, got {theta}"
        )));
    }
    if t == 0 || m_max < 1 {
        return Err(Error::InvalidConfig(
            "optimal_magnifications needs t >= 1 and m_max >= 1".into(),
        ));
    }
    let pi = std::f64::consts::PI;
    let mut out = Vec::with_capacity(m_max as usize);
    for m in 1..=m_max {
        let v = 2.0 * m as f64 * t as f64 * theta;
        let n = (v / pi).round() as i64;
        let residual = (v - n as f64 * pi).abs();
        if tolerance.is_none_or(|tol| residual <= tol) {
            out.push(MagnificationCandidate { m, n, residual });
        }
    }
    out.sort_by(|a, b| {
        a.residual
            .partial_cmp(&b.residual)
            .unwrap()
            .then(a.m.cmp(&b.m))
    });
    Ok(out)
}

/// Minimal window length for one target accuracy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinTEntry {
    pub eps: f64,
    pub t_max: u32,
}

/// Bundle of window diagnostics for one `(a, t_max)` choice, serializable as
/// a JSON artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub a: f64,
    pub t_max: u32,
    pub gaussian_bound: f64,
    pub erfc_bound: f64,
    pub min_t: Vec<MinTEntry>,
}

/// Evaluates both truncation bounds at `(a, t_max)` and the minimal windows
/// for each accuracy target in `eps_targets`.
pub fn bounds_report(a: f64, t_max: u32, eps_targets: &[f64]) -> Result<BoundsReport> {
    let mut min_t = Vec::with_capacity(eps_targets.len());
    for &eps in eps_targets {
        min_t.push(MinTEntry {
            eps,
            t_max: min_t_for_cutoff(a, eps)?,
        });
    }
    Ok(BoundsReport {
        a,
        t_max,
        gaussian_bound: cutoff_bound(a, t_max)?,
        erfc_bound: erfc_tail_bound(a, t_max)?,
        min_t,
    })
}

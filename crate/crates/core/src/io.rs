//! Artifact input/output.
//!
//! Numeric tables go to CSV with 17 significant digits, which reparses to
//! the exact same `f64` bits; each CSV carries a JSON sidecar
//! (`foo.csv` -> `foo.meta.json`) holding the configuration that produced
//! it, so artifacts are self-describing and ingestable without the original
//! run. Reports (peaks, bounds, estimates, manifests) go to pretty JSON.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::acquire::{AcquisitionConfig, SignalSample, SignalSeries};
use crate::error::{Error, Result};
use crate::spectrum::{GridSpec, SpectrumGrid, SpectrumMeta};

/// Formats with 17 significant digits; reparsing recovers the exact value.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Parses a float, reporting the 1-based artifact line on failure.
pub fn parse_f64(text: &str, line: usize) -> Result<f64> {
    text.trim().parse().map_err(|_| Error::Parse {
        line,
        message: format!("cannot parse number \"{text}\""),
    })
}

/// Sidecar path for a table: `foo.csv` -> `foo.meta.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("meta.json")
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Writes any report as pretty JSON.
pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidConfig(format!("cannot serialize: {e}")))?;
    write_text(path, &(text + "\n"))
}

/// Reads a JSON report back.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        line: e.line(),
        message: format!("{}: {e}", path.display()),
    })
}

const SERIES_HEADER: &str = "t,raw_re,raw_im,windowed_re,windowed_im,stderr";

/// Writes a signal series as CSV plus a config sidecar.
pub fn write_series_csv(series: &SignalSeries, path: &Path) -> Result<()> {
    let mut out = String::from(SERIES_HEADER);
    out.push('\n');
    for s in series.samples() {
        let stderr = s.stderr.map(fmt_f64).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            s.t,
            fmt_f64(s.raw.re),
            fmt_f64(s.raw.im),
            fmt_f64(s.windowed.re),
            fmt_f64(s.windowed.im),
            stderr
        ));
    }
    write_text(path, &out)?;
    write_json(series.config(), &sidecar_path(path))
}

/// Reads a series CSV and its sidecar back into a validated series.
pub fn read_series_csv(path: &Path) -> Result<SignalSeries> {
    let config: AcquisitionConfig = read_json(&sidecar_path(path))?;
    let text = read_text(path)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == SERIES_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header `{SERIES_HEADER}`"),
            })
        }
    }
    let mut samples = Vec::new();
    for (idx, row) in lines {
        let line = idx + 1;
        if row.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::Parse {
                line,
                message: format!("expected 6 fields, got {}", fields.len()),
            });
        }
        let t: i64 = fields[0].trim().parse().map_err(|_| Error::Parse {
            line,
            message: format!("cannot parse time \"{}\"", fields[0]),
        })?;
        let raw = Complex64::new(parse_f64(fields[1], line)?, parse_f64(fields[2], line)?);
        let windowed = Complex64::new(parse_f64(fields[3], line)?, parse_f64(fields[4], line)?);
        let stderr = if fields[5].trim().is_empty() {
            None
        } else {
            Some(parse_f64(fields[5], line)?)
        };
        samples.push(SignalSample {
            t,
            raw,
            windowed,
            stderr,
        });
    }
    SignalSeries::from_parts(config, samples)
}

/// Sidecar payload of a spectrum table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct SpectrumSidecar {
    pub grid: GridSpec,
    pub meta: SpectrumMeta,
}

const SPECTRUM_HEADER: &str = "x,s_re,s_im";

/// Writes a spectrum as CSV plus a grid/meta sidecar.
pub fn write_spectrum_csv(spectrum: &SpectrumGrid, path: &Path) -> Result<()> {
    let mut out = String::from(SPECTRUM_HEADER);
    out.push('\n');
    for (x, v) in spectrum.xs().iter().zip(spectrum.values()) {
        out.push_str(&format!(
            "{},{},{}\n",
            fmt_f64(*x),
            fmt_f64(v.re),
            fmt_f64(v.im)
        ));
    }
    write_text(path, &out)?;
    let sidecar = SpectrumSidecar {
        grid: *spectrum.grid(),
        meta: *spectrum.meta(),
    };
    write_json(&sidecar, &sidecar_path(path))
}

/// Reads a spectrum CSV and its sidecar; the stored abscissas must agree
/// with the sidecar grid.
pub fn read_spectrum_csv(path: &Path) -> Result<SpectrumGrid> {
    let sidecar: SpectrumSidecar = read_json(&sidecar_path(path))?;
    let text = read_text(path)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == SPECTRUM_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header `{SPECTRUM_HEADER}`"),
            })
        }
    }
    let mut values = Vec::new();
    for (idx, row) in lines {
        let line = idx + 1;
        if row.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line,
                message: format!("expected 3 fields, got {}", fields.len()),
            });
        }
        let x = parse_f64(fields[0], line)?;
        if values.len() >= sidecar.grid.len() || (x - sidecar.grid.point(values.len())).abs() > 1e-9
        {
            return Err(Error::Parse {
                line,
                message: format!("abscissa {x} disagrees with the sidecar grid"),
            });
        }
        values.push(Complex64::new(
            parse_f64(fields[1], line)?,
            parse_f64(fields[2], line)?,
        ));
    }
    SpectrumGrid::from_parts(sidecar.grid, values, sidecar.meta)
}

//! Amplitude and overlap estimation for pure quantum states.
//!
//! The pipeline simulates Grover-style amplification of a two-state problem,
//! records the time-indexed overlap (or return-probability) signal under a
//! Gaussian window, and recovers the principal angle between the two states
//! from the peak of a windowed discrete Fourier transform. On top of the
//! estimator sit closed-form spectra, truncation and shot-noise bounds, a
//! depolarizing-noise model with a density-matrix cross-check, and CSV/JSON
//! artifact io.
//!
//! Modules are layered bottom-up:
//!
//! * [`statevec`] - dense state vectors, gate application, circuits,
//!   multi-controlled gate decomposition into one- and two-qubit gates.
//! * [`grover`] - state preparations, reflection operators, the amplification
//!   operator, and its invariant-plane eigenbasis.
//! * [`acquire`] - time-series acquisition of the windowed signal, exact or
//!   shot-sampled, optionally under gate noise.
//! * [`spectrum`] - windowed Fourier transform on an angle grid, peak finding,
//!   and angle extraction including the multi-magnification ladder.
//! * [`bounds`] - truncation bounds, minimal window lengths, shot variance,
//!   and magnification selection.
//! * [`noise`] - two-qubit depolarizing faults: trajectory sampling and the
//!   exact density-matrix reference.
//! * [`observable`] - Pauli-string and observable estimation driven by the
//!   angle estimator.
//! * [`io`] - lossless CSV/JSON artifact round-trips.
//! * [`oracle`] - slow dense-matrix circuit semantics for cross-checking the
//!   fast kernels.
//!
//! # Example
//!
//! Plant an angle between two preparations, amplify, acquire the windowed
//! series, and read the angle back off the spectral peak:
//!
//! ```
//! use qae_core::acquire::{acquire_series, AcquisitionConfig};
//! use qae_core::grover::{build_amplifier, StatePrep};
//! use qae_core::spectrum::{compute_spectrum, extract_theta, GridSpec};
//!
//! let (psi, phi) = StatePrep::theta_pair(2, 0.6)?;
//! let amp = build_amplifier(&psi, &phi)?;
//! let cfg = AcquisitionConfig::exact_overlap(1, 40, 0.05)?;
//! let series = acquire_series(&amp, &cfg)?;
//! let spectrum = compute_spectrum(&series, &GridSpec::principal(1e-3)?)?;
//! let theta = extract_theta(&spectrum)?;
//! assert!((theta - 0.6).abs() < 1e-3);
//! # Ok::<(), qae_core::Error>(())
//! ```

pub mod acquire;
pub mod bounds;
pub mod error;
pub mod gates;
pub mod grover;
pub mod io;
pub mod noise;
pub mod observable;
pub mod oracle;
pub mod spectrum;
pub mod statevec;

pub use error::{Error, Result};

//! Pauli-string observables estimated through the angle pipeline.
//!
//! For a Pauli word `P` and a state psi, `phi = P psi` is prepared by
//! appending one layer of Pauli gates, and `<psi|P|psi> = <psi|phi> =
//! +-cos(theta)` with theta the principal angle of the pair. The spectral
//! ladder estimates theta, giving the expectation up to one caveat: overlap
//! signals at integer powers are invariant under `theta -> pi - theta`, so
//! the estimator sees only `|cos(theta)|`. Magnitudes are faithful; the sign
//! is not identifiable along this route and estimates are reported on the
//! nonnegative branch. Degenerate pairs (expectation within tolerance of
//! -1, 0, or +1), where no rotation plane exists, are detected from the
//! dense overlap and returned exactly, with their sign.

use serde::{Deserialize, Serialize};

use crate::acquire::AcquisitionConfig;
use crate::error::{Error, Result};
use crate::gates::{self, Mat2};
use crate::grover::{build_amplifier, StatePrep, IDENTICAL_TOL, ORTHO_TOL};
use crate::spectrum::{ladder_refine, ThetaEstimate};
use crate::statevec::{Circuit, GateOp};

/// One single-qubit Pauli factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PauliFactor {
    I,
    X,
    Y,
    Z,
}

impl PauliFactor {
    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(PauliFactor::I),
            'X' => Some(PauliFactor::X),
            'Y' => Some(PauliFactor::Y),
            'Z' => Some(PauliFactor::Z),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            PauliFactor::I => 'I',
            PauliFactor::X => 'X',
            PauliFactor::Y => 'Y',
            PauliFactor::Z => 'Z',
        }
    }

    pub fn matrix(self) -> Mat2 {
        match self {
            PauliFactor::I => gates::i(),
            PauliFactor::X => gates::x(),
            PauliFactor::Y => gates::y(),
            PauliFactor::Z => gates::z(),
        }
    }
}

/// A Pauli word such as `IIZZ`; character `i` acts on qubit `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PauliString {
    factors: Vec<PauliFactor>,
}

impl PauliString {
    pub fn parse(word: &str) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::InvalidConfig("empty Pauli word".into()));
        }
        let mut factors = Vec::with_capacity(word.len());
        for c in word.chars() {
            factors.push(PauliFactor::from_char(c).ok_or_else(|| {
                Error::InvalidConfig(format!("invalid Pauli letter '{c}' in word \"{word}\""))
            })?);
        }
        Ok(PauliString { factors })
    }

    pub fn factors(&self) -> &[PauliFactor] {
        &self.factors
    }

    pub fn n_qubits(&self) -> usize {
        self.factors.len()
    }

    pub fn is_identity(&self) -> bool {
        self.factors.iter().all(|f| *f == PauliFactor::I)
    }

    /// The non-identity factors as gate ops.
    pub fn gate_ops(&self) -> Vec<GateOp> {
        self.factors
            .iter()
            .enumerate()
            .filter(|(_, f)| **f != PauliFactor::I)
            .map(|(q, f)| GateOp::Single {
                target: q,
                matrix: f.matrix(),
            })
            .collect()
    }
}

impl std::fmt::Display for PauliString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for factor in &self.factors {
            write!(f, "{}", factor.to_char())?;
        }
        Ok(())
    }
}

/// One weighted term of an observable.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableTerm {
    pub coeff: f64,
    pub pauli: PauliString,
}

/// A real linear combination of Pauli words on a common register.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSpec {
    terms: Vec<ObservableTerm>,
}

impl ObservableSpec {
    pub fn new(terms: Vec<ObservableTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidConfig("observable has no terms".into()));
        }
        let n = terms[0].pauli.n_qubits();
        for t in &terms {
            if t.pauli.n_qubits() != n {
                return Err(Error::DimensionMismatch(format!(
                    "observable mixes {}-qubit and {n}-qubit Pauli words",
                    t.pauli.n_qubits()
                )));
            }
            if !t.coeff.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "non-finite coefficient {} on {}",
                    t.coeff, t.pauli
                )));
            }
        }
        Ok(ObservableSpec { terms })
    }

    pub fn terms(&self) -> &[ObservableTerm] {
        &self.terms
    }

    pub fn n_qubits(&self) -> usize {
        self.terms[0].pauli.n_qubits()
    }

    /// Parses a plain-text listing: one `coefficient pauli_word` pair per
    /// line; blank lines and `#` comments are skipped.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let mut parts = body.split_whitespace();
            let coeff_text = parts.next().unwrap();
            let word = parts.next().ok_or(Error::Parse {
                line: line_no,
                message: "expected `coefficient pauli_word`".into(),
            })?;
            if parts.next().is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    message: "trailing tokens after the Pauli word".into(),
                });
            }
            let coeff: f64 = coeff_text.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("cannot parse coefficient \"{coeff_text}\""),
            })?;
            let pauli = PauliString::parse(word).map_err(|e| Error::Parse {
                line: line_no,
                message: e.to_string(),
            })?;
            terms.push(ObservableTerm { coeff, pauli });
        }
        ObservableSpec::new(terms)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for t in &self.terms {
            out.push_str(&format!("{:+} {}\n", t.coeff, t.pauli));
        }
        out
    }
}

/// Preparation for `phi = P psi`: the psi circuit followed by the Pauli
/// layer.
pub fn pauli_phi_prep(psi: &StatePrep, pauli: &PauliString) -> Result<StatePrep> {
    if pauli.n_qubits() != psi.n_qubits() {
        return Err(Error::DimensionMismatch(format!(
            "{}-qubit Pauli word on a {}-qubit preparation",
            pauli.n_qubits(),
            psi.n_qubits()
        )));
    }
    let mut circuit: Circuit = psi.circuit().clone();
    for op in pauli.gate_ops() {
        circuit.push(op)?;
    }
    Ok(StatePrep::from_circuit(
        circuit,
        format!("{} * {}", pauli, psi.label()),
    ))
}

/// How one Pauli expectation was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateRoute {
    /// Identity word: contributes exactly 1.
    Identity,
    /// Dense overlap within tolerance of -1, 0, or +1: returned exactly.
    DegenerateExact,
    /// Spectral ladder on the (psi, P psi) pair.
    SpectralLadder,
}

/// One estimated Pauli expectation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliEstimate {
    /// The estimate of `<psi|P|psi>`. Ladder-route values sit on the
    /// nonnegative branch (see the module docs); degenerate values are
    /// signed.
    pub value: f64,
    pub route: EstimateRoute,
    /// Ladder details when the spectral route ran.
    pub theta: Option<ThetaEstimate>,
    /// True when the route cannot identify the sign of the expectation.
    pub sign_ambiguous: bool,
}

/// Estimates `<psi|P|psi>` through the angle pipeline.
///
/// `base` fixes the acquisition parameters of each ladder rung (its
/// magnification field is overridden per rung); `schedule` and `grid_step`
/// are handed to [`ladder_refine`].
pub fn estimate_pauli_expectation(
    psi: &StatePrep,
    pauli: &PauliString,
    base: &AcquisitionConfig,
    schedule: &[i64],
    grid_step: f64,
) -> Result<PauliEstimate> {
    if pauli.is_identity() {
        return Ok(PauliEstimate {
            value: 1.0,
            route: EstimateRoute::Identity,
            theta: None,
            sign_ambiguous: false,
        });
    }
    let phi_prep = pauli_phi_prep(psi, pauli)?;
    // Dense overlap, used only to detect degenerate pairs where the
    // amplification plane does not exist and the pipeline cannot run.
    let psi_ket = psi.prepare()?;
    let phi_ket = phi_prep.prepare()?;
    let dense = psi_ket.inner(&phi_ket)?;
    debug_assert!(dense.im.abs() < 1e-9, "Pauli expectation must be real");
    if dense.norm() < ORTHO_TOL {
        return Ok(PauliEstimate {
            value: 0.0,
            route: EstimateRoute::DegenerateExact,
            theta: None,
            sign_ambiguous: false,
        });
    }
    if dense.norm() > 1.0 - IDENTICAL_TOL {
        return Ok(PauliEstimate {
            value: if dense.re >= 0.0 { 1.0 } else { -1.0 },
            route: EstimateRoute::DegenerateExact,
            theta: None,
            sign_ambiguous: false,
        });
    }
    let amp = build_amplifier(psi, &phi_prep)?;
    let est = ladder_refine(&amp, base, schedule, grid_step)?;
    Ok(PauliEstimate {
        value: est.theta_hat.cos(),
        route: EstimateRoute::SpectralLadder,
        theta: Some(est),
        sign_ambiguous: true,
    })
}

/// One term of an observable estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermEstimate {
    pub coeff: f64,
    pub pauli: String,
    pub estimate: PauliEstimate,
    /// `coeff * estimate.value`.
    pub contribution: f64,
}

/// Full observable estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableEstimate {
    pub value: f64,
    pub terms: Vec<TermEstimate>,
    /// True when any term came through the sign-ambiguous ladder route.
    pub sign_ambiguous: bool,
}

/// Estimates a weighted Pauli sum term by term.
pub fn estimate_observable(
    psi: &StatePrep,
    observable: &ObservableSpec,
    base: &AcquisitionConfig,
    schedule: &[i64],
    grid_step: f64,
) -> Result<ObservableEstimate> {
    if observable.n_qubits() != psi.n_qubits() {
        return Err(Error::DimensionMismatch(format!(
            "{}-qubit observable on a {}-qubit preparation",
            observable.n_qubits(),
            psi.n_qubits()
        )));
    }
    let mut terms = Vec::with_capacity(observable.terms().len());
    let mut value = 0.0;
    let mut sign_ambiguous = false;
    for term in observable.terms() {
        let estimate = estimate_pauli_expectation(psi, &term.pauli, base, schedule, grid_step)?;
        let contribution = term.coeff * estimate.value;
        value += contribution;
        sign_ambiguous |= estimate.sign_ambiguous;
        terms.push(TermEstimate {
            coeff: term.coeff,
            pauli: term.pauli.to_string(),
            estimate,
            contribution,
        });
    }
    Ok(ObservableEstimate {
        value,
        terms,
        sign_ambiguous,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevec::Ket;

    #[test]
    fn pauli_parsing_round_trips() {
        let p = PauliString::parse("IXYZ").unwrap();
        assert_eq!(p.to_string(), "IXYZ");
        assert_eq!(p.n_qubits(), 4);
        assert!(!p.is_identity());
        assert!(PauliString::parse("IXQZ").is_err());
        assert!(PauliString::parse("").is_err());
        assert!(PauliString::parse("III").unwrap().is_identity());
    }

    #[test]
    fn observable_text_round_trips() {
        let text = "# energy\n0.5 IIZZ\n-1.25 XIXI\n\n0.75 IIII # identity\n";
        let obs = ObservableSpec::parse_text(text).unwrap();
        assert_eq!(obs.terms().len(), 3);
        assert_eq!(obs.n_qubits(), 4);
        let again = ObservableSpec::parse_text(&obs.render()).unwrap();
        assert_eq!(obs, again);
    }

    #[test]
    fn observable_parse_errors_carry_line_numbers() {
        let err = ObservableSpec::parse_text("0.5 IIZZ\nbogus\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
        assert!(ObservableSpec::parse_text("0.5 IIZZ\n0.5 IZ\n").is_err());
        assert!(ObservableSpec::parse_text("").is_err());
    }

    #[test]
    fn phi_prep_applies_the_pauli_layer() {
        let psi = StatePrep::random(3, 3, 5).unwrap();
        let pauli = PauliString::parse("XIZ").unwrap();
        let phi = pauli_phi_prep(&psi, &pauli).unwrap();
        let mut expected = psi.prepare().unwrap();
        for op in pauli.gate_ops() {
            expected.apply_gate(&op).unwrap();
        }
        let got = phi.prepare().unwrap();
        for (a, b) in got.amplitudes().iter().zip(expected.amplitudes()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn degenerate_expectations_are_exact() {
        // |01>: X on qubit 0 only. Z on qubit 0 gives -1, Z on qubit 1 gives
        // +1, their sum is 0, and X on qubit 0 gives expectation 0.
        let mut circuit = Circuit::new(2).unwrap();
        circuit
            .push(GateOp::Single {
                target: 0,
                matrix: gates::x(),
            })
            .unwrap();
        let psi = StatePrep::from_circuit(circuit, "onezero");
        let base = AcquisitionConfig::exact_overlap(1, 40, 0.05).unwrap();

        let z0 =
            estimate_pauli_expectation(&psi, &PauliString::parse("ZI").unwrap(), &base, &[1], 1e-3)
                .unwrap();
        assert_eq!(z0.value, -1.0);
        assert_eq!(z0.route, EstimateRoute::DegenerateExact);
        assert!(!z0.sign_ambiguous);

        let z1 =
            estimate_pauli_expectation(&psi, &PauliString::parse("IZ").unwrap(), &base, &[1], 1e-3)
                .unwrap();
        assert_eq!(z1.value, 1.0);

        let x0 =
            estimate_pauli_expectation(&psi, &PauliString::parse("XI").unwrap(), &base, &[1], 1e-3)
                .unwrap();
        assert_eq!(x0.value, 0.0);
        assert_eq!(x0.route, EstimateRoute::DegenerateExact);

        let obs = ObservableSpec::parse_text("1 ZI\n1 IZ\n").unwrap();
        let total = estimate_observable(&psi, &obs, &base, &[1], 1e-3).unwrap();
        assert_eq!(total.value, 0.0);
        assert!(!total.sign_ambiguous);
    }

    #[test]
    fn identity_term_contributes_its_coefficient_exactly() {
        let psi = StatePrep::random(2, 3, 11).unwrap();
        let base = AcquisitionConfig::exact_overlap(1, 40, 0.05).unwrap();
        let obs = ObservableSpec::parse_text("0.75 II\n").unwrap();
        let est = estimate_observable(&psi, &obs, &base, &[1], 1e-3).unwrap();
        assert_eq!(est.value, 0.75);
        assert_eq!(est.terms[0].estimate.route, EstimateRoute::Identity);
    }

    #[test]
    fn ladder_route_recovers_the_magnitude() {
        // Ry(2*0.595) on qubit 0 of |00>: <Z0> = cos(2*0.595)? No: the state
        // is cos(.595)|0> + sin(.595)|1> on qubit 0, so <Z0> = cos(1.19).
        let angle = 0.595;
        let mut circuit = Circuit::new(2).unwrap();
        circuit
            .push(GateOp::Single {
                target: 0,
                matrix: gates::ry(2.0 * angle),
            })
            .unwrap();
        let psi = StatePrep::from_circuit(circuit, "ry");
        let pauli = PauliString::parse("ZI").unwrap();
        let base = AcquisitionConfig::exact_overlap(1, 60, 1.0 / (20.0 * std::f64::consts::SQRT_2))
            .unwrap();
        let est = estimate_pauli_expectation(&psi, &pauli, &base, &[1, 4], 1e-3).unwrap();
        assert_eq!(est.route, EstimateRoute::SpectralLadder);
        assert!(est.sign_ambiguous);
        let expect = (2.0 * angle).cos().abs();
        assert!(
            (est.value - expect).abs() < 1e-3,
            "value {} vs {expect}",
            est.value
        );
        // The dense expectation is positive here, so the branch matches.
        let dense = {
            let k = psi.prepare().unwrap();
            let mut pk = k.clone();
            for op in pauli.gate_ops() {
                pk.apply_gate(&op).unwrap();
            }
            k.inner(&pk).unwrap().re
        };
        assert!(dense > 0.0);
        assert!((est.value - dense).abs() < 1e-3);
        let _ = Ket::zero(1).unwrap();
    }
}

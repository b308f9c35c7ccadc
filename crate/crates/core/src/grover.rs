//! State preparations, reflections, and the amplification operator.
//!
//! For unit-norm states psi and phi with overlap `s = <psi|phi>`, `|s| =
//! cos(theta)` defines the principal angle `theta` in `[0, pi/2]`. The product
//! of the two reflections `A = R_phi R_psi`, with `R_v = I - 2|v><v|`, rotates
//! the plane `span{psi, phi}` by `2 theta` and acts as the identity on the
//! orthogonal complement. Powers of `A` therefore imprint integer multiples
//! of `2 theta` onto overlap signals, which is what the acquisition and
//! spectrum layers exploit.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gates;
use crate::statevec::{Circuit, GateOp, Ket};

/// Overlap magnitude below which two states are treated as orthogonal.
pub const ORTHO_TOL: f64 = 1e-9;

/// Overlap magnitude above which two states are treated as identical.
pub const IDENTICAL_TOL: f64 = 1e-9;

/// Default cap on amplification powers; guards runaway schedules.
pub const DEFAULT_MAX_POWER: i64 = 2000;

/// A unitary circuit that prepares a state from the all-zeros basis state,
/// together with a human-readable label used in artifacts.
#[derive(Debug, Clone)]
pub struct StatePrep {
    circuit: Circuit,
    label: String,
}

impl StatePrep {
    /// Wraps an arbitrary preparation circuit.
    pub fn from_circuit(circuit: Circuit, label: impl Into<String>) -> Self {
        StatePrep {
            circuit,
            label: label.into(),
        }
    }

    /// Prepares the all-zeros state (empty circuit).
    pub fn identity(n_qubits: usize) -> Result<Self> {
        Ok(StatePrep {
            circuit: Circuit::new(n_qubits)?,
            label: "zeros".into(),
        })
    }

    /// A pair of preparations whose states enclose exactly the angle `theta`:
    /// the all-zeros state and `Ry(2 theta)` on qubit 0, so the overlap is
    /// `cos(theta)` by construction. Requires `theta` in `(0, pi)`; values
    /// at or beyond `pi/2` yield a negative overlap whose principal angle is
    /// `pi - theta`.
    pub fn theta_pair(n_qubits: usize, theta: f64) -> Result<(Self, Self)> {
        if !(theta > 0.0 && theta < std::f64::consts::PI) {
            return Err(Error::InvalidConfig(format!(
                "theta_pair needs theta in (0, pi), got {theta}"
            )));
        }
        let psi = StatePrep::identity(n_qubits)?;
        let mut circuit = Circuit::new(n_qubits)?;
        circuit.push(GateOp::Single {
            target: 0,
            matrix: gates::ry(2.0 * theta),
        })?;
        let phi = StatePrep {
            circuit,
            label: format!("ry({:.6})", 2.0 * theta),
        };
        Ok((psi, phi))
    }

    /// Seeded pseudo-random preparation: `depth` layers, each one composed
    /// single-qubit `Rz Ry Rz` rotation per qubit followed by a CNOT ladder.
    pub fn random(n_qubits: usize, depth: usize, seed: u64) -> Result<Self> {
        let mut circuit = Circuit::new(n_qubits)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tau = std::f64::consts::TAU;
        for _ in 0..depth {
            for q in 0..n_qubits {
                let a = rng.gen::<f64>() * tau;
                let b = rng.gen::<f64>() * tau;
                let c = rng.gen::<f64>() * tau;
                let m =
                    gates::mat_mul(&gates::rz(c), &gates::mat_mul(&gates::ry(b), &gates::rz(a)));
                circuit.push(GateOp::Single {
                    target: q,
                    matrix: m,
                })?;
            }
            for q in 0..n_qubits.saturating_sub(1) {
                circuit.push(GateOp::Cnot {
                    control: q,
                    target: q + 1,
                })?;
            }
        }
        Ok(StatePrep {
            circuit,
            label: format!("random(depth={depth}, seed={seed})"),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.circuit.n_qubits()
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Runs the preparation on the all-zeros state.
    pub fn prepare(&self) -> Result<Ket> {
        let mut ket = Ket::zero(self.n_qubits())?;
        ket.apply_circuit(&self.circuit)?;
        Ok(ket)
    }
}

/// Reflection `R_v = I - 2 |v><v|` about the state prepared by `prep`,
/// realized as a circuit: un-prepare, flip the sign of the all-zeros
/// component (X conjugated multi-controlled Z), re-prepare.
#[derive(Debug, Clone)]
pub struct Reflector {
    prep: StatePrep,
    circuit: Circuit,
}

/// Builds the reflection circuit about `prep`'s state.
pub fn build_reflector(prep: &StatePrep) -> Result<Reflector> {
    let n = prep.n_qubits();
    let mut circuit = prep.circuit().adjoint();
    for q in 0..n {
        circuit.push(GateOp::Single {
            target: q,
            matrix: gates::x(),
        })?;
    }
    circuit.push(GateOp::Mcz {
        controls: (0..n - 1).collect(),
        target: n - 1,
    })?;
    for q in 0..n {
        circuit.push(GateOp::Single {
            target: q,
            matrix: gates::x(),
        })?;
    }
    circuit.append(prep.circuit())?;
    Ok(Reflector {
        prep: prep.clone(),
        circuit,
    })
}

impl Reflector {
    pub fn n_qubits(&self) -> usize {
        self.prep.n_qubits()
    }

    pub fn prep(&self) -> &StatePrep {
        &self.prep
    }

    /// The reflection as a circuit on the bare register.
    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    /// The reflection controlled on one ancilla, on a register widened to
    /// `n + 1` qubits with the ancilla at index `n`. Only the central sign
    /// flip acquires the extra control; the preparation conjugation cancels
    /// on the control-off branch, so the whole block is controlled exactly.
    pub fn controlled_circuit(&self) -> Result<Circuit> {
        let n = self.n_qubits();
        let ancilla = n;
        let mut out = self.prep.circuit().adjoint().embedded(n + 1, 0)?;
        for q in 0..n {
            out.push(GateOp::Single {
                target: q,
                matrix: gates::x(),
            })?;
        }
        let mut controls: Vec<usize> = (0..n - 1).collect();
        controls.push(ancilla);
        out.push(GateOp::Mcz {
            controls,
            target: n - 1,
        })?;
        for q in 0..n {
            out.push(GateOp::Single {
                target: q,
                matrix: gates::x(),
            })?;
        }
        out.append(&self.prep.circuit().embedded(n + 1, 0)?)?;
        Ok(out)
    }
}

/// Orthonormal eigenbasis of the invariant plane.
///
/// `y_plus` and `y_minus` are the `exp(+2i theta)` and `exp(-2i theta)`
/// eigenvectors of the amplification operator, normalized so that
/// `<psi|y_plus> = +i/sqrt(2)` and `<psi|y_minus> = -i/sqrt(2)`. `psi0 =
/// (y_plus + y_minus)/sqrt(2)` is the in-plane state orthogonal to psi whose
/// overlap signal is exactly `cos(2 m t theta)` at integer powers.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    pub y_plus: Ket,
    pub y_minus: Ket,
    pub psi0: Ket,
    /// Principal angle of the pair.
    pub theta: f64,
    /// Phase of the raw overlap `<psi|phi>`.
    pub delta: f64,
}

/// The amplification operator `A = R_phi R_psi` for one state pair, with the
/// dense pair data cached for reference comparisons.
#[derive(Debug, Clone)]
pub struct Amplifier {
    r_psi: Reflector,
    r_phi: Reflector,
    psi: Ket,
    phi: Ket,
    overlap: Complex64,
    theta: f64,
    max_power: i64,
}

/// Builds the amplifier for a pair of same-width preparations.
///
/// Errors with [`Error::OrthogonalStates`] when the overlap magnitude is
/// below [`ORTHO_TOL`], since no rotation plane exists there.
pub fn build_amplifier(prep_psi: &StatePrep, prep_phi: &StatePrep) -> Result<Amplifier> {
    if prep_psi.n_qubits() != prep_phi.n_qubits() {
        return Err(Error::DimensionMismatch(format!(
            "state pair on {} and {} qubits",
            prep_psi.n_qubits(),
            prep_phi.n_qubits()
        )));
    }
    let psi = prep_psi.prepare()?;
    let phi = prep_phi.prepare()?;
    let overlap = psi.inner(&phi)?;
    let c = overlap.norm();
    if c < ORTHO_TOL {
        return Err(Error::OrthogonalStates { overlap: c });
    }
    let theta = c.min(1.0).acos();
    Ok(Amplifier {
        r_psi: build_reflector(prep_psi)?,
        r_phi: build_reflector(prep_phi)?,
        psi,
        phi,
        overlap,
        theta,
        max_power: DEFAULT_MAX_POWER,
    })
}

impl Amplifier {
    pub fn n_qubits(&self) -> usize {
        self.psi.n_qubits()
    }

    /// Replaces the power cap (default [`DEFAULT_MAX_POWER`]).
    pub fn with_max_power(mut self, cap: i64) -> Self {
        self.max_power = cap.abs();
        self
    }

    pub fn max_power(&self) -> i64 {
        self.max_power
    }

    pub fn r_psi(&self) -> &Reflector {
        &self.r_psi
    }

    pub fn r_phi(&self) -> &Reflector {
        &self.r_phi
    }

    /// Dense copy of the first state.
    pub fn psi(&self) -> &Ket {
        &self.psi
    }

    /// Dense copy of the second state.
    pub fn phi(&self) -> &Ket {
        &self.phi
    }

    /// Raw complex overlap `<psi|phi>` from the dense states.
    pub fn overlap(&self) -> Complex64 {
        self.overlap
    }

    /// Principal angle in `[0, pi/2]`, from the dense overlap. Serves as the
    /// reference value the spectral pipeline is checked against.
    pub fn theta_true(&self) -> f64 {
        self.theta
    }

    /// One application of `A` as a circuit: `R_psi` first, then `R_phi`.
    pub fn block_circuit(&self) -> Result<Circuit> {
        let mut c = Circuit::new(self.n_qubits())?;
        c.append(self.r_psi.circuit())?;
        c.append(self.r_phi.circuit())?;
        Ok(c)
    }

    /// One application of the inverse `A^= R_psi R_phi` as a circuit
    /// (both reflections are involutions).
    pub fn adjoint_block_circuit(&self) -> Result<Circuit> {
        let mut c = Circuit::new(self.n_qubits())?;
        c.append(self.r_phi.circuit())?;
        c.append(self.r_psi.circuit())?;
        Ok(c)
    }

    /// One application of `A` controlled on an ancilla at index `n`.
    pub fn controlled_block_circuit(&self) -> Result<Circuit> {
        let mut c = self.r_psi.controlled_circuit()?;
        c.append(&self.r_phi.controlled_circuit()?)?;
        Ok(c)
    }

    /// Controlled inverse block.
    pub fn controlled_adjoint_block_circuit(&self) -> Result<Circuit> {
        let mut c = self.r_phi.controlled_circuit()?;
        c.append(&self.r_psi.controlled_circuit()?)?;
        Ok(c)
    }

    /// Applies `A^power` in place (negative powers apply the inverse).
    pub fn apply_power(&self, ket: &mut Ket, power: i64) -> Result<()> {
        if power.abs() > self.max_power {
            return Err(Error::PowerCap {
                requested: power,
                cap: self.max_power,
            });
        }
        if power >= 0 {
            for _ in 0..power {
                ket.apply_circuit(self.r_psi.circuit())?;
                ket.apply_circuit(self.r_phi.circuit())?;
            }
        } else {
            for _ in 0..(-power) {
                ket.apply_circuit(self.r_phi.circuit())?;
                ket.apply_circuit(self.r_psi.circuit())?;
            }
        }
        Ok(())
    }

    /// Gram-Schmidt eigenbasis of the invariant plane.
    ///
    /// With `s = <psi|phi>`, `delta = arg(s)`, and `w = (phi - s psi) /
    /// sin(theta)`, the eigenvectors are `y_pm = (pm i psi + e^{-i delta} w)
    /// / sqrt(2)`. Errors with [`Error::DegeneratePlane`] when the states
    /// coincide (theta ~ 0), where `w` is undefined.
    pub fn subspace_basis(&self) -> Result<SubspaceBasis> {
        let c = self.overlap.norm();
        if c > 1.0 - IDENTICAL_TOL {
            return Err(Error::DegeneratePlane { overlap: c });
        }
        let dim = self.psi.amplitudes().len();
        let mut w = vec![Complex64::new(0.0, 0.0); dim];
        for (i, wi) in w.iter_mut().enumerate() {
            *wi = self.phi.amplitudes()[i] - self.overlap * self.psi.amplitudes()[i];
        }
        let norm: f64 = w.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for wi in w.iter_mut() {
            *wi /= norm;
        }
        let delta = self.overlap.arg();
        let phase = Complex64::from_polar(1.0, -delta);
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let i_unit = Complex64::new(0.0, 1.0);
        let mut y_plus = Vec::with_capacity(dim);
        let mut y_minus = Vec::with_capacity(dim);
        let mut psi0 = Vec::with_capacity(dim);
        for (idx, wi) in w.iter().enumerate() {
            let p = self.psi.amplitudes()[idx];
            y_plus.push((i_unit * p + phase * wi) * inv_sqrt2);
            y_minus.push((-i_unit * p + phase * wi) * inv_sqrt2);
            psi0.push(phase * wi);
        }
        Ok(SubspaceBasis {
            y_plus: Ket::from_amplitudes(y_plus)?,
            y_minus: Ket::from_amplitudes(y_minus)?,
            psi0: Ket::from_amplitudes(psi0)?,
            theta: self.theta,
            delta,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn amp_close(a: &Ket, b: &Ket, tol: f64) -> f64 {
        a.amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
            .min(tol + 1.0)
    }

    #[test]
    fn reflector_negates_its_own_state_and_squares_to_identity() {
        let prep = StatePrep::random(3, 4, 42).unwrap();
        let refl = build_reflector(&prep).unwrap();
        let psi = prep.prepare().unwrap();
        let mut reflected = psi.clone();
        reflected.apply_circuit(refl.circuit()).unwrap();
        let ip = psi.inner(&reflected).unwrap();
        assert!(
            (ip + Complex64::new(1.0, 0.0)).norm() < 1e-12,
            "R psi != -psi: {ip}"
        );

        let other = StatePrep::random(3, 4, 43).unwrap().prepare().unwrap();
        let mut twice = other.clone();
        twice.apply_circuit(refl.circuit()).unwrap();
        twice.apply_circuit(refl.circuit()).unwrap();
        assert!(amp_close(&twice, &other, 1e-12) < 1e-12, "R^2 != I");
    }

    #[test]
    fn theta_pair_overlap_is_cosine() {
        for theta in [0.1, 0.6, 1.2, 1.5] {
            let (p, q) = StatePrep::theta_pair(3, theta).unwrap();
            let amp = build_amplifier(&p, &q).unwrap();
            assert!((amp.theta_true() - theta).abs() < 1e-12);
            assert!((amp.overlap() - Complex64::new(theta.cos(), 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn eigenvectors_have_advertised_phases_and_eigenvalues() {
        let p = StatePrep::random(4, 6, 7).unwrap();
        let q = StatePrep::random(4, 6, 8).unwrap();
        let amp = build_amplifier(&p, &q).unwrap();
        let basis = amp.subspace_basis().unwrap();
        let theta = basis.theta;
        let psi = amp.psi();

        let ip_plus = psi.inner(&basis.y_plus).unwrap();
        let ip_minus = psi.inner(&basis.y_minus).unwrap();
        let i_sqrt2 = Complex64::new(0.0, std::f64::consts::FRAC_1_SQRT_2);
        assert!((ip_plus - i_sqrt2).norm() < 1e-12);
        assert!((ip_minus + i_sqrt2).norm() < 1e-12);

        for (ket, sign) in [(&basis.y_plus, 1.0), (&basis.y_minus, -1.0)] {
            let mut evolved = (*ket).clone();
            amp.apply_power(&mut evolved, 1).unwrap();
            let expect = Complex64::from_polar(1.0, sign * 2.0 * theta);
            let ip = ket.inner(&evolved).unwrap();
            assert!(
                (ip - expect).norm() < 1e-12,
                "eigenvalue off: {ip} vs {expect}"
            );
            // Also check the residual, not just the projection.
            let mut scaled = (*ket).clone();
            let dim = scaled.amplitudes().len();
            let mut resid = 0.0f64;
            for i in 0..dim {
                resid =
                    resid.max((evolved.amplitudes()[i] - expect * scaled.amplitudes()[i]).norm());
            }
            let _ = &mut scaled;
            assert!(resid < 1e-12, "eigenvector residual {resid}");
        }
    }

    #[test]
    fn amplifier_acts_as_identity_off_the_plane() {
        // Build an orthogonal-complement vector by projecting out psi and phi.
        let p = StatePrep::random(3, 5, 21).unwrap();
        let q = StatePrep::random(3, 5, 22).unwrap();
        let amp = build_amplifier(&p, &q).unwrap();
        let psi = amp.psi().clone();
        let basis = amp.subspace_basis().unwrap();
        let mut v: Vec<Complex64> = (0..8)
            .map(|i| Complex64::new((i as f64 * 0.37).sin() + 0.2, (i as f64 * 0.61).cos()))
            .collect();
        for b in [&psi, &basis.psi0] {
            let ip: Complex64 = b
                .amplitudes()
                .iter()
                .zip(v.iter())
                .map(|(x, y)| x.conj() * y)
                .sum();
            for (vi, bi) in v.iter_mut().zip(b.amplitudes()) {
                *vi -= ip * bi;
            }
        }
        let norm: f64 = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for vi in v.iter_mut() {
            *vi /= norm;
        }
        let perp = Ket::from_amplitudes(v).unwrap();
        let mut evolved = perp.clone();
        amp.apply_power(&mut evolved, 3).unwrap();
        assert!(amp_close(&evolved, &perp, 1e-11) < 1e-11);
    }

    #[test]
    fn apply_power_is_additive_and_invertible() {
        let (p, q) = StatePrep::theta_pair(2, 0.6).unwrap();
        let amp = build_amplifier(&p, &q).unwrap();
        let start = StatePrep::random(2, 3, 5).unwrap().prepare().unwrap();
        let mut a = start.clone();
        amp.apply_power(&mut a, 3).unwrap();
        amp.apply_power(&mut a, 2).unwrap();
        let mut b = start.clone();
        amp.apply_power(&mut b, 5).unwrap();
        assert!(amp_close(&a, &b, 1e-12) < 1e-12);
        amp.apply_power(&mut a, -5).unwrap();
        assert!(amp_close(&a, &start, 1e-12) < 1e-12);
    }

    #[test]
    fn power_cap_is_enforced() {
        let (p, q) = StatePrep::theta_pair(2, 0.6).unwrap();
        let amp = build_amplifier(&p, &q).unwrap().with_max_power(10);
        let mut k = amp.psi().clone();
        assert!(matches!(
            amp.apply_power(&mut k, 11),
            Err(Error::PowerCap {
                requested: 11,
                cap: 10
            })
        ));
    }

    #[test]
    fn orthogonal_pair_is_rejected() {
        let (p, q) = StatePrep::theta_pair(2, std::f64::consts::FRAC_PI_2).unwrap();
        assert!(matches!(
            build_amplifier(&p, &q),
            Err(Error::OrthogonalStates { .. })
        ));
    }

    #[test]
    fn identical_pair_has_no_plane() {
        let p = StatePrep::random(2, 3, 9).unwrap();
        let amp = build_amplifier(&p, &p).unwrap();
        assert!(amp.theta_true().abs() < 1e-7);
        assert!(matches!(
            amp.subspace_basis(),
            Err(Error::DegeneratePlane { .. })
        ));
    }

    #[test]
    fn global_phase_on_phi_leaves_signal_invariant() {
        let p = StatePrep::random(3, 4, 31).unwrap();
        let q = StatePrep::random(3, 4, 32).unwrap();
        let mut shifted_circuit = q.circuit().clone();
        let g = 0.83;
        let m = [
            [Complex64::from_polar(1.0, g), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::from_polar(1.0, g)],
        ];
        shifted_circuit
            .push(GateOp::Single {
                target: 0,
                matrix: m,
            })
            .unwrap();
        let q_shift = StatePrep::from_circuit(shifted_circuit, "shifted");

        let amp_a = build_amplifier(&p, &q).unwrap();
        let amp_b = build_amplifier(&p, &q_shift).unwrap();
        assert!((amp_a.theta_true() - amp_b.theta_true()).abs() < 1e-12);

        for amp in [&amp_a, &amp_b] {
            let basis = amp.subspace_basis().unwrap();
            let mut evolved = basis.psi0.clone();
            amp.apply_power(&mut evolved, 2).unwrap();
            let f = basis.psi0.inner(&evolved).unwrap();
            let expect = (4.0 * amp.theta_true()).cos();
            assert!((f - Complex64::new(expect, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn controlled_block_is_exactly_controlled() {
        let (p, q) = StatePrep::theta_pair(2, 0.6).unwrap();
        let amp = build_amplifier(&p, &q).unwrap();
        let n = amp.n_qubits();
        let controlled = amp.controlled_block_circuit().unwrap();

        // Ancilla off: the register must be untouched.
        let start = StatePrep::random(n, 3, 77).unwrap().prepare().unwrap();
        let mut joint_off: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); 1 << (n + 1)];
        joint_off[..1 << n].copy_from_slice(start.amplitudes());
        let mut off = Ket::from_amplitudes(joint_off).unwrap();
        off.apply_circuit(&controlled).unwrap();
        for (i, a) in off.amplitudes().iter().enumerate() {
            let expect = if i < (1 << n) {
                start.amplitudes()[i]
            } else {
                Complex64::new(0.0, 0.0)
            };
            assert!((a - expect).norm() < 1e-12);
        }

        // Ancilla on: the register must see one full block.
        let mut expected = start.clone();
        amp.apply_power(&mut expected, 1).unwrap();
        let mut joint_on: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); 1 << (n + 1)];
        joint_on[(1 << n)..].copy_from_slice(start.amplitudes());
        let mut on = Ket::from_amplitudes(joint_on).unwrap();
        on.apply_circuit(&controlled).unwrap();
        for (i, a) in on.amplitudes().iter().enumerate() {
            let expect = if i >= (1 << n) {
                expected.amplitudes()[i - (1 << n)]
            } else {
                Complex64::new(0.0, 0.0)
            };
            assert!((a - expect).norm() < 1e-12);
        }
    }
}

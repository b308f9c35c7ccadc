//! Dense state-vector simulation.
//!
//! Amplitudes are stored in little-endian order: basis index `i` assigns bit
//! `(i >> q) & 1` to qubit `q`. All mutating operations take `&mut self`; a
//! [`Ket`] is therefore only ever modified through an exclusive handle, and
//! every read-only accessor returns fresh values.

use num_complex::Complex64;
use rand::Rng;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::gates::{self, Mat2};

/// Norm deviation accepted when ingesting externally supplied amplitudes.
pub const NORM_TOL: f64 = 1e-8;

/// One gate in a circuit.
///
/// `Mcz`/`Mcx` are permitted with an empty control list (plain `Z`/`X`), which
/// keeps reflection-operator construction uniform down to one qubit.
#[derive(Debug, Clone, PartialEq)]
pub enum GateOp {
    /// Arbitrary one-qubit matrix on `target`.
    Single { target: usize, matrix: Mat2 },
    /// Controlled NOT.
    Cnot { control: usize, target: usize },
    /// Multi-controlled Z: flips the sign of the all-ones component of the
    /// involved qubits. Symmetric in `controls` and `target`.
    Mcz { controls: Vec<usize>, target: usize },
    /// Multi-controlled X on `target`.
    Mcx { controls: Vec<usize>, target: usize },
}

impl GateOp {
    /// Largest qubit index touched by the op.
    pub fn max_qubit(&self) -> usize {
        match self {
            GateOp::Single { target, .. } => *target,
            GateOp::Cnot { control, target } => (*control).max(*target),
            GateOp::Mcz { controls, target } | GateOp::Mcx { controls, target } => {
                controls.iter().copied().fold(*target, usize::max)
            }
        }
    }

    /// Checks index bounds and distinctness against an `n`-qubit register.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let fail = |msg: String| Err(Error::DimensionMismatch(msg));
        match self {
            GateOp::Single { target, .. } => {
                if *target >= n_qubits {
                    return fail(format!("single-qubit target {target} on {n_qubits} qubits"));
                }
            }
            GateOp::Cnot { control, target } => {
                if *control >= n_qubits || *target >= n_qubits {
                    return fail(format!("cnot ({control},{target}) on {n_qubits} qubits"));
                }
                if control == target {
                    return fail("cnot control equals target".into());
                }
            }
            GateOp::Mcz { controls, target } | GateOp::Mcx { controls, target } => {
                let mut seen = vec![false; n_qubits];
                for &q in controls.iter().chain(std::iter::once(target)) {
                    if q >= n_qubits {
                        return fail(format!("multi-controlled qubit {q} on {n_qubits} qubits"));
                    }
                    if seen[q] {
                        return fail(format!("duplicate qubit {q} in multi-controlled gate"));
                    }
                    seen[q] = true;
                }
            }
        }
        Ok(())
    }

    /// Adjoint of the op. Self-inverse ops return themselves.
    pub fn adjoint(&self) -> GateOp {
        match self {
            GateOp::Single { target, matrix } => GateOp::Single {
                target: *target,
                matrix: gates::mat_adjoint(matrix),
            },
            other => other.clone(),
        }
    }

    /// True for ops that act on exactly two qubits after decomposition
    /// bookkeeping, i.e. the ops the noise model attaches faults to.
    pub fn is_two_qubit(&self) -> bool {
        matches!(self, GateOp::Cnot { .. })
    }
}

/// Ordered list of gates on a fixed-width register.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    ops: Vec<GateOp>,
}

impl Circuit {
    /// Empty circuit on `n_qubits` (must be at least 1).
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidConfig(
                "circuit needs at least one qubit".into(),
            ));
        }
        Ok(Circuit {
            n_qubits,
            ops: Vec::new(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Appends one validated op.
    pub fn push(&mut self, op: GateOp) -> Result<()> {
        op.validate(self.n_qubits)?;
        self.ops.push(op);
        Ok(())
    }

    /// Appends all ops of `other` (must have the same width).
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "appending a {}-qubit circuit to a {}-qubit circuit",
                other.n_qubits, self.n_qubits
            )));
        }
        self.ops.extend(other.ops.iter().cloned());
        Ok(())
    }

    /// The inverse circuit: adjoints of the ops in reverse order.
    pub fn adjoint(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            ops: self.ops.iter().rev().map(GateOp::adjoint).collect(),
        }
    }

    /// Same circuit with every qubit index shifted up by `offset` on a wider
    /// register. Used to embed a register next to an ancilla.
    pub fn embedded(&self, n_total: usize, offset: usize) -> Result<Circuit> {
        let mut out = Circuit::new(n_total)?;
        for op in &self.ops {
            let shifted = match op {
                GateOp::Single { target, matrix } => GateOp::Single {
                    target: target + offset,
                    matrix: *matrix,
                },
                GateOp::Cnot { control, target } => GateOp::Cnot {
                    control: control + offset,
                    target: target + offset,
                },
                GateOp::Mcz { controls, target } => GateOp::Mcz {
                    controls: controls.iter().map(|q| q + offset).collect(),
                    target: target + offset,
                },
                GateOp::Mcx { controls, target } => GateOp::Mcx {
                    controls: controls.iter().map(|q| q + offset).collect(),
                    target: target + offset,
                },
            };
            out.push(shifted)?;
        }
        Ok(out)
    }

    /// Rewrites the circuit over one- and two-qubit gates only.
    ///
    /// `Mcz` over k involved qubits becomes, for k = 1 a plain `Z`, for k = 2
    /// the `H CNOT H` realization, and for k >= 3 a Gray-code walk of parity
    /// phases costing `2^k - 2` CNOTs and `2^k - 1` one-qubit phase gates
    /// (14 CNOTs at k = 4). `Mcx` conjugates the `Mcz` form with Hadamards on
    /// its target. The rewrite is exact, with no ancilla and no global phase.
    pub fn decompose(&self) -> Circuit {
        let mut out = Circuit {
            n_qubits: self.n_qubits,
            ops: Vec::new(),
        };
        for op in &self.ops {
            match op {
                GateOp::Single { .. } | GateOp::Cnot { .. } => out.ops.push(op.clone()),
                GateOp::Mcz { controls, target } => {
                    let mut qs: Vec<usize> = controls.clone();
                    qs.push(*target);
                    qs.sort_unstable();
                    mcz_two_qubit_ops(&qs, &mut out.ops);
                }
                GateOp::Mcx { controls, target } => {
                    let mut qs: Vec<usize> = controls.clone();
                    qs.push(*target);
                    qs.sort_unstable();
                    out.ops.push(GateOp::Single {
                        target: *target,
                        matrix: gates::h(),
                    });
                    mcz_two_qubit_ops(&qs, &mut out.ops);
                    out.ops.push(GateOp::Single {
                        target: *target,
                        matrix: gates::h(),
                    });
                }
            }
        }
        out
    }

    /// Number of two-qubit gates (CNOTs) the circuit contains as written.
    pub fn two_qubit_gate_count(&self) -> usize {
        self.ops.iter().filter(|op| op.is_two_qubit()).count()
    }
}

/// Emits an exact one-/two-qubit realization of `MCZ` on the sorted qubit
/// set `qs`.
///
/// For k >= 3 the construction assigns every nonempty subset S of `qs` the
/// phase `pi * (-1)^{|S|+1} / 2^{k-1}` on its parity bit. Subsets are grouped
/// by their highest member h; within a group a Gray-code walk accumulates
/// each subset parity into h with one CNOT per step, applies the phase on h,
/// and finally uncomputes the accumulated parity. Summing the phases over the
/// subsets of any basis state reproduces exactly `-1` on the all-ones state
/// and `+1` elsewhere.
fn mcz_two_qubit_ops(qs: &[usize], out: &mut Vec<GateOp>) {
    let k = qs.len();
    match k {
        0 => {}
        1 => out.push(GateOp::Single {
            target: qs[0],
            matrix: gates::z(),
        }),
        2 => {
            // CZ = (I x H) CNOT (I x H)
            out.push(GateOp::Single {
                target: qs[1],
                matrix: gates::h(),
            });
            out.push(GateOp::Cnot {
                control: qs[0],
                target: qs[1],
            });
            out.push(GateOp::Single {
                target: qs[1],
                matrix: gates::h(),
            });
        }
        _ => {
            let denom = (1u64 << (k - 1)) as f64;
            for (h_idx, &h) in qs.iter().enumerate() {
                let mut accumulated: usize = 0;
                let mut prev_gray: usize = 0;
                for j in 0..(1usize << h_idx) {
                    let gray = j ^ (j >> 1);
                    if j > 0 {
                        let changed = gray ^ prev_gray;
                        let b = changed.trailing_zeros() as usize;
                        out.push(GateOp::Cnot {
                            control: qs[b],
                            target: h,
                        });
                        accumulated ^= changed;
                    }
                    prev_gray = gray;
                    let subset_size = gray.count_ones() as usize + 1;
                    let sign = if subset_size % 2 == 1 { 1.0 } else { -1.0 };
                    out.push(GateOp::Single {
                        target: h,
                        matrix: gates::phase(sign * std::f64::consts::PI / denom),
                    });
                }
                let mut b = 0;
                while accumulated != 0 {
                    if accumulated & 1 == 1 {
                        out.push(GateOp::Cnot {
                            control: qs[b],
                            target: h,
                        });
                    }
                    accumulated >>= 1;
                    b += 1;
                }
            }
        }
    }
}

/// Dense `n`-qubit pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl Ket {
    /// The all-zeros computational basis state.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Ket::basis(n_qubits, 0)
    }

    /// Computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: u64) -> Result<Self> {
        if n_qubits == 0 || n_qubits > 24 {
            return Err(Error::InvalidConfig(format!(
                "n_qubits = {n_qubits} outside the supported range 1..=24"
            )));
        }
        let dim = 1usize << n_qubits;
        if index as usize >= dim {
            return Err(Error::DimensionMismatch(format!(
                "basis index {index} on {n_qubits} qubits"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index as usize] = Complex64::new(1.0, 0.0);
        Ok(Ket { n_qubits, amps })
    }

    /// Wraps externally supplied amplitudes; their squared norm must be
    /// within [`NORM_TOL`] of 1 and their length a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::DimensionMismatch(format!(
                "amplitude vector of length {dim} is not a power of two >= 2"
            )));
        }
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        let deviation = (norm_sqr - 1.0).abs();
        if deviation > NORM_TOL {
            return Err(Error::NotNormalized { deviation });
        }
        Ok(Ket {
            n_qubits: dim.trailing_zeros() as usize,
            amps,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Squared norm (1 up to floating-point drift for unitary evolution).
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Probability of observing basis state `index`.
    pub fn probability(&self, index: u64) -> Result<f64> {
        self.amps
            .get(index as usize)
            .map(|a| a.norm_sqr())
            .ok_or_else(|| {
                Error::DimensionMismatch(format!("basis index {index} on {} qubits", self.n_qubits))
            })
    }

    /// Inner product `<self|other>` (conjugate-linear in `self`).
    pub fn inner(&self, other: &Ket) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "inner product between {} and {} qubits",
                self.n_qubits, other.n_qubits
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    fn apply_single(&mut self, target: usize, m: &Mat2) {
        let bit = 1usize << target;
        let low_mask = bit - 1;
        let half = self.amps.len() >> 1;
        for base in 0..half {
            let i0 = ((base & !low_mask) << 1) | (base & low_mask);
            let i1 = i0 | bit;
            let a0 = self.amps[i0];
            let a1 = self.amps[i1];
            self.amps[i0] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[i1] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    fn apply_cnot(&mut self, control: usize, target: usize) {
        let cbit = 1usize << control;
        let tbit = 1usize << target;
        for i in 0..self.amps.len() {
            if i & cbit != 0 && i & tbit == 0 {
                self.amps.swap(i, i | tbit);
            }
        }
    }

    fn apply_mcz(&mut self, controls: &[usize], target: usize) {
        let mut mask = 1usize << target;
        for &c in controls {
            mask |= 1usize << c;
        }
        for i in 0..self.amps.len() {
            if i & mask == mask {
                self.amps[i] = -self.amps[i];
            }
        }
    }

    fn apply_mcx(&mut self, controls: &[usize], target: usize) {
        let mut cmask = 0usize;
        for &c in controls {
            cmask |= 1usize << c;
        }
        let tbit = 1usize << target;
        for i in 0..self.amps.len() {
            if i & cmask == cmask && i & tbit == 0 {
                self.amps.swap(i, i | tbit);
            }
        }
    }

    /// Applies one validated gate in place.
    pub fn apply_gate(&mut self, op: &GateOp) -> Result<()> {
        op.validate(self.n_qubits)?;
        match op {
            GateOp::Single { target, matrix } => self.apply_single(*target, matrix),
            GateOp::Cnot { control, target } => self.apply_cnot(*control, *target),
            GateOp::Mcz { controls, target } => self.apply_mcz(controls, *target),
            GateOp::Mcx { controls, target } => self.apply_mcx(controls, *target),
        }
        Ok(())
    }

    /// Applies a whole circuit in place.
    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "{}-qubit circuit on a {}-qubit state",
                circuit.n_qubits(),
                self.n_qubits
            )));
        }
        for op in circuit.ops() {
            match op {
                GateOp::Single { target, matrix } => self.apply_single(*target, matrix),
                GateOp::Cnot { control, target } => self.apply_cnot(*control, *target),
                GateOp::Mcz { controls, target } => self.apply_mcz(controls, *target),
                GateOp::Mcx { controls, target } => self.apply_mcx(controls, *target),
            }
        }
        Ok(())
    }

    /// Draws `shots` computational-basis measurement outcomes and returns
    /// their counts keyed by basis index. Deterministic given the rng state.
    pub fn sample_bitstrings<R: Rng>(&self, shots: u64, rng: &mut R) -> BTreeMap<u64, u64> {
        let mut cumulative = Vec::with_capacity(self.amps.len());
        let mut acc = 0.0;
        for a in &self.amps {
            acc += a.norm_sqr();
            cumulative.push(acc);
        }
        let total = acc;
        let mut counts = BTreeMap::new();
        for _ in 0..shots {
            let u: f64 = rng.gen::<f64>() * total;
            let idx = cumulative
                .partition_point(|&c| c <= u)
                .min(self.amps.len() - 1);
            *counts.entry(idx as u64).or_insert(0) += 1;
        }
        counts
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hadamard_on_zero_gives_plus() {
        let mut k = Ket::zero(1).unwrap();
        k.apply_gate(&GateOp::Single {
            target: 0,
            matrix: gates::h(),
        })
        .unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((k.amplitudes()[0] - c(s, 0.0)).norm() < 1e-15);
        assert!((k.amplitudes()[1] - c(s, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn cnot_entangles_plus_zero() {
        let mut k = Ket::zero(2).unwrap();
        k.apply_gate(&GateOp::Single {
            target: 0,
            matrix: gates::h(),
        })
        .unwrap();
        k.apply_gate(&GateOp::Cnot {
            control: 0,
            target: 1,
        })
        .unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((k.amplitudes()[0b00] - c(s, 0.0)).norm() < 1e-15);
        assert!((k.amplitudes()[0b11] - c(s, 0.0)).norm() < 1e-15);
        assert!(k.amplitudes()[0b01].norm() < 1e-15);
        assert!(k.amplitudes()[0b10].norm() < 1e-15);
    }

    #[test]
    fn mcz_flips_only_all_ones() {
        let n = 3;
        let dim = 1usize << n;
        let amp = 1.0 / (dim as f64).sqrt();
        let mut k = Ket::from_amplitudes(vec![c(amp, 0.0); dim]).unwrap();
        k.apply_gate(&GateOp::Mcz {
            controls: vec![0, 1],
            target: 2,
        })
        .unwrap();
        for i in 0..dim {
            let expect = if i == dim - 1 { -amp } else { amp };
            assert!(
                (k.amplitudes()[i] - c(expect, 0.0)).norm() < 1e-15,
                "index {i}"
            );
        }
    }

    #[test]
    fn mcz_decomposition_matches_primitive_on_basis_states() {
        for n in 1..=5usize {
            let mut direct = Circuit::new(n).unwrap();
            let controls: Vec<usize> = (0..n - 1).collect();
            direct
                .push(GateOp::Mcz {
                    controls,
                    target: n - 1,
                })
                .unwrap();
            let decomposed = direct.decompose();
            for op in decomposed.ops() {
                assert!(matches!(op, GateOp::Single { .. } | GateOp::Cnot { .. }));
            }
            // Compare action columnwise, which checks the full matrix.
            for idx in 0..(1u64 << n) {
                let mut a = Ket::basis(n, idx).unwrap();
                let mut b = Ket::basis(n, idx).unwrap();
                a.apply_circuit(&direct).unwrap();
                b.apply_circuit(&decomposed).unwrap();
                for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
                    assert!((x - y).norm() < 1e-13, "n={n} idx={idx}");
                }
            }
        }
    }

    #[test]
    fn mcz_decomposition_cnot_counts() {
        for (n, expect) in [(1usize, 0usize), (2, 1), (3, 6), (4, 14), (5, 30)] {
            let mut circ = Circuit::new(n).unwrap();
            let controls: Vec<usize> = (0..n - 1).collect();
            circ.push(GateOp::Mcz {
                controls,
                target: n - 1,
            })
            .unwrap();
            assert_eq!(circ.decompose().two_qubit_gate_count(), expect, "n={n}");
        }
    }

    #[test]
    fn mcx_decomposition_matches_primitive() {
        let n = 4;
        let mut direct = Circuit::new(n).unwrap();
        direct
            .push(GateOp::Mcx {
                controls: vec![0, 1, 2],
                target: 3,
            })
            .unwrap();
        let decomposed = direct.decompose();
        for idx in 0..(1u64 << n) {
            let mut a = Ket::basis(n, idx).unwrap();
            let mut b = Ket::basis(n, idx).unwrap();
            a.apply_circuit(&direct).unwrap();
            b.apply_circuit(&decomposed).unwrap();
            for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
                assert!((x - y).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn adjoint_inverts_circuit() {
        let mut circ = Circuit::new(3).unwrap();
        circ.push(GateOp::Single {
            target: 0,
            matrix: gates::h(),
        })
        .unwrap();
        circ.push(GateOp::Single {
            target: 1,
            matrix: gates::ry(0.37),
        })
        .unwrap();
        circ.push(GateOp::Cnot {
            control: 0,
            target: 2,
        })
        .unwrap();
        circ.push(GateOp::Single {
            target: 2,
            matrix: gates::rz(-1.1),
        })
        .unwrap();
        circ.push(GateOp::Mcz {
            controls: vec![0],
            target: 1,
        })
        .unwrap();
        let mut k = Ket::basis(3, 5).unwrap();
        k.apply_circuit(&circ).unwrap();
        k.apply_circuit(&circ.adjoint()).unwrap();
        for (i, a) in k.amplitudes().iter().enumerate() {
            let expect = if i == 5 { 1.0 } else { 0.0 };
            assert!((a - c(expect, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn norm_is_preserved_by_unitaries() {
        let mut k = Ket::zero(4).unwrap();
        let mut circ = Circuit::new(4).unwrap();
        for q in 0..4 {
            circ.push(GateOp::Single {
                target: q,
                matrix: gates::ry(0.1 + q as f64),
            })
            .unwrap();
        }
        circ.push(GateOp::Mcx {
            controls: vec![0, 1],
            target: 3,
        })
        .unwrap();
        k.apply_circuit(&circ).unwrap();
        assert!((k.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn from_amplitudes_rejects_unnormalized() {
        let bad = vec![c(1.0, 0.0), c(0.5, 0.0)];
        assert!(matches!(
            Ket::from_amplitudes(bad),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn embedded_circuit_acts_on_shifted_qubits() {
        let mut inner = Circuit::new(2).unwrap();
        inner
            .push(GateOp::Single {
                target: 0,
                matrix: gates::x(),
            })
            .unwrap();
        inner
            .push(GateOp::Cnot {
                control: 0,
                target: 1,
            })
            .unwrap();
        let outer = inner.embedded(3, 1).unwrap();
        let mut k = Ket::zero(3).unwrap();
        k.apply_circuit(&outer).unwrap();
        // X on qubit 1, then CNOT(1 -> 2): state |110> = index 6.
        assert!((k.amplitudes()[0b110] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn sampling_is_seed_deterministic_and_concentrates() {
        let mut k = Ket::zero(2).unwrap();
        k.apply_gate(&GateOp::Single {
            target: 0,
            matrix: gates::ry(2.0 * 0.3),
        })
        .unwrap();
        let mut rng1 = ChaCha8Rng::seed_from_u64(7);
        let mut rng2 = ChaCha8Rng::seed_from_u64(7);
        let c1 = k.sample_bitstrings(4000, &mut rng1);
        let c2 = k.sample_bitstrings(4000, &mut rng2);
        assert_eq!(c1, c2);
        let p0 = *c1.get(&0).unwrap_or(&0) as f64 / 4000.0;
        let expect = (0.3f64).cos().powi(2);
        assert!((p0 - expect).abs() < 0.05, "p0 = {p0}, expect = {expect}");
    }

    #[test]
    fn invalid_ops_are_rejected() {
        let mut circ = Circuit::new(2).unwrap();
        assert!(circ
            .push(GateOp::Cnot {
                control: 0,
                target: 0
            })
            .is_err());
        assert!(circ
            .push(GateOp::Single {
                target: 2,
                matrix: gates::x()
            })
            .is_err());
        assert!(circ
            .push(GateOp::Mcz {
                controls: vec![1, 1],
                target: 0
            })
            .is_err());
    }
}

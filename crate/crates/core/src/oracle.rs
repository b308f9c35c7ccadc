//! Dense-matrix reference implementations.
//!
//! Everything here builds full `2^n x 2^n` matrices and multiplies them out,
//! deliberately sharing no code paths with the bit-twiddling state-vector
//! kernels in [`crate::statevec`]. The `validate` harness command compares
//! the two against each other on random circuits; the cost is exponential,
//! so callers should stay at small `n`.

// Permutation matrices are built by mapping each column index through bit
// arithmetic; index-style loops state that directly.
#![allow(clippy::needless_range_loop)]

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::statevec::{Circuit, GateOp, Ket};

/// Dense complex matrix in row-major nested vectors.
pub type CMat = Vec<Vec<Complex64>>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// The `dim x dim` identity.
pub fn identity(dim: usize) -> CMat {
    let mut m = vec![vec![ZERO; dim]; dim];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = ONE;
    }
    m
}

/// Dense matrix of a single gate embedded in an `n_qubits` register
/// (qubit 0 is the least-significant amplitude-index bit).
pub fn op_matrix(op: &GateOp, n_qubits: usize) -> Result<CMat> {
    op.validate(n_qubits)?;
    let dim = 1usize << n_qubits;
    let mut m = vec![vec![ZERO; dim]; dim];
    match op {
        GateOp::Single { target, matrix } => {
            let mask = 1usize << target;
            for col in 0..dim {
                let bit = usize::from(col & mask != 0);
                m[col & !mask][col] += matrix[0][bit];
                m[col | mask][col] += matrix[1][bit];
            }
        }
        GateOp::Cnot { control, target } => {
            for col in 0..dim {
                let row = if col & (1 << control) != 0 {
                    col ^ (1 << target)
                } else {
                    col
                };
                m[row][col] = ONE;
            }
        }
        GateOp::Mcx { controls, target } => {
            for col in 0..dim {
                let all = controls.iter().all(|c| col & (1 << c) != 0);
                let row = if all { col ^ (1 << target) } else { col };
                m[row][col] = ONE;
            }
        }
        GateOp::Mcz { controls, target } => {
            for col in 0..dim {
                let all = controls.iter().all(|c| col & (1 << c) != 0) && col & (1 << target) != 0;
                m[col][col] = if all { -ONE } else { ONE };
            }
        }
    }
    Ok(m)
}

/// Matrix product `a * b`.
pub fn mat_mul(a: &CMat, b: &CMat) -> CMat {
    let dim = a.len();
    let mut out = vec![vec![ZERO; dim]; dim];
    for (i, out_row) in out.iter_mut().enumerate() {
        for k in 0..dim {
            let aik = a[i][k];
            if aik == ZERO {
                continue;
            }
            for (j, v) in out_row.iter_mut().enumerate() {
                *v += aik * b[k][j];
            }
        }
    }
    out
}

/// Dense matrix of a whole circuit (later ops multiply from the left).
pub fn circuit_matrix(circuit: &Circuit) -> Result<CMat> {
    let mut acc = identity(1 << circuit.n_qubits());
    for op in circuit.ops() {
        acc = mat_mul(&op_matrix(op, circuit.n_qubits())?, &acc);
    }
    Ok(acc)
}

/// Applies a dense matrix to a state vector.
pub fn apply(matrix: &CMat, ket: &Ket) -> Result<Ket> {
    let amps = ket.amplitudes();
    if matrix.len() != amps.len() {
        return Err(Error::DimensionMismatch(format!(
            "matrix dimension {} does not match state dimension {}",
            matrix.len(),
            amps.len()
        )));
    }
    let out: Vec<Complex64> = matrix
        .iter()
        .map(|row| row.iter().zip(amps).map(|(m, a)| m * a).sum())
        .collect();
    Ket::from_amplitudes(out)
}

/// Largest per-amplitude deviation between the bit-kernel circuit
/// application and the dense-matrix one, starting from `initial`.
pub fn kernel_vs_dense(circuit: &Circuit, initial: &Ket) -> Result<f64> {
    let mut fast = initial.clone();
    fast.apply_circuit(circuit)?;
    let slow = apply(&circuit_matrix(circuit)?, initial)?;
    Ok(fast
        .amplitudes()
        .iter()
        .zip(slow.amplitudes())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates;

    fn basis(n: usize, index: u64) -> Ket {
        Ket::basis(n, index).unwrap()
    }

    #[test]
    fn hadamard_matrix_matches_kernel_on_basis_states() {
        let mut circuit = Circuit::new(2).unwrap();
        circuit
            .push(GateOp::Single {
                target: 1,
                matrix: gates::h(),
            })
            .unwrap();
        for index in 0..4 {
            assert!(kernel_vs_dense(&circuit, &basis(2, index)).unwrap() < 1e-15);
        }
    }

    #[test]
    fn cnot_matrix_is_the_expected_permutation() {
        let op = GateOp::Cnot {
            control: 0,
            target: 1,
        };
        let m = op_matrix(&op, 2).unwrap();
        // |01> (control set, index 1) -> |11> (index 3); |11> -> |01>.
        assert_eq!(m[3][1], ONE);
        assert_eq!(m[1][3], ONE);
        assert_eq!(m[0][0], ONE);
        assert_eq!(m[2][2], ONE);
        assert_eq!(m[1][1], ZERO);
    }

    #[test]
    fn mcz_matrix_flips_only_the_all_ones_phase() {
        let op = GateOp::Mcz {
            controls: vec![0, 1],
            target: 2,
        };
        let m = op_matrix(&op, 3).unwrap();
        for i in 0..8 {
            let expected = if i == 7 { -ONE } else { ONE };
            assert_eq!(m[i][i], expected);
        }
    }

    #[test]
    fn circuit_matrix_orders_factors_correctly() {
        // X then H on one qubit: H * X (H applied last multiplies from the
        // left), mapping |0> -> H|1> = (|0> - |1>)/sqrt(2).
        let mut circuit = Circuit::new(1).unwrap();
        circuit
            .push(GateOp::Single {
                target: 0,
                matrix: gates::x(),
            })
            .unwrap();
        circuit
            .push(GateOp::Single {
                target: 0,
                matrix: gates::h(),
            })
            .unwrap();
        let m = circuit_matrix(&circuit).unwrap();
        let out = apply(&m, &basis(1, 0)).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((out.amplitudes()[0] - Complex64::new(s, 0.0)).norm() < 1e-15);
        assert!((out.amplitudes()[1] - Complex64::new(-s, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let m = identity(4);
        assert!(matches!(
            apply(&m, &basis(1, 0)),
            Err(Error::DimensionMismatch(_))
        ));
    }
}

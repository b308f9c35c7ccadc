//! Standard one-qubit gate matrices.
//!
//! Matrices are row-major `[[m00, m01], [m10, m11]]` acting on column vectors
//! `(amp0, amp1)`.

use num_complex::Complex64;

/// 2x2 complex matrix in row-major order.
pub type Mat2 = [[Complex64; 2]; 2];

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Hadamard.
pub fn h() -> Mat2 {
    [
        [re(FRAC_1_SQRT_2), re(FRAC_1_SQRT_2)],
        [re(FRAC_1_SQRT_2), re(-FRAC_1_SQRT_2)],
    ]
}

/// Pauli X.
pub fn x() -> Mat2 {
    [[re(0.0), re(1.0)], [re(1.0), re(0.0)]]
}

/// Pauli Y.
pub fn y() -> Mat2 {
    [
        [re(0.0), Complex64::new(0.0, -1.0)],
        [Complex64::new(0.0, 1.0), re(0.0)],
    ]
}

/// Pauli Z.
pub fn z() -> Mat2 {
    [[re(1.0), re(0.0)], [re(0.0), re(-1.0)]]
}

/// Identity.
pub fn i() -> Mat2 {
    [[re(1.0), re(0.0)], [re(0.0), re(1.0)]]
}

/// Phase gate diag(1, e^{i phi}).
pub fn phase(phi: f64) -> Mat2 {
    [
        [re(1.0), re(0.0)],
        [re(0.0), Complex64::from_polar(1.0, phi)],
    ]
}

/// S-dagger, i.e. diag(1, -i).
pub fn s_dag() -> Mat2 {
    phase(-std::f64::consts::FRAC_PI_2)
}

/// Rotation about Y: exp(-i angle Y / 2), real-valued.
pub fn ry(angle: f64) -> Mat2 {
    let (s, c) = (angle / 2.0).sin_cos();
    [[re(c), re(-s)], [re(s), re(c)]]
}

/// Rotation about Z: exp(-i angle Z / 2).
pub fn rz(angle: f64) -> Mat2 {
    [
        [Complex64::from_polar(1.0, -angle / 2.0), re(0.0)],
        [re(0.0), Complex64::from_polar(1.0, angle / 2.0)],
    ]
}

/// Rotation about X: exp(-i angle X / 2).
pub fn rx(angle: f64) -> Mat2 {
    let (s, c) = (angle / 2.0).sin_cos();
    [
        [re(c), Complex64::new(0.0, -s)],
        [Complex64::new(0.0, -s), re(c)],
    ]
}

/// Product `a * b` of two 2x2 matrices (apply `b` first).
pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            *cell = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

/// Conjugate transpose.
pub fn mat_adjoint(m: &Mat2) -> Mat2 {
    [
        [m[0][0].conj(), m[1][0].conj()],
        [m[0][1].conj(), m[1][1].conj()],
    ]
}

//! Small dense complex matrices for one- and two-qubit gates.
//!
//! Two-qubit matrices index their basis as `2 * b0 + b1`, where `b0` is the bit
//! of the first listed qubit.

use num_complex::Complex64;
use std::f64::consts::PI;

pub type C64 = Complex64;
pub type Mat2 = [[C64; 2]; 2];
pub type Mat4 = [[C64; 4]; 4];

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn mat2_identity() -> Mat2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

pub fn mat4_identity() -> Mat4 {
    let mut m = [[ZERO; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = ONE;
    }
    m
}

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn mat4_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn mat2_adjoint(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

pub fn mat4_adjoint(a: &Mat4) -> Mat4 {
    let mut out = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[j][i].conj();
        }
    }
    out
}

/// `a ⊗ b`, with `a` acting on the first (most significant) qubit.
pub fn kron2(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut out = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[i >> 1][j >> 1] * b[i & 1][j & 1];
        }
    }
    out
}

/// Phase-insensitive overlap `|Tr(A†B)| / d`; equals 1 iff A = e^{iφ}B for unitaries.
pub fn phase_fidelity2(a: &Mat2, b: &Mat2) -> f64 {
    let mut tr = ZERO;
    for i in 0..2 {
        for k in 0..2 {
            tr += a[k][i].conj() * b[k][i];
        }
    }
    tr.norm() / 2.0
}

pub fn phase_fidelity4(a: &Mat4, b: &Mat4) -> f64 {
    let mut tr = ZERO;
    for i in 0..4 {
        for k in 0..4 {
            tr += a[k][i].conj() * b[k][i];
        }
    }
    tr.norm() / 4.0
}

pub fn max_abs_diff4(a: &Mat4, b: &Mat4) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            m = m.max((a[i][j] - b[i][j]).norm());
        }
    }
    m
}

/// Largest entry of `U U† - I`.
pub fn unitarity_defect2(u: &Mat2) -> f64 {
    let p = mat2_mul(u, &mat2_adjoint(u));
    let id = mat2_identity();
    let mut m: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            m = m.max((p[i][j] - id[i][j]).norm());
        }
    }
    m
}

/// Maps an angle into (-π, π]; ties at ±π go to +π.
pub fn canonical_angle(theta: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut t = theta % two_pi;
    if t <= -PI {
        t += two_pi;
    } else if t > PI {
        t -= two_pi;
    }
    if (t + PI).abs() < 1e-15 {
        PI
    } else {
        t
    }
}

pub mod gates {
    use super::*;

    pub fn x() -> Mat2 {
        [[ZERO, ONE], [ONE, ZERO]]
    }

    pub fn y() -> Mat2 {
        [[ZERO, -I], [I, ZERO]]
    }

    pub fn z() -> Mat2 {
        [[ONE, ZERO], [ZERO, -ONE]]
    }

    pub fn h() -> Mat2 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        [[c(s, 0.0), c(s, 0.0)], [c(s, 0.0), c(-s, 0.0)]]
    }

    pub fn sx() -> Mat2 {
        [[c(0.5, 0.5), c(0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]]
    }

    /// `exp(-i φ Z / 2)`
    pub fn rz(phi: f64) -> Mat2 {
        [
            [C64::from_polar(1.0, -phi / 2.0), ZERO],
            [ZERO, C64::from_polar(1.0, phi / 2.0)],
        ]
    }

    /// `exp(-i φ Y / 2)`
    pub fn ry(phi: f64) -> Mat2 {
        let (s, co) = (phi / 2.0).sin_cos();
        [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
    }

    /// Euler form applied in time order RZ(α+π), SX, RZ(β+π), SX, RZ(γ).
    pub fn u1q(alpha: f64, beta: f64, gamma: f64) -> Mat2 {
        let m = mat2_mul(&sx(), &rz(alpha + PI));
        let m = mat2_mul(&rz(beta + PI), &m);
        let m = mat2_mul(&sx(), &m);
        mat2_mul(&rz(gamma), &m)
    }

    /// `exp(-i φ Z⊗Z / 2)`
    pub fn rzz(phi: f64) -> Mat4 {
        let a = C64::from_polar(1.0, -phi / 2.0);
        let b = C64::from_polar(1.0, phi / 2.0);
        let mut m = [[ZERO; 4]; 4];
        m[0][0] = a;
        m[1][1] = b;
        m[2][2] = b;
        m[3][3] = a;
        m
    }

    /// `exp(i(α X⊗X + β Y⊗Y + γ Z⊗Z))`
    pub fn ucan(alpha: f64, beta: f64, gamma: f64) -> Mat4 {
        let pexp = |theta: f64, p: Mat4| -> Mat4 {
            let mut m = mat4_identity();
            for i in 0..4 {
                for j in 0..4 {
                    m[i][j] = m[i][j] * theta.cos() + I * theta.sin() * p[i][j];
                }
            }
            m
        };
        let xx = pexp(alpha, kron2(&x(), &x()));
        let yy = pexp(beta, kron2(&y(), &y()));
        let zz = pexp(gamma, kron2(&z(), &z()));
        mat4_mul(&xx, &mat4_mul(&yy, &zz))
    }

    /// CNOT with the first qubit as control.
    pub fn cnot() -> Mat4 {
        let mut m = [[ZERO; 4]; 4];
        m[0][0] = ONE;
        m[1][1] = ONE;
        m[2][3] = ONE;
        m[3][2] = ONE;
        m
    }
}

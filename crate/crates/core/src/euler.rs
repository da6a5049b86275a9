//! Euler decomposition into the hardware `U1q` form.

use crate::error::{Error, Result};
use crate::math::{canonical_angle, gates, mat2_mul, unitarity_defect2, Mat2};
use std::f64::consts::PI;

/// Returns `(alpha, beta, gamma)` with `gates::u1q(alpha, beta, gamma)` equal to `u`
/// up to global phase. Angles are canonical in (-π, π].
pub fn euler_decompose(u: &Mat2) -> Result<(f64, f64, f64)> {
    let defect = unitarity_defect2(u);
    if !(defect <= 1e-9) {
        return Err(Error::NotUnitary(defect));
    }
    // u ∝ RZ(phi) RY(theta) RZ(lam)
    let theta = 2.0 * u[1][0].norm().atan2(u[0][0].norm());
    // normalize to SU(2); the residual sign ambiguity only shifts phi by 2π
    let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
    let s = det.sqrt();
    let sum = -2.0 * (u[0][0] / s).arg();
    let diff = 2.0 * (u[1][0] / s).arg();
    let phi = (sum + diff) / 2.0;
    let lam = (sum - diff) / 2.0;
    // u1q(a, b, g) ∝ RZ(g - π) RY(b) RZ(a + π)
    Ok((canonical_angle(lam - PI), canonical_angle(theta), canonical_angle(phi + PI)))
}

/// Product of gate matrices given in time order.
pub fn compose_time_order<'a>(ms: impl IntoIterator<Item = &'a Mat2>) -> Mat2 {
    let mut acc = crate::math::mat2_identity();
    for m in ms {
        acc = mat2_mul(m, &acc);
    }
    acc
}

/// `+1` if `u` maps Z to Z under conjugation (diagonal), `-1` if to -Z
/// (anti-diagonal), `None` otherwise.
pub fn z_action(u: &Mat2) -> Option<i8> {
    const TOL: f64 = 1e-12;
    if u[0][1].norm() < TOL && u[1][0].norm() < TOL {
        Some(1)
    } else if u[0][0].norm() < TOL && u[1][1].norm() < TOL {
        Some(-1)
    } else {
        None
    }
}

/// Convenience wrapper used by recombination passes.
pub fn u1q_matrix(angles: (f64, f64, f64)) -> Mat2 {
    gates::u1q(angles.0, angles.1, angles.2)
}

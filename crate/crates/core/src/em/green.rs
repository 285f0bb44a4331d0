use std::f64::consts::PI;

use num_complex::Complex64;

use super::WaveNumber;
use crate::error::{Error, Result};
use crate::vec3::{norm, sub, Vec3};

/// Default distance below which two points are treated as coincident.
pub const COINCIDENT_CUTOFF: f64 = 1e-12;

/// `e^{ikr} / (4πr)` for a known distance `r > 0`.
#[inline]
pub fn phi(k: f64, r: f64) -> Complex64 {
    let (s, c) = (k * r).sin_cos();
    Complex64::new(c, s) / (4.0 * PI * r)
}

/// Fundamental solution of the Helmholtz equation, `Φ_k(x, y) = e^{ik|x-y|} / (4π|x-y|)`.
pub fn fundamental_solution(k: WaveNumber, x: &Vec3, y: &Vec3) -> Result<Complex64> {
    fundamental_solution_with_cutoff(k, x, y, COINCIDENT_CUTOFF)
}

pub fn fundamental_solution_with_cutoff(
    k: WaveNumber,
    x: &Vec3,
    y: &Vec3,
    cutoff: f64,
) -> Result<Complex64> {
    let r = norm(&sub(x, y));
    if r < cutoff {
        return Err(Error::CoincidentPoints {
            distance: r,
            cutoff,
        });
    }
    Ok(phi(k.value(), r))
}

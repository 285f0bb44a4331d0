use num_complex::Complex64;

use super::{green::phi, Polarization, WaveNumber, COINCIDENT_CUTOFF};
use crate::error::{Error, Result};
use crate::vec3::{cross, dot, norm, rc, scale, sub, CVec3, Vec3};

/// Tolerance on `| |d| - 1 |` for propagation directions.
pub const UNIT_TOLERANCE: f64 = 1e-10;

/// Electric dipole at `y` with polarization `p`, evaluated at `x`.
///
/// `E = (i/k) curl curl [p Φ_k(·, y)]` and `H = curl [p Φ_k(·, y)]`, with both
/// curls expanded in closed form:
///
/// `E = (i/k) Φ [k² (p - r̂(r̂·p)) + (3 r̂(r̂·p) - p)(1/R² - ik/R)]`,
/// `H = Φ (ik - 1/R) r̂ × p`.
pub fn dipole_fields(k: WaveNumber, p: Polarization, y: &Vec3, x: &Vec3) -> Result<(CVec3, CVec3)> {
    let r = sub(x, y);
    let dist = norm(&r);
    if dist < COINCIDENT_CUTOFF {
        return Err(Error::CoincidentPoints {
            distance: dist,
            cutoff: COINCIDENT_CUTOFF,
        });
    }
    let k = k.value();
    let p = p.vector();
    let rhat = scale(&r, 1.0 / dist);
    let rp = dot(&rhat, p);
    let g = phi(k, dist);
    let ik = Complex64::new(0.0, k);

    let near = Complex64::new(1.0 / (dist * dist), -k / dist);
    let mut e = [Complex64::new(0.0, 0.0); 3];
    for a in 0..3 {
        let transverse = p[a] - rhat[a] * rp;
        let longitudinal = 3.0 * rhat[a] * rp - p[a];
        e[a] = (Complex64::new(k * k * transverse, 0.0) + near * longitudinal) * g * (ik / (k * k));
    }
    let h = rc(&cross(&rhat, p), g * (ik - 1.0 / dist));
    Ok((e, h))
}

/// Plane wave `E = ik (d×p)×d e^{ik x·d}`, `H = ik d×p e^{ik x·d}`.
pub fn plane_wave(k: WaveNumber, d: &Vec3, p: Polarization, x: &Vec3) -> Result<(CVec3, CVec3)> {
    let dn = norm(d);
    if (dn - 1.0).abs() > UNIT_TOLERANCE {
        return Err(Error::NonUnitDirection(dn));
    }
    Ok(plane_wave_unchecked(k.value(), d, p.vector(), x))
}

#[inline]
pub fn plane_wave_unchecked(k: f64, d: &Vec3, p: &Vec3, x: &Vec3) -> (CVec3, CVec3) {
    let dp = cross(d, p);
    let (s, c) = (k * dot(x, d)).sin_cos();
    let amp = Complex64::new(0.0, k) * Complex64::new(c, s);
    (rc(&cross(&dp, d), amp), rc(&dp, amp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vec3::{cnorm, csub};

    fn curl<F: Fn(&Vec3) -> CVec3>(f: F, x: &Vec3, h: f64) -> CVec3 {
        let d = |axis: usize| {
            let mut xp = *x;
            let mut xm = *x;
            xp[axis] += h;
            xm[axis] -= h;
            let (fp, fm) = (f(&xp), f(&xm));
            [
                (fp[0] - fm[0]) / (2.0 * h),
                (fp[1] - fm[1]) / (2.0 * h),
                (fp[2] - fm[2]) / (2.0 * h),
            ]
        };
        let (dx, dy, dz) = (d(0), d(1), d(2));
        [dy[2] - dz[1], dz[0] - dx[2], dx[1] - dy[0]]
    }

    #[test]
    fn dipole_curl_e_is_ik_h() {
        let k = WaveNumber::new(1.3).unwrap();
        let p = Polarization::new([0.2, -0.5, 1.0]).unwrap();
        let y = [0.1, 0.2, -0.3];
        for x in [[1.5, 0.3, 0.2], [-0.7, 2.0, 1.1], [0.0, 0.0, 3.0]] {
            let (_, hf) = dipole_fields(k, p, &y, &x).unwrap();
            let c = curl(|q| dipole_fields(k, p, &y, q).unwrap().0, &x, 1e-4);
            let ikh = [hf[0] * Complex64::new(0.0, 1.3), hf[1] * Complex64::new(0.0, 1.3), hf[2] * Complex64::new(0.0, 1.3)];
            assert!(cnorm(&csub(&c, &ikh)) <= 1e-5 * cnorm(&ikh));
        }
    }

    #[test]
    fn plane_wave_degenerate_and_transverse() {
        let k = WaveNumber::new(2.0).unwrap();
        let d = [0.0, 0.0, 1.0];
        let (e, h) = plane_wave(k, &d, Polarization::new([0.0, 0.0, 3.0]).unwrap(), &[0.3, 0.1, 0.2]).unwrap();
        assert_eq!(cnorm(&e), 0.0);
        assert_eq!(cnorm(&h), 0.0);

        let d = crate::vec3::normalized(&[1.0, 2.0, -0.5]);
        let p = Polarization::new([0.3, 0.4, 1.0]).unwrap();
        let (e, _) = plane_wave(k, &d, p, &[1.0, -1.0, 0.5]).unwrap();
        let edotd = e[0] * d[0] + e[1] * d[1] + e[2] * d[2];
        assert!(edotd.norm() < 1e-14);
    }

    #[test]
    fn plane_wave_amplitude_for_orthogonal_polarization() {
        let k = WaveNumber::new(2.5).unwrap();
        let (e, _) = plane_wave(k, &[1.0, 0.0, 0.0], Polarization::new([0.0, 0.0, 2.0]).unwrap(), &[0.4, 0.0, 0.0]).unwrap();
        assert!((cnorm(&e) - 2.5 * 2.0).abs() < 1e-14);
    }

    #[test]
    fn non_unit_direction_rejected() {
        let k = WaveNumber::new(1.0).unwrap();
        let p = Polarization::new([0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(
            plane_wave(k, &[1.0, 1e-4, 0.0], p, &[0.0; 3]),
            Err(Error::NonUnitDirection(_))
        ));
    }
}

//! Closed-form electromagnetic primitives: the Helmholtz fundamental solution,
//! electric dipole and plane-wave incident fields, Lebedev sphere quadrature,
//! degree-one vector spherical harmonics and the tangential inner products the
//! recognition indicators are built from.

mod green;
mod incident;
mod lebedev;
mod lebedev_data;
mod sphere;
mod vsh;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vec3::{norm, Vec3};

pub use green::{fundamental_solution, fundamental_solution_with_cutoff, phi, COINCIDENT_CUTOFF};
pub use incident::{dipole_fields, plane_wave, plane_wave_unchecked, UNIT_TOLERANCE};
pub use lebedev::{available_orders, lebedev_grid, SphereGrid};
pub use sphere::{inner_product_sphere, ApertureMask, TangentialFieldOnSphere};
pub use vsh::{vsh_basis, VshBasis, VshIndex, VshKind};

/// A complex 3-vector sample of an electric or magnetic field.
pub type ComplexField3 = crate::vec3::CVec3;

/// Wave number `k > 0` in inverse length units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct WaveNumber(f64);

impl WaveNumber {
    pub fn new(k: f64) -> Result<Self> {
        if k.is_finite() && k > 0.0 {
            Ok(Self(k))
        } else {
            Err(Error::InvalidWaveNumber(k))
        }
    }

    pub fn from_wavelength(lambda: f64) -> Result<Self> {
        Self::new(2.0 * std::f64::consts::PI / lambda)
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn wavelength(self) -> f64 {
        2.0 * std::f64::consts::PI / self.0
    }
}

impl TryFrom<f64> for WaveNumber {
    type Error = Error;
    fn try_from(k: f64) -> Result<Self> {
        Self::new(k)
    }
}

impl From<WaveNumber> for f64 {
    fn from(k: WaveNumber) -> f64 {
        k.0
    }
}

/// Real polarization vector of a dipole or plane wave.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct Polarization(Vec3);

impl Polarization {
    pub fn new(p: Vec3) -> Result<Self> {
        if p.iter().all(|c| c.is_finite()) && norm(&p) > 0.0 {
            Ok(Self(p))
        } else {
            Err(Error::InvalidPolarization)
        }
    }

    #[inline]
    pub fn vector(&self) -> &Vec3 {
        &self.0
    }
}

impl TryFrom<[f64; 3]> for Polarization {
    type Error = Error;
    fn try_from(p: [f64; 3]) -> Result<Self> {
        Self::new(p)
    }
}

impl From<Polarization> for [f64; 3] {
    fn from(p: Polarization) -> [f64; 3] {
        p.0
    }
}

/// Electric dipole sources of the device. All dipoles share one polarization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceConfig {
    positions: Vec<Vec3>,
    polarization: Polarization,
}

impl SourceConfig {
    pub fn new(positions: Vec<Vec3>, polarization: Polarization) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::InvalidSources("no source positions".into()));
        }
        if positions.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(Error::InvalidSources("non-finite source position".into()));
        }
        for (i, a) in positions.iter().enumerate() {
            for b in &positions[i + 1..] {
                if a == b {
                    return Err(Error::InvalidSources(format!(
                        "duplicate source position {a:?}"
                    )));
                }
            }
        }
        Ok(Self {
            positions,
            polarization,
        })
    }

    /// One dipole at the origin.
    pub fn single_at_origin(polarization: Polarization) -> Self {
        Self {
            positions: vec![[0.0; 3]],
            polarization,
        }
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn polarization(&self) -> Polarization {
        self.polarization
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wave_number_rejects_nonpositive() {
        assert!(WaveNumber::new(0.0).is_err());
        assert!(WaveNumber::new(-1.0).is_err());
        assert!(WaveNumber::new(f64::NAN).is_err());
        let k = WaveNumber::from_wavelength(2.0).unwrap();
        assert!((k.value() - std::f64::consts::PI).abs() < 1e-15);
        assert!((k.wavelength() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn sources_reject_duplicates_and_empty() {
        let p = Polarization::new([0.0, 0.0, 1.0]).unwrap();
        assert!(SourceConfig::new(vec![], p).is_err());
        assert!(SourceConfig::new(vec![[1.0, 0.0, 0.0], [1.0, 0.0, 0.0]], p).is_err());
        assert!(SourceConfig::new(vec![[1.0, 0.0, 0.0], [0.0, 0.0, 0.0]], p).is_ok());
        assert!(Polarization::new([0.0; 3]).is_err());
    }
}

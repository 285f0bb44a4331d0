use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::quadrature::{box_integrals, box_phase};
use super::system::{DiscreteSystem, Formulation, VoxelGeometry};
use crate::em::{SphereGrid, TangentialFieldOnSphere, WaveNumber};
use crate::error::{Error, Result};
use crate::vec3::{CVec3, Vec3, CZERO3};

/// What produced the incident field of a solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum IncidentDescriptor {
    PlaneWave { direction: Vec3, polarization: Vec3 },
    Dipoles { positions: Vec<Vec3>, polarization: Vec3 },
    Sampled,
}

/// Total field on the voxels together with the equivalent sources needed to
/// evaluate the scattered field anywhere outside the support.
#[derive(Debug, Clone)]
pub struct VolumeSolution {
    k: WaveNumber,
    geometry: VoxelGeometry,
    formulation: Formulation,
    total: Vec<CVec3>,
    /// Indices of voxels that radiate.
    active: Vec<usize>,
    /// `(n−1) E` on active voxels.
    current: Vec<CVec3>,
    /// `(∇n/n)·E` on active voxels (GradientTerm only).
    charge: Option<Vec<Complex64>>,
    incident: IncidentDescriptor,
    iterations: usize,
    residual: f64,
    history: Vec<f64>,
}

impl VolumeSolution {
    pub(crate) fn new(
        system: &DiscreteSystem,
        total: Vec<CVec3>,
        incident: IncidentDescriptor,
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    ) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        let chi = system.chi();
        let glog = system.grad_log_n();
        let active: Vec<usize> = (0..total.len())
            .filter(|&v| chi[v] != zero || glog.is_some_and(|g| g[v].iter().any(|c| *c != zero)))
            .collect();
        let current = active.iter().map(|&v| total[v].map(|e| e * chi[v])).collect();
        let charge = glog.map(|g| {
            active
                .iter()
                .map(|&v| (0..3).map(|a| g[v][a] * total[v][a]).sum())
                .collect()
        });
        Self {
            k: system.k(),
            geometry: *system.geometry(),
            formulation: system.formulation(),
            total,
            active,
            current,
            charge,
            incident,
            iterations,
            residual,
            history,
        }
    }

    pub fn k(&self) -> WaveNumber {
        self.k
    }

    pub fn geometry(&self) -> &VoxelGeometry {
        &self.geometry
    }

    pub fn total_field(&self) -> &[CVec3] {
        &self.total
    }

    pub fn incident(&self) -> &IncidentDescriptor {
        &self.incident
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn residual_history(&self) -> &[f64] {
        &self.history
    }

    fn radiates(&self) -> bool {
        !self.active.is_empty()
    }

    /// Rejects points inside a radiating voxel.
    fn check_exterior(&self, x: &Vec3) -> Result<()> {
        if let Some(idx) = self.geometry.locate(x) {
            let v = (idx[0] * self.geometry.dims[1] + idx[1]) * self.geometry.dims[2] + idx[2];
            if self.active.binary_search(&v).is_ok() {
                return Err(Error::PointInsideSupport(*x));
            }
        }
        Ok(())
    }

    /// Scattered field `E^s(x)` from the volume potential of the solved field.
    pub fn scattered_field_at(&self, x: &Vec3) -> Result<CVec3> {
        self.check_exterior(x)?;
        if !self.radiates() {
            return Ok(CZERO3);
        }
        let k = self.k.value();
        let k2 = k * k;
        let h = self.geometry.spacing;
        let mut e = CZERO3;
        for (slot, &v) in self.active.iter().enumerate() {
            let c = self.geometry.center(v);
            let r = [x[0] - c[0], x[1] - c[1], x[2] - c[2]];
            let b = box_integrals(k, h, &r);
            let q = &self.current[slot];
            match self.formulation {
                Formulation::GradDiv => {
                    for a in 0..3 {
                        e[a] += b.s * k2 * q[a];
                        for bb in 0..3 {
                            e[a] += b.hess[a][bb] * q[bb];
                        }
                    }
                }
                Formulation::Scalar => {
                    for a in 0..3 {
                        e[a] += b.s * k2 * q[a];
                    }
                }
                Formulation::GradientTerm => {
                    let g = self.charge.as_ref().expect("gradient term")[slot];
                    for a in 0..3 {
                        e[a] += b.s * k2 * q[a] + b.grad[a] * g;
                    }
                }
            }
        }
        Ok(e)
    }

    /// Far-field pattern `E^∞` with `E^s(x) = e^{ik|x|}/|x| · E^∞(x̂) + O(|x|⁻²)`,
    /// referenced to the coordinate origin of the voxel centres.
    pub fn far_field(&self, grid: &Arc<SphereGrid>) -> TangentialFieldOnSphere {
        if !self.radiates() {
            return TangentialFieldOnSphere::zeros(grid.clone());
        }
        let k = self.k.value();
        let h = self.geometry.spacing;
        let centers: Vec<Vec3> = self.active.iter().map(|&v| self.geometry.center(v)).collect();
        let scale = 1.0 / (4.0 * PI);
        let samples = grid
            .nodes()
            .iter()
            .map(|xh| {
                let mut sq = CZERO3;
                let mut sg = Complex64::new(0.0, 0.0);
                for (slot, c) in centers.iter().enumerate() {
                    let s = box_phase(k, h, xh, c);
                    let q = &self.current[slot];
                    for a in 0..3 {
                        sq[a] += q[a] * s;
                    }
                    if let Some(g) = &self.charge {
                        sg += g[slot] * s;
                    }
                }
                match self.formulation {
                    // k² Σ q s / 4π, made tangential on construction. For GradDiv the
                    // projection is exactly the (I − x̂x̂) factor.
                    Formulation::GradDiv | Formulation::Scalar => sq.map(|c| c * (k * k * scale)),
                    Formulation::GradientTerm => {
                        let ik = Complex64::new(0.0, k);
                        [0, 1, 2].map(|a| (sq[a] * (k * k) + ik * xh[a] * sg) * scale)
                    }
                }
            })
            .collect();
        let f = TangentialFieldOnSphere::new(grid.clone(), samples).expect("grid-sized samples");
        log::debug!("far-field projection residual {:.3e}", f.projection_residual());
        f
    }
}

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::solution::{IncidentDescriptor, VolumeSolution};
use super::system::{assemble, assemble_with, DiscreteSystem, SolverParams};
use crate::em::{
    dipole_fields, plane_wave_unchecked, Polarization, SourceConfig, SphereGrid, TangentialFieldOnSphere,
    WaveNumber, UNIT_TOLERANCE,
};
use crate::error::{Error, Result};
use crate::shapes::PlacedShape;
use crate::vec3::{cadd, norm, scale, sub, CVec3, Vec3, CZERO3};

/// Receiver positions on the measurement surface with their quadrature
/// weights (cell areas).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReceiverLayout {
    positions: Vec<Vec3>,
    weights: Vec<f64>,
}

impl ReceiverLayout {
    pub fn new(positions: Vec<Vec3>, weights: Vec<f64>) -> Result<Self> {
        if positions.is_empty() || positions.len() != weights.len() {
            return Err(Error::LayoutMismatch(format!(
                "{} positions with {} weights",
                positions.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::LayoutMismatch("weights must be positive".into()));
        }
        Ok(Self { positions, weights })
    }

    /// `count × count` points spanning the square of side `side` in the
    /// `x₂x₃`-plane centred at the origin, edges included, equal weights.
    pub fn square_x2x3(count: usize, side: f64) -> Result<Self> {
        if count < 2 || !(side > 0.0) {
            return Err(Error::LayoutMismatch(format!(
                "square layout needs count >= 2 and side > 0 (got {count}, {side})"
            )));
        }
        let step = side / (count - 1) as f64;
        let mut positions = Vec::with_capacity(count * count);
        for i in 0..count {
            for j in 0..count {
                positions.push([0.0, -0.5 * side + i as f64 * step, -0.5 * side + j as f64 * step]);
            }
        }
        let w = side * side / (count * count) as f64;
        Self::new(positions, vec![w; count * count])
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Same layout moved by `-z`.
    pub fn offsets_from(&self, z: &Vec3) -> Self {
        Self {
            positions: self.positions.iter().map(|x| sub(x, z)).collect(),
            weights: self.weights.clone(),
        }
    }

    /// Largest pointwise distance between two layouts.
    pub fn max_distance(&self, other: &Self) -> Option<f64> {
        (self.len() == other.len()).then(|| {
            self.positions
                .iter()
                .zip(&other.positions)
                .map(|(a, b)| norm(&sub(a, b)))
                .fold(0.0, f64::max)
        })
    }
}

/// Scattered electric field sampled on the receivers.
#[derive(Debug, Clone, PartialEq)]
pub struct ApertureField {
    layout: ReceiverLayout,
    samples: Vec<CVec3>,
    k: WaveNumber,
}

impl ApertureField {
    pub fn new(layout: ReceiverLayout, samples: Vec<CVec3>, k: WaveNumber) -> Result<Self> {
        if layout.len() != samples.len() {
            return Err(Error::LayoutMismatch(format!(
                "{} samples for {} receivers",
                samples.len(),
                layout.len()
            )));
        }
        Ok(Self { layout, samples, k })
    }

    pub fn layout(&self) -> &ReceiverLayout {
        &self.layout
    }

    pub fn samples(&self) -> &[CVec3] {
        &self.samples
    }

    pub fn k(&self) -> WaveNumber {
        self.k
    }

    /// Weighted `Σ wᵢ f(xᵢ)·conj(g(xᵢ))`.
    pub fn inner_product(&self, other: &[CVec3]) -> Result<Complex64> {
        if other.len() != self.samples.len() {
            return Err(Error::LayoutMismatch("sample counts differ".into()));
        }
        Ok(self
            .samples
            .iter()
            .zip(other)
            .zip(&self.layout.weights)
            .map(|((a, b), w)| crate::vec3::hdot(a, b) * *w)
            .sum())
    }

    pub fn norm(&self) -> f64 {
        self.inner_product(&self.samples).map(|c| c.re.max(0.0).sqrt()).unwrap_or(0.0)
    }
}

/// How the far-field pattern of a measurement is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum FarFieldMode {
    /// Exact far-field pattern of the volume potential.
    #[default]
    Exact,
    /// `R e^{−ikR} E^s(R x̂)` at `R = wavelengths · λ` from the origin.
    Rescaled { wavelengths: f64 },
}

/// One simulated acquisition: near field on the receivers and far field.
#[derive(Debug, Clone)]
pub struct Measurement {
    pub aperture: ApertureField,
    pub far_field: TangentialFieldOnSphere,
    pub iterations: usize,
    pub residual: f64,
}

/// Plane wave `E^i` at the voxel centres of a system.
pub fn plane_wave_samples(system: &DiscreteSystem, direction: &Vec3, p: Polarization) -> Result<Vec<CVec3>> {
    let dn = norm(direction);
    if (dn - 1.0).abs() > UNIT_TOLERANCE {
        return Err(Error::NonUnitDirection(dn));
    }
    let k = system.k().value();
    Ok(system
        .centers()
        .iter()
        .map(|c| plane_wave_unchecked(k, direction, p.vector(), c).0)
        .collect())
}

fn dipole_samples(k: WaveNumber, sources: &SourceConfig, points: impl Iterator<Item = Vec3>) -> Result<Vec<CVec3>> {
    points
        .map(|x| {
            let mut e = CZERO3;
            for y in sources.positions() {
                e = cadd(&e, &dipole_fields(k, sources.polarization(), y, &x)?.0);
            }
            Ok(e)
        })
        .collect()
}

fn in_support(system: &DiscreteSystem, x: &Vec3) -> bool {
    let g = system.geometry();
    g.locate(x).is_some_and(|[i, j, l]| {
        let v = (i * g.dims[1] + j) * g.dims[2] + l;
        system.chi()[v] != Complex64::new(0.0, 0.0)
    })
}

fn check_sources(system: &DiscreteSystem, sources: &SourceConfig, shift: &Vec3) -> Result<()> {
    for y in sources.positions() {
        let local = sub(y, shift);
        if in_support(system, &local) {
            return Err(Error::PointInsideSupport(*y));
        }
    }
    Ok(())
}

fn dipole_descriptor(sources: &SourceConfig) -> IncidentDescriptor {
    IncidentDescriptor::Dipoles {
        positions: sources.positions().to_vec(),
        polarization: *sources.polarization().vector(),
    }
}

/// Dipole illumination of `Ω = D + z`, solved in the shape frame: the incident
/// field is sampled at `t + z`, near fields are read at `x − z`, and the far
/// field picks up the factor `e^{−ik x̂·z}`.
pub fn simulate_measurement(
    placed: &PlacedShape,
    k: WaveNumber,
    sources: &SourceConfig,
    receivers: &ReceiverLayout,
    grid: &Arc<SphereGrid>,
    params: &SolverParams,
    mode: FarFieldMode,
) -> Result<Measurement> {
    let system = assemble(placed.contrast(), k, params)?;
    simulate_with_system(&system, &placed.placement().z(), sources, receivers, grid, params, mode)
}

/// [`simulate_measurement`] with a prebuilt shape-frame system.
///
/// Each dipole is solved on its own and the responses are summed in source
/// order, so a multi-source acquisition is exactly the superposition of its
/// single-source acquisitions.
pub fn simulate_with_system(
    system: &DiscreteSystem,
    z: &Vec3,
    sources: &SourceConfig,
    receivers: &ReceiverLayout,
    grid: &Arc<SphereGrid>,
    params: &SolverParams,
    mode: FarFieldMode,
) -> Result<Measurement> {
    check_sources(system, sources, z)?;
    superpose(sources, receivers, grid, system.k(), |single| {
        acquire_local(system, z, single, receivers, grid, params, mode)
    })
}

type Response = (Vec<CVec3>, TangentialFieldOnSphere, usize, f64);

fn superpose(
    sources: &SourceConfig,
    receivers: &ReceiverLayout,
    grid: &Arc<SphereGrid>,
    k: WaveNumber,
    solve_one: impl Fn(&SourceConfig) -> Result<Response>,
) -> Result<Measurement> {
    let mut near = vec![CZERO3; receivers.len()];
    let mut far = vec![CZERO3; grid.len()];
    let (mut iterations, mut residual) = (0, 0.0f64);
    for y in sources.positions() {
        let single = SourceConfig::new(vec![*y], sources.polarization())?;
        let (n, f, it, res) = solve_one(&single)?;
        for (acc, v) in near.iter_mut().zip(&n) {
            *acc = cadd(acc, v);
        }
        for (acc, v) in far.iter_mut().zip(f.samples()) {
            *acc = cadd(acc, v);
        }
        iterations = iterations.max(it);
        residual = residual.max(res);
    }
    Ok(Measurement {
        aperture: ApertureField::new(receivers.clone(), near, k)?,
        far_field: TangentialFieldOnSphere::new(grid.clone(), far)?,
        iterations,
        residual,
    })
}

fn acquire_local(
    system: &DiscreteSystem,
    z: &Vec3,
    sources: &SourceConfig,
    receivers: &ReceiverLayout,
    grid: &Arc<SphereGrid>,
    params: &SolverParams,
    mode: FarFieldMode,
) -> Result<Response> {
    let k = system.k();
    let shifted = *z != [0.0; 3];
    let incident = if shifted {
        dipole_samples(k, sources, system.centers().into_iter().map(|t| [t[0] + z[0], t[1] + z[1], t[2] + z[2]]))?
    } else {
        dipole_samples(k, sources, system.centers().into_iter())?
    };
    let solution = system.solve(incident, dipole_descriptor(sources), params)?;

    let near = receivers
        .positions()
        .iter()
        .map(|x| solution.scattered_field_at(&if shifted { sub(x, z) } else { *x }))
        .collect::<Result<Vec<_>>>()?;

    let far_field = match mode {
        FarFieldMode::Exact => {
            let local = solution.far_field(grid);
            if shifted {
                let kv = k.value();
                local.map_phase(|xh| {
                    let ph = -kv * (xh[0] * z[0] + xh[1] * z[1] + xh[2] * z[2]);
                    Complex64::new(ph.cos(), ph.sin())
                })
            } else {
                local
            }
        }
        FarFieldMode::Rescaled { wavelengths } => rescaled_far_field(&solution, grid, wavelengths, z)?,
    };
    Ok((near, far_field, solution.iterations(), solution.residual()))
}

fn rescaled_far_field(
    solution: &VolumeSolution,
    grid: &Arc<SphereGrid>,
    wavelengths: f64,
    z: &Vec3,
) -> Result<TangentialFieldOnSphere> {
    if !(wavelengths.is_finite() && wavelengths > 0.0) {
        return Err(Error::InvalidArgument(format!("rescale radius {wavelengths} wavelengths")));
    }
    let k = solution.k().value();
    let r = wavelengths * solution.k().wavelength();
    let factor = Complex64::new((k * r).cos(), -(k * r).sin()) * r;
    let samples = grid
        .nodes()
        .iter()
        .map(|xh| {
            let x = sub(&scale(xh, r), z);
            solution.scattered_field_at(&x).map(|e| e.map(|c| c * factor))
        })
        .collect::<Result<Vec<_>>>()?;
    TangentialFieldOnSphere::new(grid.clone(), samples)
}

/// Same acquisition computed directly in world coordinates, without the
/// change of variables. Used to check translation covariance.
pub fn simulate_measurement_in_world_frame(
    placed: &PlacedShape,
    k: WaveNumber,
    sources: &SourceConfig,
    receivers: &ReceiverLayout,
    grid: &Arc<SphereGrid>,
    params: &SolverParams,
    mode: FarFieldMode,
) -> Result<Measurement> {
    let contrast = placed.contrast();
    let z = placed.placement().z();
    let system = assemble_with(contrast, k, params, super::Formulation::for_contrast(contrast), z)?;
    check_sources(&system, sources, &[0.0; 3])?;
    superpose(sources, receivers, grid, k, |single| {
        let incident = dipole_samples(k, single, system.centers().into_iter())?;
        let solution = system.solve(incident, dipole_descriptor(single), params)?;
        let near = receivers
            .positions()
            .iter()
            .map(|x| solution.scattered_field_at(x))
            .collect::<Result<Vec<_>>>()?;
        let far_field = match mode {
            FarFieldMode::Exact => solution.far_field(grid),
            FarFieldMode::Rescaled { wavelengths } => rescaled_far_field(&solution, grid, wavelengths, &[0.0; 3])?,
        };
        Ok((near, far_field, solution.iterations(), solution.residual()))
    })
}

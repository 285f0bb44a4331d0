//! Medium scattering by a voxelised refraction index.
//!
//! The total field solves a volume integral equation on a regular lattice with
//! piecewise-constant collocation. The Toeplitz structure of the lattice lets
//! the operator be applied by zero-padded FFT convolution, and the system is
//! solved with restarted GMRES. Near and far fields follow from the volume
//! potential of the solved field.

mod fft3;
mod gmres;
mod measurement;
pub mod quadrature;
mod solution;
mod system;

pub use measurement::{
    plane_wave_samples, simulate_measurement, simulate_measurement_in_world_frame, simulate_with_system,
    ApertureField,
    FarFieldMode, Measurement, ReceiverLayout,
};
pub use solution::{IncidentDescriptor, VolumeSolution};
pub use system::{assemble, assemble_with, DiscreteSystem, Formulation, SolverParams, VoxelGeometry};

use std::sync::Arc;

use crate::em::{Polarization, SphereGrid, TangentialFieldOnSphere, WaveNumber};
use crate::error::Result;
use crate::shapes::ContrastField;
use crate::vec3::Vec3;

/// Solves plane-wave scattering by a contrast in its own frame.
pub fn solve_plane_wave(
    system: &DiscreteSystem,
    direction: &Vec3,
    polarization: Polarization,
    params: &SolverParams,
) -> Result<VolumeSolution> {
    let incident = plane_wave_samples(system, direction, polarization)?;
    system.solve(
        incident,
        IncidentDescriptor::PlaneWave {
            direction: *direction,
            polarization: *polarization.vector(),
        },
        params,
    )
}

/// Far-field pattern for plane-wave incidence; assembles a fresh system.
pub fn plane_wave_far_field(
    contrast: &ContrastField,
    k: WaveNumber,
    direction: &Vec3,
    polarization: Polarization,
    grid: &Arc<SphereGrid>,
    params: &SolverParams,
) -> Result<TangentialFieldOnSphere> {
    let system = assemble(contrast, k, params)?;
    Ok(solve_plane_wave(&system, direction, polarization, params)?.far_field(grid))
}

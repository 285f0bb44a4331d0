use std::sync::Arc;

use num_complex::Complex64;

use super::SphereGrid;
use crate::error::{Error, Result};
use crate::vec3::{cnorm, dot, hdot, normalized, rdot, tangential, CVec3, Vec3};

/// A far-field pattern: one complex 3-vector per quadrature node, projected
/// onto the tangent plane at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentialFieldOnSphere {
    grid: Arc<SphereGrid>,
    samples: Vec<CVec3>,
    projection_residual: f64,
}

impl TangentialFieldOnSphere {
    /// Projects every sample onto the tangent plane. The largest removed radial
    /// fraction `|x̂·v| / |v|` is kept as `projection_residual`.
    pub fn new(grid: Arc<SphereGrid>, samples: Vec<CVec3>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        let mut residual = 0.0f64;
        let samples = grid
            .nodes()
            .iter()
            .zip(samples)
            .map(|(x, v)| {
                let n = cnorm(&v);
                if n > 0.0 {
                    residual = residual.max(rdot(x, &v).norm() / n);
                }
                tangential(x, &v)
            })
            .collect();
        Ok(Self {
            grid,
            samples,
            projection_residual: residual,
        })
    }

    /// Wraps samples that are already tangential (e.g. read back from disk)
    /// without touching them.
    pub(crate) fn from_stored(grid: Arc<SphereGrid>, samples: Vec<CVec3>, projection_residual: f64) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid,
            samples,
            projection_residual,
        })
    }

    pub fn zeros(grid: Arc<SphereGrid>) -> Self {
        let samples = vec![crate::vec3::CZERO3; grid.len()];
        Self {
            grid,
            samples,
            projection_residual: 0.0,
        }
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn samples(&self) -> &[CVec3] {
        &self.samples
    }

    pub fn projection_residual(&self) -> f64 {
        self.projection_residual
    }

    pub fn norm(&self, mask: Option<&ApertureMask>) -> Result<f64> {
        Ok(inner_product_sphere(self, self, mask)?.re.max(0.0).sqrt())
    }

    /// Pointwise multiplication by a complex scalar function of the node.
    pub fn map_phase<F: Fn(&Vec3) -> Complex64>(&self, f: F) -> Self {
        let samples = self
            .grid
            .nodes()
            .iter()
            .zip(&self.samples)
            .map(|(x, v)| crate::vec3::cscale(v, f(x)))
            .collect();
        Self {
            grid: self.grid.clone(),
            samples,
            projection_residual: self.projection_residual,
        }
    }
}

/// Node subset of a sphere grid used as a limited measurement aperture.
#[derive(Debug, Clone, PartialEq)]
pub struct ApertureMask {
    selected: Vec<bool>,
}

impl ApertureMask {
    pub fn from_selection(selected: Vec<bool>) -> Result<Self> {
        if !selected.iter().any(|&s| s) {
            return Err(Error::EmptyAperture);
        }
        Ok(Self { selected })
    }

    /// Nodes within `half_angle` radians of `axis`.
    pub fn polar_cap(grid: &SphereGrid, axis: &Vec3, half_angle: f64) -> Result<Self> {
        let axis = normalized(axis);
        let cos_limit = half_angle.cos();
        let selected = grid
            .nodes()
            .iter()
            .map(|x| dot(x, &axis) >= cos_limit - 1e-14)
            .collect();
        Self::from_selection(selected)
    }

    pub fn full(grid: &SphereGrid) -> Self {
        Self {
            selected: vec![true; grid.len()],
        }
    }

    pub fn selected(&self) -> &[bool] {
        &self.selected
    }

    pub fn count(&self) -> usize {
        self.selected.iter().filter(|&&s| s).count()
    }
}

/// `Σᵢ wᵢ f(x̂ᵢ)·conj(g(x̂ᵢ))` over all nodes, or over the masked subset.
pub fn inner_product_sphere(
    f: &TangentialFieldOnSphere,
    g: &TangentialFieldOnSphere,
    aperture: Option<&ApertureMask>,
) -> Result<Complex64> {
    if !(Arc::ptr_eq(&f.grid, &g.grid) || f.grid.same_rule(&g.grid)) {
        return Err(Error::GridMismatch);
    }
    let w = f.grid.weights();
    match aperture {
        None => Ok(f
            .samples
            .iter()
            .zip(&g.samples)
            .zip(w)
            .map(|((a, b), &wi)| hdot(a, b) * wi)
            .sum()),
        Some(mask) => {
            if mask.selected.len() != w.len() {
                return Err(Error::GridMismatch);
            }
            if mask.count() == 0 {
                return Err(Error::EmptyAperture);
            }
            Ok(f.samples
                .iter()
                .zip(&g.samples)
                .zip(w)
                .zip(&mask.selected)
                .filter(|(_, &s)| s)
                .map(|(((a, b), &wi), _)| hdot(a, b) * wi)
                .sum())
        }
    }
}

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::{SphereGrid, TangentialFieldOnSphere};
use crate::vec3::{rcross, tangential, CVec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VshKind {
    /// Surface gradient of `Y₁^m`.
    U,
    /// `x̂ ×` surface gradient of `Y₁^m`.
    V,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VshIndex {
    pub kind: VshKind,
    pub m: i8,
}

impl VshIndex {
    pub const ALL: [VshIndex; 6] = [
        VshIndex { kind: VshKind::U, m: -1 },
        VshIndex { kind: VshKind::U, m: 0 },
        VshIndex { kind: VshKind::U, m: 1 },
        VshIndex { kind: VshKind::V, m: -1 },
        VshIndex { kind: VshKind::V, m: 0 },
        VshIndex { kind: VshKind::V, m: 1 },
    ];

    fn slot(self) -> usize {
        let base = match self.kind {
            VshKind::U => 0,
            VshKind::V => 3,
        };
        base + (self.m + 1) as usize
    }
}

/// The six degree-one vector spherical harmonics sampled on a grid, each
/// scaled to unit norm under the grid quadrature.
#[derive(Debug, Clone)]
pub struct VshBasis {
    fields: Vec<TangentialFieldOnSphere>,
}

impl VshBasis {
    pub fn get(&self, index: VshIndex) -> &TangentialFieldOnSphere {
        &self.fields[index.slot()]
    }

    pub fn fields(&self) -> &[TangentialFieldOnSphere] {
        &self.fields
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        self.fields[0].grid()
    }
}

/// Gradient of the degree-one orthonormal harmonic `Y₁^m` (Condon-Shortley
/// phase), written as the constant vector `c_m` with `Y₁^m(x̂) = c_m · x̂`.
fn harmonic_gradient(m: i8) -> CVec3 {
    let c0 = (3.0 / (4.0 * PI)).sqrt();
    let c1 = (3.0 / (8.0 * PI)).sqrt();
    let z = Complex64::new(0.0, 0.0);
    match m {
        0 => [z, z, Complex64::new(c0, 0.0)],
        1 => [Complex64::new(-c1, 0.0), Complex64::new(0.0, -c1), z],
        -1 => [Complex64::new(c1, 0.0), Complex64::new(0.0, -c1), z],
        _ => unreachable!(),
    }
}

pub fn vsh_basis(grid: Arc<SphereGrid>) -> VshBasis {
    let fields = VshIndex::ALL
        .iter()
        .map(|idx| {
            let c = harmonic_gradient(idx.m);
            let raw: Vec<CVec3> = grid
                .nodes()
                .iter()
                .map(|x| {
                    let grad = tangential(x, &c);
                    let v = match idx.kind {
                        VshKind::U => grad,
                        VshKind::V => rcross(x, &grad),
                    };
                    v.map(|c| c * 0.5)
                })
                .collect();
            let norm_sqr: f64 = raw
                .iter()
                .zip(grid.weights())
                .map(|(v, w)| w * crate::vec3::cnorm_sqr(v))
                .sum();
            let s = 1.0 / norm_sqr.sqrt();
            let scaled = raw.into_iter().map(|v| v.map(|c| c * s)).collect();
            TangentialFieldOnSphere::new(grid.clone(), scaled).expect("grid-sized samples")
        })
        .collect();
    VshBasis { fields }
}

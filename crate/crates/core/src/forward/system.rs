use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fft3::Fft3;
use super::gmres::gmres;
use super::quadrature::box_integrals;
use super::solution::{IncidentDescriptor, VolumeSolution};
use crate::em::WaveNumber;
use crate::error::{Error, Result};
use crate::shapes::ContrastField;
use crate::vec3::{is_finite_c3, CVec3, Vec3, CZERO3};

/// Iteration and size limits for the volume solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverParams {
    /// Target relative residual `‖(I−T)E − E^i‖ / ‖E^i‖`.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Krylov subspace size between restarts.
    pub restart: usize,
    /// Largest voxel count accepted by `assemble`.
    pub max_voxels: usize,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_iterations: 500,
            restart: 100,
            max_voxels: 2_000_000,
        }
    }
}

/// Which form of the volume equation is discretised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Formulation {
    /// `E − (k² + ∇∇·) A[(n−1)E] = E^i`, the dielectric equation. Used for
    /// jump contrasts.
    GradDiv,
    /// `E + k² A[mE] = E^i`: componentwise, without any gradient term.
    Scalar,
    /// `E + k² A[mE] − ∇A[(∇n/n)·E] = E^i` with `∇n` by central differences.
    /// Used for smoothed contrasts.
    GradientTerm,
}

impl Formulation {
    pub fn for_contrast(c: &ContrastField) -> Self {
        if c.smoothing() > 0.0 {
            Formulation::GradientTerm
        } else {
            Formulation::GradDiv
        }
    }
}

/// Regular voxel lattice: centres `origin + (i, j, l)·spacing`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoxelGeometry {
    pub origin: Vec3,
    pub spacing: f64,
    pub dims: [usize; 3],
}

impl VoxelGeometry {
    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn unravel(&self, v: usize) -> [usize; 3] {
        let l = v % self.dims[2];
        let j = (v / self.dims[2]) % self.dims[1];
        let i = v / (self.dims[1] * self.dims[2]);
        [i, j, l]
    }

    pub fn center(&self, v: usize) -> Vec3 {
        let [i, j, l] = self.unravel(v);
        [
            self.origin[0] + i as f64 * self.spacing,
            self.origin[1] + j as f64 * self.spacing,
            self.origin[2] + l as f64 * self.spacing,
        ]
    }

    pub fn centers(&self) -> Vec<Vec3> {
        (0..self.len()).map(|v| self.center(v)).collect()
    }

    /// Index of the voxel whose closed cell contains `x`, if any.
    pub fn locate(&self, x: &Vec3) -> Option<[usize; 3]> {
        let mut idx = [0usize; 3];
        for a in 0..3 {
            let q = ((x[a] - self.origin[a]) / self.spacing + 0.5).floor();
            if q < 0.0 || q >= self.dims[a] as f64 {
                return None;
            }
            idx[a] = q as usize;
        }
        Some(idx)
    }
}

/// FFT-diagonalised Toeplitz kernels on the zero-padded lattice.
struct Convolution {
    fft: Fft3,
    padded: [usize; 3],
    /// GradDiv: `[xx, yy, zz, xy, xz, yz]` of `k²S·I + ∇∇S`.
    /// GradientTerm: `[S, ∂xS, ∂yS, ∂zS]`.
    /// Scalar: `[S]`.
    kernels: Vec<Vec<Complex64>>,
}

const PAIRS: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];

fn pair_slot(a: usize, b: usize) -> usize {
    match (a.min(b), a.max(b)) {
        (0, 0) => 0,
        (1, 1) => 1,
        (2, 2) => 2,
        (0, 1) => 3,
        (0, 2) => 4,
        _ => 5,
    }
}

/// The discretised operator `I − T` on a voxel lattice for one wave number.
pub struct DiscreteSystem {
    k: WaveNumber,
    geometry: VoxelGeometry,
    formulation: Formulation,
    /// `n − 1` per voxel.
    chi: Vec<Complex64>,
    /// `∇n / n` per voxel (GradientTerm only).
    grad_log_n: Option<Vec<CVec3>>,
    conv: Option<Convolution>,
}

impl std::fmt::Debug for DiscreteSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DiscreteSystem")
            .field("k", &self.k)
            .field("geometry", &self.geometry)
            .field("formulation", &self.formulation)
            .finish_non_exhaustive()
    }
}

/// Builds the operator for a contrast in its own (shape-local) frame.
pub fn assemble(contrast: &ContrastField, k: WaveNumber, params: &SolverParams) -> Result<DiscreteSystem> {
    assemble_with(contrast, k, params, Formulation::for_contrast(contrast), [0.0; 3])
}

/// Like [`assemble`] with an explicit formulation, and with every voxel centre
/// shifted by `offset`.
pub fn assemble_with(
    contrast: &ContrastField,
    k: WaveNumber,
    params: &SolverParams,
    formulation: Formulation,
    offset: Vec3,
) -> Result<DiscreteSystem> {
    let voxels = contrast.len();
    if voxels > params.max_voxels {
        return Err(Error::MemoryBudget {
            voxels,
            budget: params.max_voxels,
        });
    }
    let o = contrast.origin();
    let geometry = VoxelGeometry {
        origin: [o[0] + offset[0], o[1] + offset[1], o[2] + offset[2]],
        spacing: contrast.spacing(),
        dims: contrast.dims(),
    };
    let one = Complex64::new(1.0, 0.0);
    let chi: Vec<Complex64> = contrast.n().iter().map(|n| n - one).collect();
    let grad_log_n = match formulation {
        Formulation::GradDiv | Formulation::Scalar => None,
        Formulation::GradientTerm => Some(gradient_log_index(contrast)),
    };
    let zero = chi.iter().all(|c| *c == Complex64::new(0.0, 0.0));
    let conv = if zero {
        None
    } else {
        Some(build_convolution(k.value(), &geometry, formulation))
    };
    Ok(DiscreteSystem {
        k,
        geometry,
        formulation,
        chi,
        grad_log_n,
        conv,
    })
}

fn gradient_log_index(c: &ContrastField) -> Vec<CVec3> {
    let [n0, n1, n2] = c.dims();
    let n = c.n();
    let h = c.spacing();
    let one = Complex64::new(1.0, 0.0);
    let at = |i: isize, j: isize, l: isize| -> Complex64 {
        if i < 0 || j < 0 || l < 0 || i >= n0 as isize || j >= n1 as isize || l >= n2 as isize {
            one
        } else {
            n[c.index(i as usize, j as usize, l as usize)]
        }
    };
    let mut out = Vec::with_capacity(n.len());
    for i in 0..n0 as isize {
        for j in 0..n1 as isize {
            for l in 0..n2 as isize {
                let nv = at(i, j, l);
                let g = [
                    (at(i + 1, j, l) - at(i - 1, j, l)) / (2.0 * h),
                    (at(i, j + 1, l) - at(i, j - 1, l)) / (2.0 * h),
                    (at(i, j, l + 1) - at(i, j, l - 1)) / (2.0 * h),
                ];
                out.push(g.map(|x| x / nv));
            }
        }
    }
    out
}

fn build_convolution(k: f64, geometry: &VoxelGeometry, formulation: Formulation) -> Convolution {
    let dims = geometry.dims;
    let padded = dims.map(|n| 2 * n);
    let total: usize = padded.iter().product();
    let h = geometry.spacing;
    let span = dims.map(|n| 2 * n - 1);
    let offsets: Vec<[isize; 3]> = (0..span[0] * span[1] * span[2])
        .map(|v| {
            let l = v % span[2];
            let j = (v / span[2]) % span[1];
            let i = v / (span[1] * span[2]);
            [
                i as isize - (dims[0] as isize - 1),
                j as isize - (dims[1] as isize - 1),
                l as isize - (dims[2] as isize - 1),
            ]
        })
        .collect();
    let values: Vec<Vec<Complex64>> = offsets
        .par_iter()
        .map(|o| {
            let r = [o[0] as f64 * h, o[1] as f64 * h, o[2] as f64 * h];
            let b = box_integrals(k, h, &r);
            match formulation {
                Formulation::GradDiv => PAIRS
                    .iter()
                    .map(|&(a, c)| b.hess[a][c] + if a == c { b.s * (k * k) } else { Complex64::new(0.0, 0.0) })
                    .collect(),
                Formulation::GradientTerm => vec![b.s, b.grad[0], b.grad[1], b.grad[2]],
                Formulation::Scalar => vec![b.s],
            }
        })
        .collect();
    let count = values[0].len();
    let mut kernels = vec![vec![Complex64::new(0.0, 0.0); total]; count];
    for (o, v) in offsets.iter().zip(&values) {
        let w = [0, 1, 2].map(|a| o[a].rem_euclid(padded[a] as isize) as usize);
        let idx = (w[0] * padded[1] + w[1]) * padded[2] + w[2];
        for (kc, val) in kernels.iter_mut().zip(v) {
            kc[idx] = *val;
        }
    }
    let fft = Fft3::new(padded);
    for kc in kernels.iter_mut() {
        fft.forward(kc);
    }
    Convolution { fft, padded, kernels }
}

impl DiscreteSystem {
    pub fn k(&self) -> WaveNumber {
        self.k
    }

    pub fn geometry(&self) -> &VoxelGeometry {
        &self.geometry
    }

    pub fn formulation(&self) -> Formulation {
        self.formulation
    }

    pub fn len(&self) -> usize {
        self.geometry.len()
    }

    pub fn is_empty(&self) -> bool {
        self.geometry.is_empty()
    }

    pub fn chi(&self) -> &[Complex64] {
        &self.chi
    }

    pub fn grad_log_n(&self) -> Option<&[CVec3]> {
        self.grad_log_n.as_deref()
    }

    pub fn is_zero_contrast(&self) -> bool {
        self.conv.is_none()
    }

    pub fn centers(&self) -> Vec<Vec3> {
        self.geometry.centers()
    }

    fn padded_index(&self, v: usize) -> usize {
        let [i, j, l] = self.geometry.unravel(v);
        let p = self.conv.as_ref().expect("nonzero contrast").padded;
        (i * p[1] + j) * p[2] + l
    }

    /// `T E` with `E` in component-major layout (`x[a·N + v]`).
    fn apply_t_flat(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.len();
        let Some(conv) = &self.conv else {
            return vec![Complex64::new(0.0, 0.0); 3 * n];
        };
        let total = conv.fft.len();
        let zero = Complex64::new(0.0, 0.0);
        let scatter = |f: &dyn Fn(usize) -> Complex64| {
            let mut buf = vec![zero; total];
            for v in 0..n {
                buf[self.padded_index(v)] = f(v);
            }
            conv.fft.forward(&mut buf);
            buf
        };
        let q: Vec<Vec<Complex64>> = (0..3).map(|a| scatter(&|v| self.chi[v] * x[a * n + v])).collect();
        let mut outs: Vec<Vec<Complex64>> = match self.formulation {
            Formulation::GradDiv => (0..3)
                .map(|a| {
                    (0..total)
                        .map(|s| (0..3).map(|b| conv.kernels[pair_slot(a, b)][s] * q[b][s]).sum())
                        .collect()
                })
                .collect(),
            Formulation::Scalar => {
                let k2 = self.k.value() * self.k.value();
                q.iter().map(|qa| qa.iter().zip(&conv.kernels[0]).map(|(x, s)| x * s * k2).collect()).collect()
            }
            Formulation::GradientTerm => {
                let glog = self.grad_log_n.as_ref().expect("gradient term");
                let g = scatter(&|v| (0..3).map(|b| glog[v][b] * x[b * n + v]).sum());
                let k2 = self.k.value() * self.k.value();
                (0..3)
                    .map(|a| {
                        (0..total)
                            .map(|s| conv.kernels[0][s] * q[a][s] * k2 + conv.kernels[a + 1][s] * g[s])
                            .collect()
                    })
                    .collect()
            }
        };
        let mut y = vec![zero; 3 * n];
        for (a, out) in outs.iter_mut().enumerate() {
            conv.fft.inverse(out);
            for v in 0..n {
                y[a * n + v] = out[self.padded_index(v)];
            }
        }
        y
    }

    /// Applies `T` to a voxel field.
    pub fn apply_t(&self, e: &[CVec3]) -> Vec<CVec3> {
        let n = self.len();
        assert_eq!(e.len(), n, "field length does not match the voxel count");
        unflatten(&self.apply_t_flat(&flatten(e)), n)
    }

    /// Applies `I − T` to a voxel field.
    pub fn apply(&self, e: &[CVec3]) -> Vec<CVec3> {
        let te = self.apply_t(e);
        e.iter()
            .zip(te)
            .map(|(a, b)| [a[0] - b[0], a[1] - b[1], a[2] - b[2]])
            .collect()
    }

    /// Solves `(I − T) E = E^i` for the total field.
    pub fn solve(
        &self,
        incident: Vec<CVec3>,
        descriptor: IncidentDescriptor,
        params: &SolverParams,
    ) -> Result<VolumeSolution> {
        let n = self.len();
        if incident.len() != n {
            return Err(Error::InvalidArgument(format!(
                "incident field has {} samples for {n} voxels",
                incident.len()
            )));
        }
        if let Some(v) = incident.iter().position(|e| !is_finite_c3(e)) {
            return Err(Error::NonFiniteIncident(v));
        }
        if self.conv.is_none() {
            return Ok(VolumeSolution::new(self, incident, descriptor, 0, 0.0, Vec::new()));
        }
        let b = flatten(&incident);
        let out = gmres(
            |x| {
                let t = self.apply_t_flat(x);
                x.iter().zip(t).map(|(a, b)| a - b).collect()
            },
            &b,
            params.tolerance,
            params.max_iterations,
            params.restart,
        );
        if !(out.residual <= params.tolerance) {
            return Err(Error::NotConverged {
                iterations: out.iterations,
                residual: out.residual,
                tolerance: params.tolerance,
                history: out.history,
            });
        }
        let total = unflatten(&out.x, n);
        Ok(VolumeSolution::new(self, total, descriptor, out.iterations, out.residual, out.history))
    }
}

fn flatten(e: &[CVec3]) -> Vec<Complex64> {
    let n = e.len();
    let mut x = vec![Complex64::new(0.0, 0.0); 3 * n];
    for (v, f) in e.iter().enumerate() {
        for a in 0..3 {
            x[a * n + v] = f[a];
        }
    }
    x
}

fn unflatten(x: &[Complex64], n: usize) -> Vec<CVec3> {
    (0..n)
        .map(|v| {
            let mut f = CZERO3;
            for (a, c) in f.iter_mut().enumerate() {
                *c = x[a * n + v];
            }
            f
        })
        .collect()
}

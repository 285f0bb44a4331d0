//! Gesture geometry: unions of lattice cubes, their voxel contrast fields and
//! rigid translations.

use std::collections::{HashSet, VecDeque};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vec3::{add, norm, sub, Vec3};

pub type Anchor = [i32; 3];

pub const MAX_CUBES: usize = 64;

/// Bounds on `max_{x∈D} |x|` enforced for the shipped presets.
pub const PRESET_EXTENT_RANGE: (f64, f64) = (1.0, 4.0);

/// Placement ratio `|z| / diameter(D)` below which a warning is logged.
pub const DEFAULT_ASYMPTOTIC_RATIO: f64 = 10.0;

const FACE_NEIGHBOURS: [Anchor; 6] = [
    [1, 0, 0],
    [-1, 0, 0],
    [0, 1, 0],
    [0, -1, 0],
    [0, 0, 1],
    [0, 0, -1],
];

/// A gesture `D`: union of cubes `[a, a+1]³·size`, shifted so that the centroid
/// of the union sits at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeSpec {
    id: String,
    cubes: Vec<Anchor>,
    size: f64,
    /// Componentwise minimum anchor; positions are measured from here so that
    /// shifting every anchor by a lattice vector changes nothing downstream.
    base: Anchor,
    /// Centroid relative to `base`, subtracted from every cube position.
    centroid: Vec3,
}

impl ShapeSpec {
    pub fn new(id: impl Into<String>, cubes: Vec<Anchor>) -> Result<Self> {
        Self::with_size(id, cubes, 1.0)
    }

    pub fn with_size(id: impl Into<String>, cubes: Vec<Anchor>, size: f64) -> Result<Self> {
        let id: String = id.into();
        let err_id = id.clone();
        let invalid = |reason: String| Error::InvalidShape {
            id: err_id.clone(),
            reason,
        };
        if !(size.is_finite() && size > 0.0) {
            return Err(invalid(format!("cube size must be positive, got {size}")));
        }
        if cubes.is_empty() || cubes.len() > MAX_CUBES {
            return Err(invalid(format!(
                "cube count {} outside 1..={MAX_CUBES}",
                cubes.len()
            )));
        }
        let set: HashSet<Anchor> = cubes.iter().copied().collect();
        if set.len() != cubes.len() {
            return Err(invalid("duplicate anchors".into()));
        }
        if !face_connected(&cubes, &set) {
            return Err(invalid("cube set is not face-connected".into()));
        }
        if has_void(&cubes, &set) {
            return Err(invalid("cube set encloses a void".into()));
        }

        let mut base = [i32::MAX; 3];
        for a in &cubes {
            for i in 0..3 {
                base[i] = base[i].min(a[i]);
            }
        }
        let mut centroid = [0.0; 3];
        for a in &cubes {
            for i in 0..3 {
                centroid[i] += (a[i] - base[i]) as f64 + 0.5;
            }
        }
        let centroid = centroid.map(|c| c / cubes.len() as f64);
        let shape = Self {
            id,
            cubes,
            size,
            base,
            centroid,
        };
        if !shape.contains(&[0.0; 3]) {
            return Err(invalid("centroid lies outside the cube union".into()));
        }
        Ok(shape)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn cubes(&self) -> &[Anchor] {
        &self.cubes
    }

    pub fn cube_count(&self) -> usize {
        self.cubes.len()
    }

    pub fn size(&self) -> f64 {
        self.size
    }

    pub fn volume(&self) -> f64 {
        self.cubes.len() as f64 * self.size.powi(3)
    }

    /// Lower corner of cube `a` in centred coordinates.
    fn cube_min(&self, a: &Anchor) -> Vec3 {
        [0, 1, 2].map(|i| ((a[i] - self.base[i]) as f64 - self.centroid[i]) * self.size)
    }

    fn corners(&self) -> impl Iterator<Item = Vec3> + '_ {
        self.cubes.iter().flat_map(move |a| {
            let lo = self.cube_min(a);
            (0..8).map(move |c| {
                [0, 1, 2].map(|i| lo[i] + if c & (1 << i) != 0 { self.size } else { 0.0 })
            })
        })
    }

    /// `max_{x∈D} |x|`.
    pub fn extent(&self) -> f64 {
        self.corners().map(|c| norm(&c)).fold(0.0, f64::max)
    }

    pub fn diameter(&self) -> f64 {
        let corners: Vec<Vec3> = self.corners().collect();
        let mut d = 0.0f64;
        for (i, a) in corners.iter().enumerate() {
            for b in &corners[i + 1..] {
                d = d.max(norm(&sub(a, b)));
            }
        }
        d
    }

    /// Axis-aligned bounding box `(min, max)` in centred coordinates.
    pub fn bounding_box(&self) -> (Vec3, Vec3) {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for c in self.corners() {
            for i in 0..3 {
                lo[i] = lo[i].min(c[i]);
                hi[i] = hi[i].max(c[i]);
            }
        }
        (lo, hi)
    }

    /// Closed-set membership.
    pub fn contains(&self, x: &Vec3) -> bool {
        self.distance_outside(x) == 0.0
    }

    /// Euclidean distance from `x` to the union, zero inside.
    pub fn distance_outside(&self, x: &Vec3) -> f64 {
        self.cubes
            .iter()
            .map(|a| {
                let lo = self.cube_min(a);
                let mut s = 0.0;
                for i in 0..3 {
                    let d = (lo[i] - x[i]).max(x[i] - lo[i] - self.size).max(0.0);
                    s += d * d;
                }
                s.sqrt()
            })
            .fold(f64::INFINITY, f64::min)
    }
}

fn face_connected(cubes: &[Anchor], set: &HashSet<Anchor>) -> bool {
    let mut seen = HashSet::from([cubes[0]]);
    let mut queue = VecDeque::from([cubes[0]]);
    while let Some(c) = queue.pop_front() {
        for d in FACE_NEIGHBOURS {
            let n = [c[0] + d[0], c[1] + d[1], c[2] + d[2]];
            if set.contains(&n) && seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    seen.len() == cubes.len()
}

/// Flood-fills the complement inside a box padded by one cell; any empty cell
/// not reached from outside is an enclosed void.
fn has_void(cubes: &[Anchor], set: &HashSet<Anchor>) -> bool {
    let mut lo = [i32::MAX; 3];
    let mut hi = [i32::MIN; 3];
    for a in cubes {
        for i in 0..3 {
            lo[i] = lo[i].min(a[i] - 1);
            hi[i] = hi[i].max(a[i] + 1);
        }
    }
    let inside = |c: &Anchor| (0..3).all(|i| c[i] >= lo[i] && c[i] <= hi[i]);
    let mut seen = HashSet::from([lo]);
    let mut queue = VecDeque::from([lo]);
    while let Some(c) = queue.pop_front() {
        for d in FACE_NEIGHBOURS {
            let n = [c[0] + d[0], c[1] + d[1], c[2] + d[2]];
            if inside(&n) && !set.contains(&n) && seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    let total: i64 = (0..3).map(|i| (hi[i] - lo[i] + 1) as i64).product();
    (seen.len() + set.len()) as i64 != total
}

/// Representative gesture layouts, four to eight cubes each.
pub fn preset_names() -> [&'static str; 6] {
    ["D1", "D2", "D3", "D4", "D5", "D6"]
}

pub fn preset(name: &str) -> Result<ShapeSpec> {
    let cubes: Vec<Anchor> = match name {
        "D1" => vec![[0, 0, 0], [1, 0, 0], [2, 0, 0], [0, 1, 0]],
        "D2" => vec![[0, 0, 0], [1, 0, 0], [2, 0, 0], [1, 1, 0], [1, 2, 0]],
        "D3" => vec![[0, 0, 0], [1, 0, 0], [1, 1, 0], [1, 1, 1], [2, 1, 1], [2, 2, 1]],
        "D4" => vec![
            [0, 0, 0],
            [1, 0, 0],
            [0, 1, 0],
            [1, 1, 0],
            [0, 2, 0],
            [2, 0, 0],
            [0, 0, 1],
        ],
        "D5" => vec![
            [0, 0, 0],
            [1, 0, 0],
            [0, 1, 0],
            [1, 1, 0],
            [0, 0, 1],
            [1, 0, 1],
            [0, 1, 1],
            [2, 0, 0],
        ],
        "D6" => vec![[0, 0, 0], [0, 1, 0], [1, 1, 0], [1, 1, 1], [1, 1, 2], [1, 1, 3]],
        other => {
            return Err(Error::InvalidShape {
                id: other.to_string(),
                reason: format!("unknown preset; available: {:?}", preset_names()),
            })
        }
    };
    let shape = ShapeSpec::new(name, cubes)?;
    let e = shape.extent();
    if !(PRESET_EXTENT_RANGE.0..=PRESET_EXTENT_RANGE.1).contains(&e) {
        return Err(Error::InvalidShape {
            id: name.to_string(),
            reason: format!("extent {e} outside {PRESET_EXTENT_RANGE:?}"),
        });
    }
    Ok(shape)
}

/// One shape as written in a shape file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeDefinition {
    pub id: String,
    pub cubes: Vec<Anchor>,
    #[serde(default = "default_size")]
    pub size: f64,
}

fn default_size() -> f64 {
    1.0
}

impl ShapeDefinition {
    pub fn build(&self) -> Result<ShapeSpec> {
        let shape = ShapeSpec::with_size(self.id.clone(), self.cubes.clone(), self.size)?;
        let e = shape.extent() / shape.size();
        if !(PRESET_EXTENT_RANGE.0..=PRESET_EXTENT_RANGE.1).contains(&e) {
            log::warn!(
                "shape {} has extent {e:.3} cube edges, outside the dictionary scale {PRESET_EXTENT_RANGE:?}",
                shape.id()
            );
        }
        Ok(shape)
    }
}

/// Refraction index sampled at voxel centres of a regular lattice in
/// shape-local coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ContrastField {
    origin: Vec3,
    spacing: f64,
    dims: [usize; 3],
    n: Vec<Complex64>,
    resolution: usize,
    smoothing: f64,
    n_inside: Complex64,
}

impl ContrastField {
    /// Centre of voxel `(0,0,0)`.
    pub fn origin(&self) -> Vec3 {
        self.origin
    }

    /// Voxel edge length.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.n.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n.is_empty()
    }

    /// Voxels per cube edge.
    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn smoothing(&self) -> f64 {
        self.smoothing
    }

    pub fn n_inside(&self) -> Complex64 {
        self.n_inside
    }

    pub fn index(&self, i: usize, j: usize, l: usize) -> usize {
        (i * self.dims[1] + j) * self.dims[2] + l
    }

    pub fn n(&self) -> &[Complex64] {
        &self.n
    }

    /// `m = 1 − n` per voxel.
    pub fn m(&self) -> Vec<Complex64> {
        self.n.iter().map(|n| Complex64::new(1.0, 0.0) - n).collect()
    }

    pub fn is_zero_contrast(&self) -> bool {
        self.n.iter().all(|n| *n == Complex64::new(1.0, 0.0))
    }

    pub fn center(&self, i: usize, j: usize, l: usize) -> Vec3 {
        [
            self.origin[0] + i as f64 * self.spacing,
            self.origin[1] + j as f64 * self.spacing,
            self.origin[2] + l as f64 * self.spacing,
        ]
    }

    pub fn centers(&self) -> Vec<Vec3> {
        let [a, b, c] = self.dims;
        let mut out = Vec::with_capacity(self.len());
        for i in 0..a {
            for j in 0..b {
                for l in 0..c {
                    out.push(self.center(i, j, l));
                }
            }
        }
        out
    }

    /// Volume of voxels with nonzero contrast.
    pub fn support_volume(&self) -> f64 {
        let one = Complex64::new(1.0, 0.0);
        self.n.iter().filter(|n| **n != one).count() as f64 * self.spacing.powi(3)
    }

    /// Largest distance from the origin to any voxel with nonzero contrast,
    /// including the voxel half-diagonal.
    pub fn support_radius(&self) -> f64 {
        let one = Complex64::new(1.0, 0.0);
        let half_diag = 0.5 * 3f64.sqrt() * self.spacing;
        self.centers()
            .iter()
            .zip(&self.n)
            .filter(|(_, n)| **n != one)
            .map(|(c, _)| norm(c) + half_diag)
            .fold(0.0, f64::max)
    }

    /// True if `x` (local coordinates) lies in a voxel with nonzero contrast
    /// or within `margin` of one.
    pub fn touches_support(&self, x: &Vec3, margin: f64) -> bool {
        let one = Complex64::new(1.0, 0.0);
        let half = 0.5 * self.spacing + margin;
        self.centers()
            .iter()
            .zip(&self.n)
            .filter(|(_, n)| **n != one)
            .any(|(c, _)| (0..3).all(|i| (x[i] - c[i]).abs() <= half))
    }
}

/// Samples the refraction index on a lattice of `resolution` voxels per cube
/// edge. Outside the union `n` blends linearly back to 1 over distance
/// `smoothing`; `smoothing = 0` gives a jump.
pub fn rasterize_contrast(
    shape: &ShapeSpec,
    n_inside: Complex64,
    resolution: usize,
    smoothing: f64,
) -> Result<ContrastField> {
    if n_inside.re <= 0.0 || n_inside.im < 0.0 || !n_inside.is_finite() {
        return Err(Error::InvalidContrast(format!(
            "n_inside = {n_inside} needs Re n > 0 and Im n >= 0"
        )));
    }
    if resolution < 2 {
        return Err(Error::InvalidContrast(format!(
            "resolution {resolution} below 2 voxels per cube edge"
        )));
    }
    if !(smoothing.is_finite() && smoothing >= 0.0) {
        return Err(Error::InvalidContrast(format!("smoothing radius {smoothing}")));
    }
    let spacing = shape.size / resolution as f64;
    let pad = if smoothing > 0.0 {
        (smoothing / spacing).ceil() as usize + 1
    } else {
        0
    };

    let mut lo = [i32::MAX; 3];
    let mut hi = [i32::MIN; 3];
    for a in &shape.cubes {
        for i in 0..3 {
            lo[i] = lo[i].min(a[i] - shape.base[i]);
            hi[i] = hi[i].max(a[i] - shape.base[i] + 1);
        }
    }
    let dims = [0, 1, 2].map(|i| (hi[i] - lo[i]) as usize * resolution + 2 * pad);
    // Lattice-frame coordinates of voxel centres are computed exactly from
    // integers, then shifted; the result is independent of where the anchors sit.
    let lattice_center = |i: usize, axis: usize| {
        (i as f64 - pad as f64 + 0.5) / resolution as f64 + lo[axis] as f64
    };
    let origin = [0, 1, 2].map(|a| (lattice_center(0, a) - shape.centroid[a]) * shape.size);

    let one = Complex64::new(1.0, 0.0);
    let mut n = Vec::with_capacity(dims[0] * dims[1] * dims[2]);
    for i in 0..dims[0] {
        for j in 0..dims[1] {
            for l in 0..dims[2] {
                let x = [
                    (lattice_center(i, 0) - shape.centroid[0]) * shape.size,
                    (lattice_center(j, 1) - shape.centroid[1]) * shape.size,
                    (lattice_center(l, 2) - shape.centroid[2]) * shape.size,
                ];
                let d = shape.distance_outside(&x);
                let v = if d == 0.0 {
                    n_inside
                } else if smoothing == 0.0 || d >= smoothing {
                    one
                } else {
                    n_inside + (one - n_inside) * (d / smoothing)
                };
                n.push(v);
            }
        }
    }
    Ok(ContrastField {
        origin,
        spacing,
        dims,
        n,
        resolution,
        smoothing,
        n_inside,
    })
}

/// Rigid translation `y = x + z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    z: Vec3,
}

impl Placement {
    pub fn new(z: Vec3) -> Result<Self> {
        if !crate::vec3::is_finite3(&z) {
            return Err(Error::InvalidArgument(format!("non-finite placement {z:?}")));
        }
        Ok(Self { z })
    }

    pub fn z(&self) -> Vec3 {
        self.z
    }

    pub fn translate(&self, x: &Vec3) -> Vec3 {
        add(x, &self.z)
    }

    pub fn untranslate(&self, y: &Vec3) -> Vec3 {
        sub(y, &self.z)
    }
}

/// `Ω = D + z` with its contrast field (stored in local coordinates).
#[derive(Debug, Clone, PartialEq)]
pub struct PlacedShape {
    shape: ShapeSpec,
    placement: Placement,
    contrast: ContrastField,
}

impl PlacedShape {
    pub fn new(shape: ShapeSpec, placement: Placement, contrast: ContrastField) -> Self {
        let ratio = norm(&placement.z) / shape.diameter();
        if ratio < DEFAULT_ASYMPTOTIC_RATIO {
            log::warn!(
                "placement |z| / diameter = {ratio:.2} for {} is below {DEFAULT_ASYMPTOTIC_RATIO}",
                shape.id()
            );
        }
        Self {
            shape,
            placement,
            contrast,
        }
    }

    pub fn shape(&self) -> &ShapeSpec {
        &self.shape
    }

    pub fn placement(&self) -> Placement {
        self.placement
    }

    pub fn contrast(&self) -> &ContrastField {
        &self.contrast
    }

    /// Voxel centres in world coordinates.
    pub fn world_centers(&self) -> Vec<Vec3> {
        self.contrast
            .centers()
            .iter()
            .map(|c| self.placement.translate(c))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cube_is_centred() {
        let s = ShapeSpec::new("c", vec![[0, 0, 0]]).unwrap();
        assert!((s.diameter() - 3f64.sqrt()).abs() < 1e-14);
        let (lo, hi) = s.bounding_box();
        assert_eq!(lo, [-0.5; 3]);
        assert_eq!(hi, [0.5; 3]);
    }

    #[test]
    fn presets_are_valid() {
        for name in preset_names() {
            let s = preset(name).unwrap();
            assert!((4..=8).contains(&s.cube_count()), "{name}");
            let e = s.extent();
            assert!((1.0..=4.0).contains(&e), "{name}: {e}");
            assert!(s.contains(&[0.0; 3]));
        }
    }

    #[test]
    fn presets_are_pairwise_distinct_up_to_translation() {
        let names = preset_names();
        for (i, a) in names.iter().enumerate() {
            for b in &names[i + 1..] {
                let (sa, sb) = (preset(a).unwrap(), preset(b).unwrap());
                let ca = rasterize_contrast(&sa, Complex64::new(5.0, 0.0), 2, 0.0).unwrap();
                let cb = rasterize_contrast(&sb, Complex64::new(5.0, 0.0), 2, 0.0).unwrap();
                assert!(ca != cb);
            }
        }
    }

    #[test]
    fn diagonal_touching_cubes_rejected() {
        let e = ShapeSpec::new("d", vec![[0, 0, 0], [1, 1, 0]]).unwrap_err();
        assert!(matches!(e, Error::InvalidShape { .. }));
        assert!(ShapeSpec::new("e", vec![[0, 0, 0], [0, 0, 0]]).is_err());
        assert!(ShapeSpec::new("f", vec![]).is_err());
    }

    #[test]
    fn enclosed_void_rejected() {
        let mut cubes = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                for l in 0..3 {
                    if (i, j, l) != (1, 1, 1) {
                        cubes.push([i, j, l]);
                    }
                }
            }
        }
        let e = ShapeSpec::new("hollow", cubes).unwrap_err();
        assert!(e.to_string().contains("void"));
    }

    #[test]
    fn centroid_outside_union_rejected() {
        // A U-shape whose centroid falls in the gap.
        let cubes = vec![[0, 0, 0], [1, 0, 0], [2, 0, 0], [0, 1, 0], [2, 1, 0], [0, 2, 0], [2, 2, 0]];
        assert!(ShapeSpec::new("u", cubes).is_err());
    }

    #[test]
    fn jump_contrast_is_piecewise_constant() {
        let s = preset("D2").unwrap();
        let c = rasterize_contrast(&s, Complex64::new(5.0, 0.0), 4, 0.0).unwrap();
        let inside = c.n().iter().filter(|n| **n == Complex64::new(5.0, 0.0)).count();
        let outside = c.n().iter().filter(|n| **n == Complex64::new(1.0, 0.0)).count();
        assert_eq!(inside + outside, c.len());
        assert_eq!(inside, 5 * 64);
        assert!((c.support_volume() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn unit_index_gives_zero_contrast() {
        let s = preset("D1").unwrap();
        let c = rasterize_contrast(&s, Complex64::new(1.0, 0.0), 3, 0.5).unwrap();
        assert!(c.m().iter().all(|m| *m == Complex64::new(0.0, 0.0)));
        assert!(c.is_zero_contrast());
    }

    #[test]
    fn smoothed_support_volume_grows_with_radius() {
        let s = ShapeSpec::new("c", vec![[0, 0, 0]]).unwrap();
        let res = 8;
        let h = 1.0 / res as f64;
        for rho in [0.0, h, 2.0 * h] {
            let c = rasterize_contrast(&s, Complex64::new(5.0, 0.0), res, rho).unwrap();
            let v = c.support_volume();
            // The inflated cube [−½−ρ, ½+ρ]³ bounds the support from above.
            assert!(v >= 1.0 - 1e-12 && v <= (1.0 + 2.0 * rho + 2.0 * h).powi(3), "rho={rho}: {v}");
            for n in c.n() {
                assert!(n.re > 0.0 && n.im >= 0.0);
            }
        }
    }

    #[test]
    fn invalid_contrast_rejected() {
        let s = preset("D1").unwrap();
        assert!(rasterize_contrast(&s, Complex64::new(-1.0, 0.0), 4, 0.0).is_err());
        assert!(rasterize_contrast(&s, Complex64::new(2.0, -0.1), 4, 0.0).is_err());
        assert!(rasterize_contrast(&s, Complex64::new(2.0, 0.0), 1, 0.0).is_err());
    }

    #[test]
    fn lattice_shift_gives_identical_contrast() {
        let base = preset("D3").unwrap();
        let shifted: Vec<Anchor> = base.cubes().iter().map(|a| [a[0] + 7, a[1] - 3, a[2] + 11]).collect();
        let moved = ShapeSpec::new("D3", shifted).unwrap();
        for rho in [0.0, 0.25] {
            let a = rasterize_contrast(&base, Complex64::new(5.0, 0.0), 4, rho).unwrap();
            let b = rasterize_contrast(&moved, Complex64::new(5.0, 0.0), 4, rho).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn placement_translates() {
        let p = Placement::new([150.0, 0.0, 0.0]).unwrap();
        assert_eq!(p.translate(&[0.0; 3]), [150.0, 0.0, 0.0]);
        let id = Placement::new([0.0; 3]).unwrap();
        assert_eq!(id.translate(&[1.0, 2.0, 3.0]), [1.0, 2.0, 3.0]);
    }
}

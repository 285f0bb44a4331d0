//! Two-stage recognition: locate the gesture with a low-frequency indicator
//! built from phase-shifted degree-one vector spherical harmonics, then pick
//! its shape by normalised correlation against translated dictionary fields.

use std::borrow::Cow;
use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dictionary::{Dictionary, DictionaryEntry, NearFieldSpec, OnDemandDictionary, DIRECTION_GAP_WARNING};
use crate::em::{inner_product_sphere, ApertureMask, TangentialFieldOnSphere, VshBasis, VshIndex, WaveNumber};
use crate::error::{Error, Result};
use crate::forward::ApertureField;
use crate::vec3::{cnorm, cscale, hdot, norm, scale, sub, CVec3, Vec3};

/// Relative tolerance under which two indicator values count as a tie.
pub const TIE_TOLERANCE: f64 = 1e-9;
/// Slack allowed above the theoretical indicator bound of 1.
pub const INDICATOR_BOUND_SLACK: f64 = 1e-6;
/// Largest `|z̊ − z_ref|` for which stored near fields are reused.
pub const NEAR_LAYOUT_TOLERANCE: f64 = 1.0;

fn unimodular(phase: f64) -> Complex64 {
    Complex64::new(phase.cos(), phase.sin())
}

/// `e^{ik|z|}/(4π|z|)`.
fn translation_factor(k: f64, z: &Vec3) -> Result<Complex64> {
    let r = norm(z);
    if r == 0.0 {
        return Err(Error::InvalidArgument("translation point must be nonzero".into()));
    }
    Ok(unimodular(k * r) / (4.0 * PI * r))
}

/// `(e^{ik|z̃|}/(4π|z̃|)) e^{−ik x̂·z̃} W(x̂)` for the basis field `W = index`.
pub fn probe_field(z: &Vec3, k: WaveNumber, basis: &VshBasis, index: VshIndex) -> Result<TangentialFieldOnSphere> {
    let kv = k.value();
    let f = translation_factor(kv, z)?;
    Ok(basis
        .get(index)
        .map_phase(|x| f * unimodular(-kv * (x[0] * z[0] + x[1] * z[1] + x[2] * z[2]))))
}

/// The location indicator for one measured far field, with the
/// `z̃`-independent parts precomputed.
///
/// `I(z̃) = sqrt(Σ |⟨E, probe(z̃)⟩|²) / (‖E‖ / (4π|z̃|))`. Because every probe
/// has modulus `1/(4π|z̃|)` times a unit phase, this reduces to
/// `sqrt(Σ_j |Σ_i w_i e^{ik x̂_i·z̃} E_i·conj(W_j(x̂_i))|²) / ‖E‖`.
#[derive(Debug, Clone)]
pub struct LocationIndicator {
    k: f64,
    nodes: Vec<Vec3>,
    /// `w_i E_i·conj(W_j(x̂_i))` per basis field, on selected nodes only.
    weighted: [Vec<Complex64>; 6],
    norm: f64,
}

impl LocationIndicator {
    pub fn new(
        far: &TangentialFieldOnSphere,
        k: WaveNumber,
        basis: &VshBasis,
        mask: Option<&ApertureMask>,
    ) -> Result<Self> {
        if !far.grid().same_rule(basis.grid()) {
            return Err(Error::GridMismatch);
        }
        let grid = far.grid();
        if let Some(m) = mask {
            if m.selected().len() != grid.len() {
                return Err(Error::GridMismatch);
            }
        }
        let norm = far.norm(mask)?;
        if norm == 0.0 {
            return Err(Error::ZeroNorm("measured far field"));
        }
        let keep: Vec<usize> = (0..grid.len()).filter(|&i| mask.is_none_or(|m| m.selected()[i])).collect();
        let nodes = keep.iter().map(|&i| grid.nodes()[i]).collect();
        let weighted = [0, 1, 2, 3, 4, 5].map(|j| {
            let w = &basis.fields()[j];
            keep.iter()
                .map(|&i| hdot(&far.samples()[i], &w.samples()[i]) * grid.weights()[i])
                .collect()
        });
        Ok(Self {
            k: k.value(),
            nodes,
            weighted,
            norm,
        })
    }

    pub fn eval(&self, z: &Vec3) -> Result<f64> {
        if norm(z) == 0.0 {
            return Err(Error::InvalidArgument("sampling point at the origin".into()));
        }
        let phases: Vec<Complex64> = self
            .nodes
            .iter()
            .map(|x| unimodular(self.k * (x[0] * z[0] + x[1] * z[1] + x[2] * z[2])))
            .collect();
        let energy: f64 = self
            .weighted
            .iter()
            .map(|a| a.iter().zip(&phases).map(|(v, p)| v * p).sum::<Complex64>().norm_sqr())
            .sum();
        Ok(energy.sqrt() / self.norm)
    }
}

/// `I(z̃)` for a single sampling point.
pub fn location_indicator(
    far: &TangentialFieldOnSphere,
    z: &Vec3,
    k: WaveNumber,
    basis: &VshBasis,
    mask: Option<&ApertureMask>,
) -> Result<f64> {
    LocationIndicator::new(far, k, basis, mask)?.eval(z)
}

/// `true` when the wavelength is not large compared to the shape, i.e.
/// `2π/k < 2·diameter`.
pub fn low_frequency_advisory(k: WaveNumber, diameter: f64) -> bool {
    k.wavelength() < 2.0 * diameter
}

/// Axis-aligned lattice of candidate positions
/// `center + (i − (n−1)/2)·spacing` per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingGrid {
    pub center: Vec3,
    pub spacing: [f64; 3],
    pub counts: [usize; 3],
}

impl SamplingGrid {
    pub fn new(center: Vec3, spacing: [f64; 3], counts: [usize; 3]) -> Result<Self> {
        let g = Self { center, spacing, counts };
        g.validate()?;
        Ok(g)
    }

    /// `9×9×9` points with spacing `λ_low / 40`.
    pub fn default_for(center: Vec3, k_low: WaveNumber) -> Self {
        let h = k_low.wavelength() / 40.0;
        Self {
            center,
            spacing: [h; 3],
            counts: [9; 3],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.counts.contains(&0) {
            return Err(Error::InvalidSamplingGrid(format!("counts {:?} must be positive", self.counts)));
        }
        if self.spacing.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::InvalidSamplingGrid(format!("spacing {:?} must be positive", self.spacing)));
        }
        if !crate::vec3::is_finite3(&self.center) {
            return Err(Error::InvalidSamplingGrid("non-finite centre".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, v: usize) -> [usize; 3] {
        let l = v % self.counts[2];
        let j = (v / self.counts[2]) % self.counts[1];
        let i = v / (self.counts[1] * self.counts[2]);
        [i, j, l]
    }

    pub fn point_at(&self, idx: [usize; 3]) -> Vec3 {
        [0, 1, 2].map(|a| self.center[a] + (idx[a] as f64 - (self.counts[a] as f64 - 1.0) / 2.0) * self.spacing[a])
    }

    pub fn point(&self, v: usize) -> Vec3 {
        self.point_at(self.index(v))
    }

    pub fn points(&self) -> Vec<Vec3> {
        (0..self.len()).map(|v| self.point(v)).collect()
    }

    /// On the outer layer along some axis that has more than one point.
    pub fn on_boundary(&self, v: usize) -> bool {
        let idx = self.index(v);
        (0..3).any(|a| self.counts[a] > 1 && (idx[a] == 0 || idx[a] == self.counts[a] - 1))
    }

    pub fn contains(&self, x: &Vec3) -> bool {
        (0..3).all(|a| {
            let half = (self.counts[a] as f64 - 1.0) / 2.0 * self.spacing[a];
            (x[a] - self.center[a]).abs() <= half + 1e-12 * self.spacing[a]
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocationResult {
    pub position: Vec3,
    pub value: f64,
    pub k: f64,
    /// Indicator at every sampling point, in sampling-grid order.
    pub map: Vec<f64>,
    /// Grid index of the coarse maximiser.
    pub argmax: usize,
    /// All grid points within [`TIE_TOLERANCE`] of the maximum; more than one
    /// means the argmax is not unique.
    pub maximisers: Vec<usize>,
    pub on_boundary: bool,
    pub refined: bool,
}

impl LocationResult {
    pub fn is_tie(&self) -> bool {
        self.maximisers.len() > 1
    }
}

/// Coarse argmax of `I` over the sampling grid, optionally polished by
/// golden-section coordinate search within half a cell.
pub fn locate(
    far: &TangentialFieldOnSphere,
    k: WaveNumber,
    basis: &VshBasis,
    grid: &SamplingGrid,
    mask: Option<&ApertureMask>,
    refine: bool,
) -> Result<LocationResult> {
    grid.validate()?;
    let ind = LocationIndicator::new(far, k, basis, mask)?;
    let map: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|v| ind.eval(&grid.point(v)))
        .collect::<Result<_>>()?;
    let (argmax, value) = map
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });
    let maximisers: Vec<usize> = map
        .iter()
        .enumerate()
        .filter(|(_, &v)| v >= value - TIE_TOLERANCE * value.abs())
        .map(|(i, _)| i)
        .collect();
    let on_boundary = maximisers.iter().any(|&v| grid.on_boundary(v));
    if on_boundary {
        log::warn!("indicator maximum lies on the sampling-grid boundary; the target may be outside S");
    }
    if maximisers.len() > 1 {
        log::warn!("indicator maximum is attained at {} sampling points", maximisers.len());
    }
    let mut position = grid.point(argmax);
    let mut best = value;
    if refine {
        (position, best) = refine_maximum(&ind, position, best, grid.spacing)?;
    }
    if best > 1.0 + INDICATOR_BOUND_SLACK && mask.is_none() {
        log::warn!("indicator value {best} exceeds 1");
    }
    Ok(LocationResult {
        position,
        value: best,
        k: k.value(),
        map,
        argmax,
        maximisers,
        on_boundary,
        refined: refine,
    })
}

fn refine_maximum(ind: &LocationIndicator, start: Vec3, start_value: f64, spacing: [f64; 3]) -> Result<(Vec3, f64)> {
    const GOLDEN: f64 = 0.618_033_988_749_894_8;
    let mut x = start;
    let mut fx = start_value;
    for _sweep in 0..3 {
        for a in 0..3 {
            let (mut lo, mut hi) = (start[a] - 0.5 * spacing[a], start[a] + 0.5 * spacing[a]);
            let at = |t: f64, x: &Vec3| {
                let mut p = *x;
                p[a] = t;
                ind.eval(&p)
            };
            let mut c = hi - GOLDEN * (hi - lo);
            let mut d = lo + GOLDEN * (hi - lo);
            let (mut fc, mut fd) = (at(c, &x)?, at(d, &x)?);
            for _ in 0..40 {
                if fc > fd {
                    hi = d;
                    d = c;
                    fd = fc;
                    c = hi - GOLDEN * (hi - lo);
                    fc = at(c, &x)?;
                } else {
                    lo = c;
                    c = d;
                    fc = fd;
                    d = lo + GOLDEN * (hi - lo);
                    fd = at(d, &x)?;
                }
            }
            let t = 0.5 * (lo + hi);
            let ft = at(t, &x)?;
            if ft > fx {
                x[a] = t;
                fx = ft;
            }
        }
    }
    Ok((x, fx))
}

/// `Ê^∞(x̂) = (e^{ik|z̊|}/(4π|z̊|)) e^{−ik x̂·z̊} E^∞(D, ẑ̊, p; x̂)`.
pub fn translated_far_field(entry: &DictionaryEntry, z: &Vec3) -> Result<TangentialFieldOnSphere> {
    let k = entry.key.k;
    let f = translation_factor(k, z)?;
    Ok(entry
        .far_field
        .map_phase(|x| f * unimodular(-k * (x[0] * z[0] + x[1] * z[1] + x[2] * z[2]))))
}

/// Far-field shape indicator `|⟨E, Ê⟩| / (‖E‖‖Ê‖)`.
pub fn shape_indicator_far(
    measured: &TangentialFieldOnSphere,
    entry: &DictionaryEntry,
    z: &Vec3,
    mask: Option<&ApertureMask>,
) -> Result<f64> {
    let hat = translated_far_field(entry, z)?;
    let nm = measured.norm(mask)?;
    if nm == 0.0 {
        return Err(Error::ZeroNorm("measured far field"));
    }
    let nh = hat.norm(mask)?;
    if nh == 0.0 {
        return Err(Error::ZeroNorm("dictionary far field"));
    }
    Ok((inner_product_sphere(measured, &hat, mask)?.norm() / (nm * nh)).min(1.0))
}

/// Near-field shape indicator over `L²(Γ)` with receiver-cell weights. The
/// entry holds `E^s(D, ẑ̊, p; x − z_ref)`; it is reused for `z̊` as long as the
/// offsets shifted by `z̊` land on the receivers within
/// [`NEAR_LAYOUT_TOLERANCE`].
pub fn shape_indicator_near(
    measured: &ApertureField,
    entry: &DictionaryEntry,
    spec: &NearFieldSpec,
    z: &Vec3,
) -> Result<f64> {
    let stored = entry
        .near_field
        .as_ref()
        .ok_or_else(|| Error::LayoutMismatch("dictionary entry has no near field".into()))?;
    let positions = measured.layout().positions();
    if positions.len() != stored.len() {
        return Err(Error::LayoutMismatch(format!(
            "{} receivers measured, {} stored",
            positions.len(),
            stored.len()
        )));
    }
    let offsets = spec.offsets();
    let misfit = offsets
        .iter()
        .zip(positions)
        .map(|(o, x)| norm(&sub(&[o[0] + z[0], o[1] + z[1], o[2] + z[2]], x)))
        .fold(0.0, f64::max);
    if misfit > NEAR_LAYOUT_TOLERANCE {
        return Err(Error::LayoutMismatch(format!(
            "stored offsets miss the receivers by {misfit:.3} (tolerance {NEAR_LAYOUT_TOLERANCE})"
        )));
    }
    let f = translation_factor(entry.key.k, z)?;
    let hat: Vec<CVec3> = stored.iter().map(|v| cscale(v, f)).collect();
    let nm = measured.norm();
    if nm == 0.0 {
        return Err(Error::ZeroNorm("measured near field"));
    }
    let weights = measured.layout().weights();
    let nh = hat.iter().zip(weights).map(|(v, w)| w * cnorm(v).powi(2)).sum::<f64>().sqrt();
    if nh == 0.0 {
        return Err(Error::ZeroNorm("dictionary near field"));
    }
    Ok((measured.inner_product(&hat)?.norm() / (nm * nh)).min(1.0))
}

/// Where dictionary entries come from during identification.
pub trait EntrySource {
    fn shape_ids(&self) -> Vec<String>;
    /// Entry for `shape` closest to direction `zhat`, with the angular gap.
    fn entry_for(&self, shape: &str, k: WaveNumber, zhat: &Vec3) -> Result<(Cow<'_, DictionaryEntry>, f64)>;
    fn near_field(&self) -> Option<&NearFieldSpec>;
}

impl EntrySource for Dictionary {
    fn shape_ids(&self) -> Vec<String> {
        self.shapes().iter().map(|s| s.id.clone()).collect()
    }

    fn entry_for(&self, shape: &str, k: WaveNumber, zhat: &Vec3) -> Result<(Cow<'_, DictionaryEntry>, f64)> {
        let (e, gap) = self.nearest_direction_entry(shape, k, zhat)?;
        Ok((Cow::Borrowed(e), gap))
    }

    fn near_field(&self) -> Option<&NearFieldSpec> {
        Dictionary::near_field(self)
    }
}

impl EntrySource for OnDemandDictionary {
    fn shape_ids(&self) -> Vec<String> {
        self.shapes().iter().map(|s| s.id.clone()).collect()
    }

    fn entry_for(&self, shape: &str, k: WaveNumber, zhat: &Vec3) -> Result<(Cow<'_, DictionaryEntry>, f64)> {
        let e = self.entry(shape, k, zhat)?;
        Ok((Cow::Owned((*e).clone()), 0.0))
    }

    fn near_field(&self) -> Option<&NearFieldSpec> {
        OnDemandDictionary::near_field(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum MatchMode {
    #[default]
    Far,
    Near,
}

/// What is matched against the dictionary.
#[derive(Debug, Clone, Copy)]
pub enum MeasuredData<'a> {
    Far(&'a TangentialFieldOnSphere, Option<&'a ApertureMask>),
    Near(&'a ApertureField),
}

impl MeasuredData<'_> {
    pub fn mode(&self) -> MatchMode {
        match self {
            MeasuredData::Far(..) => MatchMode::Far,
            MeasuredData::Near(_) => MatchMode::Near,
        }
    }
}

/// One row of a match table: `J` against every dictionary shape.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Identification {
    pub shapes: Vec<String>,
    pub raw: Vec<f64>,
    pub normalized: Vec<f64>,
    /// Columns within [`TIE_TOLERANCE`] of the row maximum.
    pub winners: Vec<usize>,
    /// Angular gap between `ẑ̊` and the entry direction used, per column.
    pub direction_gaps: Vec<f64>,
    pub mode: MatchMode,
}

impl Identification {
    pub fn is_tie(&self) -> bool {
        self.winners.len() > 1
    }

    /// Identified shape, or `None` on a tie.
    pub fn shape(&self) -> Option<&str> {
        (!self.is_tie()).then(|| self.shapes[self.winners[0]].as_str())
    }
}

/// Scores every dictionary shape against the measurement at the located
/// position `z̊` and picks the maximiser.
pub fn identify(
    data: MeasuredData<'_>,
    source: &(dyn EntrySource + Sync),
    k: WaveNumber,
    z: &Vec3,
) -> Result<Identification> {
    let r = norm(z);
    if r == 0.0 {
        return Err(Error::InvalidArgument("located position at the origin".into()));
    }
    let zhat = scale(z, 1.0 / r);
    let shapes = source.shape_ids();
    if shapes.is_empty() {
        return Err(Error::InvalidDictionary("no shapes".into()));
    }
    let scored: Vec<(f64, f64)> = shapes
        .iter()
        .map(|s| {
            let (entry, gap) = source.entry_for(s, k, &zhat)?;
            if gap > DIRECTION_GAP_WARNING {
                log::warn!(
                    "dictionary direction for {s} is {:.1}° from the located direction",
                    gap.to_degrees()
                );
            }
            let j = match data {
                MeasuredData::Far(far, mask) => shape_indicator_far(far, &entry, z, mask)?,
                MeasuredData::Near(near) => {
                    let spec = source
                        .near_field()
                        .ok_or_else(|| Error::LayoutMismatch("dictionary stores no near fields".into()))?;
                    shape_indicator_near(near, &entry, spec, z)?
                }
            };
            Ok((j, gap))
        })
        .collect::<Result<_>>()?;
    let raw: Vec<f64> = scored.iter().map(|s| s.0).collect();
    let (normalized, winners) = normalize_row(&raw);
    if winners.len() > 1 {
        log::warn!(
            "shape tie between {}",
            winners.iter().map(|&i| shapes[i].as_str()).collect::<Vec<_>>().join(", ")
        );
    }
    Ok(Identification {
        shapes,
        raw,
        normalized,
        winners,
        direction_gaps: scored.iter().map(|s| s.1).collect(),
        mode: data.mode(),
    })
}

/// Divides a row by its maximum; returns the normalised row and the columns
/// within [`TIE_TOLERANCE`] of the maximum.
pub fn normalize_row(raw: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let max = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let winners = raw
        .iter()
        .enumerate()
        .filter(|(_, &v)| v >= max - TIE_TOLERANCE * max.abs())
        .map(|(i, _)| i)
        .collect();
    let normalized = if max > 0.0 {
        raw.iter().map(|v| v / max).collect()
    } else {
        vec![0.0; raw.len()]
    };
    (normalized, winners)
}

/// Gesture table: rows are the true shapes, columns the dictionary shapes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchTable {
    pub rows: Vec<String>,
    pub columns: Vec<String>,
    pub raw: Vec<Vec<f64>>,
    pub normalized: Vec<Vec<f64>>,
    pub winners: Vec<Vec<usize>>,
}

impl MatchTable {
    pub fn from_identifications(rows: Vec<String>, ids: &[Identification]) -> Result<Self> {
        if rows.len() != ids.len() || ids.is_empty() {
            return Err(Error::InvalidArgument("one identification per row is required".into()));
        }
        let columns = ids[0].shapes.clone();
        if ids.iter().any(|i| i.shapes != columns) {
            return Err(Error::InvalidArgument("rows were scored against different shape sets".into()));
        }
        Ok(Self {
            rows,
            columns,
            raw: ids.iter().map(|i| i.raw.clone()).collect(),
            normalized: ids.iter().map(|i| i.normalized.clone()).collect(),
            winners: ids.iter().map(|i| i.winners.clone()).collect(),
        })
    }

    /// Column of row `r`'s own shape, if the dictionary has it.
    fn own_column(&self, r: usize) -> Option<usize> {
        self.columns.iter().position(|c| *c == self.rows[r])
    }

    /// Smallest gap between the diagonal and the best off-diagonal value in
    /// the normalised table (positive when every row is diagonal-dominant).
    pub fn diagonal_margin(&self) -> Option<f64> {
        let mut margin = f64::INFINITY;
        for r in 0..self.rows.len() {
            let c = self.own_column(r)?;
            let off = self.normalized[r]
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != c)
                .map(|(_, v)| *v)
                .fold(f64::NEG_INFINITY, f64::max);
            margin = margin.min(self.normalized[r][c] - off);
        }
        Some(margin)
    }

    /// Every row's own shape is the unique maximiser.
    pub fn diagonal_dominant(&self) -> bool {
        (0..self.rows.len()).all(|r| self.own_column(r).is_some_and(|c| self.winners[r] == [c]))
    }

    pub fn to_csv(&self, comments: &[String], normalized: bool) -> String {
        let data = if normalized { &self.normalized } else { &self.raw };
        let mut out = comment_lines(comments);
        let _ = writeln!(out, "shape,{},identified", self.columns.join(","));
        for (r, row) in data.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.6}")).collect();
            let id = if self.winners[r].len() == 1 {
                self.columns[self.winners[r][0]].clone()
            } else {
                "TIE".to_string()
            };
            let _ = writeln!(out, "{},{},{id}", self.rows[r], cells.join(","));
        }
        out
    }
}

fn comment_lines(comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        for line in c.lines() {
            let _ = writeln!(out, "# {line}");
        }
    }
    out
}

/// One row per located shape: true and estimated positions and the error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocationRow {
    pub shape: String,
    pub truth: Option<Vec3>,
    pub result: LocationResult,
}

impl LocationRow {
    pub fn error(&self) -> Option<f64> {
        self.truth.map(|t| norm(&sub(&self.result.position, &t)))
    }
}

pub fn location_table_csv(rows: &[LocationRow], comments: &[String]) -> String {
    let mut out = comment_lines(comments);
    let _ = writeln!(out, "shape,true_x,true_y,true_z,found_x,found_y,found_z,error,indicator,boundary,tie");
    for r in rows {
        let t = r
            .truth
            .map(|t| format!("{:.6},{:.6},{:.6}", t[0], t[1], t[2]))
            .unwrap_or_else(|| ",,".into());
        let p = r.result.position;
        let e = r.error().map(|e| format!("{e:.6}")).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{t},{:.6},{:.6},{:.6},{e},{:.9},{},{}",
            r.shape,
            p[0],
            p[1],
            p[2],
            r.result.value,
            r.result.on_boundary,
            r.result.is_tie()
        );
    }
    out
}

pub fn indicator_map_csv(grid: &SamplingGrid, result: &LocationResult, comments: &[String]) -> String {
    let mut out = comment_lines(comments);
    let _ = writeln!(out, "x,y,z,indicator");
    for (v, val) in result.map.iter().enumerate() {
        let p = grid.point(v);
        let _ = writeln!(out, "{:.6},{:.6},{:.6},{val:.9}", p[0], p[1], p[2]);
    }
    out
}

/// Relative noise level and RNG seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub delta: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(delta: f64, seed: u64) -> Result<Self> {
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(Error::InvalidArgument(format!("noise level {delta} must be >= 0")));
        }
        Ok(Self { delta, seed })
    }
}

/// `E + δ ζ₁ M e^{i2πζ₂}` per component with `ζ₁, ζ₂ ~ U(−1, 1)` drawn
/// independently for every component of every sample, and `M` the largest
/// Euclidean magnitude over the samples. `stream` selects an independent
/// ChaCha stream so that several fields can share one seed.
pub fn add_noise(samples: &[CVec3], spec: &NoiseSpec, stream: u64) -> Vec<CVec3> {
    if spec.delta == 0.0 {
        return samples.to_vec();
    }
    let m = samples.iter().map(cnorm).fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(stream);
    samples
        .iter()
        .map(|v| {
            v.map(|c| {
                let z1: f64 = rng.gen_range(-1.0..1.0);
                let z2: f64 = rng.gen_range(-1.0..1.0);
                c + unimodular(2.0 * PI * z2) * (spec.delta * z1 * m)
            })
        })
        .collect()
}

/// Noisy copy of a far field, projected back onto the tangent plane.
pub fn add_far_field_noise(far: &TangentialFieldOnSphere, spec: &NoiseSpec, stream: u64) -> Result<TangentialFieldOnSphere> {
    TangentialFieldOnSphere::new(far.grid().clone(), add_noise(far.samples(), spec, stream))
}

pub fn add_aperture_noise(field: &ApertureField, spec: &NoiseSpec, stream: u64) -> Result<ApertureField> {
    ApertureField::new(field.layout().clone(), add_noise(field.samples(), spec, stream), field.k())
}

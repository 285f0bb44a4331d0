//! Precomputed plane-wave responses of the admissible gestures.
//!
//! Every entry holds the far-field pattern `E^∞(D, d, p; ·)` on a shared
//! sphere grid and, optionally, the scattered field at receiver offsets
//! `x − z_ref` for a nominal placement `z_ref`. The binary layout is described
//! in `docs/dictionary-format.md`.

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::em::{lebedev_grid, Polarization, SphereGrid, TangentialFieldOnSphere, WaveNumber, UNIT_TOLERANCE};
use crate::error::{Error, Result};
use crate::forward::{assemble, solve_plane_wave, DiscreteSystem, Formulation, ReceiverLayout, SolverParams};
use crate::shapes::{rasterize_contrast, ShapeSpec};
use crate::vec3::{cnorm_sqr, csub, dot, norm, sub, CVec3, Vec3};

pub const MAGIC: [u8; 8] = *b"EMGDICT\0";
pub const FORMAT_VERSION: u32 = 1;
/// Directions further than this from the request trigger a warning.
pub const DIRECTION_GAP_WARNING: f64 = 5.0 * std::f64::consts::PI / 180.0;
/// Two wave numbers name the same dictionary slice if they agree to this
/// relative tolerance.
pub const K_MATCH_TOLERANCE: f64 = 1e-9;

const CHECKSUM_LEN: usize = 32;
const PREAMBLE_LEN: usize = 8 + 4 + 4;

/// How a shape is turned into a refraction index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContrastSettings {
    /// `[Re n, Im n]` inside the shape.
    pub n_inside: [f64; 2],
    /// Voxels per cube edge.
    pub resolution: usize,
    #[serde(default)]
    pub smoothing: f64,
}

impl ContrastSettings {
    pub fn n(&self) -> Complex64 {
        Complex64::new(self.n_inside[0], self.n_inside[1])
    }
}

/// A shape as stored in a dictionary header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeRecord {
    pub id: String,
    pub cubes: Vec<[i32; 3]>,
    pub size: f64,
    pub contrast: ContrastSettings,
}

impl ShapeRecord {
    pub fn new(shape: &ShapeSpec, contrast: ContrastSettings) -> Self {
        Self {
            id: shape.id().to_string(),
            cubes: shape.cubes().to_vec(),
            size: shape.size(),
            contrast,
        }
    }

    pub fn spec(&self) -> Result<ShapeSpec> {
        ShapeSpec::with_size(self.id.clone(), self.cubes.clone(), self.size)
    }
}

/// Receivers on `Γ` and the nominal placement the near fields refer to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NearFieldSpec {
    pub receivers: ReceiverLayout,
    pub anchor: Vec3,
}

impl NearFieldSpec {
    /// Shape-frame evaluation points `x − z_ref`.
    pub fn offsets(&self) -> Vec<Vec3> {
        self.receivers.positions().iter().map(|x| sub(x, &self.anchor)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DictionaryKey {
    pub shape: String,
    pub k: f64,
    pub direction: Vec3,
    pub polarization: Vec3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryMetadata {
    pub resolution: usize,
    pub smoothing: f64,
    pub n_inside: [f64; 2],
    pub formulation: Formulation,
    pub tolerance: f64,
    pub iterations: usize,
    pub residual: f64,
    pub projection_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DictionaryEntry {
    pub key: DictionaryKey,
    pub far_field: TangentialFieldOnSphere,
    pub near_field: Option<Vec<CVec3>>,
    pub metadata: EntryMetadata,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct EntryHeader {
    key: DictionaryKey,
    metadata: EntryMetadata,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Header {
    format_version: u32,
    grid_points: usize,
    polarization: Vec3,
    solver: SolverParams,
    near_field: Option<NearFieldSpec>,
    shapes: Vec<ShapeRecord>,
    entries: Vec<EntryHeader>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<String>,
}

/// An immutable collection of entries sharing one sphere grid and one
/// receiver layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Dictionary {
    grid: Arc<SphereGrid>,
    polarization: Polarization,
    solver: SolverParams,
    near_field: Option<NearFieldSpec>,
    shapes: Vec<ShapeRecord>,
    entries: Vec<DictionaryEntry>,
    provenance: Option<String>,
}

/// Everything `build_dictionary` needs.
#[derive(Debug, Clone)]
pub struct BuildSpec {
    pub shapes: Vec<ShapeRecord>,
    pub k_values: Vec<WaveNumber>,
    pub directions: Vec<Vec3>,
    pub polarization: Polarization,
    pub solver: SolverParams,
    pub grid: Arc<SphereGrid>,
    pub near_field: Option<NearFieldSpec>,
}

/// Per-entry outcome of a build.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BuildRecord {
    pub shape: String,
    pub k: f64,
    pub direction: Vec3,
    pub iterations: usize,
    pub residual: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BuildReport {
    pub records: Vec<BuildRecord>,
}

impl BuildReport {
    pub fn failures(&self) -> usize {
        self.records.iter().filter(|r| r.error.is_some()).count()
    }
}

/// The default 26 incidence directions: face, edge and vertex directions of
/// the cube.
pub fn default_directions() -> Vec<Vec3> {
    lebedev_grid(26).expect("26-point rule is shipped").nodes().to_vec()
}

fn check_direction(d: &Vec3) -> Result<()> {
    let n = norm(d);
    if (n - 1.0).abs() > UNIT_TOLERANCE {
        return Err(Error::NonUnitDirection(n));
    }
    Ok(())
}

fn validate_spec(spec: &BuildSpec) -> Result<()> {
    if spec.shapes.is_empty() || spec.k_values.is_empty() || spec.directions.is_empty() {
        return Err(Error::InvalidDictionary("build needs at least one shape, k and direction".into()));
    }
    let mut ids: Vec<&str> = spec.shapes.iter().map(|s| s.id.as_str()).collect();
    ids.sort_unstable();
    if ids.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidDictionary("duplicate shape ids".into()));
    }
    for d in &spec.directions {
        check_direction(d)?;
    }
    Ok(())
}

fn entry_from_system(
    system: &DiscreteSystem,
    record: &ShapeRecord,
    direction: &Vec3,
    polarization: Polarization,
    solver: &SolverParams,
    grid: &Arc<SphereGrid>,
    near: Option<&[Vec3]>,
) -> Result<DictionaryEntry> {
    let solution = solve_plane_wave(system, direction, polarization, solver)?;
    let far_field = solution.far_field(grid);
    let near_field = near
        .map(|offsets| offsets.iter().map(|x| solution.scattered_field_at(x)).collect::<Result<Vec<_>>>())
        .transpose()?;
    Ok(DictionaryEntry {
        key: DictionaryKey {
            shape: record.id.clone(),
            k: system.k().value(),
            direction: *direction,
            polarization: *polarization.vector(),
        },
        metadata: EntryMetadata {
            resolution: record.contrast.resolution,
            smoothing: record.contrast.smoothing,
            n_inside: record.contrast.n_inside,
            formulation: system.formulation(),
            tolerance: solver.tolerance,
            iterations: solution.iterations(),
            residual: solution.residual(),
            projection_residual: far_field.projection_residual(),
        },
        far_field,
        near_field,
    })
}

fn system_for(record: &ShapeRecord, k: WaveNumber, solver: &SolverParams) -> Result<DiscreteSystem> {
    let shape = record.spec()?;
    let contrast = rasterize_contrast(&shape, record.contrast.n(), record.contrast.resolution, record.contrast.smoothing)?;
    assemble(&contrast, k, solver)
}

/// Solves every (shape, k, direction) key. One system is assembled per
/// (shape, k) and shared by the direction solves, which run in parallel.
/// Entries are stored in shape, k, direction order.
pub fn build_dictionary(spec: &BuildSpec) -> Result<(Dictionary, BuildReport)> {
    validate_spec(spec)?;
    let offsets = spec.near_field.as_ref().map(|n| n.offsets());
    let mut records = Vec::new();
    let mut entries = Vec::new();
    for record in &spec.shapes {
        for &k in &spec.k_values {
            let results: Vec<Result<DictionaryEntry>> = match system_for(record, k, &spec.solver) {
                Ok(system) => spec
                    .directions
                    .par_iter()
                    .map(|d| {
                        entry_from_system(&system, record, d, spec.polarization, &spec.solver, &spec.grid, offsets.as_deref())
                    })
                    .collect(),
                Err(e) => {
                    let msg = e.to_string();
                    spec.directions.iter().map(|_| Err(Error::InvalidArgument(msg.clone()))).collect()
                }
            };
            for (d, r) in spec.directions.iter().zip(results) {
                match r {
                    Ok(entry) => {
                        records.push(BuildRecord {
                            shape: record.id.clone(),
                            k: k.value(),
                            direction: *d,
                            iterations: entry.metadata.iterations,
                            residual: entry.metadata.residual,
                            error: None,
                        });
                        entries.push(entry);
                    }
                    Err(e) => {
                        log::error!("dictionary entry {} k={} d={d:?} failed: {e}", record.id, k.value());
                        records.push(BuildRecord {
                            shape: record.id.clone(),
                            k: k.value(),
                            direction: *d,
                            iterations: 0,
                            residual: f64::NAN,
                            error: Some(e.to_string()),
                        });
                    }
                }
            }
        }
    }
    let report = BuildReport { records };
    let failed = report.failures();
    if failed > 0 {
        return Err(Error::IncompleteDictionary(failed));
    }
    let dict = Dictionary {
        grid: spec.grid.clone(),
        polarization: spec.polarization,
        solver: spec.solver,
        near_field: spec.near_field.clone(),
        shapes: spec.shapes.clone(),
        entries,
        provenance: None,
    };
    Ok((dict, report))
}

fn same_k(a: f64, b: f64) -> bool {
    (a - b).abs() <= K_MATCH_TOLERANCE * a.abs().max(b.abs())
}

fn angle_between(a: &Vec3, b: &Vec3) -> f64 {
    (dot(a, b) / (norm(a) * norm(b))).clamp(-1.0, 1.0).acos()
}

impl Dictionary {
    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn polarization(&self) -> Polarization {
        self.polarization
    }

    pub fn solver(&self) -> &SolverParams {
        &self.solver
    }

    pub fn near_field(&self) -> Option<&NearFieldSpec> {
        self.near_field.as_ref()
    }

    pub fn shapes(&self) -> &[ShapeRecord] {
        &self.shapes
    }

    pub fn shape_ids(&self) -> Vec<&str> {
        self.shapes.iter().map(|s| s.id.as_str()).collect()
    }

    pub fn entries(&self) -> &[DictionaryEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Stored entry whose direction is closest to `zhat`, with the angular gap
    /// in radians. Ties keep the earlier entry.
    pub fn nearest_direction_entry(&self, shape: &str, k: WaveNumber, zhat: &Vec3) -> Result<(&DictionaryEntry, f64)> {
        let mut best: Option<(&DictionaryEntry, f64)> = None;
        for e in self.entries.iter().filter(|e| e.key.shape == shape && same_k(e.key.k, k.value())) {
            let c = dot(&e.key.direction, zhat) / norm(zhat);
            if best.is_none_or(|(_, bc)| c > bc) {
                best = Some((e, c));
            }
        }
        let (entry, _) = best.ok_or_else(|| Error::MissingEntry {
            shape: shape.to_string(),
            k: k.value(),
        })?;
        Ok((entry, angle_between(&entry.key.direction, zhat)))
    }

    /// Recomputes entry `index` from the stored shape and solver metadata.
    pub fn regenerate(&self, index: usize) -> Result<DictionaryEntry> {
        let entry = self
            .entries
            .get(index)
            .ok_or_else(|| Error::InvalidArgument(format!("entry {index} out of range")))?;
        let record = self
            .shapes
            .iter()
            .find(|s| s.id == entry.key.shape)
            .ok_or_else(|| Error::InvalidDictionary(format!("no shape record for `{}`", entry.key.shape)))?;
        let k = WaveNumber::new(entry.key.k)?;
        let system = system_for(record, k, &self.solver)?;
        let p = Polarization::new(entry.key.polarization)?;
        let offsets = self.near_field.as_ref().map(|n| n.offsets());
        entry_from_system(&system, record, &entry.key.direction, p, &self.solver, &self.grid, offsets.as_deref())
    }

    /// Regenerates entry `index` and reports the relative deviation of the
    /// stored fields.
    pub fn audit(&self, index: usize) -> Result<AuditReport> {
        let fresh = self.regenerate(index)?;
        let stored = &self.entries[index];
        let far = relative_difference(stored.far_field.samples(), fresh.far_field.samples());
        let near = match (&stored.near_field, &fresh.near_field) {
            (Some(a), Some(b)) => Some(relative_difference(a, b)),
            _ => None,
        };
        Ok(AuditReport {
            index,
            far_relative: far,
            near_relative: near,
            tolerance: self.solver.tolerance,
        })
    }

    fn header(&self) -> Header {
        Header {
            format_version: FORMAT_VERSION,
            grid_points: self.grid.len(),
            polarization: *self.polarization.vector(),
            solver: self.solver,
            near_field: self.near_field.clone(),
            shapes: self.shapes.clone(),
            entries: self
                .entries
                .iter()
                .map(|e| EntryHeader {
                    key: e.key.clone(),
                    metadata: e.metadata.clone(),
                })
                .collect(),
            provenance: self.provenance.clone(),
        }
    }

    /// Free-form text stored in the header, e.g. the hash of the
    /// configuration that produced the dictionary.
    pub fn provenance(&self) -> Option<&str> {
        self.provenance.as_deref()
    }

    pub fn set_provenance(&mut self, text: impl Into<String>) {
        self.provenance = Some(text.into());
    }

    /// Serialises to the versioned binary format.
    pub fn to_bytes(&self) -> Vec<u8> {
        let header = serde_json::to_vec(&self.header()).expect("header serialises");
        let receivers = self.near_field.as_ref().map_or(0, |n| n.receivers.len());
        let payload_len = self.entries.len() * (self.grid.len() + receivers) * 6 * 8;
        let mut out = Vec::with_capacity(PREAMBLE_LEN + header.len() + payload_len + CHECKSUM_LEN);
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&(header.len() as u32).to_le_bytes());
        out.extend_from_slice(&header);
        for e in &self.entries {
            push_samples(&mut out, e.far_field.samples());
            if let Some(near) = &e.near_field {
                push_samples(&mut out, near);
            }
        }
        let digest = Sha256::digest(&out);
        out.extend_from_slice(&digest);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < PREAMBLE_LEN + CHECKSUM_LEN {
            return Err(Error::Truncated);
        }
        if bytes[..8] != MAGIC {
            return Err(Error::InvalidDictionary("bad magic bytes".into()));
        }
        let version = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes"));
        if version != FORMAT_VERSION {
            return Err(Error::VersionMismatch {
                found: version,
                expected: FORMAT_VERSION,
            });
        }
        let header_len = u32::from_le_bytes(bytes[12..16].try_into().expect("4 bytes")) as usize;
        if bytes.len() < PREAMBLE_LEN + header_len + CHECKSUM_LEN {
            return Err(Error::Truncated);
        }
        let (body, digest) = bytes.split_at(bytes.len() - CHECKSUM_LEN);
        let header: std::result::Result<Header, _> =
            serde_json::from_slice(&body[PREAMBLE_LEN..PREAMBLE_LEN + header_len]);
        if Sha256::digest(body).as_slice() != digest {
            // A consistent header that promises more payload than present
            // means the file was cut short.
            if let Ok(h) = &header {
                let receivers = h.near_field.as_ref().map_or(0, |n| n.receivers.len());
                let expected = PREAMBLE_LEN + header_len + h.entries.len() * (h.grid_points + receivers) * 48 + CHECKSUM_LEN;
                if bytes.len() < expected {
                    return Err(Error::Truncated);
                }
            }
            return Err(Error::ChecksumMismatch);
        }
        let header = header?;
        if header.format_version != version {
            return Err(Error::InvalidDictionary("header version disagrees with preamble".into()));
        }
        let grid = Arc::new(lebedev_grid(header.grid_points)?);
        let polarization = Polarization::new(header.polarization)?;
        let receivers = header.near_field.as_ref().map_or(0, |n| n.receivers.len());
        let mut payload = &body[PREAMBLE_LEN + header_len..];
        let expected = header.entries.len() * (grid.len() + receivers) * 48;
        if payload.len() != expected {
            return Err(Error::InvalidDictionary(format!(
                "payload has {} bytes, header implies {expected}",
                payload.len()
            )));
        }
        let mut entries = Vec::with_capacity(header.entries.len());
        for eh in header.entries {
            let far = take_samples(&mut payload, grid.len());
            let near = header.near_field.as_ref().map(|_| take_samples(&mut payload, receivers));
            entries.push(DictionaryEntry {
                far_field: TangentialFieldOnSphere::from_stored(grid.clone(), far, eh.metadata.projection_residual)?,
                near_field: near,
                key: eh.key,
                metadata: eh.metadata,
            });
        }
        if entries.is_empty() {
            return Err(Error::InvalidDictionary("no entries".into()));
        }
        Ok(Self {
            grid,
            polarization,
            solver: header.solver,
            near_field: header.near_field,
            shapes: header.shapes,
            entries,
            provenance: header.provenance,
        })
    }

    /// Writes atomically: a temporary file in the target directory is renamed
    /// over `path`.
    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.to_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}

/// Writes `bytes` to a sibling temporary file and renames it onto `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidArgument(format!("{} has no file name", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp-{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    Ok(result?)
}

fn push_samples(out: &mut Vec<u8>, samples: &[CVec3]) {
    for v in samples {
        for c in v {
            out.extend_from_slice(&c.re.to_le_bytes());
            out.extend_from_slice(&c.im.to_le_bytes());
        }
    }
}

fn take_samples(payload: &mut &[u8], count: usize) -> Vec<CVec3> {
    let (head, rest) = payload.split_at(count * 48);
    *payload = rest;
    head.chunks_exact(48)
        .map(|chunk| {
            let f = |i: usize| f64::from_le_bytes(chunk[8 * i..8 * i + 8].try_into().expect("8 bytes"));
            [
                Complex64::new(f(0), f(1)),
                Complex64::new(f(2), f(3)),
                Complex64::new(f(4), f(5)),
            ]
        })
        .collect()
}

fn relative_difference(a: &[CVec3], b: &[CVec3]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| cnorm_sqr(&csub(x, y))).sum();
    let base: f64 = b.iter().map(cnorm_sqr).sum();
    if base == 0.0 {
        if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (diff / base).sqrt()
    }
}

/// Result of regenerating one entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AuditReport {
    pub index: usize,
    pub far_relative: f64,
    pub near_relative: Option<f64>,
    pub tolerance: f64,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.far_relative <= self.tolerance && self.near_relative.is_none_or(|n| n <= self.tolerance)
    }
}

type SystemKey = (usize, u64);
type EntryKey = (usize, u64, [u64; 3]);

/// Solves entries at arbitrary directions when first requested and keeps
/// them. Shares one assembled system per (shape, k).
pub struct OnDemandDictionary {
    shapes: Vec<ShapeRecord>,
    polarization: Polarization,
    solver: SolverParams,
    grid: Arc<SphereGrid>,
    near_field: Option<NearFieldSpec>,
    systems: Mutex<HashMap<SystemKey, Arc<DiscreteSystem>>>,
    entries: Mutex<HashMap<EntryKey, Arc<DictionaryEntry>>>,
}

impl OnDemandDictionary {
    pub fn new(
        shapes: Vec<ShapeRecord>,
        polarization: Polarization,
        solver: SolverParams,
        grid: Arc<SphereGrid>,
        near_field: Option<NearFieldSpec>,
    ) -> Self {
        Self {
            shapes,
            polarization,
            solver,
            grid,
            near_field,
            systems: Mutex::new(HashMap::new()),
            entries: Mutex::new(HashMap::new()),
        }
    }

    pub fn shapes(&self) -> &[ShapeRecord] {
        &self.shapes
    }

    pub fn near_field(&self) -> Option<&NearFieldSpec> {
        self.near_field.as_ref()
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn cached(&self) -> usize {
        self.entries.lock().expect("cache lock").len()
    }

    fn system(&self, shape: usize, k: WaveNumber) -> Result<Arc<DiscreteSystem>> {
        let key = (shape, k.value().to_bits());
        if let Some(s) = self.systems.lock().expect("cache lock").get(&key) {
            return Ok(s.clone());
        }
        let system = Arc::new(system_for(&self.shapes[shape], k, &self.solver)?);
        Ok(self.systems.lock().expect("cache lock").entry(key).or_insert(system).clone())
    }

    /// Entry for `shape` at exactly `direction`.
    pub fn entry(&self, shape: &str, k: WaveNumber, direction: &Vec3) -> Result<Arc<DictionaryEntry>> {
        check_direction(direction)?;
        let idx = self.shapes.iter().position(|s| s.id == shape).ok_or_else(|| Error::MissingEntry {
            shape: shape.to_string(),
            k: k.value(),
        })?;
        let key = (idx, k.value().to_bits(), direction.map(f64::to_bits));
        if let Some(e) = self.entries.lock().expect("cache lock").get(&key) {
            return Ok(e.clone());
        }
        let system = self.system(idx, k)?;
        let offsets = self.near_field.as_ref().map(|n| n.offsets());
        let entry = Arc::new(entry_from_system(
            &system,
            &self.shapes[idx],
            direction,
            self.polarization,
            &self.solver,
            &self.grid,
            offsets.as_deref(),
        )?);
        Ok(self.entries.lock().expect("cache lock").entry(key).or_insert(entry).clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_direction_set_has_26_unit_vectors() {
        let d = default_directions();
        assert_eq!(d.len(), 26);
        assert!(d.iter().all(|v| (norm(v) - 1.0).abs() < 1e-12));
    }

    #[test]
    fn sample_packing_round_trips() {
        let s = vec![[Complex64::new(1.5, -0.0), Complex64::new(f64::MIN_POSITIVE, 3.0), Complex64::new(-7.25, 1e-300)]];
        let mut buf = Vec::new();
        push_samples(&mut buf, &s);
        let mut view = buf.as_slice();
        let back = take_samples(&mut view, 1);
        assert!(view.is_empty());
        assert_eq!(back[0].map(|c| (c.re.to_bits(), c.im.to_bits())), s[0].map(|c| (c.re.to_bits(), c.im.to_bits())));
    }

    #[test]
    fn relative_difference_handles_zero_reference() {
        let z = vec![crate::vec3::CZERO3; 2];
        assert_eq!(relative_difference(&z, &z), 0.0);
    }
}

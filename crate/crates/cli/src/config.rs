//! TOML experiment configuration. Every section has desk-scale defaults, so
//! an empty file is a valid configuration.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use emgest::dictionary::{default_directions, ContrastSettings, NearFieldSpec, ShapeRecord};
use emgest::em::{lebedev_grid, Polarization, SourceConfig, SphereGrid, WaveNumber};
use emgest::forward::{ReceiverLayout, SolverParams};
use emgest::recognition::{MatchMode, SamplingGrid};
use emgest::shapes::{preset, ShapeDefinition, ShapeSpec};
use emgest::vec3::{norm, Vec3};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub shapes: ShapesSection,
    pub contrast: ContrastSection,
    pub frequencies: FrequencySection,
    pub placement: PlacementSection,
    pub source: SourceSection,
    pub receivers: ReceiverSection,
    pub far_field: FarFieldSection,
    pub sampling: SamplingSection,
    pub noise: NoiseSection,
    pub solver: SolverParams,
    pub dictionary: DictionarySection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShapesSection {
    pub presets: Vec<String>,
    /// TOML file with `[[shape]]` tables (`id`, `cubes`, optional `size`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
}

impl Default for ShapesSection {
    fn default() -> Self {
        Self {
            presets: vec!["D1".into(), "D2".into(), "D3".into()],
            file: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContrastSection {
    /// Refraction index inside the shape as `[re, im]`.
    pub n_inside: [f64; 2],
    /// Voxels per cube edge.
    pub resolution: usize,
    pub smoothing: f64,
}

impl Default for ContrastSection {
    fn default() -> Self {
        Self {
            n_inside: [5.0, 0.0],
            resolution: 4,
            smoothing: 0.0,
        }
    }
}

/// Location and shape frequencies, each given either as a wavenumber or as
/// a wavelength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct FrequencySection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_low: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wavelength_low: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_high: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wavelength_high: Option<f64>,
}

pub const DEFAULT_WAVELENGTH_LOW: f64 = 20.0;
pub const DEFAULT_WAVELENGTH_HIGH: f64 = 2.0;

fn resolve_k(k: Option<f64>, lambda: Option<f64>, default_lambda: f64, name: &str) -> Result<WaveNumber, CliError> {
    let r = match (k, lambda) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config(format!("give either k_{name} or wavelength_{name}, not both")))
        }
        (Some(k), None) => WaveNumber::new(k),
        (None, Some(l)) => WaveNumber::from_wavelength(l),
        (None, None) => WaveNumber::from_wavelength(default_lambda),
    };
    r.map_err(|e| CliError::Config(format!("{name} frequency: {e}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlacementSection {
    /// True position `z` of every simulated gesture.
    pub z: Vec3,
}

impl Default for PlacementSection {
    fn default() -> Self {
        Self { z: [40.0, 0.0, 0.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SourceSection {
    pub positions: Vec<Vec3>,
    pub polarization: Vec3,
}

impl Default for SourceSection {
    fn default() -> Self {
        Self {
            positions: vec![[0.0; 3]],
            polarization: [0.0, 0.0, 1.0],
        }
    }
}

/// Square receiver grid in the `x₂x₃`-plane centred at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReceiverSection {
    pub count: usize,
    pub side: f64,
}

impl Default for ReceiverSection {
    fn default() -> Self {
        Self { count: 11, side: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FarFieldSection {
    /// Lebedev point count.
    pub points: usize,
}

impl Default for FarFieldSection {
    fn default() -> Self {
        Self { points: 110 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingSection {
    /// Prior position the search box is centred on; defaults to the
    /// placement.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec3>,
    /// Defaults to a fortieth of the location wavelength.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spacing: Option<f64>,
    pub counts: [usize; 3],
    pub refine: bool,
}

impl Default for SamplingSection {
    fn default() -> Self {
        Self {
            center: None,
            spacing: None,
            counts: [9; 3],
            refine: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSection {
    pub delta: f64,
    pub seed: u64,
    /// Noise levels visited by `experiment`.
    pub sweep: Vec<f64>,
}

impl Default for NoiseSection {
    fn default() -> Self {
        Self {
            delta: 0.0,
            seed: 0,
            sweep: vec![0.0, 0.01, 0.05, 0.10],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DictionarySection {
    /// Incidence directions; defaults to the 26-point Lebedev set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub directions: Option<Vec<Vec3>>,
    /// Existing dictionary to load instead of building one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
    /// Also store near fields on the receivers, anchored at the placement.
    pub near_field: bool,
    pub mode: MatchMode,
}

impl Default for DictionarySection {
    fn default() -> Self {
        Self {
            directions: None,
            file: None,
            near_field: true,
            mode: MatchMode::Far,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("emgest-out"),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShapeFile {
    shape: Vec<ShapeDefinition>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Reads a config file; relative paths inside it are taken relative to
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(f) = cfg.shapes.file.as_mut() {
            rebase(f);
        }
        if let Some(f) = cfg.dictionary.file.as_mut() {
            rebase(f);
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    /// SHA-256 of the canonical JSON form, ignoring the output directory so
    /// that runs written to different places share a hash.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output = OutputSection::default();
        let bytes = serde_json::to_vec(&c).expect("config serialises");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn validate(&self) -> Result<Resolved, CliError> {
        Resolved::new(self)
    }
}

/// A checked configuration with every default filled in.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub shapes: Vec<ShapeSpec>,
    pub contrast: ContrastSettings,
    pub k_low: WaveNumber,
    pub k_high: WaveNumber,
    pub z: Vec3,
    pub sources: SourceConfig,
    pub receivers: ReceiverLayout,
    pub grid: Arc<SphereGrid>,
    pub sampling: SamplingGrid,
    pub refine: bool,
    pub directions: Vec<Vec3>,
    pub near_field: Option<NearFieldSpec>,
    pub mode: MatchMode,
    pub solver: SolverParams,
    pub hash: String,
}

fn config_err(context: &str) -> impl Fn(emgest::Error) -> CliError + '_ {
    move |e| CliError::Config(format!("{context}: {e}"))
}

impl Resolved {
    fn new(cfg: &ExperimentConfig) -> Result<Self, CliError> {
        let mut shapes = Vec::new();
        for name in &cfg.shapes.presets {
            shapes.push(preset(name).map_err(config_err("shapes.presets"))?);
        }
        if let Some(path) = &cfg.shapes.file {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let file: ShapeFile =
                toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            for def in file.shape {
                shapes.push(def.build().map_err(config_err("shapes.file"))?);
            }
        }
        if shapes.is_empty() {
            return Err(CliError::Config("no shapes configured".into()));
        }
        for (i, s) in shapes.iter().enumerate() {
            if shapes[..i].iter().any(|t| t.id() == s.id()) {
                return Err(CliError::Config(format!("duplicate shape id {}", s.id())));
            }
        }

        let f = &cfg.frequencies;
        let k_low = resolve_k(f.k_low, f.wavelength_low, DEFAULT_WAVELENGTH_LOW, "low")?;
        let k_high = resolve_k(f.k_high, f.wavelength_high, DEFAULT_WAVELENGTH_HIGH, "high")?;
        if k_low.wavelength() <= k_high.wavelength() {
            return Err(CliError::Config(format!(
                "location wavelength {} must exceed shape wavelength {}",
                k_low.wavelength(),
                k_high.wavelength()
            )));
        }

        let c = &cfg.contrast;
        if c.resolution == 0 || !(c.smoothing >= 0.0) || !(c.n_inside[0] > 0.0 && c.n_inside[1] >= 0.0) {
            return Err(CliError::Config(format!("invalid contrast {c:?}")));
        }
        let contrast = ContrastSettings {
            n_inside: c.n_inside,
            resolution: c.resolution,
            smoothing: c.smoothing,
        };

        let z = cfg.placement.z;
        if !z.iter().all(|v| v.is_finite()) || norm(&z) == 0.0 {
            return Err(CliError::Config("placement.z must be finite and nonzero".into()));
        }
        let polarization = Polarization::new(cfg.source.polarization).map_err(config_err("source.polarization"))?;
        let sources = SourceConfig::new(cfg.source.positions.clone(), polarization).map_err(config_err("source"))?;
        let receivers = ReceiverLayout::square_x2x3(cfg.receivers.count, cfg.receivers.side)
            .map_err(config_err("receivers"))?;
        let grid = Arc::new(lebedev_grid(cfg.far_field.points).map_err(config_err("far_field.points"))?);

        let s = &cfg.sampling;
        let center = s.center.unwrap_or(z);
        let spacing = s.spacing.unwrap_or(k_low.wavelength() / 40.0);
        let sampling = SamplingGrid::new(center, [spacing; 3], s.counts).map_err(config_err("sampling"))?;
        if !sampling.contains(&z) {
            log::warn!("sampling box does not contain the configured placement {z:?}");
        }

        let n = &cfg.noise;
        if n.sweep.iter().chain([&n.delta]).any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(CliError::Config("noise levels must be >= 0".into()));
        }

        let directions = cfg.dictionary.directions.clone().unwrap_or_else(default_directions);
        if directions.is_empty() {
            return Err(CliError::Config("dictionary.directions is empty".into()));
        }
        let near_field = cfg.dictionary.near_field.then(|| NearFieldSpec {
            receivers: receivers.clone(),
            anchor: z,
        });
        if cfg.dictionary.mode == MatchMode::Near && near_field.is_none() {
            return Err(CliError::Config("near matching needs dictionary.near_field = true".into()));
        }
        if let Some(p) = &cfg.dictionary.file {
            if !p.exists() {
                return Err(CliError::Config(format!("dictionary file {} does not exist", p.display())));
            }
        }
        let s = &cfg.solver;
        if !(s.tolerance > 0.0) || s.max_iterations == 0 || s.restart == 0 {
            return Err(CliError::Config(format!("invalid solver parameters {s:?}")));
        }

        Ok(Self {
            shapes,
            contrast,
            k_low,
            k_high,
            z,
            sources,
            receivers,
            grid,
            sampling,
            refine: cfg.sampling.refine,
            directions,
            near_field,
            mode: cfg.dictionary.mode,
            solver: cfg.solver,
            hash: cfg.hash(),
        })
    }

    pub fn shape_records(&self) -> Vec<ShapeRecord> {
        self.shapes.iter().map(|s| ShapeRecord::new(s, self.contrast)).collect()
    }
}

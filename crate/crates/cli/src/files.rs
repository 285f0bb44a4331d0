//! Measurement files and atomic output writing.

use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use emgest::em::{lebedev_grid, SourceConfig, TangentialFieldOnSphere, WaveNumber};
use emgest::forward::{ApertureField, Measurement, ReceiverLayout};
use emgest::vec3::{CVec3, Vec3};

use crate::error::CliError;

pub const MEASUREMENT_FORMAT: &str = "emgest-measurement";
pub const MEASUREMENT_VERSION: u32 = 1;

type Sample = [[f64; 2]; 3];

fn encode(samples: &[CVec3]) -> Vec<Sample> {
    samples.iter().map(|v| v.map(|c| [c.re, c.im])).collect()
}

fn decode(samples: &[Sample]) -> Vec<CVec3> {
    samples.iter().map(|v| v.map(|c| Complex64::new(c[0], c[1]))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    /// Low frequency, used by the location stage.
    Location,
    /// High frequency, matched against the dictionary.
    Shape,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseRecord {
    pub delta: f64,
    pub seed: u64,
    /// How the scale `M` of the noise is taken.
    pub magnitude: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Acquisition {
    pub role: Role,
    pub k: f64,
    pub iterations: usize,
    pub residual: f64,
    pub near_field: Vec<Sample>,
    pub far_field_points: usize,
    pub far_field: Vec<Sample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceRecord {
    pub positions: Vec<Vec3>,
    pub polarization: Vec3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReceiverRecord {
    pub positions: Vec<Vec3>,
    pub weights: Vec<f64>,
}

/// One gesture seen at the location and shape frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementFile {
    pub format: String,
    pub version: u32,
    pub config_hash: String,
    pub shape: String,
    /// True placement, when known.
    pub placement: Option<Vec3>,
    pub noise: NoiseRecord,
    pub sources: SourceRecord,
    pub receivers: ReceiverRecord,
    pub acquisitions: Vec<Acquisition>,
}

impl Acquisition {
    pub fn new(role: Role, k: WaveNumber, m: &Measurement) -> Self {
        Self {
            role,
            k: k.value(),
            iterations: m.iterations,
            residual: m.residual,
            near_field: encode(m.aperture.samples()),
            far_field_points: m.far_field.grid().len(),
            far_field: encode(m.far_field.samples()),
        }
    }

    pub fn wave_number(&self) -> Result<WaveNumber, CliError> {
        Ok(WaveNumber::new(self.k)?)
    }

    pub fn far_field(&self) -> Result<TangentialFieldOnSphere, CliError> {
        let grid = Arc::new(lebedev_grid(self.far_field_points)?);
        Ok(TangentialFieldOnSphere::new(grid, decode(&self.far_field))?)
    }

    pub fn aperture(&self, layout: &ReceiverLayout) -> Result<ApertureField, CliError> {
        Ok(ApertureField::new(layout.clone(), decode(&self.near_field), self.wave_number()?)?)
    }
}

impl MeasurementFile {
    pub fn new(
        config_hash: &str,
        shape: &str,
        placement: Option<Vec3>,
        noise: (f64, u64),
        sources: &SourceConfig,
        receivers: &ReceiverLayout,
        acquisitions: Vec<Acquisition>,
    ) -> Self {
        Self {
            format: MEASUREMENT_FORMAT.into(),
            version: MEASUREMENT_VERSION,
            config_hash: config_hash.into(),
            shape: shape.into(),
            placement,
            noise: NoiseRecord {
                delta: noise.0,
                seed: noise.1,
                magnitude: "max-euclidean".into(),
            },
            sources: SourceRecord {
                positions: sources.positions().to_vec(),
                polarization: *sources.polarization().vector(),
            },
            receivers: ReceiverRecord {
                positions: receivers.positions().to_vec(),
                weights: receivers.weights().to_vec(),
            },
            acquisitions,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("measurement serialises");
        s.push('\n');
        s
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let m: Self =
            serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        if m.format != MEASUREMENT_FORMAT {
            return Err(CliError::Input(format!("{}: not a measurement file", path.display())));
        }
        if m.version != MEASUREMENT_VERSION {
            return Err(CliError::Input(format!(
                "{}: measurement format version {} is not supported (expected {MEASUREMENT_VERSION})",
                path.display(),
                m.version
            )));
        }
        Ok(m)
    }

    pub fn layout(&self) -> Result<ReceiverLayout, CliError> {
        Ok(ReceiverLayout::new(self.receivers.positions.clone(), self.receivers.weights.clone())?)
    }

    pub fn acquisition(&self, role: Role) -> Result<&Acquisition, CliError> {
        self.acquisitions
            .iter()
            .find(|a| a.role == role)
            .ok_or_else(|| CliError::Input(format!("measurement of {} has no {role:?} acquisition", self.shape)))
    }
}

/// Writes through a temporary file and a rename, creating parent
/// directories as needed.
pub fn write_output(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    emgest::dictionary::write_atomic(path, contents).map_err(|e| match e {
        emgest::Error::Io(io) => CliError::io(path, io),
        other => CliError::Core(other),
    })
}

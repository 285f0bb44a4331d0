use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("wave number must be positive and finite, got {0}")]
    InvalidWaveNumber(f64),

    #[error("polarization vector must be finite and nonzero")]
    InvalidPolarization,

    #[error("points coincide (distance {distance:e} below cutoff {cutoff:e})")]
    CoincidentPoints { distance: f64, cutoff: f64 },

    #[error("direction is not a unit vector (|d| = {0})")]
    NonUnitDirection(f64),

    #[error("unsupported Lebedev point count {requested}; available: {available:?}")]
    UnsupportedOrder {
        requested: usize,
        available: Vec<usize>,
    },

    #[error("fields are sampled on different sphere grids")]
    GridMismatch,

    #[error("aperture mask selects no nodes")]
    EmptyAperture,

    #[error("invalid source configuration: {0}")]
    InvalidSources(String),

    #[error("invalid shape `{id}`: {reason}")]
    InvalidShape { id: String, reason: String },

    #[error("invalid contrast: {0}")]
    InvalidContrast(String),

    #[error("system has {voxels} voxels, above the budget of {budget}")]
    MemoryBudget { voxels: usize, budget: usize },

    #[error("incident field is not finite at voxel {0}")]
    NonFiniteIncident(usize),

    #[error(
        "solver did not converge after {iterations} iterations (relative residual {residual:e}, target {tolerance:e})"
    )]
    NotConverged {
        iterations: usize,
        residual: f64,
        tolerance: f64,
        history: Vec<f64>,
    },

    #[error("evaluation point {0:?} lies inside the scatterer support")]
    PointInsideSupport([f64; 3]),

    #[error("zero-norm field: {0}")]
    ZeroNorm(&'static str),

    #[error("receiver layout mismatch: {0}")]
    LayoutMismatch(String),

    #[error("dictionary has no entry for shape `{shape}` at k = {k}")]
    MissingEntry { shape: String, k: f64 },

    #[error("dictionary build failed for {0} entries")]
    IncompleteDictionary(usize),

    #[error("invalid dictionary: {0}")]
    InvalidDictionary(String),

    #[error("dictionary format version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("dictionary checksum mismatch")]
    ChecksumMismatch,

    #[error("dictionary file is truncated")]
    Truncated,

    #[error("invalid sampling grid: {0}")]
    InvalidSamplingGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

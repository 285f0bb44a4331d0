//! Electromagnetic gesture recognition from scattered fields.
//!
//! The crate is layered bottom-up: [`em`] holds closed-form field primitives and
//! sphere quadrature, [`shapes`] the voxel gesture presets, [`forward`] the
//! volume-integral scattering solver, [`dictionary`] precomputed far and near
//! fields, and [`recognition`] the location and shape indicators.

pub mod dictionary;
pub mod em;
pub mod error;
pub mod forward;
pub mod recognition;
pub mod shapes;
pub mod vec3;

pub use error::{Error, Result};

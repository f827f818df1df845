//! Gaussian harmonic one-forms and stability spectra on triangulated
//! self-shrinkers (`H = x^N / 2` with weight `λ² = exp(-|x|²/4)`).
//!
//! The numerical core is generic over [`scalar::Real`] (`f32` or `f64`);
//! the aliases below fix it to `f64`, which is what the harness uses.

pub mod error;
pub mod linalg;
pub mod scalar;
pub mod mesh;
pub mod geometry;
pub mod shrinkers;
pub mod dec;
pub mod homology;
pub mod ghf;
pub mod operators;
pub mod harness;

pub use error::{Error, Result};

pub type Mesh = mesh::TriMesh<f64>;
pub type Geometry = geometry::GeometryCache<f64>;
pub type Stars = dec::WeightedStars<f64>;
pub type Basis = ghf::GhfBasis<f64>;
pub type Pencil = operators::SymmetricPencil<f64>;
pub type Spectrum = operators::SpectrumResult<f64>;
pub type Profile = shrinkers::ProfileCurve<f64>;

//! Resampling of variable-PRF SAR azimuth pulse streams onto a
//! uniform lower-rate grid by normalized polyphase convolution.
//!
//! The pipeline: design a narrowband FIR ([`filter`]), derive the
//! output grid from the radar geometry ([`grid`]), stream pulses
//! through the normalized-convolution resampler ([`resample`]), and
//! judge the result in the image domain ([`metrics`]). [`sim`]
//! provides point-scatterer ground truth and staggered-PRI timelines,
//! [`flops`] the computational cost models, [`io`]/[`config`] the file
//! formats and run configuration.
//!
//! The numeric core is generic over the scalar type via
//! [`scalar::Real`] (`f32` or `f64`); the aliases below pin the
//! concrete types the CLI and most callers want.

pub mod config;
pub mod error;
pub mod filter;
pub mod flops;
pub mod grid;
pub mod io;
pub mod metrics;
pub mod resample;
pub mod scalar;
pub mod sim;

pub use error::{Error, Result};

pub type FirFilter64 = filter::FirFilter<f64>;
pub type FirFilter32 = filter::FirFilter<f32>;
pub type PolyphaseBank64 = filter::PolyphaseBank<f64>;
pub type PolyphaseBank32 = filter::PolyphaseBank<f32>;
pub type GridDesign64 = grid::GridDesign<f64>;
pub type GridDesign32 = grid::GridDesign<f32>;
pub type ResampleState64 = resample::ResampleState<f64>;
pub type ResampleState32 = resample::ResampleState<f32>;
pub type PulseSet64 = sim::PulseSet<f64>;
pub type PulseSet32 = sim::PulseSet<f32>;
pub type Scene64 = sim::Scene<f64>;
pub type PriSequence64 = sim::PriSequence<f64>;
pub type Complex64 = num_complex::Complex<f64>;
pub type Complex32 = num_complex::Complex<f32>;

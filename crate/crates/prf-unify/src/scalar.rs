//! Scalar abstraction for the numeric core.
//!
//! Everything numerically interesting is generic over [`Real`], which is
//! satisfied by `f32` and `f64`. On-disk sample payloads are always f32
//! and internal pipeline state defaults to f64; the generic core lets
//! tests cross-check both precisions with the same code path.

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + std::iter::Sum + std::fmt::Display + rustfft::FftNum
{
    /// Shorthand for the ubiquitous f64-literal-to-T conversion.
    fn of(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 literal representable")
    }

    fn to_f64_lossy(self) -> f64;
}

impl Real for f64 {
    fn to_f64_lossy(self) -> f64 {
        self
    }
}

impl Real for f32 {
    fn to_f64_lossy(self) -> f64 {
        self as f64
    }
}

/// sinc in the radian convention used throughout: sinc(x) = sin(x)/x,
/// sinc(0) = 1. The removable singularity is handled explicitly.
pub fn sinc<T: Real>(x: T) -> T {
    if x == T::zero() {
        T::one()
    } else {
        x.sin() / x
    }
}

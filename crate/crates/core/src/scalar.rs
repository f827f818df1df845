//! Scalar abstraction shared by every numerical module.

use nalgebra::RealField;
use num_traits::ToPrimitive;

/// Floating point field the geometry and spectral code is generic over.
///
/// Implemented for `f32` and `f64`. Tolerances in the library are expressed
/// in `f64` and converted with [`Real::lit`], so `f32` instantiations work but
/// only meet the looser gates.
pub trait Real: RealField + Copy + ToPrimitive + Default + Send + Sync + 'static {
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        nalgebra::convert(x)
    }

    /// Converts a count into the scalar type.
    #[inline]
    fn from_count(n: usize) -> Self {
        nalgebra::convert(n as f64)
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

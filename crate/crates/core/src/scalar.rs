//! Scalar abstraction shared by every numeric routine in the crate.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Floating point field the geometry is computed in: `f32` or `f64`.
///
/// Tolerances and file formats are expressed in `f64`; they are converted
/// with [`Real::lit`] at the point of use.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive {
    /// Converts an `f64` constant into this scalar type.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant representable in scalar type")
    }

    /// Lossy conversion used for reports and serialization.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Converts between scalar types through `f64`.
    fn cast<U: Real>(self) -> U {
        U::lit(self.as_f64())
    }
}

impl Real for f32 {}
impl Real for f64 {}

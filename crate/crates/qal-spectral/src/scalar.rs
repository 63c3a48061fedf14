//! Scalar abstraction shared by every floating-point routine in the workspace.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst};
use rustfft::FftNum;
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real floating-point scalar usable by the spectral kernels.
///
/// Implemented for `f32` and `f64`. Exact arithmetic lives in the phase
/// crate and does not go through this trait.
pub trait Real:
    Float + FloatConst + FftNum + Default + Debug + Display + Sum + Send + Sync + Serialize + DeserializeOwned + 'static
{
    /// Converts an `f64` literal or intermediate into this scalar.
    fn lit(x: f64) -> Self {
        <Self as num_traits::NumCast>::from(x).unwrap_or_else(Self::nan)
    }

    /// Converts a count or index into this scalar.
    fn of_usize(n: usize) -> Self {
        Self::lit(n as f64)
    }

    /// Converts a signed frequency into this scalar.
    fn of_i64(n: i64) -> Self {
        Self::lit(n as f64)
    }

    /// Widens to `f64` for reporting and fitting.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Unit roundoff of the type, used to scale tolerances.
    fn unit_roundoff() -> Self {
        Self::epsilon()
    }
}

impl Real for f32 {}
impl Real for f64 {}

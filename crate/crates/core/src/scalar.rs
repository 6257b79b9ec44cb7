use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point type usable for distances and metric values.
///
/// Implemented for `f32` and `f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + LowerExp
    + FromStr
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossless-ish conversion from a count.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable as float")
    }

    /// Conversion from an `f64` constant.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("constant representable as float")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

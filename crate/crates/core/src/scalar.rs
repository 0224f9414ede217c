//! Scalar abstraction for the numeric kernels.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar the kernels are generic over.
///
/// In practice this is `f32` or `f64`; the blanket impl picks up anything
/// satisfying the bounds. Counts and sizes convert in through
/// `FromPrimitive`, report emission converts out through `ToPrimitive`.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum<Self>
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossless-enough conversion from a count.
    fn from_count(c: usize) -> Self {
        Self::from_usize(c).expect("count representable in scalar type")
    }

    /// Conversion from `f64` literals (tolerances, defaults).
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }
}

impl<T> Real for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + AddAssign
        + SubAssign
        + MulAssign
        + DivAssign
        + Sum<T>
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn count_and_literal_conversions() {
        assert_eq!(f64::from_count(7), 7.0);
        assert_eq!(f32::from_count(3), 3.0f32);
        assert_eq!(f64::lit(0.25), 0.25);
    }
}

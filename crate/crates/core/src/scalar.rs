//! Floating point abstraction shared by every geometric stage.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar the pipeline can run on: `f32` or `f64`.
pub trait Scalar: Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static {
    /// Lossy conversion from an `f64` constant.
    fn lit(value: f64) -> Self;

    /// Conversion to `f64` for reporting.
    fn as_f64(self) -> f64;

    /// Conversion from a pixel or element count.
    fn from_count(n: usize) -> Self;
}

macro_rules! impl_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            #[inline]
            fn lit(value: f64) -> Self {
                value as $t
            }

            #[inline]
            fn as_f64(self) -> f64 {
                self as f64
            }

            #[inline]
            fn from_count(n: usize) -> Self {
                n as $t
            }
        }
    };
}

impl_scalar!(f32);
impl_scalar!(f64);

/// Rounds to the nearest integer, resolving exact halves to the even neighbour.
pub fn round_half_even<T: Scalar>(x: T) -> T {
    let floor = x.floor();
    let frac = x - floor;
    let half = T::lit(0.5);
    if frac < half {
        floor
    } else if frac > half {
        floor + T::one()
    } else if (floor / T::lit(2.0)).fract() == T::zero() {
        floor
    } else {
        floor + T::one()
    }
}

/// Tolerance for orthonormality checks at the precision of `T`.
pub(crate) fn rotation_tolerance<T: Scalar>() -> T {
    T::lit(1e-9).max(T::epsilon() * T::lit(64.0))
}

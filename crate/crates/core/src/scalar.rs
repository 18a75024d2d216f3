//! Scalar abstractions shared by coordinates and weights.
//!
//! Coordinates are real numbers ([`Coord`], implemented for `f32` and `f64`).
//! Weights are any [`Scalar`]: the primitive integers and floats, which is what
//! the shipped monoids aggregate over.

use std::fmt::Debug;

use num_traits::{Bounded, Float, Num};

/// Relative tolerance used when comparing floating point aggregates.
pub const FLOAT_RELATIVE_TOLERANCE: f64 = 1e-9;

/// A numeric weight type.
pub trait Scalar: Num + Copy + PartialOrd + Debug + Default + Send + Sync + 'static {
    /// Least element: `-inf` for floats, `MIN` for integers.
    fn lowest() -> Self;
    /// Greatest element: `+inf` for floats, `MAX` for integers.
    fn highest() -> Self;
    /// Equality used when comparing aggregates computed in different orders.
    /// Exact for integers, relative [`FLOAT_RELATIVE_TOLERANCE`] for floats.
    fn tolerant_eq(a: Self, b: Self) -> bool;
}

macro_rules! int_scalar {
    ($($t:ty),*) => {$(
        impl Scalar for $t {
            fn lowest() -> Self {
                <$t as Bounded>::min_value()
            }
            fn highest() -> Self {
                <$t as Bounded>::max_value()
            }
            fn tolerant_eq(a: Self, b: Self) -> bool {
                a == b
            }
        }
    )*};
}

int_scalar!(i8, i16, i32, i64, i128, isize, u8, u16, u32, u64, u128, usize);

macro_rules! float_scalar {
    ($($t:ty),*) => {$(
        impl Scalar for $t {
            fn lowest() -> Self {
                <$t>::NEG_INFINITY
            }
            fn highest() -> Self {
                <$t>::INFINITY
            }
            fn tolerant_eq(a: Self, b: Self) -> bool {
                if a == b {
                    return true;
                }
                if !a.is_finite() || !b.is_finite() {
                    return false;
                }
                // f32 cannot resolve 1e-9; allow a few units in the last place
                let tolerance = FLOAT_RELATIVE_TOLERANCE.max(16.0 * f64::from(<$t>::EPSILON));
                let scale = f64::from(a.abs().max(b.abs()));
                f64::from((a - b).abs()) <= tolerance * scale
            }
        }
    )*};
}

float_scalar!(f32, f64);

/// A real coordinate value.
pub trait Coord: Float + Debug + Send + Sync + 'static {}

impl<T: Float + Debug + Send + Sync + 'static> Coord for T {}

/// Total order on finite coordinates. Callers reject NaN before sorting.
pub(crate) fn cmp_coord<C: Coord>(a: &C, b: &C) -> std::cmp::Ordering {
    a.partial_cmp(b).expect("coordinates are validated to be finite")
}

//! Fixed-point time arithmetic.
//!
//! All durations, timestamps and costs in this crate are integers in a
//! fixed-point unit: one logical time unit equals [`FIXED_POINT_SCALE`]
//! sub-units. Integer arithmetic keeps cost comparisons exact, so the
//! solvers, the naive baseline and the brute-force oracle can be compared
//! with plain equality instead of tolerances.

use std::fmt;
use std::hash::Hash;

use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, FromPrimitive, PrimInt, ToPrimitive};

/// Sub-units per logical time unit (micro-units).
pub const FIXED_POINT_SCALE: i64 = 1_000_000;

/// Integer scalar used for timestamps, durations and costs.
///
/// Implemented for `i64` and `i128`. The crate-root aliases pick `i64`,
/// which comfortably holds any desk-scale instance; `i128` is available
/// for head-room experiments.
pub trait TimeScalar:
    PrimInt
    + Integer
    + CheckedAdd
    + CheckedMul
    + FromPrimitive
    + ToPrimitive
    + Hash
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
{
    /// Sub-units per logical time unit.
    fn fixed_scale() -> Self {
        Self::from_i64(FIXED_POINT_SCALE).expect("scale fits any supported scalar")
    }
}

impl TimeScalar for i64 {}
impl TimeScalar for i128 {}

/// Converts a time value in logical units to fixed point, rounding to the
/// nearest sub-unit. Returns `None` on overflow or non-finite input.
pub fn units_to_fixed<T: TimeScalar>(units: f64) -> Option<T> {
    if !units.is_finite() {
        return None;
    }
    let scaled = units * FIXED_POINT_SCALE as f64;
    let rounded = scaled.round();
    if rounded.abs() > i64::MAX as f64 {
        return None;
    }
    T::from_i64(rounded as i64)
}

/// Converts a fixed-point value back to logical units.
pub fn fixed_to_units<T: TimeScalar>(value: T) -> f64 {
    value.to_f64().unwrap_or(f64::NAN) / FIXED_POINT_SCALE as f64
}

/// Converts an integer number of logical units to fixed point.
pub fn whole_units<T: TimeScalar>(units: i64) -> T {
    T::from_i64(units)
        .and_then(|u| u.checked_mul(&T::fixed_scale()))
        .expect("unit count fits the time scalar")
}

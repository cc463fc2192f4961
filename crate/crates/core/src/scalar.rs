//! Scalar abstraction so every algorithm in the crate runs at either `f32`
//! or `f64` precision.
//!
//! All numerics are written against [`Scalar`] instead of a concrete float.
//! The trait is a pure capability bundle — real arithmetic, conversions,
//! ndarray interop — with a blanket implementation, so `f32` and `f64`
//! satisfy it out of the box and downstream code never implements it by
//! hand.
//!
//! `LinalgScalar` matters here: `ndarray`'s `dot` specializes to the fast
//! `matrixmultiply` kernels for `f32`/`f64` behind that bound, so generic
//! code keeps the optimized matrix products.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use ndarray::{LinalgScalar, ScalarOperand};
use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar type for graphs, covariances, and estimators.
///
/// Implemented for `f32` and `f64` via the blanket impl below. The three
/// helper methods exist because conversion through `num_traits` returns
/// `Option` everywhere; for the float types this crate supports the
/// conversions cannot fail, so the helpers unwrap once, centrally.
pub trait Scalar:
    Float
    + NumAssign
    + FromPrimitive
    + ToPrimitive
    + Sum
    + LinalgScalar
    + ScalarOperand
    + Display
    + Debug
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant into this scalar type.
    fn cast(x: f64) -> Self {
        FromPrimitive::from_f64(x).expect("f64 constant must be representable")
    }

    /// Converts a count into this scalar type.
    fn cast_usize(n: usize) -> Self {
        // Counts beyond 2^24 lose precision at f32; acceptable for the
        // sample sizes and node counts this crate targets.
        Self::cast(n as f64)
    }

    /// Widens this scalar to `f64` (exact for `f32` and `f64`).
    fn as_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).expect("scalar must widen to f64")
    }
}

impl<T> Scalar for T where
    T: Float
        + NumAssign
        + FromPrimitive
        + ToPrimitive
        + Sum
        + LinalgScalar
        + ScalarOperand
        + Display
        + Debug
        + Send
        + Sync
        + 'static
{
}

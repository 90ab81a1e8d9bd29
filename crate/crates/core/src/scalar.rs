// SPDX-License-Identifier: Apache-2.0

//! Real scalar abstraction shared by the simulator and the compiler.

use std::fmt::{Debug, Display, LowerExp};
use std::str::FromStr;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point type the amplitudes are built from: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + Debug
    + Display
    + LowerExp
    + FromStr
    + Default
    + Send
    + Sync
    + 'static
{
    /// Default tolerance for unitarity, normalization and equality checks.
    fn tolerance() -> Self;

    /// Shorthand for converting an `f64` literal.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    fn to_f64_lossy(self) -> f64;
}

impl Real for f64 {
    fn tolerance() -> Self {
        1e-12
    }

    fn to_f64_lossy(self) -> f64 {
        self
    }
}

impl Real for f32 {
    fn tolerance() -> Self {
        1e-5
    }

    fn to_f64_lossy(self) -> f64 {
        self as f64
    }
}

//! Scalar-generic numerical building blocks.

pub mod gamma;
pub mod ntt;
pub mod quad;
pub mod roots;
pub mod sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating point scalar accepted by the generic numerics (`f32`, `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Sum + Send + Sync + 'static
{
    /// Converts a literal; every `f64` is representable up to rounding.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal converts to any Real")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize converts to any Real")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("Real converts to f64")
    }
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Sum + Send + Sync + 'static
{
}

pub use gamma::{digamma, ln_gamma};
pub use quad::{adaptive, filon_legendre, gauss_legendre_rule, QuadResult, QuadRule};
pub use roots::RootTable;
pub use sum::{CompensatedSum, ComplexSum};

//! Numerics for sums of GL(3) coefficients over polynomial values.
//!
//! The crate is organised bottom-up:
//!
//! * [`arith`]: factorization, multiplicative sieves, Jacobi symbols, modulus splits.
//! * [`expsum`]: Kloosterman, Ramanujan and quadratic Gauss sums.
//! * [`coeffs`]: coefficient sources (`d3`, the symmetric-square lift of the
//!   discriminant form, user tables).
//! * [`charsum`]: the composite character sums of the delta-method analysis.
//! * [`analytic`]: bump weights, Mellin transforms, Voronoi kernels, the delta
//!   expansion and the oscillatory integrals.
//! * [`sums`]: direct evaluation of the headline sums and exponent fits.
//!
//! Floating point code in [`numeric`] and the bump/Mellin layer is generic over
//! the scalar type; the aliases below fix the double precision instances that
//! the rest of the crate uses.

pub mod analytic;
pub mod arith;
pub mod charsum;
pub mod coeffs;
pub mod error;
pub mod expsum;
pub mod numeric;
pub mod sums;

pub use error::{Error, Result};
pub use numeric::Real;

/// Double precision complex number used for every exponential sum.
pub type ComplexValue = num_complex::Complex<f64>;

/// Double precision bump weight.
pub type Bump = analytic::bump::BumpFunction<f64>;

/// Double precision quadrature result.
pub type Quad = numeric::quad::QuadResult<f64>;

/// Double precision exponent fit.
pub type Fit = sums::ExponentFit<f64>;

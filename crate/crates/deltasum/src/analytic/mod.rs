//! Analytic layer: weights, Mellin transforms, Voronoi kernels, the delta
//! expansion and the oscillatory integrals of the circle-method analysis.

pub mod bump;
pub mod constants;
pub mod delta;
pub mod kernel;
pub mod mellin;
pub mod osc;
pub mod voronoi;

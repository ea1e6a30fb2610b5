//! Mellin transforms of bump weights.

use super::bump::BumpFunction;
use crate::error::{Error, Result};
use crate::numeric::quad::adaptive_from;
use crate::numeric::{QuadResult, Real};
use num_complex::Complex;

/// Default relative tolerance of [`mellin`].
pub const MELLIN_REL_TOL: f64 = 1e-10;

const MAX_EVALS: usize = 2_000_000;

/// Initial panel count: enough that each panel sees a bounded number of oscillations of `x^{it}`.
fn panels<T: Real>(lo: T, hi: T, t: T) -> usize {
    let span = (hi / lo).ln().as_f64() * t.abs().as_f64() / std::f64::consts::TAU;
    (8.0 + 2.0 * span).ceil().min(1e5) as usize
}

/// `∫ g(x)·x^{s-1}·(log x)^k dx` over the support of `g`, adaptively to `rel_tol`.
pub fn mellin_log_moment<T: Real>(
    g: &BumpFunction<T>,
    s: Complex<T>,
    k: u32,
    rel_tol: T,
) -> Result<QuadResult<T, Complex<T>>> {
    let (lo, hi) = g.support();
    if lo <= T::zero() {
        return Err(Error::Precondition("Mellin transform needs support in (0, ∞)".into()));
    }
    let n = panels(lo, hi, s.im);
    let breaks: Vec<T> = (0..=n)
        .map(|i| lo + (hi - lo) * T::from_usize_lossy(i) / T::from_usize_lossy(n))
        .collect();
    let sm1 = s - T::one();
    let mut f = |x: T| {
        let lx = x.ln();
        let w = g.value(x) * lx.powi(k as i32);
        (sm1 * lx).exp() * w
    };
    // absolute floor: a small fraction of ∫ |g(x)| x^{σ-1} |log x|^k
    let scale = g.integrate(|x| x.powf(s.re - T::one()) * x.ln().abs().powi(k as i32));
    let abs_tol = rel_tol * scale * T::lit(1e-3);
    let r = adaptive_from(&mut f, &breaks, abs_tol, rel_tol, MAX_EVALS);
    if !r.converged {
        return Err(Error::Quadrature { achieved: r.error.as_f64(), target: abs_tol.max(rel_tol * r.value.norm()).as_f64() });
    }
    Ok(r)
}

/// `g̃(s) = ∫ g(x)·x^{s-1} dx`.
pub fn mellin<T: Real>(g: &BumpFunction<T>, s: Complex<T>) -> Result<QuadResult<T, Complex<T>>> {
    mellin_log_moment(g, s, 0, T::lit(MELLIN_REL_TOL))
}

/// Mellin transform of the `j`-th derivative, `∫ g^{(j)}(x)·x^{s-1} dx`.
pub fn mellin_of_derivative<T: Real>(
    g: &BumpFunction<T>,
    s: Complex<T>,
    j: usize,
) -> Result<QuadResult<T, Complex<T>>> {
    let (lo, hi) = g.support();
    if lo <= T::zero() {
        return Err(Error::Precondition("Mellin transform needs support in (0, ∞)".into()));
    }
    let n = panels(lo, hi, s.im);
    let breaks: Vec<T> = (0..=n)
        .map(|i| lo + (hi - lo) * T::from_usize_lossy(i) / T::from_usize_lossy(n))
        .collect();
    let sm1 = s - T::one();
    let mut f = |x: T| (sm1 * x.ln()).exp() * g.derivatives(x, j)[j];
    let scale = g.derivative_bounds()[j] / lo.powi(j as i32) * (hi - lo);
    let tol = T::lit(MELLIN_REL_TOL);
    let r = adaptive_from(&mut f, &breaks, tol * scale, tol, MAX_EVALS);
    if !r.converged {
        return Err(Error::Quadrature { achieved: r.error.as_f64(), target: (tol * scale).as_f64() });
    }
    Ok(r)
}

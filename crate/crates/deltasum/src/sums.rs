//! Direct evaluation of the ternary sum `Σ A(n1² + n2² + n3^k)·a(n3)` and the
//! binary sum `Σ A(Q(n1, n2))`, plus log–log exponent diagnostics.

use crate::analytic::bump::BumpFunction;
use crate::arith::{factorize, isqrt};
use crate::coeffs::CoefficientSource;
use crate::error::{Error, Result};
use crate::expsum::QuadraticForm;
use crate::numeric::Real;
use rayon::prelude::*;
use serde::Serialize;

/// The weight `a(n3)` on the smallest variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Weight {
    Unit,
    Mobius,
    VonMangoldt,
}

impl Weight {
    pub fn value(self, n: u64) -> Result<f64> {
        Ok(match self {
            Weight::Unit => 1.0,
            Weight::Mobius => factorize(n)?.mobius() as f64,
            Weight::VonMangoldt => factorize(n)?.von_mangoldt(),
        })
    }

    /// `Σ_{n <= X} |a(n)|² / X`.
    pub fn l2_ratio(self, x: u64) -> Result<f64> {
        let mut s = 0.0;
        for n in 1..=x {
            let v = self.value(n)?;
            s += v * v;
        }
        Ok(s / x as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WindowMode {
    /// `1 <= n1, n2 <= X^{1/2}`, `1 <= n3 <= Y` (ternary) or `1 <= n1 <= X`, `1 <= n2 <= Y` (binary)
    Sharp,
    /// `W(n/size)` with bumps supported in `[1, 2]`
    Smooth,
}

/// Summation ranges and windows for one evaluation.
#[derive(Debug, Clone)]
pub struct WindowConfig {
    pub x: u64,
    pub shape: SumShape,
    pub mode: WindowMode,
    pub w1: BumpFunction<f64>,
    pub w2: BumpFunction<f64>,
    pub w3: BumpFunction<f64>,
    /// delta-method scale: `X^{1/2}` for the ternary sum, `X` for the binary one
    pub big_q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SumShape {
    /// `Y = X^{1/k}`
    Ternary { k: u32 },
    /// `Y = X^θ`
    Binary { theta: f64 },
}

impl WindowConfig {
    pub fn ternary(x: u64, k: u32, mode: WindowMode) -> Result<Self> {
        if k < 3 {
            return Err(Error::range("k", k, ">= 3"));
        }
        Self::build(x, SumShape::Ternary { k }, mode, (x as f64).sqrt())
    }

    pub fn binary(x: u64, theta: f64, mode: WindowMode) -> Result<Self> {
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(Error::range("theta", theta, "(0, 1]"));
        }
        Self::build(x, SumShape::Binary { theta }, mode, x as f64)
    }

    fn build(x: u64, shape: SumShape, mode: WindowMode, big_q: f64) -> Result<Self> {
        if x < 2 {
            return Err(Error::range("X", x, ">= 2"));
        }
        let bump = BumpFunction::canonical(1.0, 2.0)?;
        Ok(Self { x, shape, mode, w1: bump.clone(), w2: bump.clone(), w3: bump, big_q })
    }

    /// `Y` as a real number.
    pub fn y(&self) -> f64 {
        match self.shape {
            SumShape::Ternary { k } => (self.x as f64).powf(1.0 / k as f64),
            SumShape::Binary { theta } => (self.x as f64).powf(theta),
        }
    }

    fn ternary_axes(&self) -> Result<(Axis<'_>, Axis<'_>, Axis<'_>, u32)> {
        let SumShape::Ternary { k } = self.shape else {
            return Err(Error::Precondition("ternary sum needs a ternary window configuration".into()));
        };
        let root = (self.x as f64).sqrt();
        Ok(match self.mode {
            WindowMode::Sharp => (Axis::sharp(isqrt(self.x)), Axis::sharp(isqrt(self.x)), Axis::sharp(self.y_floor()), k),
            WindowMode::Smooth => {
                (Axis::smooth(&self.w1, root), Axis::smooth(&self.w2, root), Axis::smooth(&self.w3, self.y()), k)
            }
        })
    }

    fn binary_axes(&self) -> Result<(Axis<'_>, Axis<'_>)> {
        let SumShape::Binary { .. } = self.shape else {
            return Err(Error::Precondition("binary sum needs a binary window configuration".into()));
        };
        Ok(match self.mode {
            WindowMode::Sharp => (Axis::sharp(self.x), Axis::sharp(self.y_floor())),
            WindowMode::Smooth => (Axis::smooth(&self.w1, self.x as f64), Axis::smooth(&self.w2, self.y())),
        })
    }

    /// Largest `n1² + n2² + n3^k` the ternary sum reads.
    pub fn ternary_top(&self) -> Result<u128> {
        let (a1, a2, a3, k) = self.ternary_axes()?;
        Ok((a1.hi as u128).pow(2) + (a2.hi as u128).pow(2) + (a3.hi as u128).pow(k))
    }

    /// Largest `Q(n1, n2)` the binary sum reads.
    pub fn binary_top(&self, form: &QuadraticForm) -> Result<i128> {
        let (a1, a2) = self.binary_axes()?;
        // a positive definite form is convex, so its maximum on the box sits at a corner
        Ok([(a1.lo, a2.lo), (a1.lo, a2.hi), (a1.hi, a2.lo), (a1.hi, a2.hi)]
            .iter()
            .map(|&(x, y)| form.eval(x as i64, y as i64))
            .max()
            .unwrap_or(0))
    }

    /// `⌊Y⌋` computed exactly for the ternary shape.
    pub fn y_floor(&self) -> u64 {
        match self.shape {
            SumShape::Ternary { k } => iroot(self.x, k),
            SumShape::Binary { .. } => self.y().floor() as u64,
        }
    }
}

/// `⌊x^{1/k}⌋`.
fn iroot(x: u64, k: u32) -> u64 {
    let mut r = (x as f64).powf(1.0 / k as f64).round() as u64;
    while r > 0 && (r as u128).pow(k) > x as u128 {
        r -= 1;
    }
    while ((r + 1) as u128).pow(k) <= x as u128 {
        r += 1;
    }
    r
}

/// Integer range and weight for one variable.
struct Axis<'a> {
    lo: u64,
    hi: u64,
    scale: f64,
    window: Option<&'a BumpFunction<f64>>,
}

impl Axis<'_> {
    fn sharp(hi: u64) -> Self {
        Axis { lo: 1, hi, scale: 1.0, window: None }
    }

    fn smooth(w: &BumpFunction<f64>, scale: f64) -> Axis<'_> {
        let (a, b) = w.support();
        Axis { lo: (a * scale).ceil().max(1.0) as u64, hi: (b * scale).floor() as u64, scale, window: Some(w) }
    }

    fn weight(&self, n: u64) -> f64 {
        self.window.map_or(1.0, |w| w.value(n as f64 / self.scale))
    }
}

/// Sums `f(n1)` over `n1` in parallel and reduces the per-`n1` values in order.
fn ordered_sum(lo: u64, hi: u64, parallel: bool, f: impl Fn(u64) -> Result<f64> + Sync) -> Result<f64> {
    let parts: Vec<f64> = if parallel {
        (lo..=hi).into_par_iter().map(&f).collect::<Result<_>>()?
    } else {
        (lo..=hi).map(&f).collect::<Result<_>>()?
    };
    Ok(parts.iter().sum())
}

/// `𝒮_k(X) = Σ A(n1² + n2² + n3^k)·a(n3)` with sharp or smooth windows.
pub fn eval_sk(cfg: &WindowConfig, source: &CoefficientSource, weight: Weight) -> Result<f64> {
    eval_sk_with(cfg, source, weight, true)
}

/// [`eval_sk`] with the parallel outer loop switched on or off; both give the same bits.
pub fn eval_sk_with(cfg: &WindowConfig, source: &CoefficientSource, weight: Weight, parallel: bool) -> Result<f64> {
    let (a1, a2, a3, k) = cfg.ternary_axes()?;
    let top = cfg.ternary_top()?;
    if top > source.limit() as u128 {
        return Err(Error::range("largest argument", top, source.limit()));
    }
    let third: Vec<(u64, f64)> = (a3.lo..=a3.hi)
        .map(|n3| Ok((n3.pow(k), weight.value(n3)? * a3.weight(n3))))
        .filter(|r: &Result<(u64, f64)>| r.as_ref().map_or(true, |v| v.1 != 0.0))
        .collect::<Result<_>>()?;
    ordered_sum(a1.lo, a1.hi, parallel, |n1| {
        let w1 = a1.weight(n1);
        if w1 == 0.0 {
            return Ok(0.0);
        }
        let mut acc = 0.0;
        for n2 in a2.lo..=a2.hi {
            let w2 = a2.weight(n2);
            if w2 == 0.0 {
                continue;
            }
            let base = n1 * n1 + n2 * n2;
            let mut inner = 0.0;
            for &(p, w3) in &third {
                inner += source.first_row(base + p)? * w3;
            }
            acc += inner * w2;
        }
        Ok(acc * w1)
    })
}

/// `Σ A(Q(n1, n2))·W1(n1/X)·W2(n2/Y)` (sharp: `1 <= n1 <= X`, `1 <= n2 <= Y`).
pub fn eval_s_quad(cfg: &WindowConfig, form: &QuadraticForm, source: &CoefficientSource) -> Result<f64> {
    eval_s_quad_with(cfg, form, source, true)
}

pub fn eval_s_quad_with(cfg: &WindowConfig, form: &QuadraticForm, source: &CoefficientSource, parallel: bool) -> Result<f64> {
    // the fields are public, so re-validate
    let form = QuadraticForm::new(form.a, form.b, form.c)?;
    let (a1, a2) = cfg.binary_axes()?;
    let top = cfg.binary_top(&form)?;
    if top > source.limit() as i128 {
        return Err(Error::range("largest argument", top, source.limit()));
    }
    ordered_sum(a1.lo, a1.hi, parallel, |n1| {
        let w1 = a1.weight(n1);
        if w1 == 0.0 {
            return Ok(0.0);
        }
        let mut acc = 0.0;
        for n2 in a2.lo..=a2.hi {
            let w2 = a2.weight(n2);
            if w2 != 0.0 {
                acc += source.first_row(form.eval(n1 as i64, n2 as i64) as u64)? * w2;
            }
        }
        Ok(acc * w1)
    })
}

/// Least-squares line through `(log X, log |S|)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentFit<T> {
    pub points: Vec<(T, T)>,
    pub slope: T,
    pub intercept: T,
    /// standard error of the slope (zero for exact power laws through three or more points)
    pub stderr: T,
}

pub fn exponent_fit<T: Real>(series: &[(T, T)]) -> Result<ExponentFit<T>> {
    if series.len() < 3 {
        return Err(Error::DegenerateSeries(format!("need at least 3 points, got {}", series.len())));
    }
    if series.iter().any(|&(x, v)| !(x > T::zero()) || v == T::zero() || !v.is_finite()) {
        return Err(Error::DegenerateSeries("sample points must be positive and values nonzero".into()));
    }
    let pts: Vec<(T, T)> = series.iter().map(|&(x, v)| (x.ln(), v.abs().ln())).collect();
    let n = T::from_usize_lossy(pts.len());
    let mx = pts.iter().map(|p| p.0).sum::<T>() / n;
    let my = pts.iter().map(|p| p.1).sum::<T>() / n;
    let sxx = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum::<T>();
    if !(sxx > T::zero()) {
        return Err(Error::DegenerateSeries("sample points coincide".into()));
    }
    let sxy = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<T>();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<T>();
    let dof = T::from_usize_lossy(pts.len() - 2);
    let stderr = if pts.len() > 2 { (rss / dof / sxx).sqrt() } else { T::zero() };
    if !slope.is_finite() {
        return Err(Error::DegenerateSeries("slope is not finite".into()));
    }
    Ok(ExponentFit { points: series.to_vec(), slope, intercept, stderr })
}

/// A fitted `X^{1+1/k}(c0 + c1 log X + c2 log² X)` and what is left after subtracting it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MainTermFit {
    pub coefficients: [f64; 3],
    pub residuals: Vec<(f64, f64)>,
}

/// Least-squares main term of the ternary `d3` sum; needs at least four points.
pub fn subtract_main_term(series: &[(f64, f64)], k: u32) -> Result<MainTermFit> {
    if series.len() < 4 {
        return Err(Error::DegenerateSeries("main-term fit needs at least 4 points".into()));
    }
    let e = 1.0 + 1.0 / k as f64;
    // normal equations for the basis (1, L, L²) applied to S/X^e
    let mut ata = [[0.0f64; 3]; 3];
    let mut atb = [0.0f64; 3];
    for &(x, v) in series {
        let l = x.ln();
        let basis = [1.0, l, l * l];
        let target = v / x.powf(e);
        for i in 0..3 {
            for j in 0..3 {
                ata[i][j] += basis[i] * basis[j];
            }
            atb[i] += basis[i] * target;
        }
    }
    let c = solve3(ata, atb).ok_or_else(|| Error::DegenerateSeries("main-term normal equations are singular".into()))?;
    let residuals = series
        .iter()
        .map(|&(x, v)| {
            let l = x.ln();
            (x, v - x.powf(e) * (c[0] + c[1] * l + c[2] * l * l))
        })
        .collect();
    Ok(MainTermFit { coefficients: c, residuals })
}

/// Gaussian elimination with partial pivoting.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let s: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Theorem {
    Ternary { k: u32 },
    Binary { theta: f64 },
}

/// Exponents of `X` in the trivial bound, the earlier bound and the improved one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Exponents {
    pub trivial: f64,
    pub prior: f64,
    /// the saving `δ(k)` of the earlier ternary bound
    pub prior_saving: Option<f64>,
    pub improved: f64,
}

pub fn theorem_exponents(theorem: Theorem) -> Result<Exponents> {
    match theorem {
        Theorem::Ternary { k } => {
            if k < 3 {
                return Err(Error::range("k", k, ">= 3"));
            }
            let kf = k as f64;
            let saving = match k {
                3 => 1.0 / 15.0,
                4..=7 => 1.0 / (kf * 2f64.powi(k as i32 - 1)),
                _ => 1.0 / (2.0 * kf * kf * (kf - 1.0)),
            };
            let improved = if k == 3 { 7.0 / 8.0 + 1.0 / 3.0 } else { 1.0 + 1.0 / (2.0 * kf) };
            Ok(Exponents { trivial: 1.0 + 1.0 / kf, prior: 1.0 + 1.0 / kf - saving, prior_saving: Some(saving), improved })
        }
        Theorem::Binary { theta } => {
            if !(theta > 0.0 && theta <= 1.0) {
                return Err(Error::range("theta", theta, "(0, 1]"));
            }
            Ok(Exponents { trivial: 1.0 + theta, prior: 2.0 - 1.0 / 68.0, prior_saving: None, improved: 7.0 / 4.0 })
        }
    }
}

//! The oscillatory integrals of the delta-method analysis: the Voronoi-side
//! kernel `ℐ±`, the Poisson-side transform `𝔍`, the composites `ℒ±`/`𝒲±`, the
//! `w`-integral `𝔷` and the stationary-phase integral `𝒫`.
//!
//! In the composites the `u`-integral `∫ ψ(q,u) U(u) e(Nu/(q𝒬)) du` is replaced by
//! `q𝒬·Δ_q(N)` with `U ≡ 1`, the exact Fourier image of the delta expansion.

use super::bump::BumpFunction;
use super::delta::DeltaExpansion;
use crate::charsum::Sign;
use crate::error::{Error, Result};
use crate::expsum::QuadraticForm;
use crate::numeric::quad::adaptive_from;
use crate::numeric::{filon_legendre, gauss_legendre_rule};
use num_complex::Complex;
use rustfft::FftPlanner;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

type C64 = Complex<f64>;

/// `-2π³/√(3π)`.
fn voronoi_constant() -> f64 {
    -2.0 * PI.powi(3) / (3.0 * PI).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscConfig {
    pub rel_tol: f64,
    /// phase derivative (radians per unit) above which Filon segments are used
    pub filon_threshold: f64,
    /// phase derivative beyond which results carry the asymptotic flag
    pub frequency_limit: f64,
    pub allow_asymptotic: bool,
    pub filon_order: usize,
}

impl Default for OscConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-10, filon_threshold: 50.0, frequency_limit: 1e4, allow_asymptotic: false, filon_order: 16 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Scheme {
    Adaptive,
    Filon,
    /// uniform grid on compactly supported smooth integrands
    Trapezoid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscValue {
    pub re: f64,
    pub im: f64,
    pub error: f64,
    pub scheme: Scheme,
    /// largest phase derivative met (radians per unit)
    pub max_frequency: f64,
    /// the frequency exceeded the quadrature regime
    pub asymptotic: bool,
}

impl OscValue {
    pub fn value(&self) -> C64 {
        C64::new(self.re, self.im)
    }
}

/// `∫_a^b amp(x)·e^{iφ(x)} dx`, choosing the scheme from the largest `|φ'|`
/// unless `force` fixes it.
pub fn oscillatory_integral(
    amp: impl Fn(f64) -> f64,
    phase: impl Fn(f64) -> f64,
    dphase: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    cfg: &OscConfig,
    force: Option<Scheme>,
) -> Result<OscValue> {
    let probes = 512;
    let fmax = (0..=probes).map(|i| dphase(a + (b - a) * i as f64 / probes as f64).abs()).fold(0.0, f64::max);
    let asymptotic = fmax > cfg.frequency_limit;
    if asymptotic && !cfg.allow_asymptotic {
        return Err(Error::FrequencyRegime { frequency: fmax, limit: cfg.frequency_limit });
    }
    let rule = gauss_legendre_rule::<f64>(20);
    let scale = rule.composite(a, b, 32, |x| amp(x).abs()).max(f64::MIN_POSITIVE);
    let scheme = force.unwrap_or(if fmax <= cfg.filon_threshold { Scheme::Adaptive } else { Scheme::Filon });
    let cycles = fmax * (b - a) / TAU;
    let (value, error) = match scheme {
        Scheme::Adaptive | Scheme::Trapezoid => {
            let n = (8.0 + 2.0 * cycles).ceil() as usize;
            let breaks: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
            let mut f = |x: f64| C64::from_polar(amp(x), phase(x));
            let r = adaptive_from(&mut f, &breaks, cfg.rel_tol * scale * 1e-2, cfg.rel_tol, 50_000_000);
            if !r.converged {
                return Err(Error::Quadrature { achieved: r.error, target: cfg.rel_tol * r.value.norm() });
            }
            (r.value, r.error)
        }
        Scheme::Filon => {
            let mut panels = (4.0 + cycles / 4.0).ceil() as usize;
            let mut prev = filon_legendre(&amp, &phase, &dphase, a, b, panels, cfg.filon_order);
            loop {
                panels *= 2;
                let next = filon_legendre(&amp, &phase, &dphase, a, b, panels, cfg.filon_order);
                let diff = (next.value - prev.value).norm();
                if diff <= cfg.rel_tol * next.value.norm().max(scale * 1e-2) || panels > 1 << 16 {
                    break (next.value, diff.max(next.error));
                }
                prev = next;
            }
        }
    };
    Ok(OscValue { re: value.re, im: value.im, error, scheme, max_frequency: fmax, asymptotic })
}

/// Which theorem's geometry the integrals carry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry {
    /// `𝕦²X + 𝕧²X + n3^k`, modulus scale `𝒬 = X^{1/2}`
    Ternary,
    /// `Q(𝕦X, 𝕧Y)`, modulus scale `𝒬 = X`
    Binary { y: f64, form: QuadraticForm },
}

/// Parameters shared by all the oscillatory integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscIntegralSpec {
    pub x: f64,
    pub big_q: f64,
    pub q: u64,
    pub n: u64,
    /// the product `n²m`
    pub n2m: f64,
    pub n3: u64,
    pub k: u32,
    pub m1: i64,
    pub m2: i64,
    pub u: f64,
    pub sign: Sign,
    pub geometry: Geometry,
}

impl OscIntegralSpec {
    /// Ternary spec with `𝒬 = X^{1/2}`.
    pub fn ternary(x: f64, q: u64, u: f64, n2m: f64) -> Self {
        Self {
            x,
            big_q: x.sqrt(),
            q,
            n: 1,
            n2m,
            n3: 1,
            k: 3,
            m1: 0,
            m2: 0,
            u,
            sign: Sign::Plus,
            geometry: Geometry::Ternary,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x >= 1.0 && self.big_q >= 1.0) || self.q == 0 || self.n == 0 || !(self.n2m >= 0.0) {
            return Err(Error::Precondition("need X, 𝒬 >= 1, q, n >= 1 and n²m >= 0".into()));
        }
        if let Geometry::Binary { y, .. } = self.geometry {
            if !(y > 0.0) {
                return Err(Error::Precondition("binary geometry needs Y > 0".into()));
            }
        }
        Ok(())
    }

    /// `X` (ternary) or `X²` (binary): the size of the quadratic values.
    pub fn scale(&self) -> f64 {
        match self.geometry {
            Geometry::Ternary => self.x,
            Geometry::Binary { .. } => self.x * self.x,
        }
    }

    /// `K = q³/X + X^{1/2}|u|³`, or `K' = q³/X² + X|u|³` for the binary geometry.
    pub fn k_parameter(&self) -> f64 {
        let q3 = (self.q as f64).powi(3);
        match self.geometry {
            Geometry::Ternary => q3 / self.x + self.x.sqrt() * self.u.abs().powi(3),
            Geometry::Binary { .. } => q3 / (self.x * self.x) + self.x * self.u.abs().powi(3),
        }
    }

    /// `M = nq/K`.
    pub fn m_threshold(&self) -> f64 {
        self.n as f64 * self.q as f64 / self.k_parameter()
    }

    /// Coefficients of `𝕦, 𝕧` in the linear Poisson phase (cycles).
    fn linear(&self) -> (f64, f64) {
        let q = self.q as f64;
        match self.geometry {
            Geometry::Ternary => (self.m1 as f64 * self.x.sqrt() / q, self.m2 as f64 * self.x.sqrt() / q),
            Geometry::Binary { y, .. } => (self.m1 as f64 * self.x / q, self.m2 as f64 * y / q),
        }
    }

    /// Quadratic value divided by the scale, as a function of `(𝕦, 𝕧)`.
    fn rho(&self, uu: f64, vv: f64) -> f64 {
        match self.geometry {
            Geometry::Ternary => uu * uu + vv * vv,
            Geometry::Binary { y, form } => form.eval_real(uu, vv * y / self.x),
        }
    }

    /// Constant shift of the `u`-frequency: `n3^k` (ternary) or 0.
    fn shift(&self) -> f64 {
        match self.geometry {
            Geometry::Ternary => (self.n3 as f64).powi(self.k as i32),
            Geometry::Binary { .. } => 0.0,
        }
    }

    fn sign_f(&self) -> f64 {
        self.sign.value() as f64
    }
}

/// Smooth windows of the integrals.
#[derive(Debug, Clone)]
pub struct Windows {
    /// Voronoi-side window, 1 on `[1, 2]`, supported in `[1/2, 3]`
    pub v: BumpFunction<f64>,
    pub w1: BumpFunction<f64>,
    pub w2: BumpFunction<f64>,
    /// window of the `w`-integral in `𝔷`
    pub w: BumpFunction<f64>,
}

impl Default for Windows {
    fn default() -> Self {
        Self {
            v: BumpFunction::plateau(0.5, 1.0, 2.0, 3.0).expect("valid plateau"),
            w1: BumpFunction::canonical(1.0, 2.0).expect("valid bump"),
            w2: BumpFunction::canonical(1.0, 2.0).expect("valid bump"),
            w: BumpFunction::canonical(1.0, 2.0).expect("valid bump"),
        }
    }
}

/// `(2π³/√(3π))·∫ |V(z) z^{-1/3}| dz`, the trivial bound for `ℐ±`.
pub fn voronoi_kernel_trivial_bound(win: &Windows) -> f64 {
    voronoi_constant().abs() * win.v.integrate(|z| z.powf(-1.0 / 3.0))
}

/// `ℐ±(n²m, u, q) = -2π³/√(3π) ∫ V±(z) z^{-1/3} e(Szu/(q𝒬) ± 3(S z n²m)^{1/3}/q) dz`
/// with `S = X` (ternary) or `X²` (binary, the integral `𝒥±`).
pub fn osc_voronoi_kernel(
    spec: &OscIntegralSpec,
    win: &Windows,
    cfg: &OscConfig,
    force: Option<Scheme>,
) -> Result<OscValue> {
    spec.validate()?;
    let s = spec.scale();
    let q = spec.q as f64;
    let lin = TAU * s * spec.u / (q * spec.big_q);
    let cub = TAU * spec.sign_f() * 3.0 * (s * spec.n2m).cbrt() / q;
    let c = voronoi_constant() * spec.sign_f();
    let (lo, hi) = win.v.support();
    oscillatory_integral(
        |z| c * win.v.value(z) * z.powf(-1.0 / 3.0),
        |z| lin * z + cub * z.cbrt(),
        |z| lin + cub / (3.0 * z.powf(2.0 / 3.0)),
        lo,
        hi,
        cfg,
        force,
    )
}

/// One factor of the Poisson transform: `∫ W(t) e(-α t - β t²) dt`.
fn poisson_factor(w: &BumpFunction<f64>, alpha: f64, beta: f64, cfg: &OscConfig, force: Option<Scheme>) -> Result<OscValue> {
    let (lo, hi) = w.support();
    oscillatory_integral(
        |t| w.value(t),
        |t| -TAU * (alpha * t + beta * t * t),
        |t| -TAU * (alpha + 2.0 * beta * t),
        lo,
        hi,
        cfg,
        force,
    )
}

/// `𝔍(m1, m2, u, q) = ∬ W1(𝕦) W2(𝕧) e(-lin(𝕦,𝕧)) e(-u·S·ρ(𝕦,𝕧)/(q𝒬)) d𝕦 d𝕧`
/// (the transform `𝔍'` for the binary geometry).
pub fn osc_poisson_kernel(spec: &OscIntegralSpec, win: &Windows, cfg: &OscConfig) -> Result<OscValue> {
    spec.validate()?;
    let (a1, a2) = spec.linear();
    let quad = spec.u * spec.scale() / (spec.q as f64 * spec.big_q);
    match spec.geometry {
        Geometry::Ternary => {
            let f1 = poisson_factor(&win.w1, a1, quad, cfg, None)?;
            let f2 = poisson_factor(&win.w2, a2, quad, cfg, None)?;
            let v = f1.value() * f2.value();
            let error = f1.error * f2.value().norm() + f2.error * f1.value().norm();
            Ok(OscValue {
                re: v.re,
                im: v.im,
                error,
                scheme: f1.scheme,
                max_frequency: f1.max_frequency.max(f2.max_frequency),
                asymptotic: f1.asymptotic || f2.asymptotic,
            })
        }
        Geometry::Binary { .. } => {
            // outer 𝕦 by Gauss–Legendre panels, inner 𝕧 oscillatory
            let (lo, hi) = win.w1.support();
            let rule = gauss_legendre_rule::<f64>(20);
            let rho_max = spec.rho(hi, win.w2.support().1).abs();
            let panels = (8.0 + 2.0 * (a1.abs() + quad.abs() * rho_max)).ceil() as usize;
            let mut err = 0.0;
            let mut fmax: f64 = 0.0;
            let mut first_err = None;
            let v: C64 = rule.composite(lo, hi, panels, |uu| {
                let w = win.w1.value(uu);
                if w == 0.0 {
                    return C64::new(0.0, 0.0);
                }
                let (vlo, vhi) = win.w2.support();
                let inner = oscillatory_integral(
                    |vv| win.w2.value(vv),
                    |vv| -TAU * (a1 * uu + a2 * vv + quad * spec.rho(uu, vv)),
                    |vv| {
                        let h = 1e-6;
                        -TAU * (a2 + quad * (spec.rho(uu, vv + h) - spec.rho(uu, vv - h)) / (2.0 * h))
                    },
                    vlo,
                    vhi,
                    cfg,
                    None,
                );
                match inner {
                    Ok(r) => {
                        err += r.error * w;
                        fmax = fmax.max(r.max_frequency);
                        r.value() * w
                    }
                    Err(e) => {
                        first_err.get_or_insert(e);
                        C64::new(0.0, 0.0)
                    }
                }
            });
            if let Some(e) = first_err {
                return Err(e);
            }
            Ok(OscValue {
                re: v.re,
                im: v.im,
                error: err * (hi - lo) / (20 * panels) as f64,
                scheme: Scheme::Adaptive,
                max_frequency: fmax,
                asymptotic: false,
            })
        }
    }
}

/// `𝒫 = ∫ W1(𝕦) e(±3(X(𝕦² + 𝕧² + n3^k/X) n²m)^{1/3}/q - m1 X^{1/2} 𝕦/q) d𝕦` at fixed `𝕧`.
pub fn stationary_p(spec: &OscIntegralSpec, vv: f64, win: &Windows, cfg: &OscConfig, force: Option<Scheme>) -> Result<OscValue> {
    spec.validate()?;
    let x = spec.x;
    let q = spec.q as f64;
    let c = TAU * spec.sign_f() * 3.0 * (x * spec.n2m).cbrt() / q;
    let lin = TAU * spec.m1 as f64 * x.sqrt() / q;
    let off = vv * vv + (spec.n3 as f64).powi(spec.k as i32) / x;
    let (lo, hi) = win.w1.support();
    oscillatory_integral(
        |t| win.w1.value(t),
        |t| c * (t * t + off).cbrt() - lin * t,
        |t| c * 2.0 * t / (3.0 * (t * t + off).powf(2.0 / 3.0)) - lin,
        lo,
        hi,
        cfg,
        force,
    )
}

/// `√q / (X^{1/6} (n²m)^{1/6})`.
pub fn stationary_p_bound(spec: &OscIntegralSpec) -> f64 {
    (spec.q as f64).sqrt() / (spec.x.powf(1.0 / 6.0) * spec.n2m.powf(1.0 / 6.0))
}

/// Precomputed pieces of the composite integrals `ℒ±`/`𝒲±` for fixed
/// `(q, m1, m2, n3)`: the density of `ρ(𝕦,𝕧)` under the windows and the
/// convolution `D(z) = ∫ ω(ρ)·q𝒬Δ_q(S(z - ρ) - shift) dρ`.
#[derive(Debug, Clone)]
pub struct CompositeEngine {
    spec: OscIntegralSpec,
    z0: f64,
    h: f64,
    d: Vec<C64>,
    /// `D(z)` on the doubled ρ-grid, for the step-doubling error
    d_coarse: Vec<C64>,
    v1: Vec<f64>,
}

impl CompositeEngine {
    pub fn new(spec: &OscIntegralSpec, win: &Windows, delta: &DeltaExpansion) -> Result<Self> {
        spec.validate()?;
        let s = spec.scale();
        let qq = spec.q as f64 * delta.scale();
        let (zlo, zhi) = win.v.support();
        // ρ range from the window supports
        let (ulo, uhi) = win.w1.support();
        let (vlo, vhi) = win.w2.support();
        let mut rlo = f64::MAX;
        let mut rhi = f64::MIN;
        for i in 0..=64 {
            for j in 0..=64 {
                let r = spec.rho(ulo + (uhi - ulo) * i as f64 / 64.0, vlo + (vhi - vlo) * j as f64 / 64.0);
                rlo = rlo.min(r);
                rhi = rhi.max(r);
            }
        }
        let (a1, a2) = spec.linear();
        let density_scale = (a1.abs() + a2.abs()) * (uhi - ulo).max(vhi - vlo);
        // resolve Δ_q features (width ~ q𝒬/S), the Voronoi phase and the density
        let phase_rate = 3.0 * (s * spec.n2m.max(1.0)).cbrt() / (spec.q as f64) / zlo.powf(2.0 / 3.0);
        let h = (qq / s / 64.0).min(1.0 / (16.0 * phase_rate.max(1.0))).min(1.0 / (16.0 * (1.0 + density_scale))).min(0.01);
        let nz = ((zhi - zlo) / h).ceil() as usize + 1;
        let nr = ((rhi - rlo) / h).ceil() as usize + 1;
        if nz + nr > 50_000_000 {
            return Err(Error::MemoryBudget { requested: (nz + nr) as u64, limit: 50_000_000 });
        }
        // z_i - ρ_j = zlo - rlo + (i - j)h, so D is a discrete convolution of ω with q𝒬Δ_q sampled on one grid
        let omega: Vec<C64> = (0..nr).map(|j| Self::density(spec, win, rlo + j as f64 * h)).collect();
        let offsets: Vec<f64> = (0..nz + nr - 1)
            .map(|k| {
                let n = s * (zlo - rlo + (k as f64 - (nr - 1) as f64) * h) - spec.shift();
                qq * delta.delta_q(spec.q, n)
            })
            .collect();
        let coarse_omega: Vec<C64> = omega.iter().enumerate().map(|(j, w)| if j % 2 == 0 { w * 2.0 } else { C64::new(0.0, 0.0) }).collect();
        let fine = convolve(&omega, &offsets);
        let coarse = convolve(&coarse_omega, &offsets);
        let d: Vec<C64> = (0..nz).map(|i| fine[i + nr - 1] * h).collect();
        let d_coarse: Vec<C64> = (0..nz).map(|i| coarse[i + nr - 1] * h).collect();
        let v1 = (0..nz)
            .map(|i| {
                let z = zlo + i as f64 * h;
                win.v.value(z) * z.powf(-1.0 / 3.0)
            })
            .collect();
        Ok(Self { spec: *spec, z0: zlo, h, d, d_coarse, v1 })
    }

    /// `ω(ρ) = ∬ W1 W2 e(-lin) δ(ρ - ρ(𝕦,𝕧))`, integrating out `𝕧` through the roots of `ρ(𝕦,𝕧) = ρ`.
    fn density(spec: &OscIntegralSpec, win: &Windows, rho: f64) -> C64 {
        let (a1, a2) = spec.linear();
        let (ulo, uhi) = win.w1.support();
        let (vlo, vhi) = win.w2.support();
        let rule = gauss_legendre_rule::<f64>(16);
        let panels = (8.0 + 2.0 * (a1.abs() + a2.abs())).ceil() as usize;
        rule.composite(ulo, uhi, panels, |uu| {
            let w1 = win.w1.value(uu);
            if w1 == 0.0 {
                return C64::new(0.0, 0.0);
            }
            let mut acc = C64::new(0.0, 0.0);
            for (vv, jac) in Self::roots(spec, uu, rho) {
                if vv > vlo && vv < vhi {
                    let w2 = win.w2.value(vv);
                    acc += C64::from_polar(w1 * w2 / jac, -TAU * (a1 * uu + a2 * vv));
                }
            }
            acc
        })
    }

    /// Solutions `𝕧` of `ρ(𝕦, 𝕧) = ρ` with `|∂ρ/∂𝕧|`.
    fn roots(spec: &OscIntegralSpec, uu: f64, rho: f64) -> Vec<(f64, f64)> {
        match spec.geometry {
            Geometry::Ternary => {
                let r = rho - uu * uu;
                if r <= 0.0 {
                    return vec![];
                }
                let v = r.sqrt();
                vec![(v, 2.0 * v)]
            }
            Geometry::Binary { y, form } => {
                // A u² + 2C u (θv) + B (θv)² = ρ with θ = Y/X
                let th = y / spec.x;
                let (a, b, c) = (form.a as f64, form.b as f64, form.c as f64);
                let qa = b * th * th;
                let qb = 2.0 * c * th * uu;
                let qc = a * uu * uu - rho;
                let disc = qb * qb - 4.0 * qa * qc;
                if disc <= 0.0 {
                    return vec![];
                }
                let sq = disc.sqrt();
                [(-qb + sq) / (2.0 * qa), (-qb - sq) / (2.0 * qa)]
                    .into_iter()
                    .map(|v| (v, (2.0 * qa * v + qb).abs()))
                    .collect()
            }
        }
    }

    pub fn spec(&self) -> &OscIntegralSpec {
        &self.spec
    }

    /// `ℒ±` (or `𝒲±`) at the given `n²m` and sign, by the trapezoid rule on the
    /// `z`-grid with a step-doubling error estimate.
    pub fn composite(&self, n2m: f64, sign: Sign) -> OscValue {
        let s = self.spec.scale();
        let q = self.spec.q as f64;
        let sg = sign.value() as f64;
        let cub = TAU * sg * 3.0 * (s * n2m).cbrt() / q;
        let c = voronoi_constant() * sg;
        let mut full = C64::new(0.0, 0.0);
        let mut coarse = C64::new(0.0, 0.0);
        let mut fmax: f64 = 0.0;
        let mut rho_coarse = C64::new(0.0, 0.0);
        for (i, (&dz, &v1)) in self.d.iter().zip(&self.v1).enumerate() {
            if v1 == 0.0 {
                continue;
            }
            let z = self.z0 + i as f64 * self.h;
            let e = C64::from_polar(v1, cub * z.cbrt());
            let t = dz * e;
            rho_coarse += self.d_coarse[i] * e;
            full += t;
            if i % 2 == 0 {
                coarse += t;
            }
            fmax = fmax.max((cub / (3.0 * z.powf(2.0 / 3.0))).abs());
        }
        let value = full * self.h * c;
        let coarse = coarse * 2.0 * self.h * c;
        OscValue {
            re: value.re,
            im: value.im,
            error: (value - coarse).norm() + (full - rho_coarse).norm() * self.h * c.abs(),
            scheme: Scheme::Trapezoid,
            max_frequency: fmax,
            asymptotic: false,
        }
    }

    /// `𝔷(m) = ∫ W(w)·|ℒ±(n²m = Kw)|²·e(-Kmw/(nq)) dw`.
    pub fn z_integral(&self, win: &Windows, m: f64, sign: Sign) -> OscValue {
        let k = self.spec.k_parameter();
        let mm = self.spec.m_threshold();
        let (lo, hi) = win.w.support();
        let cycles = m.abs() / mm * (hi - lo);
        let rule = gauss_legendre_rule::<f64>(20);
        let panels = (8.0 + cycles).ceil() as usize;
        // integrand and the propagated error of |ℒ|²
        let sample = |w: f64| {
            let weight = win.w.value(w);
            if weight == 0.0 {
                return (C64::new(0.0, 0.0), 0.0);
            }
            let l = self.composite(k * w, sign);
            let v = C64::from_polar(weight * l.value().norm_sqr(), -TAU * m * w / mm);
            (v, 2.0 * l.value().norm() * l.error * weight)
        };
        let mut err = 0.0;
        let value: C64 = rule.composite(lo, hi, panels, |w| {
            let (v, e) = sample(w);
            err += e;
            v
        });
        let coarse: C64 = rule.composite(lo, hi, panels / 2 + 1, |w| sample(w).0);
        OscValue {
            re: value.re,
            im: value.im,
            error: (value - coarse).norm() + err * (hi - lo) / (20 * panels) as f64,
            scheme: Scheme::Adaptive,
            max_frequency: TAU * m.abs() / mm,
            asymptotic: false,
        }
    }
}

/// Linear convolution by FFT.
fn convolve(a: &[C64], b: &[f64]) -> Vec<C64> {
    let len = (a.len() + b.len() - 1).next_power_of_two();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(len);
    let inv = planner.plan_fft_inverse(len);
    let mut fa = vec![C64::new(0.0, 0.0); len];
    fa[..a.len()].copy_from_slice(a);
    let mut fb = vec![C64::new(0.0, 0.0); len];
    for (x, &y) in fb.iter_mut().zip(b) {
        *x = C64::new(y, 0.0);
    }
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y / len as f64;
    }
    inv.process(&mut fa);
    fa.truncate(a.len() + b.len() - 1);
    fa
}

/// `ℒ±`/`𝒲±` for one spec.
pub fn osc_composite(spec: &OscIntegralSpec, win: &Windows, delta: &DeltaExpansion) -> Result<OscValue> {
    Ok(CompositeEngine::new(spec, win, delta)?.composite(spec.n2m, spec.sign))
}

/// `q^{3/2}/𝒬^{3/2}`, the bound shared by `ℒ±` and `𝒲±`.
pub fn composite_bound(spec: &OscIntegralSpec) -> f64 {
    (spec.q as f64 / spec.big_q).powf(1.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bench() -> OscIntegralSpec {
        let mut s = OscIntegralSpec::ternary(1e4, 20, 0.5, 0.0);
        s.n2m = s.k_parameter() / 2.0;
        s
    }

    #[test]
    fn voronoi_kernel_two_schemes() {
        let win = Windows::default();
        let cfg = OscConfig::default();
        let s = bench();
        let a = osc_voronoi_kernel(&s, &win, &cfg, Some(Scheme::Adaptive)).unwrap();
        let b = osc_voronoi_kernel(&s, &win, &cfg, Some(Scheme::Filon)).unwrap();
        assert!((a.value() - b.value()).norm() < 1e-6 * a.value().norm().max(1e-3), "{a:?} {b:?}");
        assert!(a.value().norm() <= voronoi_kernel_trivial_bound(&win));
    }

    #[test]
    fn voronoi_kernel_frequency_regime() {
        let win = Windows::default();
        let mut s = bench();
        s.n2m = 1e12;
        let cfg = OscConfig::default();
        assert!(matches!(osc_voronoi_kernel(&s, &win, &cfg, None), Err(Error::FrequencyRegime { .. })));
        let cfg = OscConfig { allow_asymptotic: true, ..cfg };
        let r = osc_voronoi_kernel(&s, &win, &cfg, None).unwrap();
        assert!(r.asymptotic && r.scheme == Scheme::Filon);
    }

    #[test]
    fn poisson_kernel_trivial_cases() {
        let win = Windows::default();
        let cfg = OscConfig::default();
        let mut s = bench();
        s.u = 0.0;
        let v = osc_poisson_kernel(&s, &win, &cfg).unwrap();
        let i1 = win.w1.integral();
        assert!((v.value() - C64::new(i1 * i1, 0.0)).norm() < 1e-10);
        // conjugation symmetry
        let mut s = bench();
        s.m1 = 1;
        s.m2 = -2;
        let a = osc_poisson_kernel(&s, &win, &cfg).unwrap().value();
        s.m1 = -1;
        s.m2 = 2;
        s.u = -s.u;
        let b = osc_poisson_kernel(&s, &win, &cfg).unwrap().value();
        assert!((a - b.conj()).norm() < 1e-10 * (1.0 + a.norm()));
    }

    #[test]
    fn poisson_kernel_matches_direct_quadrature() {
        let win = Windows::default();
        let cfg = OscConfig::default();
        let mut s = bench();
        s.q = 10;
        s.m1 = 1;
        s.m2 = 3;
        let v = osc_poisson_kernel(&s, &win, &cfg).unwrap();
        let (a1, a2) = s.linear();
        let quad = s.u * s.scale() / (s.q as f64 * s.big_q);
        let rule = gauss_legendre_rule::<f64>(20);
        let direct: C64 = rule.composite(1.0, 2.0, 200, |x| {
            rule.composite(1.0, 2.0, 200, |y| {
                let ph = -TAU * (a1 * x + a2 * y + quad * (x * x + y * y));
                C64::from_polar(win.w1.value(x) * win.w2.value(y), ph)
            })
        });
        assert!((v.value() - direct).norm() < 1e-9 + v.error, "{} vs {direct}", v.value());
        assert!(v.value().norm() < 1e-2 * win.w1.integral().powi(2));
    }

    #[test]
    fn binary_poisson_matches_separable_case() {
        // diagonal form with Y = X reduces to a product of one-dimensional transforms
        let win = Windows::default();
        let cfg = OscConfig::default();
        let form = QuadraticForm::new(1, 1, 0).unwrap();
        let mut s = bench();
        s.geometry = Geometry::Binary { y: s.x, form };
        s.big_q = s.x;
        s.u = 0.02;
        s.m1 = 1;
        let b = osc_poisson_kernel(&s, &win, &cfg).unwrap().value();
        let (a1, a2) = s.linear();
        let quad = s.u * s.scale() / (s.q as f64 * s.big_q);
        let f1 = poisson_factor(&win.w1, a1, quad, &cfg, None).unwrap().value();
        let f2 = poisson_factor(&win.w2, a2, quad, &cfg, None).unwrap().value();
        assert!((b - f1 * f2).norm() < 1e-8 * (1.0 + b.norm()), "{b} {}", f1 * f2);
    }

    #[test]
    fn stationary_p_properties() {
        let win = Windows::default();
        let cfg = OscConfig::default();
        let mut s = bench();
        s.n2m = 1e-9;
        let tiny = stationary_p(&s, 1.5, &win, &cfg, None).unwrap().value();
        assert!((tiny.norm() - win.w1.integral()).abs() < 1e-3);
        let mut s = bench();
        s.m1 = 1;
        let p = stationary_p(&s, 1.5, &win, &cfg, None).unwrap().value();
        s.sign = Sign::Minus;
        s.m1 = -1;
        let m = stationary_p(&s, 1.5, &win, &cfg, None).unwrap().value();
        assert!((p - m.conj()).norm() < 1e-10);
        let a = stationary_p(&s, 1.5, &win, &cfg, Some(Scheme::Adaptive)).unwrap();
        let b = stationary_p(&s, 1.5, &win, &cfg, Some(Scheme::Filon)).unwrap();
        assert!((a.value() - b.value()).norm() < 1e-8);
    }

    #[test]
    fn composite_two_schemes() {
        // trapezoid on the convolved grid against a direct nested Gauss–Legendre evaluation
        let win = Windows::default();
        let delta = DeltaExpansion::new(100.0).unwrap();
        let mut s = OscIntegralSpec::ternary(1e4, 64, 1.0, 0.0);
        s.n2m = s.k_parameter() / 2.0;
        let engine = CompositeEngine::new(&s, &win, &delta).unwrap();
        let fast = engine.composite(s.n2m, Sign::Plus);
        let qq = s.q as f64 * delta.scale();
        let rule = gauss_legendre_rule::<f64>(20);
        let cub = TAU * 3.0 * (s.x * s.n2m).cbrt() / s.q as f64;
                let slow: C64 = rule.composite(0.5, 3.0, 30, |z| {
            let inner: f64 = rule.composite(1.0, 2.0, 8, |uu| {
                rule.composite(1.0, 2.0, 8, |vv| {
                    let n = s.x * (z - uu * uu - vv * vv) - 1.0;
                    win.w1.value(uu) * win.w2.value(vv) * qq * delta.delta_q(s.q, n)
                })
            });
            C64::from_polar(win.v.value(z) * z.powf(-1.0 / 3.0) * inner, cub * z.cbrt())
        }) * voronoi_constant();
                assert!((fast.value() - slow).norm() < 1e-5 * slow.norm().max(1e-6), "{} vs {slow}", fast.value());
    }
}

//! Inverse-Mellin kernels of the GL(3) Voronoi formula.
//!
//! For a weight `g` on `[X, c·X]` the kernel is
//! `G(y) = (1/2πi) ∫_(σ) (π³y)^{-s} R(s) g̃(-s-l) ds` with a gamma ratio `R`.
//! Writing `s = σ + it` and `x = X·e^w`, the weight transform becomes a Fourier
//! transform in `w` and the contour integral a Fourier transform in `t`, so both
//! are done by FFT. The result is a table in `v = log(π³·y·X)`.

use super::bump::BumpFunction;
use super::mellin::mellin_log_moment;
use crate::charsum::Sign;
use crate::coeffs::KernelParams;
use crate::error::{Error, Result};
use crate::numeric::ln_gamma;
use num_complex::Complex;
use rustfft::FftPlanner;
use std::f64::consts::{PI, TAU};

type C64 = Complex<f64>;

/// Which gamma ratio and weight shift define the kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelFamily {
    /// `Π_j Γ((1+s+α_j+ℓ)/2) / Γ((-s-α_j+ℓ)/2)` against `g̃(-s)`
    Langlands { params: KernelParams, ell: u8 },
    /// `Γ((1+s+2l)/2)³ / Γ(-s/2)³` against `h̃(-s-l)`
    TripleDivisor { l: u8 },
}

impl KernelFamily {
    fn log_ratio(&self, s: C64) -> C64 {
        match *self {
            KernelFamily::Langlands { params, ell } => {
                let l = ell as f64;
                params
                    .alpha
                    .iter()
                    .map(|&a| ln_gamma((s + a + 1.0 + l) * 0.5) - ln_gamma((-s - a + l) * 0.5))
                    .sum()
            }
            KernelFamily::TripleDivisor { l } => {
                (ln_gamma((s + 1.0 + 2.0 * l as f64) * 0.5) - ln_gamma(-s * 0.5)) * 3.0
            }
        }
    }

    fn weight_shift(&self) -> f64 {
        match *self {
            KernelFamily::Langlands { .. } => 0.0,
            KernelFamily::TripleDivisor { l } => l as f64,
        }
    }

    /// Contours must lie strictly right of this abscissa.
    pub fn min_sigma(&self) -> f64 {
        match *self {
            KernelFamily::Langlands { params, ell } => {
                params.alpha.iter().map(|a| -1.0 - ell as f64 - a.re).fold(f64::MIN, f64::max)
            }
            KernelFamily::TripleDivisor { l } => -1.0 - 2.0 * l as f64,
        }
    }
}

/// Discretisation of the contour integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConfig {
    /// contour abscissa
    pub sigma: f64,
    /// truncation height `T` of the contour
    pub t_max: f64,
    /// FFT length is `2^log2_len`
    pub log2_len: u32,
    /// largest admissible relative mass beyond `0.8·T`
    pub tail_tol: f64,
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self { sigma: 0.5, t_max: 6000.0, log2_len: 20, tail_tol: 1e-10 }
    }
}

/// Samples `A(t) = R(σ+it)·g̃(-σ-l-it)·X^{…}` on `|t| < T`.
#[derive(Debug, Clone)]
pub struct KernelSpectrum {
    family: KernelFamily,
    sigma: f64,
    x_scale: f64,
    dt: f64,
    dw: f64,
    amps: Vec<C64>,
    tail: f64,
    /// random-phase size of the discarded sub-floor samples
    noise: f64,
}

/// A kernel value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: C64,
    pub error: f64,
}

impl KernelSpectrum {
    pub fn new(family: KernelFamily, weight: &BumpFunction<f64>, cfg: &KernelConfig) -> Result<Self> {
        let (lo, hi) = weight.support();
        if lo <= 0.0 {
            return Err(Error::Precondition("kernel weight must be supported in (0, ∞)".into()));
        }
        if !(cfg.sigma > family.min_sigma()) {
            return Err(Error::Precondition(format!(
                "contour abscissa {} must exceed {} (gamma poles)",
                cfg.sigma,
                family.min_sigma()
            )));
        }
        if !(8..=24).contains(&cfg.log2_len) || !(cfg.t_max > 0.0) {
            return Err(Error::Precondition("FFT length must be 2^8 ..= 2^24 and T positive".into()));
        }
        let n = 1usize << cfg.log2_len;
        let dw = PI / cfg.t_max;
        let dt = TAU / (n as f64 * dw);
        let width = (hi / lo).ln();
        let samples = (width / dw).ceil() as usize + 1;
        if samples >= n / 2 {
            return Err(Error::Precondition("weight support too wide for the FFT length".into()));
        }
        let c = cfg.sigma + family.weight_shift();
        let mut buf = vec![C64::new(0.0, 0.0); n];
        for (j, b) in buf.iter_mut().enumerate().take(samples) {
            let w = j as f64 * dw;
            *b = C64::new(weight.value(lo * w.exp()) * (-c * w).exp() * dw, 0.0);
        }
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        // Transform values below the rounding floor of the FFT carry no information.
        let floor = 256.0 * f64::EPSILON * buf[0].norm().max(buf.iter().map(|b| b.norm()).fold(0.0, f64::max));
        let mut total = 0.0;
        let mut tail = 0.0;
        let mut noise = 0.0;
        for (idx, b) in buf.iter_mut().enumerate() {
            let k = if idx < n / 2 { idx as f64 } else { idx as f64 - n as f64 };
            let t = k * dt;
            let r = family.log_ratio(C64::new(cfg.sigma, t)).exp();
            if b.norm() < floor {
                noise += (floor * r.norm()).powi(2);
                *b = C64::new(0.0, 0.0);
                continue;
            }
            *b *= r;
            let m = b.norm();
            total += m;
            if t.abs() >= 0.8 * cfg.t_max {
                tail += m;
            }
        }
        let tail = if total > 0.0 { tail / total } else { 0.0 };
        if tail > cfg.tail_tol {
            return Err(Error::Truncation { achieved: tail, budget: cfg.tail_tol });
        }
        Ok(Self { family, sigma: cfg.sigma, x_scale: lo, dt, dw, amps: buf, tail, noise: noise.sqrt() })
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    /// Relative spectral mass in `0.8·T <= |t| < T`.
    pub fn tail_fraction(&self) -> f64 {
        self.tail
    }

    fn prefactor(&self, big_y: f64) -> f64 {
        self.x_scale.powf(-self.family.weight_shift()) * (PI.powi(3) * big_y).powf(-self.sigma)
    }

    fn t_of(&self, idx: usize) -> f64 {
        let n = self.amps.len();
        if idx < n / 2 {
            idx as f64 * self.dt
        } else {
            (idx as f64 - n as f64) * self.dt
        }
    }

    /// `(1/2π)∫|A(σ+it)| dt` including the masked noise, so that
    /// `|K(y)| <= X^{-shift} (π³Y)^{-σ}` times this mass.
    pub fn l1_mass(&self) -> f64 {
        (self.amps.iter().map(|a| a.norm()).sum::<f64>() + self.noise) * self.dt / TAU
    }

    /// Direct trapezoidal evaluation at one point, with a step-doubling error estimate.
    pub fn eval_direct(&self, y: f64) -> Result<KernelValue> {
        if !(y > 0.0) {
            return Err(Error::range("y", y, "> 0"));
        }
        let big_y = y * self.x_scale;
        let v = (PI.powi(3) * big_y).ln();
        let mut full = C64::new(0.0, 0.0);
        let mut even = C64::new(0.0, 0.0);
        let mut mass = 0.0;
        for (idx, a) in self.amps.iter().enumerate() {
            let term = a * C64::from_polar(1.0, -self.t_of(idx) * v);
            full += term;
            if idx % 2 == 0 {
                even += term;
            }
            mass += a.norm();
        }
        let scale = self.dt / TAU * self.prefactor(big_y);
        let value = full * scale;
        let coarse = even * 2.0 * scale;
        let error = (value - coarse).norm() + (self.tail * mass + self.noise) * scale;
        Ok(KernelValue { value, error })
    }

    /// Tabulates the kernel on `v ∈ [v0, v0 + N·dv)`, `dv = π/T`.
    pub fn into_table(self, v0: f64) -> KernelTable {
        let n = self.amps.len();
        let mut buf: Vec<C64> = self
            .amps
            .iter()
            .enumerate()
            .map(|(idx, a)| a * C64::from_polar(self.dt / TAU, -self.t_of(idx) * v0))
            .collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        KernelTable {
            family: self.family,
            sigma: self.sigma,
            x_scale: self.x_scale,
            v0,
            dv: self.dw,
            values: buf,
            tail: self.tail,
        }
    }
}

/// The kernel tabulated in `v = log(π³·y·X)`.
#[derive(Debug, Clone)]
pub struct KernelTable {
    family: KernelFamily,
    sigma: f64,
    x_scale: f64,
    v0: f64,
    dv: f64,
    values: Vec<C64>,
    tail: f64,
}

const INTERP_POINTS: usize = 8;

impl KernelTable {
    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn tail_fraction(&self) -> f64 {
        self.tail
    }

    /// `y`-range covered, leaving a guard band against wrap-around.
    pub fn y_range(&self) -> (f64, f64) {
        let span = self.dv * self.values.len() as f64;
        let lo = self.v0 + 0.05 * span;
        let hi = self.v0 + 0.95 * span;
        let conv = |v: f64| v.exp() / (PI.powi(3) * self.x_scale);
        (conv(lo), conv(hi))
    }

    fn prefactor(&self, big_y: f64) -> f64 {
        self.x_scale.powf(-self.family.weight_shift()) * (PI.powi(3) * big_y).powf(-self.sigma)
    }

    fn raw(&self, v: f64) -> C64 {
        let pos = (v - self.v0) / self.dv;
        let base = pos.floor() as isize - (INTERP_POINTS as isize / 2 - 1);
        let n = self.values.len() as isize;
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..INTERP_POINTS as isize {
            let xi = (base + i) as f64;
            let mut w = 1.0;
            for j in 0..INTERP_POINTS as isize {
                if j != i {
                    w *= (pos - (base + j) as f64) / (xi - (base + j) as f64);
                }
            }
            acc += self.values[(base + i).rem_euclid(n) as usize] * w;
        }
        acc
    }

    /// Interpolated kernel value at `y`.
    pub fn eval(&self, y: f64) -> C64 {
        let big_y = y * self.x_scale;
        self.raw((PI.powi(3) * big_y).ln()) * self.prefactor(big_y)
    }

    /// `∫_{y_from}^{y_max} |G(y)| dy/y` over the tabulated range, by the grid samples.
    pub fn log_tail_mass(&self, y_from: f64) -> f64 {
        let (_, y_hi) = self.y_range();
        let v_from = (PI.powi(3) * y_from * self.x_scale).ln();
        let v_hi = (PI.powi(3) * y_hi * self.x_scale).ln();
        let mut acc = 0.0;
        let mut v = v_from;
        while v < v_hi {
            let big_y = v.exp() / PI.powi(3);
            acc += self.raw(v).norm() * self.prefactor(big_y) * self.dv;
            v += self.dv;
        }
        acc
    }
}

/// Contour abscissae, right of the working ones, used for decay envelopes.
const ENVELOPE_SIGMAS: [f64; 4] = [0.5, 1.0, 2.0, 3.0];

/// `|K(y)| <= mass·X^{-shift}·(π³yX)^{-σ}` for a kernel on the contour `σ`.
#[derive(Debug, Clone, Copy)]
struct DecayBound {
    sigma: f64,
    mass: f64,
}

fn decay_bounds(family: KernelFamily, weight: &BumpFunction<f64>, cfg: &KernelConfig) -> Vec<DecayBound> {
    ENVELOPE_SIGMAS
        .iter()
        .filter(|&&sigma| sigma > cfg.sigma)
        .filter_map(|&sigma| KernelSpectrum::new(family, weight, &KernelConfig { sigma, ..*cfg }).ok())
        .map(|spec| DecayBound { sigma: spec.sigma, mass: spec.l1_mass() })
        .collect()
}

/// A pair of kernel tables combined into the `±` kernels.
#[derive(Debug, Clone)]
pub struct SignedKernel {
    zero: KernelTable,
    one: KernelTable,
    bounds: [Vec<DecayBound>; 2],
}

impl SignedKernel {
    /// `G_± = (G_0 ∓ i G_1)/(2π^{3/2})` from weight `g` and Langlands parameters.
    pub fn langlands(g: &BumpFunction<f64>, params: KernelParams, cfg: &KernelConfig) -> Result<Self> {
        let v0 = -0.3 * cfg.t_max.recip() * PI * (1u64 << cfg.log2_len) as f64;
        let f0 = KernelFamily::Langlands { params, ell: 0 };
        let f1 = KernelFamily::Langlands { params, ell: 1 };
        let zero = KernelSpectrum::new(f0, g, cfg)?.into_table(v0);
        let one = KernelSpectrum::new(f1, g, cfg)?.into_table(v0);
        Ok(Self { zero, one, bounds: [decay_bounds(f0, g, cfg), decay_bounds(f1, g, cfg)] })
    }

    /// `H_± = (H_0 ∓ i/(π³y)·H_1)/(2π^{3/2})` for the `d3` Voronoi formula.
    ///
    /// Each family runs on its own contour; `sigmas` are the abscissae for `l = 0, 1`.
    pub fn triple_divisor(h: &BumpFunction<f64>, sigmas: [f64; 2], cfg: &KernelConfig) -> Result<Self> {
        let v0 = -0.3 * cfg.t_max.recip() * PI * (1u64 << cfg.log2_len) as f64;
        let c0 = KernelConfig { sigma: sigmas[0], ..*cfg };
        let c1 = KernelConfig { sigma: sigmas[1], ..*cfg };
        let f0 = KernelFamily::TripleDivisor { l: 0 };
        let f1 = KernelFamily::TripleDivisor { l: 1 };
        let zero = KernelSpectrum::new(f0, h, &c0)?.into_table(v0);
        let one = KernelSpectrum::new(f1, h, &c1)?.into_table(v0);
        Ok(Self { zero, one, bounds: [decay_bounds(f0, h, &c0), decay_bounds(f1, h, &c1)] })
    }

    pub fn y_range(&self) -> (f64, f64) {
        let (a, b) = self.zero.y_range();
        let (c, d) = self.one.y_range();
        (a.max(c), b.min(d))
    }

    pub fn tail_fraction(&self) -> f64 {
        self.zero.tail_fraction().max(self.one.tail_fraction())
    }

    /// The first-order companion, `G_1(y)` or `H_1(y)/(π³y)`.
    fn companion(&self, y: f64) -> C64 {
        match self.one.family() {
            KernelFamily::TripleDivisor { .. } => self.one.eval(y) / (PI.powi(3) * y),
            KernelFamily::Langlands { .. } => self.one.eval(y),
        }
    }

    pub fn eval(&self, y: f64, sign: Sign) -> C64 {
        let i = C64::new(0.0, 1.0);
        let s = -(sign.value() as f64);
        (self.zero.eval(y) + i * s * self.companion(y)) / (2.0 * PI.powf(1.5))
    }

    /// Bound on `∫_{y_from}^∞ (|K_0| + |K_1|) dy/y` from contours shifted to the
    /// right; falls back to the tabulated values when no shifted contour converged.
    pub fn log_tail_mass(&self, y_from: f64) -> f64 {
        let extra = match self.one.family() {
            KernelFamily::TripleDivisor { .. } => 1.0,
            KernelFamily::Langlands { .. } => 0.0,
        };
        let envelope = |table: &KernelTable, bounds: &[DecayBound], extra: f64| -> f64 {
            let x = table.x_scale;
            let shift = x.powf(-table.family.weight_shift());
            let from_bounds = bounds
                .iter()
                .map(|b| {
                    let decay = b.sigma + extra;
                    shift * b.mass * (PI.powi(3) * x).powf(-b.sigma) * PI.powf(-3.0 * extra) * y_from.powf(-decay) / decay
                })
                .fold(f64::INFINITY, f64::min);
            if from_bounds.is_finite() {
                from_bounds
            } else {
                table.log_tail_mass(y_from) / (PI.powi(3) * y_from).powf(extra)
            }
        };
        (envelope(&self.zero, &self.bounds[0], 0.0) + envelope(&self.one, &self.bounds[1], extra)) / (2.0 * PI.powf(1.5))
    }
}

/// Writes `y, Re, Im, error` rows for the kernel at each `y`.
pub fn export_kernel_csv<W: std::io::Write>(spec: &KernelSpectrum, ys: &[f64], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Table(e.to_string());
    w.write_record(["y", "re", "im", "error"]).map_err(io)?;
    for &y in ys {
        let v = spec.eval_direct(y)?;
        w.write_record([y, v.value.re, v.value.im, v.error].map(|x| format!("{x:.17e}"))).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Table(e.to_string()))
}

/// `G_±(y)` for a single `y` by direct contour quadrature.
pub fn g_kernel(
    y: f64,
    sign: Sign,
    g: &BumpFunction<f64>,
    params: KernelParams,
    cfg: &KernelConfig,
) -> Result<KernelValue> {
    let g0 = KernelSpectrum::new(KernelFamily::Langlands { params, ell: 0 }, g, cfg)?.eval_direct(y)?;
    let g1 = KernelSpectrum::new(KernelFamily::Langlands { params, ell: 1 }, g, cfg)?.eval_direct(y)?;
    let i = C64::new(0.0, 1.0);
    let s = -(sign.value() as f64);
    let norm = 2.0 * PI.powf(1.5);
    Ok(KernelValue { value: (g0.value + i * s * g1.value) / norm, error: (g0.error + g1.error) / norm })
}

/// `G_0(y)` alone (the `ℓ = 0` component) by direct contour quadrature.
pub fn g0_kernel(y: f64, g: &BumpFunction<f64>, params: KernelParams, cfg: &KernelConfig) -> Result<KernelValue> {
    KernelSpectrum::new(KernelFamily::Langlands { params, ell: 0 }, g, cfg)?.eval_direct(y)
}

/// Leading large-`y` asymptotic of `G_0`:
/// `π⁴y ∫ g(z)·d_1·sin(6π(yz)^{1/3}) / (π³yz)^{1/3} dz`, `d_1 = -2/√(3π)`.
pub fn g0_asymptotic(y: f64, g: &BumpFunction<f64>) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::range("y", y, "> 0"));
    }
    let d1 = -2.0 / (3.0 * PI).sqrt();
    let (lo, hi) = g.support();
    let osc = 6.0 * PI * (y * hi).cbrt() - 6.0 * PI * (y * lo).cbrt();
    let pieces = (4.0 + osc / PI).ceil() as usize;
    let breaks: Vec<f64> = (0..=pieces).map(|i| lo + (hi - lo) * i as f64 / pieces as f64).collect();
    let mut f = |z: f64| g.value(z) * d1 * (6.0 * PI * (y * z).cbrt()).sin() / (PI.powi(3) * y * z).cbrt();
    // cancellation can make the integral tiny; measure against the absolute integrand
    let scale = g.integrate(|z| d1.abs() / (PI.powi(3) * y * z).cbrt());
    let abs_tol = 1e-14 * scale;
    let r = crate::numeric::quad::adaptive_from(&mut f, &breaks, abs_tol, 1e-12, 5_000_000);
    if !r.converged {
        return Err(Error::Quadrature { achieved: r.error, target: abs_tol.max(1e-12 * r.value.abs()) });
    }
    Ok(PI.powi(4) * y * r.value)
}

/// `h̃(1), h̃'(1), h̃''(1)` as log-moments `∫ h(x) (log x)^k dx`.
pub fn log_moments(h: &BumpFunction<f64>) -> Result<[f64; 3]> {
    let mut out = [0.0; 3];
    for (k, o) in out.iter_mut().enumerate() {
        *o = mellin_log_moment(h, C64::new(1.0, 0.0), k as u32, 1e-13)?.value.re;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::gauss_legendre_rule;

    fn small_cfg(sigma: f64) -> KernelConfig {
        KernelConfig { sigma, t_max: 3000.0, log2_len: 18, tail_tol: 1e-8 }
    }

    #[test]
    fn direct_contour_matches_pointwise_quadrature() {
        // Independent evaluation: Mellin transform by fixed Gauss–Legendre panels at
        // each t, contour by composite Gauss–Legendre in t.
        let g = BumpFunction::canonical(1.0, 2.0).unwrap();
        let fam = KernelFamily::Langlands { params: KernelParams::trivial(), ell: 0 };
        let sigma = -0.5;
        let spec = KernelSpectrum::new(fam, &g, &small_cfg(sigma)).unwrap();
        let rule = gauss_legendre_rule::<f64>(20);
        let mellin_at = |s: C64| -> C64 {
            let panels = 8 + (0.25 * s.im.abs()) as usize;
            rule.composite(1.0, 2.0, panels, |x| ((s - 1.0) * x.ln()).exp() * g.value(x))
        };
        let mut weighted = Vec::with_capacity(6000 * 20);
        for i in 0..6000 {
            let (a, h) = (-1500.0 + 0.5 * i as f64, 0.25);
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                let t = a + h * (x + 1.0);
                let s = C64::new(sigma, t);
                weighted.push((t, mellin_at(-s) * fam.log_ratio(s).exp() * (w * h)));
            }
        }
        for y in [0.05, 1.0, 7.0] {
            let v = spec.eval_direct(y).unwrap().value;
            let lny = (PI.powi(3) * y).ln();
            let oracle: C64 = weighted.iter().map(|&(t, a)| (-C64::new(sigma, t) * lny).exp() * a).sum::<C64>() / TAU;
            assert!((v - oracle).norm() < 1e-8 * (1.0 + oracle.norm()), "y={y}: {v} vs {oracle}");
        }
    }

    #[test]
    fn contour_shift_invariance() {
        let g = BumpFunction::canonical(1.0, 2.0).unwrap();
        let p = KernelParams::trivial();
        for (s0, s1) in [(-0.5, 0.0), (0.0, 0.5)] {
            for y in [0.3, 20.0, 500.0] {
                // from σ = 0 on the gamma ratio grows at least like |t|^{3/2}, so the contour runs further
                let cfg = |s: f64| if s >= 0.0 { KernelConfig { t_max: 6000.0, log2_len: 19, ..small_cfg(s) } } else { small_cfg(s) };
                let a = g_kernel(y, Sign::Plus, &g, p, &cfg(s0)).unwrap();
                let b = g_kernel(y, Sign::Plus, &g, p, &cfg(s1)).unwrap();
                let tol = 1e-8 * (1.0 + a.value.norm()) + a.error + b.error;
                assert!((a.value - b.value).norm() < tol, "σ={s0} y={y}: {} vs {}", a.value, b.value);
            }
        }
    }

    #[test]
    fn table_matches_direct() {
        let g = BumpFunction::canonical(1.0, 2.0).unwrap();
        let cfg = small_cfg(-0.5);
        let fam = KernelFamily::Langlands { params: KernelParams::trivial(), ell: 1 };
        let spec = KernelSpectrum::new(fam, &g, &cfg).unwrap();
        let direct: Vec<C64> = [0.01, 0.7, 33.0, 2500.0].iter().map(|&y| spec.eval_direct(y).unwrap().value).collect();
        let table = spec.into_table(-100.0);
        for (&y, d) in [0.01, 0.7, 33.0, 2500.0].iter().zip(direct) {
            let t = table.eval(y);
            assert!((t - d).norm() < 1e-9 * (1.0 + d.norm()), "y={y}: {t} vs {d}");
        }
    }

    #[test]
    fn two_families_describe_the_same_kernel() {
        // G_1(y) = H_1(y)/(π³y) after moving the contour by one
        let g = BumpFunction::canonical(1.0, 2.0).unwrap();
        let a = SignedKernel::langlands(&g, KernelParams::trivial(), &small_cfg(-0.5)).unwrap();
        let b = SignedKernel::triple_divisor(&g, [-0.5, -1.5], &small_cfg(0.0)).unwrap();
        for y in [0.02, 1.5, 40.0, 900.0] {
            for s in [Sign::Plus, Sign::Minus] {
                let (u, v) = (a.eval(y, s), b.eval(y, s));
                assert!((u - v).norm() < 1e-8 * (1.0 + u.norm()), "y={y}: {u} vs {v}");
            }
        }
    }

    #[test]
    fn rejects_contour_left_of_poles() {
        let g = BumpFunction::canonical(1.0, 2.0).unwrap();
        let fam = KernelFamily::TripleDivisor { l: 0 };
        assert!(KernelSpectrum::new(fam, &g, &small_cfg(-1.2)).is_err());
    }

    #[test]
    fn leading_asymptotic_tracks_contour_value() {
        // the printed leading term and the contour value differ by a y-independent factor
        let g = BumpFunction::canonical(1.0, 2.0).unwrap();
        let cfg = small_cfg(-0.5);
        let ratio = |y: f64| g0_asymptotic(y, &g).unwrap() / g0_kernel(y, &g, KernelParams::trivial(), &cfg).unwrap().value.re;
        let (a, b) = (ratio(1e4), ratio(1e5));
        assert!((a / b - 1.0).abs() < 1e-2, "{a} {b}");
    }

    #[test]
    fn csv_export_round_trips() {
        let g = BumpFunction::canonical(1.0, 2.0).unwrap();
        let fam = KernelFamily::Langlands { params: KernelParams::trivial(), ell: 0 };
        let spec = KernelSpectrum::new(fam, &g, &small_cfg(-0.5)).unwrap();
        let mut buf = Vec::new();
        export_kernel_csv(&spec, &[0.5, 2.0], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("y,re,im,error"));
        let row: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
        let direct = spec.eval_direct(0.5).unwrap();
        assert_eq!(row, vec![0.5, direct.value.re, direct.value.im, direct.error]);
    }
}

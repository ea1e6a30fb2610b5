//! Quadrature: Gauss–Legendre rules, adaptive Gauss–Kronrod, Filon–Legendre.

use super::Real;
use num_complex::Complex;
use std::ops::{Add, Mul, Sub};

/// Values a quadrature can accumulate: real or complex over a [`Real`] scalar.
pub trait QuadValue<T: Real>:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<T, Output = Self> + Send + Sync
{
    fn zero() -> Self;
    fn magnitude(self) -> T;
}

impl<T: Real> QuadValue<T> for T {
    fn zero() -> Self {
        T::zero()
    }
    fn magnitude(self) -> T {
        self.abs()
    }
}

impl<T: Real> QuadValue<T> for Complex<T> {
    fn zero() -> Self {
        Complex::new(T::zero(), T::zero())
    }
    fn magnitude(self) -> T {
        self.norm()
    }
}

/// Outcome of a quadrature with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T, V = T> {
    pub value: V,
    pub error: T,
    pub evaluations: usize,
    pub converged: bool,
}

/// Nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct QuadRule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

/// Legendre polynomial `P_n(x)` and its derivative.
fn legendre_with_derivative<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    if n == 0 {
        return (p0, T::zero());
    }
    for k in 2..=n {
        let kf = T::from_usize_lossy(k);
        let p2 = ((kf + kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = T::from_usize_lossy(n);
    let dp = nf * (x * p1 - p0) / (x * x - T::one());
    (p1, dp)
}

/// `n`-point Gauss–Legendre rule by Newton iteration on Chebyshev guesses.
pub fn gauss_legendre_rule<T: Real>(n: usize) -> QuadRule<T> {
    assert!(n >= 1, "need at least one node");
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let nf = T::from_usize_lossy(n);
    let eps = T::epsilon() * T::lit(4.0);
    for i in 0..n.div_ceil(2) {
        let mut x = (T::PI() * (T::from_usize_lossy(i) + T::lit(0.75)) / (nf + T::lit(0.5))).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x = x - dx;
            if dx.abs() <= eps {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = T::lit(2.0) / ((T::one() - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = T::zero();
    }
    QuadRule { nodes, weights }
}

impl<T: Real> QuadRule<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Applies the rule on `[a, b]`.
    pub fn integrate<V: QuadValue<T>>(&self, a: T, b: T, mut f: impl FnMut(T) -> V) -> V {
        let half = (b - a) * T::lit(0.5);
        let mid = (a + b) * T::lit(0.5);
        let mut acc = V::zero();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + f(mid + half * x) * w;
        }
        acc * half
    }

    /// Composite rule on `pieces` equal panels of `[a, b]`.
    pub fn composite<V: QuadValue<T>>(
        &self,
        a: T,
        b: T,
        pieces: usize,
        mut f: impl FnMut(T) -> V,
    ) -> V {
        let h = (b - a) / T::from_usize_lossy(pieces);
        let mut acc = V::zero();
        for k in 0..pieces {
            let lo = a + h * T::from_usize_lossy(k);
            acc = acc + self.integrate(lo, lo + h, &mut f);
        }
        acc
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<T: Real, V: QuadValue<T>>(a: T, b: T, f: &mut impl FnMut(T) -> V) -> (V, T) {
    let half = (b - a) * T::lit(0.5);
    let mid = (a + b) * T::lit(0.5);
    let fc = f(mid);
    let mut kron = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = half * T::lit(XGK[j]);
        let pair = f(mid - dx) + f(mid + dx);
        kron = kron + pair * T::lit(WGK[j]);
        if j % 2 == 1 {
            gauss = gauss + pair * T::lit(WG[j / 2]);
        }
    }
    let err = (kron - gauss).magnitude() * half.abs();
    (kron * half, err)
}

/// Adaptive 7/15-point Gauss–Kronrod on `[a, b]`.
///
/// Splits the interval with the largest error estimate until the total error
/// falls below `max(abs_tol, rel_tol·|value|)` or `max_evals` is exhausted.
pub fn adaptive<T: Real, V: QuadValue<T>>(
    mut f: impl FnMut(T) -> V,
    a: T,
    b: T,
    abs_tol: T,
    rel_tol: T,
    max_evals: usize,
) -> QuadResult<T, V> {
    adaptive_from(&mut f, &[a, b], abs_tol, rel_tol, max_evals)
}

/// As [`adaptive`], starting from the given breakpoints.
pub fn adaptive_from<T: Real, V: QuadValue<T>>(
    f: &mut impl FnMut(T) -> V,
    breaks: &[T],
    abs_tol: T,
    rel_tol: T,
    max_evals: usize,
) -> QuadResult<T, V> {
    let mut segs: Vec<(T, T, V, T)> = breaks
        .windows(2)
        .map(|w| {
            let (v, e) = gk15(w[0], w[1], f);
            (w[0], w[1], v, e)
        })
        .collect();
    let mut evals = 15 * segs.len();
    loop {
        let mut total = V::zero();
        let mut err = T::zero();
        let mut worst = 0;
        for (i, s) in segs.iter().enumerate() {
            total = total + s.2;
            err = err + s.3;
            if s.3 > segs[worst].3 {
                worst = i;
            }
        }
        let target = abs_tol.max(rel_tol * total.magnitude());
        let floor = T::epsilon() * T::lit(50.0) * total.magnitude();
        if err <= target || err <= floor {
            return QuadResult { value: total, error: err, evaluations: evals, converged: true };
        }
        if evals + 30 > max_evals {
            return QuadResult { value: total, error: err, evaluations: evals, converged: false };
        }
        let (lo, hi, _, _) = segs[worst];
        let mid = (lo + hi) * T::lit(0.5);
        let (v1, e1) = gk15(lo, mid, f);
        let (v2, e2) = gk15(mid, hi, f);
        evals += 30;
        segs[worst] = (lo, mid, v1, e1);
        segs.push((mid, hi, v2, e2));
    }
}

/// Spherical Bessel functions `j_0(k) .. j_{n-1}(k)`.
pub fn spherical_bessel<T: Real>(n: usize, k: T) -> Vec<T> {
    let mut out = vec![T::zero(); n];
    if n == 0 {
        return out;
    }
    let ak = k.abs();
    if ak == T::zero() {
        out[0] = T::one();
        return out;
    }
    let (s, c) = ak.sin_cos();
    if ak >= T::from_usize_lossy(n) {
        out[0] = s / ak;
        if n > 1 {
            out[1] = s / (ak * ak) - c / ak;
        }
        for l in 1..n.saturating_sub(1) {
            let lf = T::from_usize_lossy(2 * l + 1);
            out[l + 1] = lf / ak * out[l] - out[l - 1];
        }
    } else {
        // Miller's downward recurrence normalised by Σ (2l+1) j_l² = 1
        let start = n + 20 + (ak.to_f64().unwrap_or(0.0) as usize);
        let mut hi = T::zero();
        let mut cur = T::lit(1e-30);
        let mut tmp = vec![T::zero(); n];
        let mut norm = T::zero();
        for l in (0..=start).rev() {
            let lf = T::from_usize_lossy(2 * l + 3);
            let lo = lf / ak * cur - hi;
            // lo is j_l, cur is j_{l+1}
            hi = cur;
            cur = lo;
            if l < n {
                tmp[l] = cur;
            }
            norm = norm + T::from_usize_lossy(2 * l + 1) * cur * cur;
            if cur.abs() > T::lit(1e100) {
                let r = T::lit(1e-100);
                cur = cur * r;
                hi = hi * r;
                norm = norm * r * r;
                for v in tmp.iter_mut() {
                    *v = *v * r;
                }
            }
        }
        let mut scale = norm.sqrt().recip();
        let j0 = s / ak;
        let j1 = s / (ak * ak) - c / ak;
        let reference = if j0.abs() > j1.abs() { (j0, tmp[0]) } else { (j1, if n > 1 { tmp[1] } else { hi }) };
        if (reference.0 < T::zero()) != (reference.1 < T::zero()) {
            scale = -scale;
        }
        for (o, t) in out.iter_mut().zip(tmp) {
            *o = t * scale;
        }
    }
    if k < T::zero() {
        for (l, v) in out.iter_mut().enumerate() {
            if l % 2 == 1 {
                *v = -*v;
            }
        }
    }
    out
}

/// Filon–Legendre quadrature of `∫_a^b amp(x)·exp(i·phase(x)) dx`.
///
/// The interval is cut into `panels`; on each the phase is linearised about the
/// midpoint, the smooth remainder `amp·exp(i·(phase - linear))` is expanded in
/// `order` Legendre polynomials, and the linear oscillation is integrated exactly
/// through `∫ P_l(t) e^{ikt} dt = 2 i^l j_l(k)`. The error estimate is the size
/// of the two highest Legendre coefficients.
pub fn filon_legendre<T: Real>(
    mut amp: impl FnMut(T) -> T,
    mut phase: impl FnMut(T) -> T,
    mut dphase: impl FnMut(T) -> T,
    a: T,
    b: T,
    panels: usize,
    order: usize,
) -> QuadResult<T, Complex<T>> {
    let rule = gauss_legendre_rule::<T>(order + 4);
    let h_full = (b - a) / T::from_usize_lossy(panels);
    let mut total = Complex::new(T::zero(), T::zero());
    let mut err = T::zero();
    let mut evals = 0;
    let mut p_vals = vec![T::zero(); order];
    for pnl in 0..panels {
        let lo = a + h_full * T::from_usize_lossy(pnl);
        let h = h_full * T::lit(0.5);
        let c = lo + h;
        let phi_c = phase(c);
        let slope = dphase(c);
        let mut coeffs = vec![Complex::new(T::zero(), T::zero()); order];
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            let x = c + h * t;
            let r = phase(x) - phi_c - slope * h * t;
            let g = Complex::from_polar(amp(x), r);
            evals += 1;
            // Legendre values by recurrence
            p_vals[0] = T::one();
            if order > 1 {
                p_vals[1] = t;
            }
            for l in 2..order {
                let lf = T::from_usize_lossy(l);
                p_vals[l] = ((lf + lf - T::one()) * t * p_vals[l - 1] - (lf - T::one()) * p_vals[l - 2]) / lf;
            }
            for l in 0..order {
                coeffs[l] = coeffs[l] + g * (w * p_vals[l]);
            }
        }
        let k = slope * h;
        let jl = spherical_bessel(order, k);
        let mut panel = Complex::new(T::zero(), T::zero());
        let mut ipow = Complex::new(T::one(), T::zero());
        let i = Complex::new(T::zero(), T::one());
        for l in 0..order {
            let al = coeffs[l] * (T::from_usize_lossy(2 * l + 1) * T::lit(0.5));
            coeffs[l] = al;
            panel = panel + al * ipow * (T::lit(2.0) * jl[l]);
            ipow = ipow * i;
        }
        total = total + panel * Complex::from_polar(h, phi_c);
        let tail = coeffs[order - 1].norm() + if order > 1 { coeffs[order - 2].norm() } else { T::zero() };
        err = err + tail * T::lit(2.0) * h.abs();
    }
    QuadResult { value: total, error: err, evaluations: evals, converged: true }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let rule = gauss_legendre_rule::<f64>(10);
        // exact up to degree 19
        for d in 0..20 {
            let v: f64 = rule.integrate(0.0, 1.0, |x| x.powi(d));
            assert!((v - 1.0 / (d as f64 + 1.0)).abs() < 1e-14, "degree {d}");
        }
        let sum: f64 = rule.weights.iter().sum();
        assert!((sum - 2.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_in_single_precision() {
        let rule = gauss_legendre_rule::<f32>(8);
        let v: f32 = rule.integrate(0.0, std::f32::consts::PI, |x| x.sin());
        assert!((v - 2.0).abs() < 1e-5);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let r = adaptive(|x: f64| x.sqrt().recip(), 0.0, 1.0, 1e-10, 1e-12, 200_000);
        assert!((r.value - 2.0).abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn adaptive_complex_oscillation() {
        let w = 200.0;
        let r = adaptive(|x: f64| Complex::from_polar(1.0, w * x), 0.0, 1.0, 1e-13, 1e-13, 100_000);
        let exact = (Complex::from_polar(1.0, w) - 1.0) / Complex::new(0.0, w);
        assert!((r.value - exact).norm() < 1e-11);
        assert!(r.converged);
    }

    #[test]
    fn spherical_bessel_against_closed_forms() {
        for k in [1e-3, 0.3, 2.0, 7.5, 40.0, -3.0] {
            let j = spherical_bessel(6, k);
            let (s, c) = f64::sin_cos(k);
            let j0 = s / k;
            let j1 = s / (k * k) - c / k;
            let j2 = (3.0 / (k * k) - 1.0) * s / k - 3.0 * c / (k * k);
            assert!((j[0] - j0).abs() < 1e-12, "k={k}");
            assert!((j[1] - j1).abs() < 1e-12, "k={k}");
            assert!((j[2] - j2).abs() < 1e-9 * (1.0 + j2.abs()), "k={k} {} {}", j[2], j2);
        }
    }

    #[test]
    fn filon_matches_adaptive_on_chirp() {
        let amp = |x: f64| (-(x - 1.5).powi(2)).exp();
        let phase = |x: f64| 300.0 * x + 20.0 * x * x;
        let dphase = |x: f64| 300.0 + 40.0 * x;
        let f = filon_legendre(amp, phase, dphase, 1.0, 2.0, 8, 16);
        let g = adaptive(|x| Complex::from_polar(amp(x), phase(x)), 1.0, 2.0, 1e-14, 1e-13, 400_000);
        assert!((f.value - g.value).norm() < 1e-11, "{:?} {:?}", f, g);
    }

    proptest! {
        #[test]
        fn filon_exact_for_linear_phase_polynomial_amplitude(w in -500.0f64..500.0, c0 in -2.0f64..2.0, c1 in -2.0f64..2.0) {
            // ∫_0^1 (c0 + c1 x) e^{iwx} dx
            let f = filon_legendre(|x| c0 + c1 * x, |x| w * x, |_| w, 0.0, 1.0, 1, 6);
            let iw = Complex::new(0.0, w);
            let exact = if w.abs() < 1e-9 {
                Complex::new(c0 + 0.5 * c1, 0.0)
            } else {
                let e = Complex::from_polar(1.0, w);
                (e * (c0 + c1) - c0) / iw - (e - 1.0) * c1 / (iw * iw)
            };
            prop_assert!((f.value - exact).norm() < 1e-10);
        }
    }
}

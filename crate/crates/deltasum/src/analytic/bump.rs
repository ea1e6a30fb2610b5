//! Smooth compactly supported weights with exact derivatives.
//!
//! Derivatives come from truncated Taylor arithmetic (jets), so every order up
//! to [`MAX_ORDER`] is exact up to rounding.

use crate::error::{Error, Result};
use crate::numeric::{gauss_legendre_rule, Real};

/// Highest derivative order tracked by a [`BumpFunction`].
pub const MAX_ORDER: usize = 6;

/// Grid used to record the `x^j f^(j)` bounds at construction.
const BOUND_GRID: usize = 4096;

/// Truncated Taylor series `Σ c_k (x - x0)^k`.
#[derive(Debug, Clone, PartialEq)]
struct Jet<T> {
    c: Vec<T>,
}

impl<T: Real> Jet<T> {
    fn constant(v: T, n: usize) -> Self {
        let mut c = vec![T::zero(); n + 1];
        c[0] = v;
        Self { c }
    }

    /// `a + b (x - x0)`.
    fn affine(a: T, b: T, n: usize) -> Self {
        let mut j = Self::constant(a, n);
        if n >= 1 {
            j.c[1] = b;
        }
        j
    }

    fn mul(&self, o: &Self) -> Self {
        let n = self.c.len();
        let mut c = vec![T::zero(); n];
        for (i, &a) in self.c.iter().enumerate() {
            for (j, &b) in o.c.iter().enumerate().take(n - i) {
                c[i + j] = c[i + j] + a * b;
            }
        }
        Self { c }
    }

    fn add(&self, o: &Self) -> Self {
        Self { c: self.c.iter().zip(&o.c).map(|(&a, &b)| a + b).collect() }
    }

    fn scale(&self, s: T) -> Self {
        Self { c: self.c.iter().map(|&a| a * s).collect() }
    }

    fn recip(&self) -> Self {
        let n = self.c.len();
        let inv0 = self.c[0].recip();
        let mut r = vec![T::zero(); n];
        r[0] = inv0;
        for k in 1..n {
            let mut s = T::zero();
            for i in 1..=k {
                s = s + self.c[i] * r[k - i];
            }
            r[k] = -s * inv0;
        }
        Self { c: r }
    }

    fn exp(&self) -> Self {
        let n = self.c.len();
        let mut e = vec![T::zero(); n];
        e[0] = self.c[0].exp();
        for k in 1..n {
            let mut s = T::zero();
            for i in 1..=k {
                s = s + T::from_usize_lossy(i) * self.c[i] * e[k - i];
            }
            e[k] = s / T::from_usize_lossy(k);
        }
        Self { c: e }
    }

    /// `f^(k)(x0) = k!·c_k`.
    fn derivatives(&self) -> Vec<T> {
        let mut fact = T::one();
        self.c
            .iter()
            .enumerate()
            .map(|(k, &v)| {
                if k > 0 {
                    fact = fact * T::from_usize_lossy(k);
                }
                v * fact
            })
            .collect()
    }
}

/// `exp(-1/τ)` for `τ > 0`, zero otherwise.
fn psi_jet<T: Real>(tau: &Jet<T>) -> Jet<T> {
    let n = tau.c.len() - 1;
    if tau.c[0] <= T::zero() {
        return Jet::constant(T::zero(), n);
    }
    tau.recip().scale(-T::one()).exp()
}

/// Smooth step: 0 for `τ <= 0`, 1 for `τ >= 1`.
fn step_jet<T: Real>(tau: &Jet<T>) -> Jet<T> {
    let n = tau.c.len() - 1;
    if tau.c[0] <= T::zero() {
        return Jet::constant(T::zero(), n);
    }
    if tau.c[0] >= T::one() {
        return Jet::constant(T::one(), n);
    }
    let a = psi_jet(tau);
    let one_minus = Jet::constant(T::one(), n).add(&tau.scale(-T::one()));
    let b = psi_jet(&one_minus);
    a.mul(&a.add(&b).recip())
}

fn step_value<T: Real>(tau: T) -> T {
    if tau <= T::zero() {
        return T::zero();
    }
    if tau >= T::one() {
        return T::one();
    }
    let a = (-tau.recip()).exp();
    let b = (-(T::one() - tau).recip()).exp();
    a / (a + b)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shape<T> {
    /// `exp(1 - 1/(1 - t²))` on the rescaled support, peak 1 at the centre
    Bump,
    /// identically 1 on `[inner_lo, inner_hi]`
    Plateau { inner_lo: T, inner_hi: T },
}

/// Smooth weight supported on `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpFunction<T> {
    lo: T,
    hi: T,
    shape: Shape<T>,
    amplitude: T,
    bounds: Vec<T>,
}

impl<T: Real> BumpFunction<T> {
    /// The canonical bump `exp(1 - 1/(1 - t²))`, `t` the affine image of `[lo, hi]` in `[-1, 1]`.
    pub fn canonical(lo: T, hi: T) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::Precondition(format!("empty support [{lo}, {hi}]")));
        }
        Ok(Self::finish(lo, hi, Shape::Bump))
    }

    /// Plateau bump: 1 on `[inner_lo, inner_hi]`, smooth steps down to 0 at `lo` and `hi`.
    pub fn plateau(lo: T, inner_lo: T, inner_hi: T, hi: T) -> Result<Self> {
        if !(lo < inner_lo && inner_lo <= inner_hi && inner_hi < hi) {
            return Err(Error::Precondition(format!(
                "plateau needs lo < inner_lo <= inner_hi < hi, got {lo}, {inner_lo}, {inner_hi}, {hi}"
            )));
        }
        Ok(Self::finish(lo, hi, Shape::Plateau { inner_lo, inner_hi }))
    }

    fn finish(lo: T, hi: T, shape: Shape<T>) -> Self {
        let mut b = Self { lo, hi, shape, amplitude: T::one(), bounds: Vec::new() };
        b.bounds = b.measure_bounds(BOUND_GRID, T::lit(1.05));
        b
    }

    fn measure_bounds(&self, grid: usize, slack: T) -> Vec<T> {
        let mut out = vec![T::zero(); MAX_ORDER + 1];
        for i in 0..=grid {
            let x = self.lo + (self.hi - self.lo) * T::from_usize_lossy(i) / T::from_usize_lossy(grid);
            let d = self.derivatives(x, MAX_ORDER);
            let mut xp = T::one();
            for (j, &dj) in d.iter().enumerate() {
                out[j] = out[j].max((xp * dj).abs());
                xp = xp * x;
            }
        }
        out.into_iter().map(|v| v * slack).collect()
    }

    pub fn support(&self) -> (T, T) {
        (self.lo, self.hi)
    }

    pub fn value(&self, x: T) -> T {
        if x <= self.lo || x >= self.hi {
            return T::zero();
        }
        let v = match self.shape {
            Shape::Bump => {
                let half = (self.hi - self.lo) * T::lit(0.5);
                let t = (x - self.lo) / half - T::one();
                (T::one() - (T::one() - t * t).recip()).exp()
            }
            Shape::Plateau { inner_lo, inner_hi } => {
                step_value((x - self.lo) / (inner_lo - self.lo))
                    * step_value((self.hi - x) / (self.hi - inner_hi))
            }
        };
        v * self.amplitude
    }

    /// `f(x), f'(x), …, f^(order)(x)`.
    pub fn derivatives(&self, x: T, order: usize) -> Vec<T> {
        if x <= self.lo || x >= self.hi {
            return vec![T::zero(); order + 1];
        }
        let jet = match self.shape {
            Shape::Bump => {
                let half = (self.hi - self.lo) * T::lit(0.5);
                let t = Jet::affine((x - self.lo) / half - T::one(), half.recip(), order);
                let gap = Jet::constant(T::one(), order).add(&t.mul(&t).scale(-T::one()));
                gap.recip().scale(-T::one()).add(&Jet::constant(T::one(), order)).exp()
            }
            Shape::Plateau { inner_lo, inner_hi } => {
                let w1 = inner_lo - self.lo;
                let w2 = self.hi - inner_hi;
                let rise = step_jet(&Jet::affine((x - self.lo) / w1, w1.recip(), order));
                let fall = step_jet(&Jet::affine((self.hi - x) / w2, -w2.recip(), order));
                rise.mul(&fall)
            }
        };
        jet.derivatives().into_iter().map(|v| v * self.amplitude).collect()
    }

    /// Stored constants `C_j >= sup |x^j f^(j)(x)|`, `j <= MAX_ORDER`.
    pub fn derivative_bounds(&self) -> &[T] {
        &self.bounds
    }

    /// `x ↦ f(x / factor)`, supported on `[factor·lo, factor·hi]`.
    pub fn dilate(&self, factor: T) -> Result<Self> {
        if !(factor > T::zero()) {
            return Err(Error::Precondition("dilation factor must be positive".into()));
        }
        let shape = match self.shape {
            Shape::Bump => Shape::Bump,
            Shape::Plateau { inner_lo, inner_hi } => Shape::Plateau { inner_lo: inner_lo * factor, inner_hi: inner_hi * factor },
        };
        let mut b = Self { lo: self.lo * factor, hi: self.hi * factor, shape, amplitude: self.amplitude, bounds: Vec::new() };
        b.bounds = b.measure_bounds(BOUND_GRID, T::lit(1.05));
        Ok(b)
    }

    /// `c·f`.
    pub fn scaled(&self, c: T) -> Self {
        let mut b = self.clone();
        b.amplitude = b.amplitude * c;
        b.bounds = b.bounds.iter().map(|&v| v * c.abs()).collect();
        b
    }

    /// `∫ f` by composite Gauss–Legendre.
    pub fn integral(&self) -> T {
        self.integrate(|_| T::one())
    }

    /// `∫ f(x)·k(x) dx` by composite Gauss–Legendre over the support.
    pub fn integrate(&self, mut k: impl FnMut(T) -> T) -> T {
        let rule = gauss_legendre_rule::<T>(20);
        rule.composite(self.lo, self.hi, 64, |x| self.value(x) * k(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_values() {
        let b = BumpFunction::canonical(1.0f64, 2.0).unwrap();
        assert_eq!(b.value(1.5), 1.0);
        assert_eq!(b.value(1.0), 0.0);
        assert_eq!(b.value(2.5), 0.0);
        assert!(b.value(1.999_999) >= 0.0 && b.value(1.999_999) < 1e-100);
        assert!(BumpFunction::canonical(2.0f64, 1.0).is_err());
    }

    #[test]
    fn scalar_value_agrees_with_jet() {
        let shapes = [
            BumpFunction::canonical(1.0f64, 2.0).unwrap(),
            BumpFunction::plateau(0.5f64, 1.0, 2.0, 3.0).unwrap(),
        ];
        for b in &shapes {
            for i in 0..=400 {
                let x = 0.4 + 2.7 * i as f64 / 400.0;
                let (v, j) = (b.value(x), b.derivatives(x, 0)[0]);
                assert!((v - j).abs() <= 1e-15 * (1.0 + j.abs()), "x={x}: {v} vs {j}");
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let shapes = [
            BumpFunction::canonical(1.0f64, 2.0).unwrap(),
            BumpFunction::plateau(0.5f64, 1.0, 2.0, 3.0).unwrap(),
            BumpFunction::plateau(-2.0f64, -1.0, 1.0, 2.0).unwrap(),
        ];
        for b in &shapes {
            let (lo, hi) = b.support();
            for i in 1..40 {
                let x = lo + (hi - lo) * i as f64 / 40.0;
                let d = b.derivatives(x, 3);
                let h = 1e-5;
                for k in 0..3 {
                    let fd = (b.derivatives(x + h, k)[k] - b.derivatives(x - h, k)[k]) / (2.0 * h);
                    assert!((fd - d[k + 1]).abs() < 1e-4 * (1.0 + d[k + 1].abs()), "x={x} k={k}: {fd} vs {}", d[k + 1]);
                }
            }
        }
    }

    #[test]
    fn plateau_is_flat_inside() {
        let v = BumpFunction::plateau(0.5f64, 1.0, 2.0, 3.0).unwrap();
        for x in [1.0, 1.3, 2.0] {
            let d = v.derivatives(x, 4);
            assert_eq!(d[0], 1.0);
            assert!(d[1..].iter().all(|&y| y == 0.0));
        }
        assert!(v.value(0.75) > 0.0 && v.value(0.75) < 1.0);
    }

    #[test]
    fn derivative_bounds_hold_on_independent_grid() {
        let shapes = [
            BumpFunction::canonical(1.0f64, 2.0).unwrap(),
            BumpFunction::plateau(0.5f64, 1.0, 2.0, 3.0).unwrap(),
            BumpFunction::canonical(1000.0f64, 2000.0).unwrap(),
        ];
        for b in &shapes {
            let (lo, hi) = b.support();
            let bounds = b.derivative_bounds();
            for i in 0..1000 {
                let x = lo + (hi - lo) * (i as f64 + 0.37) / 1000.0;
                let d = b.derivatives(x, 4);
                for j in 0..=4 {
                    assert!((x.powi(j as i32) * d[j]).abs() <= bounds[j], "j={j} x={x}");
                }
            }
        }
    }

    #[test]
    fn dilation_and_scaling() {
        let b = BumpFunction::canonical(1.0f64, 2.0).unwrap();
        let d = b.dilate(10.0).unwrap();
        assert_eq!(d.support(), (10.0, 20.0));
        assert!((d.value(13.7) - b.value(1.37)).abs() < 1e-15);
        assert!((d.integral() - 10.0 * b.integral()).abs() < 1e-12);
        assert!((b.scaled(-2.0).value(1.4) + 2.0 * b.value(1.4)).abs() < 1e-15);
    }

    #[test]
    fn single_precision_instance() {
        let b = BumpFunction::canonical(1.0f32, 2.0).unwrap();
        assert!((b.value(1.5) - 1.0).abs() < 1e-6);
        assert!(b.integral() > 0.0);
    }
}

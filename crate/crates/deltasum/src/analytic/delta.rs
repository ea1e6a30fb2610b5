//! The smooth delta-symbol expansion
//! `δ(n) = Σ_q Σ*_{a mod q} e(an/q)·Δ_q(n)`, with
//! `Δ_q(u) = Σ_r (qr)^{-1}·(w(qr) - w(|u|/(qr)))` and a weight `w` on `[Q, 2Q]`
//! normalised by `Σ_c w(c) = 1`.

use super::bump::BumpFunction;
use crate::arith::factorize;
use crate::error::{Error, Result};
use crate::expsum::ramanujan_sum;

#[derive(Debug, Clone)]
pub struct DeltaExpansion {
    big_q: f64,
    shape: BumpFunction<f64>,
    norm: f64,
}

impl DeltaExpansion {
    /// Expansion at scale `Q` with the plateau bump rising on `[Q, 5Q/4]`, flat to
    /// `7Q/4` and falling to `2Q`.
    pub fn new(big_q: f64) -> Result<Self> {
        if !(big_q >= 1.0) {
            return Err(Error::range("Q", big_q, ">= 1"));
        }
        Self::with_shape(big_q, BumpFunction::plateau(big_q, 1.25 * big_q, 1.75 * big_q, 2.0 * big_q)?)
    }

    /// Expansion with a caller supplied shape, which must live in `[Q, 2Q]`.
    pub fn with_shape(big_q: f64, shape: BumpFunction<f64>) -> Result<Self> {
        let (lo, hi) = shape.support();
        if lo < big_q || hi > 2.0 * big_q {
            return Err(Error::Precondition(format!("weight support [{lo}, {hi}] must lie in [Q, 2Q] with Q = {big_q}")));
        }
        let norm: f64 = (lo.ceil() as u64..=hi.floor() as u64).map(|c| shape.value(c as f64)).sum();
        if norm <= 0.0 {
            return Err(Error::Precondition("weight vanishes on every integer".into()));
        }
        Ok(Self { big_q, shape, norm })
    }

    pub fn scale(&self) -> f64 {
        self.big_q
    }

    /// Largest modulus with a non-zero contribution for `|u| <= 2Q²`.
    pub fn max_modulus(&self) -> u64 {
        self.shape.support().1.floor() as u64
    }

    /// The normalised weight `w(x)`.
    pub fn weight(&self, x: f64) -> f64 {
        self.shape.value(x) / self.norm
    }

    /// `Δ_q(u)` for real `u`.
    pub fn delta_q(&self, q: u64, u: f64) -> f64 {
        // each half only sees the moduli r whose argument lands in the support
        let qf = q as f64;
        let (lo, hi) = self.shape.support();
        let span = |a: f64, b: f64| (a.ceil().max(1.0) as u64)..=(b.floor().max(0.0) as u64);
        let mut acc = 0.0;
        for r in span(lo / qf, hi / qf) {
            let c = qf * r as f64;
            acc += self.weight(c) / c;
        }
        let n = u.abs();
        if n > 0.0 {
            for r in span(n / (qf * hi), n / (qf * lo)) {
                let c = qf * r as f64;
                acc -= self.weight(n / c) / c;
            }
        }
        acc
    }

    /// `δ(n) = Σ_q c_q(n)·Δ_q(n)`, which should be 1 at `n = 0` and 0 otherwise.
    pub fn delta_eval(&self, n: i64) -> Result<f64> {
        let q_max = self.max_modulus().max((n.unsigned_abs() as f64 / self.big_q).floor() as u64);
        let mut acc = 0.0;
        for q in 1..=q_max {
            let d = self.delta_q(q, n as f64);
            if d != 0.0 {
                acc += ramanujan_sum(n, q)? as f64 * d;
            }
        }
        Ok(acc)
    }

    /// `Σ_q φ(q)·|Δ_q(u)|`, the absolute mass of the expansion at `u`.
    pub fn absolute_mass(&self, u: f64) -> Result<f64> {
        let q_max = self.max_modulus().max((u.abs() / self.big_q).floor() as u64);
        let mut acc = 0.0;
        for q in 1..=q_max {
            acc += factorize(q)?.euler_phi() as f64 * self.delta_q(q, u).abs();
        }
        Ok(acc)
    }
}

/// `q·Q·Δ_q(N)` tabulated on `|N| <= n_max` for fast interpolation.
///
/// This is the Fourier image of the `u`-weight in the oscillatory integrals:
/// `∫ ψ(q, u) e(Nu/(qQ)) du = qQ·Δ_q(N)`.
#[derive(Debug, Clone)]
pub struct DeltaProfile {
    step: f64,
    values: Vec<f64>,
}

impl DeltaProfile {
    /// Grid spacing `qQ / points_per_scale` on `[0, n_max]`.
    pub fn new(exp: &DeltaExpansion, q: u64, n_max: f64, points_per_scale: f64) -> Result<Self> {
        if q == 0 || !(n_max > 0.0) || !(points_per_scale >= 4.0) {
            return Err(Error::Precondition("profile needs q >= 1, n_max > 0, >= 4 points per scale".into()));
        }
        let qq = q as f64 * exp.scale();
        let step = qq / points_per_scale;
        let len = (n_max / step).ceil() as usize + 4;
        if len > 50_000_000 {
            return Err(Error::MemoryBudget { requested: len as u64, limit: 50_000_000 });
        }
        let values = (0..len).map(|i| qq * exp.delta_q(q, i as f64 * step)).collect();
        Ok(Self { step, values })
    }

    /// Four-point Lagrange interpolation in `|N|`.
    pub fn eval(&self, n: f64) -> f64 {
        let x = n.abs() / self.step;
        let i = x.floor() as usize;
        let last = self.values.len() - 1;
        if i + 2 > last {
            return self.values[last];
        }
        let t = x - i as f64;
        let (p0, p1, p2, p3) = if i == 0 {
            // even function: mirror the first sample
            (self.values[1], self.values[0], self.values[1], self.values[2])
        } else {
            (self.values[i - 1], self.values[i], self.values[i + 1], self.values[i + 2])
        };
        let a = -t * (t - 1.0) * (t - 2.0) / 6.0;
        let b = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
        let c = -(t + 1.0) * t * (t - 2.0) / 2.0;
        let d = (t + 1.0) * t * (t - 1.0) / 6.0;
        a * p0 + b * p1 + c * p2 + d * p3
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::RootTable;
    use num_complex::Complex;

    #[test]
    fn weight_is_normalised() {
        let e = DeltaExpansion::new(50.0).unwrap();
        let s: f64 = (1..=200).map(|c| e.weight(c as f64)).sum();
        assert!((s - 1.0).abs() < 1e-14);
    }

    #[test]
    fn detects_zero() {
        let e = DeltaExpansion::new(50.0).unwrap();
        assert!((e.delta_eval(0).unwrap() - 1.0).abs() < 1e-9);
        for n in [-1000i64, -999, -17, -1, 1, 2, 6, 60, 97, 360, 720, 999, 1000] {
            assert!(e.delta_eval(n).unwrap().abs() < 1e-9, "n={n}");
        }
    }

    #[test]
    fn direct_exponential_sums_agree() {
        // Σ*_a e(an/q) by roots of unity instead of Ramanujan sums
        let e = DeltaExpansion::new(12.0).unwrap();
        for n in [0i64, 5, 12, 30] {
            let mut acc = Complex::new(0.0, 0.0);
            for q in 1..=e.max_modulus() {
                let roots = RootTable::<f64>::new(q);
                let mut s = Complex::new(0.0, 0.0);
                for a in 1..=q {
                    if crate::arith::gcd(a, q) == 1 {
                        s += roots.at(a as i128 * n as i128);
                    }
                }
                acc += s * e.delta_q(q, n as f64);
            }
            let expect = if n == 0 { 1.0 } else { 0.0 };
            assert!((acc.re - expect).abs() < 1e-10 && acc.im.abs() < 1e-10, "n={n}: {acc}");
        }
    }

    #[test]
    fn large_moduli_vanish() {
        let e = DeltaExpansion::new(50.0).unwrap();
        for q in [101u64, 150, 400] {
            for u in [0.0, 1.0, 700.0, 4999.0] {
                assert_eq!(e.delta_q(q, u), 0.0);
            }
        }
    }

    #[test]
    fn mass_is_order_one() {
        let e = DeltaExpansion::new(30.0).unwrap();
        let mean: f64 = (0..50).map(|i| e.absolute_mass(i as f64 * 17.0).unwrap()).sum::<f64>() / 50.0;
        assert!(mean > 0.1 && mean < 100.0, "{mean}");
    }

    #[test]
    fn profile_interpolates() {
        let e = DeltaExpansion::new(40.0).unwrap();
        let p = DeltaProfile::new(&e, 3, 20_000.0, 64.0).unwrap();
        for n in [0.0, 13.3, 119.9, 4000.7, -4000.7, 15_000.2] {
            let exact = 3.0 * 40.0 * e.delta_q(3, n);
            assert!((p.eval(n) - exact).abs() < 1e-6 * (1.0 + exact.abs()), "n={n}: {} vs {exact}", p.eval(n));
        }
    }
}

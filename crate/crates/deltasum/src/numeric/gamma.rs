//! Log-gamma on the complex plane and the digamma function on the positive reals.

use super::Real;
use num_complex::Complex;

// B_{2k} / (2k (2k-1)) for k = 1..=8
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

const SHIFT_RADIUS: f64 = 15.0;

/// `ln Γ(z)` up to an additive multiple of `2πi`.
///
/// Only `exp` of sums and differences of these values is meaningful, which is
/// exactly how gamma ratios are consumed.
pub fn ln_gamma<T: Real>(z: Complex<T>) -> Complex<T> {
    let half = T::lit(0.5);
    if z.re < half && z.im.abs() < T::lit(10.0) {
        // reflection: Γ(z)Γ(1-z) = π / sin(πz)
        let pi = T::PI();
        let s = (z * pi).sin();
        let one = Complex::new(T::one(), T::zero());
        return Complex::new(pi.ln(), T::zero()) - s.ln() - ln_gamma(one - z);
    }
    let mut w = z;
    let mut shift = Complex::new(T::zero(), T::zero());
    let radius = T::lit(SHIFT_RADIUS);
    while w.norm() < radius || w.re < half {
        shift = shift + w.ln();
        w = w + T::one();
    }
    stirling(w) - shift
}

fn stirling<T: Real>(z: Complex<T>) -> Complex<T> {
    let half = T::lit(0.5);
    let ln_z = z.ln();
    let mut acc = (z - half) * ln_z - z + T::lit(0.5 * (2.0 * std::f64::consts::PI).ln());
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut pow = inv;
    for c in STIRLING {
        acc = acc + pow * T::lit(c);
        pow = pow * inv2;
    }
    acc
}

/// `ψ(x) = Γ'(x)/Γ(x)` for `x > 0`.
pub fn digamma<T: Real>(x: T) -> T {
    assert!(x > T::zero(), "digamma needs a positive argument");
    let mut x = x;
    let mut acc = T::zero();
    let ten = T::lit(10.0);
    while x < ten {
        acc = acc - x.recip();
        x = x + T::one();
    }
    let inv2 = (x * x).recip();
    // ψ(x) ~ ln x - 1/(2x) - Σ B_{2k}/(2k x^{2k})
    let coeffs = [
        1.0 / 12.0,
        -1.0 / 120.0,
        1.0 / 252.0,
        -1.0 / 240.0,
        1.0 / 132.0,
        -691.0 / 32760.0,
        1.0 / 12.0,
    ];
    let mut series = T::zero();
    let mut pow = inv2;
    for c in coeffs {
        series = series + pow * T::lit(c);
        pow = pow * inv2;
    }
    acc + x.ln() - (x + x).recip() - series
}

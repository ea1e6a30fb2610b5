//! Euler's constant, Stieltjes constants and their Hurwitz generalisations.

use crate::numeric::Real;

/// `B_2, B_4, …, B_14`.
const BERNOULLI: [f64; 7] = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0];

/// Terms summed directly before the Euler–Maclaurin tail takes over.
const DIRECT_TERMS: usize = 24;

/// `d^m/dt^m [log^n t / t]` for `n ∈ {0, 1}`.
fn log_over_t_derivative<T: Real>(n: u32, m: usize, t: T) -> T {
    let mut fact = T::one();
    let mut harmonic = T::zero();
    for i in 1..=m {
        fact = fact * T::from_usize_lossy(i);
        harmonic = harmonic + T::from_usize_lossy(i).recip();
    }
    let sign = if m.is_multiple_of(2) { T::one() } else { -T::one() };
    let base = sign * fact / t.powi(m as i32 + 1);
    match n {
        0 => base,
        _ => base * (t.ln() - harmonic),
    }
}

/// Generalised Stieltjes constant `γ_n(x)`, `n ∈ {0, 1}`, `x > 0`:
/// the coefficients in `ζ(s, x) = 1/(s-1) + Σ (-1)^n γ_n(x) (s-1)^n / n!`.
///
/// # Panics
/// If `n > 1` or `x <= 0`.
pub fn hurwitz_stieltjes<T: Real>(n: u32, x: T) -> T {
    assert!(n <= 1, "only γ_0 and γ_1 are implemented");
    assert!(x > T::zero(), "Hurwitz parameter must be positive");
    let f = |t: T| if n == 0 { t.recip() } else { t.ln() / t };
    let mut acc = T::zero();
    let mut comp = T::zero();
    for k in 0..DIRECT_TERMS {
        // Kahan summation
        let y = f(T::from_usize_lossy(k) + x) - comp;
        let s = acc + y;
        comp = (s - acc) - y;
        acc = s;
    }
    let big = T::from_usize_lossy(DIRECT_TERMS) + x;
    let lb = big.ln();
    // Σ_{k >= N} f(k+x) - ∫_{N+x}^∞ f = f(N+x)/2 - Σ B_2j/(2j)! f^{(2j-1)}(N+x)
    let antideriv = if n == 0 { lb } else { lb * lb * T::lit(0.5) };
    let mut tail = f(big) * T::lit(0.5);
    let mut fact = T::one();
    for (j, &b) in BERNOULLI.iter().enumerate() {
        let order = 2 * j + 2;
        fact = fact * T::from_usize_lossy(order - 1) * T::from_usize_lossy(order);
        tail = tail - T::lit(b) / fact * log_over_t_derivative(n, order - 1, big);
    }
    acc - antideriv + tail
}

/// Euler's constant `γ = γ_0(1)`.
pub fn euler_gamma<T: Real>() -> T {
    hurwitz_stieltjes(0, T::one())
}

/// First Stieltjes constant `γ_1 = γ_1(1)`.
pub fn stieltjes_gamma1<T: Real>() -> T {
    hurwitz_stieltjes(1, T::one())
}

/// The pair used by the Voronoi main terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants<T> {
    pub euler_gamma: T,
    pub stieltjes_gamma1: T,
}

impl<T: Real> Constants<T> {
    pub fn compute() -> Self {
        Self { euler_gamma: euler_gamma(), stieltjes_gamma1: stieltjes_gamma1() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::digamma;

    /// Direct partial sums with a single asymptotic correction.
    fn gamma_oracle() -> f64 {
        let n = 2_000_000usize;
        let mut h = 0.0;
        for k in (1..=n).rev() {
            h += 1.0 / k as f64;
        }
        let nf = n as f64;
        h - nf.ln() - 0.5 / nf + 1.0 / (12.0 * nf * nf)
    }

    fn gamma1_oracle() -> f64 {
        let n = 2_000_000usize;
        let mut s = 0.0;
        for k in (1..=n).rev() {
            let kf = k as f64;
            s += kf.ln() / kf;
        }
        let nf = n as f64;
        let l = nf.ln();
        s - l * l / 2.0 - l / (2.0 * nf)
    }

    #[test]
    fn euler_gamma_against_partial_sums() {
        let g: f64 = euler_gamma();
        assert!((g - gamma_oracle()).abs() < 1e-9, "{g}");
    }

    #[test]
    fn gamma1_against_partial_sums() {
        let g: f64 = stieltjes_gamma1();
        assert!((g - gamma1_oracle()).abs() < 1e-8, "{g}");
        assert!(g < 0.0);
    }

    #[test]
    fn gamma0_is_minus_digamma() {
        for x in [0.2, 0.5, 1.0 / 3.0, 0.8, 1.0, 2.5] {
            let a: f64 = hurwitz_stieltjes(0, x);
            assert!((a + digamma(x)).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn hurwitz_shift_relation() {
        // γ_1(x) = γ_1(x + 1) + log(x)/x
        for x in [0.2f64, 0.5, 0.75, 1.0] {
            let lhs: f64 = hurwitz_stieltjes(1, x);
            let rhs: f64 = hurwitz_stieltjes(1, x + 1.0) + x.ln() / x;
            assert!((lhs - rhs).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn multiplication_formula() {
        // Σ_b ζ(s, b/q) = q^s ζ(s)
        let g: f64 = euler_gamma();
        let g1: f64 = stieltjes_gamma1();
        for q in [2u32, 3, 5, 7] {
            let qf = q as f64;
            let l = qf.ln();
            let mut s0 = 0.0;
            let mut s1 = 0.0;
            for b in 1..=q {
                s0 += hurwitz_stieltjes::<f64>(0, b as f64 / qf);
                s1 += hurwitz_stieltjes::<f64>(1, b as f64 / qf);
            }
            // q^s ζ(s) = q(1 + lε + l²ε²/2)(1/ε + γ - γ1 ε)
            assert!((s0 - qf * (g + l)).abs() < 1e-11, "q={q}");
            let coeff1 = qf * (-g1 + l * g + l * l / 2.0);
            assert!((-s1 - coeff1).abs() < 1e-11, "q={q}");
        }
    }
}

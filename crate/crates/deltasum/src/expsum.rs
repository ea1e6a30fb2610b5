//! Kloosterman, Ramanujan and quadratic Gauss sums, direct and in closed form.

use crate::arith::{self, factorize, gcd, inv_mod, jacobi, reduce};
use crate::error::{Error, Result};
use crate::numeric::{ComplexSum, RootTable};
use crate::ComplexValue;

/// Evaluation route for sums that have a closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Direct,
    Closed,
}

/// `S(a, b; q)` by summing over the unit group in index order.
pub fn kloosterman_direct(a: i64, b: i64, q: u64) -> ComplexValue {
    let roots = RootTable::<f64>::new(q);
    kloosterman_with(&roots, a, b)
}

/// `S(a, b; q)` reusing a root table for `q`.
pub fn kloosterman_with(roots: &RootTable<f64>, a: i64, b: i64) -> ComplexValue {
    let q = roots.modulus();
    if q == 1 {
        return ComplexValue::new(1.0, 0.0);
    }
    let (a, b) = (reduce(a, q), reduce(b, q));
    let mut acc = ComplexSum::new();
    for x in 1..q {
        if let Ok(xi) = inv_mod(x as i64, q) {
            let k = (arith::mul_mod(a, x, q) + arith::mul_mod(b, xi, q)) % q;
            acc.add(roots.get(k));
        }
    }
    acc.value()
}

/// `S(a, b; q)` through twisted multiplicativity over the prime powers of `q`:
/// `S(a,b;rs) = S(a·s̄, b·s̄; r)·S(a·r̄, b·r̄; s)` for coprime `r, s`.
pub fn kloosterman(a: i64, b: i64, q: u64) -> Result<ComplexValue> {
    let f = factorize(q)?;
    let mut acc = ComplexValue::new(1.0, 0.0);
    for &(p, e) in &f.entries {
        let r = p.pow(e);
        let s = q / r;
        let s_inv = inv_mod(s as i64, r)? as i128;
        let ar = ((a as i128).rem_euclid(r as i128) * s_inv).rem_euclid(r as i128) as i64;
        let br = ((b as i128).rem_euclid(r as i128) * s_inv).rem_euclid(r as i128) as i64;
        acc *= kloosterman_direct(ar, br, r);
    }
    Ok(acc)
}

/// `|S(a,b;q)| / (d(q)·gcd(a,b,q)^{1/2}·q^{1/2})`; at most one by Weil.
pub fn weil_ratio(a: i64, b: i64, q: u64) -> Result<f64> {
    let s = kloosterman(a, b, q)?;
    let d = factorize(q)?.num_divisors() as f64;
    let g = gcd(gcd(a.unsigned_abs(), b.unsigned_abs()), q) as f64;
    Ok(s.norm() / (d * g.sqrt() * (q as f64).sqrt()))
}

/// `c_q(m) = Σ_{d | (m, q)} d·μ(q/d)`, exact.
pub fn ramanujan_sum(m: i64, q: u64) -> Result<i64> {
    let g = gcd(m.unsigned_abs(), q);
    let g = if m == 0 { q } else { g };
    let f = factorize(g)?;
    let mut total = 0i64;
    for d in f.divisors() {
        let mu = factorize(q / d)?.mobius() as i64;
        total += d as i64 * mu;
    }
    Ok(total)
}

/// `c_q(m)` as the real part of `S(m, 0; q)`.
pub fn ramanujan_sum_direct(m: i64, q: u64) -> f64 {
    kloosterman_direct(m, 0, q).re
}

/// `Σ_{x mod q} e(a x²/q)`.
pub fn quad_gauss(a: i64, q: u64, mode: Mode) -> Result<ComplexValue> {
    if q == 0 {
        return Err(Error::range("modulus", 0, "at least 1"));
    }
    match mode {
        Mode::Direct => {
            let roots = RootTable::<f64>::new(q);
            let ar = reduce(a, q);
            let acc: ComplexSum<f64> = (0..q)
                .map(|x| roots.get(arith::mul_mod(ar, arith::mul_mod(x, x, q), q)))
                .collect();
            Ok(acc.value())
        }
        Mode::Closed => quad_gauss_closed(a, q),
    }
}

fn quad_gauss_closed(a: i64, q: u64) -> Result<ComplexValue> {
    if gcd(a.unsigned_abs(), q) != 1 {
        return Err(Error::Precondition(format!("closed Gauss sum needs (a, q) = 1, got a={a}, q={q}")));
    }
    let root = (q as f64).sqrt();
    Ok(match q % 4 {
        2 => ComplexValue::new(0.0, 0.0),
        1 | 3 => arith::eps_q(q)? * root * jacobi(a, q)? as f64,
        _ => {
            // q ≡ 0 mod 4 forces a odd; the positive representative keeps the symbol defined
            let ar = a.rem_euclid(q as i64);
            let eps_inv = arith::eps_signed(ar)?.inv();
            let sym = jacobi(q as i64, ar as u64)? as f64;
            ComplexValue::new(1.0, 1.0) * eps_inv * root * sym
        }
    })
}

/// An integral quadratic form usable in [`form_gauss`].
pub trait IntegralForm {
    fn rank(&self) -> usize;
    /// `Q(x)` for an integer vector of length [`IntegralForm::rank`].
    fn value(&self, x: &[i64]) -> i128;
    /// Determinant of the Hessian matrix of `Q`.
    fn hessian_det(&self) -> i128;
    /// `Q*(m)` as `numerator / scale`, with `scale` the integrality scale.
    fn adjoint(&self, m: &[i64]) -> (i128, i128);
    /// Determinant `|A|` entering the coprimality precondition.
    fn det(&self) -> i128;
}

/// Positive definite binary form `Ax² + By² + 2Cxy`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadraticForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadraticForm {
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self> {
        let det = a as i128 * b as i128 - c as i128 * c as i128;
        if a <= 0 || det <= 0 {
            return Err(Error::NotPositiveDefinite { a, b, c });
        }
        Ok(Self { a, b, c })
    }

    /// `AB - C²`.
    pub fn determinant(&self) -> i64 {
        self.a * self.b - self.c * self.c
    }

    /// Coefficients `(B, A, -C)` of the adjugate form, whose value divided by
    /// [`QuadraticForm::adjoint_scale`] is `Q*`.
    pub fn adjugate(&self) -> (i64, i64, i64) {
        (self.b, self.a, -self.c)
    }

    /// `N = 4(AB - C²)`; `N·Q*` has integral coefficients.
    pub fn adjoint_scale(&self) -> i64 {
        4 * self.determinant()
    }

    pub fn eval(&self, x: i64, y: i64) -> i128 {
        let (x, y) = (x as i128, y as i128);
        self.a as i128 * x * x + self.b as i128 * y * y + 2 * self.c as i128 * x * y
    }

    pub fn eval_real(&self, x: f64, y: f64) -> f64 {
        self.a as f64 * x * x + self.b as f64 * y * y + 2.0 * self.c as f64 * x * y
    }
}

impl IntegralForm for QuadraticForm {
    fn rank(&self) -> usize {
        2
    }
    fn value(&self, x: &[i64]) -> i128 {
        self.eval(x[0], x[1])
    }
    fn hessian_det(&self) -> i128 {
        4 * self.determinant() as i128
    }
    fn adjoint(&self, m: &[i64]) -> (i128, i128) {
        let (m1, m2) = (m[0] as i128, m[1] as i128);
        let num = self.b as i128 * m1 * m1 - 2 * self.c as i128 * m1 * m2 + self.a as i128 * m2 * m2;
        (num, self.adjoint_scale() as i128)
    }
    fn det(&self) -> i128 {
        self.determinant() as i128
    }
}

/// Diagonal form `Σ a_i x_i²` of any rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalForm {
    pub coeffs: Vec<i64>,
}

impl DiagonalForm {
    pub fn new(coeffs: Vec<i64>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().any(|&c| c <= 0) {
            return Err(Error::Precondition("diagonal form needs positive coefficients".into()));
        }
        Ok(Self { coeffs })
    }
}

impl IntegralForm for DiagonalForm {
    fn rank(&self) -> usize {
        self.coeffs.len()
    }
    fn value(&self, x: &[i64]) -> i128 {
        self.coeffs.iter().zip(x).map(|(&a, &v)| a as i128 * v as i128 * v as i128).sum()
    }
    fn hessian_det(&self) -> i128 {
        self.coeffs.iter().map(|&a| 2 * a as i128).product()
    }
    fn adjoint(&self, m: &[i64]) -> (i128, i128) {
        let prod: i128 = self.coeffs.iter().map(|&a| a as i128).product();
        let num = self
            .coeffs
            .iter()
            .zip(m)
            .map(|(&a, &mi)| mi as i128 * mi as i128 * (prod / a as i128))
            .sum();
        (num, 4 * prod)
    }
    fn det(&self) -> i128 {
        self.coeffs.iter().map(|&a| a as i128).product()
    }
}

/// `G_m(a/q) = Σ_{x mod q} e(a(Q(x) + m·x)/q)`.
pub fn form_gauss<F: IntegralForm + ?Sized>(
    form: &F,
    m: &[i64],
    a: i64,
    q: u64,
    mode: Mode,
) -> Result<ComplexValue> {
    let r = form.rank();
    if m.len() != r {
        return Err(Error::Precondition(format!("frequency vector has length {}, form has rank {r}", m.len())));
    }
    if q == 0 {
        return Err(Error::range("modulus", 0, "at least 1"));
    }
    let qi = q as i128;
    match mode {
        Mode::Direct => {
            let roots = RootTable::<f64>::new(q);
            let total = (q as u128).checked_pow(r as u32).filter(|&t| t <= 1 << 34).ok_or_else(|| {
                Error::range("residue vectors", format!("{q}^{r}"), 1u64 << 34)
            })? as u64;
            let mut x = vec![0i64; r];
            let mut acc = ComplexSum::new();
            for idx in 0..total {
                let mut rem = idx;
                for xi in x.iter_mut() {
                    *xi = (rem % q) as i64;
                    rem /= q;
                }
                let lin: i128 = x.iter().zip(m).map(|(&xi, &mi)| xi as i128 * mi as i128).sum();
                let k = (a as i128 * (form.value(&x) + lin)).rem_euclid(qi);
                acc.add(roots.get(k as u64));
            }
            Ok(acc.value())
        }
        Mode::Closed => {
            let det = form.det();
            if gcd(reduce_i128(2 * det * a as i128, q), q) != 1 {
                return Err(Error::Precondition(format!(
                    "closed form Gauss sum needs (q, 2|A|a) = 1, got q={q}, |A|={det}, a={a}"
                )));
            }
            if q == 1 {
                return Ok(ComplexValue::new(1.0, 0.0));
            }
            let hess = jacobi(reduce_i128(form.hessian_det(), q) as i64, q)? as f64;
            let unit = arith::eps_q(q)? * jacobi(2 * a, q)? as f64 * (q as f64).sqrt();
            let (num, scale) = form.adjoint(m);
            let scale_inv = inv_mod(reduce_i128(scale, q) as i64, q)? as i128;
            let k = (-(a as i128) * num.rem_euclid(qi) % qi * scale_inv).rem_euclid(qi);
            let phase = RootTable::<f64>::new(q).get(k as u64);
            Ok(unit.powi(r as i32) * hess * phase)
        }
    }
}

fn reduce_i128(x: i128, q: u64) -> u64 {
    x.rem_euclid(q as i128) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: ComplexValue, b: ComplexValue, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn kloosterman_examples() {
        assert!(close(kloosterman_direct(3, 7, 1), ComplexValue::new(1.0, 0.0), 1e-15));
        assert!(close(kloosterman_direct(0, 0, 12), ComplexValue::new(4.0, 0.0), 1e-12));
        let s = kloosterman_direct(1, 1, 5);
        let oracle = 2.0 + 2.0 * (4.0 * std::f64::consts::PI / 5.0).cos();
        assert!((s.re - oracle).abs() < 1e-12 && s.im.abs() < 1e-12);
        assert!((s.re - 0.381966).abs() < 1e-6);
    }

    #[test]
    fn ramanujan_examples() {
        assert_eq!(ramanujan_sum(0, 12).unwrap(), 4);
        assert_eq!(ramanujan_sum(1, 6).unwrap(), 1);
        assert_eq!(ramanujan_sum(2, 4).unwrap(), -2);
        for q in 1..60u64 {
            for m in -30..30i64 {
                let d = ramanujan_sum_direct(m, q);
                assert!((d - ramanujan_sum(m, q).unwrap() as f64).abs() < 1e-9, "m={m} q={q}");
            }
        }
    }

    #[test]
    fn gauss_examples() {
        assert!(close(quad_gauss(1, 6, Mode::Closed).unwrap(), ComplexValue::new(0.0, 0.0), 1e-15));
        assert!(close(quad_gauss(1, 6, Mode::Direct).unwrap(), ComplexValue::new(0.0, 0.0), 1e-12));
        let five = quad_gauss(1, 5, Mode::Direct).unwrap();
        let oracle = 1.0 + 4.0 * (72f64.to_radians()).cos();
        assert!((five.re - oracle).abs() < 1e-12);
        assert!((five.re - 5f64.sqrt()).abs() < 1e-12);
        assert!(close(quad_gauss(1, 4, Mode::Direct).unwrap(), ComplexValue::new(2.0, 2.0), 1e-12));
        assert!(close(quad_gauss(1, 4, Mode::Closed).unwrap(), ComplexValue::new(2.0, 2.0), 1e-12));
        assert!(matches!(quad_gauss(3, 9, Mode::Closed), Err(Error::Precondition(_))));
    }

    #[test]
    fn gauss_modes_agree_for_all_branches() {
        for q in 1..=200u64 {
            for a in -20..=20i64 {
                if gcd(a.unsigned_abs(), q) != 1 {
                    continue;
                }
                let d = quad_gauss(a, q, Mode::Direct).unwrap();
                let c = quad_gauss(a, q, Mode::Closed).unwrap();
                assert!(close(d, c, 1e-9), "a={a} q={q} {d} {c}");
            }
        }
    }

    #[test]
    fn form_gauss_examples() {
        let q2 = QuadraticForm::new(1, 1, 0).unwrap();
        let v = form_gauss(&q2, &[0, 0], 1, 5, Mode::Direct).unwrap();
        assert!(close(v, ComplexValue::new(5.0, 0.0), 1e-10));
        assert!(close(form_gauss(&q2, &[3, 4], 7, 1, Mode::Closed).unwrap(), ComplexValue::new(1.0, 0.0), 1e-15));
        let f = QuadraticForm::new(2, 3, 1).unwrap();
        let d = form_gauss(&f, &[1, 2], 1, 7, Mode::Direct).unwrap();
        let c = form_gauss(&f, &[1, 2], 1, 7, Mode::Closed).unwrap();
        assert!(close(d, c, 1e-9), "{d} {c}");
    }

    #[test]
    fn form_gauss_rejects_bad_inputs() {
        assert!(matches!(QuadraticForm::new(1, 1, 2), Err(Error::NotPositiveDefinite { .. })));
        assert!(matches!(QuadraticForm::new(0, 1, 0), Err(Error::NotPositiveDefinite { .. })));
        let f = QuadraticForm::new(1, 3, 0).unwrap();
        assert!(form_gauss(&f, &[0, 0], 1, 9, Mode::Closed).is_err());
        assert!(form_gauss(&f, &[0], 1, 5, Mode::Direct).is_err());
    }

    #[test]
    fn diagonal_rank_three() {
        let f = DiagonalForm::new(vec![1, 2, 5]).unwrap();
        for q in [3u64, 7, 11, 13] {
            for a in 1..4 {
                let m = [1, -2, 3];
                let d = form_gauss(&f, &m, a, q, Mode::Direct).unwrap();
                match form_gauss(&f, &m, a, q, Mode::Closed) {
                    Ok(c) => assert!(close(d, c, 1e-8), "q={q} a={a} {d} {c}"),
                    Err(_) => assert!(gcd(10 * a as u64, q) != 1),
                }
            }
        }
    }

    #[test]
    fn adjoint_composition_identity() {
        // Q*(∇Q(x)) = Q(x) for the gradient ∇Q = (2Ax + 2Cy, 2By + 2Cx)
        let f = QuadraticForm::new(3, 5, -2).unwrap();
        for x in -5..5 {
            for y in -5..5 {
                let g = [2 * (f.a * x + f.c * y), 2 * (f.b * y + f.c * x)];
                let (num, den) = f.adjoint(&g);
                assert_eq!(num, den * f.eval(x, y));
            }
        }
    }

    proptest! {
        #[test]
        fn kloosterman_crt_matches_direct(a in -1000i64..1000, b in -1000i64..1000, q in 1u64..3000) {
            let d = kloosterman_direct(a, b, q);
            let c = kloosterman(a, b, q).unwrap();
            prop_assert!(close(d, c, 1e-8));
        }

        #[test]
        fn kloosterman_real_and_symmetric(a in -500i64..500, b in -500i64..500, q in 1u64..800) {
            let s = kloosterman_direct(a, b, q);
            prop_assert!(s.im.abs() < 1e-8);
            prop_assert!(close(s, kloosterman_direct(b, a, q), 1e-8));
        }

        #[test]
        fn weil_bound(a in -10_000i64..10_000, b in -10_000i64..10_000, q in 1u64..20_000) {
            prop_assert!(weil_ratio(a, b, q).unwrap() <= 1.0 + 1e-9);
        }

        #[test]
        fn gauss_magnitude_trichotomy(a in -1000i64..1000, q in 1u64..500) {
            prop_assume!(gcd(a.unsigned_abs(), q) == 1);
            let v = quad_gauss(a, q, Mode::Direct).unwrap().norm();
            let r = (q as f64).sqrt();
            prop_assert!(v < 1e-8 || (v - r).abs() < 1e-8 || (v - r * 2f64.sqrt()).abs() < 1e-8);
        }

        #[test]
        fn binary_form_gauss_closed_matches_direct(
            a in 1i64..6, b in 1i64..6, c in -2i64..3,
            m1 in -5i64..5, m2 in -5i64..5, s in 1i64..50, q in 1u64..60,
        ) {
            prop_assume!(a * b - c * c > 0);
            let f = QuadraticForm::new(a, b, c).unwrap();
            let d = form_gauss(&f, &[m1, m2], s, q, Mode::Direct).unwrap();
            if let Ok(cl) = form_gauss(&f, &[m1, m2], s, q, Mode::Closed) {
                prop_assert!(close(d, cl, 1e-9));
            }
        }
    }
}

//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! Expected values come from the brute-force oracles below, never from the
//! library routines under test.

use deltasum::analytic::bump::BumpFunction;
use deltasum::analytic::delta::DeltaExpansion;
use deltasum::analytic::kernel::{g0_asymptotic, g0_kernel, KernelConfig};
use deltasum::analytic::osc::{CompositeEngine, OscIntegralSpec, Windows};
use deltasum::analytic::voronoi::{voronoi_d3_check, VoronoiConfig};
use deltasum::charsum::{frak_c, frak_s, kloosterman_correlation, CorrelationParams, FreqSumInput, Sign};
use deltasum::coeffs::{l2_ratio, CoefficientSource, KernelParams};
use deltasum::expsum::{form_gauss, kloosterman, quad_gauss, weil_ratio, DiagonalForm, Mode, QuadraticForm};
use deltasum::sums::{eval_s_quad, eval_sk, exponent_fit, theorem_exponents, Theorem, Weight, WindowConfig, WindowMode};
use deltasum::ComplexValue;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;
use std::io::Write;
use std::time::Instant;

/// Writes the verdict past the test harness capture, then fails the test if needed.
fn verdict(id: &str, name: &str, pass: bool, detail: &str) {
    let line = format!("criterion {id} {name}: {} ({detail})\n", if pass { "PASS" } else { "FAIL" });
    // the harness captures the std handles, so go through the device when there is one
    match std::fs::OpenOptions::new().write(true).open("/dev/stderr") {
        Ok(mut dev) => {
            let _ = dev.write_all(line.as_bytes());
        }
        Err(_) => eprint!("{line}"),
    }
    assert!(pass, "criterion {id} {name} failed: {detail}");
}

mod oracle {
    use super::*;

    pub fn e(num: i128, q: u64) -> ComplexValue {
        let r = num.rem_euclid(q as i128) as f64 / q as f64;
        ComplexValue::from_polar(1.0, TAU * r)
    }

    pub fn gcd(a: i128, b: i128) -> i128 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }

    /// Inverse modulo `q` by the extended Euclidean algorithm.
    pub fn inv(a: i128, q: u64) -> Option<i128> {
        let (mut r0, mut r1) = (a.rem_euclid(q as i128), q as i128);
        let (mut s0, mut s1) = (1i128, 0i128);
        while r1 != 0 {
            let t = r0 / r1;
            (r0, r1) = (r1, r0 - t * r1);
            (s0, s1) = (s1, s0 - t * s1);
        }
        (r0 == 1).then(|| s0.rem_euclid(q as i128))
    }

    pub fn gauss(a: i64, q: u64) -> ComplexValue {
        (0..q as i128).map(|x| e(a as i128 * x * x, q)).sum()
    }

    pub fn kloosterman(a: i64, b: i64, q: u64) -> ComplexValue {
        (1..q as i128)
            .filter_map(|x| inv(x, q).map(|xi| e(a as i128 * x + b as i128 * xi, q)))
            .sum::<ComplexValue>()
            + if q == 1 { ComplexValue::new(1.0, 0.0) } else { ComplexValue::new(0.0, 0.0) }
    }

    /// `Σ_{x, y mod q} e(a(Ax² + By² + 2Cxy + m1 x + m2 y)/q)`.
    pub fn binary_form_gauss(f: (i64, i64, i64), m: (i64, i64), a: i64, q: u64) -> ComplexValue {
        let (fa, fb, fc) = (f.0 as i128, f.1 as i128, f.2 as i128);
        let mut acc = ComplexValue::new(0.0, 0.0);
        for x in 0..q as i128 {
            for y in 0..q as i128 {
                let v = fa * x * x + fb * y * y + 2 * fc * x * y + m.0 as i128 * x + m.1 as i128 * y;
                acc += e(a as i128 * v, q);
            }
        }
        acc
    }

    pub fn diagonal_form_gauss(c: &[i64], m: &[i64], a: i64, q: u64) -> ComplexValue {
        // the sum factors over the coordinates
        c.iter()
            .zip(m)
            .map(|(&ci, &mi)| (0..q as i128).map(|x| e(a as i128 * (ci as i128 * x * x + mi as i128 * x), q)).sum::<ComplexValue>())
            .product()
    }

    /// `Σ_{α1, α2 mod q} e((a(α1² + α2²) + m1α1 + m2α2)/q)`, as a product of two single sums.
    pub fn frak_c(m1: i64, m2: i64, a: i64, q: u64) -> ComplexValue {
        let one = |m: i64| -> ComplexValue { (0..q as i128).map(|x| e(a as i128 * x * x + m as i128 * x, q)).sum() };
        one(m1) * one(m2)
    }

    pub fn ramanujan(m: i128, q: u64) -> f64 {
        (1..=q as i128).filter(|&x| gcd(x, q as i128) == 1).map(|x| (TAU * (x * m) as f64 / q as f64).cos()).sum()
    }

    pub fn divisors(n: u64) -> u64 {
        (1..=n).filter(|d| n.is_multiple_of(*d)).count() as u64
    }

    pub fn d3(n: u64) -> u64 {
        (1..=n).filter(|d| n.is_multiple_of(*d)).map(|d| divisors(n / d)).sum()
    }

    pub fn correlation(p: u64, c: [u64; 5]) -> ComplexValue {
        let [c1, c2, c3, c4, c5] = c.map(|x| x as i64);
        let mut acc = ComplexValue::new(0.0, 0.0);
        for beta in 1..p as i64 {
            let bi = inv(beta as i128, p).unwrap() as i64;
            acc += kloosterman(c1, c2 + c5 * beta, p) * kloosterman(c3, c4 + c5 * bi, p);
        }
        acc
    }

    /// `τ(n)` for small `n` from `q·Π(1 − qⁿ)²⁴`.
    pub fn tau(n: usize) -> i64 {
        let mut series = vec![0i64; n + 1];
        series[0] = 1;
        for k in 1..=n {
            for _ in 0..24 {
                for i in (k..=n).rev() {
                    series[i] -= series[i - k];
                }
            }
        }
        series[n - 1]
    }
}

fn primes_below(n: u64) -> Vec<u64> {
    (2..n).filter(|&p| (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)).collect()
}

#[test]
fn criterion_01_gauss_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for q in (1..=999u64).step_by(2) {
        let units: Vec<i64> = (1..q.max(2) as i64).filter(|&a| oracle::gcd(a as i128, q as i128) == 1).collect();
        for _ in 0..10 {
            let a = units[rng.gen_range(0..units.len())];
            let closed = quad_gauss(a, q, Mode::Closed).unwrap();
            let direct = quad_gauss(a, q, Mode::Direct).unwrap();
            let brute = oracle::gauss(a, q);
            worst = worst.max((closed - brute).norm()).max((direct - closed).norm());
            count += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = worst < 1e-6 && secs < 60.0;
    verdict("1", "Gauss-sum closed form", pass, &format!("{count} sums, max error {worst:.3e}, {secs:.1} s"));
}

#[test]
fn criterion_02_kloosterman_weil_and_crt() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_ratio: f64 = 0.0;
    for p in primes_below(2000) {
        for _ in 0..100 {
            let (a, b) = (rng.gen_range(0..p as i64), rng.gen_range(0..p as i64));
            let lib = weil_ratio(a, b, p).unwrap();
            let g = oracle::gcd(oracle::gcd(a as i128, b as i128), p as i128) as f64;
            let own = oracle::kloosterman(a, b, p).norm() / (2.0 * g.sqrt() * (p as f64).sqrt());
            assert!((lib - own).abs() < 1e-9, "p={p} a={a} b={b}: {lib} vs {own}");
            worst_ratio = worst_ratio.max(lib);
        }
    }
    let mut worst_crt: f64 = 0.0;
    let mut composites = 0;
    while composites < 500 {
        let q = rng.gen_range(4..=100_000u64);
        if (2..q).take_while(|d| d * d <= q).all(|d| q % d != 0) {
            continue;
        }
        let (a, b) = (rng.gen_range(-(q as i64)..q as i64), rng.gen_range(-(q as i64)..q as i64));
        worst_crt = worst_crt.max((kloosterman(a, b, q).unwrap() - oracle::kloosterman(a, b, q)).norm());
        composites += 1;
    }
    let pass = worst_ratio <= 1.0 && worst_crt <= 1e-8;
    verdict(
        "2",
        "Kloosterman Weil bound and CRT",
        pass,
        &format!("max Weil ratio {worst_ratio:.6}, max CRT error {worst_crt:.3e} on {composites} composite moduli"),
    );
}

#[test]
fn criterion_03_form_gauss_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    let mut tuples = 0;
    while tuples < 200 {
        let rank3 = tuples % 4 == 3;
        let q = if rank3 { rng.gen_range(1..=30u64) * 2 + 1 } else { rng.gen_range(1..=249u64) * 2 + 1 };
        let a = rng.gen_range(1..q.max(2) as i64);
        let (closed, brute) = if rank3 {
            let c: Vec<i64> = (0..3).map(|_| rng.gen_range(1..=12)).collect();
            let det: i128 = c.iter().map(|&x| x as i128).product();
            if oracle::gcd(2 * det * a as i128, q as i128) != 1 {
                continue;
            }
            let m: Vec<i64> = (0..3).map(|_| rng.gen_range(-(q as i64)..=q as i64)).collect();
            let form = DiagonalForm::new(c.clone()).unwrap();
            (form_gauss(&form, &m, a, q, Mode::Closed).unwrap(), oracle::diagonal_form_gauss(&c, &m, a, q))
        } else {
            let (fa, fb, fc) = (rng.gen_range(1..=15i64), rng.gen_range(1..=15i64), rng.gen_range(-7..=7i64));
            let det = fa * fb - fc * fc;
            if det <= 0 || oracle::gcd(2 * det as i128 * a as i128, q as i128) != 1 {
                continue;
            }
            let m = (rng.gen_range(-(q as i64)..=q as i64), rng.gen_range(-(q as i64)..=q as i64));
            let form = QuadraticForm::new(fa, fb, fc).unwrap();
            (
                form_gauss(&form, &[m.0, m.1], a, q, Mode::Closed).unwrap(),
                oracle::binary_form_gauss((fa, fb, fc), m, a, q),
            )
        };
        worst = worst.max((closed - brute).norm());
        tuples += 1;
    }
    verdict("3", "quadratic-form Gauss sum", worst < 1e-6, &format!("{tuples} tuples, max error {worst:.3e}"));
}

#[test]
fn criterion_04_frak_c_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for q in (3..=499u64).step_by(2) {
        let units: Vec<i64> = (1..q as i64).filter(|&a| oracle::gcd(a as i128, q as i128) == 1).collect();
        for _ in 0..5 {
            let a = units[rng.gen_range(0..units.len())];
            for _ in 0..3 {
                let (m1, m2) = (rng.gen_range(-(q as i64)..q as i64), rng.gen_range(-(q as i64)..q as i64));
                let closed = frak_c(m1, m2, a, q, Mode::Closed).unwrap();
                let direct = frak_c(m1, m2, a, q, Mode::Direct).unwrap();
                let brute = oracle::frak_c(m1, m2, a, q);
                worst = worst.max((closed - brute).norm()).max((direct - brute).norm());
                count += 1;
            }
        }
    }
    verdict("4", "frak_c closed form", worst < 1e-6, &format!("{count} sums, max error {worst:.3e}"));
}

#[test]
fn criterion_05_zero_frequency_reduction() {
    let pairs = [(1u64, 1u64), (1, 2), (2, 5), (3, 7), (4, 9), (6, 6), (5, 11)];
    let mut worst_rel: f64 = 0.0;
    let mut worst_case = String::new();
    let mut worst_bound: f64 = 0.0;
    let mut bound_cases = 0;
    for q in (1..=59u64).step_by(2) {
        for k in [3u32, 4] {
            for &(n3, n3p) in &pairs {
                let input = FreqSumInput { q, n: 1, m1: 0, m2: 0, n3, n3p, k, m: 0, sign: Sign::Plus };
                let s0 = frak_s(&input).unwrap();
                let (a, b) = (n3.pow(k) as i128, n3p.pow(k) as i128);
                let expected = (q as f64).powi(3) * oracle::ramanujan(b - a, q);
                // relative to the reduction, or to q³ when the Ramanujan sum vanishes
                let rel = (s0 - ComplexValue::new(expected, 0.0)).norm() / expected.abs().max((q as f64).powi(3));
                if rel > worst_rel {
                    worst_rel = rel;
                    worst_case = format!("q={q} k={k} n3={n3} n3'={n3p}: {:.6} vs {expected}", s0.re);
                }
                if (a - b).rem_euclid(q as i128) == 0 {
                    worst_bound = worst_bound.max(s0.norm() / (q as f64).powi(4));
                    bound_cases += 1;
                }
            }
        }
    }
    let reduction_ok = worst_rel <= 1e-4;
    let bound_ok = worst_bound <= 1.0 + 1e-12;
    verdict(
        "5",
        "zero-frequency reduction",
        reduction_ok && bound_ok,
        &format!(
            "reduction {} (max relative error {worst_rel:.3e} at {worst_case}); q^4 bound {} (max |S0|/q^4 = {worst_bound:.4} over {bound_cases} cases)",
            if reduction_ok { "holds" } else { "fails" },
            if bound_ok { "holds" } else { "fails" },
        ),
    );
}

#[test]
fn criterion_06_kloosterman_correlation() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    let mut mismatch: f64 = 0.0;
    let mut draws = 0;
    for p in primes_below(301).into_iter().filter(|&p| p > 20) {
        let mut taken = 0;
        while taken < 50 {
            let c: [i64; 5] = std::array::from_fn(|_| rng.gen_range(0..p as i64));
            let Ok(params) = CorrelationParams::new(p, c) else { continue };
            let lib = kloosterman_correlation(&params);
            // the oracle is quadratic in p, so it spot-checks one draw in five
            if taken % 5 == 0 {
                mismatch = mismatch.max((lib - oracle::correlation(p, params.c)).norm() / (p * p) as f64);
            }
            worst = worst.max(lib.norm() / (p as f64).powf(1.5));
            taken += 1;
            draws += 1;
        }
    }
    let pass = worst <= 10.0 && mismatch < 1e-9;
    verdict(
        "6",
        "Kloosterman correlation",
        pass,
        &format!("{draws} draws, max |sum|/p^1.5 = {worst:.4}, oracle mismatch {mismatch:.2e}"),
    );
}

#[test]
fn criterion_07_delta_exactness() {
    let delta = DeltaExpansion::new(50.0).unwrap();
    let at_zero = (delta.delta_eval(0).unwrap() - 1.0).abs();
    let mut off: f64 = 0.0;
    for n in 1..=1000i64 {
        off = off.max(delta.delta_eval(n).unwrap().abs()).max(delta.delta_eval(-n).unwrap().abs());
    }
    let pass = at_zero <= 1e-9 && off <= 1e-9;
    verdict("7", "delta expansion exactness", pass, &format!("|delta(0) - 1| = {at_zero:.3e}, max off-zero {off:.3e}"));
}

#[test]
fn criterion_08_d3_voronoi() {
    let h = BumpFunction::canonical(1e3, 2e3).unwrap();
    let cfg = VoronoiConfig::default();
    // classical residue of ζ³(s)h̃(s) at s = 1: coefficients of h̃(1), h̃'(1), h̃''(1)
    let (g, g1) = (0.577_215_664_901_532_9, -0.072_815_845_483_676_72);
    let classical = [3.0 * g * g - 3.0 * g1, 3.0 * g, 0.5];
    let mut lines = Vec::new();
    let mut pass = true;
    for (a, q) in [(1i64, 1u64), (1, 3), (1, 4), (2, 5)] {
        let r = voronoi_d3_check(a, q, &h, &cfg).unwrap();
        let lhs: ComplexValue =
            (1001..2000u64).map(|n| oracle::e(a as i128 * n as i128, q) * (oracle::d3(n) as f64 * h.value(n as f64))).sum();
        let lhs_err = (lhs - ComplexValue::new(r.lhs[0], r.lhs[1])).norm() / lhs.norm();
        assert!(lhs_err < 1e-12, "left side disagrees with enumeration: {lhs_err}");
        pass &= r.discrepancy_printed <= 1e-3;
        let mut line = format!(
            "(q={q}, a={a}): printed {:.3e}, residue {:.3e}, oracle/printed coefficient ratios {:?}",
            r.discrepancy_printed, r.discrepancy_oracle, r.main.coefficient_ratios
        );
        if q == 1 {
            // bisection against the classical asymptotic
            let m = r.main.log_moments;
            let main: f64 = classical.iter().zip(&m).map(|(c, x)| c * x).sum();
            let rhs = ComplexValue::new(r.dual[0] + main, r.dual[1]);
            let ratios: Vec<f64> = classical.iter().zip(&r.main.printed_coefficients).map(|(c, p)| c / p).collect();
            line += &format!(", classical {:.3e}, classical/printed {ratios:.6?}", (lhs - rhs).norm() / lhs.norm());
        }
        lines.push(line);
    }
    verdict("8", "d3 Voronoi identity", pass, &lines.join("; "));
}

#[test]
fn criterion_09_kernel_consistency() {
    let g = BumpFunction::canonical(1.0, 2.0).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for y in [1e3, 1e4, 1e5] {
        let k = g0_kernel(y, &g, KernelParams::trivial(), &KernelConfig::default()).unwrap();
        let asym = g0_asymptotic(y, &g).unwrap();
        let dev = (k.value.re - asym).abs() / asym.abs();
        let bound = 5.0 * y.powf(-1.0 / 3.0);
        pass &= dev <= bound && k.value.im.abs() <= k.error.max(1e-9 * k.value.re.abs());
        parts.push(format!("y={y:e}: deviation {dev:.4} vs {bound:.4}, kernel/asymptotic {:.5}", k.value.re / asym));
    }
    verdict("9", "kernel consistency", pass, &parts.join("; "));
}

#[test]
fn criterion_10_oscillatory_slopes() {
    let big_q = 1e3;
    let x = big_q * big_q;
    let win = Windows::default();
    let delta = DeltaExpansion::new(big_q).unwrap();
    let mut series = Vec::new();
    let mut under_bound = true;
    let mut q = 8u64;
    while q as f64 <= big_q {
        let mut spec = OscIntegralSpec::ternary(x, q, 1.0, 0.0);
        let k = spec.k_parameter();
        let mut sup: f64 = 0.0;
        for n3 in [1u64, 50] {
            spec.n3 = n3;
            let engine = CompositeEngine::new(&spec, &win, &delta).unwrap();
            for f in [0.25, 0.5, 1.0] {
                for s in [Sign::Plus, Sign::Minus] {
                    let v = engine.composite(k * f, s);
                    under_bound &= v.error <= 1e-3 * v.value().norm().max(1e-12);
                    sup = sup.max(v.value().norm());
                }
            }
        }
        series.push((q as f64, sup));
        q *= 2;
    }
    let fit = exponent_fit(&series).unwrap();
    // 𝔷 at the top modulus
    let spec = OscIntegralSpec::ternary(x, big_q as u64, 1.0, 0.0);
    let engine = CompositeEngine::new(&spec, &win, &delta).unwrap();
    let mm = spec.m_threshold();
    let z0 = engine.z_integral(&win, 0.0, Sign::Plus).value().norm();
    let mut z_worst: f64 = 0.0;
    for f in [100.0, 150.0, 200.0] {
        for s in [Sign::Plus, Sign::Minus] {
            let z = engine.z_integral(&win, f * mm, s);
            z_worst = z_worst.max((z.value().norm() + z.error) / z0);
        }
    }
    let pass = series.len() >= 5 && fit.slope >= 1.3 && z_worst <= 1e-6 && under_bound;
    verdict(
        "10",
        "oscillatory bound slopes",
        pass,
        &format!(
            "{} dyadic moduli, slope {:.3} +- {:.3}, max |z(m >= 100M)|/z(0) with error {z_worst:.3e}",
            series.len(),
            fit.slope,
            fit.stderr
        ),
    );
}

#[test]
fn criterion_11_ramanujan_l2() {
    let src = CoefficientSource::sym2_discriminant(100_000).unwrap();
    let mut worst: f64 = 0.0;
    for x in [1_000u64, 10_000, 100_000] {
        worst = worst.max(l2_ratio(x, &src, 0.0).unwrap().ratio.unwrap());
    }
    let t2 = oracle::tau(2);
    let expected = (t2 * t2) as f64 / 2f64.powi(11) - 1.0;
    let got = src.coeff(1, 2).unwrap();
    let pass = worst <= 10.0 && t2 == -24 && got == expected && got == -0.71875;
    verdict(
        "11",
        "Ramanujan L2 bound",
        pass,
        &format!("max l2 ratio {worst:.4}, coefficient(1, 2) = {got} from tau(2) = {t2}"),
    );
}

#[test]
fn criterion_12_main_sum_oracle() {
    let src = CoefficientSource::triple_divisor(1 << 12).unwrap();
    let mut exact = true;
    for x in [16u64, 64, 256] {
        for k in [3u32, 4, 5] {
            let cfg = WindowConfig::ternary(x, k, WindowMode::Sharp).unwrap();
            let r = (1..).take_while(|n: &u64| n * n <= x).last().unwrap();
            let y = (1..).take_while(|n: &u64| n.pow(k) <= x).last().unwrap();
            let mut total = 0u64;
            for n1 in 1..=r {
                for n2 in 1..=r {
                    for n3 in 1..=y {
                        total += oracle::d3(n1 * n1 + n2 * n2 + n3.pow(k));
                    }
                }
            }
            exact &= eval_sk(&cfg, &src, Weight::Unit).unwrap() == total as f64;
        }
    }
    let sym2 = CoefficientSource::sym2_discriminant(1 << 23).unwrap();
    let form = QuadraticForm::new(1, 1, 0).unwrap();
    let series: Vec<(f64, f64)> = (6..=10)
        .map(|e| {
            let cfg = WindowConfig::binary(1 << e, 1.0, WindowMode::Smooth).unwrap();
            ((1u64 << e) as f64, eval_s_quad(&cfg, &form, &sym2).unwrap().abs())
        })
        .collect();
    let fit = exponent_fit(&series).unwrap();
    let ex = theorem_exponents(Theorem::Binary { theta: 1.0 }).unwrap();
    let pass = exact && fit.slope <= 1.95;
    verdict(
        "12",
        "main-sum oracle equivalence",
        pass,
        &format!(
            "enumeration {}, Sym2 slope {:.4} +- {:.4} (trivial {}, large-X exponent {} reported only)",
            if exact { "exact" } else { "mismatch" },
            fit.slope,
            fit.stderr,
            ex.trivial,
            ex.improved
        ),
    );
}

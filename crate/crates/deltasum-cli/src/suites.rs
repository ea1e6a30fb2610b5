//! Verification suites. Each suite appends its assertion rows to a report.

use crate::params::{CliError, CliResult, Params};
use crate::report::Assertion;
use deltasum::analytic::bump::BumpFunction;
use deltasum::analytic::delta::DeltaExpansion;
use deltasum::analytic::kernel::{g0_asymptotic, g0_kernel, KernelConfig};
use deltasum::analytic::osc::{CompositeEngine, OscIntegralSpec, Windows};
use deltasum::analytic::voronoi::{voronoi_d3_check, VoronoiConfig};
use deltasum::arith::{factorize, gcd, is_prime};
use deltasum::charsum::{
    frak_c, frak_s, kloosterman_correlation, kloosterman_correlation_mobius, zero_frequency_reduction, CorrelationParams,
    FreqSumInput, Sign,
};
use deltasum::coeffs::{l2_ratio, CoefficientSource, KernelParams};
use deltasum::expsum::{
    form_gauss, kloosterman, kloosterman_direct, quad_gauss, ramanujan_sum, weil_ratio, DiagonalForm, Mode,
    QuadraticForm,
};
use deltasum::sums::{eval_s_quad, eval_sk, exponent_fit, Weight, WindowConfig, WindowMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

type Suite = fn(&Params, &mut Vec<Assertion>) -> CliResult<()>;

/// Suite names in run order.
pub const SUITES: [(&str, Suite); 12] = [
    ("gauss", gauss),
    ("kloosterman", kloosterman_suite),
    ("form-gauss", form_gauss_suite),
    ("frak-c", frak_c_suite),
    ("zero-frequency", zero_frequency),
    ("correlation", correlation),
    ("delta", delta),
    ("voronoi", voronoi),
    ("kernel", kernel),
    ("osc", osc),
    ("l2", l2),
    ("sums", sums),
];

pub fn find(name: &str) -> CliResult<Suite> {
    SUITES.iter().find(|(n, _)| *n == name).map(|(_, f)| *f).ok_or_else(|| {
        let names: Vec<&str> = SUITES.iter().map(|(n, _)| *n).collect();
        CliError::Unknown(format!("suite {name} (known: {})", names.join(", ")))
    })
}

/// Runs the named suites in order, stopping once the wall-clock cap is exceeded.
pub fn run(names: &[&str], params: &Params) -> CliResult<(Vec<Assertion>, Option<CliError>)> {
    let start = Instant::now();
    let limit = params.time_limit();
    let mut rows = Vec::new();
    for name in names {
        find(name)?(params, &mut rows)?;
        let elapsed = start.elapsed().as_secs_f64();
        if elapsed > limit {
            return Ok((rows, Some(CliError::Timeout { limit, elapsed })));
        }
    }
    Ok((rows, None))
}

fn rng(params: &Params, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(params.seed() ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn units(q: u64) -> Vec<i64> {
    (1..q.max(2) as i64).filter(|&a| gcd(a.unsigned_abs(), q) == 1).collect()
}

fn gauss(p: &Params, out: &mut Vec<Assertion>) -> CliResult<()> {
    let qmax = p.qmax.unwrap_or(p.pick(299, 999));
    let mut rng = rng(p, 1);
    // worst |direct - closed| per residue class of q mod 4
    let mut worst = [0f64; 4];
    for q in 1..=qmax {
        let cands = units(q);
        for _ in 0..10 {
            let a = cands[rng.gen_range(0..cands.len())];
            let d = (quad_gauss(a, q, Mode::Direct)? - quad_gauss(a, q, Mode::Closed)?).norm();
            worst[(q % 4) as usize] = worst[(q % 4) as usize].max(d);
        }
    }
    for (class, w) in worst.iter().enumerate() {
        out.push(
            Assertion::at_most("gauss", &format!("q = {class} mod 4"), "quadratic Gauss sum closed form", *w, p.tolerance())
                .with_detail(format!("q <= {qmax}, 10 units each")),
        );
    }
    Ok(())
}

fn kloosterman_suite(p: &Params, out: &mut Vec<Assertion>) -> CliResult<()> {
    let pmax = p.qmax.unwrap_or(p.pick(500, 2000));
    let mut rng = rng(p, 2);
    let mut ratio: f64 = 0.0;
    for prime in (3..pmax).filter(|&n| is_prime(n)) {
        for _ in 0..p.pick(20, 100) {
            ratio = ratio.max(weil_ratio(rng.gen_range(0..prime as i64), rng.gen_range(0..prime as i64), prime)?);
        }
    }
    out.push(
        Assertion::at_most("kloosterman", "Weil ratio", "Weil bound for Kloosterman sums", ratio, 1.0)
            .with_detail(format!("primes below {pmax}")),
    );
    let (count, top) = p.pick((100, 20_000u64), (500, 100_000));
    let mut crt: f64 = 0.0;
    let mut ram: f64 = 0.0;
    let mut done = 0;
    while done < count {
        let q = rng.gen_range(4..=top);
        if is_prime(q) {
            continue;
        }
        let (a, b) = (rng.gen_range(-(q as i64)..q as i64), rng.gen_range(-(q as i64)..q as i64));
        crt = crt.max((kloosterman(a, b, q)? - kloosterman_direct(a, b, q)).norm());
        ram = ram.max((kloosterman(a, 0, q)?.re - ramanujan_sum(a, q)? as f64).abs());
        done += 1;
    }
    out.push(
        Assertion::at_most("kloosterman", "CRT vs direct", "twisted multiplicativity of Kloosterman sums", crt, 1e-8)
            .with_detail(format!("{count} composite moduli up to {top}")),
    );
    out.push(Assertion::at_most("kloosterman", "S(m, 0; q) vs c_q(m)", "Ramanujan sum as a Kloosterman sum", ram, 1e-8));
    Ok(())
}

fn form_gauss_suite(p: &Params, out: &mut Vec<Assertion>) -> CliResult<()> {
    let qmax = p.qmax.unwrap_or(p.pick(99, 499)).max(3);
    let mut rng = rng(p, 3);
    let (mut binary, mut ternary) = (0f64, 0f64);
    let tuples = p.pick(60, 200);
    let mut done = 0;
    while done < tuples {
        let rank3 = done % 4 == 3;
        let q = rng.gen_range(1..=(if rank3 { qmax.min(61) } else { qmax }) / 2) * 2 + 1;
        let a = rng.gen_range(1..q as i64);
        if rank3 {
            let c: Vec<i64> = (0..3).map(|_| rng.gen_range(1..=12)).collect();
            if gcd((2 * c.iter().product::<i64>() * a).unsigned_abs(), q) != 1 {
                continue;
            }
            let m: Vec<i64> = (0..3).map(|_| rng.gen_range(-(q as i64)..=q as i64)).collect();
            let f = DiagonalForm::new(c)?;
            ternary = ternary.max((form_gauss(&f, &m, a, q, Mode::Direct)? - form_gauss(&f, &m, a, q, Mode::Closed)?).norm());
        } else {
            let (fa, fb, fc) = (rng.gen_range(1..=15i64), rng.gen_range(1..=15i64), rng.gen_range(-7..=7i64));
            let det = fa * fb - fc * fc;
            if det <= 0 || gcd((2 * det * a).unsigned_abs(), q) != 1 {
                continue;
            }
            let m = [rng.gen_range(-(q as i64)..=q as i64), rng.gen_range(-(q as i64)..=q as i64)];
            let f = QuadraticForm::new(fa, fb, fc)?;
            binary = binary.max((form_gauss(&f, &m, a, q, Mode::Direct)? - form_gauss(&f, &m, a, q, Mode::Closed)?).norm());
        }
        done += 1;
    }
    let anchor = "Gauss sum of a quadratic form with adjoint phase";
    out.push(Assertion::at_most("form-gauss", "binary forms", anchor, binary, p.tolerance()));
    out.push(Assertion::at_most("form-gauss", "diagonal rank 3", anchor, ternary, p.tolerance()));
    Ok(())
}

fn frak_c_suite(p: &Params, out: &mut Vec<Assertion>) -> CliResult<()> {
    let qmax = p.qmax.unwrap_or(p.pick(99, 499));
    let mut rng = rng(p, 4);
    let mut worst: f64 = 0.0;
    for q in (3..=qmax).step_by(2) {
        let cands = units(q);
        for _ in 0..5 {
            let a = cands[rng.gen_range(0..cands.len())];
            for _ in 0..3 {
                let (m1, m2) = (rng.gen_range(-(q as i64)..q as i64), rng.gen_range(-(q as i64)..q as i64));
                worst = worst.max((frak_c(m1, m2, a, q, Mode::Direct)? - frak_c(m1, m2, a, q, Mode::Closed)?).norm());
            }
        }
    }
    out.push(
        Assertion::at_most("frak-c", "direct vs closed", "closed form of the two-dimensional Gauss sum", worst, p.tolerance())
            .with_detail(format!("odd q <= {qmax}")),
    );
    Ok(())
}

fn zero_frequency(p: &Params, out: &mut Vec<Assertion>) -> CliResult<()> {
    let qmax = p.qmax.unwrap_or(p.pick(31, 60));
    let pairs = [(1u64, 1u64), (1, 2), (2, 5), (3, 7), (6, 6)];
    let (mut rel, mut bound) = (0f64, 0f64);
    for q in (1..=qmax).step_by(2) {
        for k in [3u32, 4] {
            for &(n3, n3p) in &pairs {
                let s0 = frak_s(&FreqSumInput { q, n: 1, m1: 0, m2: 0, n3, n3p, k, m: 0, sign: Sign::Plus })?;
                let red = zero_frequency_reduction(q, n3, n3p, k)?;
                let q3 = (q as f64).powi(3);
                rel = rel.max((s0.re - red).hypot(s0.im) / red.abs().max(q3));
                if (n3p.pow(k) as i128 - n3.pow(k) as i128).rem_euclid(q as i128) == 0 {
                    bound = bound.max(s0.norm() / (q as f64).powi(4));
                }
            }
        }
    }
    out.push(
        Assertion::at_most("zero-frequency", "reduction", "zero-frequency reduction to a Ramanujan sum", rel, 1e-4)
            .with_detail(format!("odd q <= {qmax}, relative to max(|q^3 c_q|, q^3)")),
    );
    out.push(Assertion::at_most("zero-frequency", "q^4 bound", "zero-frequency bound q^4 for equal powers", bound, 1.0 + 1e-12));
    Ok(())
}

fn correlation(p: &Params, out: &mut Vec<Assertion>) -> CliResult<()> {
    let pmax = p.qmax.unwrap_or(p.pick(97, 300));
    let slack = p.slack.unwrap_or(10.0);
    let mut rng = rng(p, 6);
    let (mut worst, mut forms) = (0f64, 0f64);
    for prime in (21..=pmax).filter(|&n| is_prime(n)) {
        let mut taken = 0;
        while taken < p.pick(10, 50) {
            let c: [i64; 5] = std::array::from_fn(|_| rng.gen_range(0..prime as i64));
            let Ok(params) = CorrelationParams::new(prime, c) else { continue };
            let s = kloosterman_correlation(&params);
            worst = worst.max(s.norm() / (prime as f64).powf(1.5));
            if taken == 0 {
                forms = forms.max((s - kloosterman_correlation_mobius(&params)).norm() / (prime * prime) as f64);
            }
            taken += 1;
        }
    }
    out.push(
        Assertion::at_most("correlation", "|sum|/p^{3/2}", "square-root cancellation in the Kloosterman correlation", worst, slack)
            .with_detail(format!("primes 20 < p <= {pmax}")),
    );
    out.push(Assertion::at_most("correlation", "Mobius form", "correlation through linear fractional maps", forms, 1e-9));
    Ok(())
}

fn delta(p: &Params, out: &mut Vec<Assertion>) -> CliResult<()> {
    let big_q = p.big_q.unwrap_or(50.0);
    let nmax = p.nmax.unwrap_or(1000) as i64;
    let d = DeltaExpansion::new(big_q)?;
    let zero = (d.delta_eval(0)? - 1.0).abs();
    let mut off: f64 = 0.0;
    for n in 1..=nmax {
        off = off.max(d.delta_eval(n)?.abs()).max(d.delta_eval(-n)?.abs());
    }
    let anchor = "delta-symbol expansion";
    out.push(Assertion::at_most("delta", "delta(0) = 1", anchor, zero, 1e-9));
    out.push(Assertion::at_most("delta", "delta(n) = 0", anchor, off, 1e-9).with_detail(format!("1 <= |n| <= {nmax}")));
    Ok(())
}

fn voronoi(p: &Params, out: &mut Vec<Assertion>) -> CliResult<()> {
    let x = p.x.unwrap_or(1e3);
    let h = BumpFunction::canonical(x, 2.0 * x)?;
    let cases: &[(i64, u64)] = p.pick(&[(1, 1), (1, 3)], &[(1, 1), (1, 3), (1, 4), (2, 5)]);
    for &(a, q) in cases {
        let r = voronoi_d3_check(a, q, &h, &VoronoiConfig::default())?;
        let name = format!("q={q} a={a}");
        out.push(Assertion::at_most("voronoi", &format!("{name} residue main terms"), "d3 Voronoi summation", r.discrepancy_oracle, 1e-3));
        out.push(
            Assertion::at_most(
                "voronoi",
                &format!("{name} printed main terms"),
                "d3 Voronoi summation with the printed main terms",
                r.discrepancy_printed,
                1e-3,
            )
            .with_detail(format!("residue/printed coefficient ratios {:?}", r.main.coefficient_ratios)),
        );
        out.push(Assertion::at_least(
            "voronoi",
            &format!("{name} Ramanujan consistency"),
            "S(a, 0; q/n1) equals the Ramanujan sum",
            r.ramanujan_consistent as u8 as f64,
            1.0,
        ));
    }
    Ok(())
}

fn kernel(p: &Params, out: &mut Vec<Assertion>) -> CliResult<()> {
    let g = BumpFunction::canonical(1.0, 2.0)?;
    let ys: Vec<f64> = p.ys.clone().unwrap_or_else(|| p.pick(vec![1e3, 1e4], vec![1e3, 1e4, 1e5]));
    for y in ys {
        let k = g0_kernel(y, &g, KernelParams::trivial(), &KernelConfig::default())?;
        let asym = g0_asymptotic(y, &g)?;
        let dev = (k.value.re - asym).abs() / asym.abs();
        out.push(
            Assertion::at_most("kernel", &format!("y = {y:e}"), "leading asymptotic of the Voronoi kernel", dev, 5.0 * y.powf(-1.0 / 3.0))
                .with_detail(format!("kernel/asymptotic = {:.6}", k.value.re / asym)),
        );
    }
    Ok(())
}

fn osc(p: &Params, out: &mut Vec<Assertion>) -> CliResult<()> {
    let big_q = p.big_q.unwrap_or(1e3);
    let x = big_q * big_q;
    let win = Windows::default();
    let delta = DeltaExpansion::new(big_q)?;
    let mut series = Vec::new();
    let mut q = p.pick((big_q.powf(0.5).ceil() as u64).next_power_of_two(), (big_q.powf(0.3).ceil() as u64).next_power_of_two());
    while q as f64 <= big_q {
        let mut spec = OscIntegralSpec::ternary(x, q, 1.0, 0.0);
        let k = spec.k_parameter();
        let mut sup: f64 = 0.0;
        for n3 in [1u64, 50] {
            spec.n3 = n3;
            let engine = CompositeEngine::new(&spec, &win, &delta)?;
            for f in [0.25, 0.5, 1.0] {
                for s in [Sign::Plus, Sign::Minus] {
                    sup = sup.max(engine.composite(k * f, s).value().norm());
                }
            }
        }
        series.push((q as f64, sup));
        q *= 2;
    }
    let fit = exponent_fit(&series)?;
    out.push(
        Assertion::at_least("osc", "slope of sup|L| in q", "q^{3/2}/Q^{3/2} bound of the composite integrals", fit.slope, 1.3)
            .with_detail(format!("{} dyadic moduli, stderr {:.3}", series.len(), fit.stderr)),
    );
    let spec = OscIntegralSpec::ternary(x, big_q as u64, 1.0, 0.0);
    let engine = CompositeEngine::new(&spec, &win, &delta)?;
    let mm = spec.m_threshold();
    let z0 = engine.z_integral(&win, 0.0, Sign::Plus).value().norm();
    let mut worst: f64 = 0.0;
    for f in [100.0, 200.0] {
        let z = engine.z_integral(&win, f * mm, Sign::Plus);
        worst = worst.max((z.value().norm() + z.error) / z0);
    }
    out.push(Assertion::at_most("osc", "z(m >= 100M)/z(0)", "decay of the w-integral beyond M", worst, 1e-6));
    Ok(())
}

fn l2(p: &Params, out: &mut Vec<Assertion>) -> CliResult<()> {
    let xs: Vec<u64> = p.xs.clone().unwrap_or_else(|| p.pick(vec![1_000, 10_000], vec![1_000, 10_000, 100_000]));
    let top = *xs.iter().max().unwrap_or(&1000);
    let src = CoefficientSource::sym2_discriminant(top as usize)?;
    for x in xs {
        let r = l2_ratio(x, &src, 0.0)?;
        out.push(Assertion::at_most("l2", &format!("X = {x}"), "Ramanujan bound on average", r.ratio.unwrap_or(f64::NAN), 10.0));
    }
    let v = src.coeff(1, 2)?;
    out.push(
        Assertion::at_most("l2", "Lambda(1, 2)", "Hecke value from tau(2) = -24", (v + 0.71875).abs(), 0.0)
            .with_detail(format!("value {v}")),
    );
    Ok(())
}

fn sums(p: &Params, out: &mut Vec<Assertion>) -> CliResult<()> {
    let src = CoefficientSource::triple_divisor(1 << 12)?;
    for x in p.pick(vec![16u64, 64], vec![16, 64, 256]) {
        for k in [3u32, 4, 5] {
            let cfg = WindowConfig::ternary(x, k, WindowMode::Sharp)?;
            let lib = eval_sk(&cfg, &src, Weight::Unit)?;
            // per-term factorization instead of the sieve table
            let r = deltasum::arith::isqrt(x);
            let mut total = 0u64;
            for n1 in 1..=r {
                for n2 in 1..=r {
                    for n3 in 1..=cfg.y_floor() {
                        total += factorize(n1 * n1 + n2 * n2 + n3.pow(k))?.d3();
                    }
                }
            }
            out.push(Assertion::at_most(
                "sums",
                &format!("X = {x}, k = {k}"),
                "main sum equals direct enumeration",
                (lib - total as f64).abs(),
                0.0,
            ));
        }
    }
    let top = p.pick(8u32, 10);
    let form = QuadraticForm::new(1, 1, 0)?;
    let sym2 = CoefficientSource::sym2_discriminant(8usize << (2 * top))?;
    let mut series = Vec::new();
    for e in 6..=top {
        let cfg = WindowConfig::binary(1 << e, 1.0, WindowMode::Smooth)?;
        series.push(((1u64 << e) as f64, eval_s_quad(&cfg, &form, &sym2)?.abs()));
    }
    let fit = exponent_fit(&series)?;
    out.push(
        Assertion::at_most("sums", "Sym2 exponent", "cancellation below the trivial exponent", fit.slope, 1.95)
            .with_detail(format!("X = 2^6..2^{top}, stderr {:.4}", fit.stderr)),
    );
    Ok(())
}

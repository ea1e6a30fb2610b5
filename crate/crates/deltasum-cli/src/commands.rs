//! Experiment commands: single evaluations and sweeps with JSON or CSV output.

use crate::params::{as_count, need, CliError, CliResult, Params, SourceArg, WeightArg, WindowArg};
use crate::report::{float17, Output, Table};
use deltasum::analytic::bump::BumpFunction;
use deltasum::analytic::delta::DeltaExpansion;
use deltasum::analytic::kernel::{export_kernel_csv, KernelConfig, KernelFamily, KernelSpectrum};
use deltasum::analytic::osc::{composite_bound, CompositeEngine, OscIntegralSpec, Windows};
use deltasum::analytic::voronoi::{voronoi_d3_check, VoronoiConfig};
use deltasum::arith::MultTables;
use deltasum::charsum::{frak_c, frak_s, zero_frequency_reduction, FreqSumInput, Sign};
use deltasum::coeffs::{CoefficientSource, KernelParams};
use deltasum::expsum::{kloosterman, kloosterman_direct, quad_gauss, ramanujan_sum, weil_ratio, Mode};
use deltasum::sums::{eval_s_quad, eval_sk, exponent_fit, theorem_exponents, Theorem, Weight, WindowConfig, WindowMode};
use deltasum::ComplexValue;
use serde_json::{json, Value};

fn pair(z: ComplexValue) -> Value {
    json!([z.re, z.im])
}

/// Multiplicative-function table on `1..=limit`.
pub fn sieve(p: &Params) -> CliResult<Output> {
    let limit = need(&p.limit, "limit")?;
    let t = MultTables::new(limit as usize)?;
    let mut table = Table::new(&["n", "d", "d3", "mu", "phi", "von_mangoldt"]);
    let (mut d3_sum, mut mu_sum, mut psi) = (0u64, 0i64, 0f64);
    for n in 1..=limit as usize {
        d3_sum += t.d3(n) as u64;
        mu_sum += t.mu(n) as i64;
        psi += t.von_mangoldt(n);
        table.push(vec![
            n.to_string(),
            t.d(n).to_string(),
            t.d3(n).to_string(),
            t.mu(n).to_string(),
            t.phi(n).to_string(),
            float17(t.von_mangoldt(n)),
        ]);
    }
    let json = json!({"limit": limit, "sum_d3": d3_sum, "mertens": mu_sum, "chebyshev_psi": psi});
    Ok(Output { json, table: Some(table) })
}

/// Kloosterman, Ramanujan and quadratic Gauss sums at one modulus.
pub fn expsum(p: &Params) -> CliResult<Output> {
    let q = need(&p.q, "q")?;
    let a = p.a.unwrap_or(1);
    let b = p.b.unwrap_or(1);
    let crt = kloosterman(a, b, q)?;
    let direct = kloosterman_direct(a, b, q);
    let mut json = json!({
        "q": q, "a": a, "b": b,
        "kloosterman": {"crt": pair(crt), "direct": pair(direct), "weil_ratio": weil_ratio(a, b, q)?},
        "ramanujan": ramanujan_sum(a, q)?,
        "gauss": {"direct": pair(quad_gauss(a, q, Mode::Direct)?)},
    });
    // the closed form needs (a, q) = 1
    if let Ok(closed) = quad_gauss(a, q, Mode::Closed) {
        json["gauss"]["closed"] = pair(closed);
    }
    let mut table = Table::new(&["sum", "mode", "re", "im"]);
    table.push(vec!["kloosterman".into(), "crt".into(), float17(crt.re), float17(crt.im)]);
    table.push(vec!["kloosterman".into(), "direct".into(), float17(direct.re), float17(direct.im)]);
    Ok(Output { json, table: Some(table) })
}

/// 𝔠 in both modes and the zero-frequency sum against its reduction.
pub fn charsum(p: &Params) -> CliResult<Output> {
    let q = need(&p.q, "q")?;
    let a = p.a.unwrap_or(1);
    let (m1, m2) = (p.m1.unwrap_or(0), p.m2.unwrap_or(0));
    let k = p.k.unwrap_or(3);
    let (n3, n3p) = (p.n3.unwrap_or(1), p.n3p.unwrap_or(1));
    let mut json = json!({"q": q, "a": a, "m1": m1, "m2": m2, "k": k, "n3": n3, "n3p": n3p});
    json["frak_c"] = json!({"direct": pair(frak_c(m1, m2, a, q, Mode::Direct)?)});
    if q % 2 == 1 {
        json["frak_c"]["closed"] = pair(frak_c(m1, m2, a, q, Mode::Closed)?);
        let s0 = frak_s(&FreqSumInput { q, n: 1, m1, m2, n3, n3p, k, m: 0, sign: Sign::Plus })?;
        json["zero_frequency"] = json!({"sum": pair(s0), "reduction": zero_frequency_reduction(q, n3, n3p, k)?});
    }
    Ok(Output { json, table: None })
}

/// Both sides of the `d3` Voronoi identity for `h` the canonical bump on `[X, 2X]`.
pub fn voronoi(p: &Params) -> CliResult<Output> {
    let q = need(&p.q, "q")?;
    let x = need(&p.x, "X")?;
    let h = BumpFunction::canonical(x, 2.0 * x)?;
    let r = voronoi_d3_check(p.a.unwrap_or(1), q, &h, &VoronoiConfig::default())?;
    let json = serde_json::to_value(&r).map_err(|e| CliError::Invalid(e.to_string()))?;
    Ok(Output { json, table: None })
}

/// `δ(n)` on `|n| <= nmax` at scale `Q`.
pub fn delta(p: &Params) -> CliResult<Output> {
    let big_q = need(&p.big_q, "Q")?;
    let nmax = p.nmax.unwrap_or(100) as i64;
    let d = DeltaExpansion::new(big_q)?;
    let mut table = Table::new(&["n", "delta", "absolute_mass"]);
    let mut worst: f64 = 0.0;
    for n in -nmax..=nmax {
        let v = d.delta_eval(n)?;
        worst = worst.max((v - (n == 0) as u8 as f64).abs());
        table.push(vec![n.to_string(), float17(v), float17(d.absolute_mass(n as f64)?)]);
    }
    let json = json!({"Q": big_q, "nmax": nmax, "max_deviation": worst, "max_modulus": d.max_modulus()});
    Ok(Output { json, table: Some(table) })
}

/// Composite integrals `ℒ±` at one modulus, and `𝔷(m)` when `--m` is given.
pub fn osc(p: &Params) -> CliResult<Output> {
    let x = need(&p.x, "X")?;
    let q = need(&p.q, "q")?;
    let mut spec = OscIntegralSpec::ternary(x, q, p.u.unwrap_or(1.0), 0.0);
    if let Some(big_q) = p.big_q {
        spec.big_q = big_q;
    }
    spec.n3 = p.n3.unwrap_or(1);
    spec.k = p.k.unwrap_or(3);
    let n2m = p.n2m.unwrap_or_else(|| spec.k_parameter());
    spec.n2m = n2m;
    let win = Windows::default();
    let delta = DeltaExpansion::new(spec.big_q)?;
    let engine = CompositeEngine::new(&spec, &win, &delta)?;
    let plus = engine.composite(n2m, Sign::Plus);
    let minus = engine.composite(n2m, Sign::Minus);
    let mut json = json!({
        "X": x, "Q": spec.big_q, "q": q, "n2m": n2m, "K": spec.k_parameter(), "M": spec.m_threshold(),
        "plus": plus, "minus": minus, "bound": composite_bound(&spec),
    });
    if let Some(m) = p.m {
        json["z"] = json!({"m": m, "value": engine.z_integral(&win, m, Sign::Plus), "zero": engine.z_integral(&win, 0.0, Sign::Plus)});
    }
    Ok(Output { json, table: None })
}

fn weight(w: WeightArg) -> Weight {
    match w {
        WeightArg::Unit => Weight::Unit,
        WeightArg::Mobius => Weight::Mobius,
        WeightArg::VonMangoldt => Weight::VonMangoldt,
    }
}

/// `𝒮_k(X)` (with `--k`) or the binary sum over `x² + y²` (with `--theta`) on a grid of `X`.
pub fn sum(p: &Params) -> CliResult<Output> {
    let xs = match (&p.xs, p.x) {
        (Some(v), _) => v.clone(),
        (None, Some(x)) => vec![as_count(x, "X")?],
        (None, None) => return Err(CliError::Missing("X")),
    };
    let mode = match p.window.unwrap_or(WindowArg::Sharp) {
        WindowArg::Sharp => WindowMode::Sharp,
        WindowArg::Smooth => WindowMode::Smooth,
    };
    let (source_arg, weight_arg) = (p.source.unwrap_or(SourceArg::D3), p.weight.unwrap_or(WeightArg::Unit));
    let form = deltasum::expsum::QuadraticForm::new(1, 1, 0)?;
    let cfgs: Vec<WindowConfig> = xs
        .iter()
        .map(|&x| match p.theta {
            Some(theta) => WindowConfig::binary(x, theta, mode),
            None => WindowConfig::ternary(x, p.k.unwrap_or(3), mode),
        })
        .collect::<Result<_, _>>()?;
    let binary = p.theta.is_some();
    let mut top = 1u128;
    for c in &cfgs {
        top = top.max(if binary { c.binary_top(&form)?.max(1) as u128 } else { c.ternary_top()? });
    }
    let source = match source_arg {
        SourceArg::D3 => CoefficientSource::triple_divisor(top as usize)?,
        SourceArg::Sym2 => CoefficientSource::sym2_discriminant(top as usize)?,
    };
    let (param, trivial) = match p.theta {
        Some(theta) => (theta, theorem_exponents(Theorem::Binary { theta })?.trivial),
        None => {
            let k = p.k.unwrap_or(3);
            (k as f64, theorem_exponents(Theorem::Ternary { k })?.trivial)
        }
    };
    let mut table = Table::new(&["X", "k_or_theta", "source", "weight", "value", "trivial_ratio"]);
    let mut rows = Vec::new();
    let mut series = Vec::new();
    for c in &cfgs {
        let v = if binary { eval_s_quad(c, &form, &source)? } else { eval_sk(c, &source, weight(weight_arg))? };
        let ratio = v.abs() / (c.x as f64).powf(trivial);
        table.push(vec![
            c.x.to_string(),
            float17(param),
            source_name(source_arg).into(),
            weight_name(weight_arg).into(),
            float17(v),
            float17(ratio),
        ]);
        rows.push(json!({"X": c.x, "value": v, "trivial_ratio": ratio}));
        series.push((c.x as f64, v.abs()));
    }
    let mut json = json!({"k_or_theta": param, "source": source_name(source_arg), "weight": weight_name(weight_arg), "rows": rows});
    if series.len() >= 3 {
        if let Ok(fit) = exponent_fit(&series) {
            json["fit"] = json!({"slope": fit.slope, "stderr": fit.stderr, "trivial_exponent": trivial});
        }
    }
    Ok(Output { json, table: Some(table) })
}

fn source_name(s: SourceArg) -> &'static str {
    match s {
        SourceArg::D3 => "d3",
        SourceArg::Sym2 => "sym2",
    }
}

fn weight_name(w: WeightArg) -> &'static str {
    match w {
        WeightArg::Unit => "unit",
        WeightArg::Mobius => "mobius",
        WeightArg::VonMangoldt => "von-mangoldt",
    }
}

/// Log-log slope of a CSV series with columns `X` and `value`.
pub fn fit(p: &Params) -> CliResult<Output> {
    let path = need(&p.series, "series")?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(&path).map_err(|e| CliError::Invalid(e.to_string()))?;
    let headers = reader.headers().map_err(|e| CliError::Invalid(e.to_string()))?.clone();
    let col = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let (xi, vi) = match (col("X"), col("value")) {
        (Some(x), Some(v)) => (x, v),
        _ => return Err(CliError::Invalid(format!("{}: need columns X and value", path.display()))),
    };
    let mut series = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Invalid(e.to_string()))?;
        let num = |i: usize| -> CliResult<f64> {
            rec.get(i)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| CliError::Type(format!("{} row {}: column {i} is not a number", path.display(), line + 2)))
        };
        series.push((num(xi)?, num(vi)?.abs()));
    }
    let f = exponent_fit(&series)?;
    let json = json!({"points": series.len(), "slope": f.slope, "stderr": f.stderr, "intercept": f.intercept});
    Ok(Output { json, table: None })
}

/// `G_0(y)` table for the canonical bump on `[1, 2]`, always CSV.
pub fn kernel(p: &Params) -> CliResult<String> {
    let ys = need(&p.ys, "ys")?;
    let cfg = KernelConfig { sigma: p.sigma.unwrap_or(KernelConfig::default().sigma), ..KernelConfig::default() };
    let g = BumpFunction::canonical(1.0, 2.0)?;
    let spec = KernelSpectrum::new(KernelFamily::Langlands { params: KernelParams::trivial(), ell: 0 }, &g, &cfg)?;
    let mut buf = Vec::new();
    export_kernel_csv(&spec, &ys, &mut buf)?;
    Ok(String::from_utf8_lossy(&buf).into_owned())
}

//! Two-sided numerical check of the `d3` Voronoi summation formula
//! `Σ d3(n) e(an/q) h(n) = q Σ_± Σ_{n1|q} Σ_{n2} Λ(n1,n2)/(n1 n2)·S(ā, ±n2; q/n1)·H_±(n1²n2/q³) + main terms`.

use super::bump::BumpFunction;
use super::constants::{hurwitz_stieltjes, Constants};
use super::kernel::{log_moments, KernelConfig, SignedKernel};
use crate::arith::{factorize, gcd, inv_mod, MultTables};
use crate::charsum::Sign;
use crate::error::{Error, Result};
use crate::expsum::{kloosterman, ramanujan_sum};
use crate::numeric::{ComplexSum, RootTable};
use num_complex::Complex;
use serde::Serialize;

type C64 = Complex<f64>;

/// Largest dual length accepted before reporting the budget as unreachable.
pub const MAX_DUAL_TERMS: u64 = 40_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoronoiConfig {
    pub kernel: KernelConfig,
    /// contour abscissae of the `l = 0` and `l = 1` kernels
    pub sigmas: [f64; 2],
    /// truncation budget for the dual sum, relative to `|LHS|`
    pub budget: f64,
}

impl Default for VoronoiConfig {
    fn default() -> Self {
        Self { kernel: KernelConfig { sigma: -0.5, ..KernelConfig::default() }, sigmas: [-0.5, -1.5], budget: 1e-6 }
    }
}

/// Main terms: coefficients of `h̃(1)`, `h̃'(1)`, `h̃''(1)` as printed and from the
/// Hurwitz-zeta residue.
#[derive(Debug, Clone, Serialize)]
pub struct MainTerms {
    /// `∫ h (log x)^k dx`, `k = 0, 1, 2`
    pub log_moments: [f64; 3],
    pub printed_coefficients: [f64; 3],
    pub oracle_coefficients: [f64; 3],
    /// `oracle / printed`, per coefficient
    pub coefficient_ratios: [f64; 3],
    /// printed terms with `h̃^{(k)}(1)` read as log-moments
    pub printed_value: f64,
    /// printed terms with `h̃^{(k)}(1)` read as the transform of `h^{(k)}`, which kills `k >= 1`
    pub derivative_reading_value: f64,
    pub oracle_value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DualContribution {
    pub n1: u64,
    pub sign: i8,
    pub terms: u64,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VoronoiReport {
    pub a: i64,
    pub q: u64,
    pub lhs: [f64; 2],
    pub dual: [f64; 2],
    pub dual_parts: Vec<DualContribution>,
    pub truncation_estimate: f64,
    pub kernel_tail: f64,
    pub main: MainTerms,
    pub rhs_printed: [f64; 2],
    pub rhs_oracle: [f64; 2],
    /// `|LHS - RHS| / |LHS|` with the printed main terms
    pub discrepancy_printed: f64,
    /// the same with the residue-derived main terms
    pub discrepancy_oracle: f64,
    /// `S(ā, 0; q/n1)` agreed with the Ramanujan sums for every `n1 | q`
    pub ramanujan_consistent: bool,
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

/// Local factor of `Λ(n1, ·)` at the primes of `q`.
fn local_dual_coeff(n1: u64, s_part: &[(u64, u32)]) -> Result<u64> {
    let mut total = 0;
    for m1 in factorize(n1)?.divisors() {
        for m2 in factorize(n1 / m1)?.divisors() {
            let m = n1 / (m1 * m2);
            let mut prod = 1u64;
            for &(p, e) in s_part {
                let e = e as u64;
                prod *= if m.is_multiple_of(p) { e + 1 } else { (e + 1) * (e + 2) / 2 };
            }
            total += prod;
        }
    }
    Ok(total)
}

fn d3_prime_power(e: u32) -> u64 {
    let e = e as u64;
    (e + 1) * (e + 2) / 2
}

/// Printed main-term coefficients.
fn printed_coefficients(abar: i64, q: u64, c: &Constants<f64>) -> Result<([f64; 3], bool)> {
    let (g, g1) = (c.euler_gamma, c.stieltjes_gamma1);
    let lq = (q as f64).ln();
    let mut out = [0.0; 3];
    let mut consistent = true;
    for n1 in factorize(q)?.divisors() {
        let f = factorize(n1)?;
        let d = f.num_divisors() as f64;
        let divs = f.divisors();
        let s1: f64 = divs.iter().map(|&l| (l as f64).ln()).sum();
        let s2: f64 = divs.iter().map(|&l| (l as f64).ln().powi(2)).sum();
        let ln1 = (n1 as f64).ln();
        let p1 = 5.0 / 3.0 * ln1 - 3.0 * lq + 3.0 * g - s1 / (3.0 * d);
        let p2 = ln1 * ln1 - 5.0 * lq * ln1 + 4.5 * lq * lq + 3.0 * g * g - 3.0 * g1 + 7.0 * g * ln1 - 9.0 * g * lq
            + ((ln1 + lq - 5.0 * g) * s1 - 1.5 * s2) / d;
        let r = q / n1;
        let k = kloosterman(abar, 0, r)?;
        let ram = ramanujan_sum(abar, r)? as f64;
        consistent &= (k.re - ram).abs() < 1e-9 && k.im.abs() < 1e-9;
        let w = n1 as f64 * d * ram;
        out[0] += w * p2;
        out[1] += w * p1;
        out[2] += w;
    }
    let q2 = (q * q) as f64;
    Ok(([out[0] / (2.0 * q2), out[1] / (2.0 * q2), out[2] / (4.0 * q2)], consistent))
}

/// Residue of `Σ d3(n) e(an/q) n^{-s}` at `s = 1` against `h̃`, via
/// `Σ_{b ∈ (Z/q)^3} e(a b1 b2 b3/q) Π q^{-s} ζ(s, b_i/q)`.
///
/// Returns the coefficients of `h̃(1)`, `h̃'(1)`, `h̃''(1)`.
pub fn residue_coefficients(a: i64, q: u64) -> Result<[C64; 3]> {
    if q == 0 {
        return Err(Error::range("q", 0, ">= 1"));
    }
    let lq = (q as f64).ln();
    let laurent: Vec<(f64, f64)> = (1..=q)
        .map(|b| {
            let x = b as f64 / q as f64;
            let g0: f64 = hurwitz_stieltjes(0, x);
            let g1: f64 = hurwitz_stieltjes(1, x);
            (g0 - lq, -g1 - lq * g0 + lq * lq / 2.0)
        })
        .collect();
    let roots = RootTable::<f64>::new(q);
    let mut c = [C64::new(0.0, 0.0); 3];
    for b1 in 1..=q {
        for b2 in 1..=q {
            for b3 in 1..=q {
                let e = roots.at(a as i128 * (b1 * b2 * b3) as i128);
                let (a1, bb1) = laurent[(b1 - 1) as usize];
                let (a2, bb2) = laurent[(b2 - 1) as usize];
                let (a3, bb3) = laurent[(b3 - 1) as usize];
                c[0] += e * (a1 * a2 + a1 * a3 + a2 * a3 + bb1 + bb2 + bb3);
                c[1] += e * (a1 + a2 + a3);
                c[2] += e;
            }
        }
    }
    let q3 = (q * q * q) as f64;
    Ok([c[0] / q3, c[1] / q3, c[2] / (2.0 * q3)])
}

/// Direct evaluation of `Σ d3(n) e(an/q) h(n)`.
pub fn voronoi_lhs(a: i64, q: u64, h: &BumpFunction<f64>) -> Result<C64> {
    let (lo, hi) = h.support();
    let top = hi.floor() as usize;
    let tables = MultTables::new(top + 1)?;
    let roots = RootTable::<f64>::new(q);
    let mut acc = ComplexSum::new();
    for n in (lo.ceil() as usize).max(1)..=top {
        acc.add(roots.at(a as i128 * n as i128) * (tables.d3(n) as f64 * h.value(n as f64)));
    }
    Ok(acc.value())
}

/// Both sides of the `d3` Voronoi formula with per-term contributions.
pub fn voronoi_d3_check(a: i64, q: u64, h: &BumpFunction<f64>, cfg: &VoronoiConfig) -> Result<VoronoiReport> {
    if q == 0 || gcd(a.unsigned_abs(), q) != 1 {
        return Err(Error::Precondition(format!("need gcd(a, q) = 1, got a = {a}, q = {q}")));
    }
    let (lo, _) = h.support();
    if lo < 100.0 {
        return Err(Error::Precondition("weight must live in [X, 2X] with X >= 100".into()));
    }
    let abar = if q == 1 { 0 } else { inv_mod(a, q)? as i64 };
    let lhs = voronoi_lhs(a, q, h)?;
    let kernel = SignedKernel::triple_divisor(h, cfg.sigmas, &cfg.kernel)?;
    let q_primes: Vec<u64> = factorize(q)?.primes().collect();
    let q3 = (q * q * q) as f64;
    let target = cfg.budget * lhs.norm();
    let (_, y_top) = kernel.y_range();

    // truncation points and the sieve length they need
    let divisors = factorize(q)?.divisors();
    let mut cuts = Vec::new();
    let mut truncation = 0.0;
    for &n1 in &divisors {
        let y_min = (n1 * n1) as f64 / q3;
        let mut y_cut = y_min * 16.0;
        loop {
            let n_cut = y_cut * q3 / (n1 * n1) as f64;
            let envelope = (q as f64 / n1 as f64) * n_cut.ln().max(1.0).powi(2) * 2.0 * kernel.log_tail_mass(y_cut);
            if envelope <= target / divisors.len() as f64 {
                truncation += envelope;
                break;
            }
            y_cut *= 1.25;
            if y_cut > y_top || n_cut > MAX_DUAL_TERMS as f64 {
                return Err(Error::Truncation { achieved: envelope / lhs.norm(), budget: cfg.budget });
            }
        }
        cuts.push((n1, (y_cut * q3 / (n1 * n1) as f64).ceil() as u64));
    }
    let sieve_len = cuts.iter().map(|c| c.1).max().unwrap_or(1) as usize;
    let tables = MultTables::new(sieve_len + 1)?;

    let mut parts = Vec::new();
    let mut dual = C64::new(0.0, 0.0);
    for &(n1, n_max) in &cuts {
        let r = q / n1;
        let kl: Vec<[C64; 2]> = (0..r)
            .map(|b| Ok([kloosterman(abar, b as i64, r)?, kloosterman(abar, -(b as i64), r)?]))
            .collect::<Result<_>>()?;
        let mut local_cache = std::collections::HashMap::new();
        let mut acc = [ComplexSum::new(), ComplexSum::new()];
        for n2 in 1..=n_max {
            // split off the primes of q
            let mut rest = n2;
            let mut s_part = Vec::new();
            for &p in &q_primes {
                let mut e = 0;
                while rest % p == 0 {
                    rest /= p;
                    e += 1;
                }
                if e > 0 {
                    s_part.push((p, e));
                }
            }
            let local = match local_cache.get(&s_part) {
                Some(&v) => v,
                None => {
                    let v = local_dual_coeff(n1, &s_part)?;
                    local_cache.insert(s_part.clone(), v);
                    v
                }
            };
            let s_d3: u64 = s_part.iter().map(|&(_, e)| d3_prime_power(e)).product();
            let coeff = (tables.d3(n2 as usize) as u64 / s_d3 * local) as f64;
            let y = (n1 * n1) as f64 * n2 as f64 / q3;
            let w = coeff / (n1 as f64 * n2 as f64);
            let k = &kl[(n2 % r) as usize];
            acc[0].add(k[0] * kernel.eval(y, Sign::Plus) * w);
            acc[1].add(k[1] * kernel.eval(y, Sign::Minus) * w);
        }
        for (i, sign) in [1i8, -1].into_iter().enumerate() {
            let v = acc[i].value() * q as f64;
            dual += v;
            parts.push(DualContribution { n1, sign, terms: n_max, re: v.re, im: v.im });
        }
    }

    let consts = Constants::<f64>::compute();
    let moments = log_moments(h)?;
    let (printed, ramanujan_consistent) = printed_coefficients(abar, q, &consts)?;
    let oracle_c = residue_coefficients(a, q)?;
    let oracle: [f64; 3] = [oracle_c[0].re, oracle_c[1].re, oracle_c[2].re];
    let dot = |c: &[f64; 3]| c.iter().zip(&moments).map(|(x, m)| x * m).sum::<f64>();
    let main = MainTerms {
        log_moments: moments,
        printed_coefficients: printed,
        oracle_coefficients: oracle,
        coefficient_ratios: [oracle[0] / printed[0], oracle[1] / printed[1], oracle[2] / printed[2]],
        printed_value: dot(&printed),
        derivative_reading_value: printed[0] * moments[0],
        oracle_value: oracle_c.iter().zip(&moments).map(|(c, m)| c * *m).sum::<C64>().re,
    };
    let rhs_printed = dual + main.printed_value;
    let rhs_oracle = dual + oracle_c.iter().zip(&moments).map(|(c, m)| c * *m).sum::<C64>();
    Ok(VoronoiReport {
        a,
        q,
        lhs: pair(lhs),
        dual: pair(dual),
        dual_parts: parts,
        truncation_estimate: truncation / lhs.norm(),
        kernel_tail: kernel.tail_fraction(),
        discrepancy_printed: (lhs - rhs_printed).norm() / lhs.norm(),
        discrepancy_oracle: (lhs - rhs_oracle).norm() / lhs.norm(),
        rhs_printed: pair(rhs_printed),
        rhs_oracle: pair(rhs_oracle),
        main,
        ramanujan_consistent,
    })
}

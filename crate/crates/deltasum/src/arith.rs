//! Exact integer arithmetic: factorization, sieves, symbols, modulus splits.

use crate::error::{Error, Result};
use num_complex::Complex;

/// Largest input accepted by [`factorize`].
pub const FACTOR_LIMIT: u64 = 1 << 63;

/// Trial division bound before switching to Pollard's rho.
const TRIAL_BOUND: u64 = 1_000_000;

/// Default memory budget for [`MultTables`], in bytes.
pub const DEFAULT_TABLE_BUDGET: u64 = 2 << 30;

/// Bytes per entry of [`MultTables`]: `d`, `d3`, `phi` as `u32`, `mu` as `i8`,
/// von Mangoldt as `f64`, plus sieve scratch (`u32` smallest prime factor,
/// `u8` exponent, `u32` cofactor) that lives during construction.
pub const TABLE_BYTES_PER_ENTRY: u64 = 4 + 4 + 4 + 1 + 8 + 4 + 1 + 4;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn gcd_i(a: i64, b: i64) -> u64 {
    gcd(a.unsigned_abs(), b.unsigned_abs())
}

/// `floor(sqrt(n))`, exact.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|s| s > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|s| s <= n) {
        r += 1;
    }
    r
}

/// `floor(cbrt(n))`, exact.
pub fn icbrt(n: u64) -> u64 {
    let mut r = (n as f64).cbrt() as u64;
    let cube = |x: u64| x.checked_mul(x).and_then(|y| y.checked_mul(x));
    while cube(r).is_none_or(|c| c > n) {
        r -= 1;
    }
    while cube(r + 1).is_some_and(|c| c <= n) {
        r += 1;
    }
    r
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Reduces a signed integer into `[0, q)`.
#[inline]
pub fn reduce(a: i64, q: u64) -> u64 {
    (a as i128).rem_euclid(q as i128) as u64
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent's variant of Pollard's rho with fixed seeds; `n` odd composite.
fn pollard_rho(n: u64) -> u64 {
    for c in 1u64.. {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut y, m) = (2u64, 128u64);
        let (mut g, mut r, mut q) = (1u64, 1u64, 1u64);
        let mut x = y;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += m;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!()
}

/// Prime-power decomposition with strictly increasing primes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Factorization {
    pub entries: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn value(&self) -> u64 {
        self.entries.iter().map(|&(p, e)| p.pow(e)).product()
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.iter().map(|&(p, _)| p)
    }

    pub fn num_divisors(&self) -> u64 {
        self.entries.iter().map(|&(_, e)| e as u64 + 1).product()
    }

    pub fn d3(&self) -> u64 {
        self.entries
            .iter()
            .map(|&(_, e)| (e as u64 + 1) * (e as u64 + 2) / 2)
            .product()
    }

    pub fn mobius(&self) -> i8 {
        if self.entries.iter().any(|&(_, e)| e > 1) {
            0
        } else if self.entries.len().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    pub fn euler_phi(&self) -> u64 {
        self.entries
            .iter()
            .map(|&(p, e)| p.pow(e - 1) * (p - 1))
            .product()
    }

    pub fn von_mangoldt(&self) -> f64 {
        match self.entries.as_slice() {
            [(p, _)] => (*p as f64).ln(),
            _ => 0.0,
        }
    }

    /// All positive divisors in increasing order.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.entries {
            let len = divs.len();
            let mut pk = 1;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }
}

/// Factors `1 <= n <= 2^63` by trial division below 10⁶ and Pollard's rho above.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 || n > FACTOR_LIMIT {
        return Err(Error::range("factorize input", n, FACTOR_LIMIT));
    }
    let mut primes = Vec::new();
    let mut m = n;
    for p in [2u64, 3] {
        while m.is_multiple_of(p) {
            primes.push(p);
            m /= p;
        }
    }
    let mut p = 5;
    while p <= TRIAL_BOUND && p * p <= m {
        for cand in [p, p + 2] {
            while m.is_multiple_of(cand) {
                primes.push(cand);
                m /= cand;
            }
        }
        p += 6;
    }
    if m > 1 {
        let mut stack = vec![m];
        while let Some(x) = stack.pop() {
            if x == 1 {
                continue;
            }
            if is_prime(x) {
                primes.push(x);
                continue;
            }
            let d = pollard_rho(x);
            stack.push(d);
            stack.push(x / d);
        }
    }
    primes.sort_unstable();
    let mut entries: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match entries.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => entries.push((p, 1)),
        }
    }
    Ok(Factorization { entries })
}

/// Flat tables of `d`, `d3`, `μ`, `Λ` and `φ` on `1..=N` (index 0 unused).
#[derive(Debug, Clone)]
pub struct MultTables {
    limit: usize,
    d: Vec<u32>,
    d3: Vec<u32>,
    mu: Vec<i8>,
    lambda: Vec<f64>,
    phi: Vec<u32>,
}

impl MultTables {
    /// Linear sieve under [`DEFAULT_TABLE_BUDGET`].
    pub fn new(limit: usize) -> Result<Self> {
        Self::with_budget(limit, DEFAULT_TABLE_BUDGET)
    }

    /// Linear sieve; fails when `limit·TABLE_BYTES_PER_ENTRY` exceeds `budget`.
    pub fn with_budget(limit: usize, budget: u64) -> Result<Self> {
        if limit == 0 {
            return Err(Error::range("table limit", 0, "at least 1"));
        }
        if limit as u64 >= u32::MAX as u64 {
            return Err(Error::range("table limit", limit, u32::MAX));
        }
        let need = (limit as u64 + 1).saturating_mul(TABLE_BYTES_PER_ENTRY);
        if need > budget {
            return Err(Error::MemoryBudget { requested: need, limit: budget });
        }
        let n = limit + 1;
        let mut spf = vec![0u32; n];
        let mut primes: Vec<u32> = Vec::new();
        for i in 2..n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                let ip = i * p as usize;
                if p > si || ip >= n {
                    break;
                }
                spf[ip] = p;
            }
        }
        drop(primes);
        let mut exp = vec![0u8; n];
        let mut rest = vec![0u32; n];
        let mut d = vec![0u32; n];
        let mut d3 = vec![0u32; n];
        let mut mu = vec![0i8; n];
        let mut lambda = vec![0f64; n];
        let mut phi = vec![0u32; n];
        d[1] = 1;
        d3[1] = 1;
        mu[1] = 1;
        phi[1] = 1;
        rest[1] = 1;
        for i in 2..n {
            let p = spf[i] as usize;
            let m = i / p;
            let (e, r) = if m > 1 && spf[m] as usize == p {
                (exp[m] + 1, rest[m] as usize)
            } else {
                (1u8, m)
            };
            exp[i] = e;
            rest[i] = r as u32;
            let e32 = e as u32;
            d[i] = d[r] * (e32 + 1);
            d3[i] = d3[r] * (e32 + 1) * (e32 + 2) / 2;
            mu[i] = if e > 1 { 0 } else { -mu[r] };
            phi[i] = phi[r] * (p as u32).pow(e32 - 1) * (p as u32 - 1);
            if r == 1 {
                lambda[i] = (p as f64).ln();
            }
        }
        Ok(Self { limit, d, d3, mu, lambda, phi })
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    pub fn d(&self, n: usize) -> u32 {
        self.d[n]
    }

    pub fn d3(&self, n: usize) -> u32 {
        self.d3[n]
    }

    pub fn mu(&self, n: usize) -> i8 {
        self.mu[n]
    }

    pub fn von_mangoldt(&self, n: usize) -> f64 {
        self.lambda[n]
    }

    pub fn phi(&self, n: usize) -> u32 {
        self.phi[n]
    }

    pub fn d3_slice(&self) -> &[u32] {
        &self.d3
    }
}

/// Jacobi symbol `(a|n)` for odd positive `n`.
pub fn jacobi(a: i64, n: u64) -> Result<i8> {
    if n.is_multiple_of(2) {
        return Err(Error::EvenModulus(n));
    }
    let mut a = reduce(a, n);
    let mut n = n;
    let mut sign = 1i8;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    Ok(if n == 1 { sign } else { 0 })
}

/// `1` for `q ≡ 1 (mod 4)`, `i` for `q ≡ 3 (mod 4)`.
pub fn eps_q(q: u64) -> Result<Complex<f64>> {
    match q % 4 {
        1 => Ok(Complex::new(1.0, 0.0)),
        3 => Ok(Complex::new(0.0, 1.0)),
        _ => Err(Error::EvenModulus(q)),
    }
}

/// As [`eps_q`] for a signed odd argument, reading `q ≡ -1 (mod 4)` literally.
pub fn eps_signed(a: i64) -> Result<Complex<f64>> {
    match a.rem_euclid(4) {
        1 => Ok(Complex::new(1.0, 0.0)),
        3 => Ok(Complex::new(0.0, 1.0)),
        _ => Err(Error::EvenModulus(a.unsigned_abs())),
    }
}

/// Inverse of `a` modulo `q` in `[0, q)`.
pub fn inv_mod(a: i64, q: u64) -> Result<u64> {
    if q == 0 {
        return Err(Error::range("modulus", 0, "at least 1"));
    }
    if q == 1 {
        return Ok(0);
    }
    let (mut r0, mut r1) = (q as i128, reduce(a, q) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let t = r0 / r1;
        (r0, r1) = (r1, r0 - t * r1);
        (s0, s1) = (s1, s0 - t * s1);
    }
    if r0 != 1 {
        return Err(Error::NotInvertible { a, q });
    }
    Ok(s0.rem_euclid(q as i128) as u64)
}

/// `q = squarefree · squarefull` with coprime parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SquarefullSplit {
    pub squarefree: u64,
    pub squarefull: u64,
}

pub fn squarefull_split(q: u64) -> Result<SquarefullSplit> {
    let f = factorize(q)?;
    let mut split = SquarefullSplit { squarefree: 1, squarefull: 1 };
    for &(p, e) in &f.entries {
        if e == 1 {
            split.squarefree *= p;
        } else {
            split.squarefull *= p.pow(e);
        }
    }
    Ok(split)
}

/// Number of squarefull `n <= x` (1 included).
///
/// Every squarefull number is uniquely `a²b³` with `b` squarefree.
pub fn count_squarefull(x: u64) -> u64 {
    if x == 0 {
        return 0;
    }
    let bmax = icbrt(x) as usize;
    let mu = small_mobius(bmax);
    (1..=bmax)
        .filter(|&b| mu[b] != 0)
        .map(|b| {
            let b3 = (b as u64).pow(3);
            isqrt(x / b3)
        })
        .sum()
}

fn small_mobius(n: usize) -> Vec<i8> {
    let mut mu = vec![1i8; n + 1];
    let mut composite = vec![false; n + 1];
    for p in 2..=n {
        if composite[p] {
            continue;
        }
        for m in (p..=n).step_by(p) {
            if m > p {
                composite[m] = true;
            }
            mu[m] = -mu[m];
        }
        let p2 = p * p;
        for m in (p2..=n).step_by(p2) {
            mu[m] = 0;
        }
    }
    mu
}

/// `q = seed_part · coprime_part` where `seed_part` collects the primes of `q`
/// that divide `seed` and `coprime_part` is prime to `seed`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModulusSplit {
    pub seed_part: u64,
    pub coprime_part: u64,
    pub seed: u64,
}

pub fn modulus_split(q: u64, seed: u64) -> Result<ModulusSplit> {
    if seed == 0 {
        return Err(Error::range("split seed", 0, "at least 1"));
    }
    let f = factorize(q)?;
    let mut split = ModulusSplit { seed_part: 1, coprime_part: 1, seed };
    for &(p, e) in &f.entries {
        if seed.is_multiple_of(p) {
            split.seed_part *= p.pow(e);
        } else {
            split.coprime_part *= p.pow(e);
        }
    }
    Ok(split)
}

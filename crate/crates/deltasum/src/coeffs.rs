//! Coefficient sources: the triple divisor function, the symmetric-square lift
//! of the discriminant form, and user supplied tables.

use crate::arith::{factorize, gcd, MultTables};
use crate::error::{Error, Result};
use crate::numeric::ntt::{garner, NttPrime};
use crate::ComplexValue;
use std::collections::HashMap;
use std::path::Path;

/// Number of ordered pairs `(d1, d2)` with `d1 | n`, `d2 | n/d1`, `(d2, m) = 1`.
pub fn sigma00(m: u64, n: u64) -> Result<u64> {
    let f = factorize(n)?;
    let mut count = 0;
    for d1 in f.divisors() {
        let rest = factorize(n / d1)?;
        count += rest.divisors().into_iter().filter(|&d2| gcd(d2, m) == 1).count() as u64;
    }
    Ok(count)
}

/// Dual coefficient of the `d3` Voronoi formula:
/// `Σ_{m1 | n1} Σ_{m2 | n1/m1} σ00(n1/(m1 m2), n2)`.
pub fn d3_dual_coeff(n1: u64, n2: u64) -> Result<u64> {
    let mut total = 0;
    for m1 in factorize(n1)?.divisors() {
        for m2 in factorize(n1 / m1)?.divisors() {
            total += sigma00(n1 / (m1 * m2), n2)?;
        }
    }
    Ok(total)
}

/// Largest tau table accepted by [`TauTable::new`]; three `u64` residue vectors
/// of twice this length are live during the final squaring.
pub const TAU_LIMIT: usize = 1 << 23;

/// Ramanujan's `τ(n)` for `1 <= n <= N`.
///
/// `Δ = q·E(q)^8` with `E = Π(1 - q^n)^3 = Σ_k (-1)^k (2k+1) q^{k(k+1)/2}`. `E²` is
/// formed from the sparse series directly; two truncated squarings modulo three
/// primes near `2^62` follow, and Garner's algorithm recovers the integers.
#[derive(Debug, Clone)]
pub struct TauTable {
    values: Vec<f64>,
    exact: Vec<Option<i128>>,
}

impl TauTable {
    pub fn new(limit: usize) -> Result<Self> {
        if limit == 0 || limit > TAU_LIMIT {
            return Err(Error::range("tau table size", limit, TAU_LIMIT));
        }
        // τ(n) is the coefficient of q^{n-1} in E^8
        let len = limit;
        let mut sparse: Vec<(usize, i64)> = Vec::new();
        for k in 0.. {
            let e = k * (k + 1) / 2;
            if e >= len {
                break;
            }
            let c = (2 * k as i64 + 1) * if k % 2 == 0 { 1 } else { -1 };
            sparse.push((e, c));
        }
        let mut e2 = vec![0i64; len];
        for &(i, ci) in &sparse {
            for &(j, cj) in &sparse {
                if i + j >= len {
                    break;
                }
                e2[i + j] += ci * cj;
            }
        }
        let primes = NttPrime::largest(3);
        let mut residues: Vec<Vec<u64>> = Vec::with_capacity(3);
        for p in &primes {
            let enc: Vec<u64> = e2.iter().map(|&c| p.encode(c)).collect();
            let e4 = p.square_truncated(&enc, len);
            drop(enc);
            let mut e8 = p.square_truncated(&e4, len);
            for x in e8.iter_mut() {
                *x = p.from_mont(*x);
            }
            residues.push(e8);
        }
        let mut values = vec![0f64; limit + 1];
        let mut exact = vec![None; limit + 1];
        let mut r = [0u64; 3];
        for n in 1..=limit {
            for (slot, res) in r.iter_mut().zip(&residues) {
                *slot = res[n - 1];
            }
            let (v, e) = garner(&r, &primes);
            values[n] = v;
            exact[n] = e;
        }
        Ok(Self { values, exact })
    }

    pub fn limit(&self) -> usize {
        self.values.len() - 1
    }

    pub fn tau(&self, n: usize) -> f64 {
        self.values[n]
    }

    pub fn tau_exact(&self, n: usize) -> Option<i128> {
        self.exact[n]
    }

    /// `λ(n) = τ(n) / n^{11/2}`.
    pub fn normalized(&self, n: usize) -> f64 {
        self.values[n] / (n as f64).powf(5.5)
    }
}

/// Complete homogeneous symmetric polynomials `h_0..=h_k` of `{t, 1, 1/t}` where
/// `t + 1/t = λ² - 2`; real and division free.
fn complete_homogeneous(lambda: f64, k: usize) -> Vec<f64> {
    let e1 = lambda * lambda - 1.0;
    let mut h = vec![0f64; k + 1];
    h[0] = 1.0;
    for j in 1..=k {
        let mut v = e1 * h[j - 1];
        if j >= 2 {
            v -= e1 * h[j - 2];
        }
        if j >= 3 {
            v += h[j - 3];
        }
        h[j] = v;
    }
    h
}

/// `s_(a+b, b, 0)` of `{α², 1, α^{-2}}` by Jacobi–Trudi in the `h_k`.
pub fn schur_local(lambda: f64, a: u32, b: u32) -> f64 {
    let parts = [(a + b) as i64, b as i64, 0i64];
    let h = complete_homogeneous(lambda, (a + b + 2) as usize);
    let hk = |k: i64| if k < 0 { 0.0 } else { h[k as usize] };
    let mut m = [[0f64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = hk(parts[i] - i as i64 + j as i64);
        }
    }
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Switchover for the confluent Weyl ratio.
pub const CONFLUENT_THRESHOLD: f64 = 1e-8;

/// `s_(a+b, b, 0)` of `{α², 1, α^{-2}}` as a Weyl determinant ratio, with the
/// L'Hôpital limit when `|α² - 1|` or `|α² + 1|` falls below [`CONFLUENT_THRESHOLD`].
pub fn schur_weyl(lambda: f64, a: u32, b: u32) -> f64 {
    let cos = (lambda / 2.0).clamp(-1.0, 1.0);
    let theta = cos.acos();
    let t = ComplexValue::from_polar(1.0, 2.0 * theta);
    let mu = [(a + b + 2) as i32, (b + 1) as i32, 0i32];
    let delta = [2i32, 1, 0];
    let one = ComplexValue::new(1.0, 0.0);
    if (t - one).norm() < CONFLUENT_THRESHOLD {
        // all three parameters coincide at 1: Weyl dimension formula
        let l = [(a + b) as f64, b as f64, 0.0];
        return (l[0] - l[1] + 1.0) * (l[0] - l[2] + 2.0) * (l[1] - l[2] + 1.0) / 2.0;
    }
    let det = |rows: &[[ComplexValue; 3]; 3]| -> ComplexValue {
        rows[0][0] * (rows[1][1] * rows[2][2] - rows[1][2] * rows[2][1])
            - rows[0][1] * (rows[1][0] * rows[2][2] - rows[1][2] * rows[2][0])
            + rows[0][2] * (rows[1][0] * rows[2][1] - rows[1][1] * rows[2][0])
    };
    let build = |exps: &[i32; 3], confluent: bool| -> [[ComplexValue; 3]; 3] {
        let x = [t, one, t.inv()];
        let mut rows = [[one; 3]; 3];
        for j in 0..3 {
            rows[0][j] = x[0].powi(exps[j]);
            rows[1][j] = x[1].powi(exps[j]);
            rows[2][j] = if confluent {
                // derivative in x3 at x3 = x1
                if exps[j] == 0 {
                    ComplexValue::new(0.0, 0.0)
                } else {
                    x[0].powi(exps[j] - 1) * exps[j] as f64
                }
            } else {
                x[2].powi(exps[j])
            };
        }
        rows
    };
    let confluent = (t + one).norm() < CONFLUENT_THRESHOLD;
    let num = det(&build(&mu, confluent));
    let den = det(&build(&delta, confluent));
    (num / den).re
}

/// Coefficients `Λ(m, n)` of the symmetric-square lift of `Δ`.
#[derive(Debug, Clone)]
pub struct Sym2Table {
    tau: TauTable,
    /// `Λ(1, n)` for `n <= limit`
    first_row: Vec<f64>,
}

impl Sym2Table {
    pub fn new(limit: usize) -> Result<Self> {
        let tau = TauTable::new(limit)?;
        let mut first_row = vec![0f64; limit + 1];
        first_row[1] = 1.0;
        // smallest prime factor sieve drives the multiplicative extension
        let mut spf = vec![0u32; limit + 1];
        for i in 2..=limit {
            if spf[i] == 0 {
                let mut j = i;
                while j <= limit {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        let mut local_cache: HashMap<(usize, u32), f64> = HashMap::new();
        for n in 2..=limit {
            let p = spf[n] as usize;
            let mut m = n;
            let mut e = 0u32;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            let local = if e == 1 {
                let l = tau.normalized(p);
                l * l - 1.0
            } else {
                *local_cache
                    .entry((p, e))
                    .or_insert_with(|| schur_local(tau.normalized(p), 0, e))
            };
            first_row[n] = first_row[m] * local;
        }
        Ok(Self { tau, first_row })
    }

    pub fn limit(&self) -> usize {
        self.first_row.len() - 1
    }

    pub fn tau(&self) -> &TauTable {
        &self.tau
    }

    /// `Λ(1, n)` from the table.
    pub fn first_row(&self, n: usize) -> f64 {
        self.first_row[n]
    }

    /// `Λ(m, n)` through the factorizations of `m` and `n`.
    pub fn coeff(&self, m: u64, n: u64) -> Result<f64> {
        let fm = factorize(m)?;
        let fn_ = factorize(n)?;
        let mut local: HashMap<u64, (u32, u32)> = HashMap::new();
        for &(p, e) in &fm.entries {
            local.entry(p).or_default().0 = e;
        }
        for &(p, e) in &fn_.entries {
            local.entry(p).or_default().1 = e;
        }
        let mut value = 1.0;
        for (p, (a, b)) in local {
            if p as usize > self.tau.limit() {
                return Err(Error::range("prime for tau lookup", p, self.tau.limit()));
            }
            value *= schur_local(self.tau.normalized(p as usize), a, b);
        }
        Ok(value)
    }
}

/// Langlands parameters of the archimedean kernel; sum zero, real parts in `(-1/2, 1/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub alpha: [ComplexValue; 3],
}

impl KernelParams {
    pub fn new(alpha: [ComplexValue; 3]) -> Result<Self> {
        let s: ComplexValue = alpha.iter().sum();
        if s.norm() > 1e-12 {
            return Err(Error::Precondition(format!("Langlands parameters sum to {s}, not 0")));
        }
        if alpha.iter().any(|a| a.re.abs() >= 0.5) {
            return Err(Error::Precondition("Langlands parameters need |Re| < 1/2".into()));
        }
        Ok(Self { alpha })
    }

    /// The `d3` instance `(0, 0, 0)`.
    pub fn trivial() -> Self {
        Self { alpha: [ComplexValue::new(0.0, 0.0); 3] }
    }
}

/// Which family a [`CoefficientSource`] draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceKind {
    TripleDivisor,
    Sym2Discriminant,
    UserTable,
}

#[derive(Debug, Clone)]
enum Backing {
    Triple(MultTables),
    Sym2(Box<Sym2Table>),
    User { first_row: Vec<f64>, pairs: HashMap<(u64, u64), f64> },
}

/// Supplier of `Λ(m, n)` (and `A(n) = Λ(1, n)`) with cached tables up to a limit.
#[derive(Debug, Clone)]
pub struct CoefficientSource {
    limit: usize,
    backing: Backing,
}

impl CoefficientSource {
    /// `A(n) = d3(n)`; `Λ(m, n)` is the dual `d3` Voronoi coefficient.
    pub fn triple_divisor(limit: usize) -> Result<Self> {
        Ok(Self { limit, backing: Backing::Triple(MultTables::new(limit)?) })
    }

    pub fn sym2_discriminant(limit: usize) -> Result<Self> {
        Ok(Self { limit, backing: Backing::Sym2(Box::new(Sym2Table::new(limit)?)) })
    }

    /// Loads a headerless CSV with rows `n,value` or `m,n,value`.
    pub fn user_table(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::Table(e.to_string()))?;
        let mut rows: Vec<(u64, u64, f64)> = Vec::new();
        for (line, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| Error::Table(e.to_string()))?;
            let parse_u = |s: &str| s.parse::<u64>().map_err(|e| Error::Table(format!("row {}: {e}", line + 1)));
            let parse_f = |s: &str| s.parse::<f64>().map_err(|e| Error::Table(format!("row {}: {e}", line + 1)));
            match rec.len() {
                2 => rows.push((1, parse_u(&rec[0])?, parse_f(&rec[1])?)),
                3 => rows.push((parse_u(&rec[0])?, parse_u(&rec[1])?, parse_f(&rec[2])?)),
                k => return Err(Error::Table(format!("row {} has {k} columns", line + 1))),
            }
        }
        Self::from_rows(rows)
    }

    /// Builds a user table from `(m, n, value)` rows.
    pub fn from_rows(rows: Vec<(u64, u64, f64)>) -> Result<Self> {
        let limit = rows.iter().filter(|r| r.0 == 1).map(|r| r.1).max().unwrap_or(0) as usize;
        let mut first_row = vec![0f64; limit + 1];
        let mut pairs = HashMap::new();
        for (m, n, v) in rows {
            if n == 0 || m == 0 {
                return Err(Error::Table("indices start at 1".into()));
            }
            if m == 1 {
                first_row[n as usize] = v;
            }
            pairs.insert((m, n), v);
        }
        Ok(Self { limit, backing: Backing::User { first_row, pairs } })
    }

    pub fn kind(&self) -> SourceKind {
        match self.backing {
            Backing::Triple(_) => SourceKind::TripleDivisor,
            Backing::Sym2(_) => SourceKind::Sym2Discriminant,
            Backing::User { .. } => SourceKind::UserTable,
        }
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    /// `A(n) = Λ(1, n)` from the cached table.
    pub fn first_row(&self, n: u64) -> Result<f64> {
        if n == 0 || n as usize > self.limit {
            return Err(Error::range("coefficient index", n, self.limit));
        }
        let n = n as usize;
        Ok(match &self.backing {
            Backing::Triple(t) => t.d3(n) as f64,
            Backing::Sym2(s) => s.first_row(n),
            Backing::User { first_row, .. } => first_row[n],
        })
    }

    /// `Λ(m, n)`.
    pub fn coeff(&self, m: u64, n: u64) -> Result<f64> {
        if m == 1 {
            return self.first_row(n);
        }
        match &self.backing {
            Backing::Triple(_) => Ok(d3_dual_coeff(m, n)? as f64),
            Backing::Sym2(s) => s.coeff(m, n),
            Backing::User { pairs, .. } => pairs
                .get(&(m, n))
                .copied()
                .ok_or_else(|| Error::range("user table entry", format!("({m}, {n})"), "absent")),
        }
    }

    pub fn d3_tables(&self) -> Option<&MultTables> {
        match &self.backing {
            Backing::Triple(t) => Some(t),
            _ => None,
        }
    }
}

/// `Σ_{m²n <= X} |Λ(m,n)|² / (m²n)^w` and, for `w < 1`, its ratio to `X^{1-w}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L2Report {
    pub sum: f64,
    pub ratio: Option<f64>,
}

pub fn l2_ratio(x: u64, source: &CoefficientSource, w: f64) -> Result<L2Report> {
    if w < 0.0 {
        return Err(Error::Precondition("weight exponent must be nonnegative".into()));
    }
    if x as usize > source.limit() {
        return Err(Error::range("l2 range", x, source.limit()));
    }
    let mut sum = crate::numeric::CompensatedSum::new();
    let mut m = 1u64;
    while m * m <= x {
        for n in 1..=x / (m * m) {
            let v = source.coeff(m, n)?;
            sum.add(v * v / ((m * m * n) as f64).powf(w));
        }
        m += 1;
    }
    let sum = sum.value();
    let ratio = (w < 1.0).then(|| sum / (x as f64).powf(1.0 - w));
    Ok(L2Report { sum, ratio })
}

//! The quadratic character sums built on top of Kloosterman sums, the frequency
//! sums obtained after the second Poisson step, the Kloosterman correlation and
//! the quadratic-form sum of the binary problem. Every sum has a brute-force
//! evaluator; closed forms and bound ratios sit beside them.

use crate::arith::{self, eps_q, factorize, gcd, inv_mod, modulus_split, reduce, squarefull_split};
use crate::error::{Error, Result};
use crate::expsum::{kloosterman_with, ramanujan_sum, Mode, QuadraticForm};
use crate::numeric::{ComplexSum, RootTable};
use crate::ComplexValue;

/// Largest modulus accepted by the quadruple-loop evaluators.
pub const BRUTE_FORCE_CAP: u64 = 1000;

/// Sign attached to the dual frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

fn check_cap(q: u64) -> Result<()> {
    if q > BRUTE_FORCE_CAP {
        return Err(Error::range("brute-force modulus", q, BRUTE_FORCE_CAP));
    }
    Ok(())
}

fn check_divides(n: u64, q: u64) -> Result<()> {
    if n == 0 || !q.is_multiple_of(n) {
        return Err(Error::NotDivisor { n, q });
    }
    Ok(())
}

/// `n^k mod q` for a nonnegative base.
fn pow_residue(n: u64, k: u32, q: u64) -> u64 {
    arith::pow_mod(n % q, k as u64, q)
}

fn frak_c_direct(roots: &RootTable<f64>, m1: i64, m2: i64, a: i64) -> ComplexValue {
    let q = roots.modulus();
    let (a, m1, m2) = (reduce(a, q), reduce(m1, q), reduce(m2, q));
    let mut acc = ComplexSum::new();
    for x in 0..q {
        let px = (arith::mul_mod(a, arith::mul_mod(x, x, q), q) + arith::mul_mod(m1, x, q)) % q;
        for y in 0..q {
            let py = (arith::mul_mod(a, arith::mul_mod(y, y, q), q) + arith::mul_mod(m2, y, q)) % q;
            acc.add(roots.get((px + py) % q));
        }
    }
    acc.value()
}

fn frak_c_closed(m1: i64, m2: i64, a: i64, q: u64) -> Result<ComplexValue> {
    let eps = eps_q(q)?;
    let inv4a = inv_mod(reduce(4 * reduce(a, q) as i64, q) as i64, q)?;
    let msq = (reduce(m1, q) as u128 * reduce(m1, q) as u128 + reduce(m2, q) as u128 * reduce(m2, q) as u128)
        % q as u128;
    let k = (inv4a as u128 * msq % q as u128) as u64;
    let roots = RootTable::<f64>::new(q);
    Ok(eps * eps * q as f64 * roots.get((q - k) % q))
}

/// `𝔠(m1, m2, a; q) = Σ_{α1, α2 mod q} e((a(α1² + α2²) + m1 α1 + m2 α2)/q)`.
///
/// Closed mode returns `ε_q² q e(-(4a)⁻¹(m1² + m2²)/q)` and needs odd `q`.
pub fn frak_c(m1: i64, m2: i64, a: i64, q: u64, mode: Mode) -> Result<ComplexValue> {
    if q == 0 {
        return Err(Error::range("modulus", 0, "at least 1"));
    }
    if gcd(reduce(a, q), q) != 1 {
        return Err(Error::NotInvertible { a, q });
    }
    match mode {
        Mode::Direct => {
            check_cap(q)?;
            Ok(frak_c_direct(&RootTable::new(q), m1, m2, a))
        }
        Mode::Closed => {
            if q.is_multiple_of(2) {
                return Err(Error::EvenModulus(q));
            }
            frak_c_closed(m1, m2, a, q)
        }
    }
}

/// Parameters shared by `𝔠₁` evaluations at one modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrakC1Params {
    pub m1: i64,
    pub m2: i64,
    pub n: u64,
    pub n3: u64,
    pub k: u32,
    pub q: u64,
}

/// Precomputed `𝔠(m1, m2, a; q)·e(-a n3^k/q)` over units `a`, and the root tables
/// for `q` and `q/n`.
struct C1Kernel {
    units: Vec<(u64, u64)>,
    weights: Vec<ComplexValue>,
    dual_roots: RootTable<f64>,
}

impl C1Kernel {
    fn new(p: FrakC1Params, closed: bool) -> Result<Self> {
        let q = p.q;
        check_divides(p.n, q)?;
        check_cap(q)?;
        if closed && q.is_multiple_of(2) {
            return Err(Error::EvenModulus(q));
        }
        let roots = RootTable::<f64>::new(q);
        let shift = pow_residue(p.n3, p.k, q);
        let mut units = Vec::new();
        let mut weights = Vec::new();
        for a in 0..q {
            let Ok(ai) = inv_mod(a as i64, q) else { continue };
            let c = if closed {
                frak_c_closed(p.m1, p.m2, a as i64, q)?
            } else {
                frak_c_direct(&roots, p.m1, p.m2, a as i64)
            };
            let tw = roots.get((q - arith::mul_mod(a, shift, q)) % q);
            units.push((a, ai));
            weights.push(c * tw);
        }
        Ok(Self { units, weights, dual_roots: RootTable::new(q / p.n) })
    }

    /// `Σ*_a S(ā, freq; q/n)·weight(a)`.
    fn eval(&self, freq: i64) -> ComplexValue {
        let qn = self.dual_roots.modulus();
        let mut acc = ComplexSum::new();
        for (&(_, ai), &w) in self.units.iter().zip(&self.weights) {
            let s = kloosterman_with(&self.dual_roots, (ai % qn) as i64, freq);
            acc.add(s * w);
        }
        acc.value()
    }
}

/// `𝔠₁ = Σ*_{a mod q} S(ā, freq; q/n)·𝔠(m1, m2, a; q)·e(-a n3^k/q)` by definition,
/// with `freq` the signed dual frequency `±m`.
pub fn frak_c1(p: FrakC1Params, freq: i64) -> Result<ComplexValue> {
    Ok(C1Kernel::new(p, false)?.eval(freq))
}

/// The same sum with `𝔠` replaced by its odd-modulus closed form.
pub fn frak_c1_simplified(p: FrakC1Params, freq: i64) -> Result<ComplexValue> {
    Ok(C1Kernel::new(p, true)?.eval(freq))
}

/// Input of the frequency sum `𝔖`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FreqSumInput {
    pub q: u64,
    pub n: u64,
    pub m1: i64,
    pub m2: i64,
    pub n3: u64,
    pub n3p: u64,
    pub k: u32,
    pub m: i64,
    pub sign: Sign,
}

impl FreqSumInput {
    fn validate(&self) -> Result<()> {
        check_divides(self.n, self.q)?;
        if self.k < 3 {
            return Err(Error::range("power k", self.k, "at least 3"));
        }
        Ok(())
    }

    fn c1_params(&self, n3: u64) -> FrakC1Params {
        FrakC1Params { m1: self.m1, m2: self.m2, n: self.n, n3, k: self.k, q: self.q }
    }
}

/// `𝔖 = (n/q) Σ_{j mod q/n} e(mj/(q/n))·𝔠₁(±j; n3)·conj 𝔠₁(∓j; n3′)` by brute force.
pub fn frak_s(input: &FreqSumInput) -> Result<ComplexValue> {
    input.validate()?;
    let first = C1Kernel::new(input.c1_params(input.n3), false)?;
    let second = C1Kernel::new(input.c1_params(input.n3p), false)?;
    let qn = input.q / input.n;
    let roots = RootTable::<f64>::new(qn);
    let s = input.sign.value();
    let mut acc = ComplexSum::new();
    for j in 0..qn as i64 {
        let phase = roots.at(input.m as i128 * j as i128);
        acc.add(phase * first.eval(s * j) * second.eval(-s * j).conj());
    }
    Ok(acc.value() / qn as f64)
}

/// `q³·c_q(n3′^k − n3^k)`, the zero-frequency reduction at `n = 1`.
pub fn zero_frequency_reduction(q: u64, n3: u64, n3p: u64, k: u32) -> Result<f64> {
    let diff = (pow_residue(n3p, k, q) + q - pow_residue(n3, k, q)) % q;
    Ok((q as f64).powi(3) * ramanujan_sum(diff as i64, q)? as f64)
}

/// Branch of the non-zero-frequency bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundBranch {
    /// `(q3′, n3^k n3′^k m) = 1`: `q^{7/2}(q1q2q3″)^{1/2}/n`
    Coprime,
    /// every other case: `q⁴/n`
    Fallback,
}

/// Bound ratio of `𝔖` at a non-zero frequency, with the modulus decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonzeroBoundReport {
    pub value: f64,
    pub bound: f64,
    pub ratio: f64,
    pub branch: BoundBranch,
    /// `n`-adic part `q1q2`
    pub seed_part: u64,
    pub squarefree: u64,
    pub squarefull: u64,
    /// fallback branch stated for this input when its condition reads `q3′ | m`
    pub covered_if_divides: bool,
    /// fallback branch stated for this input when its condition reads `(q3′, m) > 1`
    pub covered_if_shares: bool,
}

pub fn nonzero_bound_ratio(input: &FreqSumInput) -> Result<NonzeroBoundReport> {
    if input.m == 0 {
        return Err(Error::Precondition("frequency m must be non-zero".into()));
    }
    input.validate()?;
    let q = input.q;
    let split = modulus_split(q, input.n)?;
    let sq = squarefull_split(split.coprime_part)?;
    let q3p = sq.squarefree;
    let nk = pow_residue(input.n3, input.k, q3p) as u128 * pow_residue(input.n3p, input.k, q3p) as u128
        % q3p.max(1) as u128;
    let mm = reduce(input.m, q3p);
    let coprime = gcd(((nk * mm as u128) % q3p as u128) as u64, q3p) == 1;
    let value = frak_s(input)?.norm();
    let qf = q as f64;
    let (branch, bound) = if coprime {
        let extra = (split.seed_part as f64 * sq.squarefull as f64).sqrt();
        (BoundBranch::Coprime, qf.powf(3.5) * extra / input.n as f64)
    } else {
        (BoundBranch::Fallback, qf.powi(4) / input.n as f64)
    };
    let nk_shared = gcd(nk as u64, q3p) != 1;
    let m_coprime = gcd(mm, q3p) == 1;
    let second_branch = m_coprime && nk_shared;
    Ok(NonzeroBoundReport {
        value,
        bound,
        ratio: value / bound,
        branch,
        seed_part: split.seed_part,
        squarefree: q3p,
        squarefull: sq.squarefull,
        covered_if_divides: coprime || mm == 0 || second_branch,
        covered_if_shares: coprime || !m_coprime || second_branch,
    })
}

type Mat2 = [[u64; 2]; 2];

/// Residues `c1..c5 mod p` of the Kloosterman correlation
/// `Σ*_β S(c1, c2 + c5β; p)·S(c3, c4 + c5β̄; p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorrelationParams {
    pub p: u64,
    pub c: [u64; 5],
}

impl CorrelationParams {
    /// Checks `p` prime and the determinants `c1c5`, `-c3c5²` non-zero mod `p`.
    pub fn new(p: u64, c: [i64; 5]) -> Result<Self> {
        if !arith::is_prime(p) || p == 2 {
            return Err(Error::Inadmissible(format!("{p} is not an odd prime")));
        }
        let c = c.map(|x| reduce(x, p));
        let this = Self { p, c };
        if this.det_gamma1() == 0 || this.det_gamma2() == 0 {
            return Err(Error::Inadmissible(format!("degenerate determinant for {:?} mod {p}", c)));
        }
        Ok(this)
    }

    /// Builds the residues from the frequency-sum data at a squarefree prime `p`:
    /// `c1 = -(q1q2)⁻¹n3^k`, `c2 = -(4q1q2)⁻¹(m1²+m2²) ∓ m̄(q1q2/n)⁻¹`,
    /// `c3 = (q1q2)⁻¹n3′^k`, `c4 = (4q1q2)⁻¹(m1²+m2²) ∓ m̄(q1q2/n)⁻¹`, `c5 = ±m̄(q1q2/n)⁻¹`.
    pub fn from_frequency(p: u64, data: &CorrelationData) -> Result<Self> {
        let r = data.residues(p)?;
        Self::new(p, r.map(|x| x as i64))
    }

    pub fn gamma1(&self) -> Mat2 {
        let p = self.p;
        let [c1, c2, _, _, c5] = self.c;
        [[arith::mul_mod(c1, c5, p), arith::mul_mod(c1, c2, p)], [0, 1]]
    }

    pub fn gamma2(&self) -> Mat2 {
        let p = self.p;
        let [_, _, c3, c4, c5] = self.c;
        [[arith::mul_mod(c3, c4, p), arith::mul_mod(c3, c5, p)], [1, 0]]
    }

    /// `γ2·γ1⁻¹`.
    pub fn gamma2_gamma1_inv(&self) -> Mat2 {
        let p = self.p;
        let g1 = self.gamma1();
        let det_inv = inv_mod(self.det_gamma1() as i64, p).expect("admissible");
        let inv = [
            [arith::mul_mod(g1[1][1], det_inv, p), arith::mul_mod(p - g1[0][1], det_inv, p)],
            [arith::mul_mod((p - g1[1][0]) % p, det_inv, p), arith::mul_mod(g1[0][0], det_inv, p)],
        ];
        mat_mul(&self.gamma2(), &inv, p)
    }

    pub fn det_gamma1(&self) -> u64 {
        arith::mul_mod(self.c[0], self.c[4], self.p)
    }

    pub fn det_gamma2(&self) -> u64 {
        let p = self.p;
        let v = arith::mul_mod(self.c[2], arith::mul_mod(self.c[4], self.c[4], p), p);
        (p - v) % p
    }
}

fn mat_mul(a: &Mat2, b: &Mat2, p: u64) -> Mat2 {
    let mut out = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = (arith::mul_mod(a[i][0], b[0][j], p) + arith::mul_mod(a[i][1], b[1][j], p)) % p;
        }
    }
    out
}

/// Integer data feeding the correlation at a squarefree prime `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorrelationData {
    /// `q1q2`
    pub seed_part: u64,
    /// `q1q2/n`
    pub seed_part_over_n: u64,
    /// `m1² + m2²`
    pub msq: u64,
    /// `n3^k`
    pub n3k: u64,
    /// `n3′^k`
    pub n3pk: u64,
    pub m: i64,
    pub sign: Sign,
}

impl CorrelationData {
    fn residues(&self, p: u64) -> Result<[u64; 5]> {
        let s = inv_mod((self.seed_part % p) as i64, p)?;
        let sn = inv_mod((self.seed_part_over_n % p) as i64, p)?;
        let mi = inv_mod(reduce(self.m, p) as i64, p)?;
        let inv4 = inv_mod(4, p)?;
        let quarter = arith::mul_mod(arith::mul_mod(inv4, s, p), self.msq % p, p);
        let shift = arith::mul_mod(mi, sn, p);
        let (plus, minus) = match self.sign {
            Sign::Plus => (shift, (p - shift) % p),
            Sign::Minus => ((p - shift) % p, shift),
        };
        let c1 = (p - arith::mul_mod(s, self.n3k % p, p)) % p;
        let c2 = ((p - quarter) % p + minus) % p;
        let c3 = arith::mul_mod(s, self.n3pk % p, p);
        let c4 = (quarter + minus) % p;
        Ok([c1, c2, c3, c4, plus])
    }
}

/// `Σ*_{β mod p} S(c1, c2 + c5β; p)·S(c3, c4 + c5β̄; p)` by brute force.
pub fn kloosterman_correlation(params: &CorrelationParams) -> ComplexValue {
    let p = params.p;
    let roots = RootTable::<f64>::new(p);
    let [c1, c2, c3, c4, c5] = params.c;
    let mut acc = ComplexSum::new();
    for beta in 1..p {
        let bi = inv_mod(beta as i64, p).expect("prime modulus");
        let b1 = (c2 + arith::mul_mod(c5, beta, p)) % p;
        let b2 = (c4 + arith::mul_mod(c5, bi, p)) % p;
        acc.add(kloosterman_with(&roots, c1 as i64, b1 as i64) * kloosterman_with(&roots, c3 as i64, b2 as i64));
    }
    acc.value()
}

/// The same correlation written with unit first arguments,
/// `Σ*_β S(1, γ1(β); p)·conj S(1, γ2(β); p)`.
pub fn kloosterman_correlation_mobius(params: &CorrelationParams) -> ComplexValue {
    let p = params.p;
    let roots = RootTable::<f64>::new(p);
    let apply = |m: &Mat2, x: u64| -> u64 {
        let num = (arith::mul_mod(m[0][0], x, p) + m[0][1]) % p;
        let den = (arith::mul_mod(m[1][0], x, p) + m[1][1]) % p;
        arith::mul_mod(num, inv_mod(den as i64, p).expect("unit denominator"), p)
    };
    let (g1, g2) = (params.gamma1(), params.gamma2());
    let mut acc = ComplexSum::new();
    for beta in 1..p {
        let s1 = kloosterman_with(&roots, 1, apply(&g1, beta) as i64);
        let s2 = kloosterman_with(&roots, 1, apply(&g2, beta) as i64);
        acc.add(s1 * s2.conj());
    }
    acc.value()
}

/// The correlation before the change of variable `β = ±mβ1 + 1`, divided by `p²`:
/// `Σ*_{a1} Σ*_{a2} e(c1 a1 + c3 a2 + …)·Σ*_{β1} e((q1q2/n)⁻¹(ā1β1 − ā2·(β̄1 ± m)⁻¹)/p)`,
/// the `β1`-sum running over units with `β̄1 ± m` a unit.
pub fn correlation_pre_substitution(p: u64, data: &CorrelationData) -> Result<ComplexValue> {
    let r = data.residues(p)?;
    let (c1, c3) = (r[0], r[2]);
    let s = inv_mod((data.seed_part % p) as i64, p)?;
    let sn = inv_mod((data.seed_part_over_n % p) as i64, p)?;
    let inv4 = inv_mod(4, p)?;
    let quarter = arith::mul_mod(arith::mul_mod(inv4, s, p), data.msq % p, p);
    let m = reduce(data.sign.value() * data.m, p);
    let roots = RootTable::<f64>::new(p);
    let mut acc = ComplexSum::new();
    for a1 in 1..p {
        let a1i = inv_mod(a1 as i64, p)?;
        let outer1 = (arith::mul_mod(c1, a1, p) + p - arith::mul_mod(quarter, a1i, p)) % p;
        for a2 in 1..p {
            let a2i = inv_mod(a2 as i64, p)?;
            let outer2 = (arith::mul_mod(c3, a2, p) + arith::mul_mod(quarter, a2i, p)) % p;
            let mut inner = ComplexSum::new();
            for b1 in 1..p {
                let b1i = inv_mod(b1 as i64, p)?;
                let t = (b1i + m) % p;
                let Ok(ti) = inv_mod(t as i64, p) else { continue };
                let k = (arith::mul_mod(a1i, b1, p) + p - arith::mul_mod(a2i, ti, p)) % p;
                inner.add(roots.get(arith::mul_mod(sn, k, p)));
            }
            acc.add(roots.get((outer1 + outer2) % p) * inner.value());
        }
    }
    Ok(acc.value())
}

/// `𝔠′(m1, m2, a; q) = Σ_{α mod q} e((−aQ(α) + m1α1 + m2α2)/q)`.
pub fn frak_c_prime(m1: i64, m2: i64, a: i64, q: u64, form: &QuadraticForm) -> Result<ComplexValue> {
    check_cap(q)?;
    Ok(frak_c_prime_with(&RootTable::new(q), m1, m2, a, form))
}

fn frak_c_prime_with(roots: &RootTable<f64>, m1: i64, m2: i64, a: i64, form: &QuadraticForm) -> ComplexValue {
    let q = roots.modulus();
    let qi = q as i128;
    let neg_a = (-(a as i128)).rem_euclid(qi);
    let mut acc = ComplexSum::new();
    for x in 0..q as i64 {
        for y in 0..q as i64 {
            let v = form.eval(x, y).rem_euclid(qi);
            let k = neg_a * v + m1 as i128 * x as i128 + m2 as i128 * y as i128;
            acc.add(roots.at(k));
        }
    }
    acc.value()
}

/// `𝔖₁ = Σ*_{a mod q} Σ*_{β mod q/n} e(āβ/(q/n))·𝔠′(m1, m2, a; q)` by brute force.
pub fn frak_s1(m1: i64, m2: i64, n: u64, q: u64, form: &QuadraticForm) -> Result<ComplexValue> {
    check_divides(n, q)?;
    check_cap(q)?;
    let roots = RootTable::<f64>::new(q);
    let qn = q / n;
    let dual = RootTable::<f64>::new(qn);
    let mut acc = ComplexSum::new();
    for a in 0..q {
        let Ok(ai) = inv_mod(a as i64, q) else { continue };
        let mut inner = ComplexSum::new();
        for beta in 0..qn {
            if gcd(beta, qn) == 1 {
                inner.add(dual.get(arith::mul_mod(ai % qn, beta, qn)));
            }
        }
        acc.add(inner.value() * frak_c_prime_with(&roots, m1, m2, a as i64, form));
    }
    Ok(acc.value())
}

/// `(q1³/n)·q2²·d(q1)·d(q2)` with `q1` the `2n|A|`-adic part of `q`.
pub fn frak_s1_bound(n: u64, q: u64, form: &QuadraticForm) -> Result<f64> {
    check_divides(n, q)?;
    let seed = 2 * n * form.determinant().unsigned_abs();
    let split = modulus_split(q, seed)?;
    let (q1, q2) = (split.seed_part, split.coprime_part);
    let d1 = factorize(q1)?.num_divisors() as f64;
    let d2 = factorize(q2)?.num_divisors() as f64;
    Ok((q1 as f64).powi(3) / n as f64 * (q2 as f64).powi(2) * d1 * d2)
}

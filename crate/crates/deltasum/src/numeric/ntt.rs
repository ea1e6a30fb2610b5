//! Number theoretic transforms over primes below 2^62 with Montgomery arithmetic.

use crate::arith::{factorize, is_prime, pow_mod};

/// A prime `p < 2^62` with `2^30 | p - 1` and a generator of its unit group.
#[derive(Debug, Clone, Copy)]
pub struct NttPrime {
    pub p: u64,
    pub generator: u64,
    /// `-p^{-1} mod 2^64`
    neg_inv: u64,
    /// `2^128 mod p`
    r2: u64,
}

const TWO_ADICITY: u32 = 30;

impl NttPrime {
    fn new(p: u64) -> Option<Self> {
        if !is_prime(p) {
            return None;
        }
        let f = factorize(p - 1).ok()?;
        let generator = (2..).find(|&g| f.primes().all(|q| pow_mod(g, (p - 1) / q, p) != 1))?;
        let mut inv = 1u64;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        let r = ((1u128 << 64) % p as u128) as u64;
        let r2 = ((r as u128 * r as u128) % p as u128) as u64;
        Some(Self { p, generator, neg_inv: inv.wrapping_neg(), r2 })
    }

    /// The `count` largest primes of the form `c·2^30 + 1` below `2^62`.
    pub fn largest(count: usize) -> Vec<Self> {
        let mut out = Vec::with_capacity(count);
        let mut c = (1u64 << (62 - TWO_ADICITY)) - 1;
        while out.len() < count && c > 0 {
            if let Some(prime) = Self::new((c << TWO_ADICITY) + 1) {
                out.push(prime);
            }
            c -= 1;
        }
        out
    }

    #[inline(always)]
    fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.neg_inv);
        let u = ((t + m as u128 * self.p as u128) >> 64) as u64;
        if u >= self.p {
            u - self.p
        } else {
            u
        }
    }

    #[inline(always)]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.redc(a as u128 * b as u128)
    }

    #[inline(always)]
    pub fn to_mont(&self, a: u64) -> u64 {
        self.mul(a % self.p, self.r2)
    }

    #[inline(always)]
    pub fn from_mont(&self, a: u64) -> u64 {
        self.redc(a as u128)
    }

    #[inline(always)]
    fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline(always)]
    fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    /// Reduces a signed integer and converts to Montgomery form.
    pub fn encode(&self, x: i64) -> u64 {
        self.to_mont(x.rem_euclid(self.p as i64) as u64)
    }

    /// In-place transform of a Montgomery-form vector whose length is a power of two.
    pub fn transform(&self, a: &mut [u64], inverse: bool) {
        let n = a.len();
        assert!(n.is_power_of_two() && n.trailing_zeros() <= TWO_ADICITY);
        if n == 1 {
            return;
        }
        // bit reversal
        let bits = n.trailing_zeros();
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if i < j {
                a.swap(i, j);
            }
        }
        let root = pow_mod(self.generator, (self.p - 1) >> bits, self.p);
        let root = if inverse { pow_mod(root, self.p - 2, self.p) } else { root };
        // twiddles for the final stage; earlier stages stride through them
        let half = n / 2;
        let mut tw = Vec::with_capacity(half);
        let w = self.to_mont(root);
        let mut cur = self.to_mont(1);
        for _ in 0..half {
            tw.push(cur);
            cur = self.mul(cur, w);
        }
        let mut len = 2;
        while len <= n {
            let step = n / len;
            let h = len / 2;
            for chunk in a.chunks_exact_mut(len) {
                let (lo, hi) = chunk.split_at_mut(h);
                for k in 0..h {
                    let v = self.mul(hi[k], tw[k * step]);
                    let u = lo[k];
                    lo[k] = self.add(u, v);
                    hi[k] = self.sub(u, v);
                }
            }
            len *= 2;
        }
        if inverse {
            let n_inv = self.to_mont(pow_mod(n as u64 % self.p, self.p - 2, self.p));
            for x in a.iter_mut() {
                *x = self.mul(*x, n_inv);
            }
        }
    }

    /// Squares the truncated series `a` (Montgomery form), keeping `keep` terms.
    pub fn square_truncated(&self, a: &[u64], keep: usize) -> Vec<u64> {
        let len = (2 * a.len()).saturating_sub(1).max(1).next_power_of_two();
        let mut buf = vec![0u64; len];
        buf[..a.len()].copy_from_slice(a);
        self.transform(&mut buf, false);
        for x in buf.iter_mut() {
            *x = self.mul(*x, *x);
        }
        self.transform(&mut buf, true);
        buf.truncate(keep);
        buf
    }
}

/// Reconstructs a signed integer from residues (not in Montgomery form) by Garner's
/// algorithm. Returns the value as `f64` and exactly when it fits in `i128`.
pub fn garner(residues: &[u64], primes: &[NttPrime]) -> (f64, Option<i128>) {
    let k = residues.len();
    let mut digits = vec![0u64; k];
    for i in 0..k {
        let p = primes[i].p;
        let mut x = residues[i] % p;
        let mut prod = 1u64;
        let mut acc = 0u64;
        for j in 0..i {
            acc = ((acc as u128 + digits[j] as u128 * prod as u128) % p as u128) as u64;
            prod = ((prod as u128 * (primes[j].p % p) as u128) % p as u128) as u64;
        }
        x = (x + p - acc) % p;
        digits[i] = ((x as u128 * pow_mod(prod, p - 2, p) as u128) % p as u128) as u64;
    }
    // symmetric range: negative when the leading digit is in the upper half
    let top = k - 1;
    let lead = if digits[top] > primes[top].p / 2 {
        digits[top] as i128 - primes[top].p as i128
    } else {
        digits[top] as i128
    };
    // Horner in the mixed radix: x = d0 + p0·(d1 + p1·(d2 + ...))
    let mut value = lead as f64;
    let mut exact = Some(lead);
    for i in (0..top).rev() {
        let p = primes[i].p;
        value = value * p as f64 + digits[i] as f64;
        exact = exact
            .and_then(|e| e.checked_mul(p as i128))
            .and_then(|e| e.checked_add(digits[i] as i128));
    }
    // small values cancel catastrophically in the f64 Horner pass
    if let Some(e) = exact {
        value = e as f64;
    }
    (value, exact)
}

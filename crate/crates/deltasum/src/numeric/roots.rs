//! Tables of roots of unity.

use super::Real;
use num_complex::Complex;

/// The `q` values `e(k/q)` for `0 <= k < q`, indexed by residue.
///
/// Each entry is computed from the reduced fraction so that phases never drift
/// with the index.
#[derive(Debug, Clone)]
pub struct RootTable<T> {
    q: u64,
    roots: Vec<Complex<T>>,
}

impl<T: Real> RootTable<T> {
    pub fn new(q: u64) -> Self {
        assert!(q >= 1, "root table needs a positive modulus");
        let qf = T::from_u64(q).unwrap();
        let roots = (0..q)
            .map(|k| {
                // fold into [-q/2, q/2] so the angle argument stays small
                let kk = if 2 * k > q { k as i64 - q as i64 } else { k as i64 };
                let angle = T::TAU() * T::from_i64(kk).unwrap() / qf;
                let (s, c) = angle.sin_cos();
                Complex::new(c, s)
            })
            .collect();
        Self { q, roots }
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    /// `e(k/q)` for a residue `k` already reduced into `[0, q)`.
    #[inline]
    pub fn get(&self, k: u64) -> Complex<T> {
        self.roots[k as usize]
    }

    /// `e(k/q)` for an arbitrary integer `k`.
    #[inline]
    pub fn at(&self, k: i128) -> Complex<T> {
        self.roots[k.rem_euclid(self.q as i128) as usize]
    }
}

//! Banded matrix storage and a complex banded LU factorization with partial
//! pivoting.
//!
//! Row `i` of an `n × n` matrix with half-bandwidth `bw` stores columns
//! `i - bw ..= i + bw` contiguously; out-of-range slots stay zero.

use std::ops::{Add, AddAssign, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Entry types usable in [`BandedMatrix`].
pub trait Scalar:
    Copy + Default + PartialEq + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + AddAssign + std::fmt::Debug
{
    fn modulus(self) -> f64;
}

impl Scalar for f64 {
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn modulus(self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix<T> {
    n: usize,
    bw: usize,
    data: Vec<T>,
}

pub type BandedRealMatrix = BandedMatrix<f64>;
pub type BandedComplexMatrix = BandedMatrix<Complex64>;

impl<T: Scalar> BandedMatrix<T> {
    pub fn zeros(n: usize, bw: usize) -> Self {
        BandedMatrix {
            n,
            bw,
            data: vec![T::default(); n * (2 * bw + 1)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.n || j >= self.n || i.abs_diff(j) > self.bw {
            None
        } else {
            Some(i * (2 * self.bw + 1) + j + self.bw - i)
        }
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> T {
        self.slot(i, j).map_or(T::default(), |k| self.data[k])
    }

    /// Adds `v` to entry `(i, j)`.
    ///
    /// Panics if `(i, j)` lies outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: T) {
        let k = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside band {} of n = {}", self.bw, self.n));
        self.data[k] += v;
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        let k = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside band {} of n = {}", self.bw, self.n));
        self.data[k] = v;
    }

    /// Column range stored for row `i`.
    pub fn row_range(&self, i: usize) -> std::ops::Range<usize> {
        i.saturating_sub(self.bw)..(i + self.bw + 1).min(self.n)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|i| self.row_range(i).all(|j| (self.get(i, j) - self.get(j, i)).modulus() <= tol))
    }

    /// `y = A x` for any `x` whose entries can be multiplied by `T`.
    pub fn matvec<V>(&self, x: &[V]) -> Result<Vec<V>>
    where
        V: Scalar + Mul<T, Output = V>,
    {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: x.len() });
        }
        Ok((0..self.n)
            .map(|i| {
                let mut acc = V::default();
                for j in self.row_range(i) {
                    acc += x[j] * self.get(i, j);
                }
                acc
            })
            .collect())
    }

    /// Submatrix on `keep` (ascending indices), with the band narrowed to what
    /// the kept pattern needs.
    pub fn restrict(&self, keep: &[usize]) -> Self {
        let mut pos = vec![usize::MAX; self.n];
        for (r, &i) in keep.iter().enumerate() {
            pos[i] = r;
        }
        let mut bw = 0;
        for &i in keep {
            for j in self.row_range(i) {
                if pos[j] != usize::MAX && self.get(i, j) != T::default() {
                    bw = bw.max(pos[i].abs_diff(pos[j]));
                }
            }
        }
        let mut out = Self::zeros(keep.len(), bw);
        for &i in keep {
            for j in self.row_range(i) {
                let v = self.get(i, j);
                if pos[j] != usize::MAX && v != T::default() {
                    out.set(pos[i], pos[j], v);
                }
            }
        }
        out
    }
}

impl BandedRealMatrix {
    /// Real matrix promoted to complex entries.
    pub fn to_complex(&self) -> BandedComplexMatrix {
        BandedMatrix {
            n: self.n,
            bw: self.bw,
            data: self.data.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    /// `xᵀ A x` for a real vector.
    pub fn quadratic_form(&self, x: &[f64]) -> Result<f64> {
        let ax = self.matvec(x)?;
        Ok(x.iter().zip(&ax).map(|(a, b)| a * b).sum())
    }
}

/// Pivots smaller than this in modulus are treated as exact zeros.
pub const SINGULAR_PIVOT: f64 = 1e-300;

/// Banded LU factors `P A = L U`.
///
/// `U` rows may extend to `kl + ku` past the diagonal after row exchanges;
/// `u_end[i]` tracks how far row `i` actually filled in.
#[derive(Debug, Clone)]
pub struct Factorization {
    n: usize,
    kl: usize,
    /// Row stride of `upper`.
    width: usize,
    /// Row `i` stores columns `i ..= i + kl + ku`.
    upper: Vec<Complex64>,
    /// Multipliers for rows `k + 1 ..= k + kl` of column `k`.
    lower: Vec<Complex64>,
    pivots: Vec<usize>,
    u_end: Vec<usize>,
}

impl Factorization {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Row exchanged with row `k` at elimination step `k`.
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Solves `A x = rhs`.
    pub fn solve(&self, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x)?;
        Ok(x)
    }

    pub fn solve_in_place(&self, x: &mut [Complex64]) -> Result<()> {
        let n = self.n;
        if x.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: x.len() });
        }
        let kl = self.kl;
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                x.swap(k, p);
            }
            let xk = x[k];
            if xk == Complex64::default() {
                continue;
            }
            let lk = &self.lower[k * kl..(k + 1) * kl];
            for (d, l) in lk.iter().enumerate().take((n - 1 - k).min(kl)) {
                x[k + 1 + d] -= l * xk;
            }
        }
        for i in (0..n).rev() {
            let row = &self.upper[i * self.width..(i + 1) * self.width];
            let mut acc = x[i];
            for j in i + 1..=self.u_end[i] {
                acc -= row[j - i] * x[j];
            }
            x[i] = acc / row[0];
        }
        Ok(())
    }
}

/// Banded LU with partial pivoting restricted to the `kl` rows below the
/// diagonal.
pub fn factor(a: &BandedComplexMatrix) -> Result<Factorization> {
    let n = a.n;
    let kl = a.bw;
    let ku = a.bw;
    let width = kl + ku + 1;
    let mut upper = vec![Complex64::default(); n * width];
    let mut lower = vec![Complex64::default(); n * kl];
    let mut pivots = vec![0; n];
    let mut u_end = vec![0; n];

    // Working rows keep columns [i, i + kl + ku] once elimination reaches
    // them. Before that, row i still holds entries left of its diagonal, so
    // the working copy starts at column i - kl.
    let wstride = 2 * kl + ku + 1;
    let mut work = vec![Complex64::default(); n * wstride];
    let wcol = |i: usize, j: usize| i * wstride + (j + kl - i);
    for i in 0..n {
        for j in a.row_range(i) {
            work[wcol(i, j)] = a.get(i, j);
        }
        u_end[i] = (i + ku).min(n - 1);
    }

    for k in 0..n {
        let last_row = (k + kl).min(n - 1);
        let mut p = k;
        let mut best = work[wcol(k, k)].norm();
        for i in k + 1..=last_row {
            let m = work[wcol(i, k)].norm();
            if m > best {
                best = m;
                p = i;
            }
        }
        if best < SINGULAR_PIVOT {
            return Err(Error::Singular(k));
        }
        pivots[k] = p;
        if p != k {
            let end = u_end[k].max(u_end[p]);
            for j in k..=end {
                work.swap(wcol(k, j), wcol(p, j));
            }
            u_end.swap(k, p);
        }
        let pivot = work[wcol(k, k)];
        let end = u_end[k];
        for i in k + 1..=last_row {
            let aik = work[wcol(i, k)];
            if aik == Complex64::default() {
                continue;
            }
            let l = aik / pivot;
            lower[k * kl + (i - k - 1)] = l;
            work[wcol(i, k)] = Complex64::default();
            for j in k + 1..=end {
                let akj = work[wcol(k, j)];
                work[wcol(i, j)] -= l * akj;
            }
            u_end[i] = u_end[i].max(end);
        }
        for j in k..=end {
            upper[k * width + (j - k)] = work[wcol(k, j)];
        }
    }

    Ok(Factorization { n, kl, width, upper, lower, pivots, u_end })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_banded(n: usize, bw: usize, dominant: bool, rng: &mut ChaCha8Rng) -> BandedComplexMatrix {
        let mut a = BandedComplexMatrix::zeros(n, bw);
        for i in 0..n {
            for j in a.row_range(i) {
                a.set(i, j, c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            }
            if dominant {
                a.add(i, i, c(2.0 * bw as f64 + 2.0, 0.0));
            }
        }
        a
    }

    fn rel_err(x: &[Complex64], y: &[Complex64]) -> f64 {
        let num: f64 = x.iter().zip(y).map(|(a, b)| (a - b).norm_sqr()).sum();
        let den: f64 = y.iter().map(|b| b.norm_sqr()).sum();
        (num / den).sqrt()
    }

    #[test]
    fn identity_factors_trivially() {
        let mut a = BandedComplexMatrix::zeros(5, 1);
        for i in 0..5 {
            a.set(i, i, c(1.0, 0.0));
        }
        let f = factor(&a).unwrap();
        assert!(f.pivots().iter().enumerate().all(|(k, &p)| p == k));
        assert!(f.lower.iter().all(|&l| l == Complex64::default()));
        let b: Vec<_> = (0..5).map(|i| c(i as f64, -1.0)).collect();
        assert_eq!(f.solve(&b).unwrap(), b);
    }

    #[test]
    fn zero_matrix_is_singular() {
        let a = BandedComplexMatrix::zeros(4, 1);
        assert_eq!(factor(&a).unwrap_err(), Error::Singular(0));
    }

    #[test]
    fn imaginary_identity_inverts_to_minus_i() {
        let mut a = BandedComplexMatrix::zeros(3, 0);
        for i in 0..3 {
            a.set(i, i, c(0.0, 1.0));
        }
        let x = factor(&a).unwrap().solve(&[c(1.0, 0.0); 3]).unwrap();
        assert!(x.iter().all(|&v| v == c(0.0, -1.0)));
    }

    #[test]
    fn zero_rhs_gives_zero_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_banded(20, 2, true, &mut rng);
        let x = factor(&a).unwrap().solve(&vec![Complex64::default(); 20]).unwrap();
        assert!(x.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn rhs_length_is_checked() {
        let mut a = BandedComplexMatrix::zeros(2, 0);
        a.set(0, 0, c(1.0, 0.0));
        a.set(1, 1, c(1.0, 0.0));
        let f = factor(&a).unwrap();
        assert!(matches!(f.solve(&[c(1.0, 0.0)]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn round_trip_diagonally_dominant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &(n, bw) in &[(1, 0), (7, 1), (40, 3), (100, 10)] {
            let a = random_banded(n, bw, true, &mut rng);
            let x: Vec<_> = (0..n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let b = a.matvec(&x).unwrap();
            let got = factor(&a).unwrap().solve(&b).unwrap();
            assert!(rel_err(&got, &x) < 1e-10, "n={n} bw={bw}");
        }
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        // [[0, 1], [1, 0]] needs a row exchange.
        let mut a = BandedComplexMatrix::zeros(2, 1);
        a.set(0, 1, c(1.0, 0.0));
        a.set(1, 0, c(1.0, 0.0));
        let f = factor(&a).unwrap();
        assert_eq!(f.pivots()[0], 1);
        let x = f.solve(&[c(2.0, 0.0), c(3.0, 0.0)]).unwrap();
        assert_eq!(x, vec![c(3.0, 0.0), c(2.0, 0.0)]);
    }

    #[test]
    fn round_trip_with_pivoting() {
        // Not diagonally dominant: row exchanges happen and fill reaches kl + ku.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let n = 30;
            let bw = 3;
            let mut a = random_banded(n, bw, false, &mut rng);
            for i in 0..n {
                a.set(i, i, c(rng.gen_range(-0.01..0.01), 0.0));
            }
            let x: Vec<_> = (0..n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let b = a.matvec(&x).unwrap();
            let f = factor(&a).unwrap();
            assert!(f.pivots().iter().enumerate().any(|(k, &p)| p != k));
            let got = f.solve(&b).unwrap();
            assert!(rel_err(&got, &x) < 1e-8);
        }
    }

    #[test]
    fn restrict_keeps_entries_and_narrows_band() {
        let mut a = BandedRealMatrix::zeros(4, 1);
        for i in 0..4 {
            a.set(i, i, 2.0);
            if i + 1 < 4 {
                a.set(i, i + 1, -1.0);
                a.set(i + 1, i, -1.0);
            }
        }
        let r = a.restrict(&[1, 2]);
        assert_eq!(r.n(), 2);
        assert_eq!(r.bandwidth(), 1);
        assert_eq!(r.get(0, 1), -1.0);
        let d = a.restrict(&[0, 3]);
        assert_eq!(d.bandwidth(), 0);
    }

    #[test]
    fn matvec_complex_by_real_matrix() {
        let mut m = BandedRealMatrix::zeros(2, 1);
        m.set(0, 0, 1.0);
        m.set(0, 1, 2.0);
        m.set(1, 1, 3.0);
        let y = m.matvec(&[c(1.0, 1.0), c(0.0, 1.0)]).unwrap();
        assert_eq!(y, vec![c(1.0, 3.0), c(0.0, 3.0)]);
    }
}

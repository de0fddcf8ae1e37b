//! Complex banded LU with partial pivoting.
//!
//! Rows are stored with a window wide enough to hold the fill-in produced by
//! row interchanges (upper bandwidth grows from `ku` to `kl + ku`). A dense
//! matrix is the special case `kl = ku = n - 1`.

#![allow(clippy::needless_range_loop)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<Complex64>,
    perm: Vec<usize>,
    /// Row scaling applied before factoring (`D A = L U`).
    row_scale: Vec<f64>,
    /// 1-norm of the row-equilibrated matrix.
    norm1: f64,
}

/// Builder for a banded matrix prior to factorization.
#[derive(Debug, Clone)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<Complex64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let kl = kl.min(n.saturating_sub(1));
        let ku = ku.min(n.saturating_sub(1));
        let width = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            width,
            data: vec![ZERO; n * width],
        }
    }

    pub fn from_dense(a: &DMatrix<Complex64>) -> Self {
        let n = a.nrows();
        assert_eq!(n, a.ncols(), "LU needs a square matrix");
        let mut m = Self::zeros(n, n.saturating_sub(1), n.saturating_sub(1));
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, a[(i, j)]);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.kl - i)
    }

    #[inline]
    pub fn in_band(&self, i: usize, j: usize) -> bool {
        j + self.kl >= i && j <= i + self.ku
    }

    /// Set entry `(i, j)`; panics outside the declared band.
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        assert!(self.in_band(i, j), "entry ({i}, {j}) outside band");
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: Complex64) {
        assert!(self.in_band(i, j), "entry ({i}, {j}) outside band");
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        if self.in_band(i, j) {
            self.data[self.idx(i, j)]
        } else {
            ZERO
        }
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![ZERO; self.n];
        for (i, yi) in y.iter_mut().enumerate() {
            let lo = i.saturating_sub(self.kl);
            let hi = (i + self.ku).min(self.n - 1);
            for (j, xj) in x.iter().enumerate().take(hi + 1).skip(lo) {
                *yi += self.data[self.idx(i, j)] * xj;
            }
        }
        y
    }

    /// Row-equilibrate and factor. Fails only on an exactly zero pivot.
    pub fn factor(mut self) -> Result<BandedLu> {
        let n = self.n;
        let (kl, ku) = (self.kl, self.ku);
        let mut row_scale = vec![1.0; n];
        for (i, scale) in row_scale.iter_mut().enumerate() {
            let lo = i.saturating_sub(kl);
            let hi = (i + ku).min(n.saturating_sub(1));
            let m = (lo..=hi)
                .map(|j| self.data[self.idx(i, j)].norm())
                .fold(0.0, f64::max);
            if m == 0.0 {
                return Err(Error::Singular);
            }
            *scale = 1.0 / m;
            for j in lo..=hi {
                let k = self.idx(i, j);
                self.data[k] *= *scale;
            }
        }
        let mut norm1 = 0.0f64;
        for j in 0..n {
            let lo = j.saturating_sub(ku);
            let hi = (j + kl).min(n - 1);
            let s: f64 = (lo..=hi).map(|i| self.get(i, j).norm()).sum();
            norm1 = norm1.max(s);
        }

        let mut perm = vec![0; n];
        let ucols = kl + ku;
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = self.data[self.idx(k, k)].norm();
            for i in k + 1..=last_row {
                let v = self.data[self.idx(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(Error::Singular);
            }
            perm[k] = p;
            let last_col = (k + ucols).min(n - 1);
            if p != k {
                for j in k..=last_col {
                    let (a, b) = (self.idx(k, j), self.idx(p, j));
                    self.data.swap(a, b);
                }
            }
            let pivot = self.data[self.idx(k, k)];
            for i in k + 1..=last_row {
                let ik = self.idx(i, k);
                if self.data[ik] == ZERO {
                    continue;
                }
                let l = self.data[ik] / pivot;
                self.data[ik] = l;
                let ri = self.idx(i, k);
                let rk = self.idx(k, k);
                // row i and row k windows are offset by (i - k)
                for j in 1..=(last_col - k) {
                    let u = self.data[rk + j];
                    if u != ZERO {
                        self.data[ri + j] -= l * u;
                    }
                }
            }
        }
        Ok(BandedLu {
            n,
            kl,
            ku,
            width: self.width,
            data: self.data,
            perm,
            row_scale,
            norm1,
        })
    }
}

impl BandedLu {
    pub fn factor_dense(a: &DMatrix<Complex64>) -> Result<Self> {
        BandedMatrix::from_dense(a).factor()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.width + (j + self.kl - i)]
    }

    /// Solve `(D A) x = b` in place.
    fn solve_scaled(&self, b: &mut [Complex64]) {
        let n = self.n;
        let ucols = self.kl + self.ku;
        for k in 0..n {
            let p = self.perm[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            if bk != ZERO {
                for i in k + 1..=(k + self.kl).min(n - 1) {
                    b[i] -= self.at(i, k) * bk;
                }
            }
        }
        for k in (0..n).rev() {
            let mut acc = b[k];
            for j in k + 1..=(k + ucols).min(n - 1) {
                acc -= self.at(k, j) * b[j];
            }
            b[k] = acc / self.at(k, k);
        }
    }

    /// Solve `(D A)^H y = g` in place.
    fn solve_scaled_adjoint(&self, y: &mut [Complex64]) {
        let n = self.n;
        let ucols = self.kl + self.ku;
        for k in 0..n {
            let mut acc = y[k];
            for j in k.saturating_sub(ucols)..k {
                acc -= self.at(j, k).conj() * y[j];
            }
            y[k] = acc / self.at(k, k).conj();
        }
        for k in (0..n).rev() {
            let mut acc = y[k];
            for i in k + 1..=(k + self.kl).min(n - 1) {
                acc -= self.at(i, k).conj() * y[i];
            }
            y[k] = acc;
            let p = self.perm[k];
            if p != k {
                y.swap(k, p);
            }
        }
    }

    /// Solve `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        assert_eq!(b.len(), self.n);
        for (bi, s) in b.iter_mut().zip(&self.row_scale) {
            *bi *= *s;
        }
        self.solve_scaled(b);
    }

    /// Solve `A^H x = g` in place.
    pub fn solve_adjoint_in_place(&self, g: &mut [Complex64]) {
        assert_eq!(g.len(), self.n);
        // A = D^{-1} (D A), so A^H x = g means (D A)^H (D^{-1} x) = g
        self.solve_scaled_adjoint(g);
        for (gi, s) in g.iter_mut().zip(&self.row_scale) {
            *gi *= *s;
        }
    }

    pub fn solve(&self, b: &DVector<Complex64>) -> DVector<Complex64> {
        let mut x = b.clone();
        self.solve_in_place(x.as_mut_slice());
        x
    }

    pub fn solve_adjoint(&self, b: &DVector<Complex64>) -> DVector<Complex64> {
        let mut x = b.clone();
        self.solve_adjoint_in_place(x.as_mut_slice());
        x
    }

    pub fn solve_matrix(&self, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let mut x = b.clone();
        for mut col in x.column_iter_mut() {
            self.solve_in_place(col.as_mut_slice());
        }
        x
    }

    /// Reciprocal 1-norm condition estimate of the row-equilibrated matrix
    /// (Hager's method with Higham's extra probe).
    pub fn rcond(&self) -> f64 {
        let n = self.n;
        if n == 0 {
            return 1.0;
        }
        let mut probe = vec![Complex64::new(1.0 / n as f64, 0.0); n];
        let mut est = 0.0f64;
        for iter in 0..5 {
            let mut y = probe.clone();
            self.solve_scaled(&mut y);
            est = y.iter().map(|z| z.norm()).sum();
            let mut z: Vec<Complex64> = y
                .iter()
                .map(|v| {
                    let a = v.norm();
                    if a == 0.0 {
                        Complex64::new(1.0, 0.0)
                    } else {
                        v / a
                    }
                })
                .collect();
            self.solve_scaled_adjoint(&mut z);
            let (j, zmax) = z
                .iter()
                .enumerate()
                .map(|(j, v)| (j, v.norm()))
                .fold((0, -1.0), |acc, v| if v.1 > acc.1 { v } else { acc });
            let ztx: f64 = z.iter().zip(&probe).map(|(a, b)| (a.conj() * b).re).sum();
            if iter > 0 && zmax <= ztx {
                break;
            }
            probe = vec![ZERO; n];
            probe[j] = Complex64::new(1.0, 0.0);
        }
        let mut alt: Vec<Complex64> = (0..n)
            .map(|i| {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                let frac = if n > 1 { i as f64 / (n - 1) as f64 } else { 0.0 };
                Complex64::new(sign * (1.0 + frac), 0.0)
            })
            .collect();
        self.solve_scaled(&mut alt);
        let alt_est = 2.0 * alt.iter().map(|z| z.norm()).sum::<f64>() / (3.0 * n as f64);
        let inv_norm = est.max(alt_est);
        if !inv_norm.is_finite() {
            return 0.0;
        }
        1.0 / (self.norm1 * inv_norm)
    }
}

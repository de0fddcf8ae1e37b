//! Complex Schur decomposition and eigenvectors for small dense matrices.
//!
//! Householder reduction to Hessenberg form followed by single-shift QR with
//! Wilkinson shifts. Right and left eigenvectors come from triangular solves
//! against the Schur factor.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone)]
pub struct Schur {
    /// Unitary factor.
    pub q: DMatrix<Complex64>,
    /// Upper triangular factor, `A = Q T Q^H`.
    pub t: DMatrix<Complex64>,
}

#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<Complex64>,
    /// Unit-norm right eigenvectors as columns.
    pub right: DMatrix<Complex64>,
    /// Unit-norm left eigenvectors as columns (`y^H A = lambda y^H`).
    pub left: DMatrix<Complex64>,
}

fn householder(x: &[Complex64]) -> Option<(Vec<Complex64>, Complex64)> {
    let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return None;
    }
    let phase = if x[0].norm() == 0.0 { ONE } else { x[0] / x[0].norm() };
    let alpha = -phase * norm;
    let mut v = x.to_vec();
    v[0] -= alpha;
    let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if vn == 0.0 {
        return None;
    }
    for z in &mut v {
        *z /= vn;
    }
    Some((v, alpha))
}

fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    // [c s; -conj(s) c] [a; b] = [r; 0]
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, ZERO);
    }
    if na == 0.0 {
        return (0.0, (b / nb).conj());
    }
    let r = na.hypot(nb);
    let c = na / r;
    let s = (a / na) * b.conj() / r;
    (c, s)
}

/// Complex Schur decomposition of a square matrix.
pub fn schur(a: &DMatrix<Complex64>) -> Result<Schur> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "Schur needs a square matrix");
    let mut h = a.clone();
    let mut q = DMatrix::<Complex64>::identity(n, n);
    if n == 0 {
        return Ok(Schur { q, t: h });
    }

    for k in 0..n.saturating_sub(2) {
        let x: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let Some((v, _)) = householder(&x) else { continue };
        // H <- (I - 2 v v^H) H
        for j in 0..n {
            let mut dot = ZERO;
            for (l, vl) in v.iter().enumerate() {
                dot += vl.conj() * h[(k + 1 + l, j)];
            }
            dot *= 2.0;
            for (l, vl) in v.iter().enumerate() {
                h[(k + 1 + l, j)] -= vl * dot;
            }
        }
        // H <- H (I - 2 v v^H), Q likewise
        for m in [&mut h, &mut q] {
            for i in 0..n {
                let mut dot = ZERO;
                for (l, vl) in v.iter().enumerate() {
                    dot += m[(i, k + 1 + l)] * vl;
                }
                dot *= 2.0;
                for (l, vl) in v.iter().enumerate() {
                    m[(i, k + 1 + l)] -= dot * vl.conj();
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }

    let eps = f64::EPSILON;
    let hnorm = h.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    let max_total = 100 * n.max(10);
    while hi > 0 {
        let mut lo = hi;
        while lo > 0 {
            let s = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let s = if s == 0.0 { hnorm } else { s };
            if h[(lo, lo - 1)].norm() <= eps * s {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > max_total {
            return Err(Error::EigenNotConverged);
        }

        let mu = if iter.is_multiple_of(11) {
            // exceptional shift to break cycles
            h[(hi, hi)] + h[(hi, hi - 1)].norm() * Complex64::new(0.75, 0.5)
        } else {
            let a = h[(hi - 1, hi - 1)];
            let b = h[(hi - 1, hi)];
            let c = h[(hi, hi - 1)];
            let d = h[(hi, hi)];
            let half = (a - d) * 0.5;
            let disc = (half * half + b * c).sqrt();
            let m1 = (a + d) * 0.5 + disc;
            let m2 = (a + d) * 0.5 - disc;
            if (m1 - d).norm() < (m2 - d).norm() {
                m1
            } else {
                m2
            }
        };

        for k in lo..=hi {
            h[(k, k)] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..n {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = x * c + s * y;
                h[(k + 1, j)] = -s.conj() * x + y * c;
            }
            h[(k + 1, k)] = ZERO;
            rots.push((c, s));
        }
        for (off, &(c, s)) in rots.iter().enumerate() {
            let k = lo + off;
            let last = (k + 1).min(hi);
            for i in 0..=last {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * c + y * s.conj();
                h[(i, k + 1)] = -x * s + y * c;
            }
            for i in 0..n {
                let x = q[(i, k)];
                let y = q[(i, k + 1)];
                q[(i, k)] = x * c + y * s.conj();
                q[(i, k + 1)] = -x * s + y * c;
            }
        }
        for k in lo..=hi {
            h[(k, k)] += mu;
        }
    }
    for j in 0..n {
        for i in j + 1..n {
            h[(i, j)] = ZERO;
        }
    }
    Ok(Schur { q, t: h })
}

/// Eigenvalues with right and left eigenvectors.
pub fn eig(a: &DMatrix<Complex64>) -> Result<Eigen> {
    let n = a.nrows();
    let Schur { q, t } = schur(a)?;
    let tnorm = t.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let small = f64::EPSILON * tnorm;
    let guard = |d: Complex64| if d.norm() < small { Complex64::new(small, 0.0) } else { d };

    let values: Vec<Complex64> = (0..n).map(|k| t[(k, k)]).collect();
    let mut right = DMatrix::zeros(n, n);
    let mut left = DMatrix::zeros(n, n);
    for k in 0..n {
        let lam = values[k];
        let mut y = DVector::zeros(n);
        y[k] = ONE;
        for j in (0..k).rev() {
            let mut acc = ZERO;
            for l in j + 1..=k {
                acc += t[(j, l)] * y[l];
            }
            y[j] = -acc / guard(t[(j, j)] - lam);
        }
        let x = &q * y;
        let nx = x.norm();
        right.set_column(k, &(x / Complex64::new(nx, 0.0)));

        let mut u = DVector::zeros(n);
        u[k] = ONE;
        for j in k + 1..n {
            let mut acc = ZERO;
            for l in k..j {
                acc += t[(l, j)].conj() * u[l];
            }
            u[j] = -acc / guard(t[(j, j)].conj() - lam.conj());
        }
        let y = &q * u;
        let ny = y.norm();
        left.set_column(k, &(y / Complex64::new(ny, 0.0)));
    }
    Ok(Eigen {
        values,
        right,
        left,
    })
}

//! T-periodic trigonometric polynomials with vector and matrix values.
//!
//! A function is stored as its two-sided Fourier coefficients
//! `f(t) = sum_{k=-M}^{M} F_k exp(i omega k t)` with `omega = 2 pi / T`.
//! Coefficients are dense: index `k` lives at position `k + M`.
//!
//! The inner product is the normalized L2 product on one period,
//! `<w, v> = (1/T) int_0^T w(t)^* v(t) dt`, which by Parseval equals
//! `sum_k W_k^* V_k`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative tail tolerance used when trimming products.
pub const DEFAULT_TRIM_TOL: f64 = 1e-12;

fn check_period(period: f64) -> Result<()> {
    if period.is_finite() && period > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("period must be positive, got {period}")))
    }
}

fn same_period(a: f64, b: f64) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::PeriodMismatch { left: a, right: b })
    }
}

/// `exp(i omega k t)` for `k = -m..=m`.
fn harmonics(omega: f64, m: usize, t: f64) -> Vec<Complex64> {
    let mut out = vec![ZERO; 2 * m + 1];
    out[m] = Complex64::new(1.0, 0.0);
    for j in 1..=m {
        // direct evaluation keeps the error flat in j
        out[m + j] = Complex64::from_polar(1.0, omega * j as f64 * t);
        out[m - j] = out[m + j].conj();
    }
    out
}

/// T-periodic vector-valued trigonometric polynomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VecRepr", into = "VecRepr")]
pub struct TrigVecFn {
    period: f64,
    /// `dim x (2M+1)`, column `k + M` holds `V_k`.
    coeffs: DMatrix<Complex64>,
}

impl TrigVecFn {
    pub fn new(period: f64, coeffs: DMatrix<Complex64>) -> Result<Self> {
        check_period(period)?;
        if coeffs.nrows() == 0 || coeffs.ncols().is_multiple_of(2) {
            return Err(Error::DimensionMismatch(format!(
                "coefficient block must be dim x (2M+1), got {}x{}",
                coeffs.nrows(),
                coeffs.ncols()
            )));
        }
        Ok(Self { period, coeffs })
    }

    pub fn zeros(dim: usize, period: f64, depth: usize) -> Self {
        Self {
            period,
            coeffs: DMatrix::zeros(dim, 2 * depth + 1),
        }
    }

    pub fn constant(period: f64, value: &DVector<Complex64>) -> Self {
        Self {
            period,
            coeffs: DMatrix::from_column_slice(value.len(), 1, value.as_slice()),
        }
    }

    /// Build from `(k, V_k)` pairs; unlisted harmonics are zero.
    pub fn from_harmonics<I>(dim: usize, period: f64, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, DVector<Complex64>)>,
    {
        check_period(period)?;
        let terms: Vec<_> = terms.into_iter().collect();
        let depth = terms.iter().map(|(k, _)| k.unsigned_abs() as usize).max().unwrap_or(0);
        let mut out = Self::zeros(dim, period, depth);
        for (k, v) in terms {
            if v.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "harmonic {k} has length {}, expected {dim}",
                    v.len()
                )));
            }
            let col = (k + depth as i64) as usize;
            let mut c = out.coeffs.column_mut(col);
            c += &v;
        }
        Ok(out)
    }

    /// Scalar (dimension one) trigonometric polynomial from `(k, c_k)` pairs.
    pub fn scalar(period: f64, terms: &[(i64, Complex64)]) -> Result<Self> {
        Self::from_harmonics(
            1,
            period,
            terms.iter().map(|&(k, c)| (k, DVector::from_element(1, c))),
        )
    }

    /// Stack functions vertically into one vector function.
    pub fn stack(parts: &[TrigVecFn]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidArgument("cannot stack zero functions".into()))?;
        let depth = parts.iter().map(|p| p.depth()).max().unwrap_or(0);
        let dim: usize = parts.iter().map(|p| p.dim()).sum();
        let mut out = Self::zeros(dim, first.period, depth);
        let mut row = 0;
        for p in parts {
            same_period(first.period, p.period)?;
            let off = depth - p.depth();
            out.coeffs
                .view_mut((row, off), (p.dim(), p.coeffs.ncols()))
                .copy_from(&p.coeffs);
            row += p.dim();
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.coeffs.nrows()
    }

    pub fn depth(&self) -> usize {
        (self.coeffs.ncols() - 1) / 2
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn omega(&self) -> f64 {
        2.0 * PI / self.period
    }

    pub fn coeffs(&self) -> &DMatrix<Complex64> {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> DMatrix<Complex64> {
        self.coeffs
    }

    /// Coefficient `V_k`, zero outside the stored range.
    pub fn coeff(&self, k: i64) -> DVector<Complex64> {
        let m = self.depth() as i64;
        if k.abs() > m {
            DVector::zeros(self.dim())
        } else {
            self.coeffs.column((k + m) as usize).into_owned()
        }
    }

    /// Scalar coefficient of component `i` at harmonic `k`.
    pub fn entry(&self, i: usize, k: i64) -> Complex64 {
        let m = self.depth() as i64;
        if k.abs() > m {
            ZERO
        } else {
            self.coeffs[(i, (k + m) as usize)]
        }
    }

    /// Component `i` as a scalar function.
    pub fn component(&self, i: usize) -> TrigVecFn {
        Self {
            period: self.period,
            coeffs: self.coeffs.rows(i, 1).into_owned(),
        }
    }

    pub fn evaluate(&self, t: f64) -> DVector<Complex64> {
        let h = harmonics(self.omega(), self.depth(), t);
        let mut out = DVector::zeros(self.dim());
        for (j, hj) in h.iter().enumerate() {
            out.axpy(*hj, &self.coeffs.column(j), Complex64::new(1.0, 0.0));
        }
        out
    }

    pub fn check_compatible(&self, other: &TrigVecFn) -> Result<()> {
        same_period(self.period, other.period)?;
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "vector functions have dims {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }

    /// `<self, other> = (1/T) int self^* other dt`.
    pub fn inner_product(&self, other: &TrigVecFn) -> Result<Complex64> {
        self.check_compatible(other)?;
        Ok(self.inner_product_unchecked(other))
    }

    pub(crate) fn inner_product_unchecked(&self, other: &TrigVecFn) -> Complex64 {
        let (ma, mb) = (self.depth() as i64, other.depth() as i64);
        let m = ma.min(mb);
        let mut acc = ZERO;
        for k in -m..=m {
            let a = self.coeffs.column((k + ma) as usize);
            let b = other.coeffs.column((k + mb) as usize);
            acc += a.dotc(&b);
        }
        acc
    }

    pub fn norm_squared(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// L2 norm over one period (normalized by T).
    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn differentiate(&self) -> Self {
        let m = self.depth() as i64;
        let w = self.omega();
        let mut out = self.clone();
        for (j, mut col) in out.coeffs.column_iter_mut().enumerate() {
            let k = j as i64 - m;
            col *= Complex64::new(0.0, w * k as f64);
        }
        out
    }

    /// `f(t) exp(-i omega l t)`: harmonic `k` moves to `k - l`.
    pub fn phase_shift(&self, l: i64) -> Self {
        if l == 0 {
            return self.clone();
        }
        let m = self.depth() as i64;
        let new_m = (m + l.abs()) as usize;
        let mut out = Self::zeros(self.dim(), self.period, new_m);
        let start = (new_m as i64 - m - l) as usize;
        out.coeffs
            .columns_mut(start, self.coeffs.ncols())
            .copy_from(&self.coeffs);
        out.trim_exact()
    }

    /// Drop harmonics with `|k| > new_depth`; returns the L2 norm of what was dropped.
    pub fn truncate(&self, new_depth: usize) -> (Self, f64) {
        let m = self.depth();
        if new_depth >= m {
            return (self.clone(), 0.0);
        }
        let off = m - new_depth;
        let kept = self.coeffs.columns(off, 2 * new_depth + 1).into_owned();
        let tail: f64 = self
            .coeffs
            .column_iter()
            .enumerate()
            .filter(|(j, _)| *j < off || *j > off + 2 * new_depth)
            .map(|(_, c)| c.norm_squared())
            .sum();
        (
            Self {
                period: self.period,
                coeffs: kept,
            },
            tail.sqrt(),
        )
    }

    /// Smallest truncation whose dropped tail is at most `rel_tol * ||f||`.
    pub fn trim(&self, rel_tol: f64) -> Self {
        let m = self.depth();
        let total = self.norm_squared();
        let budget = (rel_tol * rel_tol) * total;
        let mut tail = 0.0;
        let mut depth = m;
        while depth > 0 {
            let lo = self.coeffs.column(m - depth).norm_squared();
            let hi = self.coeffs.column(m + depth).norm_squared();
            if tail + lo + hi > budget {
                break;
            }
            tail += lo + hi;
            depth -= 1;
        }
        self.truncate(depth).0
    }

    /// Remove outer harmonics that are exactly zero.
    pub fn trim_exact(&self) -> Self {
        self.trim(0.0)
    }

    /// Zero-pad to at least `depth` harmonics.
    pub fn padded(&self, depth: usize) -> Self {
        let m = self.depth();
        if depth <= m {
            return self.clone();
        }
        let mut out = Self::zeros(self.dim(), self.period, depth);
        out.coeffs
            .columns_mut(depth - m, 2 * m + 1)
            .copy_from(&self.coeffs);
        out
    }

    pub fn scale(&self, alpha: Complex64) -> Self {
        Self {
            period: self.period,
            coeffs: &self.coeffs * alpha,
        }
    }

    /// `self + alpha * other`, depth grows to the larger of the two.
    pub fn add_scaled(&self, alpha: Complex64, other: &TrigVecFn) -> Result<Self> {
        self.check_compatible(other)?;
        let depth = self.depth().max(other.depth());
        let mut out = self.padded(depth);
        let off = depth - other.depth();
        let mut view = out.coeffs.columns_mut(off, other.coeffs.ncols());
        for (d, s) in view.iter_mut().zip(other.coeffs.iter()) {
            *d += alpha * s;
        }
        Ok(out)
    }

    pub fn add(&self, other: &TrigVecFn) -> Result<Self> {
        self.add_scaled(Complex64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &TrigVecFn) -> Result<Self> {
        self.add_scaled(Complex64::new(-1.0, 0.0), other)
    }

    /// Pointwise `self(t)^* other(t)` as a scalar function.
    pub fn pointwise_dot(&self, other: &TrigVecFn) -> Result<Self> {
        self.check_compatible(other)?;
        let (mq, mb) = (self.depth() as i64, other.depth() as i64);
        let m = mq + mb;
        let mut out = vec![ZERO; (2 * m + 1) as usize];
        for kq in -mq..=mq {
            let q = self.coeffs.column((kq + mq) as usize);
            for kb in -mb..=mb {
                let b = other.coeffs.column((kb + mb) as usize);
                // q_k^* e^{-i w kq t} times b_k e^{i w kb t}
                out[(kb - kq + m) as usize] += q.dotc(&b);
            }
        }
        Ok(Self {
            period: self.period,
            coeffs: DMatrix::from_row_slice(1, out.len(), &out),
        })
    }

    /// Multiply by a scalar trigonometric polynomial `s(t)`.
    pub fn modulate(&self, scalar: &TrigVecFn) -> Result<Self> {
        same_period(self.period, scalar.period)?;
        if scalar.dim() != 1 {
            return Err(Error::DimensionMismatch(format!(
                "modulating function must be scalar, got dim {}",
                scalar.dim()
            )));
        }
        let (mv, ms) = (self.depth(), scalar.depth());
        let mut out = Self::zeros(self.dim(), self.period, mv + ms);
        for (js, s) in scalar.coeffs.iter().enumerate() {
            if *s == ZERO {
                continue;
            }
            // harmonic shift of js - ms maps column j to j + js
            let mut view = out.coeffs.columns_mut(js, self.coeffs.ncols());
            for (d, x) in view.iter_mut().zip(self.coeffs.iter()) {
                *d += *s * x;
            }
        }
        Ok(out)
    }

    pub fn conj(&self) -> Self {
        // conj(f)(t) has coefficients conj(F_{-k})
        let n = self.coeffs.ncols();
        let mut coeffs = DMatrix::zeros(self.dim(), n);
        for j in 0..n {
            coeffs.set_column(j, &self.coeffs.column(n - 1 - j).map(|c| c.conj()));
        }
        Self {
            period: self.period,
            coeffs,
        }
    }

    /// Largest coefficient difference, zero-padding the shallower operand.
    pub fn max_coeff_diff(&self, other: &TrigVecFn) -> Result<f64> {
        let d = self.sub(other)?;
        Ok(d.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max))
    }
}

type SparseCoeff = Option<Vec<(usize, usize, Complex64)>>;

/// T-periodic matrix-valued trigonometric polynomial.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "MatRepr", into = "MatRepr")]
pub struct TrigMatFn {
    period: f64,
    rows: usize,
    cols: usize,
    coeffs: Vec<DMatrix<Complex64>>,
    #[serde(skip)]
    sparse: OnceLock<Vec<SparseCoeff>>,
}

impl PartialEq for TrigMatFn {
    fn eq(&self, other: &Self) -> bool {
        self.period == other.period
            && self.rows == other.rows
            && self.cols == other.cols
            && self.coeffs == other.coeffs
    }
}

impl TrigMatFn {
    pub fn new(period: f64, coeffs: Vec<DMatrix<Complex64>>) -> Result<Self> {
        check_period(period)?;
        if coeffs.len().is_multiple_of(2) {
            return Err(Error::DimensionMismatch(
                "matrix function needs an odd number (2M+1) of coefficients".into(),
            ));
        }
        let (rows, cols) = coeffs[0].shape();
        if rows == 0 || cols == 0 || coeffs.iter().any(|c| c.shape() != (rows, cols)) {
            return Err(Error::DimensionMismatch(
                "all coefficients must share one nonempty shape".into(),
            ));
        }
        Ok(Self::from_parts(period, rows, cols, coeffs))
    }

    fn from_parts(period: f64, rows: usize, cols: usize, coeffs: Vec<DMatrix<Complex64>>) -> Self {
        Self {
            period,
            rows,
            cols,
            coeffs,
            sparse: OnceLock::new(),
        }
    }

    pub fn zeros(rows: usize, cols: usize, period: f64, depth: usize) -> Self {
        Self::from_parts(period, rows, cols, vec![DMatrix::zeros(rows, cols); 2 * depth + 1])
    }

    pub fn constant(period: f64, m: DMatrix<Complex64>) -> Result<Self> {
        Self::new(period, vec![m])
    }

    pub fn identity(n: usize, period: f64) -> Self {
        Self::from_parts(period, n, n, vec![DMatrix::identity(n, n)])
    }

    pub fn from_harmonics<I>(rows: usize, cols: usize, period: f64, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, DMatrix<Complex64>)>,
    {
        check_period(period)?;
        let terms: Vec<_> = terms.into_iter().collect();
        let depth = terms.iter().map(|(k, _)| k.unsigned_abs() as usize).max().unwrap_or(0);
        let mut out = Self::zeros(rows, cols, period, depth);
        for (k, m) in terms {
            if m.shape() != (rows, cols) {
                return Err(Error::DimensionMismatch(format!(
                    "harmonic {k} has shape {:?}, expected {:?}",
                    m.shape(),
                    (rows, cols)
                )));
            }
            out.coeffs[(k + depth as i64) as usize] += m;
        }
        Ok(out)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn depth(&self) -> usize {
        (self.coeffs.len() - 1) / 2
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn omega(&self) -> f64 {
        2.0 * PI / self.period
    }

    pub fn coeffs(&self) -> &[DMatrix<Complex64>] {
        &self.coeffs
    }

    /// Coefficient `A_k`, or `None` outside the stored range.
    pub fn coeff(&self, k: i64) -> Option<&DMatrix<Complex64>> {
        let m = self.depth() as i64;
        if k.abs() > m {
            None
        } else {
            Some(&self.coeffs[(k + m) as usize])
        }
    }

    pub fn evaluate(&self, t: f64) -> DMatrix<Complex64> {
        let h = harmonics(self.omega(), self.depth(), t);
        let mut out = DMatrix::zeros(self.rows, self.cols);
        for (c, hj) in self.coeffs.iter().zip(h) {
            out += c * hj;
        }
        out
    }

    fn sparse_coeffs(&self) -> &[SparseCoeff] {
        self.sparse.get_or_init(|| {
            let limit = (self.rows * self.cols) / 4;
            self.coeffs
                .iter()
                .map(|c| {
                    let mut nz = Vec::new();
                    for j in 0..c.ncols() {
                        for i in 0..c.nrows() {
                            let a = c[(i, j)];
                            if a != ZERO {
                                if nz.len() >= limit {
                                    return None;
                                }
                                nz.push((i, j, a));
                            }
                        }
                    }
                    Some(nz)
                })
                .collect()
        })
    }

    /// Indices `(i, j)` where any coefficient is nonzero.
    pub fn nonzero_pattern(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for j in 0..self.cols {
            for i in 0..self.rows {
                if self.coeffs.iter().any(|c| c[(i, j)] != ZERO) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Pointwise product `self(t) other(t)`, computed by coefficient convolution.
    pub fn multiply(&self, other: &TrigMatFn) -> Result<TrigMatFn> {
        same_period(self.period, other.period)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let (ma, mb) = (self.depth(), other.depth());
        let mut out = Self::zeros(self.rows, other.cols, self.period, ma + mb);
        let sparse = self.sparse_coeffs();
        for (ja, a) in self.coeffs.iter().enumerate() {
            for (jb, b) in other.coeffs.iter().enumerate() {
                let target = &mut out.coeffs[ja + jb];
                match &sparse[ja] {
                    Some(nz) => {
                        for &(i, j, v) in nz {
                            for col in 0..b.ncols() {
                                target[(i, col)] += v * b[(j, col)];
                            }
                        }
                    }
                    None => target.gemm(Complex64::new(1.0, 0.0), a, b, Complex64::new(1.0, 0.0)),
                }
            }
        }
        Ok(out)
    }

    /// Pointwise matrix-vector product `self(t) v(t)`.
    pub fn apply(&self, v: &TrigVecFn) -> Result<TrigVecFn> {
        same_period(self.period, v.period)?;
        if self.cols != v.dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot apply {}x{} matrix function to dim {}",
                self.rows,
                self.cols,
                v.dim()
            )));
        }
        let (ma, mv) = (self.depth(), v.depth());
        let mut out = TrigVecFn::zeros(self.rows, self.period, ma + mv);
        let width = v.coeffs.ncols();
        let sparse = self.sparse_coeffs();
        for (ja, a) in self.coeffs.iter().enumerate() {
            let mut view = out.coeffs.columns_mut(ja, width);
            match &sparse[ja] {
                Some(nz) => {
                    for &(i, j, val) in nz {
                        for col in 0..width {
                            view[(i, col)] += val * v.coeffs[(j, col)];
                        }
                    }
                }
                None => view.gemm(Complex64::new(1.0, 0.0), a, &v.coeffs, Complex64::new(1.0, 0.0)),
            }
        }
        Ok(out)
    }

    /// Pointwise conjugate transpose: `(M^H)_k = (M_{-k})^*`.
    pub fn adjoint(&self) -> TrigMatFn {
        let coeffs = self.coeffs.iter().rev().map(|c| c.adjoint()).collect();
        Self::from_parts(self.period, self.cols, self.rows, coeffs)
    }

    pub fn differentiate(&self) -> TrigMatFn {
        let m = self.depth() as i64;
        let w = self.omega();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| c * Complex64::new(0.0, w * (j as i64 - m) as f64))
            .collect();
        Self::from_parts(self.period, self.rows, self.cols, coeffs)
    }

    pub fn scale(&self, alpha: Complex64) -> TrigMatFn {
        let coeffs = self.coeffs.iter().map(|c| c * alpha).collect();
        Self::from_parts(self.period, self.rows, self.cols, coeffs)
    }

    pub fn add(&self, other: &TrigMatFn) -> Result<TrigMatFn> {
        same_period(self.period, other.period)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch("matrix function shapes differ".into()));
        }
        let depth = self.depth().max(other.depth());
        let mut out = Self::zeros(self.rows, self.cols, self.period, depth);
        for (src, m) in [(self, self.depth()), (other, other.depth())] {
            for (j, c) in src.coeffs.iter().enumerate() {
                out.coeffs[j + depth - m] += c;
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &TrigMatFn) -> Result<TrigMatFn> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn column(&self, j: usize) -> TrigVecFn {
        let mut coeffs = DMatrix::zeros(self.rows, self.coeffs.len());
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs.set_column(k, &c.column(j));
        }
        TrigVecFn {
            period: self.period,
            coeffs,
        }
    }

    pub fn truncate(&self, new_depth: usize) -> (TrigMatFn, f64) {
        let m = self.depth();
        if new_depth >= m {
            return (self.clone(), 0.0);
        }
        let off = m - new_depth;
        let kept: Vec<_> = self.coeffs[off..off + 2 * new_depth + 1].to_vec();
        let tail: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(j, _)| *j < off || *j > off + 2 * new_depth)
            .map(|(_, c)| c.norm_squared())
            .sum();
        (Self::from_parts(self.period, self.rows, self.cols, kept), tail.sqrt())
    }

    /// Smallest truncation whose dropped tail is at most `rel_tol` times the Frobenius-L2 norm.
    pub fn trim(&self, rel_tol: f64) -> TrigMatFn {
        let m = self.depth();
        let total: f64 = self.coeffs.iter().map(|c| c.norm_squared()).sum();
        let budget = rel_tol * rel_tol * total;
        let mut tail = 0.0;
        let mut depth = m;
        while depth > 0 {
            let next = self.coeffs[m - depth].norm_squared() + self.coeffs[m + depth].norm_squared();
            if tail + next > budget {
                break;
            }
            tail += next;
            depth -= 1;
        }
        self.truncate(depth).0
    }

    pub fn max_coeff_diff(&self, other: &TrigMatFn) -> Result<f64> {
        let d = self.sub(other)?;
        Ok(d
            .coeffs
            .iter()
            .flat_map(|c| c.iter().map(|z| z.norm()))
            .fold(0.0, f64::max))
    }
}

// JSON representations: {"period", "depth", "coeffs": [[k, [[re, im], ...]], ...]}.

#[derive(Serialize, Deserialize)]
struct VecRepr {
    period: f64,
    depth: usize,
    coeffs: Vec<(i64, Vec<[f64; 2]>)>,
}

impl From<TrigVecFn> for VecRepr {
    fn from(f: TrigVecFn) -> Self {
        let m = f.depth() as i64;
        let coeffs = f
            .coeffs
            .column_iter()
            .enumerate()
            .map(|(j, c)| (j as i64 - m, c.iter().map(|z| [z.re, z.im]).collect()))
            .collect();
        Self {
            period: f.period,
            depth: f.depth(),
            coeffs,
        }
    }
}

impl TryFrom<VecRepr> for TrigVecFn {
    type Error = Error;

    fn try_from(r: VecRepr) -> Result<Self> {
        let dim = r
            .coeffs
            .first()
            .map(|(_, v)| v.len())
            .ok_or_else(|| Error::Parse("vector function has no coefficients".into()))?;
        let mut seen = vec![false; 2 * r.depth + 1];
        let mut out = TrigVecFn::zeros(dim.max(1), r.period, r.depth);
        check_period(r.period)?;
        for (k, v) in r.coeffs {
            if k.unsigned_abs() as usize > r.depth {
                return Err(Error::Parse(format!("harmonic {k} exceeds depth {}", r.depth)));
            }
            let col = (k + r.depth as i64) as usize;
            if std::mem::replace(&mut seen[col], true) {
                return Err(Error::Parse(format!("harmonic {k} listed twice")));
            }
            if v.len() != dim || dim == 0 {
                return Err(Error::Parse(format!("harmonic {k} has inconsistent length")));
            }
            for (i, [re, im]) in v.into_iter().enumerate() {
                out.coeffs[(i, col)] = Complex64::new(re, im);
            }
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct MatRepr {
    period: f64,
    depth: usize,
    rows: usize,
    cols: usize,
    /// Row-major entries per harmonic.
    coeffs: Vec<(i64, Vec<Vec<[f64; 2]>>)>,
}

impl From<TrigMatFn> for MatRepr {
    fn from(f: TrigMatFn) -> Self {
        let m = f.depth() as i64;
        let coeffs = f
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let rows = (0..c.nrows())
                    .map(|i| (0..c.ncols()).map(|l| [c[(i, l)].re, c[(i, l)].im]).collect())
                    .collect();
                (j as i64 - m, rows)
            })
            .collect();
        Self {
            period: f.period,
            depth: f.depth(),
            rows: f.rows,
            cols: f.cols,
            coeffs,
        }
    }
}

impl TryFrom<MatRepr> for TrigMatFn {
    type Error = Error;

    fn try_from(r: MatRepr) -> Result<Self> {
        check_period(r.period)?;
        if r.rows == 0 || r.cols == 0 {
            return Err(Error::Parse("matrix function must be nonempty".into()));
        }
        let mut out = TrigMatFn::zeros(r.rows, r.cols, r.period, r.depth);
        let mut seen = vec![false; 2 * r.depth + 1];
        for (k, rows) in r.coeffs {
            if k.unsigned_abs() as usize > r.depth {
                return Err(Error::Parse(format!("harmonic {k} exceeds depth {}", r.depth)));
            }
            let idx = (k + r.depth as i64) as usize;
            if std::mem::replace(&mut seen[idx], true) {
                return Err(Error::Parse(format!("harmonic {k} listed twice")));
            }
            if rows.len() != r.rows || rows.iter().any(|row| row.len() != r.cols) {
                return Err(Error::Parse(format!("harmonic {k} has inconsistent shape")));
            }
            for (i, row) in rows.into_iter().enumerate() {
                for (j, [re, im]) in row.into_iter().enumerate() {
                    out.coeffs[idx][(i, j)] = Complex64::new(re, im);
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sin_fn() -> TrigVecFn {
        // sin t = (e^{it} - e^{-it}) / (2i)
        TrigVecFn::scalar(2.0 * PI, &[(1, c(0.0, -0.5)), (-1, c(0.0, 0.5))]).unwrap()
    }

    pub(crate) fn random_vec(rng: &mut ChaCha8Rng, dim: usize, depth: usize, period: f64) -> TrigVecFn {
        let coeffs = DMatrix::from_fn(dim, 2 * depth + 1, |_, _| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        TrigVecFn::new(period, coeffs).unwrap()
    }

    fn random_mat(rng: &mut ChaCha8Rng, rows: usize, cols: usize, depth: usize, period: f64) -> TrigMatFn {
        let coeffs = (0..2 * depth + 1)
            .map(|_| {
                DMatrix::from_fn(rows, cols, |_, _| {
                    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                })
            })
            .collect();
        TrigMatFn::new(period, coeffs).unwrap()
    }

    #[test]
    fn constant_evaluates_to_its_coefficient() {
        let v = DVector::from_vec(vec![c(1.0, 2.0), c(-3.0, 0.5)]);
        let f = TrigVecFn::constant(3.0, &v);
        for t in [0.0, 0.7, -12.3] {
            assert_eq!(f.evaluate(t), v);
        }
    }

    #[test]
    fn sine_at_quarter_period() {
        let f = sin_fn();
        let val = f.evaluate(PI / 2.0)[0];
        assert!((val - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn evaluate_matches_direct_summation() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_vec(&mut rng, 3, 3, 1.7);
        let w = 2.0 * PI / 1.7;
        for _ in 0..100 {
            let t: f64 = rng.random_range(-5.0..5.0);
            let mut direct = DVector::zeros(3);
            for k in -3i64..=3 {
                let e = Complex64::new(0.0, w * k as f64 * t).exp();
                direct += f.coeff(k) * e;
            }
            assert!((f.evaluate(t) - direct).camax() < 1e-13);
            assert!((f.evaluate(t) - f.evaluate(t + 1.7)).camax() < 1e-12);
        }
    }

    #[test]
    fn inner_product_basics() {
        let e = DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let one = TrigVecFn::constant(2.0, &e);
        assert!((one.inner_product(&one).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        let osc = TrigVecFn::from_harmonics(2, 2.0, [(1, e.clone())]).unwrap();
        assert_eq!(one.inner_product(&osc).unwrap(), ZERO);
    }

    #[test]
    fn inner_product_matches_trapezoid_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let period = 2.3;
        let w = random_vec(&mut rng, 4, 4, period);
        let v = random_vec(&mut rng, 4, 4, period);
        let n = 4096;
        let mut quad = ZERO;
        for j in 0..n {
            let t = period * j as f64 / n as f64;
            quad += w.evaluate(t).dotc(&v.evaluate(t));
        }
        quad /= n as f64;
        assert!((quad - w.inner_product(&v).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn mismatched_operands_are_rejected() {
        let a = TrigVecFn::zeros(2, 1.0, 1);
        assert!(matches!(
            a.inner_product(&TrigVecFn::zeros(3, 1.0, 1)),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            a.inner_product(&TrigVecFn::zeros(2, 2.0, 1)),
            Err(Error::PeriodMismatch { .. })
        ));
        let m = TrigMatFn::identity(3, 1.0);
        assert!(m.apply(&a).is_err());
    }

    #[test]
    fn identity_product_is_noop() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = random_vec(&mut rng, 3, 2, 1.0);
        let id = TrigMatFn::identity(3, 1.0);
        assert_eq!(id.apply(&v).unwrap(), v);
    }

    #[test]
    fn product_matches_pointwise_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random_mat(&mut rng, 3, 4, 2, 1.3);
        let b = random_mat(&mut rng, 4, 2, 3, 1.3);
        let v = random_vec(&mut rng, 4, 1, 1.3);
        let ab = a.multiply(&b).unwrap();
        let av = a.apply(&v).unwrap();
        assert_eq!(ab.depth(), 5);
        for j in 0..64 {
            let t = 1.3 * j as f64 / 64.0 + 0.01;
            let direct = a.evaluate(t) * b.evaluate(t);
            assert!((ab.evaluate(t) - direct).camax() < 1e-12);
            let direct_v = a.evaluate(t) * v.evaluate(t);
            assert!((av.evaluate(t) - direct_v).camax() < 1e-12);
        }
    }

    #[test]
    fn sparse_and_dense_products_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let dense = random_mat(&mut rng, 12, 12, 1, 1.0);
        let mut sparse_coeffs = Vec::new();
        for k in 0..3 {
            let mut m = DMatrix::zeros(12, 12);
            m[(k, k + 1)] = c(1.0 + k as f64, -0.5);
            m[(7, 2)] = c(0.25, 0.75);
            sparse_coeffs.push(m);
        }
        let sparse = TrigMatFn::new(1.0, sparse_coeffs.clone()).unwrap();
        let fake_dense = TrigMatFn::new(1.0, sparse_coeffs).unwrap();
        // force the dense path on the copy
        fake_dense.sparse.set(vec![None; 3]).unwrap();
        let a = sparse.multiply(&dense).unwrap();
        let b = fake_dense.multiply(&dense).unwrap();
        assert!(a.max_coeff_diff(&b).unwrap() < 1e-14);
        let v = random_vec(&mut rng, 12, 2, 1.0);
        let x = sparse.apply(&v).unwrap();
        let y = fake_dense.apply(&v).unwrap();
        assert!(x.max_coeff_diff(&y).unwrap() < 1e-14);
    }

    #[test]
    fn derivative_of_sine_is_cosine() {
        let d = sin_fn().differentiate();
        let cos = TrigVecFn::scalar(2.0 * PI, &[(1, c(0.5, 0.0)), (-1, c(0.5, 0.0))]).unwrap();
        assert!(d.max_coeff_diff(&cos).unwrap() < 1e-15);
        let k = TrigVecFn::constant(1.0, &DVector::from_element(2, c(3.0, 1.0)));
        assert_eq!(k.differentiate().norm(), 0.0);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let f = random_vec(&mut rng, 2, 3, 2.0);
        let d = f.differentiate();
        let h = 1e-6;
        for j in 0..32 {
            let t = 2.0 * j as f64 / 32.0;
            let fd = (f.evaluate(t + h) - f.evaluate(t - h)) / c(2.0 * h, 0.0);
            assert!((fd - d.evaluate(t)).camax() < 1e-6);
        }
    }

    #[test]
    fn phase_shift_moves_harmonics() {
        let v = DVector::from_vec(vec![c(1.0, 0.0), c(2.0, -1.0)]);
        let f = TrigVecFn::constant(1.0, &v);
        assert_eq!(f.phase_shift(0), f);
        let g = f.phase_shift(1);
        assert_eq!(g.depth(), 1);
        assert_eq!(g.coeff(-1), v);
        assert_eq!(g.coeff(0).norm(), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let r = random_vec(&mut rng, 3, 2, 1.0);
        assert_eq!(r.phase_shift(3).phase_shift(-3), r);
    }

    #[test]
    fn truncate_reports_tail() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let f = random_vec(&mut rng, 3, 5, 1.0);
        let (g, tail) = f.truncate(2);
        assert_eq!(g.depth(), 2);
        let direct: f64 = [-5i64, -4, -3, 3, 4, 5]
            .iter()
            .map(|&k| f.coeff(k).norm_squared())
            .sum::<f64>()
            .sqrt();
        assert!((tail - direct).abs() < 1e-14);
        assert_eq!(f.truncate(9), (f.clone(), 0.0));
        let k = TrigVecFn::constant(1.0, &DVector::from_element(1, c(1.0, 0.0)));
        assert_eq!(k.truncate(0), (k.clone(), 0.0));
    }

    #[test]
    fn pointwise_dot_and_modulate_match_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let q = random_vec(&mut rng, 3, 2, 1.0);
        let b = random_vec(&mut rng, 3, 1, 1.0);
        let s = random_vec(&mut rng, 1, 2, 1.0);
        let qb = q.pointwise_dot(&b).unwrap();
        let sb = b.modulate(&s).unwrap();
        for j in 0..16 {
            let t = j as f64 / 16.0;
            let direct = q.evaluate(t).dotc(&b.evaluate(t));
            assert!((qb.evaluate(t)[0] - direct).norm() < 1e-13);
            let direct = b.evaluate(t) * s.evaluate(t)[0];
            assert!((sb.evaluate(t) - direct).camax() < 1e-13);
        }
        let cq = q.conj();
        for t in [0.1, 0.4] {
            assert!((cq.evaluate(t) - q.evaluate(t).map(|z| z.conj())).camax() < 1e-14);
        }
    }

    #[test]
    fn matrix_adjoint_is_pointwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let m = random_mat(&mut rng, 2, 3, 2, 1.0);
        let h = m.adjoint();
        for t in [0.0, 0.3, 0.77] {
            assert!((h.evaluate(t) - m.evaluate(t).adjoint()).camax() < 1e-14);
        }
        assert_eq!(m.column(1).evaluate(0.3), m.evaluate(0.3).column(1).into_owned());
    }

    #[test]
    fn json_round_trip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let v = random_vec(&mut rng, 3, 2, 0.1 + 1.0 / 3.0);
        let s = serde_json::to_string(&v).unwrap();
        let back: TrigVecFn = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
        let m = random_mat(&mut rng, 2, 3, 1, 7.0);
        let s = serde_json::to_string(&m).unwrap();
        let back: TrigMatFn = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn json_rejects_bad_harmonics() {
        let bad = r#"{"period": 1.0, "depth": 1, "coeffs": [[2, [[1.0, 0.0]]]]}"#;
        assert!(serde_json::from_str::<TrigVecFn>(bad).is_err());
        let ragged = r#"{"period": 1.0, "depth": 1, "coeffs": [[0, [[1.0, 0.0]]], [1, [[1.0, 0.0], [0.0, 0.0]]]]}"#;
        assert!(serde_json::from_str::<TrigVecFn>(ragged).is_err());
    }
}

//! Port-isolated reduced models from eigentriples and their LTI extensions.
//!
//! With `P_r`, `Q_r` spanning right and left invariant subspaces of `L`, the
//! reduced model is
//!
//! ```text
//! z_r' = Lambda_r z_r + M_r^{-1} Q_r(t)^* b(t) u,   y_r = (P_r(t)^* c(t))^* z_r.
//! ```
//!
//! Lifting the harmonics of the transformed ports to separate channels gives
//! the LTI extension `H_ext(s) = C^* (sI - Lambda)^{-1} B`.

use std::path::Path;

use log::warn;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dpa::Eigentriple;
use crate::error::{Error, Result};
use crate::systems::{ExampleGroundTruth, LtpSystem};
use crate::trigfun::TrigVecFn;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Condition number of `M_r` above which a warning is logged.
pub const MR_COND_WARN: f64 = 1e8;

/// Relative size of a port harmonic beyond `K` that counts as truncation.
pub const PORT_TAIL_TOL: f64 = 1e-10;

/// Truncated Floquet factors `P_r(t)`, `Q_r(t)` with diagonal `Lambda_r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "PartialFloquetRepr", try_from = "PartialFloquetRepr")]
pub struct PartialFloquet {
    pub lambdas: Vec<Complex64>,
    pub p: Vec<TrigVecFn>,
    pub q: Vec<TrigVecFn>,
    /// `Q_r(0)^* P_r(0)`.
    pub mr: DMatrix<Complex64>,
}

impl PartialFloquet {
    pub fn new(lambdas: Vec<Complex64>, p: Vec<TrigVecFn>, q: Vec<TrigVecFn>) -> Result<Self> {
        let r = lambdas.len();
        if r == 0 || p.len() != r || q.len() != r {
            return Err(Error::DimensionMismatch(format!(
                "partial Floquet needs r >= 1 matching columns, got {r} / {} / {}",
                p.len(),
                q.len()
            )));
        }
        for f in p.iter().chain(&q) {
            p[0].check_compatible(f)?;
        }
        let mr = gram_at(&q, &p, 0.0);
        Ok(Self { lambdas, p, q, mr })
    }

    pub fn from_triples(triples: &[Eigentriple]) -> Result<Self> {
        Self::new(
            triples.iter().map(|t| t.lambda).collect(),
            triples.iter().map(|t| t.p.clone()).collect(),
            triples.iter().map(|t| t.q.clone()).collect(),
        )
    }

    /// Columns `idx` of the benchmark's exact Floquet factors.
    pub fn from_ground_truth(gt: &ExampleGroundTruth, idx: &[usize]) -> Result<Self> {
        let q = gt.q();
        Self::new(
            idx.iter().map(|&j| Complex64::new(gt.r[j], 0.0)).collect(),
            idx.iter().map(|&j| gt.p.column(j)).collect(),
            idx.iter().map(|&j| q.column(j)).collect(),
        )
    }

    pub fn r(&self) -> usize {
        self.lambdas.len()
    }

    pub fn period(&self) -> f64 {
        self.p[0].period()
    }

    /// `max_t ||Q_r(t)^* P_r(t) - M_r||` over `samples` equispaced times.
    pub fn constancy_error(&self, samples: usize) -> f64 {
        (0..samples)
            .map(|j| {
                let t = self.period() * j as f64 / samples as f64;
                max_abs(&(gram_at(&self.q, &self.p, t) - &self.mr))
            })
            .fold(0.0, f64::max)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string(self)?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

fn gram_at(q: &[TrigVecFn], p: &[TrigVecFn], t: f64) -> DMatrix<Complex64> {
    let pt: Vec<DVector<Complex64>> = p.iter().map(|f| f.evaluate(t)).collect();
    let qt: Vec<DVector<Complex64>> = q.iter().map(|f| f.evaluate(t)).collect();
    DMatrix::from_fn(q.len(), p.len(), |i, j| qt[i].dotc(&pt[j]))
}

pub(crate) fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Reduced LTP model with diagonal dynamics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rom {
    pub lambdas: Vec<Complex64>,
    /// `M_r^{-1} Q_r(t)^* b(t)`, one component per mode.
    pub br: TrigVecFn,
    /// `P_r(t)^* c(t)`, so that `y_r = cr(t)^* z_r`.
    pub cr: TrigVecFn,
}

impl Rom {
    pub fn r(&self) -> usize {
        self.lambdas.len()
    }

    pub fn period(&self) -> f64 {
        self.br.period()
    }

    pub fn omega(&self) -> f64 {
        self.br.omega()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string(self)?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

/// Petrov-Galerkin projection onto the partial Floquet subspaces.
pub fn build_rom(pf: &PartialFloquet, sys: &LtpSystem) -> Result<Rom> {
    pf.p[0].check_compatible(&TrigVecFn::zeros(sys.n(), sys.period(), 0))?;
    let svd = pf.mr.clone().svd(false, false);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > f64::EPSILON * smax * pf.r() as f64) {
        return Err(Error::SingularMr);
    }
    let cond = smax / smin;
    if cond > MR_COND_WARN {
        warn!("M_r is ill conditioned (cond {cond:.3e}); triples may be nearly defective");
    }
    let mr_inv = pf.mr.clone().lu().try_inverse().ok_or(Error::SingularMr)?;

    let qb: Vec<TrigVecFn> = pf.q.iter().map(|q| q.pointwise_dot(sys.b())).collect::<Result<_>>()?;
    let qb = TrigVecFn::stack(&qb)?;
    let br = TrigVecFn::new(qb.period(), &mr_inv * qb.coeffs())?;
    let cr: Vec<TrigVecFn> = pf.p.iter().map(|p| p.pointwise_dot(sys.c())).collect::<Result<_>>()?;
    Ok(Rom {
        lambdas: pf.lambdas.clone(),
        br,
        cr: TrigVecFn::stack(&cr)?,
    })
}

/// `(Lambda, B, C)` with `B`, `C` holding harmonics `-K..=K` of the
/// transformed ports, one row per mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "ExtRepr", try_from = "ExtRepr")]
pub struct LtiExtension {
    pub lambdas: Vec<Complex64>,
    pub bhat: DMatrix<Complex64>,
    pub chat: DMatrix<Complex64>,
    pub k: usize,
    pub omega: f64,
}

/// One row of the dominance table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DominanceRow {
    /// Mode index in the extension.
    pub index: usize,
    pub lambda: Complex64,
    /// `||C_j||_2 ||B_j||_2 / |Re lambda_j|`.
    pub degdom_hext: f64,
    /// `||C_j||_2 ||B_j||_inf / |Re lambda_j|`.
    pub degdom_g: f64,
}

fn harmonic_rows(f: &TrigVecFn, k: usize) -> Result<DMatrix<Complex64>> {
    let (kept, tail) = f.truncate(k);
    if tail > PORT_TAIL_TOL * f.norm().max(f64::MIN_POSITIVE) {
        return Err(Error::TruncatedPorts { requested: k, tail });
    }
    Ok(kept.padded(k).into_coeffs())
}

impl LtiExtension {
    pub fn new(lambdas: Vec<Complex64>, bhat: DMatrix<Complex64>, chat: DMatrix<Complex64>, omega: f64) -> Result<Self> {
        let r = lambdas.len();
        let w = bhat.ncols();
        if bhat.nrows() != r || chat.nrows() != r || chat.ncols() != w || w.is_multiple_of(2) {
            return Err(Error::DimensionMismatch(format!(
                "extension with {r} poles needs r x (2K+1) port rows, got {}x{} and {}x{}",
                bhat.nrows(),
                bhat.ncols(),
                chat.nrows(),
                chat.ncols()
            )));
        }
        Ok(Self {
            lambdas,
            bhat,
            chat,
            k: (w - 1) / 2,
            omega,
        })
    }

    /// Lift the ports of a reduced model; fails if they reach beyond `k`.
    pub fn from_rom(rom: &Rom, k: usize) -> Result<Self> {
        Self::new(
            rom.lambdas.clone(),
            harmonic_rows(&rom.br, k)?,
            harmonic_rows(&rom.cr, k)?,
            rom.omega(),
        )
    }

    /// Full-order extension of the benchmark from its exact Floquet data.
    pub fn from_ground_truth(gt: &ExampleGroundTruth, k: usize) -> Result<Self> {
        Self::new(
            gt.lambdas(),
            harmonic_rows(&gt.bhat, k)?,
            harmonic_rows(&gt.chat, k)?,
            gt.bhat.omega(),
        )
    }

    pub fn order(&self) -> usize {
        self.lambdas.len()
    }

    /// Number of lifted channels, `2K + 1`.
    pub fn channels(&self) -> usize {
        2 * self.k + 1
    }

    /// Modes `idx`, in that order.
    pub fn select(&self, idx: &[usize]) -> Self {
        Self {
            lambdas: idx.iter().map(|&j| self.lambdas[j]).collect(),
            bhat: self.bhat.select_rows(idx),
            chat: self.chat.select_rows(idx),
            k: self.k,
            omega: self.omega,
        }
    }

    /// Zero-pad the port rows to depth `k`.
    pub fn with_depth(&self, k: usize) -> Result<Self> {
        if k < self.k {
            let tail_cols: Vec<usize> = (0..self.k - k).chain(self.k + k + 1..self.channels()).collect();
            let tail = self
                .bhat
                .select_columns(&tail_cols)
                .norm()
                .max(self.chat.select_columns(&tail_cols).norm());
            if tail > 0.0 {
                return Err(Error::TruncatedPorts { requested: k, tail });
            }
        }
        let w = 2 * k + 1;
        let pad = |m: &DMatrix<Complex64>| {
            DMatrix::from_fn(self.order(), w, |j, col| {
                let h = col as i64 - k as i64 + self.k as i64;
                if h < 0 || h as usize >= self.channels() {
                    ZERO
                } else {
                    m[(j, h as usize)]
                }
            })
        };
        Self::new(self.lambdas.clone(), pad(&self.bhat), pad(&self.chat), self.omega)
    }

    /// `||Theta_j||_2 = ||C_j||_2 ||B_j||_2`.
    pub fn residue_norm(&self, j: usize) -> f64 {
        self.chat.row(j).norm() * self.bhat.row(j).norm()
    }

    /// `H_ext(s) = sum_j C_j^H B_j / (s - lambda_j)`.
    pub fn eval(&self, s: Complex64) -> Result<DMatrix<Complex64>> {
        let w = self.channels();
        let mut h = DMatrix::zeros(w, w);
        for (j, &lam) in self.lambdas.iter().enumerate() {
            let d = s - lam;
            if d == ZERO {
                return Err(Error::PoleHit(s));
            }
            let inv = Complex64::new(1.0, 0.0) / d;
            for m in 0..w {
                let bm = self.bhat[(j, m)] * inv;
                if bm == ZERO {
                    continue;
                }
                for l in 0..w {
                    h[(l, m)] += self.chat[(j, l)].conj() * bm;
                }
            }
        }
        Ok(h)
    }

    /// Pole-residue form of the principal harmonics vector,
    /// `g_l(s) = sum_j sum_k conj(C_{j,k-l}) B_{j,k} / (s - lambda_j + i omega k)`
    /// for `l = -2K..=2K`.
    pub fn principal_harmonics(&self, s: Complex64) -> Result<Vec<Complex64>> {
        let kk = self.k as i64;
        let mut g = vec![ZERO; 4 * self.k + 1];
        for (j, &lam) in self.lambdas.iter().enumerate() {
            for k in -kk..=kk {
                let bk = self.bhat[(j, (k + kk) as usize)];
                if bk == ZERO {
                    continue;
                }
                let d = s - lam + Complex64::new(0.0, self.omega * k as f64);
                if d == ZERO {
                    return Err(Error::PoleHit(s));
                }
                let term = bk / d;
                for (idx, gl) in g.iter_mut().enumerate() {
                    let l = idx as i64 - 2 * kk;
                    let col = k - l + kk;
                    if (0..=2 * kk).contains(&col) {
                        *gl += self.chat[(j, col as usize)].conj() * term;
                    }
                }
            }
        }
        Ok(g)
    }

    /// Both dominance measures, sorted by the `H_ext` measure (descending).
    pub fn dominance_table(&self) -> Result<Vec<DominanceRow>> {
        let mut rows = Vec::with_capacity(self.order());
        for (j, &lam) in self.lambdas.iter().enumerate() {
            if lam.re == 0.0 {
                return Err(Error::ImaginaryAxisPole(lam));
            }
            let cn = self.chat.row(j).norm();
            let binf = self.bhat.row(j).iter().map(|z| z.norm()).fold(0.0, f64::max);
            rows.push(DominanceRow {
                index: j,
                lambda: lam,
                degdom_hext: cn * self.bhat.row(j).norm() / lam.re.abs(),
                degdom_g: cn * binf / lam.re.abs(),
            });
        }
        rows.sort_by(|a, b| b.degdom_hext.total_cmp(&a.degdom_hext));
        Ok(rows)
    }

    /// Keep the `keep` most dominant modes.
    pub fn dominant_truncation(&self, keep: usize) -> Result<Self> {
        let table = self.dominance_table()?;
        let idx: Vec<usize> = table.iter().take(keep).map(|row| row.index).collect();
        Ok(self.select(&idx))
    }

    /// `sum_{j > keep} ||Theta_j|| / |Re lambda_j|` in dominance order.
    pub fn truncation_error_bound(&self, keep: usize) -> Result<f64> {
        Ok(self.dominance_table()?.iter().skip(keep).map(|row| row.degdom_hext).sum())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string(self)?)?;
        Ok(())
    }
}

// JSON representations with complex numbers as [re, im] pairs.

pub(crate) fn cplx_rows(m: &DMatrix<Complex64>) -> Vec<Vec<[f64; 2]>> {
    m.row_iter().map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect()
}

pub(crate) fn cplx_from_rows(rows: &[Vec<[f64; 2]>], ncols: usize) -> Result<DMatrix<Complex64>> {
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Parse("ragged complex matrix".into()));
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| {
        Complex64::new(rows[i][j][0], rows[i][j][1])
    }))
}

#[derive(Serialize, Deserialize)]
struct PartialFloquetRepr {
    r: usize,
    lambdas: Vec<Complex64>,
    p: Vec<TrigVecFn>,
    q: Vec<TrigVecFn>,
    mr: Vec<Vec<[f64; 2]>>,
}

impl From<PartialFloquet> for PartialFloquetRepr {
    fn from(pf: PartialFloquet) -> Self {
        Self {
            r: pf.r(),
            mr: cplx_rows(&pf.mr),
            lambdas: pf.lambdas,
            p: pf.p,
            q: pf.q,
        }
    }
}

impl TryFrom<PartialFloquetRepr> for PartialFloquet {
    type Error = Error;

    fn try_from(r: PartialFloquetRepr) -> Result<Self> {
        if r.lambdas.len() != r.r {
            return Err(Error::Parse(format!("declared r = {} but {} eigenvalues", r.r, r.lambdas.len())));
        }
        let stored = cplx_from_rows(&r.mr, r.r)?;
        let pf = PartialFloquet::new(r.lambdas, r.p, r.q)?;
        if stored.shape() != pf.mr.shape() {
            return Err(Error::Parse("M_r has the wrong shape".into()));
        }
        Ok(pf)
    }
}

#[derive(Serialize, Deserialize)]
struct ExtRepr {
    k: usize,
    omega: f64,
    lambdas: Vec<Complex64>,
    bhat: Vec<Vec<[f64; 2]>>,
    chat: Vec<Vec<[f64; 2]>>,
}

impl From<LtiExtension> for ExtRepr {
    fn from(e: LtiExtension) -> Self {
        Self {
            k: e.k,
            omega: e.omega,
            bhat: cplx_rows(&e.bhat),
            chat: cplx_rows(&e.chat),
            lambdas: e.lambdas,
        }
    }
}

impl TryFrom<ExtRepr> for LtiExtension {
    type Error = Error;

    fn try_from(r: ExtRepr) -> Result<Self> {
        let w = 2 * r.k + 1;
        LtiExtension::new(r.lambdas, cplx_from_rows(&r.bhat, w)?, cplx_from_rows(&r.chat, w)?, r.omega)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{build_example, ExampleSpec};
    use crate::trigfun::TrigMatFn;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn example_rom_has_depth_one_ports() {
        let (sys, gt) = build_example(&ExampleSpec::with_n(8)).unwrap();
        let pf = PartialFloquet::from_ground_truth(&gt, &[0]).unwrap();
        assert!(max_abs(&(&pf.mr - DMatrix::identity(1, 1))) < 1e-14);
        assert!(pf.constancy_error(64) < 1e-14);
        let rom = build_rom(&pf, &sys).unwrap();
        assert_eq!(rom.br.trim(1e-14).depth(), 1);
        assert!(LtiExtension::from_rom(&rom, 0).is_err());
        let ext = LtiExtension::from_rom(&rom, 1).unwrap();
        // mode 0 is the first of a pair: q^* b = 1 - sin t
        let want = [c(0.0, -0.5), c(1.0, 0.0), c(0.0, 0.5)];
        for (got, want) in ext.bhat.row(0).iter().zip(want) {
            assert!((got - want).norm() < 1e-14);
        }
    }

    #[test]
    fn extension_matches_direct_evaluation() {
        let (_, gt) = build_example(&ExampleSpec::with_n(10)).unwrap();
        let ext = LtiExtension::from_ground_truth(&gt, 1).unwrap();
        let s = c(0.3, 1.7);
        let lam_inv = DMatrix::from_diagonal(&DVector::from_iterator(
            ext.order(),
            ext.lambdas.iter().map(|&l| Complex64::new(1.0, 0.0) / (s - l)),
        ));
        let direct = ext.chat.adjoint() * lam_inv * &ext.bhat;
        let h = ext.eval(s).unwrap();
        assert!(max_abs(&(h - &direct)) < 1e-12 * max_abs(&direct));
        assert!(matches!(ext.eval(ext.lambdas[3]), Err(Error::PoleHit(_))));
    }

    #[test]
    fn parseval_for_port_rows() {
        let (sys, gt) = build_example(&ExampleSpec::with_n(6)).unwrap();
        let ext = LtiExtension::from_ground_truth(&gt, 1).unwrap();
        let q = gt.q();
        for j in 0..6 {
            let qb = q.column(j).pointwise_dot(sys.b()).unwrap();
            assert!((ext.bhat.row(j).norm() - qb.norm()).abs() < 1e-10);
        }
    }

    #[test]
    fn dominance_orders_by_decay_and_is_scale_invariant() {
        let (_, gt) = build_example(&ExampleSpec::with_n(20)).unwrap();
        let ext = LtiExtension::from_ground_truth(&gt, 1).unwrap();
        let table = ext.dominance_table().unwrap();
        for w in table.windows(2) {
            assert!(w[0].lambda.re.abs() <= w[1].lambda.re.abs());
        }
        let mut by_g = table.clone();
        by_g.sort_by(|a, b| b.degdom_g.total_cmp(&a.degdom_g));
        assert_eq!(
            by_g.iter().map(|r| r.index).collect::<Vec<_>>(),
            table.iter().map(|r| r.index).collect::<Vec<_>>()
        );
        let mut scaled = ext.clone();
        scaled.bhat *= c(3.0, 0.0);
        scaled.chat *= c(3.0, 0.0);
        let t2 = scaled.dominance_table().unwrap();
        for (a, b) in table.iter().zip(&t2) {
            assert_eq!(a.index, b.index);
            assert!((b.degdom_hext / a.degdom_hext - 9.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mismatched_harmonics_change_only_the_g_ordering() {
        // mode 0 spreads its input over three harmonics, mode 1 concentrates it
        let bhat = DMatrix::from_row_slice(2, 3, &[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.5, 0.0), c(0.0, 0.0)]);
        let chat = DMatrix::from_row_slice(2, 3, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let ext = LtiExtension::new(vec![c(-1.0, 0.0), c(-1.0, 0.5)], bhat, chat, 1.0).unwrap();
        let table = ext.dominance_table().unwrap();
        // brute force: ||Theta_j||_2 of the rank-one residue matrices
        let theta = |j: usize| (ext.chat.row(j).adjoint() * ext.bhat.row(j)).norm();
        assert!((table[0].degdom_hext - theta(0)).abs() < 1e-14);
        assert!(theta(0) > theta(1));
        assert_eq!(table[0].index, 0);
        assert!(table[1].degdom_g > table[0].degdom_g);
    }

    #[test]
    fn truncation_bound_endpoints() {
        let (_, gt) = build_example(&ExampleSpec::with_n(12)).unwrap();
        let ext = LtiExtension::from_ground_truth(&gt, 1).unwrap();
        assert_eq!(ext.truncation_error_bound(12).unwrap(), 0.0);
        let total: f64 = ext.dominance_table().unwrap().iter().map(|r| r.degdom_hext).sum();
        assert!((ext.truncation_error_bound(0).unwrap() - total).abs() < 1e-12 * total);
    }

    #[test]
    fn singular_mr_is_rejected() {
        let (sys, gt) = build_example(&ExampleSpec::with_n(4)).unwrap();
        let p = gt.p.column(0);
        let pf = PartialFloquet::new(vec![c(-1.0, 0.0); 2], vec![p.clone(), p.clone()], vec![p.clone(), p]).unwrap();
        assert!(matches!(build_rom(&pf, &sys), Err(Error::SingularMr)));
    }

    #[test]
    fn lti_extension_has_single_channel() {
        let a = TrigMatFn::constant(1.0, DMatrix::from_diagonal(&DVector::from_vec(vec![c(-1.0, 0.0), c(-2.0, 0.0)])))
            .unwrap();
        let ones = TrigVecFn::constant(1.0, &DVector::from_element(2, c(1.0, 0.0)));
        let sys = LtpSystem::new(a, ones.clone(), ones.clone()).unwrap();
        let e = |i: usize| {
            let mut v = DVector::zeros(2);
            v[i] = c(1.0, 0.0);
            TrigVecFn::constant(1.0, &v)
        };
        let pf = PartialFloquet::new(vec![c(-1.0, 0.0), c(-2.0, 0.0)], vec![e(0), e(1)], vec![e(0), e(1)]).unwrap();
        let ext = LtiExtension::from_rom(&build_rom(&pf, &sys).unwrap(), 0).unwrap();
        assert_eq!(ext.channels(), 1);
        let h = ext.eval(c(0.0, 1.0)).unwrap();
        let want = c(1.0, 0.0) / c(1.0, 1.0) + c(1.0, 0.0) / c(2.0, 1.0);
        assert!((h[(0, 0)] - want).norm() < 1e-15);
    }

    #[test]
    fn json_round_trips() {
        let (sys, gt) = build_example(&ExampleSpec::with_n(6)).unwrap();
        let pf = PartialFloquet::from_ground_truth(&gt, &[0, 3]).unwrap();
        let back: PartialFloquet = serde_json::from_str(&serde_json::to_string(&pf).unwrap()).unwrap();
        assert_eq!(back, pf);
        let rom = build_rom(&pf, &sys).unwrap();
        let back: Rom = serde_json::from_str(&serde_json::to_string(&rom).unwrap()).unwrap();
        assert_eq!(back, rom);
        let ext = LtiExtension::from_rom(&rom, 1).unwrap();
        let back: LtiExtension = serde_json::from_str(&serde_json::to_string(&ext).unwrap()).unwrap();
        assert_eq!(back, ext);
    }
}

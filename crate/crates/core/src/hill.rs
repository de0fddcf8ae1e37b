//! The periodic operator `L = -d/dt + A(t)`, its adjoint, and shifted
//! resolvent solves by harmonic balance.
//!
//! Truncated to harmonics `-N..N`, `sI - L` becomes the Hill matrix whose
//! block `(k, m)` is `(s + i omega k) delta_km I - A_{k-m}`. It is block banded
//! with bandwidth `depth(A)`. Indices of `A` that never couple are split into
//! independent components and each is factored separately.
//!
//! The Hill matrix of `conj(s) I - L*` is the conjugate transpose of the one
//! for `s I - L`, so one factorization serves forward and adjoint solves.

use std::collections::VecDeque;

use log::debug;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{BandedLu, BandedMatrix};
use crate::systems::LtpSystem;
use crate::trigfun::{TrigMatFn, TrigVecFn};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `(L v)(t) = -v'(t) + A(t) v(t)`, exact in coefficients.
pub fn apply_l(a: &TrigMatFn, v: &TrigVecFn) -> Result<TrigVecFn> {
    a.apply(v)?.sub(&v.differentiate())
}

/// `(L* w)(t) = w'(t) + A(t)^H w(t)`, exact in coefficients.
pub fn apply_l_adj(a: &TrigMatFn, w: &TrigVecFn) -> Result<TrigVecFn> {
    a.adjoint().apply(w)?.add(&w.differentiate())
}

/// `||(s I - L) v - rhs|| / ||rhs||`.
pub fn resolvent_residual(a: &TrigMatFn, s: Complex64, v: &TrigVecFn, rhs: &TrigVecFn) -> Result<f64> {
    let r = v.scale(s).sub(&apply_l(a, v)?)?.sub(rhs)?;
    Ok(r.norm() / rhs.norm().max(f64::MIN_POSITIVE))
}

/// Dense Hill matrix of `s I - L` on harmonics `-depth..depth`, ordered
/// harmonic-major: row `(k + depth) n + i`.
pub fn hill_matrix(a: &TrigMatFn, s: Complex64, depth: usize) -> DMatrix<Complex64> {
    let n = a.rows();
    let h = 2 * depth + 1;
    let w = a.omega();
    let mut m = DMatrix::zeros(n * h, n * h);
    let d = a.depth() as i64;
    let nn = depth as i64;
    for k in -nn..=nn {
        let row = ((k + nn) as usize) * n;
        for l in -d..=d {
            let col_h = k - l;
            if col_h.abs() > nn {
                continue;
            }
            let col = ((col_h + nn) as usize) * n;
            let al = a.coeff(l).expect("in range");
            let mut blk = m.view_mut((row, col), (n, n));
            blk -= al;
        }
        for i in 0..n {
            m[(row + i, row + i)] += s + Complex64::new(0.0, w * k as f64);
        }
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HillOptions {
    /// Harmonics added beyond `depth(A) + depth(ports)` for the first attempt.
    pub extra_depth: usize,
    /// Relative weight allowed in the outermost harmonics of a solution.
    pub tail_tol: f64,
    /// Target for `||(sI - L) v - rhs|| / ||rhs||`. Missing it only triggers
    /// further doubling; the tail tolerance decides failure.
    pub residual_tol: f64,
    /// Number of times the truncation may double.
    pub max_doublings: usize,
    /// Reciprocal condition below which a shift is treated as an eigenvalue.
    pub rcond_min: f64,
    /// Factorizations kept alive.
    pub cache_size: usize,
}

impl Default for HillOptions {
    fn default() -> Self {
        Self {
            extra_depth: 8,
            tail_tol: 1e-8,
            residual_tol: 1e-10,
            max_doublings: 3,
            rcond_min: 1e-13,
            cache_size: 2,
        }
    }
}

/// Counters and last-solve quality, recorded in run manifests.
#[derive(Debug, Clone, Default, Serialize)]
pub struct HillDiagnostics {
    pub harmonic_depth: usize,
    pub components: usize,
    pub factorizations: usize,
    pub solves: usize,
    pub last_tail: f64,
    pub max_tail: f64,
    /// Relative residual of the last solve, all of it from harmonics beyond
    /// the truncation.
    pub last_residual: f64,
    pub max_residual: f64,
    pub min_rcond: f64,
}

struct Factored {
    s: Complex64,
    depth: usize,
    lus: Vec<BandedLu>,
}

/// Shifted-resolvent solver bound to one `A(t)`.
pub struct ResolventWorkspace<'a> {
    a: &'a TrigMatFn,
    options: HillOptions,
    depth: usize,
    components: Vec<Vec<usize>>,
    /// `blocks[c][l + d]` is `A_l` restricted to component `c`.
    blocks: Vec<Vec<DMatrix<Complex64>>>,
    cache: VecDeque<Factored>,
    diag: HillDiagnostics,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn components_of(a: &TrigMatFn) -> Vec<Vec<usize>> {
    let n = a.rows();
    let mut parent: Vec<usize> = (0..n).collect();
    for (i, j) in a.nonzero_pattern() {
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        if ri != rj {
            parent[ri.max(rj)] = ri.min(rj);
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

impl<'a> ResolventWorkspace<'a> {
    /// Workspace for `sys`, sized for its ports.
    pub fn for_system(sys: &'a LtpSystem) -> Self {
        let port_depth = sys.b().depth().max(sys.c().depth());
        Self::new(sys.a(), port_depth, HillOptions::default())
    }

    pub fn new(a: &'a TrigMatFn, port_depth: usize, options: HillOptions) -> Self {
        let components = components_of(a);
        let blocks = components
            .iter()
            .map(|idx| {
                a.coeffs()
                    .iter()
                    .map(|ak| DMatrix::from_fn(idx.len(), idx.len(), |i, j| ak[(idx[i], idx[j])]))
                    .collect()
            })
            .collect();
        let depth = a.depth() + port_depth + options.extra_depth;
        let diag = HillDiagnostics {
            harmonic_depth: depth,
            components: components.len(),
            min_rcond: f64::INFINITY,
            ..Default::default()
        };
        Self {
            a,
            options,
            depth,
            components,
            blocks,
            cache: VecDeque::new(),
            diag,
        }
    }

    pub fn operator(&self) -> &TrigMatFn {
        self.a
    }

    pub fn options(&self) -> &HillOptions {
        &self.options
    }

    pub fn harmonic_depth(&self) -> usize {
        self.depth
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn diagnostics(&self) -> &HillDiagnostics {
        &self.diag
    }

    fn factor(&self, s: Complex64, depth: usize) -> Result<(Vec<BandedLu>, f64)> {
        let w = self.a.omega();
        let d = self.a.depth() as i64;
        let nn = depth as i64;
        let mut lus = Vec::with_capacity(self.components.len());
        let mut worst = f64::INFINITY;
        for blocks in &self.blocks {
            let nc = blocks[0].nrows();
            let size = nc * (2 * depth + 1);
            let band = (d as usize + 1) * nc - 1;
            let mut m = BandedMatrix::zeros(size, band, band);
            for k in -nn..=nn {
                let row = ((k + nn) as usize) * nc;
                for l in -d..=d {
                    let col_h = k - l;
                    if col_h.abs() > nn {
                        continue;
                    }
                    let col = ((col_h + nn) as usize) * nc;
                    let al = &blocks[(l + d) as usize];
                    for j in 0..nc {
                        for i in 0..nc {
                            let v = al[(i, j)];
                            if v != ZERO {
                                m.add(row + i, col + j, -v);
                            }
                        }
                    }
                }
                let shift = s + Complex64::new(0.0, w * k as f64);
                for i in 0..nc {
                    m.add(row + i, row + i, shift);
                }
            }
            let lu = m.factor().map_err(|_| Error::NearSingularShift { s, rcond: 0.0 })?;
            let rc = lu.rcond();
            worst = worst.min(rc);
            if rc < self.options.rcond_min {
                return Err(Error::NearSingularShift { s, rcond: rc });
            }
            lus.push(lu);
        }
        Ok((lus, worst))
    }

    fn factored(&mut self, s: Complex64, depth: usize) -> Result<usize> {
        if let Some(pos) = self.cache.iter().position(|f| f.s == s && f.depth == depth) {
            return Ok(pos);
        }
        let (lus, rcond) = self.factor(s, depth)?;
        self.diag.factorizations += 1;
        self.diag.min_rcond = self.diag.min_rcond.min(rcond);
        debug!("factored s = {s:.6e} at depth {depth}, rcond {rcond:.3e}");
        if self.cache.len() >= self.options.cache_size.max(1) {
            self.cache.pop_back();
        }
        self.cache.push_front(Factored { s, depth, lus });
        Ok(0)
    }

    /// Norm of `(sI - L) v` (or its adjoint) on harmonics beyond `depth`;
    /// in-band rows hold exactly.
    fn out_of_band_residual(&self, v: &DMatrix<Complex64>, depth: usize, adjoint: bool) -> f64 {
        let d = self.a.depth() as i64;
        let nn = depth as i64;
        let mut acc = 0.0;
        for (comp, blocks) in self.components.iter().zip(&self.blocks) {
            let nc = comp.len();
            let vc = DMatrix::from_fn(nc, v.ncols(), |i, j| v[(comp[i], j)]);
            for k in (nn + 1..=nn + d).chain(-nn - d..=-nn - 1) {
                let mut r = nalgebra::DVector::<Complex64>::zeros(nc);
                for l in -d..=d {
                    let m = k - l;
                    if m.abs() > nn {
                        continue;
                    }
                    let col = vc.column((m + nn) as usize);
                    if adjoint {
                        r += blocks[(d - l) as usize].adjoint() * col;
                    } else {
                        r += &blocks[(l + d) as usize] * col;
                    }
                }
                acc += r.norm_squared();
            }
        }
        acc.sqrt()
    }

    fn solve_impl(&mut self, s: Complex64, rhs: &TrigVecFn, adjoint: bool) -> Result<(TrigVecFn, f64)> {
        let n = self.a.rows();
        if rhs.dim() != n {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side has dim {}, system has n = {n}",
                rhs.dim()
            )));
        }
        if rhs.period() != self.a.period() {
            return Err(Error::PeriodMismatch {
                left: self.a.period(),
                right: rhs.period(),
            });
        }
        let mut depth = self.depth.max(rhs.depth() + self.a.depth());
        let mut tail = f64::INFINITY;
        for attempt in 0..=self.options.max_doublings {
            if attempt > 0 {
                depth *= 2;
            }
            let pos = self.factored(s, depth)?;
            let entry = &self.cache[pos];
            let h = 2 * depth + 1;
            let mut out = DMatrix::zeros(n, h);
            let rd = rhs.depth();
            for (comp, lu) in self.components.iter().zip(&entry.lus) {
                let nc = comp.len();
                let mut x = vec![ZERO; nc * h];
                for kk in 0..2 * rd + 1 {
                    let hk = kk + depth - rd;
                    for (li, &gi) in comp.iter().enumerate() {
                        x[hk * nc + li] = rhs.coeffs()[(gi, kk)];
                    }
                }
                if adjoint {
                    lu.solve_adjoint_in_place(&mut x);
                } else {
                    lu.solve_in_place(&mut x);
                }
                for hk in 0..h {
                    for (li, &gi) in comp.iter().enumerate() {
                        out[(gi, hk)] = x[hk * nc + li];
                    }
                }
            }
            let residual = self.out_of_band_residual(&out, depth, adjoint) / rhs.norm().max(f64::MIN_POSITIVE);
            let v = TrigVecFn::new(rhs.period(), out)?;
            let total = v.norm();
            let edge = (v.coeffs().column(0).norm_squared() + v.coeffs().column(h - 1).norm_squared()).sqrt();
            tail = if total > 0.0 { edge / total } else { 0.0 };
            self.diag.solves += 1;
            let last = attempt == self.options.max_doublings;
            if tail < self.options.tail_tol && (residual < self.options.residual_tol || last) {
                self.depth = self.depth.max(depth);
                self.diag.harmonic_depth = self.depth;
                self.diag.last_tail = tail;
                self.diag.max_tail = self.diag.max_tail.max(tail);
                self.diag.last_residual = residual;
                self.diag.max_residual = self.diag.max_residual.max(residual);
                return Ok((v.trim(1e-13), tail));
            }
            debug!("tail {tail:.3e}, residual {residual:.3e} at depth {depth}, doubling");
        }
        Err(Error::TruncationNotConverged {
            tail_norm: tail,
            harmonic_depth: depth,
        })
    }

    /// Solve `(s I - L) v = rhs`; returns `v` and its relative edge-harmonic weight.
    pub fn solve(&mut self, s: Complex64, rhs: &TrigVecFn) -> Result<(TrigVecFn, f64)> {
        self.solve_impl(s, rhs, false)
    }

    /// Solve `(s I - L)* w = rhs`, i.e. `(conj(s) I - L*) w = rhs`.
    pub fn solve_adj(&mut self, s: Complex64, rhs: &TrigVecFn) -> Result<(TrigVecFn, f64)> {
        self.solve_impl(s, rhs, true)
    }

    /// Forward solve that nudges the shift off an eigenvalue, growing the
    /// nudge tenfold on each retry. Returns the shift actually used.
    pub fn solve_perturbed(
        &mut self,
        s: Complex64,
        rhs: &TrigVecFn,
        adjoint: bool,
    ) -> Result<(TrigVecFn, f64, Complex64)> {
        let mut shift = s;
        let mut eps = 1e-10 * (1.0 + s.norm());
        let mut last = None;
        for _ in 0..6 {
            match self.solve_impl(shift, rhs, adjoint) {
                Ok((v, tail)) => return Ok((v, tail, shift)),
                Err(e @ Error::NearSingularShift { .. }) => {
                    debug!("{e}; perturbing");
                    last = Some(e);
                    shift = s + Complex64::new(eps, eps);
                    eps *= 10.0;
                }
                Err(e) => return Err(e),
            }
        }
        Err(last.expect("at least one attempt"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{build_example, random_system, ExampleSpec};
    use nalgebra::DVector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_vec(rng: &mut ChaCha8Rng, n: usize, depth: usize) -> TrigVecFn {
        let m = DMatrix::from_fn(n, 2 * depth + 1, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        TrigVecFn::new(2.0 * std::f64::consts::PI, m).unwrap()
    }

    #[test]
    fn constant_operator_reduces_to_matrix() {
        let am = DMatrix::from_row_slice(2, 2, &[c(-1.0, 0.0), c(2.0, 0.0), c(0.5, 1.0), c(-3.0, 0.0)]);
        let a = TrigMatFn::constant(1.0, am.clone()).unwrap();
        let v = DVector::from_vec(vec![c(1.0, -1.0), c(0.25, 0.0)]);
        let f = TrigVecFn::constant(1.0, &v);
        assert_eq!(apply_l(&a, &f).unwrap().coeff(0), &am * &v);
        assert_eq!(apply_l_adj(&a, &f).unwrap().coeff(0), am.adjoint() * &v);
    }

    #[test]
    fn floquet_columns_are_eigenfunctions() {
        let (sys, gt) = build_example(&ExampleSpec::with_n(8)).unwrap();
        let q = gt.q();
        for j in 0..8 {
            let p = gt.p.column(j);
            let lam = c(gt.r[j], 0.0);
            let r = apply_l(sys.a(), &p).unwrap().sub(&p.scale(lam)).unwrap();
            assert!(r.norm() < 1e-10 * p.norm() * (1.0 + lam.norm()));
            let qj = q.column(j);
            let r = apply_l_adj(sys.a(), &qj).unwrap().sub(&qj.scale(lam.conj())).unwrap();
            assert!(r.norm() < 1e-10 * qj.norm() * (1.0 + lam.norm()));
        }
    }

    #[test]
    fn adjoint_identity_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let sys = random_system(4, 2, 3).unwrap();
        for _ in 0..10 {
            let v = random_vec(&mut rng, 4, 3);
            let w = random_vec(&mut rng, 4, 2);
            let lhs = w.inner_product(&apply_l(sys.a(), &v).unwrap()).unwrap();
            let rhs = apply_l_adj(sys.a(), &w).unwrap().inner_product(&v).unwrap();
            assert!((lhs - rhs).norm() < 1e-11 * lhs.norm().max(1.0));
        }
    }

    #[test]
    fn apply_matches_sampled_derivative() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let sys = random_system(3, 1, 4).unwrap();
        let v = random_vec(&mut rng, 3, 2);
        let lv = apply_l(sys.a(), &v).unwrap();
        let h = 1e-6;
        for j in 0..64 {
            let t = 2.0 * std::f64::consts::PI * j as f64 / 64.0;
            let dv = (v.evaluate(t + h) - v.evaluate(t - h)) / c(2.0 * h, 0.0);
            let direct = sys.a().evaluate(t) * v.evaluate(t) - dv;
            let got = lv.evaluate(t);
            assert!((got - &direct).norm() < 1e-6 * direct.norm().max(1.0));
        }
    }

    #[test]
    fn diagonal_lti_solve() {
        let am = DMatrix::from_diagonal(&DVector::from_vec(vec![c(-1.0, 0.0), c(-2.0, 0.5)]));
        let a = TrigMatFn::constant(1.0, am).unwrap();
        let rhs = TrigVecFn::constant(1.0, &DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 2.0)]));
        let mut ws = ResolventWorkspace::new(&a, 0, HillOptions::default());
        assert_eq!(ws.components().len(), 2);
        let s = c(0.3, 0.7);
        let (v, tail) = ws.solve(s, &rhs).unwrap();
        assert_eq!(v.depth(), 0);
        assert!(tail == 0.0);
        assert!((v.entry(0, 0) - c(1.0, 0.0) / (s + 1.0)).norm() < 1e-15);
        assert!((v.entry(1, 0) - c(0.0, 2.0) / (s - c(-2.0, 0.5))).norm() < 1e-15);
    }

    #[test]
    fn example_resolvent_matches_floquet_form() {
        let (sys, gt) = build_example(&ExampleSpec::with_n(8)).unwrap();
        let mut ws = ResolventWorkspace::for_system(&sys);
        let w = sys.omega();
        let s = c(-0.1, 0.3);
        let (v, _) = ws.solve(s, sys.b()).unwrap();
        // z_k = ((s + i w k) I - R)^{-1} Bhat_k, then v = P z
        let mut z = TrigVecFn::zeros(8, sys.period(), 1);
        let mut zc = z.coeffs().clone();
        for k in -1i64..=1 {
            for j in 0..8 {
                zc[(j, (k + 1) as usize)] = gt.bhat.entry(j, k) / (s + c(0.0, w * k as f64) - gt.r[j]);
            }
        }
        z = TrigVecFn::new(sys.period(), zc).unwrap();
        let want = gt.p.apply(&z).unwrap();
        assert!(v.max_coeff_diff(&want).unwrap() < 1e-12 * want.norm());
        assert!(resolvent_residual(sys.a(), s, &v, sys.b()).unwrap() < 1e-10);
    }

    #[test]
    fn banded_solve_matches_dense_double_depth() {
        let sys = random_system(4, 2, 11).unwrap();
        let mut ws = ResolventWorkspace::for_system(&sys);
        let s = c(0.2, -0.4);
        let (v, _) = ws.solve(s, sys.b()).unwrap();
        let big = 2 * ws.harmonic_depth();
        let m = hill_matrix(sys.a(), s, big);
        let padded = sys.b().padded(big);
        let rhs = DVector::from_column_slice(padded.coeffs().as_slice());
        let x = crate::linalg::BandedLu::factor_dense(&m).unwrap().solve(&rhs);
        let dense = TrigVecFn::new(sys.period(), DMatrix::from_column_slice(4, 2 * big + 1, x.as_slice())).unwrap();
        assert!(v.max_coeff_diff(&dense).unwrap() < 1e-9 * dense.norm());

        let (w, _) = ws.solve_adj(s, sys.c()).unwrap();
        let padded = sys.c().padded(big);
        let rhs = DVector::from_column_slice(padded.coeffs().as_slice());
        let x = crate::linalg::BandedLu::factor_dense(&m).unwrap().solve_adjoint(&rhs);
        let dense = TrigVecFn::new(sys.period(), DMatrix::from_column_slice(4, 2 * big + 1, x.as_slice())).unwrap();
        assert!(w.max_coeff_diff(&dense).unwrap() < 1e-9 * dense.norm());
    }

    #[test]
    fn adjoint_solve_residual() {
        let sys = random_system(5, 1, 12).unwrap();
        let mut ws = ResolventWorkspace::for_system(&sys);
        let s = c(-0.2, 1.3);
        let (w, _) = ws.solve_adj(s, sys.c()).unwrap();
        let r = w.scale(s.conj()).sub(&apply_l_adj(sys.a(), &w).unwrap()).unwrap().sub(sys.c()).unwrap();
        assert!(r.norm() < 1e-10 * sys.c().norm(), "{}", r.norm());
        assert!((ws.diagnostics().last_residual - r.norm() / sys.c().norm()).abs() < 1e-12);
    }

    #[test]
    fn shift_family_consistency() {
        let sys = random_system(3, 2, 13).unwrap();
        let mut ws = ResolventWorkspace::for_system(&sys);
        let s = c(0.1, 0.2);
        let (v, _) = ws.solve(s, sys.b()).unwrap();
        for k in [-2i64, 1, 3] {
            let vk = v.phase_shift(k);
            let sk = s + c(0.0, sys.omega() * k as f64);
            let res = resolvent_residual(sys.a(), sk, &vk, &sys.b().phase_shift(k)).unwrap();
            assert!(res < 1e-10, "k = {k}: {res}");
        }
    }

    #[test]
    fn hill_matrix_reproduces_operator() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let sys = random_system(3, 2, 14).unwrap();
        let depth = 6;
        let v = random_vec(&mut rng, 3, 3);
        let s = c(0.7, -0.1);
        let m = hill_matrix(sys.a(), s, depth);
        let x = DVector::from_column_slice(v.padded(depth).coeffs().as_slice());
        let y = &m * x;
        let exact = v.scale(s).sub(&apply_l(sys.a(), &v).unwrap()).unwrap();
        // harmonics |k| <= depth - depth(A) see no truncation
        for k in -4i64..=4 {
            for i in 0..3 {
                let got = y[((k + depth as i64) as usize) * 3 + i];
                assert!((got - exact.entry(i, k)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn near_eigenvalue_is_detected_and_perturbed() {
        // coupled so that row equilibration cannot hide the small pivot
        let am = DMatrix::from_row_slice(2, 2, &[c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(-2.0, 0.0)]);
        let a = TrigMatFn::constant(1.0, am).unwrap();
        let rhs = TrigVecFn::constant(1.0, &DVector::from_element(2, c(1.0, 0.0)));
        let mut ws = ResolventWorkspace::new(&a, 0, HillOptions::default());
        let s = c(-1.0 + 1e-15, 0.0);
        assert!(matches!(ws.solve(s, &rhs), Err(Error::NearSingularShift { .. })));
        let (v, _, used) = ws.solve_perturbed(s, &rhs, false).unwrap();
        assert_ne!(used, s);
        assert!(v.norm() > 1e8);
    }

    #[test]
    fn example_decouples_into_pairs() {
        let (sys, _) = build_example(&ExampleSpec::with_n(10)).unwrap();
        let ws = ResolventWorkspace::for_system(&sys);
        assert_eq!(ws.components().len(), 5);
        assert!(ws.components().iter().all(|c| c.len() == 2));
    }
}

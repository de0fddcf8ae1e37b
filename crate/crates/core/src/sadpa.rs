//! Subspace-accelerated dominant pole search with deflation.
//!
//! Each iteration adds one forward and one adjoint resolvent solution to the
//! search spaces `V`, `W`, projects the operator onto them, and takes the
//! most dominant pole of the projected SIMO model as the next shift. When a
//! Ritz triple converges its family is deflated from the ports.

use log::{debug, info};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::dpa::{family_distance, two_sided_solve, Eigentriple};
use crate::error::{Error, PartialResult, Result};
use crate::hill::{apply_l, apply_l_adj, ResolventWorkspace};
use crate::linalg::{eig, BandedLu};
use crate::phv::harmonics_of_output;
use crate::systems::LtpSystem;
use crate::trigfun::{TrigMatFn, TrigVecFn};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Relative tolerance for dropping harmonics of deflated ports and eigenfunctions.
const TRIM_TOL: f64 = 1e-13;

/// Orthonormal search spaces with cached operator images.
#[derive(Debug, Clone, Default)]
pub struct SearchSpaces {
    pub v: Vec<TrigVecFn>,
    pub w: Vec<TrigVecFn>,
    lv: Vec<TrigVecFn>,
    lw: Vec<TrigVecFn>,
}

fn gram_schmidt(basis: &[TrigVecFn], x: &TrigVecFn) -> Result<Option<TrigVecFn>> {
    let original = x.norm();
    if original == 0.0 {
        return Ok(None);
    }
    let mut y = x.clone();
    for _ in 0..2 {
        let coeffs: Vec<Complex64> = basis.iter().map(|b| b.inner_product(&y)).collect::<Result<_>>()?;
        for (b, h) in basis.iter().zip(coeffs) {
            y = y.add_scaled(-h, b)?;
        }
    }
    let nrm = y.norm();
    if nrm < 1e-12 * original {
        return Ok(None);
    }
    Ok(Some(y.scale(Complex64::new(1.0 / nrm, 0.0))))
}

impl SearchSpaces {
    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    /// Orthogonalize (classical Gram-Schmidt, twice) and append. Both
    /// directions are rejected when either is numerically dependent, which
    /// keeps `|V| = |W|`. Returns whether the pair was appended.
    pub fn orthogonalize_append(&mut self, a: &TrigMatFn, v_new: &TrigVecFn, w_new: &TrigVecFn) -> Result<bool> {
        let Some(v) = gram_schmidt(&self.v, v_new)? else { return Ok(false) };
        let Some(w) = gram_schmidt(&self.w, w_new)? else { return Ok(false) };
        self.lv.push(apply_l(a, &v)?);
        self.lw.push(apply_l_adj(a, &w)?);
        self.v.push(v);
        self.w.push(w);
        Ok(true)
    }

    /// `max |<V,V> - I|` and the same for `W`.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for basis in [&self.v, &self.w] {
            for (i, x) in basis.iter().enumerate() {
                for (j, y) in basis.iter().enumerate() {
                    let g = x.inner_product_unchecked(y);
                    let target = if i == j { ONE } else { Complex64::new(0.0, 0.0) };
                    worst = worst.max((g - target).norm());
                }
            }
        }
        worst
    }

    /// `sum_i x_i V_i`.
    pub fn combine_v(&self, x: &DVector<Complex64>) -> Result<(TrigVecFn, TrigVecFn)> {
        combine(&self.v, &self.lv, x)
    }

    /// `sum_i y_i W_i`.
    pub fn combine_w(&self, y: &DVector<Complex64>) -> Result<(TrigVecFn, TrigVecFn)> {
        combine(&self.w, &self.lw, y)
    }
}

fn combine(basis: &[TrigVecFn], images: &[TrigVecFn], x: &DVector<Complex64>) -> Result<(TrigVecFn, TrigVecFn)> {
    let mut f = basis[0].scale(x[0]);
    let mut g = images[0].scale(x[0]);
    for i in 1..basis.len() {
        f = f.add_scaled(x[i], &basis[i])?;
        g = g.add_scaled(x[i], &images[i])?;
    }
    Ok((f, g))
}

/// Petrov-Galerkin projection `h(s) = C^* (s E - A)^{-1} b`.
#[derive(Debug, Clone)]
pub struct ProjectedSystem {
    /// `<W, L V>`.
    pub atil: DMatrix<Complex64>,
    /// `<W, V>`.
    pub etil: DMatrix<Complex64>,
    /// `<W, b>`.
    pub btil: DVector<Complex64>,
    /// `<V, c Psi^T>`, one column per harmonic `-2K..=2K`.
    pub ctil: DMatrix<Complex64>,
}

impl ProjectedSystem {
    /// Transfer vector of the projected model at `s`.
    pub fn eval(&self, s: Complex64) -> Result<DVector<Complex64>> {
        let m = &self.etil * s - &self.atil;
        let x = BandedLu::factor_dense(&m)?.solve(&self.btil);
        Ok(self.ctil.adjoint() * x)
    }
}

pub fn project_system(spaces: &SearchSpaces, b: &TrigVecFn, c: &TrigVecFn, k: usize) -> Result<ProjectedSystem> {
    let m = spaces.len();
    if m == 0 {
        return Err(Error::InvalidArgument("cannot project onto empty search spaces".into()));
    }
    let mut atil = DMatrix::zeros(m, m);
    let mut etil = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            atil[(i, j)] = spaces.w[i].inner_product(&spaces.lv[j])?;
            etil[(i, j)] = spaces.w[i].inner_product(&spaces.v[j])?;
        }
    }
    let btil = DVector::from_iterator(m, spaces.w.iter().map(|w| w.inner_product(b)).collect::<Result<Vec<_>>>()?);
    let mut ctil = DMatrix::zeros(m, 4 * k + 1);
    for (i, v) in spaces.v.iter().enumerate() {
        // <V_i, c psi_l> = conj(<c psi_l, V_i>)
        for (l, g) in harmonics_of_output(c, v, k)?.into_iter().enumerate() {
            ctil[(i, l)] = g.conj();
        }
    }
    Ok(ProjectedSystem { atil, etil, btil, ctil })
}

#[derive(Debug, Clone)]
pub struct ProjectedPole {
    pub lambda: Complex64,
    /// Right eigenvector of the pencil `(A, E)`.
    pub x: DVector<Complex64>,
    /// Left eigenvector of the pencil.
    pub y: DVector<Complex64>,
    /// `||C^* x|| |y^* b| / |y^* E x|`.
    pub residue_norm: f64,
    pub dominance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RankingRules {
    /// Poles with `|Re lambda|` above this are treated as spurious.
    pub real_part_cap: f64,
    /// Residues below this fraction of `||b|| ||C||` are dropped.
    pub residue_floor: f64,
    /// Relative distance under which a pole belongs to a found family.
    pub family_tol: f64,
}

impl Default for RankingRules {
    fn default() -> Self {
        Self {
            real_part_cap: f64::INFINITY,
            residue_floor: 1e-12,
            family_tol: 1e-6,
        }
    }
}

/// Is `lambda` a member of the family of one of `found`?
pub fn in_found_family(lambda: Complex64, found: &[Complex64], omega: f64, tol: f64) -> bool {
    found
        .iter()
        .any(|f| family_distance(lambda, *f, omega) < tol * f.norm().max(1.0))
}

/// Poles of the projected model, most dominant first.
pub fn rank_projected_poles(
    ps: &ProjectedSystem,
    omega: f64,
    found: &[Complex64],
    rules: &RankingRules,
) -> Result<Vec<ProjectedPole>> {
    let elu = BandedLu::factor_dense(&ps.etil).map_err(|_| Error::SingularPencil)?;
    if elu.rcond() < 1e-14 {
        return Err(Error::SingularPencil);
    }
    let m = elu.solve_matrix(&ps.atil);
    let e = eig(&m)?;
    let scale = ps.btil.norm() * ps.ctil.norm();
    let mut poles = Vec::new();
    for (idx, &lambda) in e.values.iter().enumerate() {
        if !lambda.is_finite() || lambda.re.abs() > rules.real_part_cap {
            continue;
        }
        if in_found_family(lambda, found, omega, rules.family_tol) {
            continue;
        }
        let x = e.right.column(idx).into_owned();
        let y = elu.solve_adjoint(&e.left.column(idx).into_owned());
        let yex = y.dotc(&(&ps.etil * &x));
        if yex.norm() == 0.0 {
            continue;
        }
        let residue_norm = (ps.ctil.adjoint() * &x).norm() * y.dotc(&ps.btil).norm() / yex.norm();
        if !(residue_norm > rules.residue_floor * scale) {
            continue;
        }
        let dominance = if lambda.re == 0.0 {
            f64::INFINITY
        } else {
            residue_norm / lambda.re.abs()
        };
        poles.push(ProjectedPole {
            lambda,
            x,
            y,
            residue_norm,
            dominance,
        });
    }
    poles.sort_by(|a, b| b.dominance.total_cmp(&a.dominance));
    Ok(poles)
}

/// Ports with converged families removed.
#[derive(Debug, Clone)]
pub struct DeflatedPorts {
    pub b: TrigVecFn,
    pub c: TrigVecFn,
    pub b_original_norm: f64,
    pub c_original_norm: f64,
    pub found: Vec<Eigentriple>,
}

impl DeflatedPorts {
    pub fn new(b: TrigVecFn, c: TrigVecFn) -> Self {
        Self {
            b_original_norm: b.norm(),
            c_original_norm: c.norm(),
            b,
            c,
            found: Vec::new(),
        }
    }

    pub fn found_lambdas(&self) -> Vec<Complex64> {
        self.found.iter().map(|t| t.lambda).collect()
    }

    /// `b <- b - p (q^* b)`, `c <- c - q (p^* c)`, and record the triple.
    pub fn deflate(&self, triple: &Eigentriple) -> Result<DeflatedPorts> {
        let err = triple.normalization_error();
        if err > 1e-6 {
            return Err(Error::NormalizationViolated(err));
        }
        let qb = triple.q.pointwise_dot(&self.b)?;
        let pc = triple.p.pointwise_dot(&self.c)?;
        let b = self.b.sub(&triple.p.modulate(&qb)?)?.trim(TRIM_TOL);
        let c = self.c.sub(&triple.q.modulate(&pc)?)?.trim(TRIM_TOL);
        let mut found = self.found.clone();
        found.push(triple.clone());
        Ok(DeflatedPorts {
            b,
            c,
            b_original_norm: self.b_original_norm,
            c_original_norm: self.c_original_norm,
            found,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SadpaOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Override for the spurious-pole cap; defaults to ten times a
    /// Gershgorin bound on `|Re lambda|`.
    pub real_part_cap: Option<f64>,
    pub residue_floor: f64,
    pub family_tol: f64,
}

impl Default for SadpaOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 50,
            real_part_cap: None,
            residue_floor: 1e-12,
            family_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub shift: Complex64,
    pub ritz_value: Complex64,
    pub residual: f64,
    pub residual_adj: f64,
    pub space_dim: usize,
    pub appended: bool,
    pub converged: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SadpaOutcome {
    pub triples: Vec<Eigentriple>,
    /// Iteration (solve count) at which each triple converged.
    pub found_at: Vec<usize>,
    pub iterations: usize,
    pub log: Vec<IterationRecord>,
    pub real_part_cap: f64,
    pub fourier_depth: usize,
}

/// Upper bound on `|Re lambda|` from Gershgorin discs of `A(t)`.
pub fn gershgorin_real_bound(a: &TrigMatFn) -> f64 {
    let n = a.rows();
    let mut row = vec![0.0f64; n];
    for (k, ak) in a.coeffs().iter().enumerate() {
        let central = k == a.depth();
        for j in 0..n {
            for i in 0..n {
                let z = ak[(i, j)];
                row[i] += if central && i == j { z.re.abs() } else { z.norm() };
            }
        }
    }
    row.into_iter().fold(0.0, f64::max)
}

/// Top admissible pole, with its Ritz triple and residuals.
struct Ritz {
    lambda: Complex64,
    p: TrigVecFn,
    q: TrigVecFn,
    res: f64,
    res_adj: f64,
}

fn ritz_of(spaces: &SearchSpaces, pole: ProjectedPole) -> Result<Ritz> {
    let (vx, lvx) = spaces.combine_v(&pole.x)?;
    let nv = vx.norm();
    let inv = Complex64::new(1.0 / nv, 0.0);
    let p = vx.scale(inv);
    let lp = lvx.scale(inv);
    let (q, lq) = spaces.combine_w(&pole.y)?;
    let res = lp.sub(&p.scale(pole.lambda))?.norm();
    let res_adj = lq.sub(&q.scale(pole.lambda.conj()))?.norm() / q.norm();
    Ok(Ritz {
        lambda: pole.lambda,
        p,
        q,
        res,
        res_adj,
    })
}

/// Two-sided Rayleigh quotient of the raw solve pair. Near convergence this
/// is an inverse-iteration step and can be sharper than the projected pair,
/// whose accuracy stalls once new directions become dependent.
fn raw_ritz(a: &TrigMatFn, v: &TrigVecFn, w: &TrigVecFn) -> Result<Option<Ritz>> {
    let (nv, nw) = (v.norm(), w.norm());
    if nv == 0.0 || nw == 0.0 {
        return Ok(None);
    }
    let p = v.scale(Complex64::new(1.0 / nv, 0.0));
    let q = w.scale(Complex64::new(1.0 / nw, 0.0));
    let lp = apply_l(a, &p)?;
    let lq = apply_l_adj(a, &q)?;
    let den = q.inner_product_unchecked(&p);
    if den.norm() == 0.0 {
        return Ok(None);
    }
    let lambda = q.inner_product_unchecked(&lp) / den;
    let res = lp.sub(&p.scale(lambda))?.norm();
    let res_adj = lq.sub(&q.scale(lambda.conj()))?.norm();
    Ok(Some(Ritz {
        lambda,
        p,
        q,
        res,
        res_adj,
    }))
}

fn top_ritz(
    spaces: &SearchSpaces,
    ports: &DeflatedPorts,
    k: usize,
    omega: f64,
    rules: &RankingRules,
) -> Result<Option<Ritz>> {
    let ps = project_system(spaces, &ports.b, &ports.c, k)?;
    let poles = rank_projected_poles(&ps, omega, &ports.found_lambdas(), rules)?;
    match poles.into_iter().next() {
        Some(p) => Ok(Some(ritz_of(spaces, p)?)),
        None => Ok(None),
    }
}

/// Find `n_want` dominant eigentriples, starting from the shifts `s0`.
pub fn sadpa_run(
    sys: &LtpSystem,
    ws: &mut ResolventWorkspace,
    s0: &[Complex64],
    n_want: usize,
    k: usize,
    opts: &SadpaOptions,
) -> Result<SadpaOutcome> {
    if n_want == 0 {
        return Err(Error::InvalidArgument("n_want must be at least 1".into()));
    }
    if s0.is_empty() {
        return Err(Error::InvalidArgument("at least one initial shift is required".into()));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {}", opts.tol)));
    }
    let a = sys.a();
    let omega = sys.omega();
    let cap = opts.real_part_cap.unwrap_or_else(|| 10.0 * gershgorin_real_bound(a));
    let rules = RankingRules {
        real_part_cap: cap,
        residue_floor: opts.residue_floor,
        family_tol: opts.family_tol,
    };
    info!("sadpa: n_want {n_want}, K {k}, real-part cap {cap:.3e}");

    let mut ports = DeflatedPorts::new(sys.b().clone(), sys.c().clone());
    let mut spaces = SearchSpaces::default();
    let mut out = SadpaOutcome {
        triples: Vec::new(),
        found_at: Vec::new(),
        iterations: 0,
        log: Vec::new(),
        real_part_cap: cap,
        fourier_depth: k,
    };
    let fail = |out: SadpaOutcome| Error::MaxIterExceeded {
        iterations: out.iterations,
        partial: Box::new(PartialResult::Sadpa(out)),
    };

    // extra initial guesses only seed the spaces
    for &s in &s0[1..] {
        if out.iterations >= opts.max_iter {
            return Err(fail(out));
        }
        out.iterations += 1;
        let (v, w, _, _) = two_sided_solve(ws, &ports.b, &ports.c, s, k)?;
        spaces.orthogonalize_append(a, &v, &w)?;
    }

    let mut s = s0[0];
    loop {
        if out.iterations >= opts.max_iter {
            return Err(fail(out));
        }
        out.iterations += 1;
        let (v, w, s_used, _) = two_sided_solve(ws, &ports.b, &ports.c, s, k)?;
        let appended = spaces.orthogonalize_append(a, &v, &w)?;
        if spaces.is_empty() {
            return Err(Error::BreakdownAtShift {
                s: s_used,
                reason: "search spaces are empty".into(),
            });
        }

        let mut ritz = top_ritz(&spaces, &ports, k, omega, &rules)?;
        let Some(first) = ritz.as_ref() else {
            return Err(Error::BreakdownAtShift {
                s: s_used,
                reason: "no admissible projected pole".into(),
            });
        };
        if !(first.res < opts.tol && first.res_adj < opts.tol) {
            if let Some(raw) = raw_ritz(a, &v, &w)? {
                let fresh = !in_found_family(raw.lambda, &ports.found_lambdas(), omega, opts.family_tol);
                if fresh && raw.res < opts.tol && raw.res_adj < opts.tol {
                    debug!("sadpa: raw solve pair converged at {:.10e}", raw.lambda);
                    ritz = Some(raw);
                }
            }
        }
        let first = ritz.as_ref().expect("checked above");
        out.log.push(IterationRecord {
            iteration: out.iterations,
            shift: s_used,
            ritz_value: first.lambda,
            residual: first.res,
            residual_adj: first.res_adj,
            space_dim: spaces.len(),
            appended,
            converged: out.triples.len(),
        });
        debug!(
            "sadpa {}: shift {s_used:.8e}, ritz {:.10e}, residuals {:.3e}/{:.3e}, dim {}",
            out.iterations,
            first.lambda,
            first.res,
            first.res_adj,
            spaces.len()
        );

        // several Ritz triples may be accurate at once
        while let Some(r) = ritz.as_ref() {
            if !(r.res < opts.tol && r.res_adj < opts.tol) {
                break;
            }
            let raw = Eigentriple::from_vectors(r.lambda, &r.p, &r.q, a)?;
            let triple = raw.canonicalized().trimmed(TRIM_TOL);
            info!(
                "sadpa: converged lambda = {:.12e} at iteration {} (residuals {:.2e}/{:.2e})",
                triple.lambda, out.iterations, triple.residual, triple.residual_adj
            );
            ports = ports.deflate(&triple)?;
            out.triples.push(triple);
            out.found_at.push(out.iterations);
            if out.triples.len() == n_want {
                return Ok(out);
            }
            ritz = top_ritz(&spaces, &ports, k, omega, &rules)?;
        }
        s = match ritz {
            Some(r) => r.lambda,
            None => {
                return Err(Error::BreakdownAtShift {
                    s: s_used,
                    reason: "no admissible projected pole after deflation".into(),
                })
            }
        };
    }
}

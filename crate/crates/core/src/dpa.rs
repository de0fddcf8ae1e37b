//! Dominant pole iteration for the periodic operator.
//!
//! Newton's method on `1 / ||g(s)||` gives the two-sided Rayleigh quotient
//! update `s_{k+1} = <w, L v> / <w, v>` with `v = (s_k - L)^{-1} b` and
//! `w = (s_k - L)^{-*} (c Psi^T alpha)`, where `alpha = g(s_k)`.

use log::debug;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, PartialResult, Result};
use crate::hill::{apply_l, apply_l_adj, ResolventWorkspace};
use crate::phv::{harmonics_of_output, modulated_output};
use crate::systems::LtpSystem;
use crate::trigfun::TrigVecFn;

/// `lambda = lambda_c + i omega k` with `Im lambda_c` in `(-omega/2, omega/2]`.
pub fn canonicalize_lambda(lambda: Complex64, omega: f64) -> (Complex64, i64) {
    let k = ((lambda.im - 0.5 * omega) / omega).ceil();
    let k = k as i64;
    (lambda - Complex64::new(0.0, omega * k as f64), k)
}

/// Distance between two eigenvalue families `lambda + i omega Z`.
pub fn family_distance(a: Complex64, b: Complex64, omega: f64) -> f64 {
    let d = a - b;
    let k = (d.im / omega).round();
    (d - Complex64::new(0.0, omega * k)).norm()
}

/// Eigenvalue with right and left eigenfunctions, normalized so that
/// `q(0)^* p(0) = 1` and `||p|| = 1`.
#[derive(Debug, Clone, Serialize)]
pub struct Eigentriple {
    pub lambda: Complex64,
    pub p: TrigVecFn,
    pub q: TrigVecFn,
    /// `||L p - lambda p|| / ||p||`.
    pub residual: f64,
    /// `||L* q - conj(lambda) q|| / ||q||`.
    pub residual_adj: f64,
}

impl Eigentriple {
    /// Normalize from raw right and left vectors.
    pub fn from_vectors(lambda: Complex64, v: &TrigVecFn, w: &TrigVecFn, a: &crate::trigfun::TrigMatFn) -> Result<Self> {
        let p = v.scale(Complex64::new(1.0 / v.norm(), 0.0));
        let beta = p.evaluate(0.0).dotc(&w.evaluate(0.0));
        if beta.norm() == 0.0 || !beta.is_finite() {
            return Err(Error::BreakdownAtShift {
                s: lambda,
                reason: "left and right eigenfunctions are orthogonal at t = 0".into(),
            });
        }
        let q = w.scale(Complex64::new(1.0, 0.0) / beta);
        let mut t = Self {
            lambda,
            p,
            q,
            residual: 0.0,
            residual_adj: 0.0,
        };
        t.update_residuals(a)?;
        Ok(t)
    }

    pub fn update_residuals(&mut self, a: &crate::trigfun::TrigMatFn) -> Result<()> {
        let rp = apply_l(a, &self.p)?.sub(&self.p.scale(self.lambda))?;
        let rq = apply_l_adj(a, &self.q)?.sub(&self.q.scale(self.lambda.conj()))?;
        self.residual = rp.norm() / self.p.norm();
        self.residual_adj = rq.norm() / self.q.norm();
        Ok(())
    }

    /// `|q(0)^* p(0) - 1|`.
    pub fn normalization_error(&self) -> f64 {
        (self.q.evaluate(0.0).dotc(&self.p.evaluate(0.0)) - 1.0).norm()
    }

    /// `max_t |q(t)^* p(t) - 1|` over `samples` equispaced times in one period.
    pub fn constancy_error(&self, samples: usize) -> f64 {
        let period = self.p.period();
        (0..samples)
            .map(|j| {
                let t = period * j as f64 / samples as f64;
                (self.q.evaluate(t).dotc(&self.p.evaluate(t)) - 1.0).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Move to the family member with `Im lambda` in `(-omega/2, omega/2]`.
    pub fn canonicalized(&self) -> Self {
        let (lam, k) = canonicalize_lambda(self.lambda, self.p.omega());
        if k == 0 {
            return self.clone();
        }
        Self {
            lambda: lam,
            p: self.p.phase_shift(-k),
            q: self.q.phase_shift(-k),
            residual: self.residual,
            residual_adj: self.residual_adj,
        }
    }

    pub fn trimmed(&self, rel_tol: f64) -> Self {
        Self {
            p: self.p.trim(rel_tol),
            q: self.q.trim(rel_tol),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct DpaTrace {
    pub shifts: Vec<Complex64>,
    pub residuals: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DpaOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for DpaOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 50 }
    }
}

/// Shared step: forward and adjoint solves at `s`.
pub(crate) fn two_sided_solve(
    ws: &mut ResolventWorkspace,
    b: &TrigVecFn,
    c: &TrigVecFn,
    s: Complex64,
    k: usize,
) -> Result<(TrigVecFn, TrigVecFn, Complex64, Vec<Complex64>)> {
    let (v, _, s_used) = ws.solve_perturbed(s, b, false)?;
    let alpha = harmonics_of_output(c, &v, k)?;
    let rhs = if alpha.iter().all(|a| *a == Complex64::new(0.0, 0.0)) {
        c.clone()
    } else {
        modulated_output(c, &alpha)?
    };
    let (w, _, _) = ws.solve_perturbed(s_used, &rhs, true)?;
    Ok((v, w, s_used, alpha))
}

/// Run the iteration from `s0` with Fourier depth `k`.
pub fn dpa_iterate(
    sys: &LtpSystem,
    ws: &mut ResolventWorkspace,
    s0: Complex64,
    k: usize,
    opts: &DpaOptions,
) -> Result<(Eigentriple, DpaTrace)> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {}", opts.tol)));
    }
    let a = sys.a();
    let mut trace = DpaTrace::default();
    let mut s = s0;
    for it in 0..opts.max_iter {
        let (v, w, s_used, alpha) = two_sided_solve(ws, sys.b(), sys.c(), s, k)?;
        if alpha.iter().all(|x| x.norm() == 0.0) {
            return Err(Error::BreakdownAtShift {
                s: s_used,
                reason: "principal harmonics vanish".into(),
            });
        }
        let lv = apply_l(a, &v)?;
        let den = w.inner_product(&v)?;
        if den.norm() == 0.0 {
            return Err(Error::BreakdownAtShift {
                s: s_used,
                reason: "<w, v> = 0".into(),
            });
        }
        let s_next = w.inner_product(&lv)? / den;
        let res = lv.sub(&v.scale(s_next))?.norm() / v.norm();
        let lw = apply_l_adj(a, &w)?;
        let res_adj = lw.sub(&w.scale(s_next.conj()))?.norm() / w.norm();
        trace.shifts.push(s_used);
        trace.residuals.push(res.max(res_adj));
        trace.iterations = it + 1;
        debug!("dpa {it}: s = {s_used:.10e}, next {s_next:.10e}, residual {res:.3e}/{res_adj:.3e}");
        if res < opts.tol && res_adj < opts.tol {
            trace.converged = true;
            let triple = Eigentriple::from_vectors(s_next, &v, &w, a)?;
            return Ok((triple, trace));
        }
        if !s_next.is_finite() {
            return Err(Error::BreakdownAtShift {
                s: s_used,
                reason: "non-finite Rayleigh quotient".into(),
            });
        }
        s = s_next;
    }
    Err(Error::MaxIterExceeded {
        iterations: trace.iterations,
        partial: Box::new(PartialResult::Dpa(trace)),
    })
}

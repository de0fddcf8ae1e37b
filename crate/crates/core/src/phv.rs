//! Principal harmonics vector `g(s)`, entries of the harmonic transfer
//! function, and the Fourier depth estimate.
//!
//! `g_l(s) = <c psi_l, (sI - L)^{-1} b>` with `psi_l(t) = exp(i omega l t)`,
//! which is the harmonic-`l` coefficient of the scalar `c(t)^* v(t)`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::hill::ResolventWorkspace;
use crate::systems::LtpSystem;
use crate::trigfun::TrigVecFn;

/// Relative size below which a harmonic is not counted towards the depth.
pub const DEPTH_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhvSample {
    pub s: Complex64,
    pub k: usize,
    /// `g[l + 2K]` for `l = -2K..=2K`.
    pub g: Vec<Complex64>,
}

impl PhvSample {
    pub fn get(&self, l: i64) -> Complex64 {
        let idx = l + 2 * self.k as i64;
        if idx < 0 || idx as usize >= self.g.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.g[idx as usize]
        }
    }

    pub fn norm(&self) -> f64 {
        self.g.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Harmonics `-2K..=2K` of `c(t)^* v(t)`, i.e. `<c psi_l, v>`.
pub fn harmonics_of_output(c: &TrigVecFn, v: &TrigVecFn, k: usize) -> Result<Vec<Complex64>> {
    let cv = c.pointwise_dot(v)?;
    let m = 2 * k as i64;
    Ok((-m..=m).map(|l| cv.entry(0, l)).collect())
}

/// `c(t) * sum_l alpha_l exp(i omega l t)` for `l = -2K..=2K`.
pub fn modulated_output(c: &TrigVecFn, alpha: &[Complex64]) -> Result<TrigVecFn> {
    let m = (alpha.len() as i64 - 1) / 2;
    let terms: Vec<(i64, Complex64)> = alpha.iter().enumerate().map(|(j, &a)| (j as i64 - m, a)).collect();
    let psi = TrigVecFn::scalar(c.period(), &terms)?;
    c.modulate(&psi)
}

fn significant_depth(f: &TrigVecFn) -> usize {
    let total = f.norm();
    if total == 0.0 {
        return 0;
    }
    let m = f.depth() as i64;
    (0..=m)
        .rev()
        .find(|&k| {
            let w = (f.coeff(k).norm_squared() + f.coeff(-k).norm_squared()).sqrt();
            w > DEPTH_THRESHOLD * total
        })
        .unwrap_or(0) as usize
}

/// Largest significant harmonic over `(s_probe - L)^{-1} b` and `(s_probe - L)^{-*} c`.
pub fn estimate_fourier_depth(sys: &LtpSystem, ws: &mut ResolventWorkspace, s_probe: Complex64) -> Result<usize> {
    let (v, _) = ws.solve(s_probe, sys.b())?;
    let (w, _) = ws.solve_adj(s_probe, sys.c())?;
    Ok(significant_depth(&v).max(significant_depth(&w)))
}

/// One resolvent solve and `4K + 1` inner products.
pub fn eval_phv(sys: &LtpSystem, ws: &mut ResolventWorkspace, s: Complex64, k: usize) -> Result<PhvSample> {
    let (v, _) = ws.solve(s, sys.b())?;
    Ok(PhvSample {
        s,
        k,
        g: harmonics_of_output(sys.c(), &v, k)?,
    })
}

/// `G_{l,m}(s) = <c psi_l, (sI - L)^{-1} [b psi_m]>`.
pub fn eval_htf_entry(
    sys: &LtpSystem,
    ws: &mut ResolventWorkspace,
    s: Complex64,
    l: i64,
    m: i64,
    k: usize,
) -> Result<Complex64> {
    if (l - m).unsigned_abs() as usize > 2 * k {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let rhs = sys.b().phase_shift(-m);
    let (v, _) = ws.solve(s, &rhs)?;
    Ok(sys.c().pointwise_dot(&v)?.entry(0, l))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{build_example, random_system, ExampleSpec};
    use crate::trigfun::TrigMatFn;
    use nalgebra::{DMatrix, DVector};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn diagonal_lti() -> LtpSystem {
        let a = TrigMatFn::constant(1.0, DMatrix::from_diagonal(&DVector::from_vec(vec![c(-1.0, 0.0), c(-3.0, 0.0)])))
            .unwrap();
        let e1 = TrigVecFn::constant(1.0, &DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]));
        LtpSystem::new(a, e1.clone(), e1).unwrap()
    }

    #[test]
    fn lti_depth_and_phv() {
        let sys = diagonal_lti();
        let mut ws = ResolventWorkspace::for_system(&sys);
        assert_eq!(estimate_fourier_depth(&sys, &mut ws, c(1.0, 0.0)).unwrap(), 0);
        let s = c(0.5, 2.0);
        let g = eval_phv(&sys, &mut ws, s, 1).unwrap();
        assert!((g.get(0) - c(1.0, 0.0) / (s + 1.0)).norm() < 1e-15);
        for l in [-2, -1, 1, 2] {
            assert_eq!(g.get(l), c(0.0, 0.0));
        }
        assert_eq!(eval_htf_entry(&sys, &mut ws, s, 1, 0, 1).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn example_has_depth_one() {
        let (sys, _) = build_example(&ExampleSpec::with_n(20)).unwrap();
        let mut ws = ResolventWorkspace::for_system(&sys);
        assert_eq!(estimate_fourier_depth(&sys, &mut ws, c(1.0, 0.0)).unwrap(), 1);
    }

    #[test]
    fn htf_central_column_is_phv() {
        let sys = random_system(4, 1, 21).unwrap();
        let mut ws = ResolventWorkspace::for_system(&sys);
        let k = estimate_fourier_depth(&sys, &mut ws, c(1.0, 0.0)).unwrap();
        let s = c(-0.05, 0.4);
        let g = eval_phv(&sys, &mut ws, s, k).unwrap();
        for l in -(2 * k as i64)..=(2 * k as i64) {
            let h = eval_htf_entry(&sys, &mut ws, s, l, 0, k).unwrap();
            assert!((h - g.get(l)).norm() <= 1e-10 * g.norm());
        }
    }

    #[test]
    fn htf_shift_identity() {
        let sys = random_system(3, 2, 22).unwrap();
        let mut ws = ResolventWorkspace::for_system(&sys);
        let k = 4;
        let s = c(0.1, 0.25);
        let w = c(0.0, sys.omega());
        for (l, m) in [(0, 0), (1, -1), (-2, 1)] {
            let a = eval_htf_entry(&sys, &mut ws, s, l + 1, m + 1, k).unwrap();
            let b = eval_htf_entry(&sys, &mut ws, s + w, l, m, k).unwrap();
            assert!((a - b).norm() <= 1e-8 * b.norm().max(1e-12), "({l},{m}): {a} vs {b}");
        }
    }

    #[test]
    fn pole_blow_up_ratio() {
        let sys = diagonal_lti();
        let mut ws = ResolventWorkspace::for_system(&sys);
        let lam = c(-1.0, 0.0);
        let g3 = eval_phv(&sys, &mut ws, lam + 1e-3, 0).unwrap().norm();
        let g4 = eval_phv(&sys, &mut ws, lam + 1e-4, 0).unwrap().norm();
        let ratio = g4 / g3;
        assert!((8.0..=12.0).contains(&ratio), "{ratio}");
    }
}

//! Three-stage Radau IIA (order 5, L-stable) for linear periodic systems
//! `X' = A(t) X + F(t)`, with step-doubling error control.
//!
//! Only meant for small `n`: each step solves a dense `3n x 3n` system.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::input::InputSignal;
use crate::eval::sim::SimResult;
use crate::systems::LtpSystem;
use crate::trigfun::TrigMatFn;

/// Largest state dimension accepted by the dense stepper.
pub const MAX_DENSE_DIM: usize = 64;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RadauOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h0: f64,
    pub max_steps: usize,
}

impl Default for RadauOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            h0: 1e-2,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct RadauStats {
    pub accepted: usize,
    pub rejected: usize,
}

struct Tableau {
    c: [f64; 3],
    a: [[f64; 3]; 3],
}

fn tableau() -> Tableau {
    let s6 = 6f64.sqrt();
    Tableau {
        c: [(4.0 - s6) / 10.0, (4.0 + s6) / 10.0, 1.0],
        a: [
            [(88.0 - 7.0 * s6) / 360.0, (296.0 - 169.0 * s6) / 1800.0, (-2.0 + 3.0 * s6) / 225.0],
            [(296.0 + 169.0 * s6) / 1800.0, (88.0 + 7.0 * s6) / 360.0, (-2.0 - 3.0 * s6) / 225.0],
            [(16.0 - s6) / 36.0, (16.0 + s6) / 36.0, 1.0 / 9.0],
        ],
    }
}

struct Stepper<'a, F> {
    a: &'a TrigMatFn,
    forcing: F,
    tab: Tableau,
}

impl<F> Stepper<'_, F>
where
    F: Fn(f64) -> Option<DMatrix<Complex64>>,
{
    /// One step; the method is stiffly accurate, so the last stage is the
    /// new state.
    fn step(&self, t: f64, h: f64, x: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
        let n = x.nrows();
        let m = x.ncols();
        let mut big = DMatrix::<Complex64>::identity(3 * n, 3 * n);
        let mut rhs = DMatrix::<Complex64>::zeros(3 * n, m);
        let stage_a: Vec<DMatrix<Complex64>> = self.tab.c.iter().map(|c| self.a.evaluate(t + c * h)).collect();
        let stage_f: Vec<Option<DMatrix<Complex64>>> = self.tab.c.iter().map(|c| (self.forcing)(t + c * h)).collect();
        for i in 0..3 {
            rhs.view_mut((i * n, 0), (n, m)).copy_from(x);
            for j in 0..3 {
                let coef = Complex64::new(h * self.tab.a[i][j], 0.0);
                let mut blk = big.view_mut((i * n, j * n), (n, n));
                blk -= &stage_a[j] * coef;
                if let Some(f) = &stage_f[j] {
                    let mut r = rhs.view_mut((i * n, 0), (n, m));
                    r += f * coef;
                }
            }
        }
        let sol = big.lu().solve(&rhs).ok_or(Error::Singular)?;
        Ok(sol.rows(2 * n, n).into_owned())
    }
}

fn error_norm(coarse: &DMatrix<Complex64>, fine: &DMatrix<Complex64>, o: &RadauOptions) -> f64 {
    coarse
        .iter()
        .zip(fine.iter())
        .map(|(a, b)| (a - b).norm() / (o.atol + o.rtol * b.norm()))
        .fold(0.0, f64::max)
}

/// Integrate from `x0` at `t = 0`, returning the state at each grid time.
pub fn integrate_linear<F>(
    a: &TrigMatFn,
    forcing: F,
    x0: DMatrix<Complex64>,
    grid: &[f64],
    opts: &RadauOptions,
) -> Result<(Vec<DMatrix<Complex64>>, RadauStats)>
where
    F: Fn(f64) -> Option<DMatrix<Complex64>>,
{
    if a.rows() > MAX_DENSE_DIM {
        return Err(Error::InvalidArgument(format!(
            "dense time stepping supports n <= {MAX_DENSE_DIM}, got {}",
            a.rows()
        )));
    }
    let stepper = Stepper {
        a,
        forcing,
        tab: tableau(),
    };
    let mut stats = RadauStats::default();
    let mut x = x0;
    let mut t = 0.0;
    let mut h = opts.h0;
    let mut out = Vec::with_capacity(grid.len());
    for &target in grid {
        if target < t {
            return Err(Error::InvalidArgument("time grid must be nondecreasing from 0".into()));
        }
        while target - t > 1e-14 * target.abs().max(1.0) {
            if stats.accepted + stats.rejected >= opts.max_steps {
                return Err(Error::InvalidArgument(format!(
                    "step budget of {} exhausted at t = {t}",
                    opts.max_steps
                )));
            }
            let hh = h.min(target - t);
            let coarse = stepper.step(t, hh, &x)?;
            let mid = stepper.step(t, 0.5 * hh, &x)?;
            let fine = stepper.step(t + 0.5 * hh, 0.5 * hh, &mid)?;
            let err = error_norm(&coarse, &fine, opts);
            let factor = if err == 0.0 { 4.0 } else { (0.9 * err.powf(-1.0 / 6.0)).clamp(0.2, 4.0) };
            if err <= 1.0 {
                t += hh;
                x = fine;
                stats.accepted += 1;
                if hh == h {
                    h *= factor;
                }
            } else {
                stats.rejected += 1;
                h = hh * factor;
            }
        }
        out.push(x.clone());
    }
    Ok((out, stats))
}

/// Reference output `y = c(t)^* x(t)` of a small full-order system from
/// `x(0) = 0`.
pub fn simulate_fom_dense(sys: &LtpSystem, u: &InputSignal, grid: &[f64], opts: &RadauOptions) -> Result<SimResult> {
    let omega = sys.omega();
    let forcing = |t: f64| {
        let ut = u.evaluate(t, omega);
        Some(DMatrix::from_column_slice(sys.n(), 1, (sys.b().evaluate(t) * ut).as_slice()))
    };
    let x0 = DMatrix::zeros(sys.n(), 1);
    let (states, stats) = integrate_linear(sys.a(), forcing, x0, grid, opts)?;
    let y = grid
        .iter()
        .zip(&states)
        .map(|(&t, x)| sys.c().evaluate(t).dotc(&x.column(0)))
        .collect();
    Ok(SimResult {
        t: grid.to_vec(),
        y,
        method: "radau-iia-5".into(),
        steps: stats.accepted,
        rejected: stats.rejected,
    })
}

/// Monodromy matrix `Phi(T)` of `x' = A(t) x`.
pub fn monodromy(a: &TrigMatFn, opts: &RadauOptions) -> Result<DMatrix<Complex64>> {
    let n = a.rows();
    let none = |_: f64| None;
    let (mut states, _) = integrate_linear(a, none, DMatrix::identity(n, n), &[a.period()], opts)?;
    Ok(states.pop().expect("one grid point"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::sim::{simulate_fom_example, uniform_grid};
    use crate::systems::{build_example, ExampleSpec};
    use nalgebra::DVector;

    #[test]
    fn row_sums_equal_nodes() {
        let tab = tableau();
        for i in 0..3 {
            let s: f64 = tab.a[i].iter().sum();
            assert!((s - tab.c[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn scalar_decay_is_exact_to_tolerance() {
        let a = TrigMatFn::constant(1.0, DMatrix::from_element(1, 1, Complex64::new(-2.0, 1.0))).unwrap();
        let opts = RadauOptions::default();
        let (x, _) = integrate_linear(&a, |_| None, DMatrix::identity(1, 1), &[0.5, 3.0], &opts).unwrap();
        for (xi, t) in x.iter().zip([0.5, 3.0]) {
            let want = (Complex64::new(-2.0, 1.0) * t).exp();
            assert!((xi[(0, 0)] - want).norm() < 1e-9);
        }
    }

    #[test]
    fn example_monodromy_has_known_multipliers() {
        let (sys, gt) = build_example(&ExampleSpec::with_n(4)).unwrap();
        let opts = RadauOptions {
            rtol: 1e-12,
            atol: 1e-14,
            ..Default::default()
        };
        let phi = monodromy(sys.a(), &opts).unwrap();
        // P(T) = P(0) = I, so Phi(T) = exp(R T)
        let want = DMatrix::from_diagonal(&DVector::from_iterator(
            4,
            gt.r.iter().map(|&r| Complex64::new((r * sys.period()).exp(), 0.0)),
        ));
        let err = (phi - want).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn small_example_time_stepper_matches_closed_form() {
        let (sys, gt) = build_example(&ExampleSpec::with_n(4)).unwrap();
        let u = InputSignal::exponential(-1.0);
        let grid = uniform_grid(20.0, 101);
        let a = simulate_fom_dense(&sys, &u, &grid, &RadauOptions::default()).unwrap();
        let b = simulate_fom_example(&gt, &u, &grid).unwrap();
        let peak = b.y.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (x, y) in a.y.iter().zip(&b.y) {
            assert!((x - y).norm() < 1e-7 * y.norm().max(1e-3 * peak));
        }
    }
}

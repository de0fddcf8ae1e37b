//! Time-domain simulation of reduced models and of the benchmark.

use log::warn;
use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::input::InputSignal;
use crate::rom::Rom;
use crate::systems::ExampleGroundTruth;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Serialize)]
pub struct SimResult {
    pub t: Vec<f64>,
    pub y: Vec<Complex64>,
    pub method: String,
    /// Quadrature panels or accepted time steps.
    pub steps: usize,
    pub rejected: usize,
}

/// `count` equispaced points on `[0, t_end]`, both ends included.
pub fn uniform_grid(t_end: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..count).map(|j| t_end * j as f64 / (count - 1) as f64).collect(),
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() || grid[0] < 0.0 || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument(
            "time grid must be nonempty, start at t >= 0 and increase strictly".into(),
        ));
    }
    Ok(())
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            // p1 = P_n(x), p0 = P_{n-1}(x)
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// `(e^x - 1) / x`, accurate near zero.
pub fn phi1(x: Complex64) -> Complex64 {
    if x.norm() < 1.0 {
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for k in 2..40 {
            term *= x / k as f64;
            sum += term;
            if term.norm() < 1e-17 * sum.norm() {
                break;
            }
        }
        sum
    } else {
        (x.exp() - 1.0) / x
    }
}

/// `int_0^t e^{lambda (t - tau)} e^{mu tau} d tau`.
pub fn exp_convolution(mu: Complex64, lambda: Complex64, t: f64) -> Complex64 {
    let d = (mu - lambda) * t;
    if d.norm() < 1.0 {
        t * (lambda * t).exp() * phi1(d)
    } else {
        ((mu * t).exp() - (lambda * t).exp()) / (mu - lambda)
    }
}

struct Panel<'a> {
    rom: &'a Rom,
    u: &'a InputSignal,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Panel<'_> {
    /// `int_a^b e^{lambda_j (b - tau)} br_j(tau) u(tau) d tau` for all modes.
    fn rule(&self, a: f64, b: f64) -> DVector<Complex64> {
        let half = 0.5 * (b - a);
        let omega = self.rom.omega();
        let mut acc = DVector::zeros(self.rom.r());
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let tau = a + half * (x + 1.0);
            let f = self.rom.br.evaluate(tau) * self.u.evaluate(tau, omega);
            for (j, lam) in self.rom.lambdas.iter().enumerate() {
                acc[j] += f[j] * (lam * (b - tau)).exp() * (half * w);
            }
        }
        acc
    }

    /// Adaptive bisection until the two-panel estimate agrees to `tol`.
    fn adaptive(&self, a: f64, b: f64, tol: f64, depth: usize, stats: &mut (usize, usize)) -> DVector<Complex64> {
        let whole = self.rule(a, b);
        let m = 0.5 * (a + b);
        let left = self.rule(a, m);
        let right = self.rule(m, b);
        let decay = DVector::from_iterator(
            self.rom.r(),
            self.rom.lambdas.iter().map(|lam| (lam * (b - m)).exp()),
        );
        let split = left.component_mul(&decay) + right;
        let err = (&split - &whole).amax_abs();
        let scale = split.amax_abs().max(1.0);
        if err <= tol * scale || depth >= 40 {
            stats.0 += 1;
            return split;
        }
        stats.1 += 1;
        let l = self.adaptive(a, m, tol, depth + 1, stats);
        let r = self.adaptive(m, b, tol, depth + 1, stats);
        l.component_mul(&decay) + r
    }
}

trait AmaxAbs {
    fn amax_abs(&self) -> f64;
}

impl AmaxAbs for DVector<Complex64> {
    fn amax_abs(&self) -> f64 {
        self.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Integrate the decoupled reduced model from `z(0) = 0`. The linear part
/// is propagated exactly; the forcing integral uses adaptive 8-point
/// Gauss-Legendre panels.
pub fn simulate_rom(rom: &Rom, u: &InputSignal, grid: &[f64], tol: f64) -> Result<SimResult> {
    check_grid(grid)?;
    if let Some(l) = rom.lambdas.iter().find(|l| l.re > 0.0) {
        warn!("reduced model has an unstable mode {l}; the response grows");
    }
    let (nodes, weights) = gauss_legendre(8);
    let panel = Panel {
        rom,
        u,
        nodes,
        weights,
    };
    let mut z = DVector::<Complex64>::zeros(rom.r());
    let mut stats = (0usize, 0usize);
    let mut y = Vec::with_capacity(grid.len());
    let mut t = 0.0;
    for &tk in grid {
        if tk > t && !u.is_zero() {
            let prop = DVector::from_iterator(rom.r(), rom.lambdas.iter().map(|lam| (lam * (tk - t)).exp()));
            z = z.component_mul(&prop) + panel.adaptive(t, tk, tol, 0, &mut stats);
        }
        t = tk;
        y.push(rom.cr.evaluate(tk).dotc(&z));
    }
    Ok(SimResult {
        t: grid.to_vec(),
        y,
        method: "exponential-integrator/gauss-legendre-8".into(),
        steps: stats.0,
        rejected: stats.1,
    })
}

/// Exact benchmark response `y = c^* P z` through the known Floquet
/// coordinates: each `z_j` is a finite sum of exponential convolutions.
pub fn simulate_fom_example(gt: &ExampleGroundTruth, u: &InputSignal, grid: &[f64]) -> Result<SimResult> {
    check_grid(grid)?;
    let omega = gt.bhat.omega();
    let depth = gt.bhat.depth() as i64;
    let exps = u.exponentials(omega);
    let n = gt.n();
    let mut y = Vec::with_capacity(grid.len());
    for &t in grid {
        let chat = gt.chat.evaluate(t);
        let mut acc = ZERO;
        for j in 0..n {
            let lam = Complex64::new(gt.r[j], 0.0);
            let mut zj = ZERO;
            for m in -depth..=depth {
                let bjm = gt.bhat.entry(j, m);
                if bjm == ZERO {
                    continue;
                }
                for &(a, mu) in &exps {
                    zj += bjm * a * exp_convolution(mu + Complex64::new(0.0, omega * m as f64), lam, t);
                }
            }
            acc += chat[j].conj() * zj;
        }
        y.push(acc);
    }
    Ok(SimResult {
        t: grid.to_vec(),
        y,
        method: "closed-form".into(),
        steps: 0,
        rejected: 0,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RelativeError {
    pub pointwise: Vec<f64>,
    pub max: f64,
    pub mean: f64,
}

/// `|y - y_r| / max(|y|, 1e-3 max_t |y|)` pointwise, with its max and mean.
pub fn relative_error(y: &[Complex64], yr: &[Complex64]) -> Result<RelativeError> {
    if y.len() != yr.len() || y.is_empty() {
        return Err(Error::DimensionMismatch(format!(
            "output lengths {} and {} differ or are empty",
            y.len(),
            yr.len()
        )));
    }
    let peak = y.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let floor = 1e-3 * peak;
    let pointwise: Vec<f64> = y
        .iter()
        .zip(yr)
        .map(|(a, b)| {
            let d = (a - b).norm();
            let den = a.norm().max(floor);
            if den == 0.0 {
                if d == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                d / den
            }
        })
        .collect();
    let max = pointwise.iter().cloned().fold(0.0, f64::max);
    let mean = pointwise.iter().sum::<f64>() / pointwise.len() as f64;
    Ok(RelativeError { pointwise, max, mean })
}

/// `L2` norm of a uniformly sampled signal (trapezoid rule).
pub fn l2_norm_sampled(t: &[f64], y: &[Complex64]) -> f64 {
    let mut acc = 0.0;
    for i in 1..t.len() {
        acc += 0.5 * (t[i] - t[i - 1]) * (y[i].norm_sqr() + y[i - 1].norm_sqr());
    }
    acc.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rom::{build_rom, PartialFloquet};
    use crate::systems::{build_example, ExampleSpec};
    use crate::trigfun::TrigVecFn;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        for p in 0..16 {
            let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p)).sum();
            let want = if p % 2 == 0 { 2.0 / (p + 1) as f64 } else { 0.0 };
            assert!((got - want).abs() < 1e-14, "degree {p}");
        }
    }

    #[test]
    fn convolution_branches_agree() {
        let lam = c(-1.0, 0.3);
        for t in [0.1, 1.0, 7.0] {
            for d in [1e-9, 0.3, 0.99 / t, 1.01 / t, 5.0] {
                let mu = lam + c(d, 0.0);
                // trapezoid-free check: derivative identity z' = lam z + e^{mu t}
                let h = 1e-6;
                let dz = (exp_convolution(mu, lam, t + h) - exp_convolution(mu, lam, t - h)) / (2.0 * h);
                let rhs = lam * exp_convolution(mu, lam, t) + (mu * t).exp();
                assert!((dz - rhs).norm() < 1e-7 * rhs.norm().max(1.0), "t {t}, d {d}");
            }
        }
    }

    fn scalar_rom(lam: Complex64) -> Rom {
        let one = TrigVecFn::constant(1.0, &DVector::from_element(1, c(1.0, 0.0)));
        Rom {
            lambdas: vec![lam],
            br: one.clone(),
            cr: one,
        }
    }

    #[test]
    fn zero_input_gives_zero_output() {
        let rom = scalar_rom(c(-1.0, 0.0));
        let out = simulate_rom(&rom, &InputSignal::zero(), &uniform_grid(5.0, 11), 1e-10).unwrap();
        assert!(out.y.iter().all(|z| *z == ZERO));
    }

    #[test]
    fn scalar_mode_matches_closed_form() {
        let lam = c(-0.5, 0.0);
        let rom = scalar_rom(lam);
        let u = InputSignal::exponential(-1.0);
        let grid = uniform_grid(10.0, 101);
        let out = simulate_rom(&rom, &u, &grid, 1e-12).unwrap();
        for (t, y) in grid.iter().zip(&out.y) {
            let want = ((-t).exp() - (lam * t).exp()) / (c(-1.0, 0.0) - lam);
            assert!((y - want).norm() < 1e-11);
        }
    }

    #[test]
    fn exact_rom_reproduces_example() {
        let (sys, gt) = build_example(&ExampleSpec::with_n(6)).unwrap();
        let pf = PartialFloquet::from_ground_truth(&gt, &(0..6).collect::<Vec<_>>()).unwrap();
        let rom = build_rom(&pf, &sys).unwrap();
        let u = InputSignal::exponential(-1.0);
        let grid = uniform_grid(20.0, 201);
        let a = simulate_rom(&rom, &u, &grid, 1e-12).unwrap();
        let b = simulate_fom_example(&gt, &u, &grid).unwrap();
        let err = a.y.iter().zip(&b.y).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn relative_error_guard() {
        let y = [c(1.0, 0.0), c(0.0, 0.0), c(-2.0, 0.0)];
        let yr = [c(1.0, 0.0), c(1e-3, 0.0), c(-2.0, 0.0)];
        let e = relative_error(&y, &yr).unwrap();
        assert!((e.pointwise[1] - 0.5).abs() < 1e-12);
        assert!((e.mean - 0.5 / 3.0).abs() < 1e-12);
    }
}

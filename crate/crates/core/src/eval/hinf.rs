//! Sampled `H_inf` norms of LTI extensions on the imaginary axis.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::rom::LtiExtension;

/// `nu` in `+-logspace(lo, hi, points)`, plus `nu = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub lo_decade: f64,
    pub hi_decade: f64,
    pub points: usize,
    /// Also sample `-nu`; needed unless the extension is known to be real.
    pub negative: bool,
    /// Golden-section iterations around the sampled maximum.
    pub refine_iters: usize,
}

impl Default for FrequencyGrid {
    fn default() -> Self {
        Self {
            lo_decade: -6.0,
            hi_decade: 7.0,
            points: 2000,
            negative: true,
            refine_iters: 60,
        }
    }
}

impl FrequencyGrid {
    /// Sorted sample frequencies.
    pub fn frequencies(&self) -> Vec<f64> {
        let pos: Vec<f64> = (0..self.points)
            .map(|j| {
                let f = if self.points > 1 { j as f64 / (self.points - 1) as f64 } else { 0.0 };
                10f64.powf(self.lo_decade + (self.hi_decade - self.lo_decade) * f)
            })
            .collect();
        let mut nu: Vec<f64> = if self.negative { pos.iter().rev().map(|x| -x).collect() } else { Vec::new() };
        nu.push(0.0);
        nu.extend(pos);
        nu
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HinfResult {
    /// Largest singular value found (after refinement).
    pub value: f64,
    pub nu_peak: f64,
    /// `(nu, sigma_max)` at the grid points.
    pub sweep: Vec<(f64, f64)>,
}

pub fn sigma_max(m: &DMatrix<Complex64>) -> f64 {
    if m.nrows() == 1 && m.ncols() == 1 {
        return m[(0, 0)].norm();
    }
    m.clone().svd(false, false).singular_values.max()
}

fn sweep<F>(f: F, grid: &FrequencyGrid) -> Result<HinfResult>
where
    F: Fn(f64) -> Result<f64>,
{
    let nus = grid.frequencies();
    let mut samples = Vec::with_capacity(nus.len());
    for &nu in &nus {
        samples.push((nu, f(nu)?));
    }
    let (imax, &(mut nu_peak, mut value)) = samples
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .expect("grid is nonempty");
    if grid.refine_iters > 0 && samples.len() > 2 {
        let lo = samples[imax.saturating_sub(1)].0;
        let hi = samples[(imax + 1).min(samples.len() - 1)].0;
        let (x, fx) = golden_max(&f, lo, hi, grid.refine_iters)?;
        if fx > value {
            value = fx;
            nu_peak = x;
        }
    }
    Ok(HinfResult {
        value,
        nu_peak,
        sweep: samples,
    })
}

fn golden_max<F>(f: &F, mut a: f64, mut b: f64, iters: usize) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..iters {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1)?;
        }
    }
    Ok(if f1 > f2 { (x1, f1) } else { (x2, f2) })
}

/// `sup_nu sigma_max(H(i nu))` over the grid.
pub fn sampled_hinf_norm(ext: &LtiExtension, grid: &FrequencyGrid) -> Result<HinfResult> {
    sweep(|nu| Ok(sigma_max(&ext.eval(Complex64::new(0.0, nu))?)), grid)
}

/// `sup_nu sigma_max(H_full(i nu) - H_red(i nu))`. The extensions are padded
/// to a common Fourier depth.
pub fn sampled_hinf_error(full: &LtiExtension, red: &LtiExtension, grid: &FrequencyGrid) -> Result<HinfResult> {
    let k = full.k.max(red.k);
    let full = full.with_depth(k)?;
    let red = red.with_depth(k)?;
    sweep(
        |nu| {
            let s = Complex64::new(0.0, nu);
            Ok(sigma_max(&(full.eval(s)? - red.eval(s)?)))
        },
        grid,
    )
}

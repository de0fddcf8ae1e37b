//! Truncated Fourier series: evaluation, products, derivatives and the
//! `L^2` inner product.

use ltp_reduce::trigfun::{TrigMatFn, TrigVecFn};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

fn main() -> ltp_reduce::Result<()> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let t = 2.0 * PI;
    // sin(t) = (e^{it} - e^{-it}) / 2i
    let sin = TrigVecFn::scalar(t, &[(1, c(0.0, -0.5)), (-1, c(0.0, 0.5))])?;
    let cos = sin.differentiate();
    println!("sin(0.7) = {:.12}", sin.evaluate(0.7)[0].re);
    println!("cos(0.7) = {:.12}", cos.evaluate(0.7)[0].re);

    let sin2 = sin.pointwise_dot(&sin.conj())?;
    println!("sin^2 has depth {}, mean {:.3}", sin2.depth(), sin2.entry(0, 0).re);
    println!("<sin, sin> = {:.6}, <sin, cos> = {:.1e}", sin.inner_product(&sin)?.re, sin.inner_product(&cos)?.norm());

    // multiplying by e^{-3it} moves harmonic k to k - 3
    let e = sin.phase_shift(3);
    let support: Vec<i64> = (-4..=4).filter(|&k| e.entry(0, k).norm() > 0.0).collect();
    println!("support of sin(t) e^(-3it): {support:?}");

    let n = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    let p = TrigMatFn::from_harmonics(2, 2, t, [(0, DMatrix::identity(2, 2)), (1, n.scale(0.5) * c(0.0, -1.0)), (-1, n.scale(0.5) * c(0.0, 1.0))])?;
    let pp = p.multiply(&p)?;
    println!("P(1)^2 upper entry {:.12} (2 sin 1 = {:.12})", pp.evaluate(1.0)[(0, 1)].re, 2.0 * 1f64.sin());
    let (short, dropped) = pp.truncate(0);
    println!("dropping harmonics beyond 0 loses {dropped:.3e}; mean term {:.1}", short.evaluate(0.0)[(0, 0)].re);
    Ok(())
}

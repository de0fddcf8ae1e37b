//! Five dominant eigentriples of the 1000-state benchmark from a poor guess.

use std::time::Instant;

use ltp_reduce::dpa::canonicalize_lambda;
use ltp_reduce::hill::ResolventWorkspace;
use ltp_reduce::phv::estimate_fourier_depth;
use ltp_reduce::sadpa::{sadpa_run, SadpaOptions};
use ltp_reduce::systems::{build_example, ExampleSpec};
use num_complex::Complex64;

fn main() -> ltp_reduce::Result<()> {
    let n_want: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let (sys, gt) = build_example(&ExampleSpec::default())?;
    let mut ws = ResolventWorkspace::for_system(&sys);
    let start = Instant::now();
    let k = estimate_fourier_depth(&sys, &mut ws, Complex64::new(1.0, 0.0))?;
    let out = sadpa_run(&sys, &mut ws, &[Complex64::new(-0.1, 0.0)], n_want, k, &SadpaOptions::default())?;
    println!("K = {k}, {} iterations, {:.2?}", out.iterations, start.elapsed());
    for (t, it) in out.triples.iter().zip(&out.found_at) {
        let (lc, _) = canonicalize_lambda(t.lambda, sys.omega());
        println!("  {:>+.10e} {:>+.3e}i  residual {:.1e}  found at {it}", lc.re, lc.im, t.residual);
    }
    println!("rightmost exponents: {:?}", &gt.spectrum_right[..n_want.min(10)]);
    Ok(())
}

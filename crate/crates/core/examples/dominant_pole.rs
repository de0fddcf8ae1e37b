//! Single-shift dominant pole iteration from a handful of starting shifts.

use ltp_reduce::dpa::{canonicalize_lambda, dpa_iterate, DpaOptions};
use ltp_reduce::hill::ResolventWorkspace;
use ltp_reduce::systems::{build_example, ExampleSpec};
use num_complex::Complex64;

fn main() -> ltp_reduce::Result<()> {
    let (sys, _) = build_example(&ExampleSpec::default())?;
    let mut ws = ResolventWorkspace::for_system(&sys);
    for s0 in [Complex64::new(1.0, 0.0), Complex64::new(-0.1, 0.3), Complex64::new(0.0, 1.0)] {
        let (t, trace) = dpa_iterate(&sys, &mut ws, s0, 1, &DpaOptions::default())?;
        let (lc, _) = canonicalize_lambda(t.lambda, sys.omega());
        println!(
            "s0 = {s0:>+.2}: lambda = {:+.12e}{:+.1e}i after {} iterations, residuals {:.1e}/{:.1e}",
            lc.re, lc.im, trace.iterations, t.residual, t.residual_adj
        );
    }
    Ok(())
}

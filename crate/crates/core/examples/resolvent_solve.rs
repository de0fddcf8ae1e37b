//! Harmonic-balance resolvent solves with automatic depth growth.

use ltp_reduce::hill::{resolvent_residual, ResolventWorkspace};
use ltp_reduce::systems::{build_example, ExampleSpec};
use num_complex::Complex64;

fn main() -> ltp_reduce::Result<()> {
    let (sys, _) = build_example(&ExampleSpec::default())?;
    let mut ws = ResolventWorkspace::for_system(&sys);
    for s in [Complex64::new(1.0, 0.0), Complex64::new(-0.05, 2.5), Complex64::new(0.0, 40.0)] {
        let (v, tail) = ws.solve(s, sys.b())?;
        let res = resolvent_residual(sys.a(), s, &v, sys.b())?;
        let d = ws.diagnostics();
        println!(
            "s = {s:>+8.3}: depth {:>3}, tail {tail:.1e}, residual {res:.1e}, {} blocks",
            d.harmonic_depth, d.components
        );
        let (w, _) = ws.solve_adj(s, sys.c())?;
        // <w, (sI - L) v> = <(sI - L)^* w, v>
        println!("           <c, v> = {:+.6e}, <w, b> = {:+.6e}", sys.c().inner_product(&v)?, w.inner_product(sys.b())?);
    }
    Ok(())
}

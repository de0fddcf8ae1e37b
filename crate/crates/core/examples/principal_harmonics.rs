//! Principal harmonic vectors `g_l(s)` and the Fourier depth estimate.

use ltp_reduce::hill::ResolventWorkspace;
use ltp_reduce::phv::{estimate_fourier_depth, eval_htf_entry, eval_phv};
use ltp_reduce::systems::{build_example, ExampleSpec};
use num_complex::Complex64;

fn main() -> ltp_reduce::Result<()> {
    let (sys, _) = build_example(&ExampleSpec::default())?;
    let mut ws = ResolventWorkspace::for_system(&sys);
    let k = estimate_fourier_depth(&sys, &mut ws, Complex64::new(1.0, 0.0))?;
    println!("estimated Fourier depth K = {k}");
    for nu in [1e-3, 1e-1, 1.0, 10.0] {
        let s = Complex64::new(0.0, nu);
        let g = eval_phv(&sys, &mut ws, s, k)?;
        let parts: Vec<String> = (-2 * k as i64..=2 * k as i64).map(|l| format!("{:.3e}", g.get(l).norm())).collect();
        println!("nu = {nu:>6}: |g_l| = [{}]", parts.join(", "));
    }
    let s = Complex64::new(0.0, 0.5);
    println!("G_(1,0)(0.5i) = {:.6e}", eval_htf_entry(&sys, &mut ws, s, 1, 0, k)?);
    Ok(())
}

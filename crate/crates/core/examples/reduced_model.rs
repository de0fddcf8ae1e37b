//! From eigentriples to a ROM, its LTI extension and the dominance table.

use ltp_reduce::hill::ResolventWorkspace;
use ltp_reduce::rom::{build_rom, LtiExtension, PartialFloquet};
use ltp_reduce::sadpa::{sadpa_run, SadpaOptions};
use ltp_reduce::systems::{build_example, ExampleSpec};
use num_complex::Complex64;

fn main() -> ltp_reduce::Result<()> {
    let (sys, gt) = build_example(&ExampleSpec::default())?;
    let mut ws = ResolventWorkspace::for_system(&sys);
    let out = sadpa_run(&sys, &mut ws, &[Complex64::new(-0.1, 0.0)], 6, 1, &SadpaOptions::default())?;
    let pf = PartialFloquet::from_triples(&out.triples)?;
    println!("partial transform of rank {}, constancy error {:.1e}", pf.r(), pf.constancy_error(64));
    let rom = build_rom(&pf, &sys)?;
    let ext = LtiExtension::from_rom(&rom, 1)?;
    println!("extension: order {}, {} channels", ext.order(), ext.channels());
    for row in ext.dominance_table()? {
        println!("  lambda {:+.4e}  hext {:.3e}  g {:.3e}", row.lambda.re, row.degdom_hext, row.degdom_g);
    }
    let full = LtiExtension::from_ground_truth(&gt, 1)?;
    let s = Complex64::new(0.0, 0.01);
    let diff = (full.eval(s)? - ext.eval(s)?).norm() / full.eval(s)?.norm();
    println!("relative mismatch with the full extension at s = 0.01i: {diff:.2e}");
    println!("a priori bound for keeping 6 of {} modes: {:.3e}", full.order(), full.truncation_error_bound(6)?);
    Ok(())
}

//! Relative sampled `H_inf` error of dominant-pole truncation and balanced
//! truncation on the benchmark's LTI extension, orders 1 to 10, plus the
//! error of the ROM built from SADPA eigentriples.

use ltp_reduce::eval::{balanced_truncation, sampled_hinf_error, sampled_hinf_norm, FrequencyGrid};
use ltp_reduce::hill::ResolventWorkspace;
use ltp_reduce::rom::{build_rom, LtiExtension, PartialFloquet};
use ltp_reduce::sadpa::{sadpa_run, SadpaOptions};
use ltp_reduce::systems::{build_example, ExampleSpec};
use num_complex::Complex64;

fn main() -> ltp_reduce::Result<()> {
    let (sys, gt) = build_example(&ExampleSpec::default())?;
    let full = LtiExtension::from_ground_truth(&gt, 1)?;
    let grid = FrequencyGrid::default();
    let norm = sampled_hinf_norm(&full, &grid)?.value;
    println!("||H_ext||_inf = {norm:.6e}");
    println!("order  dominant-pole  balanced");
    for r in 1..=10 {
        let dpt = sampled_hinf_error(&full, &full.dominant_truncation(r)?, &grid)?.value / norm;
        let bt = balanced_truncation(&full, r)?;
        let bte = sampled_hinf_error(&full, &bt.reduced, &grid)?.value / norm;
        println!("{r:>5}  {dpt:.6e}   {bte:.6e}");
    }

    let mut ws = ResolventWorkspace::for_system(&sys);
    let out = sadpa_run(&sys, &mut ws, &[Complex64::new(-0.1, 0.0)], 10, 1, &SadpaOptions::default())?;
    let rom = build_rom(&PartialFloquet::from_triples(&out.triples)?, &sys)?;
    let ext = LtiExtension::from_rom(&rom, 1)?;
    let e = sampled_hinf_error(&full, &ext, &grid)?;
    println!("SADPA r = 10: relative error {:.6e} at nu = {:.4e}", e.value / norm, e.nu_peak);
    Ok(())
}

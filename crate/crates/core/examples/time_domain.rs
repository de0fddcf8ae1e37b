//! Output of the 10-mode ROM against the closed-form benchmark response for
//! `u(t) = e^{-t}` on `[0, 20]`.

use ltp_reduce::eval::{relative_error, simulate_fom_example, simulate_rom, uniform_grid, InputSignal};
use ltp_reduce::hill::ResolventWorkspace;
use ltp_reduce::rom::{build_rom, PartialFloquet};
use ltp_reduce::sadpa::{sadpa_run, SadpaOptions};
use ltp_reduce::systems::{build_example, ExampleSpec};
use num_complex::Complex64;

fn main() -> ltp_reduce::Result<()> {
    let (sys, gt) = build_example(&ExampleSpec::default())?;
    let mut ws = ResolventWorkspace::for_system(&sys);
    let out = sadpa_run(&sys, &mut ws, &[Complex64::new(-0.1, 0.0)], 10, 1, &SadpaOptions::default())?;
    let rom = build_rom(&PartialFloquet::from_triples(&out.triples)?, &sys)?;

    let u = InputSignal::exponential(-1.0);
    let grid = uniform_grid(20.0, 2000);
    let y = simulate_fom_example(&gt, &u, &grid)?;
    let yr = simulate_rom(&rom, &u, &grid, 1e-12)?;
    let err = relative_error(&y.y, &yr.y)?;
    println!("max pointwise relative error  {:.4}", err.max);
    println!("mean pointwise relative error {:.5}", err.mean);
    for j in (0..grid.len()).step_by(200) {
        println!("t = {:>6.2}  y = {:+.6e}  y_r = {:+.6e}", grid[j], y.y[j].re, yr.y[j].re);
    }
    Ok(())
}

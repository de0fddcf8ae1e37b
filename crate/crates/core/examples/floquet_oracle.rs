//! Dense Hill and monodromy oracles on a small random system.

use ltp_reduce::eval::dense_floquet_oracle;
use ltp_reduce::systems::random_system;

fn main() -> ltp_reduce::Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let sys = random_system(6, 2, seed)?;
    let report = dense_floquet_oracle(&sys)?;
    println!("Hill truncation -{0}..{0}, agreement {1:.2e}", report.hill_depth, report.agreement);
    for (t, m) in report.triples.iter().zip(&report.monodromy_exponents) {
        println!(
            "  hill {:+.10e}{:+.6e}i  monodromy {:+.10e}{:+.6e}i  residual {:.1e}",
            t.lambda.re, t.lambda.im, m.re, m.im, t.residual
        );
    }
    Ok(())
}

//! The benchmark with `P(t) = I + sin(t) N`: known exponents and the
//! closed-form Floquet factors.

use ltp_reduce::hill::apply_l;
use ltp_reduce::systems::{build_example, ExampleSpec};

fn main() -> ltp_reduce::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1000);
    let (sys, gt) = build_example(&ExampleSpec::with_n(n))?;
    println!("n = {}, period = {:.6}, depth of A(t) = {}", sys.n(), sys.period(), sys.a().depth());
    println!("rightmost exponents: {:?}", gt.spectrum_right);

    // columns of P solve L p = lambda p with lambda from R
    let p = gt.p.clone();
    let worst = gt.order_by_decay()[..gt.spectrum_right.len()]
        .iter()
        .map(|&j| {
            let col = p.column(j);
            let lp = apply_l(sys.a(), &col).unwrap();
            lp.sub(&col.scale(gt.r[j].into())).unwrap().norm() / col.norm()
        })
        .fold(0.0, f64::max);
    println!("max ||L p_j - lambda_j p_j|| / ||p_j|| over those modes: {worst:.2e}");
    let id = gt.q().adjoint().multiply(&p)?;
    println!("||Q^H P - I|| at t = 0.3: {:.2e}", (id.evaluate(0.3) - nalgebra::DMatrix::identity(n, n)).norm());
    Ok(())
}

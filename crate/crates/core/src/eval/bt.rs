//! Square-root balanced truncation of a diagonal LTI extension.
//!
//! With `C_out = C^*`, the Gramians solve diagonal Lyapunov equations in
//! closed form:
//!
//! ```text
//! P_ij = -(B B^*)_ij / (lambda_i + conj(lambda_j)),
//! Q_ij = -(C C^*)_ij / (conj(lambda_i) + lambda_j).
//! ```

use log::warn;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eig, pivoted_cholesky};
use crate::rom::LtiExtension;

/// Pivoted Cholesky stops once the remaining diagonal falls below this
/// fraction of the largest Gramian entry.
pub const GRAMIAN_RANK_TOL: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct BtResult {
    /// Hankel singular values, non-increasing.
    pub hsv: Vec<f64>,
    /// Balanced and truncated model, rediagonalized.
    pub reduced: LtiExtension,
}

fn check_stable(ext: &LtiExtension) -> Result<()> {
    match ext.lambdas.iter().find(|l| !(l.re < 0.0)) {
        Some(&l) => Err(Error::UnstableMode(l)),
        None => Ok(()),
    }
}

/// Controllability and observability Gramians.
pub fn gramians(ext: &LtiExtension) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>)> {
    check_stable(ext)?;
    let l = &ext.lambdas;
    let bb = &ext.bhat * ext.bhat.adjoint();
    let cc = &ext.chat * ext.chat.adjoint();
    let n = l.len();
    let p = DMatrix::from_fn(n, n, |i, j| -bb[(i, j)] / (l[i] + l[j].conj()));
    let q = DMatrix::from_fn(n, n, |i, j| -cc[(i, j)] / (l[i].conj() + l[j]));
    Ok((p, q))
}

struct Balanced {
    zp: DMatrix<Complex64>,
    zq: DMatrix<Complex64>,
    u: DMatrix<Complex64>,
    v_t: DMatrix<Complex64>,
    hsv: Vec<f64>,
}

fn balance(ext: &LtiExtension) -> Result<Balanced> {
    let (p, q) = gramians(ext)?;
    let zp = pivoted_cholesky(&p, GRAMIAN_RANK_TOL);
    let zq = pivoted_cholesky(&q, GRAMIAN_RANK_TOL);
    if zp.ncols() == 0 || zq.ncols() == 0 {
        return Ok(Balanced {
            u: DMatrix::zeros(zq.ncols(), 0),
            v_t: DMatrix::zeros(0, zp.ncols()),
            zp,
            zq,
            hsv: Vec::new(),
        });
    }
    let svd = (zq.adjoint() * &zp).svd(true, true);
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let u_all = svd.u.expect("requested");
    let vt_all = svd.v_t.expect("requested");
    let u = DMatrix::from_fn(u_all.nrows(), order.len(), |i, j| u_all[(i, order[j])]);
    let v_t = DMatrix::from_fn(order.len(), vt_all.ncols(), |i, j| vt_all[(order[i], j)]);
    let hsv = order.iter().map(|&j| svd.singular_values[j]).collect();
    Ok(Balanced { zp, zq, u, v_t, hsv })
}

pub fn hankel_singular_values(ext: &LtiExtension) -> Result<Vec<f64>> {
    Ok(balance(ext)?.hsv)
}

/// Balance and keep `r` states. If the Gramian factors have lower
/// numerical rank than `r`, the order is reduced to that rank.
pub fn balanced_truncation(ext: &LtiExtension, r: usize) -> Result<BtResult> {
    if r == 0 {
        return Err(Error::InvalidArgument("balanced truncation needs r >= 1".into()));
    }
    let bal = balance(ext)?;
    let positive = bal.hsv.iter().take_while(|&&s| s > 0.0).count();
    let r_eff = r.min(positive);
    if r_eff == 0 {
        return Err(Error::InvalidArgument("extension has no controllable and observable states".into()));
    }
    if r_eff < r {
        warn!("balanced truncation order reduced from {r} to numerical rank {r_eff}");
    }
    let scale: Vec<Complex64> = bal.hsv[..r_eff].iter().map(|s| Complex64::new(s.powf(-0.5), 0.0)).collect();
    let mut t = &bal.zp * bal.v_t.rows(0, r_eff).adjoint();
    let mut w = &bal.zq * bal.u.columns(0, r_eff);
    for (j, s) in scale.iter().enumerate() {
        t.column_mut(j).scale_mut(s.re);
        w.column_mut(j).scale_mut(s.re);
    }
    let lambda_t = DMatrix::from_fn(t.nrows(), r_eff, |i, j| ext.lambdas[i] * t[(i, j)]);
    let ar = w.adjoint() * lambda_t;
    let br = w.adjoint() * &ext.bhat;
    // C_out = C^*, so C_out T = (T^* C)^*
    let cr_h = t.adjoint() * &ext.chat;

    let e = eig(&ar)?;
    let x = e.right;
    let x_inv = x.clone().lu().try_inverse().ok_or(Error::Singular)?;
    let bhat = &x_inv * br;
    let chat = x.adjoint() * cr_h;
    if let Some(&l) = e.values.iter().find(|l| !(l.re < 0.0)) {
        return Err(Error::UnstableMode(l));
    }
    Ok(BtResult {
        hsv: bal.hsv,
        reduced: LtiExtension::new(e.values, bhat, chat, ext.omega)?.with_depth(ext.k)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::hinf::{sampled_hinf_error, sampled_hinf_norm, FrequencyGrid};
    use crate::systems::{build_example, ExampleSpec};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn small_ext() -> LtiExtension {
        let lambdas = vec![c(-0.5, 0.3), c(-1.0, 0.0), c(-2.0, -1.0)];
        let bhat = DMatrix::from_row_slice(3, 3, &[c(1.0, 0.0), c(0.2, 0.1), c(0.0, 0.3), c(0.5, 0.0), c(1.0, 0.0), c(0.1, 0.0), c(0.0, -0.2), c(0.3, 0.0), c(1.0, 0.0)]);
        let chat = DMatrix::from_row_slice(3, 3, &[c(0.7, 0.0), c(0.0, 0.1), c(0.2, 0.0), c(0.1, 0.0), c(0.9, 0.2), c(0.0, 0.0), c(0.3, 0.0), c(0.0, 0.0), c(0.6, -0.1)]);
        LtiExtension::new(lambdas, bhat, chat, 1.0).unwrap()
    }

    #[test]
    fn gramians_solve_lyapunov() {
        let ext = small_ext();
        let (p, q) = gramians(&ext).unwrap();
        let lam = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(ext.lambdas.clone()));
        let rp = &lam * &p + &p * lam.adjoint() + &ext.bhat * ext.bhat.adjoint();
        let rq = lam.adjoint() * &q + &q * &lam + &ext.chat * ext.chat.adjoint();
        assert!(rp.norm() < 1e-13 && rq.norm() < 1e-13);
    }

    #[test]
    fn full_order_reproduces_model() {
        let ext = small_ext();
        let bt = balanced_truncation(&ext, 3).unwrap();
        let e = sampled_hinf_error(&ext, &bt.reduced, &FrequencyGrid::default()).unwrap();
        assert!(e.value < 1e-12, "{}", e.value);
        assert!(bt.hsv.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn error_is_within_twice_the_hsv_tail() {
        let ext = small_ext();
        let bt = balanced_truncation(&ext, 1).unwrap();
        let e = sampled_hinf_error(&ext, &bt.reduced, &FrequencyGrid::default()).unwrap();
        let tail: f64 = bt.hsv[1..].iter().sum();
        assert!(e.value <= 2.0 * tail * (1.0 + 1e-8));
        assert!(e.value >= bt.hsv[1] * (1.0 - 1e-6));
    }

    #[test]
    fn unstable_mode_is_rejected() {
        let mut ext = small_ext();
        ext.lambdas[1] = c(0.0, 1.0);
        assert!(matches!(balanced_truncation(&ext, 1), Err(Error::UnstableMode(_))));
    }

    #[test]
    fn example_bt_beats_half_the_norm_at_order_two() {
        let (_, gt) = build_example(&ExampleSpec::with_n(12)).unwrap();
        let ext = LtiExtension::from_ground_truth(&gt, 1).unwrap();
        let bt = balanced_truncation(&ext, 2).unwrap();
        let grid = FrequencyGrid::default();
        let e = sampled_hinf_error(&ext, &bt.reduced, &grid).unwrap().value;
        assert!(e < 0.5 * sampled_hinf_norm(&ext, &grid).unwrap().value);
    }
}

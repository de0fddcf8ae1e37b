//! Full Floquet decomposition of small systems, computed two independent
//! ways: eigenvectors of a dense truncated Hill matrix, and the logarithm of
//! the monodromy matrix.

use log::warn;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::dpa::{canonicalize_lambda, family_distance, Eigentriple};
use crate::error::{Error, Result};
use crate::eval::radau::{monodromy, RadauOptions};
use crate::hill::{hill_matrix, ResolventWorkspace};
use crate::linalg::eig;
use crate::systems::LtpSystem;
use crate::trigfun::{TrigMatFn, TrigVecFn};

/// Largest state dimension the oracle accepts.
pub const MAX_ORACLE_DIM: usize = 16;
/// Dense Hill matrices are kept at or below this size when possible.
pub const MAX_HILL_SIZE: usize = 400;
/// `|q(0)^* p(0)|` below this (for unit vectors) flags a nearly defective
/// eigenvalue.
pub const DEFECTIVE_WARN: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    /// Canonicalized eigentriples from the Hill eigendecomposition, sorted
    /// by decreasing real part.
    pub triples: Vec<Eigentriple>,
    /// Canonicalized exponents from the monodromy matrix, same order.
    pub monodromy_exponents: Vec<Complex64>,
    /// Largest family distance between matched exponents.
    pub agreement: f64,
    /// Harmonic truncation `-M..M` of the dense Hill matrix.
    pub hill_depth: usize,
}

impl OracleReport {
    pub fn exponents(&self) -> Vec<Complex64> {
        self.triples.iter().map(|t| t.lambda).collect()
    }

    /// Family distance from `lambda` to the nearest oracle exponent.
    pub fn distance_to_spectrum(&self, lambda: Complex64, omega: f64) -> f64 {
        self.triples
            .iter()
            .map(|t| family_distance(t.lambda, lambda, omega))
            .fold(f64::INFINITY, f64::min)
    }
}

/// `M = 4 N_h`, lowered so that the dense matrix has at most
/// [`MAX_HILL_SIZE`] rows but never below `N_h`.
pub fn oracle_hill_depth(sys: &LtpSystem) -> usize {
    let nh = ResolventWorkspace::for_system(sys).harmonic_depth();
    let cap = (MAX_HILL_SIZE / sys.n()).saturating_sub(1) / 2;
    (4 * nh).min(cap).max(nh)
}

fn sort_by_real_part_desc(v: &mut [Complex64]) {
    v.sort_by(|a, b| b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im)));
}

/// Floquet exponents `log(eig Phi(T)) / T`, canonicalized.
pub fn monodromy_exponents(a: &TrigMatFn, opts: &RadauOptions) -> Result<Vec<Complex64>> {
    let phi = monodromy(a, opts)?;
    let period = a.period();
    let mut out: Vec<Complex64> = eig(&phi)?
        .values
        .iter()
        .map(|mu| canonicalize_lambda(mu.ln() / period, a.omega()).0)
        .collect();
    sort_by_real_part_desc(&mut out);
    Ok(out)
}

/// Largest family distance under a greedy one-to-one matching.
pub fn match_spectra(a: &[Complex64], b: &[Complex64], omega: f64) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for &x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, &y)| (j, family_distance(x, y, omega)))
            .fold((usize::MAX, f64::INFINITY), |acc, c| if c.1 < acc.1 { c } else { acc });
        if j == usize::MAX {
            return f64::INFINITY;
        }
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

/// Dense Floquet oracle: one eigentriple per family, plus the monodromy
/// cross-check.
pub fn dense_floquet_oracle(sys: &LtpSystem) -> Result<OracleReport> {
    let n = sys.n();
    if n > MAX_ORACLE_DIM {
        return Err(Error::InvalidArgument(format!(
            "dense oracle supports n <= {MAX_ORACLE_DIM}, got {n}"
        )));
    }
    let a = sys.a();
    let omega = sys.omega();
    let m = oracle_hill_depth(sys);
    let h = 2 * m + 1;
    let l_mat = -hill_matrix(a, Complex64::new(0.0, 0.0), m);
    let e = eig(&l_mat)?;

    // Each family appears once per harmonic shift; the member whose
    // eigenvector is centered on harmonic 0 is resolved best.
    let center = |x: nalgebra::DVectorView<Complex64>| -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for k in 0..h {
            let w: f64 = x.rows(k * n, n).norm_squared();
            num += (k as f64 - m as f64) * w;
            den += w;
        }
        (num / den).abs()
    };
    let mut order: Vec<(usize, f64)> = (0..n * h).map(|j| (j, center(e.right.column(j)))).collect();
    order.sort_by(|x, y| x.1.total_cmp(&y.1));
    let mut picked: Vec<usize> = Vec::with_capacity(n);
    let sep = 1e-8 * (1.0 + e.values.iter().map(|z| z.norm()).fold(0.0, f64::max).min(omega));
    for (j, _) in order {
        if picked.len() == n {
            break;
        }
        if picked.iter().all(|&i| family_distance(e.values[i], e.values[j], omega) > sep) {
            picked.push(j);
        }
    }
    if picked.len() < n {
        warn!("dense oracle found only {} distinct families for n = {n}", picked.len());
    }

    let to_fn = |x: nalgebra::DVectorView<Complex64>| TrigVecFn::new(sys.period(), DMatrix::from_column_slice(n, h, x.as_slice()));
    let mut triples = Vec::with_capacity(picked.len());
    for &j in &picked {
        let v = to_fn(e.right.column(j))?;
        let w = to_fn(e.left.column(j))?;
        let beta = v.evaluate(0.0).dotc(&w.evaluate(0.0)).norm() / (v.norm() * w.norm());
        if beta < DEFECTIVE_WARN {
            warn!("oracle eigenvalue {} looks defective (|q(0)^* p(0)| = {beta:.2e})", e.values[j]);
        }
        triples.push(Eigentriple::from_vectors(e.values[j], &v, &w, a)?.canonicalized());
    }
    triples.sort_by(|x, y| y.lambda.re.total_cmp(&x.lambda.re).then(x.lambda.im.total_cmp(&y.lambda.im)));

    let opts = RadauOptions {
        rtol: 1e-12,
        atol: 1e-14,
        ..Default::default()
    };
    let monodromy_exponents = monodromy_exponents(a, &opts)?;
    let hill: Vec<Complex64> = triples.iter().map(|t| t.lambda).collect();
    let agreement = match_spectra(&hill, &monodromy_exponents, omega);
    Ok(OracleReport {
        triples,
        monodromy_exponents,
        agreement,
        hill_depth: m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{build_example, random_system, ExampleSpec};

    #[test]
    fn lti_exponents_are_matrix_eigenvalues() {
        let a0 = DMatrix::from_row_slice(2, 2, &[-1.0, 2.0, -3.0, -0.5]).map(|x| Complex64::new(x, 0.0));
        let a = TrigMatFn::constant(1.0, a0.clone()).unwrap();
        let one = TrigVecFn::constant(1.0, &nalgebra::DVector::from_element(2, Complex64::new(1.0, 0.0)));
        let sys = LtpSystem::new(a, one.clone(), one).unwrap();
        let rep = dense_floquet_oracle(&sys).unwrap();
        let want: Vec<Complex64> = eig(&a0).unwrap().values;
        assert!(match_spectra(&rep.exponents(), &want, sys.omega()) < 1e-10);
        assert!(rep.agreement < 1e-8, "{}", rep.agreement);
    }

    #[test]
    fn example_exponents_are_diag_r() {
        let (sys, gt) = build_example(&ExampleSpec {
            n: 4,
            n_slow: 4,
            slow_range: [-2.0, 0.0],
            fast_range: [3.0, 6.0],
        })
        .unwrap();
        let rep = dense_floquet_oracle(&sys).unwrap();
        assert!(match_spectra(&rep.exponents(), &gt.lambdas(), sys.omega()) < 1e-10);
        assert!(rep.agreement < 1e-8);
        for t in &rep.triples {
            assert!(t.residual < 1e-10 && t.residual_adj < 1e-10);
            assert!(t.constancy_error(64) < 1e-10);
        }
    }

    #[test]
    fn random_depth_one_cross_check() {
        let sys = random_system(3, 1, 7).unwrap();
        let rep = dense_floquet_oracle(&sys).unwrap();
        assert_eq!(rep.triples.len(), 3);
        assert!(rep.agreement < 1e-6, "{}", rep.agreement);
    }

    #[test]
    fn matching_handles_shifted_families() {
        let w = 1.0;
        let a = [Complex64::new(-1.0, 0.2), Complex64::new(-2.0, 0.0)];
        let b = [Complex64::new(-2.0, 3.0), Complex64::new(-1.0, 0.2 - 5.0)];
        assert!(match_spectra(&a, &b, w) < 1e-14);
    }

    #[test]
    fn rejects_large_systems() {
        let sys = random_system(17, 0, 1).unwrap();
        assert!(matches!(dense_floquet_oracle(&sys), Err(Error::InvalidArgument(_))));
    }
}

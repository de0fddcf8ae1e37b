//! Low-rank pivoted Cholesky for Hermitian positive semidefinite matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Factor `A ~ Z Z^H`, stopping once the largest remaining diagonal entry
/// drops below `rel_tol` times the largest initial one.
pub fn pivoted_cholesky(a: &DMatrix<Complex64>, rel_tol: f64) -> DMatrix<Complex64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let mut d: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let dmax0 = d.iter().cloned().fold(0.0, f64::max);
    let mut cols: Vec<Vec<Complex64>> = Vec::new();
    let mut used = vec![false; n];
    if dmax0 <= 0.0 {
        return DMatrix::zeros(n, 0);
    }
    while cols.len() < n {
        let (p, dp) = d
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .fold((usize::MAX, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        if p == usize::MAX || dp <= rel_tol * dmax0 {
            break;
        }
        used[p] = true;
        let root = dp.sqrt();
        let mut l: Vec<Complex64> = (0..n).map(|i| a[(i, p)]).collect();
        for c in &cols {
            let cp = c[p].conj();
            for (li, ci) in l.iter_mut().zip(c) {
                *li -= ci * cp;
            }
        }
        for (i, li) in l.iter_mut().enumerate() {
            if used[i] && i != p {
                *li = Complex64::new(0.0, 0.0);
            } else {
                *li /= root;
            }
        }
        l[p] = Complex64::new(root, 0.0);
        for (i, li) in l.iter().enumerate() {
            if !used[i] {
                d[i] -= li.norm_sqr();
            }
        }
        cols.push(l);
    }
    DMatrix::from_fn(n, cols.len(), |i, j| cols[j][i])
}

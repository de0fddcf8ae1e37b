//! Randomized invariants of the coefficient arithmetic, the operator and
//! its resolvent.

use std::f64::consts::PI;

use ltp_reduce::cli::{fmt_f64, parse_complex};
use ltp_reduce::dpa::{canonicalize_lambda, family_distance};
use ltp_reduce::hill::{apply_l, apply_l_adj, ResolventWorkspace};
use ltp_reduce::systems::random_system;
use ltp_reduce::trigfun::{TrigMatFn, TrigVecFn};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

type C = Complex64;

fn cplx() -> impl Strategy<Value = C> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C::new(re, im))
}

fn vec_fn(dim: usize, depth: usize) -> impl Strategy<Value = TrigVecFn> {
    proptest::collection::vec(cplx(), dim * (2 * depth + 1))
        .prop_map(move |c| TrigVecFn::new(2.0 * PI, DMatrix::from_vec(dim, 2 * depth + 1, c)).unwrap())
}

fn mat_fn(rows: usize, cols: usize, depth: usize) -> impl Strategy<Value = TrigMatFn> {
    proptest::collection::vec(cplx(), rows * cols * (2 * depth + 1)).prop_map(move |c| {
        let blocks = c.chunks(rows * cols).map(|b| DMatrix::from_column_slice(rows, cols, b)).collect();
        TrigMatFn::new(2.0 * PI, blocks).unwrap()
    })
}

fn pair(max_dim: usize, max_depth: usize) -> impl Strategy<Value = (TrigVecFn, TrigVecFn)> {
    (1..=max_dim, 0..=max_depth, 0..=max_depth).prop_flat_map(|(n, d1, d2)| (vec_fn(n, d1), vec_fn(n, d2)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval(v in (1..=4usize, 0..=5usize).prop_flat_map(|(n, d)| vec_fn(n, d))) {
        let sum: f64 = v.coeffs().iter().map(|z| z.norm_sqr()).sum();
        let ip = v.inner_product(&v).unwrap();
        prop_assert!((ip.re - sum).abs() <= 1e-13 * sum);
        prop_assert!((v.norm() * v.norm() - sum).abs() <= 1e-13 * sum.max(1e-300));
    }

    #[test]
    fn inner_product_matches_quadrature((w, v) in pair(3, 4)) {
        let pts = 64;
        let q: C = (0..pts)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / pts as f64;
                w.evaluate(t).dotc(&v.evaluate(t))
            })
            .sum::<C>() / pts as f64;
        // trapezoid on 64 points is exact for depth <= 31
        prop_assert!((q - w.inner_product(&v).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn pointwise_adjoint_consistency(
        (m, w, v) in (1..=3usize, 1..=3usize, 0..=2usize)
            .prop_flat_map(|(r, c, d)| (mat_fn(r, c, d), vec_fn(r, 2), vec_fn(c, 3)))
    ) {
        let lhs = m.adjoint().apply(&w).unwrap().inner_product(&v).unwrap();
        let rhs = w.inner_product(&m.apply(&v).unwrap()).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(rhs.norm()).max(1.0));
    }

    #[test]
    fn product_is_pointwise(
        (a, b, t) in (1..=3usize, 0..=3usize, 0..=3usize)
            .prop_flat_map(|(n, da, db)| (mat_fn(n, n, da), mat_fn(n, n, db), 0.0..(2.0 * PI)))
    ) {
        let ab = a.multiply(&b).unwrap();
        prop_assert!(ab.depth() <= a.depth() + b.depth());
        let want = a.evaluate(t) * b.evaluate(t);
        let got = ab.evaluate(t);
        prop_assert!((got - &want).norm() <= 1e-12 * want.norm().max(1.0));
    }

    #[test]
    fn derivative_commutes_with_phase_shift(
        v in (1..=3usize, 0..=4usize).prop_flat_map(|(n, d)| vec_fn(n, d)),
        l in -3i64..=3,
    ) {
        let lhs = v.phase_shift(l).differentiate();
        let shifted_derivative = v.differentiate().phase_shift(l);
        let rhs = shifted_derivative.add_scaled(C::new(0.0, -(l as f64)), &v.phase_shift(l)).unwrap();
        // i omega (k - l) c against i omega k c - i omega l c: equal up to rounding
        let scale = (v.depth() as f64 + l.abs() as f64 + 1.0) * v.coeffs().iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(lhs.max_coeff_diff(&rhs).unwrap() <= 4.0 * f64::EPSILON * scale);
        prop_assert_eq!(&v.phase_shift(l).phase_shift(-l).trim_exact(), &v.trim_exact());
    }

    #[test]
    fn truncation_reports_the_dropped_tail(
        v in (1..=3usize, 0..=5usize).prop_flat_map(|(n, d)| vec_fn(n, d)),
        keep in 0usize..=5,
    ) {
        let (kept, tail) = v.truncate(keep);
        let m = v.depth() as i64;
        let want: f64 = (-m..=m)
            .filter(|k| k.unsigned_abs() as usize > keep)
            .map(|k| v.coeff(k).norm_squared())
            .sum::<f64>()
            .sqrt();
        prop_assert!((tail - want).abs() <= 1e-14 * v.norm().max(1.0));
        prop_assert!(kept.depth() <= keep);
    }

    #[test]
    fn operator_adjoint_identity(
        (seed, depth, v, w) in (1..=5usize, 0..=3usize, 0..=3usize)
            .prop_flat_map(|(n, dv, dw)| (0u64..10_000, 0..=2usize, vec_fn(n, dv), vec_fn(n, dw)))
    ) {
        let sys = random_system(v.dim(), depth, seed).unwrap();
        let lhs = w.inner_product(&apply_l(sys.a(), &v).unwrap()).unwrap();
        let rhs = apply_l_adj(sys.a(), &w).unwrap().inner_product(&v).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-11 * lhs.norm().max(rhs.norm()).max(1e-300));
    }

    #[test]
    fn resolvent_round_trip_and_shift_family(
        (seed, n, depth) in (0u64..10_000, 1..=4usize, 0..=2usize),
        re in 0.05..1.0f64,
        im in -2.0..2.0f64,
        k in -2i64..=2,
    ) {
        let sys = random_system(n, depth, seed).unwrap();
        let s = C::new(re, im);
        let mut ws = ResolventWorkspace::for_system(&sys);
        let (v, _) = ws.solve(s, sys.b()).unwrap();
        let r = v.scale(s).sub(&apply_l(sys.a(), &v).unwrap()).unwrap().sub(sys.b()).unwrap();
        prop_assert!(r.norm() < 1e-10 * sys.b().norm());

        // shifting the solution moves it to the shift s + i omega k
        let sk = s + C::new(0.0, sys.omega() * k as f64);
        let vk = v.phase_shift(k);
        let rk = vk.scale(sk).sub(&apply_l(sys.a(), &vk).unwrap()).unwrap().sub(&sys.b().phase_shift(k)).unwrap();
        prop_assert!(rk.norm() < 1e-10 * sys.b().norm());
    }

    #[test]
    fn canonical_representative(re in -5.0..1.0f64, im in -40.0..40.0f64, omega in 0.5..3.0f64) {
        let l = C::new(re, im);
        let (c, k) = canonicalize_lambda(l, omega);
        prop_assert!(c.im > -0.5 * omega - 1e-12 && c.im <= 0.5 * omega + 1e-12);
        prop_assert!((c + C::new(0.0, omega * k as f64) - l).norm() < 1e-12);
        prop_assert!(family_distance(c, l, omega) < 1e-12);
    }

    #[test]
    fn csv_floats_round_trip(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
        prop_assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn complex_parsing_round_trip(re in -1e3..1e3f64, im in -1e3..1e3f64) {
        let z = parse_complex(&format!("{re},{im}")).unwrap();
        prop_assert_eq!(z, C::new(re, im));
        let sign = if im < 0.0 { "-" } else { "+" };
        let z = parse_complex(&format!("{re}{sign}{}i", im.abs())).unwrap();
        prop_assert_eq!(z, C::new(re, im));
    }
}

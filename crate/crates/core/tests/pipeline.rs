//! End-to-end library paths on the benchmark and small random systems.

use ltp_reduce::dpa::{canonicalize_lambda, family_distance};
use ltp_reduce::eval::hinf::{sampled_hinf_error, sampled_hinf_norm, FrequencyGrid};
use ltp_reduce::eval::oracle::dense_floquet_oracle;
use ltp_reduce::eval::radau::{simulate_fom_dense, RadauOptions};
use ltp_reduce::eval::sim::l2_norm_sampled;
use ltp_reduce::eval::{relative_error, simulate_fom_example, simulate_rom, uniform_grid, InputSignal};
use ltp_reduce::hill::ResolventWorkspace;
use ltp_reduce::phv::estimate_fourier_depth;
use ltp_reduce::rom::{build_rom, LtiExtension, PartialFloquet};
use ltp_reduce::sadpa::{sadpa_run, SadpaOptions};
use ltp_reduce::systems::{build_example, random_system, ExampleSpec};
use num_complex::Complex64;

type C = Complex64;

fn small_spec() -> ExampleSpec {
    ExampleSpec {
        n: 4,
        n_slow: 4,
        slow_range: [-2.0, 0.0],
        fast_range: [3.0, 6.0],
    }
}

#[test]
fn sadpa_finds_the_rightmost_oracle_eigenvalues() {
    let (sys, _) = build_example(&small_spec()).unwrap();
    let oracle = dense_floquet_oracle(&sys).unwrap();
    let mut ws = ResolventWorkspace::for_system(&sys);
    let out = sadpa_run(&sys, &mut ws, &[C::new(-0.1, 0.0)], 2, 1, &SadpaOptions::default()).unwrap();
    let omega = sys.omega();
    for t in &out.triples {
        let l = canonicalize_lambda(t.lambda, omega).0;
        let hit = oracle.triples[..2].iter().any(|o| family_distance(o.lambda, l, omega) < 1e-6);
        assert!(hit, "{l} is not among the two rightmost oracle exponents");
    }
}

/// Reducing by SADPA and building the ROM gives the same model as a full
/// Floquet transform followed by dominant truncation.
#[test]
fn sadpa_rom_equals_truncated_full_transform() {
    for seed in [3u64, 5, 8] {
        let sys = random_system(4, 1, seed).unwrap();
        let oracle = dense_floquet_oracle(&sys).unwrap();
        let full_rom = build_rom(&PartialFloquet::from_triples(&oracle.triples).unwrap(), &sys).unwrap();
        let k = full_rom.br.depth().max(full_rom.cr.depth());
        let full = LtiExtension::from_rom(&full_rom, k).unwrap();

        let mut ws = ResolventWorkspace::for_system(&sys);
        let kp = estimate_fourier_depth(&sys, &mut ws, C::new(1.0, 0.0)).unwrap();
        let opts = SadpaOptions {
            tol: 1e-10,
            ..Default::default()
        };
        let out = sadpa_run(&sys, &mut ws, &[C::new(0.0, 0.0)], 2, kp, &opts).unwrap();
        let rom = build_rom(&PartialFloquet::from_triples(&out.triples).unwrap(), &sys).unwrap();
        let red = LtiExtension::from_rom(&rom, rom.br.depth().max(rom.cr.depth())).unwrap();

        let omega = sys.omega();
        let idx: Vec<usize> = out
            .triples
            .iter()
            .map(|t| {
                (0..full.order())
                    .min_by(|&i, &j| {
                        family_distance(full.lambdas[i], t.lambda, omega)
                            .total_cmp(&family_distance(full.lambdas[j], t.lambda, omega))
                    })
                    .unwrap()
            })
            .collect();
        let kept = full.select(&idx);
        let kk = kept.k.max(red.k);
        let (kept, red) = (kept.with_depth(kk).unwrap(), red.with_depth(kk).unwrap());
        for s in [C::new(0.3, 0.0), C::new(0.1, 0.7), C::new(1.0, -2.0)] {
            let a = kept.eval(s).unwrap();
            let b = red.eval(s).unwrap();
            assert!((&a - &b).norm() < 1e-6 * a.norm(), "seed {seed}: {}", (&a - &b).norm() / a.norm());
        }
    }
}

#[test]
fn error_bound_dominates_sampled_error() {
    let (_, gt) = build_example(&ExampleSpec::with_n(40)).unwrap();
    let full = LtiExtension::from_ground_truth(&gt, 1).unwrap();
    let grid = FrequencyGrid::default();
    for keep in 0..=12 {
        let err = sampled_hinf_error(&full, &full.dominant_truncation(keep).unwrap(), &grid).unwrap().value;
        let bound = full.truncation_error_bound(keep).unwrap();
        assert!(err <= bound * (1.0 + 1e-10), "keep {keep}: {err} > {bound}");
    }
}

/// `||y - y_r||_2 <= ||H - H_r||_inf ||u||_2`, with 5% slack for sampling.
#[test]
fn output_error_is_bounded_by_hinf_error() {
    let (sys, gt) = build_example(&ExampleSpec::default()).unwrap();
    let full = LtiExtension::from_ground_truth(&gt, 1).unwrap();
    let grid = FrequencyGrid::default();
    let u = InputSignal::exponential(-1.0);
    let t = uniform_grid(20.0, 4000);
    let y = simulate_fom_example(&gt, &u, &t).unwrap();
    for r in [2usize, 5, 10] {
        let idx = gt.order_by_decay()[..r].to_vec();
        let rom = build_rom(&PartialFloquet::from_ground_truth(&gt, &idx).unwrap(), &sys).unwrap();
        let red = LtiExtension::from_rom(&rom, 1).unwrap();
        let err = sampled_hinf_error(&full, &red, &grid).unwrap().value;
        let yr = simulate_rom(&rom, &u, &t, 1e-12).unwrap();
        let diff: Vec<C> = y.y.iter().zip(&yr.y).map(|(a, b)| a - b).collect();
        let lhs = l2_norm_sampled(&t, &diff);
        let rhs = err * u.l2_norm(60.0, 1.0);
        assert!(lhs <= 1.05 * rhs, "r = {r}: {lhs} > {rhs}");
    }
}

#[test]
fn dominant_rom_tracks_small_random_system() {
    let sys = random_system(6, 2, 42).unwrap();
    let mut ws = ResolventWorkspace::for_system(&sys);
    let k = estimate_fourier_depth(&sys, &mut ws, C::new(1.0, 0.0)).unwrap();
    let out = sadpa_run(&sys, &mut ws, &[C::new(0.0, 0.0)], 6, k, &SadpaOptions::default()).unwrap();
    let rom = build_rom(&PartialFloquet::from_triples(&out.triples).unwrap(), &sys).unwrap();
    let u = InputSignal::exponential(-0.5);
    let grid = uniform_grid(10.0, 201);
    let y = simulate_fom_dense(&sys, &u, &grid, &RadauOptions::default()).unwrap();
    let yr = simulate_rom(&rom, &u, &grid, 1e-12).unwrap();
    // all six families kept: the reduced model is exact
    let e = relative_error(&y.y, &yr.y).unwrap();
    assert!(e.max < 1e-6, "{}", e.max);
}

#[test]
fn full_extension_peak_is_set_by_the_slowest_mode() {
    let (_, gt) = build_example(&ExampleSpec::default()).unwrap();
    let full = LtiExtension::from_ground_truth(&gt, 1).unwrap();
    let norm = sampled_hinf_norm(&full, &FrequencyGrid::default()).unwrap();
    // the peak sits at nu = 0 and is dominated by the slowest mode
    assert!(norm.nu_peak.abs() < 1e-3);
    let slow = full.dominance_table().unwrap()[0].degdom_hext;
    assert!(norm.value > slow && norm.value < 2.0 * slow);
}

//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured quantities (run with `--nocapture` to see them).

use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use rcps::dynamics::{ensemble_consistency, evolve_density, lvn_residual, HamiltonianSpec};
use rcps::ensemble::{compare_specs, degenerate_pair, rcps_from_density, ConstructionFamily};
use rcps::estimation::{
    fit_truncated_gaussian, forward_moments, solve_eta_for_second_moment, FitProblem,
};
use rcps::law::ScalarLaw;
use rcps::measurement::{
    estimate_probability_moments, mean_sz_estimate, run_experiment, ExperimentDesign,
};
use rcps::quantum::{DensityMatrix, Observable, StateVector, Subsystem};
use rcps::{Error, RcpsSpec};

const PAIR_M2: f64 = 0.2525;
const PAIR_A_M4: f64 = 0.06625625;
const PAIR_B_M4: f64 = 0.19895;

fn random_state(rng: &mut ChaCha12Rng, dim: usize) -> StateVector {
    let raw: Vec<Complex64> =
        (0..dim).map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
    let norm: f64 = raw.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    StateVector::new(raw.into_iter().map(|c| c / norm).collect()).unwrap()
}

fn random_observable(rng: &mut ChaCha12Rng, dim: usize) -> Observable {
    let g = nalgebra::DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    Observable::new((&g + g.adjoint()).scale(0.5)).unwrap()
}

fn hermiticity_deviation(rho: &DensityMatrix) -> f64 {
    let d = rho.dim();
    let mut worst = 0.0_f64;
    for l in 0..d {
        for k in 0..d {
            worst = worst.max((rho.entry(l, k) - rho.entry(k, l).conj()).norm());
        }
    }
    worst
}

#[test]
fn acceptance_01_degenerate_pair_reproduction() {
    let start = Instant::now();
    let (a, b) = degenerate_pair();

    let cmp = compare_specs(&a, &b, 2).unwrap();
    assert!((cmp.moments_a[0] - PAIR_M2).abs() <= 1e-12, "criterion 1: pair A first moment");
    assert!((cmp.moments_b[0] - PAIR_M2).abs() <= 1e-12, "criterion 1: pair B first moment");
    assert!((cmp.moments_a[1] - PAIR_A_M4).abs() <= 1e-12, "criterion 1: pair A second moment");
    assert!((cmp.moments_b[1] - PAIR_B_M4).abs() <= 1e-12, "criterion 1: pair B second moment");

    for (name, spec) in [("A", &a), ("B", &b)] {
        let r = spec.analytic_density().unwrap();
        assert!((r.entry(0, 0).re - PAIR_M2).abs() <= 1e-12, "criterion 1: density {name} r00");
        assert!(
            (r.entry(1, 1).re - (1.0 - PAIR_M2)).abs() <= 1e-12,
            "criterion 1: density {name} r11"
        );
        assert!(r.entry(0, 1).norm() <= 1e-12, "criterion 1: density {name} off-diagonal");
    }

    // Monte Carlo at n = 1e6 within 4 standard errors, entrywise
    let n = 1_000_000u64;
    for (name, spec, m4) in [("A", &a, PAIR_A_M4), ("B", &b, PAIR_B_M4)] {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let mc = spec.monte_carlo_density(n, &mut rng).unwrap();
        let se_diag = ((m4 - PAIR_M2 * PAIR_M2) / n as f64).sqrt();
        let se_off = ((PAIR_M2 - m4) / (2.0 * n as f64)).sqrt();
        assert!(
            (mc.entry(0, 0).re - PAIR_M2).abs() <= 4.0 * se_diag,
            "criterion 1: MC {name} diagonal off by {} (4se = {})",
            (mc.entry(0, 0).re - PAIR_M2).abs(),
            4.0 * se_diag
        );
        assert!(
            mc.entry(1, 0).re.abs() <= 4.0 * se_off && mc.entry(1, 0).im.abs() <= 4.0 * se_off,
            "criterion 1: MC {name} off-diagonal"
        );
    }

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 10.0, "criterion 1: runtime {elapsed:.2}s exceeds 10s");
    println!(
        "PASS criterion 1: degenerate pair (order2 {PAIR_A_M4} vs {PAIR_B_M4}, MC 1e6 in {elapsed:.2}s)"
    );
}

#[test]
fn acceptance_02_coherence_vanishing() {
    let uniform = ScalarLaw::Uniform { lo: -std::f64::consts::PI, hi: std::f64::consts::PI };
    let spec = RcpsSpec::two_level_polar(
        ScalarLaw::TruncatedGaussian { loc: 0.6, scale: 0.15, support: (0.0, 1.0) },
        uniform,
    )
    .unwrap();

    let analytic = spec.analytic_density().unwrap();
    assert_eq!(analytic.entry(0, 1), Complex64::new(0.0, 0.0), "criterion 2: exact zero");
    assert_eq!(analytic.entry(1, 0), Complex64::new(0.0, 0.0), "criterion 2: exact zero");

    let mut rng = ChaCha12Rng::seed_from_u64(2);
    let mc = spec.monte_carlo_density(100_000, &mut rng).unwrap();
    let coherence = mc.entry(1, 0).norm();
    assert!(coherence < 5e-3, "criterion 2: MC coherence {coherence}");
    println!("PASS criterion 2: uniform-phase coherence (analytic 0, MC {coherence:.2e})");
}

#[test]
fn acceptance_03_mean_sz_consistency() {
    let (a, _) = degenerate_pair();
    let design = ExperimentDesign::new(100_000, 50, 3).unwrap();
    let record = run_experiment(&a, &design).unwrap();

    let est = &estimate_probability_moments(&record, &[1]).unwrap()[0];
    let measured = mean_sz_estimate(&record);
    let band = 4.0 * est.standard_error;
    assert!(
        (measured - (PAIR_M2 - 0.5)).abs() <= band,
        "criterion 3: mean s_z {measured} vs {} (band {band})",
        PAIR_M2 - 0.5
    );

    let analytic = a.analytic_density().unwrap().expectation(&Observable::spin_z()).unwrap();
    assert!(
        (measured - analytic).abs() <= band,
        "criterion 3: mean s_z {measured} vs analytic {analytic}"
    );
    println!("PASS criterion 3: mean s_z {measured:.5} matches {analytic:.5} within {band:.1e}");
}

#[test]
fn acceptance_04_inverse_problem_round_trip() {
    // noiseless round trip first
    let (m1, m2) = forward_moments(0.6, 0.15);
    let clean = fit_truncated_gaussian(&FitProblem::new(m1, m2)).unwrap();
    assert!(
        (clean.eta_hat - 0.6).abs() <= 1e-4 && (clean.sigma_hat - 0.15).abs() <= 1e-4,
        "criterion 4: noiseless round trip gave ({}, {})",
        clean.eta_hat,
        clean.sigma_hat
    );

    let spec = RcpsSpec::two_level_polar(
        ScalarLaw::TruncatedGaussian { loc: 0.6, scale: 0.15, support: (0.0, 1.0) },
        ScalarLaw::Uniform { lo: -std::f64::consts::PI, hi: std::f64::consts::PI },
    )
    .unwrap();
    let mut hits = 0;
    for seed in 0..10u64 {
        let design = ExperimentDesign::new(20_000, 200, 40 + seed).unwrap();
        let record = run_experiment(&spec, &design).unwrap();
        let est = estimate_probability_moments(&record, &[1, 2]).unwrap();
        let fit = fit_truncated_gaussian(&FitProblem::new(est[0].value, est[1].value)).unwrap();
        if (fit.eta_hat - 0.6).abs() <= 0.02 && (fit.sigma_hat - 0.15).abs() <= 0.02 {
            hits += 1;
        }
    }
    assert!(hits >= 9, "criterion 4: only {hits}/10 seeds recovered within 0.02");
    println!("PASS criterion 4: inverse round trip ({hits}/10 seeds within 0.02, noiseless 1e-4)");
}

#[test]
fn acceptance_05_density_operator_insufficiency() {
    // two parameter pairs with the same second moment of alpha must exist
    // and differ at fourth order
    let (sigma_1, sigma_2) = (0.1, 0.3);
    let eta_1 = 0.6;
    let (m2_1, m4_1) = forward_moments(eta_1, sigma_1);
    let eta_2 = solve_eta_for_second_moment(m2_1, sigma_2, (-0.5, 1.5)).unwrap();
    let (m2_2, m4_2) = forward_moments(eta_2, sigma_2);

    assert!(
        (m2_1 - m2_2).abs() <= 1e-10,
        "criterion 5: second moments differ by {}",
        (m2_1 - m2_2).abs()
    );
    assert!(
        (m4_1 - m4_2).abs() > 1e-3,
        "criterion 5: fourth moments too close: {m4_1} vs {m4_2}"
    );
    println!(
        "PASS criterion 5: ({eta_1}, {sigma_1}) and ({eta_2:.6}, {sigma_2}) share E{{a^2}} = {m2_1:.8} \
         but split E{{a^4}}: {m4_1:.6} vs {m4_2:.6}"
    );
}

#[test]
fn acceptance_06_liouville_von_neumann_dynamics() {
    let (a, _) = degenerate_pair();
    let h = HamiltonianSpec::zeeman(1.0, std::f64::consts::PI / 2.0, 0.0);
    let rho0 = a.analytic_density().unwrap();
    let spectrum0 = rho0.eigenvalues();

    for &t in &[0.5, 1.0, 5.0] {
        let evolved = evolve_density(&rho0, &h, t).unwrap();
        let trace: f64 = (0..2).map(|i| evolved.entry(i, i).re).sum();
        assert!((trace - 1.0).abs() <= 1e-10, "criterion 6: trace at t = {t}");
        assert!(hermiticity_deviation(&evolved) <= 1e-10, "criterion 6: hermiticity at t = {t}");
        for (x, y) in spectrum0.iter().zip(evolved.eigenvalues().iter()) {
            assert!((x - y).abs() <= 1e-10, "criterion 6: spectrum at t = {t}");
        }

        let residual = lvn_residual(&h, |s| evolve_density(&rho0, &h, s).unwrap(), t, 1e-4);
        assert!(residual <= 1e-6, "criterion 6: residual {residual} at t = {t}");
        let halved = lvn_residual(&h, |s| evolve_density(&rho0, &h, s).unwrap(), t, 5e-5);
        let ratio = residual / halved;
        assert!((3.0..5.0).contains(&ratio), "criterion 6: dt-halving ratio {ratio} at t = {t}");

        let mut rng = ChaCha12Rng::seed_from_u64(60 + t as u64);
        let distance = ensemble_consistency(&a, &h, t, 10_000, &mut rng).unwrap();
        assert!(distance <= 0.05, "criterion 6: ensemble distance {distance} at t = {t}");
    }
    println!("PASS criterion 6: Liouville-von Neumann checks at t in {{0.5, 1, 5}}");
}

#[test]
fn acceptance_07_feynman_identity() {
    let mut rng = ChaCha12Rng::seed_from_u64(7);
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let d1 = 2 + (rng.gen::<u32>() % 2) as usize;
        let d2 = 2 + (rng.gen::<u32>() % 2) as usize;
        let psi = random_state(&mut rng, d1 * d2);
        let obs = random_observable(&mut rng, d1);
        let joint = psi.expectation(&obs.tensor(&Observable::identity(d2))).unwrap();
        let reduced = psi
            .projector()
            .partial_trace((d1, d2), Subsystem::First)
            .unwrap()
            .expectation(&obs)
            .unwrap();
        worst = worst.max((joint - reduced).abs());
    }
    assert!(worst <= 1e-12, "criterion 7: worst deviation {worst}");
    println!("PASS criterion 7: subsystem means match reduced-state means (worst {worst:.2e})");
}

#[test]
fn acceptance_08_purity_law() {
    let (a, b) = degenerate_pair();
    let mut rng = ChaCha12Rng::seed_from_u64(8);
    let tg_spec = RcpsSpec::two_level_polar(
        ScalarLaw::TruncatedGaussian { loc: 0.6, scale: 0.15, support: (0.0, 1.0) },
        ScalarLaw::Uniform { lo: -std::f64::consts::PI, hi: std::f64::consts::PI },
    )
    .unwrap();
    let densities = vec![
        a.analytic_density().unwrap(),
        b.analytic_density().unwrap(),
        tg_spec.analytic_density().unwrap(),
        a.monte_carlo_density(10_000, &mut rng).unwrap(),
        rcps_from_density(&[0.5, 0.5], ConstructionFamily::Generic)
            .unwrap()
            .spec
            .analytic_density()
            .unwrap(),
        random_state(&mut rng, 4).projector(),
    ];
    for rho in &densities {
        assert!(rho.purity() <= 1.0 + 1e-9, "criterion 8: purity {}", rho.purity());
    }

    // constant-coefficient specs are pure states: purity 1
    let constant = RcpsSpec::two_level_polar(
        ScalarLaw::Constant { value: 0.8 },
        ScalarLaw::Constant { value: 0.4 },
    )
    .unwrap();
    let purity = constant.analytic_density().unwrap().purity();
    assert!((purity - 1.0).abs() <= 1e-10, "criterion 8: constant-spec purity {purity}");
    println!("PASS criterion 8: purity bounded by 1 everywhere, equal to 1 for constant specs");
}

#[test]
fn acceptance_09_density_to_rcps_constructions() {
    for family in [ConstructionFamily::Gaussian, ConstructionFamily::Laplace] {
        let built = rcps_from_density(&[0.3, 0.7], family).unwrap();
        let r = built.spec.analytic_density().unwrap();
        assert!(
            (r.entry(0, 0).re - 0.3).abs() <= 1e-8 && (r.entry(1, 1).re - 0.7).abs() <= 1e-8,
            "criterion 9: {family:?} round trip gave diag({}, {})",
            r.entry(0, 0).re,
            r.entry(1, 1).re
        );
    }

    match rcps_from_density(&[0.5, 0.5], ConstructionFamily::Gaussian) {
        Err(Error::InfeasibleTarget { supremum, .. }) => {
            assert!((supremum - 1.0 / 3.0).abs() < 1e-15, "criterion 9: supremum {supremum}")
        }
        other => panic!("criterion 9: expected infeasibility, got {other:?}"),
    }

    // generic construction: I/2 exactly (one float rounding of sqrt(1/2)^2)
    let generic = rcps_from_density(&[0.5, 0.5], ConstructionFamily::Generic).unwrap();
    let r = generic.spec.analytic_density().unwrap();
    assert!(
        (r.entry(0, 0).re - 0.5).abs() <= 2.0 * f64::EPSILON
            && (r.entry(1, 1).re - 0.5).abs() <= 2.0 * f64::EPSILON,
        "criterion 9: generic diag ({}, {})",
        r.entry(0, 0).re,
        r.entry(1, 1).re
    );
    assert_eq!(r.entry(0, 1), Complex64::new(0.0, 0.0), "criterion 9: generic off-diagonal");
    println!("PASS criterion 9: density-to-RCPS constructions round-trip, infeasibility reported");
}

#[test]
fn acceptance_10_estimator_calibration() {
    // fixed p = 0.3 through a constant-alpha spec
    let p = 0.3_f64;
    let n = 10u64;
    let spec = RcpsSpec::two_level_polar(
        ScalarLaw::Constant { value: p.sqrt() },
        ScalarLaw::Uniform { lo: -std::f64::consts::PI, hi: std::f64::consts::PI },
    )
    .unwrap();
    let design = ExperimentDesign::new(1_000_000, n, 10).unwrap();
    let record = run_experiment(&spec, &design).unwrap();

    let est = &estimate_probability_moments(&record, &[2]).unwrap()[0];
    assert!(
        (est.value - p * p).abs() <= 4.0 * est.standard_error,
        "criterion 10: order-2 estimate {} (se {})",
        est.value,
        est.standard_error
    );

    // the naive (k/n)^2 estimator exceeds the unbiased one by p(1-p)/n
    let diffs: Vec<f64> = record
        .counts()
        .iter()
        .map(|&k| {
            let k = k as f64;
            let n = n as f64;
            (k / n).powi(2) - k * (k - 1.0) / (n * (n - 1.0))
        })
        .collect();
    let m = diffs.len() as f64;
    let mean_excess = diffs.iter().sum::<f64>() / m;
    let var = diffs.iter().map(|d| (d - mean_excess).powi(2)).sum::<f64>() / (m - 1.0);
    let se = (var / m).sqrt();
    let expected_excess = p * (1.0 - p) / n as f64;
    assert!(
        (mean_excess - expected_excess).abs() <= 4.0 * se,
        "criterion 10: naive excess {mean_excess} vs {expected_excess} (se {se})"
    );
    println!(
        "PASS criterion 10: order-2 estimator {:.6} ~ {:.2}, naive bias {mean_excess:.6} ~ {expected_excess}",
        est.value,
        p * p
    );
}

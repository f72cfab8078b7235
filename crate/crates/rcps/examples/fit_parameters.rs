//! Recovering the hidden parameters of a truncated-Gaussian coefficient law
//! from measured moments of the random outcome probability.
//!
//! The mean of s_z alone fixes only E{alpha^2}: one equation, two unknowns.
//! Adding the second moment of the outcome probability (the fourth moment
//! of alpha) closes the system.
//!
//! ```bash
//! cargo run --example fit_parameters
//! ```

use rcps::estimation::{
    fit_truncated_gaussian, forward_moments, solve_eta_for_second_moment, FitProblem,
};
use rcps::law::ScalarLaw;
use rcps::measurement::{estimate_probability_moments, run_experiment, ExperimentDesign};
use rcps::{RcpsSpec, Result};

fn main() -> Result<()> {
    let (eta_true, sigma_true) = (0.6, 0.15);

    println!("=== why one moment is not enough ===");
    let (m2, m4) = forward_moments(eta_true, 0.1);
    let eta_alt = solve_eta_for_second_moment(m2, 0.3, (-0.5, 1.5)).expect("bracketed");
    let (m2_alt, m4_alt) = forward_moments(eta_alt, 0.3);
    println!("(eta, sigma) = (0.600000, 0.10) -> E{{a^2}} = {m2:.8}, E{{a^4}} = {m4:.8}");
    println!("(eta, sigma) = ({eta_alt:.6}, 0.30) -> E{{a^2}} = {m2_alt:.8}, E{{a^4}} = {m4_alt:.8}");
    println!("same second moment (same mean s_z), fourth moments {:.1e} apart", (m4 - m4_alt).abs());

    println!("\n=== noiseless round trip ===");
    let (m1, m2) = forward_moments(eta_true, sigma_true);
    let clean = fit_truncated_gaussian(&FitProblem::new(m1, m2))?;
    println!(
        "target ({eta_true}, {sigma_true}) -> recovered ({:.8}, {:.8}), residual {:.1e}",
        clean.eta_hat, clean.sigma_hat, clean.residual_norm
    );

    println!("\n=== from simulated measurements ===");
    let spec = RcpsSpec::two_level_polar(
        ScalarLaw::TruncatedGaussian { loc: eta_true, scale: sigma_true, support: (0.0, 1.0) },
        ScalarLaw::Uniform { lo: -std::f64::consts::PI, hi: std::f64::consts::PI },
    )?;
    let design = ExperimentDesign::new(20_000, 200, 42)?;
    let record = run_experiment(&spec, &design)?;
    let est = estimate_probability_moments(&record, &[1, 2])?;
    println!(
        "estimated moments: m1 = {:.6} +/- {:.1e}, m2 = {:.6} +/- {:.1e}",
        est[0].value, est[0].standard_error, est[1].value, est[1].standard_error
    );

    let fit = fit_truncated_gaussian(&FitProblem::new(est[0].value, est[1].value))?;
    println!(
        "fit: eta = {:.4} (true {eta_true}), sigma = {:.4} (true {sigma_true}), converged = {}",
        fit.eta_hat, fit.sigma_hat, fit.converged
    );
    println!("sensitivity d(m1,m2)/d(eta,sigma) at the solution:");
    for row in fit.sensitivity {
        println!("  [{:+.5}, {:+.5}]", row[0], row[1]);
    }
    Ok(())
}

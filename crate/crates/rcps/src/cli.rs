//! Command implementations behind the `rcps` binary.
//!
//! Each command reads JSON specs, runs library operations, writes a JSON
//! report (plus CSV for bulk records) under an output directory, and prints
//! a one-line summary. Every stochastic command takes a seed (default 0),
//! so default runs are reproducible; reports are bit-identical across runs
//! and worker counts for a fixed seed.
//!
//! Exit codes: 0 success, 2 validation or infeasibility, 3 non-convergence,
//! 4 I/O.

use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dynamics::{ensemble_consistency, evolve_density, lvn_residual, HamiltonianSpec};
use crate::ensemble::{
    compare_specs, degenerate_pair, rcps_from_density, ConstructionFamily, DensityConstruction,
    RcpsSpec,
};
use crate::error::{Error, Result};
use crate::estimation::{fit_truncated_gaussian, FitProblem, FitResult};
use crate::law::ScalarLaw;
use crate::measurement::{
    estimate_probability_moments, mean_sz_estimate, run_experiment, run_experiment_with,
    ExperimentDesign, MeasurementRecord, ProbabilityMomentEstimate,
};
use crate::quantum::{DensityMatrix, StateVector};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;
pub const EXIT_IO: i32 = 4;

/// Reference values the degenerate-pair demo checks its analytic output
/// against (to 1e-12).
pub const PAIR_ORDER1: f64 = 0.2525;
pub const PAIR_A_ORDER2: f64 = 0.06625625;
pub const PAIR_B_ORDER2: f64 = 0.19895;
const PAIR_MATCH_TOL: f64 = 1e-12;

/// Step used for the finite-difference Liouville-von Neumann check in the
/// evolve report.
const LVN_CHECK_DT: f64 = 1e-4;

/// Maps an error to the process exit code.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) | Error::Json(_) => EXIT_IO,
        _ => EXIT_VALIDATION,
    }
}

/// Optional JSON config file mirroring the shared flags; explicit flags win
/// on conflict.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub spec: Option<PathBuf>,
    pub seed: Option<u64>,
    pub realizations: Option<u64>,
    pub shots: Option<u64>,
    pub out: Option<PathBuf>,
    pub orders: Option<Vec<u32>>,
    pub gb0: Option<f64>,
    pub theta: Option<f64>,
    pub phi: Option<f64>,
    pub t: Option<f64>,
    pub analytic_only: Option<bool>,
    pub eigenvalues: Option<Vec<f64>>,
    pub family: Option<String>,
    pub eta: Option<f64>,
    pub sigma: Option<f64>,
    pub record: Option<PathBuf>,
    pub theta_law: Option<PathBuf>,
    pub phi_law: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

/// Reads and validates an [`RcpsSpec`] from a JSON file.
pub fn load_spec(path: &Path) -> Result<RcpsSpec> {
    let spec: RcpsSpec = serde_json::from_str(&fs::read_to_string(path)?)?;
    spec.validate()?;
    Ok(spec)
}

/// Reads and validates a [`ScalarLaw`] from a JSON file.
pub fn load_law(path: &Path) -> Result<ScalarLaw> {
    let law: ScalarLaw = serde_json::from_str(&fs::read_to_string(path)?)?;
    law.validate()?;
    Ok(law)
}

fn write_report<T: Serialize>(dir: &Path, name: &str, report: &T) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string_pretty(report)?)?;
    Ok(path)
}

fn sha_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

// ---------------------------------------------------------------------------
// sample

#[derive(Debug, Serialize)]
pub struct SampleReport {
    pub spec: RcpsSpec,
    pub seed: u64,
    pub realizations: Vec<StateVector>,
    /// Total rejected draws across all realizations (real-remainder specs
    /// with d >= 3 only).
    pub rejections: u64,
}

/// Draws `realizations` states from the spec and writes their amplitudes.
pub fn run_sample(spec: &RcpsSpec, realizations: u64, seed: u64, out: &Path) -> Result<()> {
    spec.validate()?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut states = Vec::with_capacity(realizations as usize);
    let mut rejections = 0;
    for _ in 0..realizations {
        let (psi, rej) = spec.sample_realization_counted(&mut rng)?;
        rejections += rej;
        states.push(psi);
    }
    let report =
        SampleReport { spec: spec.clone(), seed, realizations: states, rejections };
    let path = write_report(out, "samples.json", &report)?;
    println!("wrote {} realizations to {}", realizations, path.display());
    Ok(())
}

// ---------------------------------------------------------------------------
// density

#[derive(Debug, Serialize)]
pub struct DensityReport {
    pub spec: RcpsSpec,
    pub analytic: Option<DensityMatrix>,
    /// Reason the closed form is unavailable, when it is.
    pub analytic_unsupported: Option<String>,
    pub monte_carlo: Option<MonteCarloDensity>,
    pub frobenius_distance: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct MonteCarloDensity {
    pub samples: u64,
    pub seed: u64,
    pub matrix: DensityMatrix,
}

/// Computes the analytic density (when available) and a Monte Carlo
/// density, and reports their Frobenius distance.
pub fn run_density(
    spec: &RcpsSpec,
    samples: u64,
    seed: u64,
    analytic_only: bool,
    out: &Path,
) -> Result<()> {
    spec.validate()?;
    let (analytic, analytic_unsupported) = match spec.analytic_density() {
        Ok(d) => (Some(d), None),
        Err(Error::Unsupported(msg)) if !analytic_only => (None, Some(msg)),
        Err(e) => return Err(e),
    };
    let monte_carlo = if analytic_only {
        None
    } else {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        Some(MonteCarloDensity {
            samples,
            seed,
            matrix: spec.monte_carlo_density(samples, &mut rng)?,
        })
    };
    let frobenius_distance = match (&analytic, &monte_carlo) {
        (Some(a), Some(mc)) => Some(a.frobenius_distance(&mc.matrix)?),
        _ => None,
    };
    let report = DensityReport {
        spec: spec.clone(),
        analytic,
        analytic_unsupported,
        monte_carlo,
        frobenius_distance,
    };
    let path = write_report(out, "density.json", &report)?;
    match report.frobenius_distance {
        Some(d) => println!("wrote {} (Frobenius distance {d:.3e})", path.display()),
        None => println!("wrote {}", path.display()),
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// experiment

/// Runs the measurement protocol and writes `record.csv` plus its sidecar.
pub fn run_experiment_cmd(spec: &RcpsSpec, design: &ExperimentDesign, out: &Path) -> Result<()> {
    let record = run_experiment(spec, design)?;
    fs::create_dir_all(out)?;
    let csv = out.join("record.csv");
    let sidecar = out.join("record.json");
    record.save(&csv, &sidecar)?;
    println!(
        "wrote {} realizations x {} shots to {}",
        design.realizations,
        design.shots_per_realization,
        csv.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// fit

/// Where the fit's input moments come from.
pub enum FitSource {
    /// A record CSV on disk; the sidecar is the same path with a `.json`
    /// extension.
    Record { csv: PathBuf },
    /// Simulate a truncated-Gaussian spec first.
    Simulate { eta: f64, sigma: f64, realizations: u64, shots: u64, seed: u64 },
    /// Raw moment values, no record.
    Raw { m1: f64, m2: f64 },
}

#[derive(Debug, Serialize)]
pub struct FitReport {
    /// The two moments the fit ran on.
    pub m1: f64,
    pub m2: f64,
    /// Per-order estimates when the input was a record.
    pub input_moments: Option<Vec<ProbabilityMomentEstimate>>,
    pub mean_sz: f64,
    /// Ground truth when the record was simulated by this run.
    pub truth: Option<(f64, f64)>,
    pub result: FitResult,
}

/// Estimates moments from a record (or takes them raw) and solves the
/// two-moment system. Returns the written report and the
/// convergence-derived exit code.
pub fn run_fit(source: &FitSource, orders: &[u32], out: &Path) -> Result<(FitReport, i32)> {
    let (record, truth) = match source {
        FitSource::Record { csv } => {
            let sidecar = csv.with_extension("json");
            (Some(MeasurementRecord::load(csv, &sidecar)?), None)
        }
        FitSource::Simulate { eta, sigma, realizations, shots, seed } => {
            let spec = RcpsSpec::two_level_polar(
                ScalarLaw::TruncatedGaussian {
                    loc: *eta,
                    scale: *sigma,
                    support: (0.0, 1.0),
                },
                ScalarLaw::Uniform { lo: -std::f64::consts::PI, hi: std::f64::consts::PI },
            )?;
            let design = ExperimentDesign::new(*realizations, *shots, *seed)?;
            (Some(run_experiment(&spec, &design)?), Some((*eta, *sigma)))
        }
        FitSource::Raw { .. } => (None, None),
    };
    let (problem, input_moments, mean_sz) = match (&record, source) {
        (Some(record), _) => {
            let estimates = estimate_probability_moments(record, orders)?;
            let problem = FitProblem::from_estimates(&estimates)?;
            (problem, Some(estimates), mean_sz_estimate(record))
        }
        (None, FitSource::Raw { m1, m2 }) => (FitProblem::new(*m1, *m2), None, m1 - 0.5),
        _ => unreachable!("record is present except for the raw source"),
    };
    let (m1, m2) = (problem.m1, problem.m2);
    let result = fit_truncated_gaussian(&problem)?;
    let report = FitReport { m1, m2, input_moments, mean_sz, truth, result };
    let path = write_report(out, "fit.json", &report)?;
    let code = if report.result.converged { EXIT_OK } else { EXIT_NONCONVERGENCE };
    println!(
        "eta_hat = {:.6}, sigma_hat = {:.6}, residual = {:.3e}, converged = {} ({})",
        report.result.eta_hat,
        report.result.sigma_hat,
        report.result.residual_norm,
        report.result.converged,
        path.display()
    );
    Ok((report, code))
}

// ---------------------------------------------------------------------------
// evolve

#[derive(Debug, Serialize)]
pub struct EvolveReport {
    pub hamiltonian: HamiltonianSpec,
    pub t: f64,
    pub initial: DensityMatrix,
    pub evolved: DensityMatrix,
    pub spectrum_initial: Vec<f64>,
    pub spectrum_evolved: Vec<f64>,
    /// Finite-difference Liouville-von Neumann residual at `lvn_dt`.
    pub lvn_residual: f64,
    pub lvn_dt: f64,
    pub ensemble: Option<EnsembleCheck>,
}

#[derive(Debug, Serialize)]
pub struct EnsembleCheck {
    pub samples: u64,
    pub seed: u64,
    /// Frobenius distance between the Monte Carlo density of evolved
    /// realizations and the evolved analytic density.
    pub distance: f64,
}

/// Evolves the spec's analytic density under a Zeeman Hamiltonian and
/// reports conservation and consistency checks.
#[allow(clippy::too_many_arguments)]
pub fn run_evolve(
    spec: &RcpsSpec,
    gb0: f64,
    theta: f64,
    phi: f64,
    t: f64,
    samples: u64,
    seed: u64,
    out: &Path,
) -> Result<()> {
    spec.validate()?;
    let h = HamiltonianSpec::zeeman(gb0, theta, phi);
    let initial = spec.analytic_density()?;
    let evolved = evolve_density(&initial, &h, t)?;
    let residual = lvn_residual(&h, |s| evolve_density(&initial, &h, s).expect("same dims"), t, LVN_CHECK_DT);
    let ensemble = if samples > 0 {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        Some(EnsembleCheck {
            samples,
            seed,
            distance: ensemble_consistency(spec, &h, t, samples, &mut rng)?,
        })
    } else {
        None
    };
    let report = EvolveReport {
        hamiltonian: h,
        t,
        spectrum_initial: initial.eigenvalues(),
        spectrum_evolved: evolved.eigenvalues(),
        initial,
        evolved,
        lvn_residual: residual,
        lvn_dt: LVN_CHECK_DT,
        ensemble,
    };
    let path = write_report(out, "evolution.json", &report)?;
    println!(
        "evolved to t = {t}; LvN residual {:.3e} ({})",
        report.lvn_residual,
        path.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// demo: degenerate pair

#[derive(Debug, Serialize)]
pub struct DegeneratePairReport {
    pub spec_a: RcpsSpec,
    pub spec_b: RcpsSpec,
    /// Analytic E{p_+} for the two specs.
    pub order1: [f64; 2],
    /// Analytic E{p_+^2} for the two specs.
    pub order2: [f64; 2],
    pub density_a: DensityMatrix,
    pub density_b: DensityMatrix,
    /// Whether the analytic values match the reference constants to 1e-12.
    pub analytic_match: bool,
    pub empirical: Option<PairEmpirical>,
}

#[derive(Debug, Serialize)]
pub struct PairEmpirical {
    pub realizations: u64,
    pub shots: u64,
    pub seed: u64,
    pub estimates_a: Vec<ProbabilityMomentEstimate>,
    pub estimates_b: Vec<ProbabilityMomentEstimate>,
    /// |order-2 gap| divided by the combined standard error.
    pub order2_separation: f64,
}

/// Builds the two specs that share a density operator but differ at fourth
/// order, reports analytic and (optionally) empirical moments, and returns
/// the exit code: 0 iff the analytic values match the references to 1e-12.
pub fn run_demo_degenerate_pair(
    realizations: u64,
    shots: u64,
    seed: u64,
    out: &Path,
) -> Result<(DegeneratePairReport, i32)> {
    let (a, b) = degenerate_pair();
    let comparison = compare_specs(&a, &b, 2)?;
    let density_a = a.analytic_density()?;
    let density_b = b.analytic_density()?;

    let expected_diag = [PAIR_ORDER1, 1.0 - PAIR_ORDER1];
    let diag_ok = |d: &DensityMatrix| {
        (d.entry(0, 0).re - expected_diag[0]).abs() <= PAIR_MATCH_TOL
            && (d.entry(1, 1).re - expected_diag[1]).abs() <= PAIR_MATCH_TOL
            && d.entry(0, 1).norm() <= PAIR_MATCH_TOL
    };
    let analytic_match = (comparison.moments_a[0] - PAIR_ORDER1).abs() <= PAIR_MATCH_TOL
        && (comparison.moments_b[0] - PAIR_ORDER1).abs() <= PAIR_MATCH_TOL
        && (comparison.moments_a[1] - PAIR_A_ORDER2).abs() <= PAIR_MATCH_TOL
        && (comparison.moments_b[1] - PAIR_B_ORDER2).abs() <= PAIR_MATCH_TOL
        && diag_ok(&density_a)
        && diag_ok(&density_b);

    let empirical = if shots > 0 && realizations > 0 {
        let design_a = ExperimentDesign::new(realizations, shots, seed)?;
        let design_b = ExperimentDesign::new(realizations, shots, seed.wrapping_add(1))?;
        let est_a = estimate_probability_moments(&run_experiment(&a, &design_a)?, &[1, 2])?;
        let est_b = estimate_probability_moments(&run_experiment(&b, &design_b)?, &[1, 2])?;
        let gap = (est_b[1].value - est_a[1].value).abs();
        let combined =
            (est_a[1].standard_error.powi(2) + est_b[1].standard_error.powi(2)).sqrt();
        Some(PairEmpirical {
            realizations,
            shots,
            seed,
            estimates_a: est_a,
            estimates_b: est_b,
            order2_separation: gap / combined,
        })
    } else {
        None
    };

    let report = DegeneratePairReport {
        spec_a: a,
        spec_b: b,
        order1: [comparison.moments_a[0], comparison.moments_b[0]],
        order2: [comparison.moments_a[1], comparison.moments_b[1]],
        density_a,
        density_b,
        analytic_match,
        empirical,
    };
    let path = write_report(out, "degenerate_pair.json", &report)?;
    println!("shared density diag({PAIR_ORDER1}, {}), order-2 moments:", 1.0 - PAIR_ORDER1);
    println!("  spec A: {:.8}   spec B: {:.8}", report.order2[0], report.order2[1]);
    if let Some(e) = &report.empirical {
        println!(
            "  empirical order-2: {:.5} vs {:.5} (separation {:.1} sigma)",
            e.estimates_a[1].value, e.estimates_b[1].value, e.order2_separation
        );
    }
    println!("report: {}", path.display());
    let code = if analytic_match { EXIT_OK } else { EXIT_VALIDATION };
    Ok((report, code))
}

// ---------------------------------------------------------------------------
// demo: writer/reader

#[derive(Debug, Serialize)]
pub struct WriterReaderReport {
    pub theta_law: ScalarLaw,
    pub phi_law: ScalarLaw,
    pub realizations: u64,
    pub shots: u64,
    pub seed: u64,
    pub estimates: Vec<ProbabilityMomentEstimate>,
    pub mean_sz: f64,
}

/// Prepares a spin along a field direction drawn from `theta_law` /
/// `phi_law` and measures s_z repeatedly.
///
/// The amplitude law is the push-forward of the angle law through
/// cos(theta/2); it is realized by sampling the angle and transforming
/// rather than by a dedicated law variant.
pub fn run_demo_writer_reader(
    theta_law: &ScalarLaw,
    phi_law: &ScalarLaw,
    realizations: u64,
    shots: u64,
    seed: u64,
    out: &Path,
) -> Result<(WriterReaderReport, i32)> {
    theta_law.validate()?;
    phi_law.validate()?;
    let eps = 1e-12;
    let (tlo, thi) = theta_law.support();
    if tlo < -eps || thi > std::f64::consts::PI + eps {
        return Err(Error::InvalidLaw(format!(
            "polar angle law support [{tlo}, {thi}] exceeds [0, pi]"
        )));
    }
    let (plo, phi_hi) = phi_law.support();
    if plo < -std::f64::consts::PI - eps || phi_hi > std::f64::consts::PI + eps {
        return Err(Error::InvalidLaw(format!(
            "azimuth law support [{plo}, {phi_hi}] exceeds [-pi, pi]"
        )));
    }

    let design = ExperimentDesign::new(realizations, shots, seed)?;
    let digest = sha_hex(
        serde_json::to_string(&serde_json::json!({
            "writer_reader": { "theta_law": theta_law, "phi_law": phi_law }
        }))?
        .as_bytes(),
    );
    let sampler = |rng: &mut ChaCha12Rng| {
        let theta = theta_law.sample(rng).clamp(0.0, std::f64::consts::PI);
        let phi = phi_law.sample(rng);
        let alpha = (theta / 2.0).cos();
        let beta = (1.0 - alpha * alpha).max(0.0).sqrt();
        StateVector::new(vec![
            num_complex::Complex64::new(alpha, 0.0),
            num_complex::Complex64::from_polar(beta, phi),
        ])
    };
    let record = run_experiment_with(sampler, &design, &digest)?;

    fs::create_dir_all(out)?;
    record.save(&out.join("writer_reader.csv"), &out.join("writer_reader_record.json"))?;
    let estimates = estimate_probability_moments(&record, &[1, 2])?;
    let report = WriterReaderReport {
        theta_law: theta_law.clone(),
        phi_law: phi_law.clone(),
        realizations,
        shots,
        seed,
        mean_sz: mean_sz_estimate(&record),
        estimates,
    };
    let path = write_report(out, "writer_reader.json", &report)?;
    println!(
        "E{{p_+}} = {:.5} +/- {:.1e}, mean s_z = {:.5} ({})",
        report.estimates[0].value,
        report.estimates[0].standard_error,
        report.mean_sz,
        path.display()
    );
    Ok((report, EXIT_OK))
}

// ---------------------------------------------------------------------------
// from-rho

#[derive(Debug, Serialize)]
pub struct FromRhoReport {
    pub eigenvalues: Vec<f64>,
    pub family: ConstructionFamily,
    pub construction: DensityConstruction,
    /// Analytic round-trip check (d = 2 only): the reconstructed density in
    /// input order and its max deviation from diag(eigenvalues).
    pub verification: Option<RoundTripCheck>,
}

#[derive(Debug, Serialize)]
pub struct RoundTripCheck {
    pub density: DensityMatrix,
    pub max_abs_deviation: f64,
}

/// Parses a construction family name.
pub fn parse_family(name: &str) -> Result<ConstructionFamily> {
    match name {
        "gaussian" => Ok(ConstructionFamily::Gaussian),
        "laplace" => Ok(ConstructionFamily::Laplace),
        "generic" => Ok(ConstructionFamily::Generic),
        other => Err(Error::InvalidArgument(format!(
            "unknown family '{other}' (expected gaussian, laplace, or generic)"
        ))),
    }
}

/// Builds an RCPS whose density operator matches the given eigenvalues and
/// writes the spec (with its permutation and round-trip check).
pub fn run_from_rho(
    eigenvalues: &[f64],
    family: ConstructionFamily,
    out: &Path,
) -> Result<()> {
    let construction = rcps_from_density(eigenvalues, family)?;
    let verification = if eigenvalues.len() == 2 {
        let density = construction.density_in_input_order()?;
        let max_abs_deviation = eigenvalues
            .iter()
            .enumerate()
            .map(|(i, &p)| (density.entry(i, i).re - p).abs())
            .fold(0.0, f64::max);
        Some(RoundTripCheck { density, max_abs_deviation })
    } else {
        None
    };
    let report = FromRhoReport {
        eigenvalues: eigenvalues.to_vec(),
        family,
        construction,
        verification,
    };
    let path = write_report(out, "rcps_spec.json", &report)?;
    match &report.verification {
        Some(v) => println!(
            "construction written to {} (round-trip deviation {:.2e})",
            path.display(),
            v.max_abs_deviation
        ),
        None => println!("construction written to {}", path.display()),
    }
    Ok(())
}

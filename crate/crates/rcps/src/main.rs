//! `rcps`: file-driven runs of the RCPS toolkit.
//!
//! Thin layer over [`rcps::cli`]: parses flags (optionally merged over a
//! JSON config file, flags winning), dispatches, and maps errors to exit
//! codes (0 success, 2 validation/infeasibility, 3 non-convergence, 4 I/O).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rcps::cli::{self, FileConfig, FitSource};
use rcps::law::ScalarLaw;
use rcps::measurement::ExperimentDesign;
use rcps::{Error, Result};

#[derive(Parser)]
#[command(
    name = "rcps",
    version,
    about = "Random-coefficient pure states: densities, measurements, moment fits, dynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct Shared {
    /// JSON config file supplying defaults for the other flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed for stochastic steps (default 0, so runs reproduce).
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for reports.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Shared {
    fn file_config(&self) -> Result<FileConfig> {
        match &self.config {
            Some(path) => FileConfig::load(path),
            None => Ok(FileConfig::default()),
        }
    }
}

fn seed_of(shared: &Shared, cfg: &FileConfig) -> u64 {
    shared.seed.or(cfg.seed).unwrap_or(0)
}

fn out_of(shared: &Shared, cfg: &FileConfig) -> PathBuf {
    shared.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("rcps-out"))
}

fn spec_path(flag: &Option<PathBuf>, cfg: &FileConfig) -> Result<PathBuf> {
    flag.clone()
        .or_else(|| cfg.spec.clone())
        .ok_or_else(|| Error::InvalidArgument("--spec <file> is required".into()))
}

#[derive(Subcommand)]
enum Command {
    /// Draw realizations of a spec and write their amplitudes.
    Sample {
        #[command(flatten)]
        shared: Shared,
        /// RCPS spec JSON file.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Number of realizations to draw.
        #[arg(long)]
        realizations: Option<u64>,
    },
    /// Analytic and Monte Carlo density operators of a spec.
    Density {
        #[command(flatten)]
        shared: Shared,
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Monte Carlo sample count.
        #[arg(long)]
        realizations: Option<u64>,
        /// Skip the Monte Carlo pass.
        #[arg(long)]
        analytic_only: bool,
    },
    /// Run the measurement protocol and write a record CSV + sidecar.
    Experiment {
        #[command(flatten)]
        shared: Shared,
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Independent coefficient realizations (m).
        #[arg(long)]
        realizations: Option<u64>,
        /// Projective shots per realization (n).
        #[arg(long)]
        shots: Option<u64>,
    },
    /// Estimate outcome-probability moments and fit (eta, sigma).
    Fit {
        #[command(flatten)]
        shared: Shared,
        /// Existing record CSV (sidecar at the same path with .json).
        #[arg(long, conflicts_with_all = ["eta", "sigma", "m1", "m2"])]
        record: Option<PathBuf>,
        /// Simulate first: true location of the parent Gaussian.
        #[arg(long)]
        eta: Option<f64>,
        /// Simulate first: true scale of the parent Gaussian.
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long)]
        realizations: Option<u64>,
        #[arg(long)]
        shots: Option<u64>,
        /// Fit raw moments directly: estimate of E{p_+}.
        #[arg(long, requires = "m2", conflicts_with_all = ["eta", "sigma"])]
        m1: Option<f64>,
        /// Fit raw moments directly: estimate of E{p_+^2}.
        #[arg(long, requires = "m1")]
        m2: Option<f64>,
        /// Moment orders to estimate (must include 1 and 2).
        #[arg(long, value_delimiter = ',')]
        orders: Option<Vec<u32>>,
    },
    /// Evolve a spec's density under a Zeeman Hamiltonian.
    Evolve {
        #[command(flatten)]
        shared: Shared,
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Field coupling strength.
        #[arg(long)]
        gb0: Option<f64>,
        /// Polar angle of the field axis.
        #[arg(long)]
        theta: Option<f64>,
        /// Azimuth of the field axis.
        #[arg(long)]
        phi: Option<f64>,
        /// Evolution time (inverse angular-frequency units).
        #[arg(long)]
        t: Option<f64>,
        /// Monte Carlo samples for the ensemble-consistency check (0 skips).
        #[arg(long)]
        realizations: Option<u64>,
    },
    /// Two specs, one density operator, different fourth moments.
    DemoDegeneratePair {
        #[command(flatten)]
        shared: Shared,
        #[arg(long)]
        realizations: Option<u64>,
        /// Shots per realization; 0 gives an analytic-only report.
        #[arg(long)]
        shots: Option<u64>,
    },
    /// Prepare a spin along a random field direction and measure s_z.
    DemoWriterReader {
        #[command(flatten)]
        shared: Shared,
        /// JSON law for the field polar angle (default: constant pi/3).
        #[arg(long)]
        theta_law: Option<PathBuf>,
        /// JSON law for the field azimuth (default: constant 0).
        #[arg(long)]
        phi_law: Option<PathBuf>,
        #[arg(long)]
        realizations: Option<u64>,
        #[arg(long)]
        shots: Option<u64>,
    },
    /// Build an RCPS from density-operator eigenvalues.
    FromRho {
        #[command(flatten)]
        shared: Shared,
        /// Eigenvalues of the target density operator (sum to 1).
        #[arg(long, value_delimiter = ',')]
        eigenvalues: Option<Vec<f64>>,
        /// Coefficient family: gaussian, laplace, or generic.
        #[arg(long)]
        family: Option<String>,
    },
}

fn run(command: Command) -> Result<i32> {
    match command {
        Command::Sample { shared, spec, realizations } => {
            let cfg = shared.file_config()?;
            let spec = cli::load_spec(&spec_path(&spec, &cfg)?)?;
            let m = realizations.or(cfg.realizations).unwrap_or(10);
            cli::run_sample(&spec, m, seed_of(&shared, &cfg), &out_of(&shared, &cfg))?;
            Ok(cli::EXIT_OK)
        }
        Command::Density { shared, spec, realizations, analytic_only } => {
            let cfg = shared.file_config()?;
            let spec = cli::load_spec(&spec_path(&spec, &cfg)?)?;
            let n = realizations.or(cfg.realizations).unwrap_or(100_000);
            let analytic_only = analytic_only || cfg.analytic_only.unwrap_or(false);
            cli::run_density(
                &spec,
                n,
                seed_of(&shared, &cfg),
                analytic_only,
                &out_of(&shared, &cfg),
            )?;
            Ok(cli::EXIT_OK)
        }
        Command::Experiment { shared, spec, realizations, shots } => {
            let cfg = shared.file_config()?;
            let spec = cli::load_spec(&spec_path(&spec, &cfg)?)?;
            let design = ExperimentDesign::new(
                realizations.or(cfg.realizations).unwrap_or(10_000),
                shots.or(cfg.shots).unwrap_or(50),
                seed_of(&shared, &cfg),
            )?;
            cli::run_experiment_cmd(&spec, &design, &out_of(&shared, &cfg))?;
            Ok(cli::EXIT_OK)
        }
        Command::Fit { shared, record, eta, sigma, realizations, shots, m1, m2, orders } => {
            let cfg = shared.file_config()?;
            let source = match (record.or_else(|| cfg.record.clone()), m1, m2) {
                (Some(csv), _, _) => FitSource::Record { csv },
                (None, Some(m1), Some(m2)) => FitSource::Raw { m1, m2 },
                (None, _, _) => {
                    let eta = eta.or(cfg.eta).ok_or_else(|| {
                        Error::InvalidArgument("fit needs --record, --m1/--m2, or --eta/--sigma".into())
                    })?;
                    let sigma = sigma.or(cfg.sigma).ok_or_else(|| {
                        Error::InvalidArgument("fit needs --record, --m1/--m2, or --eta/--sigma".into())
                    })?;
                    FitSource::Simulate {
                        eta,
                        sigma,
                        realizations: realizations.or(cfg.realizations).unwrap_or(20_000),
                        shots: shots.or(cfg.shots).unwrap_or(200),
                        seed: seed_of(&shared, &cfg),
                    }
                }
            };
            let orders = orders.or_else(|| cfg.orders.clone()).unwrap_or_else(|| vec![1, 2]);
            let (_, code) = cli::run_fit(&source, &orders, &out_of(&shared, &cfg))?;
            Ok(code)
        }
        Command::Evolve { shared, spec, gb0, theta, phi, t, realizations } => {
            let cfg = shared.file_config()?;
            let spec = cli::load_spec(&spec_path(&spec, &cfg)?)?;
            cli::run_evolve(
                &spec,
                gb0.or(cfg.gb0).unwrap_or(1.0),
                theta.or(cfg.theta).unwrap_or(0.0),
                phi.or(cfg.phi).unwrap_or(0.0),
                t.or(cfg.t).unwrap_or(1.0),
                realizations.or(cfg.realizations).unwrap_or(0),
                seed_of(&shared, &cfg),
                &out_of(&shared, &cfg),
            )?;
            Ok(cli::EXIT_OK)
        }
        Command::DemoDegeneratePair { shared, realizations, shots } => {
            let cfg = shared.file_config()?;
            let (_, code) = cli::run_demo_degenerate_pair(
                realizations.or(cfg.realizations).unwrap_or(100_000),
                shots.or(cfg.shots).unwrap_or(50),
                seed_of(&shared, &cfg),
                &out_of(&shared, &cfg),
            )?;
            Ok(code)
        }
        Command::DemoWriterReader { shared, theta_law, phi_law, realizations, shots } => {
            let cfg = shared.file_config()?;
            let theta = match theta_law.or_else(|| cfg.theta_law.clone()) {
                Some(path) => cli::load_law(&path)?,
                None => ScalarLaw::Constant { value: std::f64::consts::PI / 3.0 },
            };
            let phi = match phi_law.or_else(|| cfg.phi_law.clone()) {
                Some(path) => cli::load_law(&path)?,
                None => ScalarLaw::Constant { value: 0.0 },
            };
            let (_, code) = cli::run_demo_writer_reader(
                &theta,
                &phi,
                realizations.or(cfg.realizations).unwrap_or(10_000),
                shots.or(cfg.shots).unwrap_or(100),
                seed_of(&shared, &cfg),
                &out_of(&shared, &cfg),
            )?;
            Ok(code)
        }
        Command::FromRho { shared, eigenvalues, family } => {
            let cfg = shared.file_config()?;
            let eigenvalues = eigenvalues.or_else(|| cfg.eigenvalues.clone()).ok_or_else(|| {
                Error::InvalidArgument("--eigenvalues <p1,p2,...> is required".into())
            })?;
            let family = cli::parse_family(
                &family.or_else(|| cfg.family.clone()).unwrap_or_else(|| "gaussian".into()),
            )?;
            cli::run_from_rho(&eigenvalues, family, &out_of(&shared, &cfg))?;
            Ok(cli::EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(cli::exit_code(&err) as u8)
        }
    }
}

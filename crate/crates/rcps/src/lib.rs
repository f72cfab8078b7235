//! Random-coefficient pure states (RCPS): simulation and estimation toolkit.
//!
//! A random-coefficient pure state is a normalized superposition whose basis
//! coefficients are random variables rather than fixed numbers. Every draw of
//! the coefficients is an ordinary pure state; the ensemble of draws carries
//! more information than the single density operator it induces. This crate
//! provides:
//!
//! - [`quantum`] — exact finite-dimensional complex linear algebra: state
//!   vectors, observables, density matrices, projectors, expectations,
//!   purity, tensor products, and partial traces.
//! - [`law`] — probability laws for coefficients and phases (constant,
//!   discrete, uniform, truncated Gaussian/Laplace) with densities, raw
//!   moments, sampling, and scale solving.
//! - [`ensemble`] — the RCPS abstraction: declarative specs, realization
//!   sampling, analytic and Monte Carlo density operators, moments of the
//!   random outcome probability, density-to-RCPS constructions, and
//!   moment-order comparison of specs.
//! - [`measurement`] — a two-level measurement protocol (many independent
//!   realizations, many projective shots per realization) with unbiased
//!   falling-factorial estimators for the moments of the outcome
//!   probability.
//! - [`estimation`] — recovery of truncated-Gaussian parameters from the
//!   first two moments of the outcome probability.
//! - [`dynamics`] — unitary evolution of realizations and densities and
//!   numerical checks of the Liouville-von Neumann equation.
//!
//! The `rcps` binary wires these into file-driven, reproducible runs; the
//! crate's `examples/` directory has one runnable example per capability.

pub mod cli;
pub mod dynamics;
pub mod ensemble;
pub mod error;
pub mod estimation;
pub mod law;
pub mod measurement;
pub mod quantum;
pub mod tol;

pub use dynamics::HamiltonianSpec;
pub use ensemble::{ConstructionFamily, DensityConstruction, RcpsSpec, SpecComparison};
pub use error::{Error, Result};
pub use estimation::{FitProblem, FitResult, MomentFeasibility};
pub use law::ScalarLaw;
pub use measurement::{ExperimentDesign, MeasurementRecord, ProbabilityMomentEstimate};
pub use quantum::{DensityMatrix, Observable, StateVector, Subsystem};

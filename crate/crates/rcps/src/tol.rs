//! Numerical tolerances used by validation and the moment machinery.
//!
//! Construction-time checks on density matrices use 1e-9 rather than machine
//! precision because Monte Carlo averaging and eigensolver rounding produce
//! tiny spurious asymmetries and negative eigenvalues.

/// Allowed deviation of a state vector's squared norm from 1.
pub const STATE_NORM_TOL: f64 = 1e-9;

/// Max entrywise deviation of a density matrix from its conjugate transpose.
pub const DENSITY_HERMITICITY_TOL: f64 = 1e-9;

/// Allowed deviation of a density matrix trace from 1.
pub const DENSITY_TRACE_TOL: f64 = 1e-9;

/// Floor on the smallest density-matrix eigenvalue.
pub const DENSITY_EIGENVALUE_FLOOR: f64 = -1e-9;

/// Allowed excess of Tr(rho^2) over 1.
pub const DENSITY_PURITY_TOL: f64 = 1e-9;

/// Hermiticity tolerance for observables and Hamiltonians.
pub const OBSERVABLE_HERMITICITY_TOL: f64 = 1e-12;

/// Largest imaginary residue tolerated when an expectation value is cast to
/// a real number.
pub const IMAGINARY_RESIDUE_TOL: f64 = 1e-12;

/// Absolute tolerance of the adaptive quadrature behind continuous-law
/// expectations.
pub const QUADRATURE_TOL: f64 = 1e-10;

/// Allowed deviation of discrete-law weights from summing to 1.
pub const DISCRETE_WEIGHT_TOL: f64 = 1e-12;

/// Bisection target on the second-moment residual when solving for a
/// truncated law's scale.
pub const SCALE_SOLVE_MOMENT_TOL: f64 = 1e-10;

/// Contractual accuracy of the second moment of a scale-solved law.
pub const SCALE_SOLVE_VERIFY_TOL: f64 = 1e-8;

/// Equality tolerance for analytic moment comparison between specs.
pub const MOMENT_EQUALITY_TOL: f64 = 1e-9;

/// Allowed deviation of an eigenvalue list from summing to 1 when
/// constructing an RCPS from a density operator.
pub const EIGENVALUE_SUM_TOL: f64 = 1e-12;

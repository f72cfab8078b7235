//! Random-coefficient pure states: declarative specs and their statistics.
//!
//! An [`RcpsSpec`] describes a state whose coefficients are random
//! variables. Each draw ([`RcpsSpec::sample_realization`]) is an ordinary
//! normalized pure state; the ensemble induces a density operator with
//! entries `r_lk = E{c_k* c_l}`, available in closed form
//! ([`RcpsSpec::analytic_density`]) or by averaging sampled projectors
//! ([`RcpsSpec::monte_carlo_density`]).
//!
//! Distinct specs can share a density operator while their coefficient laws
//! differ at fourth order; [`compare_specs`] makes that visible, and
//! [`degenerate_pair`] builds the canonical two-point example.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::law::{solve_scale_for_target_second_moment, ScalarLaw, TruncatedFamily};
use crate::quantum::{DensityMatrix, StateVector};
use crate::tol;

use nalgebra::DMatrix;

/// Attempt budget for the simplex rejection loop; exceeding it means the
/// coefficient laws are too wide for the normalization constraint.
const MAX_REJECTION_ATTEMPTS: u64 = 10_000;

/// Declarative description of a random-coefficient pure state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RcpsSpec {
    /// Two-level state `alpha |+> + sqrt(1 - alpha^2) e^{i phi} |->` with
    /// independent laws for `alpha` on [0, 1] and the phase on [-pi, pi].
    /// The first coefficient is real and non-negative (global phase fixed).
    TwoLevelPolar { alpha_law: ScalarLaw, phase_law: ScalarLaw },
    /// Real coefficients `c_1 .. c_{d-1}` drawn independently from `laws`
    /// (supports inside [-1, 1]); the last coordinate is the remainder
    /// `c_d = delta * sqrt(1 - sum c_i^2)` with `delta` a fair independent
    /// sign. For d >= 3, draws violating `sum c_i^2 <= 1` are rejected and
    /// redrawn.
    RealRemainder { dim: usize, laws: Vec<ScalarLaw> },
}

/// Family used when constructing an RCPS from a density operator's
/// eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstructionFamily {
    /// Centered truncated Gaussian coefficient laws on [-1, 1].
    Gaussian,
    /// Centered truncated Laplace coefficient laws on [-1, 1].
    Laplace,
    /// Deterministic modulus with a uniform phase (two-level only).
    Generic,
}

/// Result of a density-to-RCPS construction: the spec plus the coordinate
/// permutation that was applied.
///
/// `permutation[i]` is the index, in the input eigenvalue list, of the
/// eigenvalue carried by spec coordinate `i`. Eigenvalues are reordered
/// ascending so the largest one lands on the remainder coordinate, which
/// maximizes feasibility of the truncated-law construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityConstruction {
    pub spec: RcpsSpec,
    pub permutation: Vec<usize>,
}

/// Moment-by-moment comparison of two specs' outcome probabilities.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpecComparison {
    /// Moment orders k (of E{p_+^k}).
    pub orders: Vec<u32>,
    pub moments_a: Vec<f64>,
    pub moments_b: Vec<f64>,
    /// Equality at [`tol::MOMENT_EQUALITY_TOL`], per order.
    pub equal_flags: Vec<bool>,
}

impl RcpsSpec {
    /// Two-level polar spec with validation of the law supports.
    pub fn two_level_polar(alpha_law: ScalarLaw, phase_law: ScalarLaw) -> Result<Self> {
        let spec = RcpsSpec::TwoLevelPolar { alpha_law, phase_law };
        spec.validate()?;
        Ok(spec)
    }

    /// Real-remainder spec on `laws.len() + 1` coordinates.
    pub fn real_remainder(laws: Vec<ScalarLaw>) -> Result<Self> {
        let spec = RcpsSpec::RealRemainder { dim: laws.len() + 1, laws };
        spec.validate()?;
        Ok(spec)
    }

    /// Checks law validity and support constraints.
    pub fn validate(&self) -> Result<()> {
        let eps = 1e-12;
        match self {
            RcpsSpec::TwoLevelPolar { alpha_law, phase_law } => {
                alpha_law.validate()?;
                phase_law.validate()?;
                let (lo, hi) = alpha_law.support();
                if lo < -eps || hi > 1.0 + eps {
                    return Err(Error::InvalidLaw(format!(
                        "alpha law support [{lo}, {hi}] exceeds [0, 1]"
                    )));
                }
                let (plo, phi_hi) = phase_law.support();
                let pi = std::f64::consts::PI;
                if plo < -pi - eps || phi_hi > pi + eps {
                    return Err(Error::InvalidLaw(format!(
                        "phase law support [{plo}, {phi_hi}] exceeds [-pi, pi]"
                    )));
                }
                Ok(())
            }
            RcpsSpec::RealRemainder { dim, laws } => {
                if *dim < 2 || *dim != laws.len() + 1 {
                    return Err(Error::InvalidArgument(format!(
                        "real-remainder spec needs dim = laws + 1 >= 2, got dim {dim} with {} laws",
                        laws.len()
                    )));
                }
                for law in laws {
                    law.validate()?;
                    let (lo, hi) = law.support();
                    if lo < -1.0 - eps || hi > 1.0 + eps {
                        return Err(Error::InvalidLaw(format!(
                            "coefficient law support [{lo}, {hi}] exceeds [-1, 1]"
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    /// State-space dimension.
    pub fn dim(&self) -> usize {
        match self {
            RcpsSpec::TwoLevelPolar { .. } => 2,
            RcpsSpec::RealRemainder { dim, .. } => *dim,
        }
    }

    /// Hex digest of the canonical JSON form; recorded alongside
    /// measurement data for provenance.
    pub fn digest(&self) -> String {
        let json = serde_json::to_string(self).expect("spec serializes");
        let hash = Sha256::digest(json.as_bytes());
        hash.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Draws one realization.
    pub fn sample_realization<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<StateVector> {
        self.sample_realization_counted(rng).map(|(psi, _)| psi)
    }

    /// Draws one realization and reports how many rejected draws it took.
    pub fn sample_realization_counted<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
    ) -> Result<(StateVector, u64)> {
        match self {
            RcpsSpec::TwoLevelPolar { alpha_law, phase_law } => {
                let alpha = alpha_law.sample(rng).clamp(0.0, 1.0);
                let phi = phase_law.sample(rng);
                let beta = (1.0 - alpha * alpha).max(0.0).sqrt();
                let psi = StateVector::new(vec![
                    Complex64::new(alpha, 0.0),
                    Complex64::from_polar(beta, phi),
                ])?;
                Ok((psi, 0))
            }
            RcpsSpec::RealRemainder { dim, laws } => {
                let mut rejections = 0u64;
                loop {
                    let coeffs: Vec<f64> = laws.iter().map(|law| law.sample(rng)).collect();
                    let sum_sq: f64 = coeffs.iter().map(|c| c * c).sum();
                    if sum_sq <= 1.0 {
                        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                        let remainder = sign * (1.0 - sum_sq).max(0.0).sqrt();
                        let mut amps = coeffs;
                        amps.push(remainder);
                        debug_assert_eq!(amps.len(), *dim);
                        return Ok((StateVector::from_real(&amps)?, rejections));
                    }
                    rejections += 1;
                    if rejections >= MAX_REJECTION_ATTEMPTS {
                        return Err(Error::Sampling(format!(
                            "rejected {rejections} consecutive draws: the coefficient laws \
                             put almost no mass on sum c_i^2 <= 1"
                        )));
                    }
                }
            }
        }
    }

    /// Closed-form density operator `r_lk = E{c_k* c_l}`.
    ///
    /// Supported for any two-level polar spec and for real-remainder specs
    /// with d = 2 (where the simplex constraint never rejects). For d >= 3
    /// rejection sampling conditions the draws on `sum c_i^2 <= 1`, which
    /// changes the marginal laws, so no closed form is offered; use
    /// [`RcpsSpec::monte_carlo_density`] there.
    pub fn analytic_density(&self) -> Result<DensityMatrix> {
        match self {
            RcpsSpec::TwoLevelPolar { alpha_law, phase_law } => {
                let m2 = alpha_law.raw_moment(2);
                let cross = alpha_law.expect(|a| a * (1.0 - a * a).max(0.0).sqrt());
                let circ = phase_law.circular_mean()?;
                // r_{10} = E{c_0^* c_1} = E{alpha sqrt(1-alpha^2)} E{e^{i phi}}
                let lower = circ * cross;
                let mat = DMatrix::from_row_slice(
                    2,
                    2,
                    &[
                        Complex64::new(m2, 0.0),
                        lower.conj(),
                        lower,
                        Complex64::new(1.0 - m2, 0.0),
                    ],
                );
                DensityMatrix::new(mat)
            }
            RcpsSpec::RealRemainder { dim, laws } => {
                if *dim != 2 {
                    return Err(Error::Unsupported(format!(
                        "no closed-form density for real-remainder specs with d = {dim}: \
                         rejection sampling on the simplex constraint perturbs the marginal \
                         laws; use monte_carlo_density instead"
                    )));
                }
                // the centered independent sign zeroes the off-diagonals
                let m2 = laws[0].raw_moment(2);
                DensityMatrix::from_diagonal(&[m2, 1.0 - m2])
            }
        }
    }

    /// Average of `n_samples` sampled projectors. Hermitian by construction;
    /// the trace is renormalized to remove float drift. Converges to
    /// [`RcpsSpec::analytic_density`] at the Monte Carlo rate O(n^{-1/2}).
    pub fn monte_carlo_density<R: Rng + ?Sized>(
        &self,
        n_samples: u64,
        rng: &mut R,
    ) -> Result<DensityMatrix> {
        if n_samples == 0 {
            return Err(Error::InvalidArgument("monte_carlo_density needs n_samples >= 1".into()));
        }
        let d = self.dim();
        let mut acc = DMatrix::<Complex64>::zeros(d, d);
        let mut attempts = 0u64;
        let mut successes = 0u64;
        for _ in 0..n_samples {
            let (psi, rejections) = self.sample_realization_counted(rng)?;
            attempts += rejections + 1;
            successes += 1;
            if attempts >= MAX_REJECTION_ATTEMPTS && successes * 100 < attempts {
                return Err(Error::Sampling(format!(
                    "{successes} accepted draws out of {attempts} attempts: the coefficient \
                     laws put almost no mass on sum c_i^2 <= 1"
                )));
            }
            let amps = psi.amplitudes();
            for l in 0..d {
                for k in 0..d {
                    acc[(l, k)] += amps[l] * amps[k].conj();
                }
            }
        }
        let trace: f64 = (0..d).map(|i| acc[(i, i)].re).sum();
        DensityMatrix::new(acc.map(|c| c / trace))
    }

    /// E{p_+^k}: the k-th raw moment of the random outcome probability of
    /// the tracked basis outcome. For a two-level polar spec the outcome
    /// probability is `alpha^2`, so this is the 2k-th moment of the alpha
    /// law.
    pub fn outcome_probability_moment(&self, order: u32) -> Result<f64> {
        if order == 0 {
            return Err(Error::InvalidArgument("moment order must be >= 1".into()));
        }
        match self {
            RcpsSpec::TwoLevelPolar { alpha_law, .. } => Ok(alpha_law.raw_moment(2 * order)),
            RcpsSpec::RealRemainder { .. } => Err(Error::Unsupported(
                "outcome-probability moments for real-remainder specs need joint-law \
                 integration over the simplex and are not provided"
                    .into(),
            )),
        }
    }
}

/// Compares outcome-probability moments of two two-level specs for
/// k = 1..=max_order.
pub fn compare_specs(a: &RcpsSpec, b: &RcpsSpec, max_order: u32) -> Result<SpecComparison> {
    let orders: Vec<u32> = (1..=max_order).collect();
    let mut moments_a = Vec::with_capacity(orders.len());
    let mut moments_b = Vec::with_capacity(orders.len());
    let mut equal_flags = Vec::with_capacity(orders.len());
    for &k in &orders {
        let ma = a.outcome_probability_moment(k)?;
        let mb = b.outcome_probability_moment(k)?;
        equal_flags.push((ma - mb).abs() <= tol::MOMENT_EQUALITY_TOL);
        moments_a.push(ma);
        moments_b.push(mb);
    }
    Ok(SpecComparison { orders, moments_a, moments_b, equal_flags })
}

/// Builds an RCPS whose density operator is `diag(p)` in the eigenbasis of
/// a given density operator.
///
/// For the Gaussian and Laplace families the first d-1 coordinates get
/// centered truncated laws on [-1, 1] with second moment p_i; eigenvalues
/// are reordered ascending so the largest becomes the remainder coordinate
/// (the permutation is returned). Any non-remainder p_i at or above 1/3 is
/// infeasible: a centered truncated law on [-1, 1] cannot reach second
/// moment 1/3 (the uniform limit). The generic family (d = 2 only) uses a
/// deterministic modulus `sqrt(p_1)` with a uniform phase.
pub fn rcps_from_density(eigenvalues: &[f64], family: ConstructionFamily) -> Result<DensityConstruction> {
    if eigenvalues.len() < 2 {
        return Err(Error::InvalidArgument("need at least two eigenvalues".into()));
    }
    for &p in eigenvalues {
        if p.is_nan() || p < 0.0 {
            return Err(Error::InvalidArgument(format!("eigenvalue {p} is negative")));
        }
    }
    let total: f64 = eigenvalues.iter().sum();
    if (total - 1.0).abs() > tol::EIGENVALUE_SUM_TOL {
        return Err(Error::InvalidArgument(format!("eigenvalues sum to {total}, expected 1")));
    }

    match family {
        ConstructionFamily::Generic => {
            if eigenvalues.len() != 2 {
                return Err(Error::Unsupported(
                    "the generic construction is provided for d = 2 only".into(),
                ));
            }
            let spec = RcpsSpec::two_level_polar(
                ScalarLaw::Constant { value: eigenvalues[0].sqrt() },
                ScalarLaw::Uniform { lo: -std::f64::consts::PI, hi: std::f64::consts::PI },
            )?;
            Ok(DensityConstruction { spec, permutation: vec![0, 1] })
        }
        ConstructionFamily::Gaussian | ConstructionFamily::Laplace => {
            let truncated_family = match family {
                ConstructionFamily::Gaussian => TruncatedFamily::Gaussian,
                ConstructionFamily::Laplace => TruncatedFamily::Laplace,
                ConstructionFamily::Generic => unreachable!(),
            };
            let mut permutation: Vec<usize> = (0..eigenvalues.len()).collect();
            permutation.sort_by(|&i, &j| eigenvalues[i].total_cmp(&eigenvalues[j]));
            let mut laws = Vec::with_capacity(eigenvalues.len() - 1);
            for &idx in &permutation[..eigenvalues.len() - 1] {
                let p = eigenvalues[idx];
                if p == 0.0 {
                    laws.push(ScalarLaw::Constant { value: 0.0 });
                } else if p >= 1.0 / 3.0 {
                    return Err(Error::InfeasibleTarget { target: p, supremum: 1.0 / 3.0 });
                } else {
                    laws.push(solve_scale_for_target_second_moment(
                        truncated_family,
                        p,
                        (-1.0, 1.0),
                    )?);
                }
            }
            let spec = RcpsSpec::real_remainder(laws)?;
            Ok(DensityConstruction { spec, permutation })
        }
    }
}

impl DensityConstruction {
    /// The spec's analytic density with coordinates permuted back to the
    /// input eigenvalue order (d = 2 only, where the analytic density
    /// exists and is diagonal).
    pub fn density_in_input_order(&self) -> Result<DensityMatrix> {
        let diag = self.spec.analytic_density()?;
        let d = self.spec.dim();
        let mut probs = vec![0.0; d];
        for (coord, &orig) in self.permutation.iter().enumerate() {
            probs[orig] = diag.entry(coord, coord).re;
        }
        DensityMatrix::from_diagonal(&probs)
    }
}

/// The canonical degenerate pair: two two-point coefficient laws with a
/// uniform phase that share the density operator diag(0.2525, 0.7475) but
/// have fourth moments 0.06625625 and 0.19895.
pub fn degenerate_pair() -> (RcpsSpec, RcpsSpec) {
    let uniform_phase =
        ScalarLaw::Uniform { lo: -std::f64::consts::PI, hi: std::f64::consts::PI };
    let a = RcpsSpec::two_level_polar(
        ScalarLaw::Discrete { points: vec![(0.45, 0.5), (0.55, 0.5)] },
        uniform_phase.clone(),
    )
    .expect("pair A is valid");
    let b = RcpsSpec::two_level_polar(
        ScalarLaw::Discrete { points: vec![(0.9, 97.0 / 320.0), (0.1, 223.0 / 320.0)] },
        uniform_phase,
    )
    .expect("pair B is valid");
    (a, b)
}

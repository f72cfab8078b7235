//! Recovery of truncated-Gaussian parameters from outcome-probability
//! moments.
//!
//! A two-level state whose `alpha` follows a truncated Gaussian on [0, 1]
//! has E{p_+} and E{p_+^2} equal to the second and fourth moments of that
//! law, giving two equations for the two unknown parent parameters
//! (eta, sigma). E{s_z} alone fixes only the second moment — one equation,
//! two unknowns — which is exactly what the fourth-order information
//! resolves; [`solve_eta_for_second_moment`] produces the degenerate pairs
//! that demonstrate the gap.
//!
//! The fit minimizes the relative residual of the forward moments over a
//! coarse grid, then refines the best cells with a derivative-free
//! Nelder-Mead search. Multiple starts guard against the flat valley near
//! sigma -> 0; near-degenerate minima are reported in the candidate list
//! rather than hidden.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::law::ScalarLaw;

/// Residuals are measured relative to max(|moment|, this floor).
const RESIDUAL_SCALE_FLOOR: f64 = 1e-9;

/// Simplex spread below which the refinement is considered stationary.
const STATIONARITY_TOL: f64 = 1e-12;

/// Inverse problem description: target moments, search box, and solver
/// knobs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitProblem {
    /// Estimate of E{p_+}.
    pub m1: f64,
    /// Estimate of E{p_+^2}.
    pub m2: f64,
    /// Search bounds for the parent location. Wider than [0, 1] because
    /// truncation makes exterior locations meaningful.
    pub eta_bounds: (f64, f64),
    /// Search bounds for the parent scale.
    pub sigma_bounds: (f64, f64),
    /// Coarse grid resolution (eta cells, sigma cells).
    pub grid_resolution: (usize, usize),
    /// Residual norm below which the fit counts as converged.
    pub residual_tolerance: f64,
    /// Iteration budget for each local refinement.
    pub max_refinement_iterations: usize,
}

impl FitProblem {
    pub fn new(m1: f64, m2: f64) -> Self {
        Self {
            m1,
            m2,
            eta_bounds: (-0.5, 1.5),
            sigma_bounds: (1e-3, 2.0),
            grid_resolution: (40, 40),
            residual_tolerance: 1e-10,
            max_refinement_iterations: 500,
        }
    }

    /// Builds a problem from estimated moments; the list must contain the
    /// orders 1 and 2.
    pub fn from_estimates(estimates: &[crate::measurement::ProbabilityMomentEstimate]) -> Result<Self> {
        let find = |order: u32| {
            estimates.iter().find(|e| e.order == order).map(|e| e.value).ok_or_else(|| {
                Error::InvalidArgument(format!("estimates must include order {order}"))
            })
        };
        Ok(Self::new(find(1)?, find(2)?))
    }
}

/// One local minimum found by the scan.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FitCandidate {
    pub eta: f64,
    pub sigma: f64,
    pub residual: f64,
}

/// Outcome of [`fit_truncated_gaussian`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitResult {
    pub eta_hat: f64,
    pub sigma_hat: f64,
    pub residual_norm: f64,
    pub converged: bool,
    /// Local minima ranked by (residual, sigma, eta).
    pub candidates: Vec<FitCandidate>,
    /// Jacobian of the forward moments at the solution,
    /// rows (m1, m2) x columns (eta, sigma), by central differences.
    pub sensitivity: [[f64; 2]; 2],
}

/// Feasibility classification of a moment pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MomentFeasibility {
    Ok,
    /// m1 outside [0, 1].
    MeanOutOfRange { m1: f64 },
    /// m2 < m1^2 contradicts Jensen's inequality.
    JensenViolated { m1: f64, m2: f64 },
    /// m2 > m1 is impossible for a probability (p^2 <= p on [0, 1]).
    SupportBoundViolated { m1: f64, m2: f64 },
}

impl std::fmt::Display for MomentFeasibility {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MomentFeasibility::Ok => write!(f, "feasible"),
            MomentFeasibility::MeanOutOfRange { m1 } => {
                write!(f, "mean bound violated: m1 = {m1} is outside [0, 1]")
            }
            MomentFeasibility::JensenViolated { m1, m2 } => {
                write!(f, "Jensen violated: m2 = {m2} < m1^2 = {}", m1 * m1)
            }
            MomentFeasibility::SupportBoundViolated { m1, m2 } => {
                write!(f, "support bound violated: m2 = {m2} > m1 = {m1}")
            }
        }
    }
}

/// Checks whether `(m1, m2)` can be moments of a probability on [0, 1].
pub fn feasibility_check(m1: f64, m2: f64) -> MomentFeasibility {
    if !(0.0..=1.0).contains(&m1) {
        return MomentFeasibility::MeanOutOfRange { m1 };
    }
    if m2 < m1 * m1 {
        return MomentFeasibility::JensenViolated { m1, m2 };
    }
    if m2 > m1 {
        return MomentFeasibility::SupportBoundViolated { m1, m2 };
    }
    MomentFeasibility::Ok
}

/// The forward map: (E{alpha^2}, E{alpha^4}) of the Gaussian with parent
/// location `eta` and parent scale `sigma`, truncated to [0, 1].
pub fn forward_moments(eta: f64, sigma: f64) -> (f64, f64) {
    assert!(sigma > 0.0, "sigma must be positive");
    let law = ScalarLaw::TruncatedGaussian { loc: eta, scale: sigma, support: (0.0, 1.0) };
    let m2 = law.raw_moment(2);
    let m4 = law.raw_moment(4);
    debug_assert!(m4 <= m2 + 1e-12, "E{{alpha^4}} must not exceed E{{alpha^2}}");
    (m2, m4)
}

/// Finds `eta` such that the truncated Gaussian at fixed `sigma` has
/// E{alpha^2} equal to `target`; the second moment is monotone increasing
/// in the location, so this is a bisection. Returns `None` when the target
/// is not bracketed by the bounds.
pub fn solve_eta_for_second_moment(target: f64, sigma: f64, eta_bounds: (f64, f64)) -> Option<f64> {
    let m2 = |eta: f64| forward_moments(eta, sigma).0;
    let (mut lo, mut hi) = eta_bounds;
    if m2(lo) > target || m2(hi) < target {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = m2(mid);
        if (v - target).abs() <= 1e-13 {
            return Some(mid);
        }
        if v < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

fn residual_norm(problem: &FitProblem, eta: f64, sigma: f64) -> f64 {
    let (f1, f2) = forward_moments(eta, sigma);
    let s1 = problem.m1.abs().max(RESIDUAL_SCALE_FLOOR);
    let s2 = problem.m2.abs().max(RESIDUAL_SCALE_FLOOR);
    (((f1 - problem.m1) / s1).powi(2) + ((f2 - problem.m2) / s2).powi(2)).sqrt()
}

/// Solves the two-moment system for (eta, sigma).
///
/// Infeasible moment pairs are rejected up front. A coarse grid (linear in
/// eta, log-spaced in sigma) seeds Nelder-Mead refinements from the five
/// best cells; ties between minima break toward smaller residual, then
/// smaller sigma, then smaller eta. `converged` is true when the best
/// residual norm is below the problem tolerance or the refinement went
/// stationary at that minimum.
pub fn fit_truncated_gaussian(problem: &FitProblem) -> Result<FitResult> {
    match feasibility_check(problem.m1, problem.m2) {
        MomentFeasibility::Ok => {}
        violation => return Err(Error::InfeasibleMoments(violation)),
    }
    let (eta_cells, sigma_cells) = problem.grid_resolution;
    if eta_cells < 2 || sigma_cells < 2 {
        return Err(Error::InvalidArgument("grid must have at least 2x2 cells".into()));
    }
    let (eta_lo, eta_hi) = problem.eta_bounds;
    let (sig_lo, sig_hi) = problem.sigma_bounds;
    if !(eta_lo < eta_hi && 0.0 < sig_lo && sig_lo < sig_hi) {
        return Err(Error::InvalidArgument("fit bounds are not ordered".into()));
    }

    let eta_at = |i: usize| eta_lo + (eta_hi - eta_lo) * i as f64 / (eta_cells - 1) as f64;
    let log_lo = sig_lo.ln();
    let log_hi = sig_hi.ln();
    let sigma_at =
        |j: usize| (log_lo + (log_hi - log_lo) * j as f64 / (sigma_cells - 1) as f64).exp();

    let mut cells: Vec<(f64, f64, f64)> = Vec::with_capacity(eta_cells * sigma_cells);
    for i in 0..eta_cells {
        for j in 0..sigma_cells {
            let (eta, sigma) = (eta_at(i), sigma_at(j));
            cells.push((residual_norm(problem, eta, sigma), sigma, eta));
        }
    }
    cells.sort_by(|a, b| {
        a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.total_cmp(&b.2))
    });

    let eta_step = (eta_hi - eta_lo) / (eta_cells - 1) as f64;
    let mut candidates: Vec<(FitCandidate, bool)> = Vec::new();
    for &(_, sigma0, eta0) in cells.iter().take(5) {
        let refined = nelder_mead(
            |eta, sigma| residual_norm(problem, eta, sigma),
            (eta0, sigma0),
            (0.5 * eta_step, 0.25 * sigma0),
            problem.eta_bounds,
            problem.sigma_bounds,
            problem.max_refinement_iterations,
        );
        let candidate = FitCandidate {
            eta: refined.eta,
            sigma: refined.sigma,
            residual: refined.residual,
        };
        // drop duplicates of an already-found minimum
        let duplicate = candidates.iter().any(|(c, _)| {
            (c.eta - candidate.eta).abs() < 1e-6 && (c.sigma - candidate.sigma).abs() < 1e-6
        });
        if !duplicate {
            candidates.push((candidate, refined.stationary));
        }
    }
    candidates.sort_by(|(a, _), (b, _)| {
        a.residual
            .total_cmp(&b.residual)
            .then(a.sigma.total_cmp(&b.sigma))
            .then(a.eta.total_cmp(&b.eta))
    });

    let (best, best_stationary) = candidates[0];
    let converged = best.residual <= problem.residual_tolerance || best_stationary;
    let sensitivity = forward_jacobian(best.eta, best.sigma);
    Ok(FitResult {
        eta_hat: best.eta,
        sigma_hat: best.sigma,
        residual_norm: best.residual,
        converged,
        candidates: candidates.into_iter().map(|(c, _)| c).collect(),
        sensitivity,
    })
}

/// Central-difference Jacobian of [`forward_moments`].
pub fn forward_jacobian(eta: f64, sigma: f64) -> [[f64; 2]; 2] {
    let h_eta = 1e-6;
    let h_sigma = (1e-6_f64).min(0.5 * sigma);
    let (m1_ep, m2_ep) = forward_moments(eta + h_eta, sigma);
    let (m1_em, m2_em) = forward_moments(eta - h_eta, sigma);
    let (m1_sp, m2_sp) = forward_moments(eta, sigma + h_sigma);
    let (m1_sm, m2_sm) = forward_moments(eta, sigma - h_sigma);
    [
        [(m1_ep - m1_em) / (2.0 * h_eta), (m1_sp - m1_sm) / (2.0 * h_sigma)],
        [(m2_ep - m2_em) / (2.0 * h_eta), (m2_sp - m2_sm) / (2.0 * h_sigma)],
    ]
}

struct Refined {
    eta: f64,
    sigma: f64,
    residual: f64,
    stationary: bool,
}

/// Two-dimensional Nelder-Mead with box clamping.
fn nelder_mead<F: Fn(f64, f64) -> f64>(
    f: F,
    start: (f64, f64),
    step: (f64, f64),
    eta_bounds: (f64, f64),
    sigma_bounds: (f64, f64),
    max_iterations: usize,
) -> Refined {
    let clamp = |p: (f64, f64)| {
        (p.0.clamp(eta_bounds.0, eta_bounds.1), p.1.clamp(sigma_bounds.0, sigma_bounds.1))
    };
    let eval = |p: (f64, f64)| f(p.0, p.1);

    let mut simplex: Vec<((f64, f64), f64)> = vec![
        clamp(start),
        clamp((start.0 + step.0, start.1)),
        clamp((start.0, start.1 + step.1)),
    ]
    .into_iter()
    .map(|p| (p, eval(p)))
    .collect();

    let mut stationary = false;
    for _ in 0..max_iterations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread_f = simplex[2].1 - simplex[0].1;
        let spread_x = (simplex[2].0 .0 - simplex[0].0 .0)
            .abs()
            .max((simplex[2].0 .1 - simplex[0].0 .1).abs());
        if spread_f.abs() < STATIONARITY_TOL && spread_x < STATIONARITY_TOL {
            stationary = true;
            break;
        }

        let best = simplex[0];
        let worst = simplex[2];
        let centroid = (
            0.5 * (simplex[0].0 .0 + simplex[1].0 .0),
            0.5 * (simplex[0].0 .1 + simplex[1].0 .1),
        );
        let reflect = clamp((
            centroid.0 + (centroid.0 - worst.0 .0),
            centroid.1 + (centroid.1 - worst.0 .1),
        ));
        let f_reflect = eval(reflect);

        if f_reflect < best.1 {
            let expand = clamp((
                centroid.0 + 2.0 * (centroid.0 - worst.0 .0),
                centroid.1 + 2.0 * (centroid.1 - worst.0 .1),
            ));
            let f_expand = eval(expand);
            simplex[2] = if f_expand < f_reflect { (expand, f_expand) } else { (reflect, f_reflect) };
        } else if f_reflect < simplex[1].1 {
            simplex[2] = (reflect, f_reflect);
        } else {
            let contract = clamp((
                centroid.0 + 0.5 * (worst.0 .0 - centroid.0),
                centroid.1 + 0.5 * (worst.0 .1 - centroid.1),
            ));
            let f_contract = eval(contract);
            if f_contract < worst.1 {
                simplex[2] = (contract, f_contract);
            } else {
                // shrink toward the best vertex
                for vertex in simplex.iter_mut().skip(1) {
                    let p = clamp((
                        best.0 .0 + 0.5 * (vertex.0 .0 - best.0 .0),
                        best.0 .1 + 0.5 * (vertex.0 .1 - best.0 .1),
                    ));
                    *vertex = (p, eval(p));
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    Refined {
        eta: simplex[0].0 .0,
        sigma: simplex[0].0 .1,
        residual: simplex[0].1,
        stationary,
    }
}

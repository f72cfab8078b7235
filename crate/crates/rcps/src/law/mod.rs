//! Probability laws for RCPS coefficients and phases.
//!
//! A [`ScalarLaw`] is a law on a real coefficient or phase. Continuous laws
//! are restricted to compact supports (the normalization constraint on state
//! coefficients forbids unbounded laws). Truncated laws are parameterized by
//! the *parent* location/scale: `loc` and `scale` describe the Gaussian or
//! Laplace density before restriction to the support, not the mean and
//! standard deviation after truncation.
//!
//! Raw moments of the truncated laws are computed by adaptive quadrature on
//! the standardized integrand; an independent erf-based closed form is
//! provided for truncated-Gaussian moments so the two routes can be checked
//! against each other. Sampling uses inverse transform on the truncated
//! mass, which guarantees samples stay inside the support without rejection
//! loops.

pub mod quadrature;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::erf::{erf_inv, erfc_inv};

use crate::error::{Error, Result};
use crate::tol;

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Exponent magnitude beyond which `exp(-x)` underflows; used to clip
/// standardized integration ranges.
const EXP_UNDERFLOW: f64 = 708.0;

/// A probability law on a real scalar (a state coefficient or a phase).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ScalarLaw {
    /// Degenerate law: the value `v` with probability 1.
    Constant { value: f64 },
    /// Finitely supported law given as `(value, weight)` pairs; weights sum
    /// to 1.
    Discrete { points: Vec<(f64, f64)> },
    /// Gaussian with parent location `loc` and parent scale `scale`,
    /// restricted and renormalized to `support`.
    TruncatedGaussian { loc: f64, scale: f64, support: (f64, f64) },
    /// Laplace with parent location `loc` and parent scale `scale`,
    /// restricted and renormalized to `support`.
    TruncatedLaplace { loc: f64, scale: f64, support: (f64, f64) },
    /// Uniform law on [lo, hi].
    Uniform { lo: f64, hi: f64 },
}

/// Continuous truncated family selector for scale solving.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruncatedFamily {
    Gaussian,
    Laplace,
}

impl ScalarLaw {
    /// Checks the structural invariants of the law.
    pub fn validate(&self) -> Result<()> {
        let finite = |v: f64, what: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidLaw(format!("{what} must be finite, got {v}")))
            }
        };
        match self {
            ScalarLaw::Constant { value } => finite(*value, "constant value"),
            ScalarLaw::Discrete { points } => {
                if points.is_empty() {
                    return Err(Error::InvalidLaw("discrete law needs at least one point".into()));
                }
                let mut total = 0.0;
                for &(v, w) in points {
                    finite(v, "discrete value")?;
                    finite(w, "discrete weight")?;
                    if w < 0.0 {
                        return Err(Error::InvalidLaw(format!("negative weight {w}")));
                    }
                    total += w;
                }
                if (total - 1.0).abs() > tol::DISCRETE_WEIGHT_TOL {
                    return Err(Error::InvalidLaw(format!(
                        "discrete weights sum to {total}, expected 1"
                    )));
                }
                Ok(())
            }
            ScalarLaw::TruncatedGaussian { loc, scale, support }
            | ScalarLaw::TruncatedLaplace { loc, scale, support } => {
                finite(*loc, "location")?;
                finite(*scale, "scale")?;
                finite(support.0, "support lower bound")?;
                finite(support.1, "support upper bound")?;
                if *scale <= 0.0 {
                    return Err(Error::InvalidLaw(format!("scale must be positive, got {scale}")));
                }
                if support.0 >= support.1 {
                    return Err(Error::InvalidLaw(format!(
                        "support [{}, {}] is empty",
                        support.0, support.1
                    )));
                }
                Ok(())
            }
            ScalarLaw::Uniform { lo, hi } => {
                finite(*lo, "lo")?;
                finite(*hi, "hi")?;
                if lo >= hi {
                    return Err(Error::InvalidLaw(format!("uniform bounds [{lo}, {hi}] are empty")));
                }
                Ok(())
            }
        }
    }

    /// Smallest closed interval containing all mass of the law.
    pub fn support(&self) -> (f64, f64) {
        match self {
            ScalarLaw::Constant { value } => (*value, *value),
            ScalarLaw::Discrete { points } => {
                let lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
                let hi = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
                (lo, hi)
            }
            ScalarLaw::TruncatedGaussian { support, .. }
            | ScalarLaw::TruncatedLaplace { support, .. } => *support,
            ScalarLaw::Uniform { lo, hi } => (*lo, *hi),
        }
    }

    /// True for the continuous variants (those with a density).
    pub fn is_continuous(&self) -> bool {
        matches!(
            self,
            ScalarLaw::TruncatedGaussian { .. }
                | ScalarLaw::TruncatedLaplace { .. }
                | ScalarLaw::Uniform { .. }
        )
    }

    /// Probability density at `x`. Zero outside the support (not an error);
    /// discrete and constant laws have no density.
    ///
    /// The truncated densities use erf/exponential closed forms for the
    /// normalizing mass; they are accurate while the standardized support
    /// bounds stay within roughly ±37 (beyond that the truncation mass
    /// underflows in double precision).
    pub fn pdf(&self, x: f64) -> Result<f64> {
        match self {
            ScalarLaw::Constant { .. } | ScalarLaw::Discrete { .. } => Err(Error::Unsupported(
                "pdf is only defined for continuous laws".into(),
            )),
            ScalarLaw::Uniform { lo, hi } => {
                if x < *lo || x > *hi {
                    Ok(0.0)
                } else {
                    Ok(1.0 / (hi - lo))
                }
            }
            ScalarLaw::TruncatedGaussian { loc, scale, support } => {
                if x < support.0 || x > support.1 {
                    return Ok(0.0);
                }
                let z = (x - loc) / scale;
                let mass = normal_cdf((support.1 - loc) / scale) - normal_cdf((support.0 - loc) / scale);
                Ok((-0.5 * z * z).exp() / ((TWO_PI).sqrt() * scale * mass))
            }
            ScalarLaw::TruncatedLaplace { loc, scale, support } => {
                if x < support.0 || x > support.1 {
                    return Ok(0.0);
                }
                let z = (x - loc) / scale;
                let mass = laplace_cdf((support.1 - loc) / scale) - laplace_cdf((support.0 - loc) / scale);
                Ok((-z.abs()).exp() / (2.0 * scale * mass))
            }
        }
    }

    /// Expectation of `f` under the law.
    ///
    /// Exact (finite sums, closed forms) for constant and discrete laws;
    /// adaptive quadrature to [`tol::QUADRATURE_TOL`] for the continuous
    /// ones. Truncated laws are integrated in standardized coordinates with
    /// the peak density factored out, which keeps the computation stable for
    /// arbitrarily small scales and locations far outside the support.
    pub fn expect<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        match self {
            ScalarLaw::Constant { value } => f(*value),
            ScalarLaw::Discrete { points } => points.iter().map(|&(v, w)| w * f(v)).sum(),
            ScalarLaw::Uniform { lo, hi } => {
                quadrature::integrate(&f, *lo, *hi, tol::QUADRATURE_TOL) / (hi - lo)
            }
            ScalarLaw::TruncatedGaussian { loc, scale, support } => {
                truncated_expect(*loc, *scale, *support, LogWeight::Gaussian, f)
            }
            ScalarLaw::TruncatedLaplace { loc, scale, support } => {
                truncated_expect(*loc, *scale, *support, LogWeight::Laplace, f)
            }
        }
    }

    /// Raw moment E{X^k}, k >= 1. Exact for constant, discrete, and uniform
    /// laws; quadrature for the truncated ones.
    pub fn raw_moment(&self, k: u32) -> f64 {
        assert!(k >= 1, "raw moments are defined for k >= 1");
        match self {
            ScalarLaw::Constant { value } => value.powi(k as i32),
            ScalarLaw::Discrete { points } => {
                points.iter().map(|&(v, w)| w * v.powi(k as i32)).sum()
            }
            ScalarLaw::Uniform { lo, hi } => {
                let p = k as i32 + 1;
                (hi.powi(p) - lo.powi(p)) / (f64::from(k + 1) * (hi - lo))
            }
            _ => self.expect(|x| x.powi(k as i32)),
        }
    }

    /// Draws one sample. Inverse transform is used for the continuous laws,
    /// so every sample lies inside the support.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            ScalarLaw::Constant { value } => *value,
            ScalarLaw::Discrete { points } => {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                for &(v, w) in points {
                    acc += w;
                    if u < acc {
                        return v;
                    }
                }
                points.last().expect("validated non-empty").0
            }
            ScalarLaw::Uniform { lo, hi } => lo + (hi - lo) * rng.gen::<f64>(),
            ScalarLaw::TruncatedGaussian { loc, scale, support } => {
                let u: f64 = rng.gen();
                let z = truncated_gaussian_quantile((support.0 - loc) / scale, (support.1 - loc) / scale, u);
                (loc + scale * z).clamp(support.0, support.1)
            }
            ScalarLaw::TruncatedLaplace { loc, scale, support } => {
                let u: f64 = rng.gen();
                let a = (support.0 - loc) / scale;
                let b = (support.1 - loc) / scale;
                let z = if a >= 0.0 {
                    // upper tail: interpolate the survival function 0.5 e^{-z}
                    let sa = 0.5 * (-a).exp();
                    let sb = 0.5 * (-b).exp();
                    -(2.0 * (sa + u * (sb - sa))).ln()
                } else if b <= 0.0 {
                    let fa = 0.5 * a.exp();
                    let fb = 0.5 * b.exp();
                    (2.0 * (fa + u * (fb - fa))).ln()
                } else {
                    let p = laplace_cdf(a) + u * (laplace_cdf(b) - laplace_cdf(a));
                    if p < 0.5 { (2.0 * p).ln() } else { -(2.0 * (1.0 - p)).ln() }
                };
                // an underflowed truncation mass leaves all mass at the
                // endpoint nearest the parent location
                let z = if z.is_finite() { z } else { 0.0_f64.clamp(a, b) };
                (loc + scale * z).clamp(support.0, support.1)
            }
        }
    }

    /// E{e^{i phi}} for a phase law: E{cos phi} + i E{sin phi}.
    ///
    /// A uniform law spanning one full period returns exactly zero (the mean
    /// of a complex exponential over a full period vanishes identically).
    /// Errors if the support extends beyond [-pi, pi].
    pub fn circular_mean(&self) -> Result<Complex64> {
        let (lo, hi) = self.support();
        let bound = std::f64::consts::PI + 1e-12;
        if lo < -bound || hi > bound {
            return Err(Error::InvalidLaw(format!(
                "phase law support [{lo}, {hi}] exceeds [-pi, pi]"
            )));
        }
        match self {
            ScalarLaw::Constant { value } => Ok(Complex64::new(value.cos(), value.sin())),
            ScalarLaw::Discrete { points } => Ok(points
                .iter()
                .map(|&(v, w)| Complex64::new(w * v.cos(), w * v.sin()))
                .sum()),
            ScalarLaw::Uniform { lo, hi } => {
                let span = hi - lo;
                if (span - TWO_PI).abs() <= 4.0 * f64::EPSILON * TWO_PI {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                Ok(Complex64::new(
                    (hi.sin() - lo.sin()) / span,
                    (lo.cos() - hi.cos()) / span,
                ))
            }
            _ => Ok(Complex64::new(self.expect(f64::cos), self.expect(f64::sin))),
        }
    }
}

/// Solves for the scale of a centered truncated law on a symmetric support
/// so that its second moment equals `target`.
///
/// The second moment grows monotonically with the scale from 0 toward the
/// uniform limit `hi^2/3`, so the solve is a bisection. Targets at or above
/// that supremum are reported as infeasible.
pub fn solve_scale_for_target_second_moment(
    family: TruncatedFamily,
    target: f64,
    support: (f64, f64),
) -> Result<ScalarLaw> {
    let (lo, hi) = support;
    if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
        return Err(Error::InvalidLaw(format!("support [{lo}, {hi}] is empty")));
    }
    if (lo + hi).abs() > 1e-12 {
        return Err(Error::InvalidLaw(format!(
            "support [{lo}, {hi}] must be symmetric about 0"
        )));
    }
    if target <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "target second moment must be positive, got {target}"
        )));
    }
    let supremum = hi * hi / 3.0;
    if target >= supremum {
        return Err(Error::InfeasibleTarget { target, supremum });
    }

    let law = |scale: f64| match family {
        TruncatedFamily::Gaussian => ScalarLaw::TruncatedGaussian { loc: 0.0, scale, support },
        TruncatedFamily::Laplace => ScalarLaw::TruncatedLaplace { loc: 0.0, scale, support },
    };
    let residual = |scale: f64| law(scale).raw_moment(2) - target;

    let (mut s_lo, mut s_hi) = (1e-6, 1e3);
    let mut best = s_hi;
    for _ in 0..200 {
        let mid = 0.5 * (s_lo + s_hi);
        let r = residual(mid);
        best = mid;
        if r.abs() <= tol::SCALE_SOLVE_MOMENT_TOL {
            break;
        }
        if r < 0.0 {
            s_lo = mid;
        } else {
            s_hi = mid;
        }
    }
    let solved = law(best);
    let achieved = solved.raw_moment(2);
    if (achieved - target).abs() > tol::SCALE_SOLVE_VERIFY_TOL {
        return Err(Error::ScaleSolveFailed { target, achieved });
    }
    Ok(solved)
}

/// Raw moment E{X^k} of a truncated Gaussian via the erf-based closed form.
///
/// Standardized moments follow the recurrence
/// `L_j = (j-1) L_{j-2} + (a^{j-1} phi(a) - b^{j-1} phi(b)) / Z` with
/// `Z = Phi(b) - Phi(a)`, then `E{X^k}` comes from the binomial expansion of
/// `(loc + scale Z)^k`. Independent of the quadrature route; accurate while
/// the standardized bounds keep `Z` away from underflow.
pub fn truncated_gaussian_moment_closed_form(
    loc: f64,
    scale: f64,
    support: (f64, f64),
    k: u32,
) -> f64 {
    let a = (support.0 - loc) / scale;
    let b = (support.1 - loc) / scale;
    let phi = |z: f64| (-0.5 * z * z).exp() / (TWO_PI).sqrt();
    let mass = normal_cdf(b) - normal_cdf(a);

    let k = k as usize;
    let mut std_moments = vec![0.0; k + 1];
    std_moments[0] = 1.0;
    if k >= 1 {
        std_moments[1] = (phi(a) - phi(b)) / mass;
    }
    for j in 2..=k {
        let boundary = (a.powi(j as i32 - 1) * phi(a) - b.powi(j as i32 - 1) * phi(b)) / mass;
        std_moments[j] = (j as f64 - 1.0) * std_moments[j - 2] + boundary;
    }

    let mut total = 0.0;
    let mut binom = 1.0;
    for (j, lj) in std_moments.iter().enumerate() {
        total += binom * loc.powi((k - j) as i32) * scale.powi(j as i32) * lj;
        binom *= (k - j) as f64 / (j as f64 + 1.0);
    }
    total
}

/// Standard normal CDF via erf.
fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / SQRT_2)
}

/// Standard Laplace CDF (location 0, scale 1).
fn laplace_cdf(z: f64) -> f64 {
    if z < 0.0 {
        0.5 * z.exp()
    } else {
        1.0 - 0.5 * (-z).exp()
    }
}

/// Quantile of the standard normal restricted to [a, b], at truncated-mass
/// fraction `u`. Uses the complementary form on whichever tail the support
/// sits in, so single-tail truncations stay accurate.
fn truncated_gaussian_quantile(a: f64, b: f64, u: f64) -> f64 {
    let z = if a >= 0.0 {
        // upper tail: interpolate the survival function
        let sa = 0.5 * libm::erfc(a / SQRT_2);
        let sb = 0.5 * libm::erfc(b / SQRT_2);
        let s = sa + u * (sb - sa);
        SQRT_2 * erfc_inv(2.0 * s)
    } else if b <= 0.0 {
        let fa = 0.5 * libm::erfc(-a / SQRT_2);
        let fb = 0.5 * libm::erfc(-b / SQRT_2);
        let p = fa + u * (fb - fa);
        -SQRT_2 * erfc_inv(2.0 * p)
    } else {
        let fa = normal_cdf(a);
        let fb = normal_cdf(b);
        let p = fa + u * (fb - fa);
        SQRT_2 * erf_inv(2.0 * p - 1.0)
    };
    // if the truncation mass underflowed, all mass is within O(1/|z0|) of
    // the support endpoint closest to the parent location
    if z.is_finite() {
        z
    } else {
        0.0_f64.clamp(a, b)
    }
}

enum LogWeight {
    Gaussian,
    Laplace,
}

/// E{f(X)} for a truncated location-scale law, computed as a ratio of
/// quadratures over the standardized variable z = (x - loc)/scale.
///
/// The weight is normalized by its maximum on the support (taken at
/// z0 = clamp(0, a, b)) and the range is clipped where the weight
/// underflows, so the ratio stays well-conditioned even when the parent
/// location sits far outside the support or the scale is tiny.
fn truncated_expect<F: Fn(f64) -> f64>(
    loc: f64,
    scale: f64,
    support: (f64, f64),
    kind: LogWeight,
    f: F,
) -> f64 {
    let a = (support.0 - loc) / scale;
    let b = (support.1 - loc) / scale;
    let z0 = 0.0_f64.clamp(a, b);

    let (z_min, z_max) = match kind {
        LogWeight::Gaussian => {
            let reach = (z0 * z0 + 2.0 * EXP_UNDERFLOW).sqrt();
            (a.max(-reach), b.min(reach))
        }
        LogWeight::Laplace => {
            let reach = z0.abs() + EXP_UNDERFLOW;
            (a.max(-reach), b.min(reach))
        }
    };
    let log_weight = |z: f64| match kind {
        LogWeight::Gaussian => -0.5 * (z * z - z0 * z0),
        LogWeight::Laplace => -(z.abs() - z0.abs()),
    };

    // split panels at the weight's peak (and kink, for Laplace)
    let mut cuts = vec![z_min];
    if z0 > z_min && z0 < z_max {
        cuts.push(z0);
    }
    cuts.push(z_max);

    let mut num = 0.0;
    let mut den = 0.0;
    for pair in cuts.windows(2) {
        let weighted = |z: f64| log_weight(z).exp();
        num += quadrature::integrate(
            &|z: f64| f(loc + scale * z) * weighted(z),
            pair[0],
            pair[1],
            tol::QUADRATURE_TOL,
        );
        den += quadrature::integrate(&weighted, pair[0], pair[1], tol::QUADRATURE_TOL);
    }
    num / den
}

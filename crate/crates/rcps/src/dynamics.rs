//! Unitary time evolution of realizations and density operators.
//!
//! Hamiltonians are time-independent and evolution goes through the
//! Hermitian eigendecomposition, `U = V exp(-i Lambda t) V^dagger`, which is
//! exact at machine precision for the small dimensions this crate targets.
//! Units: hbar = 1, Hamiltonian entries in angular frequency, time in
//! inverse angular frequency.
//!
//! The density operator of a coefficient ensemble follows the
//! Liouville-von Neumann equation `i dr/dt = [H, r]`;
//! [`lvn_residual`] measures how well a trajectory satisfies it and
//! [`ensemble_consistency`] checks that evolving realizations individually
//! and evolving the ensemble density commute.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::ensemble::RcpsSpec;
use crate::error::{Error, Result};
use crate::quantum::{matrix_from_pairs, matrix_to_pairs, DensityMatrix, Observable, StateVector};

/// A Hermitian generator of time evolution (hbar = 1).
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    mat: DMatrix<Complex64>,
}

impl HamiltonianSpec {
    /// Validates Hermiticity within [`crate::tol::OBSERVABLE_HERMITICITY_TOL`].
    pub fn new(mat: DMatrix<Complex64>) -> Result<Self> {
        let obs = Observable::new(mat)?;
        Ok(Self { mat: obs.matrix().clone() })
    }

    /// Spin-1/2 coupling of strength `gb0` along the (theta, phi) axis;
    /// theta = 0 gives `gb0 * diag(1/2, -1/2)` and the eigenvalues are
    /// always +/- gb0 / 2.
    pub fn zeeman(gb0: f64, theta: f64, phi: f64) -> Self {
        let axis = Observable::spin_axis(theta, phi);
        Self { mat: axis.matrix().scale(gb0) }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    /// The unitary `exp(-i H t)`.
    fn propagator(&self, t: f64) -> DMatrix<Complex64> {
        let sym = (&self.mat + self.mat.adjoint()).scale(0.5);
        let eig = sym.symmetric_eigen();
        let phases = DMatrix::from_diagonal(
            &eig.eigenvalues.map(|lambda| Complex64::from_polar(1.0, -lambda * t)),
        );
        &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
    }
}

impl Serialize for HamiltonianSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        matrix_to_pairs(&self.mat).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for HamiltonianSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(deserializer)?;
        let mat = matrix_from_pairs(&rows).map_err(D::Error::custom)?;
        HamiltonianSpec::new(mat).map_err(D::Error::custom)
    }
}

/// `exp(-i H t) |psi>`; unitary, so the norm is preserved.
pub fn evolve_state(psi: &StateVector, h: &HamiltonianSpec, t: f64) -> Result<StateVector> {
    if psi.dim() != h.dim() {
        return Err(Error::DimensionMismatch { left: psi.dim(), right: h.dim() });
    }
    let amps = h.propagator(t) * nalgebra::DVector::from_column_slice(psi.amplitudes());
    StateVector::new(amps.iter().copied().collect())
}

/// `U rho U^dagger` with `U = exp(-i H t)`; trace, Hermiticity, and the
/// eigenvalue spectrum are preserved.
pub fn evolve_density(rho: &DensityMatrix, h: &HamiltonianSpec, t: f64) -> Result<DensityMatrix> {
    if rho.dim() != h.dim() {
        return Err(Error::DimensionMismatch { left: rho.dim(), right: h.dim() });
    }
    let u = h.propagator(t);
    DensityMatrix::new(&u * rho.matrix() * u.adjoint())
}

/// Max-entry norm of `i (rho(t+dt) - rho(t-dt)) / (2 dt) - [H, rho(t)]`.
///
/// For an exact trajectory the central difference leaves an O(dt^2)
/// discretization remainder, so halving dt shrinks the residual about
/// fourfold.
pub fn lvn_residual<F>(h: &HamiltonianSpec, rho_at: F, t: f64, dt: f64) -> f64
where
    F: Fn(f64) -> DensityMatrix,
{
    assert!(dt > 0.0, "dt must be positive");
    let plus = rho_at(t + dt);
    let minus = rho_at(t - dt);
    let center = rho_at(t);
    let derivative = (plus.matrix() - minus.matrix()).map(|c| Complex64::i() * c / (2.0 * dt));
    let commutator = h.matrix() * center.matrix() - center.matrix() * h.matrix();
    (derivative - commutator).iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Frobenius distance between the Monte Carlo density of individually
/// evolved realizations and the evolved analytic density of the spec.
///
/// Both paths describe the same ensemble, so the distance is pure Monte
/// Carlo noise and shrinks as O(n^{-1/2}).
pub fn ensemble_consistency<R: Rng + ?Sized>(
    spec: &RcpsSpec,
    h: &HamiltonianSpec,
    t: f64,
    n_samples: u64,
    rng: &mut R,
) -> Result<f64> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("ensemble_consistency needs n_samples >= 1".into()));
    }
    let d = spec.dim();
    if d != h.dim() {
        return Err(Error::DimensionMismatch { left: d, right: h.dim() });
    }
    let mut acc = DMatrix::<Complex64>::zeros(d, d);
    for _ in 0..n_samples {
        let psi = evolve_state(&spec.sample_realization(rng)?, h, t)?;
        let amps = psi.amplitudes();
        for l in 0..d {
            for k in 0..d {
                acc[(l, k)] += amps[l] * amps[k].conj();
            }
        }
    }
    let trace: f64 = (0..d).map(|i| acc[(i, i)].re).sum();
    let sampled = DensityMatrix::new(acc.map(|c| c / trace))?;
    let evolved = evolve_density(&spec.analytic_density()?, h, t)?;
    sampled.frobenius_distance(&evolved)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::degenerate_pair;
    use crate::law::ScalarLaw;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    const PI: f64 = std::f64::consts::PI;

    #[test]
    fn zeeman_axis_cases() {
        let hz = HamiltonianSpec::zeeman(1.0, 0.0, 0.0);
        assert_eq!(hz.matrix()[(0, 0)], Complex64::new(0.5, 0.0));
        assert_eq!(hz.matrix()[(1, 1)], Complex64::new(-0.5, 0.0));
        assert_eq!(hz.matrix()[(0, 1)].norm(), 0.0);

        let hx = HamiltonianSpec::zeeman(1.0, PI / 2.0, 0.0);
        assert!((hx.matrix()[(0, 1)].re - 0.5).abs() < 1e-15);
        assert!(hx.matrix()[(0, 0)].norm() < 1e-16);
    }

    #[test]
    fn zeeman_eigenvalues_are_half_gb0() {
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        for _ in 0..25 {
            let gb0 = 0.1 + 3.0 * rng.gen::<f64>();
            let theta = PI * rng.gen::<f64>();
            let phi = 2.0 * PI * rng.gen::<f64>() - PI;
            let h = HamiltonianSpec::zeeman(gb0, theta, phi);
            let sym = (h.matrix() + h.matrix().adjoint()).scale(0.5);
            let mut ev: Vec<f64> = sym.symmetric_eigen().eigenvalues.iter().copied().collect();
            ev.sort_by(f64::total_cmp);
            assert!((ev[0] + gb0 / 2.0).abs() < 1e-12);
            assert!((ev[1] - gb0 / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_time_is_identity() {
        let h = HamiltonianSpec::zeeman(1.3, 0.7, 0.2);
        let psi = StateVector::from_real(&[0.6, 0.8]).unwrap();
        let evolved = evolve_state(&psi, &h, 0.0).unwrap();
        for (a, b) in psi.amplitudes().iter().zip(evolved.amplitudes()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn eigenstate_picks_up_only_a_phase() {
        let h = HamiltonianSpec::zeeman(1.0, 0.0, 0.0);
        let up = StateVector::from_real(&[1.0, 0.0]).unwrap();
        let t = 1.7;
        let evolved = evolve_state(&up, &h, t).unwrap();
        let expected = Complex64::from_polar(1.0, -t / 2.0);
        assert!((evolved.amplitudes()[0] - expected).norm() < 1e-13);
        assert!(evolved.amplitudes()[1].norm() < 1e-13);
        let probs = evolved.born_probabilities();
        assert!((probs[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn precession_follows_the_closed_form() {
        // |+x> under gb0 s_z: probability of |+x> at time t is cos^2(t/2)
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = HamiltonianSpec::zeeman(1.0, 0.0, 0.0);
        let plus_x = StateVector::from_real(&[s, s]).unwrap();
        let sx_projector = Observable::new(plus_x.projector().matrix().clone()).unwrap();
        for t in [0.0, 0.4, 1.1, 2.9] {
            let evolved = evolve_state(&plus_x, &h, t).unwrap();
            let p = evolved.expectation(&sx_projector).unwrap();
            assert!((p - (t / 2.0).cos().powi(2)).abs() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn norm_is_preserved() {
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        for _ in 0..100 {
            let raw: Vec<Complex64> = (0..3)
                .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            let norm: f64 = raw.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            let psi = StateVector::new(raw.into_iter().map(|c| c / norm).collect()).unwrap();
            let g = DMatrix::from_fn(3, 3, |_, _| {
                Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            });
            let h = HamiltonianSpec::new((&g + g.adjoint()).scale(0.5)).unwrap();
            let t = 4.0 * rng.gen::<f64>() - 2.0;
            let evolved = evolve_state(&psi, &h, t).unwrap();
            let n: f64 = evolved.amplitudes().iter().map(|c| c.norm_sqr()).sum();
            assert!((n - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn density_evolution_preserves_spectrum_and_commuting_states() {
        let h = HamiltonianSpec::zeeman(1.0, 0.0, 0.0);
        let mixed = DensityMatrix::maximally_mixed(2);
        let evolved = evolve_density(&mixed, &h, 2.3).unwrap();
        assert!(evolved.frobenius_distance(&mixed).unwrap() < 1e-13);

        let diag = DensityMatrix::from_diagonal(&[0.2525, 0.7475]).unwrap();
        let evolved = evolve_density(&diag, &h, 5.0).unwrap();
        assert!(evolved.frobenius_distance(&diag).unwrap() < 1e-13);

        let h_tilted = HamiltonianSpec::zeeman(1.0, PI / 2.0, 0.0);
        let rotated = evolve_density(&diag, &h_tilted, 0.9).unwrap();
        let before: Vec<f64> = diag.eigenvalues();
        let after: Vec<f64> = rotated.eigenvalues();
        for (x, y) in before.iter().zip(after.iter()) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn half_turn_flips_the_transverse_state() {
        // U(pi) under s_z maps (1, 1)/sqrt(2) to (1, -1)/sqrt(2) up to phase
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = HamiltonianSpec::zeeman(1.0, 0.0, 0.0);
        let rho = StateVector::from_real(&[s, s]).unwrap().projector();
        let target = StateVector::from_real(&[s, -s]).unwrap().projector();
        let evolved = evolve_density(&rho, &h, PI).unwrap();
        assert!(evolved.frobenius_distance(&target).unwrap() < 1e-12);
    }

    #[test]
    fn group_property_holds() {
        let h = HamiltonianSpec::zeeman(0.8, 1.1, -0.4);
        let rho = StateVector::from_real(&[0.6, 0.8]).unwrap().projector();
        let one = evolve_density(&evolve_density(&rho, &h, 0.7).unwrap(), &h, 1.9).unwrap();
        let two = evolve_density(&rho, &h, 2.6).unwrap();
        assert!(one.frobenius_distance(&two).unwrap() < 1e-10);
    }

    #[test]
    fn lvn_residual_is_second_order_in_dt() {
        let h = HamiltonianSpec::zeeman(1.0, PI / 2.0, 0.0);
        let rho0 = DensityMatrix::from_diagonal(&[0.2525, 0.7475]).unwrap();
        let trajectory = |t: f64| evolve_density(&rho0, &h, t).unwrap();
        let r1 = lvn_residual(&h, trajectory, 1.0, 1e-4);
        assert!(r1 < 1e-6, "residual {r1}");
        let trajectory = |t: f64| evolve_density(&rho0, &h, t).unwrap();
        let r2 = lvn_residual(&h, trajectory, 1.0, 5e-5);
        let ratio = r1 / r2;
        assert!((3.0..5.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn commuting_density_has_vanishing_residual() {
        let h = HamiltonianSpec::zeeman(1.0, 0.0, 0.0);
        let rho = DensityMatrix::from_diagonal(&[0.3, 0.7]).unwrap();
        let r = lvn_residual(&h, |_| rho.clone(), 2.0, 0.05);
        assert!(r < 1e-10, "residual {r}");
    }

    #[test]
    fn ensemble_and_density_evolution_commute() {
        let (a, _) = degenerate_pair();
        let h = HamiltonianSpec::zeeman(1.0, PI / 2.0, 0.0);
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        let d = ensemble_consistency(&a, &h, 1.0, 10_000, &mut rng).unwrap();
        assert!(d < 0.05, "distance {d}");
    }

    #[test]
    fn constant_spec_consistency_is_exact() {
        let spec = RcpsSpec::two_level_polar(
            ScalarLaw::Constant { value: 0.6 },
            ScalarLaw::Constant { value: 0.2 },
        )
        .unwrap();
        let h = HamiltonianSpec::zeeman(1.0, PI / 2.0, 0.0);
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let d = ensemble_consistency(&spec, &h, 1.5, 100, &mut rng).unwrap();
        assert!(d < 1e-12, "distance {d}");
    }

    #[test]
    fn ensemble_consistency_shrinks_as_root_n() {
        let (a, _) = degenerate_pair();
        let h = HamiltonianSpec::zeeman(1.0, PI / 2.0, 0.0);
        let mut mean = [0.0, 0.0];
        for seed in 0..5 {
            let mut rng = ChaCha12Rng::seed_from_u64(40 + seed);
            for (i, &n) in [1_000u64, 10_000].iter().enumerate() {
                mean[i] += ensemble_consistency(&a, &h, 1.0, n, &mut rng).unwrap() / 5.0;
            }
        }
        let ratio = mean[1] / mean[0];
        assert!((0.2..=0.5).contains(&ratio), "ratio {ratio} from {mean:?}");
    }

    #[test]
    fn consistency_at_zero_time_reduces_to_mc_error() {
        let (a, _) = degenerate_pair();
        let h = HamiltonianSpec::zeeman(1.0, PI / 2.0, 0.0);
        let analytic = a.analytic_density().unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        let d0 = ensemble_consistency(&a, &h, 0.0, 5_000, &mut rng).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        let mc = a.monte_carlo_density(5_000, &mut rng).unwrap();
        let direct = mc.frobenius_distance(&analytic).unwrap();
        assert!((d0 - direct).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let h = HamiltonianSpec::zeeman(1.0, 0.0, 0.0);
        let psi = StateVector::from_real(&[1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(evolve_state(&psi, &h, 1.0), Err(Error::DimensionMismatch { .. })));
    }
}

//! Exact finite-dimensional complex linear algebra for states and operators.
//!
//! All types validate their invariants eagerly at construction and are
//! immutable afterwards, so every downstream computation can assume a
//! normalized state, a Hermitian observable, or a valid density matrix.
//! Matrices and vectors serialize to JSON as nested arrays of `[re, im]`
//! pairs; deserialization re-runs validation.
//!
//! The design envelope is small dense dimensions (d up to ~16); positivity
//! checks run a full Hermitian eigendecomposition, which is cheap there.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::tol;

/// A complex amplitude vector; one realization of a pure state.
///
/// Invariant: all entries finite and the squared norm is 1 within
/// [`tol::STATE_NORM_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: DVector<Complex64>,
}

/// A Hermitian, unit-trace, positive-semidefinite matrix.
///
/// Houses both ordinary statistical operators and the RCPS-derived operator
/// whose entries are coefficient cross-moments E{c_k* c_l}.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: DMatrix<Complex64>,
}

/// A Hermitian operator attached to a physical observable.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    mat: DMatrix<Complex64>,
}

/// Which tensor factor a partial trace keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

fn check_finite<'a>(entries: impl Iterator<Item = &'a Complex64>) -> Result<()> {
    for (index, c) in entries.enumerate() {
        if !(c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::NonFinite { index });
        }
    }
    Ok(())
}

fn hermiticity_deviation(m: &DMatrix<Complex64>) -> f64 {
    let d = m.nrows();
    let mut worst = 0.0_f64;
    for l in 0..d {
        for k in l..d {
            let dev = (m[(l, k)] - m[(k, l)].conj()).norm();
            worst = worst.max(dev);
        }
    }
    worst
}

/// Eigenvalues of a Hermitian matrix, ascending. The matrix is symmetrized
/// first so eigensolver input is exactly Hermitian.
fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let sym = (m + m.adjoint()).scale(0.5);
    let mut ev: Vec<f64> = sym.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

impl StateVector {
    /// Builds a normalized state from its amplitudes.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidArgument("state needs dimension >= 1".into()));
        }
        check_finite(amplitudes.iter())?;
        let norm_sq: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > tol::STATE_NORM_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(Self { amps: DVector::from_vec(amplitudes) })
    }

    /// Builds a state from real amplitudes.
    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// The basis state |k> in dimension `dim`.
    pub fn basis_state(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::InvalidArgument(format!("basis index {k} out of range for dim {dim}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[k] = Complex64::new(1.0, 0.0);
        Self::new(amps)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        self.amps.as_slice()
    }

    /// The rank-1 projector |psi><psi|.
    pub fn projector(&self) -> DensityMatrix {
        let mat = &self.amps * self.amps.adjoint();
        DensityMatrix::new(mat).expect("projector of a normalized state is a valid density matrix")
    }

    /// <psi|O|psi> for a matching observable.
    pub fn expectation(&self, obs: &Observable) -> Result<f64> {
        if obs.dim() != self.dim() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: obs.dim() });
        }
        let value = (self.amps.adjoint() * &obs.mat * &self.amps)[(0, 0)];
        debug_assert!(value.im.abs() <= tol::IMAGINARY_RESIDUE_TOL, "imaginary residue {}", value.im);
        Ok(value.re)
    }

    /// Kronecker product; the composite index is `i * other.dim() + j`
    /// (row-major convention).
    pub fn tensor(&self, other: &Self) -> Self {
        let amps = self.amps.kronecker(&other.amps);
        Self { amps: DVector::from_column_slice(amps.as_slice()) }
    }

    /// Measurement probabilities |c_k|^2 in the computational basis,
    /// normalized to sum to exactly 1.
    pub fn born_probabilities(&self) -> Vec<f64> {
        let raw: Vec<f64> = self.amps.iter().map(|c| c.norm_sqr()).collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|p| p / total).collect()
    }
}

impl DensityMatrix {
    /// Validates and wraps a matrix: Hermitian within
    /// [`tol::DENSITY_HERMITICITY_TOL`], trace 1 within
    /// [`tol::DENSITY_TRACE_TOL`], minimum eigenvalue above
    /// [`tol::DENSITY_EIGENVALUE_FLOOR`], purity at most `1 + tol`.
    pub fn new(mat: DMatrix<Complex64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch { left: mat.nrows(), right: mat.ncols() });
        }
        if mat.nrows() == 0 {
            return Err(Error::InvalidArgument("density matrix needs dimension >= 1".into()));
        }
        check_finite(mat.iter())?;
        let deviation = hermiticity_deviation(&mat);
        if deviation > tol::DENSITY_HERMITICITY_TOL {
            return Err(Error::NotHermitian { deviation, tolerance: tol::DENSITY_HERMITICITY_TOL });
        }
        let trace = mat.trace();
        if (trace.re - 1.0).abs() > tol::DENSITY_TRACE_TOL
            || trace.im.abs() > tol::DENSITY_TRACE_TOL
        {
            return Err(Error::TraceNotOne { trace: trace.re });
        }
        let eigenvalues = hermitian_eigenvalues(&mat);
        let min_eigenvalue = eigenvalues[0];
        if min_eigenvalue < tol::DENSITY_EIGENVALUE_FLOOR {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        let this = Self { mat };
        let purity = this.purity();
        if purity > 1.0 + tol::DENSITY_PURITY_TOL {
            return Err(Error::PurityExceedsOne { purity });
        }
        Ok(this)
    }

    /// Diagonal density matrix from a probability vector.
    pub fn from_diagonal(probs: &[f64]) -> Result<Self> {
        let d = probs.len();
        let mat = DMatrix::from_fn(d, d, |r, c| {
            if r == c {
                Complex64::new(probs[r], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self::new(mat)
    }

    /// I/d.
    pub fn maximally_mixed(dim: usize) -> Self {
        let p = 1.0 / dim as f64;
        Self::from_diagonal(&vec![p; dim]).expect("I/d is a valid density matrix")
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.mat[(row, col)]
    }

    /// Tr(rho O) = sum_{k,l} rho_{lk} O_{kl}, cast to a real number.
    pub fn expectation(&self, obs: &Observable) -> Result<f64> {
        if obs.dim() != self.dim() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: obs.dim() });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..self.dim() {
            for l in 0..self.dim() {
                acc += self.mat[(l, k)] * obs.mat[(k, l)];
            }
        }
        debug_assert!(acc.im.abs() <= tol::IMAGINARY_RESIDUE_TOL, "imaginary residue {}", acc.im);
        Ok(acc.re)
    }

    /// Tr(rho^2). For a Hermitian matrix this is the squared Frobenius norm,
    /// so it is real and non-negative by construction.
    pub fn purity(&self) -> f64 {
        self.mat.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.mat)
    }

    /// Reduced density matrix of one factor of a bipartite system with
    /// dimensions `(d1, d2)` and composite index `i * d2 + j`.
    pub fn partial_trace(&self, dims: (usize, usize), keep: Subsystem) -> Result<Self> {
        let (d1, d2) = dims;
        if d1 * d2 != self.dim() || d1 == 0 || d2 == 0 {
            return Err(Error::InvalidArgument(format!(
                "dimension {} does not factor as {d1} x {d2}",
                self.dim()
            )));
        }
        let mat = match keep {
            Subsystem::First => DMatrix::from_fn(d1, d1, |i, i2| {
                (0..d2).map(|j| self.mat[(i * d2 + j, i2 * d2 + j)]).sum()
            }),
            Subsystem::Second => DMatrix::from_fn(d2, d2, |j, j2| {
                (0..d1).map(|i| self.mat[(i * d2 + j, i * d2 + j2)]).sum()
            }),
        };
        Self::new(mat)
    }

    /// Frobenius distance to another density matrix of the same dimension.
    pub fn frobenius_distance(&self, other: &Self) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: other.dim() });
        }
        Ok((&self.mat - &other.mat).iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt())
    }
}

impl Observable {
    /// Validates Hermiticity within [`tol::OBSERVABLE_HERMITICITY_TOL`].
    pub fn new(mat: DMatrix<Complex64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch { left: mat.nrows(), right: mat.ncols() });
        }
        if mat.nrows() == 0 {
            return Err(Error::InvalidArgument("observable needs dimension >= 1".into()));
        }
        check_finite(mat.iter())?;
        let deviation = hermiticity_deviation(&mat);
        if deviation > tol::OBSERVABLE_HERMITICITY_TOL {
            return Err(Error::NotHermitian {
                deviation,
                tolerance: tol::OBSERVABLE_HERMITICITY_TOL,
            });
        }
        Ok(Self { mat })
    }

    /// Real diagonal observable.
    pub fn from_diagonal(values: &[f64]) -> Self {
        let d = values.len();
        let mat = DMatrix::from_fn(d, d, |r, c| {
            if r == c {
                Complex64::new(values[r], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self { mat }
    }

    /// The spin-1/2 z component, diag(+1/2, -1/2).
    pub fn spin_z() -> Self {
        Self::from_diagonal(&[0.5, -0.5])
    }

    /// The spin-1/2 component along the (theta, phi) direction:
    /// `sin(theta)cos(phi) s_x + sin(theta)sin(phi) s_y + cos(theta) s_z`.
    pub fn spin_axis(theta: f64, phi: f64) -> Self {
        let (st, ct) = (theta.sin(), theta.cos());
        let (sp, cp) = (phi.sin(), phi.cos());
        let off = Complex64::new(0.5 * st * cp, -0.5 * st * sp);
        let mat = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.5 * ct, 0.0),
                off,
                off.conj(),
                Complex64::new(-0.5 * ct, 0.0),
            ],
        );
        Self { mat }
    }

    pub fn identity(dim: usize) -> Self {
        Self { mat: DMatrix::identity(dim, dim) }
    }

    /// Kronecker product of observables (same index convention as
    /// [`StateVector::tensor`]).
    pub fn tensor(&self, other: &Self) -> Self {
        Self { mat: self.mat.kronecker(&other.mat) }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }
}

// ---------------------------------------------------------------------------
// JSON form: [re, im] pairs, nested per row for matrices.

pub(crate) fn vector_to_pairs(v: &DVector<Complex64>) -> Vec<[f64; 2]> {
    v.iter().map(|c| [c.re, c.im]).collect()
}

pub(crate) fn matrix_to_pairs(m: &DMatrix<Complex64>) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
        .collect()
}

pub(crate) fn matrix_from_pairs(rows: &[Vec<[f64; 2]>]) -> Result<DMatrix<Complex64>> {
    let d = rows.len();
    if rows.iter().any(|r| r.len() != d) {
        return Err(Error::InvalidArgument("matrix rows have unequal lengths".into()));
    }
    Ok(DMatrix::from_fn(d, d, |r, c| Complex64::new(rows[r][c][0], rows[r][c][1])))
}

impl Serialize for StateVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        vector_to_pairs(&self.amps).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for StateVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(deserializer)?;
        StateVector::new(pairs.iter().map(|p| Complex64::new(p[0], p[1])).collect())
            .map_err(D::Error::custom)
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        matrix_to_pairs(&self.mat).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(deserializer)?;
        let mat = matrix_from_pairs(&rows).map_err(D::Error::custom)?;
        DensityMatrix::new(mat).map_err(D::Error::custom)
    }
}

impl Serialize for Observable {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        matrix_to_pairs(&self.mat).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Observable {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(deserializer)?;
        let mat = matrix_from_pairs(&rows).map_err(D::Error::custom)?;
        Observable::new(mat).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn random_state(rng: &mut ChaCha12Rng, dim: usize) -> StateVector {
        let raw: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let norm: f64 = raw.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        StateVector::new(raw.into_iter().map(|c| c / norm).collect()).unwrap()
    }

    fn random_observable(rng: &mut ChaCha12Rng, dim: usize) -> Observable {
        let g = DMatrix::from_fn(dim, dim, |_, _| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        Observable::new((&g + g.adjoint()).scale(0.5)).unwrap()
    }

    #[test]
    fn projector_of_basis_state() {
        let psi = StateVector::from_real(&[1.0, 0.0]).unwrap();
        let rho = psi.projector();
        assert_eq!(rho.entry(0, 0), Complex64::new(1.0, 0.0));
        assert_eq!(rho.entry(1, 1), Complex64::new(0.0, 0.0));
        assert!((rho.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projector_of_equal_superposition() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let rho = StateVector::from_real(&[s, s]).unwrap().projector();
        for (r, c) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            assert!((rho.entry(r, c).re - 0.5).abs() < 1e-12);
            assert!(rho.entry(r, c).im.abs() < 1e-15);
        }
    }

    #[test]
    fn projector_of_polar_state() {
        // amplitudes (cos(pi/6), sin(pi/6)) from polar angle theta = pi/3
        let t = std::f64::consts::PI / 6.0;
        let rho = StateVector::from_real(&[t.cos(), t.sin()]).unwrap().projector();
        assert!((rho.entry(0, 0).re - 0.75).abs() < 1e-12);
        assert!((rho.entry(0, 1).re - 3.0_f64.sqrt() / 4.0).abs() < 1e-12);
        assert!((rho.entry(1, 1).re - 0.25).abs() < 1e-12);
    }

    #[test]
    fn projector_rejects_unnormalized_state() {
        assert!(matches!(
            StateVector::from_real(&[1.0, 1.0]),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn pure_expectations_of_spin_z() {
        let sz = Observable::spin_z();
        let up = StateVector::from_real(&[1.0, 0.0]).unwrap();
        assert!((up.expectation(&sz).unwrap() - 0.5).abs() < 1e-15);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let balanced = StateVector::from_real(&[s, s]).unwrap();
        assert!(balanced.expectation(&sz).unwrap().abs() < 1e-15);
        // polar angle pi/3: <s_z> = cos^2(pi/6) - 1/2 = 1/4
        let t = std::f64::consts::PI / 6.0;
        let tilted = StateVector::from_real(&[t.cos(), t.sin()]).unwrap();
        assert!((tilted.expectation(&sz).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn mixed_expectation_examples() {
        let sz = Observable::spin_z();
        assert!(DensityMatrix::maximally_mixed(2).expectation(&sz).unwrap().abs() < 1e-15);
        let rho = DensityMatrix::from_diagonal(&[0.2525, 0.7475]).unwrap();
        assert!((rho.expectation(&sz).unwrap() - (-0.2475)).abs() < 1e-12);
    }

    #[test]
    fn expectation_dimension_mismatch() {
        let sz = Observable::spin_z();
        let psi = StateVector::from_real(&[1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(psi.expectation(&sz), Err(Error::DimensionMismatch { .. })));
        let rho = DensityMatrix::maximally_mixed(3);
        assert!(matches!(rho.expectation(&sz), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn pure_and_mixed_expectations_agree() {
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        for _ in 0..100 {
            let dim = 2 + (rng.gen::<u32>() % 3) as usize;
            let psi = random_state(&mut rng, dim);
            let obs = random_observable(&mut rng, dim);
            let pure = psi.expectation(&obs).unwrap();
            let mixed = psi.projector().expectation(&obs).unwrap();
            assert!((pure - mixed).abs() < 1e-12);
        }
    }

    #[test]
    fn purity_examples() {
        assert!((DensityMatrix::maximally_mixed(2).purity() - 0.5).abs() < 1e-15);
        let rho = DensityMatrix::from_diagonal(&[0.2525, 0.7475]).unwrap();
        assert!((rho.purity() - 0.62251250).abs() < 1e-15);
    }

    #[test]
    fn tensor_examples() {
        let e0 = StateVector::from_real(&[1.0, 0.0]).unwrap();
        let e1 = StateVector::from_real(&[0.0, 1.0]).unwrap();
        let t = e0.tensor(&e1);
        assert_eq!(t.amplitudes()[1], Complex64::new(1.0, 0.0));
        assert_eq!(t.amplitudes()[0], Complex64::new(0.0, 0.0));

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = StateVector::from_real(&[s, s]).unwrap();
        let t2 = plus.tensor(&e0);
        assert!((t2.amplitudes()[0].re - s).abs() < 1e-15);
        assert!(t2.amplitudes()[1].norm() < 1e-15);
        assert!((t2.amplitudes()[2].re - s).abs() < 1e-15);
        assert!(t2.amplitudes()[3].norm() < 1e-15);
    }

    #[test]
    fn tensor_preserves_norm() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for _ in 0..50 {
            let da = 2 + (rng.gen::<u32>() % 3) as usize;
            let db = 2 + (rng.gen::<u32>() % 3) as usize;
            let a = random_state(&mut rng, da);
            let b = random_state(&mut rng, db);
            let t = a.tensor(&b);
            let norm: f64 = t.amplitudes().iter().map(|c| c.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn partial_trace_of_product_state() {
        let e0 = StateVector::from_real(&[1.0, 0.0]).unwrap();
        let e1 = StateVector::from_real(&[0.0, 1.0]).unwrap();
        let rho = e0.tensor(&e1).projector();
        let first = rho.partial_trace((2, 2), Subsystem::First).unwrap();
        assert!((first.entry(0, 0).re - 1.0).abs() < 1e-12);
        assert!(first.entry(1, 1).norm() < 1e-12);
        let second = rho.partial_trace((2, 2), Subsystem::Second).unwrap();
        assert!((second.entry(1, 1).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partial_trace_of_bell_state() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = StateVector::from_real(&[s, 0.0, 0.0, s]).unwrap();
        let reduced = bell.projector().partial_trace((2, 2), Subsystem::First).unwrap();
        assert!((reduced.entry(0, 0).re - 0.5).abs() < 1e-12);
        assert!((reduced.entry(1, 1).re - 0.5).abs() < 1e-12);
        assert!(reduced.entry(0, 1).norm() < 1e-12);
    }

    #[test]
    fn partial_trace_rejects_bad_factorization() {
        let rho = DensityMatrix::maximally_mixed(6);
        assert!(rho.partial_trace((4, 2), Subsystem::First).is_err());
        assert!(rho.partial_trace((2, 3), Subsystem::First).is_ok());
    }

    #[test]
    fn subsystem_expectation_equals_reduced_expectation() {
        // mean of O x I on the joint state equals the reduced-state mean
        let mut rng = ChaCha12Rng::seed_from_u64(99);
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
            assert!((joint - reduced).abs() < 1e-12, "joint {joint} vs reduced {reduced}");
        }
    }

    #[test]
    fn partial_trace_preserves_trace_and_positivity() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for _ in 0..20 {
            let psi = random_state(&mut rng, 6);
            let reduced = psi.projector().partial_trace((2, 3), Subsystem::Second).unwrap();
            let tr: Complex64 = (0..3).map(|i| reduced.entry(i, i)).sum();
            assert!((tr.re - 1.0).abs() < 1e-12);
            assert!(reduced.eigenvalues()[0] > -1e-9);
        }
    }

    #[test]
    fn born_probabilities_examples() {
        let up = StateVector::from_real(&[1.0, 0.0]).unwrap();
        assert_eq!(up.born_probabilities(), vec![1.0, 0.0]);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let balanced = StateVector::from_real(&[s, s]).unwrap();
        let p = balanced.born_probabilities();
        assert!((p[0] - 0.5).abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12);

        // phase does not change the probabilities
        let alpha = 0.6_f64;
        let beta = (1.0 - alpha * alpha).sqrt();
        for phi in [0.0, 1.0, 2.5] {
            let psi = StateVector::new(vec![
                Complex64::new(alpha, 0.0),
                Complex64::from_polar(beta, phi),
            ])
            .unwrap();
            let p = psi.born_probabilities();
            assert!((p[0] - 0.36).abs() < 1e-12);
            assert!((p[1] - 0.64).abs() < 1e-12);
        }
    }

    #[test]
    fn density_validation_rejects_bad_matrices() {
        // not Hermitian
        let m = DMatrix::from_row_slice(2, 2, &[
            Complex64::new(0.5, 0.0),
            Complex64::new(0.3, 0.0),
            Complex64::new(0.1, 0.0),
            Complex64::new(0.5, 0.0),
        ]);
        assert!(matches!(DensityMatrix::new(m), Err(Error::NotHermitian { .. })));
        // wrong trace
        assert!(matches!(
            DensityMatrix::from_diagonal(&[0.6, 0.6]),
            Err(Error::TraceNotOne { .. })
        ));
        // negative eigenvalue
        assert!(matches!(
            DensityMatrix::from_diagonal(&[1.2, -0.2]),
            Err(Error::NotPositive { .. })
        ));
    }

    #[test]
    fn observable_validation() {
        let m = DMatrix::from_row_slice(2, 2, &[
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 0.0),
        ]);
        // i on both off-diagonals is anti-Hermitian
        assert!(matches!(Observable::new(m), Err(Error::NotHermitian { .. })));
        assert!((Observable::spin_axis(0.0, 0.0).matrix()[(0, 0)].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn json_round_trip_revalidates() {
        let rho = DensityMatrix::from_diagonal(&[0.2525, 0.7475]).unwrap();
        let json = serde_json::to_string(&rho).unwrap();
        let back: DensityMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(rho, back);

        // a serialized non-density matrix must fail to deserialize
        let bad = "[[[0.9,0.0],[0.0,0.0]],[[0.0,0.0],[0.9,0.0]]]";
        assert!(serde_json::from_str::<DensityMatrix>(bad).is_err());

        let psi = StateVector::from_real(&[0.6, 0.8]).unwrap();
        let j = serde_json::to_string(&psi).unwrap();
        assert_eq!(serde_json::from_str::<StateVector>(&j).unwrap(), psi);
    }
}

//! Bipartite states and reduced density operators: subsystem expectations
//! computed on the joint state equal expectations of the partial trace.
//!
//! ```bash
//! cargo run --example bipartite_reduction
//! ```

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use rcps::quantum::{Observable, StateVector, Subsystem};
use rcps::Result;

fn main() -> Result<()> {
    println!("=== product state: the reduction recovers the factor ===");
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = StateVector::from_real(&[s, s])?;
    let down = StateVector::from_real(&[0.0, 1.0])?;
    let joint = plus.tensor(&down).projector();
    let reduced = joint.partial_trace((2, 2), Subsystem::First)?;
    println!(
        "kept factor: [[{:.3}, {:.3}], [{:.3}, {:.3}]]  (purity {:.3})",
        reduced.entry(0, 0).re,
        reduced.entry(0, 1).re,
        reduced.entry(1, 0).re,
        reduced.entry(1, 1).re,
        reduced.purity()
    );

    println!("\n=== entangled state: the reduction is maximally mixed ===");
    let bell = StateVector::from_real(&[s, 0.0, 0.0, s])?;
    let reduced = bell.projector().partial_trace((2, 2), Subsystem::First)?;
    println!(
        "kept factor: diag({:.3}, {:.3})  (purity {:.3})",
        reduced.entry(0, 0).re,
        reduced.entry(1, 1).re,
        reduced.purity()
    );

    println!("\n=== joint vs reduced expectations on random states ===");
    let mut rng = ChaCha12Rng::seed_from_u64(5);
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let (d1, d2) = (2 + (rng.gen::<u32>() % 2) as usize, 2 + (rng.gen::<u32>() % 2) as usize);
        let raw: Vec<Complex64> = (0..d1 * d2)
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let norm: f64 = raw.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let psi = StateVector::new(raw.into_iter().map(|c| c / norm).collect())?;

        let g = nalgebra::DMatrix::from_fn(d1, d1, |_, _| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let obs = Observable::new((&g + g.adjoint()).scale(0.5))?;

        let joint = psi.expectation(&obs.tensor(&Observable::identity(d2)))?;
        let reduced = psi
            .projector()
            .partial_trace((d1, d2), Subsystem::First)?
            .expectation(&obs)?;
        worst = worst.max((joint - reduced).abs());
    }
    println!("worst |<O x I> - Tr(rho_1 O)| over 100 random instances: {worst:.2e}");
    Ok(())
}

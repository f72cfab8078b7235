//! The writer/reader scenario: a spin is prepared along a field axis the
//! reader does not know, so the measured outcome probability is itself a
//! random variable.
//!
//! ```bash
//! cargo run --example writer_reader
//! ```

use rcps::cli::run_demo_writer_reader;
use rcps::law::ScalarLaw;
use rcps::Result;

fn main() -> Result<()> {
    let out = std::env::temp_dir().join("rcps-writer-reader");

    // deterministic field direction at polar angle pi/3:
    // p_+ = cos^2(pi/6) = 0.75 every time
    println!("=== fixed field axis (theta = pi/3) ===");
    let theta = ScalarLaw::Constant { value: std::f64::consts::PI / 3.0 };
    let phi = ScalarLaw::Constant { value: 0.0 };
    let (report, _) = run_demo_writer_reader(&theta, &phi, 20_000, 50, 1, &out)?;
    println!(
        "E{{p_+}} = {:.5} +/- {:.1e}  (expected 0.75)",
        report.estimates[0].value, report.estimates[0].standard_error
    );
    println!("mean s_z = {:.5}  (expected 0.25)", report.mean_sz);

    // a fully random axis direction: averaging cos^2(theta/2) over
    // theta ~ U[0, pi] gives 1/2
    println!("\n=== random field axis (theta uniform on [0, pi]) ===");
    let theta = ScalarLaw::Uniform { lo: 0.0, hi: std::f64::consts::PI };
    let phi = ScalarLaw::Uniform { lo: -std::f64::consts::PI, hi: std::f64::consts::PI };
    let (report, _) = run_demo_writer_reader(&theta, &phi, 20_000, 50, 2, &out)?;
    println!(
        "E{{p_+}}   = {:.5} +/- {:.1e}  (expected 0.5)",
        report.estimates[0].value, report.estimates[0].standard_error
    );
    println!(
        "E{{p_+^2}} = {:.5} +/- {:.1e}  (spread of the random probability)",
        report.estimates[1].value, report.estimates[1].standard_error
    );
    println!("\nper-realization counts written to {}", out.join("writer_reader.csv").display());
    Ok(())
}

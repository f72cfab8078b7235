//! Two-level measurement protocol and unbiased moment estimators.
//!
//! A run draws `m` independent coefficient realizations; each realization is
//! measured with `n` projective shots that share the same coefficient draw,
//! giving one binomial success count per realization. Batching shots within
//! a realization is what makes the higher moments of the random outcome
//! probability estimable from binary data: with one fresh realization per
//! shot, E{p^2} cannot be told apart from E{p}.
//!
//! Estimators use binomial falling-factorial moments,
//! `k(k-1)...(k-r+1) / (n(n-1)...(n-r+1))`, which are exactly unbiased for
//! `p^r` given the count model — the naive `(k/n)^r` is biased upward by
//! O(p(1-p)/n) already at r = 2.
//!
//! Per-realization randomness comes from a counter-based stream split on
//! `(master_seed, realization_index)`, so runs are bit-identical no matter
//! how work is scheduled across threads.

use std::fs;
use std::io::Write;
use std::path::Path;

use rand::distributions::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::Binomial;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensemble::RcpsSpec;
use crate::error::{Error, Result};
use crate::quantum::StateVector;

/// Layout of a measurement run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentDesign {
    /// Number of independent coefficient realizations (m).
    pub realizations: u64,
    /// Projective shots per realization (n), all sharing one draw.
    pub shots_per_realization: u64,
    /// Root of the per-realization random streams.
    pub master_seed: u64,
    /// Basis index whose outcome probability is tracked (0 is the |+>
    /// outcome of the two-level specs).
    pub outcome_index: usize,
}

impl ExperimentDesign {
    pub fn new(realizations: u64, shots_per_realization: u64, master_seed: u64) -> Result<Self> {
        if realizations == 0 || shots_per_realization == 0 {
            return Err(Error::InvalidArgument(
                "an experiment needs at least one realization and one shot".into(),
            ));
        }
        Ok(Self { realizations, shots_per_realization, master_seed, outcome_index: 0 })
    }

    pub fn with_outcome_index(mut self, outcome_index: usize) -> Self {
        self.outcome_index = outcome_index;
        self
    }
}

/// Raw success counts of a measurement run, one per realization.
///
/// Counts are stored instead of frequencies so any estimator order can be
/// recomputed later from the file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    counts: Vec<u64>,
    shots: u64,
    spec_digest: String,
    master_seed: u64,
    outcome_index: usize,
}

/// One estimated moment of the random outcome probability.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ProbabilityMomentEstimate {
    pub order: u32,
    pub value: f64,
    /// Sample standard deviation of the per-realization statistic over
    /// sqrt(m).
    pub standard_error: f64,
    pub realizations: u64,
    pub shots: u64,
}

/// The independent random stream of realization `index` under
/// `master_seed`. Streams are independent by the counter construction, so
/// execution order and parallelism cannot change the result.
pub fn realization_stream(master_seed: u64, index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Runs the protocol for a spec: one coefficient draw and one binomial
/// count per realization.
pub fn run_experiment(spec: &RcpsSpec, design: &ExperimentDesign) -> Result<MeasurementRecord> {
    spec.validate()?;
    run_experiment_with(|rng| spec.sample_realization(rng), design, &spec.digest())
}

/// Runs the protocol with a caller-supplied realization sampler. Used for
/// push-forward laws that are sampled by transformation rather than by a
/// spec (e.g. an angle law mapped through cos(theta/2)).
pub fn run_experiment_with<F>(
    sampler: F,
    design: &ExperimentDesign,
    spec_digest: &str,
) -> Result<MeasurementRecord>
where
    F: Fn(&mut ChaCha12Rng) -> Result<StateVector> + Sync,
{
    let counts: Result<Vec<u64>> = (0..design.realizations)
        .into_par_iter()
        .map(|j| {
            let mut rng = realization_stream(design.master_seed, j);
            let psi = sampler(&mut rng)?;
            let probs = psi.born_probabilities();
            let p = *probs.get(design.outcome_index).ok_or(Error::InvalidArgument(format!(
                "outcome index {} out of range for dimension {}",
                design.outcome_index,
                probs.len()
            )))?;
            let binomial = Binomial::new(design.shots_per_realization, p.clamp(0.0, 1.0))
                .expect("clamped probability is valid");
            Ok(binomial.sample(&mut rng))
        })
        .collect();
    Ok(MeasurementRecord {
        counts: counts?,
        shots: design.shots_per_realization,
        spec_digest: spec_digest.to_string(),
        master_seed: design.master_seed,
        outcome_index: design.outcome_index,
    })
}

impl MeasurementRecord {
    /// Builds a record from raw counts (each between 0 and `shots`).
    pub fn from_counts(
        counts: Vec<u64>,
        shots: u64,
        spec_digest: String,
        master_seed: u64,
        outcome_index: usize,
    ) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::InvalidRecord("record needs at least one realization".into()));
        }
        if let Some(&bad) = counts.iter().find(|&&k| k > shots) {
            return Err(Error::InvalidRecord(format!("count {bad} exceeds {shots} shots")));
        }
        Ok(Self { counts, shots, spec_digest, master_seed, outcome_index })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn realizations(&self) -> u64 {
        self.counts.len() as u64
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn spec_digest(&self) -> &str {
        &self.spec_digest
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn outcome_index(&self) -> usize {
        self.outcome_index
    }

    /// Writes the counts as CSV (`realization,k,n` with a header row) and
    /// the run metadata as a JSON sidecar.
    pub fn save(&self, csv_path: &Path, sidecar_path: &Path) -> Result<()> {
        let mut csv = String::from("realization,k,n\n");
        for (j, &k) in self.counts.iter().enumerate() {
            csv.push_str(&format!("{j},{k},{}\n", self.shots));
        }
        fs::File::create(csv_path)?.write_all(csv.as_bytes())?;

        let sidecar = serde_json::json!({
            "spec_digest": self.spec_digest,
            "master_seed": self.master_seed,
            "m": self.counts.len(),
            "n": self.shots,
            "outcome_index": self.outcome_index,
        });
        fs::write(sidecar_path, serde_json::to_string_pretty(&sidecar)?)?;
        Ok(())
    }

    /// Reads back a CSV/sidecar pair written by [`MeasurementRecord::save`].
    pub fn load(csv_path: &Path, sidecar_path: &Path) -> Result<Self> {
        let sidecar: serde_json::Value = serde_json::from_str(&fs::read_to_string(sidecar_path)?)?;
        let field_u64 = |name: &str| {
            sidecar
                .get(name)
                .and_then(|v| v.as_u64())
                .ok_or_else(|| Error::InvalidRecord(format!("sidecar is missing {name}")))
        };
        let shots = field_u64("n")?;
        let master_seed = field_u64("master_seed")?;
        let outcome_index = field_u64("outcome_index")? as usize;
        let spec_digest = sidecar
            .get("spec_digest")
            .and_then(|v| v.as_str())
            .unwrap_or_default()
            .to_string();

        let text = fs::read_to_string(csv_path)?;
        let mut counts = Vec::new();
        for (line_no, line) in text.lines().enumerate() {
            if line_no == 0 || line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(Error::InvalidRecord(format!("malformed CSV line {}", line_no + 1)));
            }
            let k: u64 = fields[1]
                .trim()
                .parse()
                .map_err(|e| Error::InvalidRecord(format!("line {}: {e}", line_no + 1)))?;
            let n: u64 = fields[2]
                .trim()
                .parse()
                .map_err(|e| Error::InvalidRecord(format!("line {}: {e}", line_no + 1)))?;
            if n != shots {
                return Err(Error::InvalidRecord(format!(
                    "line {}: shots {n} disagree with sidecar {shots}",
                    line_no + 1
                )));
            }
            counts.push(k);
        }
        Self::from_counts(counts, shots, spec_digest, master_seed, outcome_index)
    }
}

/// Unbiased estimates of E{p^r} for the requested orders.
///
/// The order-r statistic for a realization with count k is the ratio of
/// falling factorials `ff(k, r) / ff(n, r)`; its mean over realizations is
/// unbiased for E{p^r} under the binomial-within-realization model. Orders
/// above n are undefined (the denominator vanishes) and are reported as an
/// error.
pub fn estimate_probability_moments(
    record: &MeasurementRecord,
    orders: &[u32],
) -> Result<Vec<ProbabilityMomentEstimate>> {
    let n = record.shots;
    let m = record.realizations();
    let mut out = Vec::with_capacity(orders.len());
    for &order in orders {
        if order == 0 {
            return Err(Error::InvalidArgument("moment order must be >= 1".into()));
        }
        if u64::from(order) > n {
            return Err(Error::EstimatorUndefined { order, shots: n });
        }
        let denom = falling_factorial(n as f64, order);
        let stats: Vec<f64> = record
            .counts
            .iter()
            .map(|&k| falling_factorial(k as f64, order) / denom)
            .collect();
        let mean = stats.iter().sum::<f64>() / m as f64;
        let standard_error = if m > 1 {
            let var =
                stats.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (m as f64 - 1.0);
            (var / m as f64).sqrt()
        } else {
            0.0
        };
        out.push(ProbabilityMomentEstimate {
            order,
            value: mean,
            standard_error,
            realizations: m,
            shots: n,
        });
    }
    Ok(out)
}

/// Estimate of E{s_z} from a record tracking the |+> outcome: the
/// first-moment estimate minus 1/2.
pub fn mean_sz_estimate(record: &MeasurementRecord) -> f64 {
    let n = record.shots as f64;
    let m = record.realizations() as f64;
    let mean = record.counts.iter().map(|&k| k as f64 / n).sum::<f64>() / m;
    mean - 0.5
}

fn falling_factorial(x: f64, r: u32) -> f64 {
    (0..r).map(|i| x - i as f64).product()
}

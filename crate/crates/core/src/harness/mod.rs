//! End-to-end experiments: sampling with postselection and decoding, the
//! statistics reported for them, and parameter sweeps.

mod census;
mod cost;
mod experiment;
mod stats;
mod sweep;

use thiserror::Error;

use crate::builders::{build, AnnotatedCircuit, BuildError, InjectionSpec};
use crate::circuit::{apply_noise, transpile_to_cz, NoiseError, NoiseParams, TranspileError};
use crate::decode::DecodeError;
use crate::dem::DemError;
use crate::sim::SimError;

pub use census::{census, Census};
pub use cost::{deadline_success, expected_cost, half_life, pareto_frontier, CostPoint};
pub use experiment::{run_experiment, run_experiment_with_threads, Experiment, Limits, BATCH_SHOTS};
pub use stats::{likelihood_interval, StatsRow, TrialStats, LIKELIHOOD_FACTOR};
pub use sweep::{read_csv, sweep, write_csv, write_json, SweepPlan, CSV_COLUMNS};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Transpile(#[from] TranspileError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Dem(#[from] DemError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Builds a protocol circuit, transpiles it to CZ and applies SI1000 noise of strength `p`.
pub fn noisy_circuit(spec: &InjectionSpec, p: f64) -> Result<AnnotatedCircuit, HarnessError> {
    let built = build(spec)?;
    let circuit = apply_noise(&transpile_to_cz(&built.circuit)?, NoiseParams::si1000(p))?;
    Ok(AnnotatedCircuit { circuit, ..built })
}

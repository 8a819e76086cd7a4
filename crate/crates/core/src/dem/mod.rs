//! Detector error models: extraction from noisy circuits, the census of
//! undetectable low-weight mechanisms, and the analytic error floors.

mod analytic;
mod detfrac;
mod distance;
mod extract;
mod model;

use thiserror::Error;

pub use analytic::{alternative_floor, analytic_floor, analytic_limit, Floor};
pub use detfrac::detection_fraction;
pub use distance::{distance1_floor, find_distance1, find_distance2, Distance1, Distance2Example, Distance2Report};
pub use extract::extract_dem;
pub use model::{xor_probability, DetectorErrorModel, ErrorMechanism, Provenance, Term};

#[derive(Debug, Error, PartialEq)]
pub enum DemError {
    #[error("at most 64 observables are supported, circuit has {0}")]
    TooManyObservables(usize),
    #[error("output {output} is not deterministic (found at instruction {instruction})")]
    NondeterministicOutput { output: usize, instruction: usize },
}

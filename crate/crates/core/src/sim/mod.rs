//! Stabilizer simulation: a reference tableau simulator, a symbolic tableau for
//! determinism analysis, and a bit-packed Pauli-frame batch sampler.

mod batch;
mod frame;
mod reference;
pub(crate) mod symbolic;
mod tableau;

use thiserror::Error;

use crate::circuit::Pauli;

pub use batch::{read_dump, write_dump, ShotBatch};
pub use frame::{frame_sample, frame_sample_with_threads, FrameSampler, SHOTS_PER_CHUNK};
pub use reference::{compute_reference, detection_events, ReferenceFrame};
pub use symbolic::{run_symbolic, Affine, SymbolicRun};
pub use tableau::{tableau_run, tableau_run_with, TableauShot};

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("detector {detector} is not deterministic: it depends on {origin}")]
    NondeterministicDetector { detector: usize, origin: RandomSource },
    #[error("observable {observable} is not deterministic: it depends on {origin}")]
    NondeterministicObservable { observable: usize, origin: RandomSource },
    #[error("reference frame was computed for a different circuit ({expected} detectors, circuit has {found})")]
    FrameMismatch { expected: usize, found: usize },
}

/// Where a nondeterministic value gets its randomness from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RandomSource {
    /// The random outcome of measurement record `k` (0-based, in circuit order).
    Measurement(usize),
    /// The hidden collapse of the `k`-th reset target.
    Reset(usize),
}

impl std::fmt::Display for RandomSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RandomSource::Measurement(k) => write!(f, "random measurement {k}"),
            RandomSource::Reset(k) => write!(f, "the random collapse of reset target {k}"),
        }
    }
}

/// The `index`-th non-identity two-qubit Pauli (`1..16`), in the order
/// `IX, IY, IZ, XI, XX, ..., ZZ`.
pub(crate) fn pauli_pair(index: u32) -> (Option<Pauli>, Option<Pauli>) {
    let one = |k: u32| match k {
        0 => None,
        1 => Some(Pauli::X),
        2 => Some(Pauli::Y),
        _ => Some(Pauli::Z),
    };
    (one(index / 4), one(index % 4))
}

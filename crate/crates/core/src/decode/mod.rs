//! Matching-graph construction, minimum-weight perfect matching, and an exact
//! maximum-likelihood oracle for small models.

mod graph;
mod ml;
mod mwpm;

use thiserror::Error;

pub use graph::{build_graph, edge_weight, DecodingGraph, Edge, EdgeKey};
pub use ml::{decode_ml_bruteforce, ML_MAX_MECHANISMS};
pub use mwpm::{decode_mwpm, MwpmDecoder, PRECOMPUTE_LIMIT};

#[derive(Debug, Error, PartialEq)]
pub enum DecodeError {
    #[error("mechanism {mechanism} with detectors {detectors:?} cannot be split into graphlike edges")]
    Undecomposable { mechanism: usize, detectors: Vec<u32> },
    #[error("brute-force decoding supports at most {limit} mechanisms, model has {found}")]
    TooManyMechanisms { found: usize, limit: usize },
    #[error("brute-force decoding supports at most {limit} detectors, model has {found}")]
    TooManyDetectors { found: usize, limit: usize },
}

// mdbook cannot run listings that depend on a workspace crate, so every chapter
// is pulled into this crate as a module doc and `cargo test --doc` runs it.

#[doc = include_str!("src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("src/circuits.md")]
pub mod circuits {}
#[doc = include_str!("src/protocols.md")]
pub mod protocols {}
#[doc = include_str!("src/sampling.md")]
pub mod sampling {}
#[doc = include_str!("src/error-analysis.md")]
pub mod error_analysis {}
#[doc = include_str!("src/decoding.md")]
pub mod decoding {}
#[doc = include_str!("src/experiments.md")]
pub mod experiments {}
#[doc = include_str!("src/cli.md")]
pub mod cli {}

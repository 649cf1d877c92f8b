//! Common-information source decomposition for correlated multi-source networks.
//!
//! The crate splits correlated discrete sources into their Gács-Körner common
//! part and per-source residuals, decides feasibility of multicast, broadcast
//! with side information and helper-assisted delivery on capacitated DAGs, and
//! runs zero-error block codecs end to end over a random linear network coding
//! transport.
//!
//! Module map:
//!
//! - [`probability`]: joint pmfs, entropies, sampling, typicality, Markov checks
//! - [`common_info`]: support-graph components, source decomposition, nesting
//! - [`netgraph`]: capacitated networks, min-cuts, latent-source expansion
//! - [`feasibility`]: the rate-region decision procedures and message plans
//! - [`codec`]: prefix-free block encoders and decoders
//! - [`rlnc`]: generation-based random linear network coding over GF(256)
//! - [`cli`]: the command-line frontend

pub mod cli;
pub mod codec;
pub mod common_info;
pub mod error;
pub mod feasibility;
pub mod netgraph;
pub mod probability;
pub mod rlnc;

pub use common_info::{
    check_nesting, class_of, decompose, decompose_source, gk_entropy, refinement_index,
    ComponentPartition, RefinementMap, SourceDecomposition, SupportGraph,
};
pub use error::{Error, Result};
pub use feasibility::{FeasibilityReport, MessagePlan, Verdict};
pub use netgraph::Network;
pub use probability::{binary_entropy, is_strongly_typical, JointPmf, SymbolSequence};

/// Absolute tolerance used for probability sums and information identities.
pub const TOLERANCE: f64 = 1e-9;

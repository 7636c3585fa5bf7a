//! Reservoir-network toolkit for open quantum system dynamics.
//!
//! The Trotterised evolution of a system coupled to a reservoir is cut into
//! a system chain and a *reservoir network*: a matrix product state over the
//! interaction index `i_k ∈ [0, 2n]` of each time step. This crate builds
//! that network, compresses it by SVD, contracts it back into the reduced
//! system trajectory, and measures its entanglement structure against
//! closed-form estimates of the effective reservoir dimension.
//!
//! Module map:
//!
//! * [`tensor`]: dense complex arrays, contraction, truncated SVD, `expm`, entropies.
//! * [`liouville`]: vectorisation, superoperators, the split interaction factors.
//! * [`network`]: the reservoir network and everything built on it.
//! * [`oracle`]: dense exact and Trotterised reference evolutions.
//! * [`estimators`]: entropy / dimension estimates and branch-weight machinery.
//! * [`models`]: model zoo and model files.
//! * [`cli`]: the batch commands behind the `rnet` binary.

// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod estimators;
pub mod limits;
pub mod liouville;
pub mod models;
pub mod network;
pub mod oracle;
pub mod stats;
pub mod tensor;

pub use error::{Error, Result};
pub use liouville::{ModelSpec, TimeGrid};
pub use network::{ReservoirNetwork, Trajectory, TruncationPolicy};

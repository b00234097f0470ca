//! Threshold padlock systems.
//!
//! A padlock system is a monotone circuit of threshold gates over padlocks,
//! together with a distribution of padlock keys to participants. This crate
//! builds such systems (direct devices, shared-key constructions, normal-form
//! compilations, triple-system designs, recursive compositions), verifies
//! them by exhaustive enumeration, computes exact bounds on the number of
//! padlocks, models knotted wire systems as free-group words, and compiles
//! circuits to Shamir-style secret sharing over small prime fields.

pub mod bounds;
pub mod constructions;
pub mod error;
pub mod knots;
pub mod model;
pub mod sharing;
pub mod verifier;

pub use error::{Error, Result};
pub use model::{
    AccessStructure, CircuitBuilder, DeviceCircuit, Gate, KeyDistribution, NodeId, PadlockId,
    PadlockSet, ThresholdSystem,
};
pub use verifier::{verify_threshold, VerificationReport};

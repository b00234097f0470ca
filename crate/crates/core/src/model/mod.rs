//! Padlock systems and their opening semantics.

mod circuit;
mod json;
mod system;

pub use circuit::{
    threshold_device, CircuitBuilder, DeviceCircuit, Gate, NodeId, PadlockId, PadlockSet,
};
pub use json::{parse_json, NodeDoc, SystemDoc};
pub(crate) use system::{check_limit, vec_to_mask};
pub use system::{
    AccessStructure, KeyDistribution, ThresholdSystem, DEFAULT_ENUMERATION_LIMIT,
    MAX_ENUMERATION_LIMIT,
};

//! Command implementations and the reward service behind the `brickrl` binary.

pub mod service;
pub mod workflows;

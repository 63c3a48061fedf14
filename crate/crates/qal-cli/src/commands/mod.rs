//! Subcommand drivers.

pub mod dimension;
pub mod identities;
pub mod smoothing;
pub mod solve;
pub mod strichartz;
pub mod symbols;
pub mod talbot;

//! Core algorithms for locating the origin of an information diffusion by
//! querying infected nodes.
//!
//! The crate covers the full estimation pipeline: graph topologies
//! ([`topology`]), susceptible-infected spreading ([`diffusion`]),
//! likelihood scoring of candidate origins ([`centrality`]), a noisy
//! identity/direction question oracle ([`querying`]), batch and adaptive
//! majority-voting estimators ([`estimators`]), and closed-form budget
//! bound calculators ([`bounds`]).
//!
//! Everything here is deterministic given explicit seeds and free of I/O,
//! so the crate builds without `std` (allocation is required).

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bounds;
pub mod centrality;
pub mod diffusion;
pub mod error;
pub mod estimators;
pub mod querying;
pub mod topology;

pub use error::{Error, Result};

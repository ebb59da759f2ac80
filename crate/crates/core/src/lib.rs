//! Dense-matrix simulator and thermodynamic ledger for autonomous coupled
//! quantum systems.
//!
//! The crate is `no_std` (it needs `alloc`). Subsystem states are tracked
//! through effective temperatures obtained by entropy matching, with the
//! degenerate-ground-state deficit `ζ` carried alongside. On top of the
//! trajectories sit audits of the entropy-production identity, the
//! zero-temperature second law, and ergotropy bounds.

#![no_std]
extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod qmat;
pub mod random;
pub mod thermo;
pub mod dynamics;
pub mod laws;
pub mod ergotropy;
pub mod scenarios;

pub use error::{Error, Result};

//! Recurrence determinism for interval maps.
//!
//! This crate is the allocation-only core: binary odometer words, admissible
//! systems of nested intervals with exact rational endpoints, the interval
//! maps whose orbits are analysed, and the recurrence kernels (correlation
//! sums under Bowen metrics, recurrence determinism, diagonal-line DET).
//!
//! Everything here is deterministic and free of IO. The companion `rdet`
//! crate carries experiments, file formats and the command line.
#![no_std]

extern crate alloc;

pub mod bounds;
pub mod dynamics;
mod error;
pub mod rational;
pub mod rqa;
pub mod system;
pub mod validate;
pub mod word;

pub use error::{Error, Result};
pub use rational::RationalInterval;
pub use system::{EpsilonLadder, IntervalSystem, SystemKind};
pub use word::Word;

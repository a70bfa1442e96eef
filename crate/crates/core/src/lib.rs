// SPDX-License-Identifier: Apache-2.0

//! Simulator for oracle algorithms (Grover, Deutsch–Jozsa, Simon) with an
//! explicit problem-setter register.
//!
//! The crate reproduces the state evolution of each algorithm in a
//! random-phase ensemble representation, divides the projection on the
//! problem setter's choice between the two measurements ([`sharing`]),
//! decomposes the function-evaluation stage into classical computation
//! histories ([`histories`]) and compares worst-case classical query counts
//! with and without advance knowledge of half the choice ([`classical`]).

pub mod bits;
pub mod classical;
pub mod density;
pub mod error;
pub mod exec;
pub mod histories;
pub mod measurement;
pub mod oracles;
pub mod sampling;
pub mod sharing;
pub mod state;
pub mod unitaries;
pub mod verify;

pub use bits::BitString;
pub use error::{Error, Result};
pub use exec::Parallelism;

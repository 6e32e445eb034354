//! Exact state-vector laboratory for quantum no-key protocols.
//!
//! The crate runs the family of no-key message protocols (the basic
//! three-pass exchange, the keyed three-pass exchange, the echo schemes, the
//! Bob-initiated two-pass exchange and its MAC-hardened variant) on a dense
//! simulator over named qubit registers. Every transmission can be
//! snapshotted as the reduced density matrix of the in-transit registers,
//! and exact pad/key averages give the eavesdropper's view of the channel.
//!
//! Module map:
//!
//! - [`qstate`]: registers, amplitudes, reversible XOR oracles, partial trace
//!   and trace distance.
//! - [`oracles`]: random Boolean permutations, Boolean functions and pads.
//! - [`auth`]: a one-time polynomial MAC over GF(2^t).
//! - [`protocols`]: protocol state machines and transcripts.
//! - [`adversary`]: channel interposition strategies.
//! - [`harness`]: experiment configuration, reports and the CLI.

pub mod adversary;
pub mod auth;
pub mod error;
pub mod harness;
pub mod oracles;
pub mod protocols;
pub mod qstate;
pub mod rng;

pub use error::{Error, Result};

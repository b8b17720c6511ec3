//! Models for a cavity-QED hybrid quantum repeater.
//!
//! The crate is `no_std` (it needs `alloc`). It contains:
//!
//! * [`fockcore`]: truncated Fock-space states, operators, coherent states,
//!   composite qubit+field states, concurrence and homodyne half-line projectors.
//! * [`dynamics`]: exact and branch-approximated Jaynes–Cummings and
//!   Tavis–Cummings propagators.
//! * [`channel`]: fiber and mirror loss acting on coherent branches, plus a
//!   Kraus pure-loss channel for the oracles.
//! * [`entgen`], [`purify`], [`swap`]: the three repeater primitives, each in
//!   closed form and as a Fock-space oracle.
//! * [`rates`] and [`mcsim`]: repeater timing and rate formulas, and a
//!   reproducible Monte Carlo of the chain.
#![no_std]
// `!(x > 0.0)` style checks are meant to reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod channel;
pub mod dynamics;
pub mod entgen;
mod error;
pub mod fockcore;
pub mod math;
pub mod mcsim;
pub mod purify;
pub mod rates;
pub mod swap;
pub mod tolerances;

pub use error::{Error, Result};
pub use math::C64;

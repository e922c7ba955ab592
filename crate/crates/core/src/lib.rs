//! Solver and simulator for the two-player exam script-swapping deterrence game.
//!
//! Everything in this crate is a pure function of [`GameParams`] and a
//! [`BehaviorPolicy`]: closed-form payoffs, the 2×2 preparation-stage game,
//! pure and mixed Nash equilibria, detection-probability thresholds,
//! comparative statics, welfare, and a seeded Monte Carlo oracle for the
//! extensive-form timeline.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line front end and parallel drivers live in the companion `scriptswap`
//! crate.

#![no_std]
// `!(x <= y)` is used on purpose so that NaN falls on the failing side
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod equilibrium;
mod error;
pub mod matrix;
pub mod mcsim;
pub mod model;
pub mod payoffs;
pub mod statics;
pub mod welfare;

pub use error::{GameError, Result};
pub use matrix::{build_matrix, build_matrix_in, symmetric_payoffs, Cell, PayoffMatrix, Profile};
pub use model::{effort_cost, BehaviorPolicy, Field, GameParams, Player, PrepStrategy, Regime, StrategyProfile};

//! Simulation library for infinitely many-armed bandits with rested rotting
//! rewards.
//!
//! The crate is organised bottom-up:
//!
//! - [`common`]: seeds, random streams, horizon configuration, observations.
//! - [`reservoir`]: lazy sampling of the infinite arm pool.
//! - [`adversary`]: rotting strategies under slow (`V_T`) and abrupt (`S_T`)
//!   budgets, plus the post-hoc budget audit.
//! - [`env`]: the environment state machine and its hidden regret ledger.
//! - [`windowstats`]: run statistics answering doubling-window UCB queries.
//! - [`policies`]: the adaptive sliding-window threshold policy, its EXP3
//!   bandit-over-bandit wrapper and the baselines.
//! - [`harness`]: experiment configuration, trial execution, aggregation,
//!   exponent fitting and auditing of result directories.

pub mod adversary;
pub mod common;
pub mod env;
pub mod error;
pub mod harness;
pub mod policies;
pub mod reservoir;
pub mod windowstats;

pub use common::{ArmId, HorizonConfig, Observation, SeedSpec, Stream};
pub use error::{Error, Result};

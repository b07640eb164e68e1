//! Exact probabilities, payoffs, best responses and Nash equilibria for
//! winners-take-all betting pools.
//!
//! `n` agents each stake one unit on one of `m` options; the options are then
//! ranked at random and the agents who picked the best-ranked chosen option
//! split the pool. In the Poisson-picking pool the options are independent
//! Poisson processes ranked by their event counts over one time unit.
//!
//! The crate is `no_std` and only needs `alloc`. Options are 0-based
//! throughout the API.

#![no_std]

extern crate alloc;

pub mod analytic;
pub mod dist;
mod error;
pub mod game;
pub mod rng;
mod set;
pub mod solver;
mod strategy;

pub use error::{Error, Result};
pub use set::{ProcessSet, MAX_PROCESSES};
pub use strategy::{MixedStrategy, SIMPLEX_TOL};

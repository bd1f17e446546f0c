//! Nonequilibrium thermometry with Gaussian probes.
//!
//! A probe mode (optionally entangled with an auxiliary mode) interacts with
//! a bath at temperature T for a time t; the temperature is read off a
//! Gaussian measurement repeated M = τ/t times. The modules cover the state
//! model ([`gaussian`]), the dynamics ([`channel`]), Fisher information and
//! its optimisation ([`fisher`], [`optimize`]), Monte-Carlo estimation
//! ([`estimator`]) and the sweep/CLI layer ([`sweep`]).

pub mod channel;
pub mod error;
pub mod estimator;
pub mod fisher;
pub mod gaussian;
pub mod optimize;
pub mod sweep;

pub use error::{Error, Result};

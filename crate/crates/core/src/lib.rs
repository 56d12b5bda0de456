//! Solver for symmetric Bayesian decision problems written as
//! valuation-based systems.
//!
//! A problem ([`model::DecisionProblem`]) holds decision and random
//! variables, utility valuations, potentials and precedence constraints.
//! [`fusion::solve`] deletes variables one at a time in an order compatible
//! with the precedence constraints, combining only the valuations that bear
//! on each deleted variable. It returns the maximum expected utility, the
//! argmax tables that make up an optimal strategy, and a count of the
//! arithmetic performed. [`oracle`] holds two independent reference solvers.

pub mod algebra;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod fusion;
pub mod model;
pub mod oracle;

pub use error::{Error, Result};

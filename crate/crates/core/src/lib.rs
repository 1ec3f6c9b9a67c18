//! Discrete-round simulator for clustered wireless sensor networks.
//!
//! Two clustering protocols share one node model and one energy account:
//!
//! - [`web`]: heads chosen by distance to the base station and residual
//!   energy, clusters filled by an exact 0/1 knapsack ([`knapsack`]).
//! - [`leach`]: probabilistic threshold election, nearest-head joining.
//!
//! [`sim::run_simulation`] drives either protocol to network death and
//! records a per-round [`sim::SimTrace`]; [`report`] aggregates traces over
//! seed sweeps and writes CSV and text summaries.

pub mod config;
pub mod energy;
pub mod error;
pub mod knapsack;
pub mod leach;
pub mod model;
pub mod report;
pub mod sim;
pub mod web;

pub use config::NetworkConfig;
pub use error::{Error, Result};
pub use sim::{run_simulation, Protocol, SimTrace};

//! Deterministic simulator for AODV and cooperative CO-AODV route discovery
//! in small ad hoc networks, plus the weighted network-type model.
//!
//! - [`model`]: scenarios, nodes, packets, routes, metrics.
//! - [`scenario_file`]: JSON scenario files.
//! - [`coopmath`]: distances, mobility, the cooperative predicate, scoring.
//! - [`protocol`]: HELLO exchange and both discovery procedures.
//! - [`classifier`]: weight profile to network type, candidate ranking.
//! - [`sim`]: seeded packet-level runs and protocol comparison.
//! - [`cli`]: the `coaodv-sim` command.

pub mod classifier;
pub mod cli;
pub mod coopmath;
pub mod model;
pub mod protocol;
pub mod scenario_file;
pub mod sim;

pub use model::{
    validate_scenario, NodeId, NodeState, Protocol, Route, RouteRequest, Scenario, ScenarioConfig,
    ScenarioError, SimMetrics, WeightProfile,
};

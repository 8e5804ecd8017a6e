//! Round-based simulator for cluster-based wireless sensor networks.
//!
//! Each round elects cluster heads with a deterministic HEED variant, places
//! the base station (statically or with the residual-energy-weighted LWB
//! rule), and charges a first-order radio model for member uplinks, head
//! reception, fusion, and head-to-BS transmission. Runs are pure functions of
//! their [`RunConfig`] and replay bit-exactly.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! at the crate root fix it to `f64`, which is what the experiment harness
//! uses.

pub mod error;
pub mod heed;
pub mod metrics;
pub mod model;
pub mod positioning;
pub mod radio;
pub mod rng;
pub mod scalar;
pub mod sim;

pub use error::{Error, Result};
pub use heed::{ch_probability, charge_clustering_overhead, run_election, ClusterAssignment};
pub use metrics::{
    death_milestones, default_milestones, improvement, lifetime, Improvement, MilestoneTable,
};
pub use model::{distance, spawn_topology, Role};
pub use positioning::{lwb_position, static_position, LwbNormalization, StrategyKind};
pub use radio::{aggregation_energy, broadcast_energy, rx_energy, tx_energy};
pub use rng::{Rng, Stream};
pub use scalar::{CompensatedSum, Scalar};
pub use sim::{run_simulation, EnergyCategory, RoundRecord, Simulation};

pub type Point2 = model::Point2<f64>;
pub type NodeState = model::NodeState<f64>;
pub type TopologyConfig = model::TopologyConfig<f64>;
pub type RadioParams = radio::RadioParams<f64>;
pub type ElectionParams = heed::ElectionParams<f64>;
pub type StrategySpec = positioning::StrategySpec<f64>;
pub type BsState = positioning::BsState<f64>;
pub type HeadSample = positioning::HeadSample<f64>;
pub type RunConfig = sim::RunConfig<f64>;
pub type SimulationResult = sim::SimulationResult<f64>;
pub type EnergyLedger = sim::EnergyLedger<f64>;

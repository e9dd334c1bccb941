//! Discrete-event simulation of a relayed flow in a mobile cognitive network.

mod config;
mod engine;
mod metrics;
mod world;

pub use config::{Policy, SimConfig};
pub use engine::{hop_cost, run, run_with, HopCost, Simulation};
pub use metrics::{
    Audit, PacketCounts, PacketRecord, RunOptions, SimMetrics, SimOutcome, TraceEvent, TraceRecord,
};
pub use world::{
    epoch_relay_decision, init_scenario, EpochChannel, EpochDecision, NodeId, NodeState, Role,
    World,
};

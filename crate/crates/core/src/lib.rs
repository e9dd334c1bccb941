//! Cognitive radio network toolkit.
//!
//! * [`channel`]: geometry, path loss, Rayleigh fading, noise, dB helpers.
//! * [`relay`]: amplify-and-forward SNRs and best-relay selection.
//! * [`sharing`]: SINR-constrained secondary-link activation and an
//!   exhaustive reference solver.
//! * [`swarm`]: binary particle swarm solver for the sharing problem.
//! * [`sim`]: deterministic discrete-event simulation of a relayed flow to a
//!   mobile destination.
//!
//! The math modules are generic over [`Real`] (`f32` or `f64`); the aliases
//! below name the common concrete instantiations. The simulator is `f64`.

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod error;
pub mod num;
pub mod relay;
pub mod sharing;
pub mod sim;
pub mod swarm;

pub use error::{Error, Result};
pub use num::Real;

pub type NodePosition64 = channel::NodePosition<f64>;
pub type NodePosition32 = channel::NodePosition<f32>;
pub type PathLossModel64 = channel::PathLossModel<f64>;
pub type PathLossModel32 = channel::PathLossModel<f32>;
pub type NoiseModel64 = channel::NoiseModel<f64>;
pub type NoiseModel32 = channel::NoiseModel<f32>;
pub type ChannelRealization64 = channel::ChannelRealization<f64>;
pub type ChannelRealization32 = channel::ChannelRealization<f32>;

pub type RelaySelectionConfig64 = relay::RelaySelectionConfig<f64>;
pub type RelaySelectionConfig32 = relay::RelaySelectionConfig<f32>;
pub type RelayDecision64 = relay::RelayDecision<f64>;
pub type RelayDecision32 = relay::RelayDecision<f32>;

pub type SharingInstance64 = sharing::SharingInstance<f64>;
pub type SharingInstance32 = sharing::SharingInstance<f32>;
pub type SharingSolution64 = sharing::SharingSolution<f64>;
pub type SharingSolution32 = sharing::SharingSolution<f32>;

pub type PsoConfig64 = swarm::PsoConfig<f64>;
pub type PsoConfig32 = swarm::PsoConfig<f32>;

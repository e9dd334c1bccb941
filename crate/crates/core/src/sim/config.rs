use serde::{Deserialize, Serialize};

use crate::channel::{db_to_linear, NoiseModel, PathLossModel};
use crate::error::{Error, Result};
use crate::relay::RelaySelectionConfig;

/// Relay management strategy for the source/destination flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    /// Re-select the relay every epoch and shift queued packets on a change.
    Clsss,
    /// Pick one relay at random at start-up and keep it for the whole run.
    StaticRandom,
}

impl Policy {
    pub fn name(self) -> &'static str {
        match self {
            Policy::Clsss => "clsss",
            Policy::StaticRandom => "static-random",
        }
    }
}

impl std::str::FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "clsss" => Ok(Policy::Clsss),
            "static-random" | "static_random" | "static" => Ok(Policy::StaticRandom),
            other => Err(Error::Config(format!(
                "unknown policy {other:?} (expected clsss or static-random)"
            ))),
        }
    }
}

/// Scenario parameters. Defaults follow the reference network settings:
/// 100 nodes in a 1000 m square, 100 s, 250 m range, 512 KiB packets,
/// 0.660 W transmit / 0.395 W receive power and 100 J per node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub node_count: usize,
    pub arena_m: [f64; 2],
    pub sim_time_s: f64,
    pub tx_range_m: f64,
    pub packet_size_bits: u64,
    pub tx_power_w: f64,
    pub rx_power_w: f64,
    pub initial_energy_j: f64,
    pub speed_range_mps: [f64; 2],
    /// Relay re-selection period.
    pub epoch_s: f64,
    /// Constant-bit-rate packet generation at the source.
    pub offered_load_pps: f64,
    pub seed: u64,
    /// Number of relay candidates. `None` makes every node that is not the
    /// source, the destination or a primary user a relay.
    pub relay_count: Option<usize>,
    pub primary_count: usize,
    pub bandwidth_hz: f64,
    pub noise_power_w: f64,
    pub path_loss_exponent: f64,
    pub snr_threshold_db: f64,
    /// Per-queue packet limit at the source and at the relay.
    pub queue_capacity: usize,
    pub policy: Policy,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            node_count: 100,
            arena_m: [1000.0, 1000.0],
            sim_time_s: 100.0,
            tx_range_m: 250.0,
            packet_size_bits: 512 * 1024 * 8,
            tx_power_w: 0.660,
            rx_power_w: 0.395,
            initial_energy_j: 100.0,
            speed_range_mps: [10.0, 50.0],
            epoch_s: 1.0,
            offered_load_pps: 2.0,
            seed: 0,
            relay_count: None,
            primary_count: 2,
            bandwidth_hz: 20e6,
            noise_power_w: 1e-6,
            path_loss_exponent: 2.0,
            snr_threshold_db: 6.0,
            queue_capacity: 64,
            policy: Policy::Clsss,
        }
    }
}

impl SimConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_policy(mut self, policy: Policy) -> Self {
        self.policy = policy;
        self
    }

    pub fn relays(&self) -> usize {
        self.relay_count
            .unwrap_or_else(|| self.node_count.saturating_sub(2 + self.primary_count))
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("arena width", self.arena_m[0]),
            ("arena height", self.arena_m[1]),
            ("simulation time", self.sim_time_s),
            ("transmission range", self.tx_range_m),
            ("transmit power", self.tx_power_w),
            ("receive power", self.rx_power_w),
            ("initial energy", self.initial_energy_j),
            ("epoch length", self.epoch_s),
            ("bandwidth", self.bandwidth_hz),
            ("noise power", self.noise_power_w),
            ("path loss exponent", self.path_loss_exponent),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(name, "positive and finite", v));
            }
        }
        if self.packet_size_bits == 0 {
            return Err(Error::Config("packet_size_bits must be positive".into()));
        }
        if !(self.offered_load_pps >= 0.0 && self.offered_load_pps.is_finite()) {
            return Err(Error::domain("offered load", ">= 0", self.offered_load_pps));
        }
        let [lo, hi] = self.speed_range_mps;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::Config(format!(
                "speed range must satisfy 0 < min <= max (got [{lo}, {hi}])"
            )));
        }
        let diagonal = self.arena_m[0].hypot(self.arena_m[1]);
        if self.tx_range_m > diagonal {
            return Err(Error::Config(format!(
                "transmission range {} m exceeds the arena diagonal {diagonal:.1} m",
                self.tx_range_m
            )));
        }
        if !self.snr_threshold_db.is_finite() {
            return Err(Error::domain(
                "SNR threshold (dB)",
                "finite",
                self.snr_threshold_db,
            ));
        }
        if self.queue_capacity == 0 {
            return Err(Error::Config("queue_capacity must be at least 1".into()));
        }
        let needed = self.relays() + 2 + self.primary_count;
        if self.node_count < needed {
            return Err(Error::Config(format!(
                "node_count {} is smaller than relays + source + destination + primaries = {needed}",
                self.node_count
            )));
        }
        Ok(())
    }

    pub fn path_loss(&self) -> PathLossModel<f64> {
        PathLossModel {
            exponent: self.path_loss_exponent,
            reference_distance: 1.0,
        }
    }

    pub fn relay_selection(&self) -> RelaySelectionConfig<f64> {
        RelaySelectionConfig {
            source_power: self.tx_power_w,
            snr_threshold: db_to_linear(self.snr_threshold_db),
            noise: NoiseModel {
                noise_power: self.noise_power_w,
            },
        }
    }
}

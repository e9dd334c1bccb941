//! Seeded random sharing instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Link, SharingInstance};
use crate::channel::{db_to_linear, NodePosition, NoiseModel, PathLossModel};
use crate::num::Real;

/// Draws link geometry inside a square arena.
///
/// Each link gets a uniform transmitter position and a receiver at a uniform
/// distance in `link_length_m` and uniform bearing, clamped to the arena.
/// Primary links are drawn before secondary links, so an instance generated
/// with fewer secondary links is a prefix of one generated with more.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InstanceGenerator {
    pub arena_side_m: f64,
    pub primary_count: usize,
    pub secondary_count: usize,
    pub link_length_m: (f64, f64),
    pub transmit_power_w: f64,
    pub path_loss_exponent: f64,
    pub noise_power_w: f64,
    pub sinr_floor_db: f64,
    pub bandwidth_hz: f64,
}

impl Default for InstanceGenerator {
    fn default() -> Self {
        Self {
            arena_side_m: 1000.0,
            primary_count: 2,
            secondary_count: 10,
            link_length_m: (10.0, 100.0),
            transmit_power_w: 1.0,
            path_loss_exponent: 2.0,
            noise_power_w: 1e-6,
            sinr_floor_db: 10.0,
            bandwidth_hz: 1e5,
        }
    }
}

impl InstanceGenerator {
    pub fn with_counts(mut self, primary: usize, secondary: usize) -> Self {
        self.primary_count = primary;
        self.secondary_count = secondary;
        self
    }

    pub fn with_floor_db(mut self, db: f64) -> Self {
        self.sinr_floor_db = db;
        self
    }

    pub fn generate<T: Real>(&self, seed: u64) -> SharingInstance<T> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let side = self.arena_side_m;
        let (lo, hi) = self.link_length_m;
        let draw_link = |rng: &mut ChaCha8Rng| {
            let tx = (rng.random_range(0.0..=side), rng.random_range(0.0..=side));
            let len = if hi > lo {
                rng.random_range(lo..hi)
            } else {
                lo
            };
            let bearing = rng.random_range(0.0..std::f64::consts::TAU);
            let rx = (
                (tx.0 + len * bearing.cos()).clamp(0.0, side),
                (tx.1 + len * bearing.sin()).clamp(0.0, side),
            );
            let pos = |p: (f64, f64)| NodePosition::new(T::lit(p.0), T::lit(p.1));
            Link::new(pos(tx), pos(rx))
        };
        let primary_links = (0..self.primary_count)
            .map(|_| draw_link(&mut rng))
            .collect();
        let secondary_links = (0..self.secondary_count)
            .map(|_| draw_link(&mut rng))
            .collect();
        SharingInstance {
            primary_links,
            secondary_links,
            transmit_power: T::lit(self.transmit_power_w),
            path_loss: PathLossModel {
                exponent: T::lit(self.path_loss_exponent),
                reference_distance: T::one(),
            },
            noise: NoiseModel {
                noise_power: T::lit(self.noise_power_w),
            },
            sinr_floor: T::lit(db_to_linear(self.sinr_floor_db)),
            bandwidth: T::lit(self.bandwidth_hz),
        }
    }
}

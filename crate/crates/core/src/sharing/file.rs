//! JSON document describing a sharing instance.
//!
//! ```json
//! {
//!   "primary_links":   [{ "tx": [100.0, 100.0], "rx": [140.0, 120.0] }],
//!   "secondary_links": [{ "tx": [600.0, 300.0], "rx": [650.0, 310.0] }],
//!   "transmit_power_w": 1.0,
//!   "path_loss_exponent": 2.0,
//!   "reference_distance_m": 1.0,
//!   "noise_power_w": 1e-8,
//!   "sinr_floor_db": 10.0,
//!   "bandwidth_hz": 1e5
//! }
//! ```
//!
//! The floor may be given as `sinr_floor_db` or `sinr_floor_linear`, not both.

use serde::{Deserialize, Serialize};

use super::{Link, SharingInstance};
use crate::channel::{db_to_linear, NodePosition, NoiseModel, PathLossModel};
use crate::error::{Error, Result};
use crate::num::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSpec {
    pub tx: [f64; 2],
    pub rx: [f64; 2],
}

fn default_exponent() -> f64 {
    2.0
}

fn default_reference() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(default)]
    pub primary_links: Vec<LinkSpec>,
    #[serde(default)]
    pub secondary_links: Vec<LinkSpec>,
    pub transmit_power_w: f64,
    #[serde(default = "default_exponent")]
    pub path_loss_exponent: f64,
    #[serde(default = "default_reference")]
    pub reference_distance_m: f64,
    pub noise_power_w: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sinr_floor_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sinr_floor_linear: Option<f64>,
    pub bandwidth_hz: f64,
}

impl InstanceFile {
    pub fn to_instance<T: Real>(&self) -> Result<SharingInstance<T>> {
        let floor = match (self.sinr_floor_db, self.sinr_floor_linear) {
            (Some(db), None) => db_to_linear(db),
            (None, Some(lin)) => lin,
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "give either sinr_floor_db or sinr_floor_linear, not both".into(),
                ))
            }
            (None, None) => {
                return Err(Error::Config(
                    "missing sinr_floor_db or sinr_floor_linear".into(),
                ))
            }
        };
        let pos = |p: [f64; 2]| NodePosition::new(T::lit(p[0]), T::lit(p[1]));
        let links = |specs: &[LinkSpec]| -> Vec<Link<T>> {
            specs
                .iter()
                .map(|l| Link::new(pos(l.tx), pos(l.rx)))
                .collect()
        };
        let instance = SharingInstance {
            primary_links: links(&self.primary_links),
            secondary_links: links(&self.secondary_links),
            transmit_power: T::lit(self.transmit_power_w),
            path_loss: PathLossModel::new(
                T::lit(self.path_loss_exponent),
                T::lit(self.reference_distance_m),
            )?,
            noise: NoiseModel::new(T::lit(self.noise_power_w))?,
            sinr_floor: T::lit(floor),
            bandwidth: T::lit(self.bandwidth_hz),
        };
        instance.validate()?;
        Ok(instance)
    }

    pub fn from_instance<T: Real>(instance: &SharingInstance<T>) -> Self {
        let spec = |l: &Link<T>| LinkSpec {
            tx: [l.tx.x.to_f64_lossy(), l.tx.y.to_f64_lossy()],
            rx: [l.rx.x.to_f64_lossy(), l.rx.y.to_f64_lossy()],
        };
        Self {
            primary_links: instance.primary_links.iter().map(spec).collect(),
            secondary_links: instance.secondary_links.iter().map(spec).collect(),
            transmit_power_w: instance.transmit_power.to_f64_lossy(),
            path_loss_exponent: instance.path_loss.exponent.to_f64_lossy(),
            reference_distance_m: instance.path_loss.reference_distance.to_f64_lossy(),
            noise_power_w: instance.noise.noise_power.to_f64_lossy(),
            sinr_floor_db: None,
            sinr_floor_linear: Some(instance.sinr_floor.to_f64_lossy()),
            bandwidth_hz: instance.bandwidth.to_f64_lossy(),
        }
    }
}

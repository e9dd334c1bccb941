//! Geometry, path loss, Rayleigh fading, noise and dB conversions.
//!
//! All SNR math downstream is linear. dB values only appear at configuration
//! and reporting boundaries via [`db_to_linear`] / [`linear_to_db`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Real;

/// A point in the simulation arena, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NodePosition<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> NodePosition<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn distance_to(&self, other: &Self) -> T {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn inside_square(&self, side: T) -> bool {
        self.x >= T::zero() && self.y >= T::zero() && self.x <= side && self.y <= side
    }
}

/// Distance-power attenuation `max(d, d0)^-m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossModel<T> {
    pub exponent: T,
    pub reference_distance: T,
}

impl<T: Real> Default for PathLossModel<T> {
    fn default() -> Self {
        Self {
            exponent: T::lit(2.0),
            reference_distance: T::one(),
        }
    }
}

impl<T: Real> PathLossModel<T> {
    pub fn new(exponent: T, reference_distance: T) -> Result<Self> {
        let model = Self {
            exponent,
            reference_distance,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.exponent > T::zero()) {
            return Err(Error::domain(
                "path loss exponent",
                "> 0",
                self.exponent.to_f64_lossy(),
            ));
        }
        if !(self.reference_distance > T::zero()) {
            return Err(Error::domain(
                "reference distance",
                "> 0",
                self.reference_distance.to_f64_lossy(),
            ));
        }
        Ok(())
    }

    /// Power gain at `distance`. Distances below the reference distance are
    /// clamped so the gain never exceeds the reference-distance gain.
    #[inline]
    pub fn gain(&self, distance: T) -> T {
        let d = distance.max(self.reference_distance) / self.reference_distance;
        d.powf(-self.exponent)
    }
}

/// Free-function form of [`PathLossModel::gain`].
#[inline]
pub fn path_loss_gain<T: Real>(distance: T, model: &PathLossModel<T>) -> T {
    model.gain(distance)
}

/// Squared magnitude `|h|^2` of a fading coefficient.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FadingCoefficient<T>(T);

impl<T: Real> FadingCoefficient<T> {
    pub fn new(power_gain: T) -> Result<Self> {
        if !(power_gain >= T::zero()) {
            return Err(Error::domain(
                "fading power gain",
                ">= 0",
                power_gain.to_f64_lossy(),
            ));
        }
        Ok(Self(power_gain))
    }

    /// Draws a unit-mean Rayleigh power gain (exponentially distributed).
    pub fn sample_rayleigh<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let g: f64 = rng.sample(Exp1);
        Self(T::lit(g))
    }

    #[inline]
    pub fn power_gain(self) -> T {
        self.0
    }
}

/// Per-channel average noise power in watts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel<T> {
    pub noise_power: T,
}

impl<T: Real> NoiseModel<T> {
    pub fn new(noise_power: T) -> Result<Self> {
        if !(noise_power > T::zero()) {
            return Err(Error::domain(
                "noise power",
                "> 0",
                noise_power.to_f64_lossy(),
            ));
        }
        Ok(Self { noise_power })
    }
}

/// Power gains for the two hops of every candidate relay.
///
/// Index `i` in both lists refers to relay `i + 1`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ChannelRealization<T> {
    source_relay_gains: Vec<T>,
    relay_dest_gains: Vec<T>,
}

impl<T: Real> ChannelRealization<T> {
    pub fn new(source_relay_gains: Vec<T>, relay_dest_gains: Vec<T>) -> Result<Self> {
        if source_relay_gains.len() != relay_dest_gains.len() {
            return Err(Error::Config(format!(
                "channel realization hop lists differ in length ({} vs {})",
                source_relay_gains.len(),
                relay_dest_gains.len()
            )));
        }
        if let Some(bad) = source_relay_gains
            .iter()
            .chain(relay_dest_gains.iter())
            .find(|g| !(**g >= T::zero()))
        {
            return Err(Error::domain(
                "channel power gain",
                ">= 0",
                bad.to_f64_lossy(),
            ));
        }
        Ok(Self {
            source_relay_gains,
            relay_dest_gains,
        })
    }

    pub fn relay_count(&self) -> usize {
        self.source_relay_gains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.source_relay_gains.is_empty()
    }

    pub fn source_relay_gains(&self) -> &[T] {
        &self.source_relay_gains
    }

    pub fn relay_dest_gains(&self) -> &[T] {
        &self.relay_dest_gains
    }

    /// `(|CH_SRi|^2, |CH_RiD|^2)` pairs in relay order.
    pub fn pairs(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.source_relay_gains
            .iter()
            .copied()
            .zip(self.relay_dest_gains.iter().copied())
    }
}

/// Draws `relay_count` independent unit-mean Rayleigh gain pairs.
///
/// Gains are drawn source-hop first, then relay-hop, relay by relay, from a
/// ChaCha8 stream seeded with `seed`.
pub fn sample_channel<T: Real>(relay_count: usize, seed: u64) -> ChannelRealization<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_channel_with(relay_count, &mut rng)
}

pub fn sample_channel_with<T: Real, R: Rng + ?Sized>(
    relay_count: usize,
    rng: &mut R,
) -> ChannelRealization<T> {
    let mut sr = Vec::with_capacity(relay_count);
    let mut rd = Vec::with_capacity(relay_count);
    for _ in 0..relay_count {
        sr.push(FadingCoefficient::<T>::sample_rayleigh(rng).power_gain());
        rd.push(FadingCoefficient::<T>::sample_rayleigh(rng).power_gain());
    }
    ChannelRealization {
        source_relay_gains: sr,
        relay_dest_gains: rd,
    }
}

/// Linear SNR `W |CH|^2 / N_o`.
#[inline]
pub fn snr_of<T: Real>(transmit_power: T, power_gain: T, noise: &NoiseModel<T>) -> T {
    transmit_power * power_gain / noise.noise_power
}

#[inline]
pub fn db_to_linear<T: Real>(db: T) -> T {
    T::lit(10.0).powf(db / T::lit(10.0))
}

pub fn linear_to_db<T: Real>(value: T) -> Result<T> {
    if !(value > T::zero()) {
        return Err(Error::domain(
            "linear value for dB conversion",
            "> 0",
            value.to_f64_lossy(),
        ));
    }
    Ok(T::lit(10.0) * value.log10())
}

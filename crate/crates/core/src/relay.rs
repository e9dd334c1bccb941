//! Amplify-and-forward relay selection.
//!
//! For every relay the per-hop SNRs and the end-to-end AF SNR are computed.
//! The threshold set `U` holds relays whose source hop clears the SNR
//! threshold, the optimal set `V` holds relays attaining the best relay hop,
//! and the selected relay is drawn from their intersection.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::channel::{snr_of, ChannelRealization, NoiseModel};
use crate::error::{Error, Result};
use crate::num::Real;

/// 1-based relay identifier, matching the relay's position in a
/// [`ChannelRealization`] plus one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RelayId(pub usize);

impl RelayId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 - 1
    }
}

impl fmt::Display for RelayId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelaySelectionConfig<T> {
    /// Source transmit power `W_s` in watts, also used for the relay hop.
    pub source_power: T,
    /// Linear SNR threshold on the source-to-relay hop.
    pub snr_threshold: T,
    pub noise: NoiseModel<T>,
}

impl<T: Real> RelaySelectionConfig<T> {
    pub fn new(source_power: T, snr_threshold: T, noise: NoiseModel<T>) -> Result<Self> {
        let cfg = Self {
            source_power,
            snr_threshold,
            noise,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.source_power > T::zero()) {
            return Err(Error::domain(
                "source power",
                "> 0",
                self.source_power.to_f64_lossy(),
            ));
        }
        if !(self.snr_threshold >= T::zero()) {
            return Err(Error::domain(
                "SNR threshold",
                ">= 0",
                self.snr_threshold.to_f64_lossy(),
            ));
        }
        if !(self.noise.noise_power > T::zero()) {
            return Err(Error::domain(
                "noise power",
                "> 0",
                self.noise.noise_power.to_f64_lossy(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelayCandidate<T> {
    pub id: RelayId,
    pub snr_source_relay: T,
    pub snr_relay_dest: T,
    pub snr_equivalent: T,
    pub amplification: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelayDecision<T> {
    /// `U`: relays whose source-hop SNR meets the threshold, ascending.
    pub candidate_set: Vec<RelayId>,
    /// `V`: relays attaining the maximal relay-to-destination SNR, ascending.
    pub optimal_set: Vec<RelayId>,
    pub best: Option<RelayId>,
    /// Set when `U ∩ V` was empty and `best` came from the argmax over `U`.
    pub fallback: bool,
    pub all_candidates: Vec<RelayCandidate<T>>,
}

impl<T: Real> RelayDecision<T> {
    pub fn candidate(&self, id: RelayId) -> Option<&RelayCandidate<T>> {
        self.all_candidates.get(id.index())
    }

    pub fn best_candidate(&self) -> Option<&RelayCandidate<T>> {
        self.best.and_then(|id| self.candidate(id))
    }
}

/// AF gain `sqrt(W_s / (|CH_SR|^2 W_s + N_o))`.
#[inline]
pub fn amplification_factor<T: Real>(source_power: T, gain_sr: T, noise: &NoiseModel<T>) -> T {
    (source_power / (gain_sr * source_power + noise.noise_power)).sqrt()
}

/// End-to-end SNR of a two-hop AF link.
#[inline]
pub fn equivalent_af_snr<T: Real>(snr_sr: T, snr_rd: T) -> T {
    let num = snr_sr * snr_rd;
    if num == T::zero() {
        return T::zero();
    }
    num / (snr_sr + snr_rd + T::one())
}

pub fn build_candidates<T: Real>(
    realization: &ChannelRealization<T>,
    cfg: &RelaySelectionConfig<T>,
) -> Vec<RelayCandidate<T>> {
    realization
        .pairs()
        .enumerate()
        .map(|(i, (g_sr, g_rd))| {
            let snr_sr = snr_of(cfg.source_power, g_sr, &cfg.noise);
            let snr_rd = snr_of(cfg.source_power, g_rd, &cfg.noise);
            RelayCandidate {
                id: RelayId(i + 1),
                snr_source_relay: snr_sr,
                snr_relay_dest: snr_rd,
                snr_equivalent: equivalent_af_snr(snr_sr, snr_rd),
                amplification: amplification_factor(cfg.source_power, g_sr, &cfg.noise),
            }
        })
        .collect()
}

pub fn threshold_filter<T: Real>(
    candidates: &[RelayCandidate<T>],
    cfg: &RelaySelectionConfig<T>,
) -> Vec<RelayId> {
    candidates
        .iter()
        .filter(|c| c.snr_source_relay >= cfg.snr_threshold)
        .map(|c| c.id)
        .collect()
}

/// Every relay attaining the maximal relay-to-destination SNR (ties kept).
pub fn max_snr_set<T: Real>(candidates: &[RelayCandidate<T>]) -> Vec<RelayId> {
    let Some(max) = candidates
        .iter()
        .map(|c| c.snr_relay_dest)
        .reduce(|a, b| if b > a { b } else { a })
    else {
        return Vec::new();
    };
    candidates
        .iter()
        .filter(|c| c.snr_relay_dest == max)
        .map(|c| c.id)
        .collect()
}

/// Runs the full selection. Ties resolve to the lowest relay id. When the
/// threshold and optimal sets do not intersect, the threshold-set member with
/// the strongest relay hop is returned and `fallback` is set.
pub fn select_best_relay<T: Real>(
    realization: &ChannelRealization<T>,
    cfg: &RelaySelectionConfig<T>,
) -> RelayDecision<T> {
    decide(build_candidates(realization, cfg), cfg)
}

pub(crate) fn decide<T: Real>(
    candidates: Vec<RelayCandidate<T>>,
    cfg: &RelaySelectionConfig<T>,
) -> RelayDecision<T> {
    let u = threshold_filter(&candidates, cfg);
    let v = max_snr_set(&candidates);
    let mut fallback = false;
    let mut best = u.iter().copied().find(|id| v.contains(id));
    if best.is_none() && !u.is_empty() {
        fallback = true;
        let mut pick = u[0];
        for &id in &u[1..] {
            if candidates[id.index()].snr_relay_dest > candidates[pick.index()].snr_relay_dest {
                pick = id;
            }
        }
        best = Some(pick);
    }
    RelayDecision {
        candidate_set: u,
        optimal_set: v,
        best,
        fallback,
        all_candidates: candidates,
    }
}

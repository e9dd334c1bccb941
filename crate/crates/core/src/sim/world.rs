//! Node placement, random-waypoint mobility and per-epoch relay decisions.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use super::config::SimConfig;
use crate::channel::{snr_of, ChannelRealization, NodePosition};
use crate::error::Result;
use crate::relay::{select_best_relay, RelayDecision, RelaySelectionConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Source,
    Destination,
    Relay,
    Primary,
    /// Placed but unused, when fewer relays than spare nodes are requested.
    Idle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeState {
    pub position: NodePosition<f64>,
    pub waypoint: NodePosition<f64>,
    pub speed: f64,
    pub energy: f64,
    pub role: Role,
    pub mobile: bool,
    /// Set once the node could not afford a transmission or reception.
    pub depleted: bool,
}

impl NodeState {
    pub fn is_active(&self) -> bool {
        !self.depleted && self.energy > 0.0
    }

    /// Moves toward the waypoint for `dt` seconds. `redraw` supplies a new
    /// `(waypoint, speed)` each time the current waypoint is reached.
    pub fn advance<F>(&mut self, dt: f64, mut redraw: F)
    where
        F: FnMut() -> (NodePosition<f64>, f64),
    {
        if !self.mobile {
            return;
        }
        let mut remaining = dt;
        // Bounded so a degenerate redraw (zero-length legs) cannot spin forever.
        for _ in 0..10_000 {
            if remaining <= 0.0 || self.speed <= 0.0 {
                return;
            }
            let dist = self.position.distance_to(&self.waypoint);
            let reach = self.speed * remaining;
            if reach < dist {
                let f = reach / dist;
                self.position.x += (self.waypoint.x - self.position.x) * f;
                self.position.y += (self.waypoint.y - self.position.y) * f;
                return;
            }
            self.position = self.waypoint;
            remaining -= dist / self.speed;
            let (wp, speed) = redraw();
            self.waypoint = wp;
            self.speed = speed;
        }
    }
}

/// Fading draws for every relay in one epoch, `(source hop, relay hop)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochChannel {
    pub fading: Vec<(f64, f64)>,
}

/// Relay decision for one epoch together with the gains it was made from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochDecision {
    pub time: f64,
    /// Relays within range of both endpoints. Relay id `k` in `decision`
    /// refers to `candidates[k - 1]`.
    pub candidates: Vec<NodeId>,
    /// Path loss times fading for each candidate.
    pub realization: ChannelRealization<f64>,
    pub decision: RelayDecision<f64>,
}

impl EpochDecision {
    pub fn best_node(&self) -> Option<NodeId> {
        self.decision.best.map(|id| self.candidates[id.index()])
    }

    /// `(η_SR, η_RD)` of the selected relay.
    pub fn best_snrs(&self) -> Option<(f64, f64)> {
        self.decision
            .best_candidate()
            .map(|c| (c.snr_source_relay, c.snr_relay_dest))
    }
}

const PLACEMENT_STREAM: u64 = 0;
const MOBILITY_STREAM: u64 = 1;
const FADING_STREAM: u64 = 2;
const POLICY_STREAM: u64 = 3;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Static scenario plus mobile state. Placement, mobility, fading and policy
/// randomness use separate streams of the seed, so two policies run on the
/// same seed see the same geometry, trajectories and fading.
#[derive(Debug, Clone)]
pub struct World {
    pub cfg: SimConfig,
    pub time: f64,
    pub nodes: Vec<NodeState>,
    pub source: NodeId,
    pub destination: NodeId,
    pub relays: Vec<NodeId>,
    pub primaries: Vec<NodeId>,
    mobility_rng: ChaCha8Rng,
    fading_rng: ChaCha8Rng,
    policy_rng: ChaCha8Rng,
}

/// Places every node uniformly in the arena. Node 0 is the source, node 1
/// the mobile destination, then the primary users, then the relays. Only
/// the destination moves.
pub fn init_scenario(cfg: &SimConfig) -> Result<World> {
    cfg.validate()?;
    let mut placement = stream(cfg.seed, PLACEMENT_STREAM);
    let mut mobility_rng = stream(cfg.seed, MOBILITY_STREAM);
    let [w, h] = cfg.arena_m;
    let relay_count = cfg.relays();
    let first_relay = 2 + cfg.primary_count;

    let mut nodes = Vec::with_capacity(cfg.node_count);
    for i in 0..cfg.node_count {
        let position = NodePosition::new(
            placement.random_range(0.0..=w),
            placement.random_range(0.0..=h),
        );
        let role = match i {
            0 => Role::Source,
            1 => Role::Destination,
            i if i < first_relay => Role::Primary,
            i if i < first_relay + relay_count => Role::Relay,
            _ => Role::Idle,
        };
        nodes.push(NodeState {
            position,
            waypoint: position,
            speed: 0.0,
            energy: cfg.initial_energy_j,
            role,
            mobile: role == Role::Destination,
            depleted: false,
        });
    }
    let dest = &mut nodes[1];
    let [lo, hi] = cfg.speed_range_mps;
    dest.waypoint = NodePosition::new(
        mobility_rng.random_range(0.0..=w),
        mobility_rng.random_range(0.0..=h),
    );
    dest.speed = mobility_rng.random_range(lo..=hi);

    Ok(World {
        cfg: cfg.clone(),
        time: 0.0,
        nodes,
        source: NodeId(0),
        destination: NodeId(1),
        primaries: (2..first_relay).map(NodeId).collect(),
        relays: (first_relay..first_relay + relay_count)
            .map(NodeId)
            .collect(),
        mobility_rng,
        fading_rng: stream(cfg.seed, FADING_STREAM),
        policy_rng: stream(cfg.seed, POLICY_STREAM),
    })
}

impl World {
    pub fn node(&self, id: NodeId) -> &NodeState {
        &self.nodes[id.0]
    }

    pub fn node_mut(&mut self, id: NodeId) -> &mut NodeState {
        &mut self.nodes[id.0]
    }

    pub fn distance(&self, a: NodeId, b: NodeId) -> f64 {
        self.node(a).position.distance_to(&self.node(b).position)
    }

    pub fn in_range(&self, a: NodeId, b: NodeId) -> bool {
        self.distance(a, b) <= self.cfg.tx_range_m
    }

    /// Random-waypoint motion of every mobile node over `dt` seconds.
    pub fn advance_mobility(&mut self, dt: f64) {
        let [w, h] = self.cfg.arena_m;
        let [lo, hi] = self.cfg.speed_range_mps;
        let rng = &mut self.mobility_rng;
        for node in self.nodes.iter_mut().filter(|n| n.mobile) {
            node.advance(dt, || {
                let wp = NodePosition::new(rng.random_range(0.0..=w), rng.random_range(0.0..=h));
                (wp, rng.random_range(lo..=hi))
            });
        }
        self.time += dt;
    }

    /// Draws unit-mean Rayleigh power gains for both hops of every relay.
    pub fn sample_epoch_channel(&mut self) -> EpochChannel {
        let rng = &mut self.fading_rng;
        EpochChannel {
            fading: self
                .relays
                .iter()
                .map(|_| (rng.sample(Exp1), rng.sample(Exp1)))
                .collect(),
        }
    }

    fn hop_gain(&self, a: NodeId, b: NodeId, fading: f64) -> f64 {
        self.cfg.path_loss().gain(self.distance(a, b)) * fading
    }

    /// Hop SNRs through `relay` for the given epoch channel; a hop longer
    /// than the transmission range, or touching a depleted node, has SNR 0.
    pub fn hop_snrs(&self, relay: NodeId, channel: &EpochChannel) -> (f64, f64) {
        let k = relay.0 - self.relays[0].0;
        let (f_sr, f_rd) = channel.fading[k];
        let rcfg = self.relay_config();
        let snr = |a: NodeId, b: NodeId, f: f64| {
            if self.in_range(a, b) && self.node(a).is_active() && self.node(b).is_active() {
                snr_of(rcfg.source_power, self.hop_gain(a, b, f), &rcfg.noise)
            } else {
                0.0
            }
        };
        (
            snr(self.source, relay, f_sr),
            snr(relay, self.destination, f_rd),
        )
    }

    pub fn relay_config(&self) -> RelaySelectionConfig<f64> {
        self.cfg.relay_selection()
    }

    /// Active relays within range of both the source and the destination.
    pub fn reachable_relays(&self) -> Vec<NodeId> {
        self.relays
            .iter()
            .copied()
            .filter(|&r| {
                self.node(r).is_active()
                    && self.in_range(self.source, r)
                    && self.in_range(r, self.destination)
            })
            .collect()
    }

    /// Runs relay selection over the reachable relays using this epoch's fading.
    pub fn decide(&self, channel: &EpochChannel) -> EpochDecision {
        let candidates = self.reachable_relays();
        let base = self.relays.first().map_or(0, |r| r.0);
        let (sr, rd): (Vec<f64>, Vec<f64>) = candidates
            .iter()
            .map(|&r| {
                let (f_sr, f_rd) = channel.fading[r.0 - base];
                (
                    self.hop_gain(self.source, r, f_sr),
                    self.hop_gain(r, self.destination, f_rd),
                )
            })
            .unzip();
        let realization =
            ChannelRealization::new(sr, rd).expect("gains are non-negative and paired");
        let decision = select_best_relay(&realization, &self.relay_config());
        EpochDecision {
            time: self.time,
            candidates,
            realization,
            decision,
        }
    }

    pub fn policy_rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.policy_rng
    }
}

/// Samples this epoch's fading and selects the best relay.
pub fn epoch_relay_decision(world: &mut World) -> EpochDecision {
    let channel = world.sample_epoch_channel();
    world.decide(&channel)
}

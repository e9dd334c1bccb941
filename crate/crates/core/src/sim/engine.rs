//! Event loop for the relayed source-to-destination flow.
//!
//! Packets are generated at constant bit rate at the source, cross the
//! source-to-relay hop and then the relay-to-destination hop. Each hop runs
//! at the Shannon capacity of its SNR for the current epoch, fixed when the
//! transmission starts. Radios are half duplex: a node takes part in at most
//! one transmission at a time, and the relay drains its queue before it
//! accepts another packet from the source.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use rand::Rng;

use super::config::{Policy, SimConfig};
use super::metrics::{
    Audit, PacketCounts, PacketRecord, RunOptions, SimMetrics, SimOutcome, TraceEvent, TraceRecord,
};
use super::world::{init_scenario, EpochDecision, NodeId, World};
use crate::error::Result;
use crate::sharing::link_capacity;

/// Air time and energy of one packet on one hop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopCost {
    pub duration_s: f64,
    pub tx_energy_j: f64,
    pub rx_energy_j: f64,
}

/// `None` when the hop has no capacity, otherwise `packet_bits / capacity`
/// seconds of air time charged at the transmit and receive powers.
pub fn hop_cost(
    packet_bits: u64,
    capacity_bps: f64,
    tx_power_w: f64,
    rx_power_w: f64,
) -> Option<HopCost> {
    if !(capacity_bps > 0.0) {
        return None;
    }
    let duration_s = packet_bits as f64 / capacity_bps;
    Some(HopCost {
        duration_s,
        tx_energy_j: tx_power_w * duration_s,
        rx_energy_j: rx_power_w * duration_s,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum EventKind {
    Epoch(u64),
    Generate(u64),
    HopDone {
        packet: usize,
        from: NodeId,
        to: NodeId,
        last_hop: bool,
    },
}

#[derive(Debug)]
struct Scheduled {
    time: f64,
    seq: u64,
    kind: EventKind,
}

impl PartialEq for Scheduled {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Scheduled {}

impl PartialOrd for Scheduled {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scheduled {
    // Reversed so the max-heap pops the earliest event, insertion order on ties.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

pub struct Simulation {
    world: World,
    events: BinaryHeap<Scheduled>,
    seq: u64,
    now: f64,
    packets: Vec<PacketRecord>,
    source_queue: VecDeque<usize>,
    relay_queue: VecDeque<usize>,
    current_relay: Option<NodeId>,
    rate_sr: f64,
    rate_rd: f64,
    busy: Vec<bool>,
    counts: PacketCounts,
    tx_time: f64,
    rx_time: f64,
    debited: f64,
    consumed: Vec<f64>,
    checks: u64,
    failures: u64,
    trace: Option<Vec<TraceRecord>>,
    decisions: Option<Vec<EpochDecision>>,
}

impl Simulation {
    pub fn new(cfg: &SimConfig, opts: RunOptions) -> Result<Self> {
        let world = init_scenario(cfg)?;
        let n = world.nodes.len();
        Ok(Self {
            world,
            events: BinaryHeap::new(),
            seq: 0,
            now: 0.0,
            packets: Vec::new(),
            source_queue: VecDeque::new(),
            relay_queue: VecDeque::new(),
            current_relay: None,
            rate_sr: 0.0,
            rate_rd: 0.0,
            busy: vec![false; n],
            counts: PacketCounts::default(),
            tx_time: 0.0,
            rx_time: 0.0,
            debited: 0.0,
            consumed: vec![0.0; n],
            checks: 0,
            failures: 0,
            trace: opts.trace.then(Vec::new),
            decisions: opts.log_decisions.then(Vec::new),
        })
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn current_relay(&self) -> Option<NodeId> {
        self.current_relay
    }

    pub fn counts(&self) -> PacketCounts {
        PacketCounts {
            queued: (self.source_queue.len() + self.relay_queue.len()) as u64,
            ..self.counts
        }
    }

    fn cfg(&self) -> &SimConfig {
        &self.world.cfg
    }

    fn schedule(&mut self, time: f64, kind: EventKind) {
        self.seq += 1;
        self.events.push(Scheduled {
            time,
            seq: self.seq,
            kind,
        });
    }

    fn log(&mut self, packet: usize, event: TraceEvent, from: Option<NodeId>, to: Option<NodeId>) {
        let now = self.now;
        if let Some(trace) = self.trace.as_mut() {
            let (queueing_s, service_s) = if event == TraceEvent::Delivered {
                let p = &self.packets[packet];
                (Some(p.queueing_s), Some(p.service_s))
            } else {
                (None, None)
            };
            trace.push(TraceRecord {
                t: now,
                packet: packet as u64,
                event,
                from,
                to,
                queueing_s,
                service_s,
            });
        }
    }

    fn drop_packet(&mut self, packet: usize) {
        self.packets[packet].dropped = true;
        self.counts.dropped += 1;
        self.log(packet, TraceEvent::Dropped, None, None);
    }

    fn enqueue_relay(&mut self, packet: usize) {
        if self.relay_queue.len() >= self.cfg().queue_capacity {
            self.drop_packet(packet);
        } else {
            self.packets[packet].enqueued_at = self.now;
            self.relay_queue.push_back(packet);
        }
    }

    /// Puts packets back at the head of the source queue, keeping their
    /// order. The newest packets are dropped if the queue overflows.
    fn return_to_source(&mut self, packets: Vec<usize>) {
        for &p in packets.iter().rev() {
            self.packets[p].enqueued_at = self.now;
            self.source_queue.push_front(p);
        }
        while self.source_queue.len() > self.cfg().queue_capacity {
            let p = self.source_queue.pop_back().expect("non-empty queue");
            self.drop_packet(p);
        }
    }

    /// Moves every packet queued at the current relay to `new_relay`, or back
    /// to the source when there is none. Each moved packet counts one shift
    /// and one control message. Returns the number of shifted packets.
    pub fn shift_packets(&mut self, new_relay: Option<NodeId>) -> usize {
        if new_relay == self.current_relay {
            return 0;
        }
        let old = self.current_relay;
        let moved: Vec<usize> = self.relay_queue.drain(..).collect();
        for &p in &moved {
            let rec = &mut self.packets[p];
            rec.shifted += 1;
            rec.queueing_s += self.now - rec.enqueued_at;
            rec.enqueued_at = self.now;
            let event = if new_relay.is_some() {
                TraceEvent::Shifted
            } else {
                TraceEvent::ReturnedToSource
            };
            self.log(p, event, old, new_relay);
        }
        let n = moved.len();
        self.counts.shifts += n as u64;
        self.counts.control_messages += n as u64;
        self.current_relay = new_relay;
        match new_relay {
            Some(_) => {
                for p in moved {
                    self.enqueue_relay(p);
                }
            }
            None => self.return_to_source(moved),
        }
        n
    }

    fn on_epoch(&mut self, k: u64) {
        let t = k as f64 * self.cfg().epoch_s;
        let dt = t - self.world.time;
        if dt > 0.0 {
            self.world.advance_mobility(dt);
        }
        let channel = self.world.sample_epoch_channel();
        let decision = self.world.decide(&channel);
        let bw = self.cfg().bandwidth_hz;
        match self.cfg().policy {
            Policy::Clsss => {
                self.counts.control_messages += decision.candidates.len() as u64;
                let new = decision.best_node();
                if new != self.current_relay {
                    self.counts.control_messages += 1;
                    self.shift_packets(new);
                }
                let (sr, rd) = decision.best_snrs().unwrap_or((0.0, 0.0));
                self.rate_sr = link_capacity(bw, sr);
                self.rate_rd = link_capacity(bw, rd);
            }
            Policy::StaticRandom => {
                if k == 0 {
                    let reachable = self.world.reachable_relays();
                    let pool = if reachable.is_empty() {
                        self.world.relays.clone()
                    } else {
                        reachable
                    };
                    if !pool.is_empty() {
                        let i = self.world.policy_rng().random_range(0..pool.len());
                        self.current_relay = Some(pool[i]);
                        self.counts.control_messages += 1;
                    }
                }
                let (sr, rd) = self
                    .current_relay
                    .map_or((0.0, 0.0), |r| self.world.hop_snrs(r, &channel));
                self.rate_sr = link_capacity(bw, sr);
                self.rate_rd = link_capacity(bw, rd);
            }
        }
        if let Some(log) = self.decisions.as_mut() {
            log.push(decision);
        }
        let next = (k + 1) as f64 * self.cfg().epoch_s;
        if next < self.cfg().sim_time_s {
            self.schedule(next, EventKind::Epoch(k + 1));
        }
    }

    fn on_generate(&mut self, k: u64) {
        let id = self.packets.len();
        self.packets.push(PacketRecord {
            id: id as u64,
            created_at: self.now,
            delivered_at: None,
            dropped: false,
            hops: 0,
            shifted: 0,
            bits: self.cfg().packet_size_bits,
            queueing_s: 0.0,
            service_s: 0.0,
            enqueued_at: self.now,
        });
        self.counts.generated += 1;
        self.log(id, TraceEvent::Generated, Some(self.world.source), None);
        if self.source_queue.len() >= self.cfg().queue_capacity
            || !self.world.node(self.world.source).is_active()
        {
            self.drop_packet(id);
        } else {
            self.source_queue.push_back(id);
        }
        let next = (k + 1) as f64 / self.cfg().offered_load_pps;
        if next < self.cfg().sim_time_s {
            self.schedule(next, EventKind::Generate(k + 1));
        }
    }

    fn on_hop_done(&mut self, packet: usize, from: NodeId, to: NodeId, last_hop: bool) {
        self.busy[from.0] = false;
        self.busy[to.0] = false;
        self.counts.in_flight -= 1;
        self.packets[packet].hops += 1;
        self.log(packet, TraceEvent::HopDone, Some(from), Some(to));
        if last_hop {
            self.packets[packet].delivered_at = Some(self.now);
            self.counts.delivered += 1;
            self.log(packet, TraceEvent::Delivered, Some(from), Some(to));
            return;
        }
        match self.current_relay {
            Some(r) if r == to => self.enqueue_relay(packet),
            Some(r) => {
                // Arrived at a relay that was replaced while the packet was on air.
                self.packets[packet].shifted += 1;
                self.counts.shifts += 1;
                self.counts.control_messages += 1;
                self.log(packet, TraceEvent::Shifted, Some(to), Some(r));
                self.enqueue_relay(packet);
            }
            None => {
                self.packets[packet].shifted += 1;
                self.counts.shifts += 1;
                self.counts.control_messages += 1;
                self.log(packet, TraceEvent::ReturnedToSource, Some(to), None);
                self.return_to_source(vec![packet]);
            }
        }
    }

    /// Starts one transmission if both radios are free and can pay for it.
    /// A node that cannot afford its share is marked depleted.
    fn start(&mut self, from: NodeId, to: NodeId, capacity: f64, last_hop: bool) -> bool {
        let cfg = self.cfg();
        let Some(cost) = hop_cost(
            cfg.packet_size_bits,
            capacity,
            cfg.tx_power_w,
            cfg.rx_power_w,
        ) else {
            return false;
        };
        let mut ok = true;
        for (node, need) in [(from, cost.tx_energy_j), (to, cost.rx_energy_j)] {
            let n = self.world.node_mut(node);
            if !n.is_active() || n.energy < need {
                n.depleted = true;
                ok = false;
            }
        }
        if !ok {
            return false;
        }
        let queue = if last_hop {
            &mut self.relay_queue
        } else {
            &mut self.source_queue
        };
        let packet = queue.pop_front().expect("caller checked queue");
        let p = &mut self.packets[packet];
        p.queueing_s += self.now - p.enqueued_at;
        p.service_s += cost.duration_s;

        self.world.node_mut(from).energy -= cost.tx_energy_j;
        self.world.node_mut(to).energy -= cost.rx_energy_j;
        self.consumed[from.0] += cost.tx_energy_j;
        self.consumed[to.0] += cost.rx_energy_j;
        self.debited += cost.tx_energy_j + cost.rx_energy_j;
        self.tx_time += cost.duration_s;
        self.rx_time += cost.duration_s;

        self.busy[from.0] = true;
        self.busy[to.0] = true;
        self.counts.in_flight += 1;
        self.log(packet, TraceEvent::HopStart, Some(from), Some(to));
        self.schedule(
            self.now + cost.duration_s,
            EventKind::HopDone {
                packet,
                from,
                to,
                last_hop,
            },
        );
        true
    }

    fn try_start(&mut self) {
        let Some(relay) = self.current_relay else {
            return;
        };
        let (src, dst) = (self.world.source, self.world.destination);
        if !self.relay_queue.is_empty() && !self.busy[relay.0] && !self.busy[dst.0] {
            self.start(relay, dst, self.rate_rd, true);
        }
        if !self.source_queue.is_empty() && !self.busy[src.0] && !self.busy[relay.0] {
            self.start(src, relay, self.rate_sr, false);
        }
    }

    fn check_conservation(&mut self) {
        self.checks += 1;
        if !self.counts().conserved() {
            self.failures += 1;
        }
    }

    pub fn run(mut self) -> SimOutcome {
        let end = self.cfg().sim_time_s;
        self.schedule(0.0, EventKind::Epoch(0));
        if self.cfg().offered_load_pps > 0.0 {
            self.schedule(0.0, EventKind::Generate(0));
        }
        while let Some(ev) = self.events.pop() {
            if ev.time >= end {
                break;
            }
            self.now = ev.time;
            match ev.kind {
                EventKind::Epoch(k) => self.on_epoch(k),
                EventKind::Generate(k) => self.on_generate(k),
                EventKind::HopDone {
                    packet,
                    from,
                    to,
                    last_hop,
                } => self.on_hop_done(packet, from, to, last_hop),
            }
            self.try_start();
            self.check_conservation();
        }
        self.finish()
    }

    fn finish(mut self) -> SimOutcome {
        let cfg = self.world.cfg.clone();
        let counts = self.counts();
        let end = cfg.sim_time_s;
        for &p in self.source_queue.iter().chain(&self.relay_queue) {
            let rec = &mut self.packets[p];
            rec.queueing_s += end - rec.enqueued_at;
            rec.enqueued_at = end;
        }
        // Packets still held at the horizon enter the delay means with the
        // time they have waited so far, so a run that stops delivering is not
        // rewarded with a low mean.
        let (mut delay, mut queueing, mut held) = (0.0, 0.0, 0usize);
        let (mut delivered_delay, mut delivered) = (0.0, 0usize);
        for p in &self.packets {
            if p.dropped {
                continue;
            }
            held += 1;
            delay += p.delivered_at.unwrap_or(end) - p.created_at;
            queueing += p.queueing_s;
            if let Some(d) = p.delay() {
                delivered_delay += d;
                delivered += 1;
            }
        }
        let mean_ms = |sum: f64, n: usize| if n == 0 { 0.0 } else { 1e3 * sum / n as f64 };
        let metrics = SimMetrics {
            mean_delay_ms: mean_ms(delay, held),
            mean_queueing_delay_ms: mean_ms(queueing, held),
            mean_delivered_delay_ms: mean_ms(delivered_delay, delivered),
            throughput_kbps: counts.delivered as f64 * cfg.packet_size_bits as f64
                / cfg.sim_time_s
                / 1e3,
            pdr: if counts.generated == 0 {
                1.0
            } else {
                counts.delivered as f64 / counts.generated as f64
            },
            overhead: counts.control_messages as f64 / counts.delivered.max(1) as f64,
            energy_consumed_j: self.debited / self.world.nodes.len() as f64,
        };
        SimOutcome {
            config: cfg,
            metrics,
            counts,
            audit: Audit {
                total_tx_time_s: self.tx_time,
                total_rx_time_s: self.rx_time,
                total_energy_debited_j: self.debited,
                node_energy_consumed_j: self.consumed,
                conservation_checks: self.checks,
                conservation_failures: self.failures,
            },
            packets: self.packets,
            trace: self.trace,
            decisions: self.decisions,
        }
    }
}

pub fn run(cfg: &SimConfig) -> Result<SimOutcome> {
    run_with(cfg, RunOptions::default())
}

pub fn run_with(cfg: &SimConfig, opts: RunOptions) -> Result<SimOutcome> {
    Ok(Simulation::new(cfg, opts)?.run())
}

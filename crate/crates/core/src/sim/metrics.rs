use serde::{Deserialize, Serialize};

use super::config::SimConfig;
use super::world::{EpochDecision, NodeId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PacketRecord {
    pub id: u64,
    pub created_at: f64,
    pub delivered_at: Option<f64>,
    pub dropped: bool,
    /// Completed hop transmissions.
    pub hops: u32,
    /// Times the packet was moved to a different relay or back to the source.
    pub shifted: u32,
    pub bits: u64,
    /// Time spent waiting in queues, up to delivery or the end of the run.
    pub queueing_s: f64,
    /// Time spent on air.
    pub service_s: f64,
    #[serde(skip)]
    pub(crate) enqueued_at: f64,
}

impl PacketRecord {
    pub fn delay(&self) -> Option<f64> {
        self.delivered_at.map(|t| t - self.created_at)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimMetrics {
    /// Mean time in the system over packets that were not dropped. Packets
    /// still queued or on air at the end of the run count up to the horizon.
    pub mean_delay_ms: f64,
    /// Queueing share of `mean_delay_ms`, over the same packets.
    pub mean_queueing_delay_ms: f64,
    /// Mean end-to-end delay over delivered packets only.
    pub mean_delivered_delay_ms: f64,
    pub throughput_kbps: f64,
    pub pdr: f64,
    /// Control messages per delivered packet.
    pub overhead: f64,
    /// Mean energy consumed per node, joules.
    pub energy_consumed_j: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PacketCounts {
    pub generated: u64,
    pub delivered: u64,
    pub dropped: u64,
    pub queued: u64,
    pub in_flight: u64,
    pub shifts: u64,
    pub control_messages: u64,
}

impl PacketCounts {
    /// `delivered + dropped + queued + in_flight == generated`.
    pub fn conserved(&self) -> bool {
        self.delivered + self.dropped + self.queued + self.in_flight == self.generated
    }
}

/// Bookkeeping kept alongside the metrics so runs can be audited.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Audit {
    pub total_tx_time_s: f64,
    pub total_rx_time_s: f64,
    pub total_energy_debited_j: f64,
    pub node_energy_consumed_j: Vec<f64>,
    pub conservation_checks: u64,
    pub conservation_failures: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceEvent {
    Generated,
    Dropped,
    HopStart,
    HopDone,
    Shifted,
    ReturnedToSource,
    Delivered,
}

/// One line of the packet event trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub t: f64,
    pub packet: u64,
    pub event: TraceEvent,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub from: Option<NodeId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub to: Option<NodeId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub queueing_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub service_s: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunOptions {
    pub trace: bool,
    pub log_decisions: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutcome {
    pub config: SimConfig,
    pub metrics: SimMetrics,
    pub counts: PacketCounts,
    pub audit: Audit,
    pub packets: Vec<PacketRecord>,
    pub trace: Option<Vec<TraceRecord>>,
    pub decisions: Option<Vec<EpochDecision>>,
}

impl SimOutcome {
    /// Trace as line-delimited JSON, one record per line.
    pub fn trace_jsonl(&self) -> Option<String> {
        self.trace.as_ref().map(|records| {
            let mut out = String::new();
            for r in records {
                out.push_str(&serde_json::to_string(r).expect("trace record serializes"));
                out.push('\n');
            }
            out
        })
    }
}

use std::fmt;

use crate::kernel::{NodeId, SimTime};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TrafficClass {
    /// Delay-sensitive, event-driven traffic.
    ClassI,
    /// Best-effort periodic reporting.
    ClassII,
}

impl TrafficClass {
    pub const BOTH: [TrafficClass; 2] = [TrafficClass::ClassI, TrafficClass::ClassII];

    pub fn index(self) -> usize {
        match self {
            TrafficClass::ClassI => 0,
            TrafficClass::ClassII => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            TrafficClass::ClassI => "I",
            TrafficClass::ClassII => "II",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        match s {
            "I" => Some(TrafficClass::ClassI),
            "II" => Some(TrafficClass::ClassII),
            _ => None,
        }
    }
}

impl fmt::Display for TrafficClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "class {}", self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameKind {
    Sync,
    Data,
    Ack,
}

/// Schedule announcement carried by a SYNC frame.
#[derive(Clone, Debug, PartialEq)]
pub struct SyncInfo {
    /// Start of the sender's current cycle on the announced schedule.
    pub cycle_start: i64,
    pub next_sleep_at: i64,
    /// Listen-length history `(from_cycle_start, active_us)`; the last entry
    /// may lie in the future when a duty-cycle change is being announced.
    pub active_plan: Vec<(i64, u64)>,
    pub duty_cycle_pct: f64,
    pub is_primary: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    pub kind: FrameKind,
    pub src: NodeId,
    /// `None` is broadcast.
    pub dst: Option<NodeId>,
    pub class: Option<TrafficClass>,
    /// Per-sender MAC sequence number; retransmissions reuse it.
    pub uid: u64,
    /// Application packet carried by a DATA frame.
    pub packet: Option<u64>,
    pub enqueue_time: SimTime,
    pub tx_start_time: Option<SimTime>,
    pub carrier_sense_start: Option<SimTime>,
    /// Sender-side wait before carrier sensing began, microseconds.
    pub dss_delay_field: u64,
    pub next_hop_field: Option<NodeId>,
    pub payload_bits: u64,
    pub origin_time: SimTime,
    pub origin_node: NodeId,
    pub sync: Option<SyncInfo>,
}

impl Frame {
    /// A freshly generated DATA frame; `src` and `now` are also its origin.
    pub fn data(src: NodeId, dst: NodeId, class: TrafficClass, packet: u64, payload_bits: u64, now: SimTime) -> Self {
        Frame {
            kind: FrameKind::Data,
            src,
            dst: Some(dst),
            class: Some(class),
            uid: 0,
            packet: Some(packet),
            enqueue_time: now,
            tx_start_time: None,
            carrier_sense_start: None,
            dss_delay_field: 0,
            next_hop_field: None,
            payload_bits,
            origin_time: now,
            origin_node: src,
            sync: None,
        }
    }

    pub fn control(kind: FrameKind, src: NodeId, dst: Option<NodeId>, uid: u64, now: SimTime) -> Self {
        Frame {
            kind,
            src,
            dst,
            class: None,
            uid,
            packet: None,
            enqueue_time: now,
            tx_start_time: None,
            carrier_sense_start: None,
            dss_delay_field: 0,
            next_hop_field: None,
            payload_bits: 0,
            origin_time: now,
            origin_node: src,
            sync: None,
        }
    }

    /// Sender-side DSS delay: time from MAC arrival to the start of carrier
    /// sensing. Both timestamps must be set.
    pub fn dss_sample(&self) -> u64 {
        let cs = self
            .carrier_sense_start
            .expect("DSS sample requested before carrier sensing started");
        cs.since(self.enqueue_time)
    }

    /// MAC delay: time from MAC arrival to the transmission that succeeded.
    pub fn mac_delay(&self) -> u64 {
        let ts = self.tx_start_time.expect("MAC delay requested before transmission");
        ts.since(self.enqueue_time)
    }
}

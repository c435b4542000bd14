//! Run summaries built from a finished network's log.

use std::collections::{BTreeMap, HashSet};

use crate::mac::TrafficClass;
use crate::net::{Delivery, DropCause, RunLog};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ClassSummary {
    pub generated: u64,
    pub delivered: u64,
    pub dropped: u64,
    pub in_flight: u64,
    /// Mean end-to-end delay in µs, absent when nothing arrived.
    pub avg_delay_us: Option<f64>,
    /// Running sum of delays in sink-arrival order.
    pub cumulative_us: Vec<u64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Summary {
    pub classes: [ClassSummary; 2],
    pub drops_by_cause: BTreeMap<&'static str, u64>,
    /// Packets that are neither delivered, queued nor recorded as dropped.
    pub lost: u64,
}

impl Summary {
    pub fn class(&self, c: TrafficClass) -> &ClassSummary {
        &self.classes[c.index()]
    }

    pub fn delivered_total(&self) -> u64 {
        self.classes.iter().map(|c| c.delivered).sum()
    }

    pub fn generated_total(&self) -> u64 {
        self.classes.iter().map(|c| c.generated).sum()
    }

    pub fn conserved(&self) -> bool {
        self.lost == 0
            && self
                .classes
                .iter()
                .all(|c| c.generated == c.delivered + c.dropped + c.in_flight)
    }
}

/// Deliveries in sink order, stable on packet id.
pub fn ordered_deliveries(log: &RunLog) -> Vec<Delivery> {
    let mut d = log.deliveries.clone();
    d.sort_by_key(|x| (x.sink_time, x.packet));
    d
}

/// `queued` lists packet ids still held by some node at the horizon. A
/// packet counts as delivered if it reached the sink, else in flight if a
/// copy is queued, else dropped.
pub fn finalize(log: &RunLog, queued: &[u64]) -> Summary {
    let delivered: HashSet<u64> = log.deliveries.iter().map(|d| d.packet).collect();
    let queued: HashSet<u64> = queued.iter().copied().collect();
    let dropped: HashSet<u64> = log.drops.iter().map(|d| d.packet).collect();

    let mut s = Summary::default();
    for p in &log.generated {
        let c = &mut s.classes[p.class.index()];
        c.generated += 1;
        if delivered.contains(&p.id) {
            c.delivered += 1;
        } else if queued.contains(&p.id) {
            c.in_flight += 1;
        } else if dropped.contains(&p.id) {
            c.dropped += 1;
        } else {
            s.lost += 1;
        }
    }
    let mut counted = HashSet::new();
    for d in &log.drops {
        if !delivered.contains(&d.packet) && !queued.contains(&d.packet) && counted.insert(d.packet) {
            *s.drops_by_cause.entry(d.cause.name()).or_default() += 1;
        }
    }
    for cause in [DropCause::QueueOverflow, DropCause::RetryLimit, DropCause::NoRoute] {
        s.drops_by_cause.entry(cause.name()).or_default();
    }

    for d in ordered_deliveries(log) {
        let c = &mut s.classes[d.class.index()];
        let prev = c.cumulative_us.last().copied().unwrap_or(0);
        c.cumulative_us.push(prev + d.delay_us());
    }
    for c in &mut s.classes {
        if let Some(&total) = c.cumulative_us.last() {
            c.avg_delay_us = Some(total as f64 / c.cumulative_us.len() as f64);
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::SimTime;
    use crate::net::{DropRecord, PacketSpec};

    fn spec(id: u64, class: TrafficClass, t: u64) -> PacketSpec {
        PacketSpec {
            id,
            origin: 1,
            class,
            time: SimTime(t),
        }
    }

    fn delivery(p: &PacketSpec, at: u64) -> Delivery {
        Delivery {
            packet: p.id,
            class: p.class,
            origin_node: p.origin,
            origin_time: p.time,
            sink_time: SimTime(at),
        }
    }

    #[test]
    fn empty_run_has_no_average() {
        let s = finalize(&RunLog::default(), &[]);
        assert_eq!(s.class(TrafficClass::ClassI).avg_delay_us, None);
        assert!(s.class(TrafficClass::ClassII).cumulative_us.is_empty());
        assert!(s.conserved());
    }

    #[test]
    fn classification_and_series() {
        let g = vec![
            spec(0, TrafficClass::ClassI, 0),
            spec(1, TrafficClass::ClassI, 10),
            spec(2, TrafficClass::ClassII, 20),
            spec(3, TrafficClass::ClassII, 30),
            spec(4, TrafficClass::ClassI, 40),
        ];
        let log = RunLog {
            deliveries: vec![delivery(&g[1], 110), delivery(&g[0], 300), delivery(&g[2], 60)],
            drops: vec![
                DropRecord {
                    time: SimTime(50),
                    node: 1,
                    packet: 3,
                    class: TrafficClass::ClassII,
                    cause: DropCause::RetryLimit,
                },
                // a stale copy of a packet that still arrived
                DropRecord {
                    time: SimTime(50),
                    node: 2,
                    packet: 0,
                    class: TrafficClass::ClassI,
                    cause: DropCause::RetryLimit,
                },
            ],
            generated: g,
            ..RunLog::default()
        };
        let s = finalize(&log, &[4]);
        let c1 = s.class(TrafficClass::ClassI);
        assert_eq!((c1.generated, c1.delivered, c1.dropped, c1.in_flight), (3, 2, 0, 1));
        assert_eq!(c1.cumulative_us, vec![100, 400]);
        assert_eq!(c1.avg_delay_us, Some(200.0));
        let c2 = s.class(TrafficClass::ClassII);
        assert_eq!((c2.delivered, c2.dropped), (1, 1));
        assert_eq!(s.drops_by_cause["retry_limit"], 1);
        assert!(s.conserved());
    }

    #[test]
    fn vanished_packet_breaks_conservation() {
        let log = RunLog {
            generated: vec![spec(0, TrafficClass::ClassI, 0)],
            ..RunLog::default()
        };
        let s = finalize(&log, &[]);
        assert_eq!(s.lost, 1);
        assert!(!s.conserved());
    }
}

//! Unit-disk radio channel.

use crate::kernel::NodeId;

#[derive(Clone, Debug, PartialEq)]
pub struct ChannelModel {
    pub positions: Vec<(f64, f64)>,
    pub comm_range: f64,
    /// Distance within which a transmission keeps the medium busy. Never
    /// below `comm_range`.
    pub cs_range: f64,
    pub bitrate_bps: u64,
    pub slot_us: u64,
    neighbors: Vec<Vec<NodeId>>,
    sensed: Vec<Vec<NodeId>>,
}

impl ChannelModel {
    pub fn new(positions: Vec<(f64, f64)>, comm_range: f64, bitrate_bps: u64, slot_us: u64) -> Self {
        let n = positions.len();
        let mut neighbors = vec![Vec::new(); n];
        for u in 0..n {
            for v in 0..n {
                if u != v && distance(positions[u], positions[v]) <= comm_range {
                    neighbors[u].push(v);
                }
            }
        }
        ChannelModel {
            sensed: neighbors.clone(),
            positions,
            comm_range,
            cs_range: comm_range,
            bitrate_bps,
            slot_us,
            neighbors,
        }
    }

    /// Widens carrier sensing to `factor` times the communication range.
    pub fn with_carrier_sense(mut self, factor: f64) -> Self {
        assert!(factor >= 1.0, "carrier sense range below communication range");
        self.cs_range = self.comm_range * factor;
        let n = self.positions.len();
        self.sensed = (0..n)
            .map(|u| {
                (0..n)
                    .filter(|&v| v != u && distance(self.positions[u], self.positions[v]) <= self.cs_range)
                    .collect()
            })
            .collect();
        self
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn in_range(&self, u: NodeId, v: NodeId) -> bool {
        self.neighbors[u].binary_search(&v).is_ok()
    }

    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.neighbors[u]
    }

    /// Nodes whose carrier sense picks up `u`; a superset of `neighbors`.
    pub fn sensed_by(&self, u: NodeId) -> &[NodeId] {
        &self.sensed[u]
    }

    pub fn adjacency(&self) -> &[Vec<NodeId>] {
        &self.neighbors
    }

    pub fn distance(&self, u: NodeId, v: NodeId) -> f64 {
        distance(self.positions[u], self.positions[v])
    }

    /// Time on air for `bits`, rounded up to whole microseconds.
    pub fn airtime_us(&self, bits: u64) -> u64 {
        (bits * 1_000_000).div_ceil(self.bitrate_bps)
    }
}

fn distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn range_boundary() {
        let ch = ChannelModel::new(vec![(0.0, 0.0), (200.0, 0.0), (200.1, 0.0)], 200.0, 20_000, 20);
        assert!(ch.in_range(0, 1));
        assert!(!ch.in_range(0, 2));
    }

    #[test]
    fn airtime() {
        let ch = ChannelModel::new(vec![(0.0, 0.0)], 1.0, 20_000, 20);
        assert_eq!(ch.airtime_us(800), 40_000);
        assert_eq!(ch.airtime_us(1), 50);
    }

    #[test]
    fn carrier_sense_reaches_further() {
        let pts = vec![(0.0, 0.0), (150.0, 0.0), (300.0, 0.0), (500.0, 0.0)];
        let ch = ChannelModel::new(pts, 200.0, 20_000, 20).with_carrier_sense(2.2);
        assert_eq!(ch.neighbors(0), &[1]);
        assert_eq!(ch.sensed_by(0), &[1, 2]);
        assert_eq!(ch.sensed_by(2), &[0, 1, 3]);
    }

    proptest! {
        #[test]
        fn links_are_symmetric(pts in prop::collection::vec((0.0f64..500.0, 0.0f64..500.0), 2..12), range in 50.0f64..300.0, f in 1.0f64..3.0) {
            let ch = ChannelModel::new(pts.clone(), range, 20_000, 20).with_carrier_sense(f);
            for u in 0..pts.len() {
                for v in 0..pts.len() {
                    prop_assert_eq!(ch.in_range(u, v), ch.in_range(v, u));
                    let s = ch.sensed_by(u).contains(&v);
                    prop_assert_eq!(s, ch.sensed_by(v).contains(&u));
                    prop_assert!(s || !ch.in_range(u, v));
                }
            }
        }
    }
}

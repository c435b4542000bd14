use std::collections::BTreeSet;

use crate::kernel::NodeId;

/// Distinct neighbours that declared this node as their next hop during the
/// current SYNC period.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NextHopStats {
    declarers: BTreeSet<NodeId>,
}

impl NextHopStats {
    /// Accounts a SYNC heard from `src` carrying `next_hop_field`.
    pub fn observe(&mut self, me: NodeId, src: NodeId, next_hop_field: Option<NodeId>) {
        if next_hop_field == Some(me) {
            self.declarers.insert(src);
        }
    }

    pub fn count(&self) -> usize {
        self.declarers.len()
    }

    pub fn reset(&mut self) {
        self.declarers.clear();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_counts_each_declarer() {
        let mut s = NextHopStats::default();
        for src in [1, 3, 4] {
            s.observe(2, src, Some(2));
        }
        assert_eq!(s.count(), 3);
    }

    #[test]
    fn null_route_and_other_targets_ignored() {
        let mut s = NextHopStats::default();
        s.observe(2, 1, None);
        s.observe(2, 3, Some(0));
        assert_eq!(s.count(), 0);
    }

    #[test]
    fn repeated_declarer_counted_once() {
        let mut s = NextHopStats::default();
        s.observe(2, 1, Some(2));
        s.observe(2, 1, Some(2));
        assert_eq!(s.count(), 1);
        s.reset();
        assert_eq!(s.count(), 0);
    }
}

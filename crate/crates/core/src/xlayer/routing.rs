//! Next-hop tables toward the sink.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::kernel::NodeId;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RoutingMode {
    Static,
    DssAware,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoutingTable {
    pub mode: RoutingMode,
    pub sink: NodeId,
    next_hop: Vec<Option<NodeId>>,
}

const TIE_EPS: f64 = 1e-9;

impl RoutingTable {
    pub fn from_next_hops(mode: RoutingMode, sink: NodeId, next_hop: Vec<Option<NodeId>>) -> Self {
        RoutingTable { mode, sink, next_hop }
    }

    pub fn next_hop(&self, node: NodeId) -> Option<NodeId> {
        self.next_hop.get(node).copied().flatten()
    }

    pub fn len(&self) -> usize {
        self.next_hop.len()
    }

    pub fn is_empty(&self) -> bool {
        self.next_hop.is_empty()
    }

    /// Hops from `node` to the sink, or `None` if the chain breaks or loops.
    pub fn hops_to_sink(&self, node: NodeId) -> Option<usize> {
        let mut cur = node;
        for hops in 0..=self.next_hop.len() {
            if cur == self.sink {
                return Some(hops);
            }
            cur = self.next_hop(cur)?;
        }
        None
    }

    /// Nodes (other than the sink) with no loop-free path to the sink.
    pub fn disconnected(&self) -> Vec<NodeId> {
        (0..self.next_hop.len())
            .filter(|&n| n != self.sink && self.hops_to_sink(n).is_none())
            .collect()
    }

    /// Sum of link costs along the selected path.
    pub fn path_cost(&self, node: NodeId, cost: impl Fn(NodeId, NodeId) -> f64) -> Option<f64> {
        let mut cur = node;
        let mut total = 0.0;
        for _ in 0..=self.next_hop.len() {
            if cur == self.sink {
                return Some(total);
            }
            let nh = self.next_hop(cur)?;
            total += cost(cur, nh);
            cur = nh;
        }
        None
    }
}

#[derive(PartialEq)]
struct HeapItem(f64, NodeId);

impl Eq for HeapItem {}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

/// Least-cost distances to `sink` over directed links `u -> v` with
/// `cost(u, v) > 0`. Unreachable nodes get infinity.
pub fn distances_to_sink(
    adjacency: &[Vec<NodeId>],
    sink: NodeId,
    cost: &impl Fn(NodeId, NodeId) -> f64,
) -> Vec<f64> {
    let n = adjacency.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    dist[sink] = 0.0;
    heap.push(HeapItem(0.0, sink));
    while let Some(HeapItem(d, v)) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        // Relax reversed edges u -> v.
        for &u in &adjacency[v] {
            let c = cost(u, v);
            assert!(c > 0.0, "link cost must be positive, got {c} on {u}->{v}");
            let nd = d + c;
            if nd < dist[u] {
                dist[u] = nd;
                heap.push(HeapItem(nd, u));
            }
        }
    }
    dist
}

/// Shortest-path next hops toward `sink`; ties go to the lower node id.
pub fn shortest_path_table(
    adjacency: &[Vec<NodeId>],
    sink: NodeId,
    mode: RoutingMode,
    cost: impl Fn(NodeId, NodeId) -> f64,
) -> RoutingTable {
    let dist = distances_to_sink(adjacency, sink, &cost);
    let next_hop = (0..adjacency.len())
        .map(|v| {
            if v == sink || !dist[v].is_finite() {
                return None;
            }
            let mut best: Option<(f64, NodeId)> = None;
            let mut nbrs = adjacency[v].clone();
            nbrs.sort_unstable();
            for nb in nbrs {
                if !dist[nb].is_finite() {
                    continue;
                }
                let via = cost(v, nb) + dist[nb];
                match best {
                    Some((b, _)) if via >= b - TIE_EPS * b.max(1.0) => {}
                    _ => best = Some((via, nb)),
                }
            }
            best.map(|(_, nb)| nb)
        })
        .collect();
    RoutingTable::from_next_hops(mode, sink, next_hop)
}

/// Hop-count routes, the shape used for the static tables of the grid scenarios.
pub fn hop_count_table(adjacency: &[Vec<NodeId>], sink: NodeId) -> RoutingTable {
    shortest_path_table(adjacency, sink, RoutingMode::Static, |_, _| 1.0)
}

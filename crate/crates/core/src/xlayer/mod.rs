//! Cross-layer mechanisms: next-hop declarations carried in SYNC frames and
//! DSS-delay-aware link costs for route selection.

mod linkcost;
mod nexthop;
mod routing;

pub use linkcost::{overall_link_cost, LinkCostState};
pub use nexthop::NextHopStats;
pub use routing::{distances_to_sink, hop_count_table, shortest_path_table, RoutingMode, RoutingTable};

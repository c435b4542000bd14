//! Topologies: the two grids, a few micro-topologies used by the checks, and
//! the plain-text topology file.

use std::fmt::Write as _;

use crate::kernel::NodeId;
use crate::mac::ChannelModel;
use crate::xlayer::{hop_count_table, RoutingTable};

use super::ConfigError;

#[derive(Clone, Debug, PartialEq)]
pub struct TopologySpec {
    pub positions: Vec<(f64, f64)>,
    pub comm_range: f64,
    pub sink: NodeId,
    /// Static next hop per node; `None` for the sink and disconnected nodes.
    pub routes: Vec<Option<NodeId>>,
    /// Initial schedule phase (µs) per node. `None` lets the node pick one
    /// after listening for a cycle.
    pub phases: Vec<Option<u64>>,
}

/// How schedule phases are laid out over a grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClusterLayout {
    /// Everybody shares one schedule.
    Single,
    /// Left and right halves follow schedules half a period apart.
    Halves,
    /// One schedule per column.
    Columns,
}

impl std::str::FromStr for ClusterLayout {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "single" => Ok(ClusterLayout::Single),
            "halves" => Ok(ClusterLayout::Halves),
            "columns" => Ok(ClusterLayout::Columns),
            _ => Err(format!("unknown cluster layout `{s}`")),
        }
    }
}

impl ClusterLayout {
    pub fn name(self) -> &'static str {
        match self {
            ClusterLayout::Single => "single",
            ClusterLayout::Halves => "halves",
            ClusterLayout::Columns => "columns",
        }
    }
}

impl TopologySpec {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn adjacency(&self) -> Vec<Vec<NodeId>> {
        ChannelModel::new(self.positions.clone(), self.comm_range, 1, 1)
            .adjacency()
            .to_vec()
    }

    pub fn static_table(&self) -> RoutingTable {
        RoutingTable::from_next_hops(crate::xlayer::RoutingMode::Static, self.sink, self.routes.clone())
    }

    /// Nodes with no loop-free route to the sink.
    pub fn disconnected(&self) -> Vec<NodeId> {
        self.static_table().disconnected()
    }

    /// Checks that route entries name in-range neighbours and form no loops.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let n = self.len();
        if n == 0 {
            return Err(ConfigError::Topology("no nodes".into()));
        }
        if self.sink >= n {
            return Err(ConfigError::Topology(format!("sink {} out of range", self.sink)));
        }
        if self.routes.len() != n || self.phases.len() != n {
            return Err(ConfigError::Topology("per-node tables have the wrong length".into()));
        }
        if self.comm_range <= 0.0 {
            return Err(ConfigError::Topology("range must be positive".into()));
        }
        let adj = self.adjacency();
        for (v, nh) in self.routes.iter().enumerate() {
            if let Some(nh) = *nh {
                if v == self.sink {
                    return Err(ConfigError::Topology("the sink cannot have a next hop".into()));
                }
                if nh >= n || !adj[v].contains(&nh) {
                    return Err(ConfigError::Topology(format!("route {v} -> {nh} is not a link")));
                }
            }
        }
        let table = self.static_table();
        for v in 0..n {
            if self.routes[v].is_some() && table.hops_to_sink(v).is_none() {
                return Err(ConfigError::Topology(format!("route from {v} never reaches the sink")));
            }
        }
        Ok(())
    }
}

/// `cols x rows` grid with node id `y * cols + x` and the sink at the origin
/// corner. Static routes are hop-count shortest paths.
pub fn grid(cols: usize, rows: usize, spacing: f64, range: f64, layout: ClusterLayout, period_us: u64) -> TopologySpec {
    assert!(cols > 0 && rows > 0);
    let mut positions = Vec::with_capacity(cols * rows);
    let mut phases = Vec::with_capacity(cols * rows);
    for y in 0..rows {
        for x in 0..cols {
            positions.push((x as f64 * spacing, y as f64 * spacing));
            let phase = match layout {
                ClusterLayout::Single => 0,
                ClusterLayout::Halves => {
                    if 2 * x < cols {
                        0
                    } else {
                        period_us / 2
                    }
                }
                ClusterLayout::Columns => (x as u64 * period_us / cols as u64) % period_us,
            };
            phases.push(Some(phase));
        }
    }
    with_hop_count_routes(positions, range, 0, phases)
}

pub fn build_scenario_1(layout: ClusterLayout, period_us: u64) -> TopologySpec {
    grid(3, 3, 140.0, 200.0, layout, period_us)
}

pub fn build_scenario_2(layout: ClusterLayout, period_us: u64) -> TopologySpec {
    grid(5, 5, 250.0, 300.0, layout, period_us)
}

fn with_hop_count_routes(positions: Vec<(f64, f64)>, range: f64, sink: NodeId, phases: Vec<Option<u64>>) -> TopologySpec {
    let mut spec = TopologySpec {
        routes: vec![None; positions.len()],
        positions,
        comm_range: range,
        sink,
        phases,
    };
    let table = hop_count_table(&spec.adjacency(), sink);
    spec.routes = (0..spec.len()).map(|v| table.next_hop(v)).collect();
    spec
}

/// Two disjoint three-hop routes from node 1 to the sink 0: `1-2-3-0`, which
/// static routing prefers, and `1-4-5-0`. Nodes 0-3 share one schedule and
/// 4-5 follow another half a period later, so the upper route's first link
/// waits longest for its receiver.
pub fn two_path(period_us: u64) -> TopologySpec {
    let positions = vec![
        (300.0, 0.0),
        (0.0, 0.0),
        (100.0, 100.0),
        (200.0, 100.0),
        (100.0, -100.0),
        (200.0, -100.0),
    ];
    let b = period_us / 2;
    let phases = vec![Some(0), Some(0), Some(0), Some(0), Some(b), Some(b)];
    with_hop_count_routes(positions, 150.0, 0, phases)
}

/// `a - b - c` chain where `a` and `c` follow schedules half a period apart
/// and `b` bridges them. Node ids: a = 0 (sink), b = 1, c = 2.
pub fn chain3(period_us: u64) -> TopologySpec {
    let positions = vec![(0.0, 0.0), (100.0, 0.0), (200.0, 0.0)];
    let phases = vec![Some(0), Some(0), Some(period_us / 2)];
    with_hop_count_routes(positions, 150.0, 0, phases)
}

/// Hub 1 next to the sink 0; leaf 2 can only reach the sink through the hub,
/// leaves 3 and 4 reach the sink directly.
pub fn star(_period_us: u64) -> TopologySpec {
    let positions = vec![(100.0, 0.0), (0.0, 0.0), (-100.0, 0.0), (0.0, 100.0), (0.0, -100.0)];
    let phases = vec![Some(0); 5];
    with_hop_count_routes(positions, 150.0, 0, phases)
}

/// Parses the topology file format:
///
/// ```text
/// # comment
/// 0 0 0
/// 1 140 0
/// range 200
/// sink 0
/// route 1 0
/// schedule 1 500000
/// ```
///
/// Nodes without a `route` line get hop-count routes; nodes without a
/// `schedule` line start on phase 0.
pub fn parse_topology(text: &str) -> Result<TopologySpec, ConfigError> {
    let mut nodes: Vec<(usize, f64, f64)> = Vec::new();
    let mut range = None;
    let mut sink = None;
    let mut routes: Vec<(usize, usize)> = Vec::new();
    let mut sched: Vec<(usize, u64)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = || ConfigError::Topology(format!("line {}: cannot parse `{}`", lineno + 1, raw.trim()));
        let f: Vec<&str> = line.split_whitespace().collect();
        match f[0] {
            "range" if f.len() == 2 => range = Some(f[1].parse::<f64>().map_err(|_| bad())?),
            "sink" if f.len() == 2 => sink = Some(f[1].parse::<usize>().map_err(|_| bad())?),
            "route" if f.len() == 3 => routes.push((
                f[1].parse().map_err(|_| bad())?,
                f[2].parse().map_err(|_| bad())?,
            )),
            "schedule" if f.len() == 3 => sched.push((
                f[1].parse().map_err(|_| bad())?,
                f[2].parse().map_err(|_| bad())?,
            )),
            _ if f.len() == 3 => nodes.push((
                f[0].parse().map_err(|_| bad())?,
                f[1].parse().map_err(|_| bad())?,
                f[2].parse().map_err(|_| bad())?,
            )),
            _ => return Err(bad()),
        }
    }
    nodes.sort_by_key(|n| n.0);
    for (i, n) in nodes.iter().enumerate() {
        if n.0 != i {
            return Err(ConfigError::Topology(format!("node ids must be 0..{} without gaps", nodes.len())));
        }
    }
    let range = range.ok_or_else(|| ConfigError::Topology("missing `range`".into()))?;
    let sink = sink.ok_or_else(|| ConfigError::Topology("missing `sink`".into()))?;
    let positions: Vec<(f64, f64)> = nodes.iter().map(|n| (n.1, n.2)).collect();
    let n = positions.len();
    let mut phases = vec![Some(0); n];
    for (id, ph) in sched {
        if id >= n {
            return Err(ConfigError::Topology(format!("schedule for unknown node {id}")));
        }
        phases[id] = Some(ph);
    }
    if sink >= n {
        return Err(ConfigError::Topology(format!("sink {sink} out of range")));
    }
    // explicit routes override the hop-count ones node by node
    let mut spec = with_hop_count_routes(positions, range, sink, phases);
    for (src, nh) in routes {
        if src >= n {
            return Err(ConfigError::Topology(format!("route for unknown node {src}")));
        }
        spec.routes[src] = Some(nh);
    }
    spec.validate()?;
    Ok(spec)
}

pub fn write_topology(spec: &TopologySpec) -> String {
    let mut out = String::new();
    for (i, (x, y)) in spec.positions.iter().enumerate() {
        let _ = writeln!(out, "{i} {x} {y}");
    }
    let _ = writeln!(out, "range {}", spec.comm_range);
    let _ = writeln!(out, "sink {}", spec.sink);
    for (i, r) in spec.routes.iter().enumerate() {
        if let Some(nh) = r {
            let _ = writeln!(out, "route {i} {nh}");
        }
    }
    for (i, p) in spec.phases.iter().enumerate() {
        if let Some(p) = p {
            let _ = writeln!(out, "schedule {i} {p}");
        }
    }
    out
}

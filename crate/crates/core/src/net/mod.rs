//! The simulated network: every node's MAC state machine on one shared
//! channel, driven by the event kernel, with the per-scheme adaptation hooks.

mod node;

use std::collections::hash_map::DefaultHasher;
use std::collections::HashSet;
use std::hash::{Hash, Hasher};

use crate::adapt::{compute_utilization, CwPolicy, CwRange, DcInputs, DifsProfile, DutyCyclePolicy, Scheme};
use crate::harness::scenario::TopologySpec;
use crate::kernel::{Event, Kernel, NodeId, RngStream, SimTime};
use crate::mac::{cycle_start, ActivePlan, ChannelModel, Contender, Frame, FrameKind, Schedule, SyncInfo, TrafficClass, WakeView};
use crate::xlayer::{shortest_path_table, LinkCostState, RoutingMode, RoutingTable};

use node::{Activation, Node, OnAir, RxLock, WaitAck, N_ENTITIES, SYNC};

/// Every tunable of the MAC and the adaptations.
#[derive(Clone, Debug, PartialEq)]
pub struct NetParams {
    pub scheme: Scheme,
    pub period_us: u64,
    pub dc_default_pct: f64,
    pub dc_min_pct: f64,
    pub dc_max_pct: f64,
    pub dc_thresh: f64,
    pub u_min: f64,
    pub rho_min: f64,
    pub slot_us: u64,
    pub sifs_us: u64,
    pub bitrate_bps: u64,
    pub payload_bytes: u64,
    pub header_bytes: u64,
    pub ack_bytes: u64,
    pub sync_bytes: u64,
    pub sync_period: u32,
    pub retry_limit: u32,
    pub queue_capacity: usize,
    pub difs_slots: u32,
    pub difs_class1_slots: u32,
    pub difs_class2_slots: u32,
    pub cw_min: u32,
    pub cw_max: u32,
    pub sync_cw: u32,
    pub cw1_min: u32,
    pub cw1_max: u32,
    pub cw1_max_max: u32,
    pub cw2_min: u32,
    pub cw2_max: u32,
    pub eta: f64,
    pub zeta: f64,
    pub beta: f64,
    pub alpha_i: f64,
    pub cw_thresh: u32,
    pub d_i_us: f64,
    pub s_i_us: f64,
    pub n_min_next_hop: usize,
    pub lc_ori: f64,
    pub discovery_cycles: u64,
    /// Carrier-sense range as a multiple of the communication range.
    pub cs_range_factor: f64,
    /// Cycles between a duty-cycle decision and the cycle it applies to;
    /// the change is re-announced in each of them.
    pub dc_lead_cycles: u32,
}

impl Default for NetParams {
    fn default() -> Self {
        NetParams {
            scheme: Scheme::Baseline,
            period_us: 1_000_000,
            dc_default_pct: 30.0,
            dc_min_pct: 30.0,
            dc_max_pct: 60.0,
            dc_thresh: 0.05,
            u_min: 0.10,
            rho_min: 0.30,
            slot_us: 20,
            sifs_us: 10,
            bitrate_bps: 20_000,
            payload_bytes: 100,
            header_bytes: 10,
            ack_bytes: 10,
            sync_bytes: 16,
            sync_period: 10,
            retry_limit: 5,
            queue_capacity: 50,
            difs_slots: 10,
            difs_class1_slots: 8,
            difs_class2_slots: 15,
            cw_min: 31,
            cw_max: 63,
            sync_cw: 15,
            cw1_min: 7,
            cw1_max: 15,
            cw1_max_max: 31,
            cw2_min: 32,
            cw2_max: 63,
            eta: 0.5,
            zeta: 0.5,
            beta: 0.5,
            alpha_i: 0.1,
            cw_thresh: 1,
            d_i_us: 50_000.0,
            s_i_us: 150_000.0,
            n_min_next_hop: 2,
            lc_ori: 1.0,
            discovery_cycles: 10,
            cs_range_factor: 2.2,
            dc_lead_cycles: 2,
        }
    }
}

impl NetParams {
    pub fn active_us(&self, pct: f64) -> u64 {
        ((self.period_us as f64 * pct / 100.0).round() as u64).clamp(1, self.period_us)
    }

    fn difs(&self) -> DifsProfile {
        if self.scheme.per_class_difs() {
            DifsProfile {
                class1_slots: self.difs_class1_slots,
                class2_slots: self.difs_class2_slots,
            }
        } else {
            DifsProfile::uniform(self.difs_slots)
        }
    }

    fn cw_policy(&self) -> CwPolicy {
        let mut p = CwPolicy::with_defaults(self.alpha_i, self.cw_thresh, self.d_i_us);
        p.class1 = CwRange::new(self.cw1_min, self.cw1_max, self.cw1_max_max);
        p.class2 = CwRange::new(self.cw2_min, self.cw2_max, self.cw2_max);
        p
    }

    fn dc_policy(&self) -> DutyCyclePolicy {
        let mut p = DutyCyclePolicy::new(self.s_i_us);
        p.dc_current = self.dc_default_pct;
        p.dc_default = self.dc_default_pct;
        p.dc_min = self.dc_min_pct;
        p.dc_max = self.dc_max_pct;
        p.dc_thresh = self.dc_thresh;
        p.u_min = self.u_min;
        p.rho_min = self.rho_min;
        p
    }
}

#[derive(Clone, Debug)]
pub enum Ev {
    App { class: TrafficClass, packet: u64 },
    CycleStart { sched: usize },
    WindowEnd,
    Expire { entity: usize, gen: u64 },
    TxEnd,
    SendAck,
    AckTimeout,
    Recheck,
    DiscoveryEnd,
    BootListenEnd,
    RouteRecompute,
    ForceDutyCycle { pct: f64 },
}

impl Ev {
    fn tag(&self) -> u8 {
        match self {
            Ev::App { .. } => 0,
            Ev::CycleStart { .. } => 1,
            Ev::WindowEnd => 2,
            Ev::Expire { .. } => 3,
            Ev::TxEnd => 4,
            Ev::SendAck => 5,
            Ev::AckTimeout => 6,
            Ev::Recheck => 7,
            Ev::DiscoveryEnd => 8,
            Ev::BootListenEnd => 9,
            Ev::RouteRecompute => 10,
            Ev::ForceDutyCycle { .. } => 11,
        }
    }
}

/// One application packet handed to the network.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PacketSpec {
    pub id: u64,
    pub origin: NodeId,
    pub class: TrafficClass,
    pub time: SimTime,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Delivery {
    pub packet: u64,
    pub class: TrafficClass,
    pub origin_node: NodeId,
    pub origin_time: SimTime,
    pub sink_time: SimTime,
}

impl Delivery {
    pub fn delay_us(&self) -> u64 {
        self.sink_time.since(self.origin_time)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DropCause {
    QueueOverflow,
    RetryLimit,
    NoRoute,
}

impl DropCause {
    pub fn name(self) -> &'static str {
        match self {
            DropCause::QueueOverflow => "queue_overflow",
            DropCause::RetryLimit => "retry_limit",
            DropCause::NoRoute => "no_route",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DropRecord {
    pub time: SimTime,
    pub node: NodeId,
    pub packet: u64,
    pub class: TrafficClass,
    pub cause: DropCause,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdaptationRecord {
    pub time: SimTime,
    pub node: NodeId,
    pub scheme: Scheme,
    pub parameter: &'static str,
    pub old_value: f64,
    pub new_value: f64,
    pub trigger_d_us: Option<f64>,
    pub trigger_s_us: Option<f64>,
    pub utilization: Option<f64>,
    pub rho: Option<f64>,
    pub n_next_hop: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinkRecord {
    pub time: SimTime,
    pub src: NodeId,
    pub dst: NodeId,
    pub s_link_avg_us: Option<f64>,
    pub lc_overall: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RouteRecord {
    pub time: SimTime,
    pub node: NodeId,
    pub next_hop: Option<NodeId>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LedgerRecord {
    pub time: SimTime,
    pub node: NodeId,
    pub trx: u64,
    pub ttx: u64,
    pub tidle: u64,
    pub awake: u64,
    pub utilization: f64,
    pub duty_cycle_pct: f64,
}

/// One DATA transmission attempt.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TxRecord {
    pub time: SimTime,
    pub node: NodeId,
    pub dst: NodeId,
    pub class: TrafficClass,
    pub packet: u64,
    pub enqueue_time: SimTime,
    pub carrier_sense_start: SimTime,
    /// Failed attempts before this one.
    pub attempt: u32,
}

impl TxRecord {
    pub fn dss_us(&self) -> u64 {
        self.carrier_sense_start.since(self.enqueue_time)
    }
}

/// A backoff drawn uniformly from `[0, cw]`; `class` is `None` for SYNC.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BackoffRecord {
    pub time: SimTime,
    pub node: NodeId,
    pub class: Option<TrafficClass>,
    pub cw: u32,
    pub value: u32,
}

/// Everything a run records.
#[derive(Clone, Debug, Default)]
pub struct RunLog {
    pub generated: Vec<PacketSpec>,
    pub deliveries: Vec<Delivery>,
    pub drops: Vec<DropRecord>,
    pub adaptations: Vec<AdaptationRecord>,
    pub links: Vec<LinkRecord>,
    pub routes: Vec<RouteRecord>,
    pub ledgers: Vec<LedgerRecord>,
    /// Broken invariants, one line each. Empty on a healthy run.
    pub violations: Vec<String>,
    /// Neighbour copies of a schedule that disagreed with the owner's actual
    /// window end.
    pub sync_mismatches: Vec<String>,
    pub transmissions: Vec<TxRecord>,
    pub backoffs: Vec<BackoffRecord>,
    pub collisions: u64,
}

fn at(t: i64) -> SimTime {
    assert!(t >= 0, "negative instant {t}");
    SimTime(t as u64)
}

fn class_of(entity: usize) -> TrafficClass {
    match entity {
        1 => TrafficClass::ClassI,
        2 => TrafficClass::ClassII,
        _ => panic!("entity {entity} carries no data class"),
    }
}

fn entity_of(class: TrafficClass) -> usize {
    1 + class.index()
}

pub struct Network {
    params: NetParams,
    channel: ChannelModel,
    sink: NodeId,
    routes: RoutingTable,
    nodes: Vec<Node>,
    kernel: Kernel<Ev>,
    discovery: bool,
    traffic_start: SimTime,
    next_tx_id: u64,
    difs: DifsProfile,
    uniform_cw: CwRange,
    delivered: HashSet<u64>,
    trace: DefaultHasher,
    data_air: u64,
    ack_air: u64,
    sync_air: u64,
    pub log: RunLog,
}

impl Network {
    pub fn new(params: NetParams, topo: &TopologySpec, seed: u64) -> Self {
        assert!(params.period_us > 0);
        let n = topo.len();
        let channel = ChannelModel::new(topo.positions.clone(), topo.comm_range, params.bitrate_bps, params.slot_us)
            .with_carrier_sense(params.cs_range_factor);
        let mode = if params.scheme.dss_routing() {
            RoutingMode::DssAware
        } else {
            RoutingMode::Static
        };
        let routes = RoutingTable::from_next_hops(mode, topo.sink, topo.routes.clone());
        let active = params.active_us(params.dc_default_pct);
        let difs = params.difs();
        let uniform_cw = CwRange::new(params.cw_min, params.cw_max, params.cw_max);
        let mut nodes = Vec::with_capacity(n);
        for id in 0..n {
            let plan = ActivePlan::new(params.period_us, active);
            let node = Node::new(
                plan,
                params.cw_policy(),
                params.dc_policy(),
                params.eta,
                params.zeta,
                RngStream::new(seed, id as u64),
            );
            nodes.push(node);
        }
        let bits = |bytes: u64| bytes * 8;
        let data_air = channel.airtime_us(bits(params.payload_bytes + params.header_bytes));
        let ack_air = channel.airtime_us(bits(params.ack_bytes));
        let sync_air = channel.airtime_us(bits(params.sync_bytes));
        let traffic_start = SimTime(params.discovery_cycles * params.period_us);
        let mut net = Network {
            params,
            channel,
            sink: topo.sink,
            routes,
            nodes,
            kernel: Kernel::new(),
            discovery: traffic_start > SimTime::ZERO,
            traffic_start,
            next_tx_id: 0,
            difs,
            uniform_cw,
            delivered: HashSet::new(),
            trace: DefaultHasher::new(),
            data_air,
            ack_air,
            sync_air,
            log: RunLog::default(),
        };
        for id in 0..n {
            for e in 0..N_ENTITIES {
                let cw = net.cw_range(id, e).map(|r| r.cw_min).unwrap_or(net.params.sync_cw);
                net.nodes[id].ent[e] = Contender::new(cw);
            }
            match topo.phases[id] {
                Some(phase) => net.adopt(id, phase % net.params.period_us, true),
                None => {
                    let p = net.params.period_us as i64;
                    let wait = net.nodes[id].rng.uniform_int(p, 2 * p - 1);
                    net.kernel.schedule_at(at(wait), id, Ev::BootListenEnd);
                }
            }
        }
        if net.params.scheme.per_class_difs() {
            let uniform = net.params.difs_slots as f64;
            for id in 0..n {
                for (parameter, v) in [("difs_I", net.difs.class1_slots), ("difs_II", net.difs.class2_slots)] {
                    net.log.adaptations.push(AdaptationRecord {
                        time: SimTime::ZERO,
                        node: id,
                        scheme: net.params.scheme,
                        parameter,
                        old_value: uniform,
                        new_value: v as f64,
                        trigger_d_us: None,
                        trigger_s_us: None,
                        utilization: None,
                        rho: None,
                        n_next_hop: None,
                    });
                }
            }
        }
        net.kernel.schedule_at(traffic_start, topo.sink, Ev::DiscoveryEnd);
        if net.params.scheme.dss_routing() {
            let first = traffic_start + net.params.sync_period as u64 * net.params.period_us;
            net.kernel.schedule_at(first, topo.sink, Ev::RouteRecompute);
        }
        for id in 0..n {
            net.update_awake(id);
        }
        net
    }

    pub fn params(&self) -> &NetParams {
        &self.params
    }

    pub fn channel(&self) -> &ChannelModel {
        &self.channel
    }

    pub fn routes(&self) -> &RoutingTable {
        &self.routes
    }

    pub fn now(&self) -> SimTime {
        self.kernel.now()
    }

    pub fn traffic_start(&self) -> SimTime {
        self.traffic_start
    }

    pub fn dispatched(&self) -> u64 {
        self.kernel.dispatched()
    }

    /// Digest of the full dispatch trace so far.
    pub fn trace_digest(&self) -> u64 {
        self.trace.clone().finish()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn duty_cycle_pct(&self, node: NodeId) -> f64 {
        let plan = &self.nodes[node].own.plan;
        100.0 * plan.latest() as f64 / plan.period() as f64
    }

    pub fn schedule_phases(&self, node: NodeId) -> Vec<u64> {
        self.nodes[node].own.phases.clone()
    }

    /// `node`'s recorded copy of `of`'s schedules, if it has heard a SYNC.
    pub fn neighbor_view(&self, node: NodeId, of: NodeId) -> Option<&WakeView> {
        self.nodes[node].views.get(&of)
    }

    pub fn own_view(&self, node: NodeId) -> &WakeView {
        &self.nodes[node].own
    }

    pub fn class1_cw_max(&self, node: NodeId) -> u32 {
        self.nodes[node].cw.class1.cw_max
    }

    pub fn class2_cw_min(&self, node: NodeId) -> u32 {
        self.nodes[node].cw.class2.cw_min
    }

    /// Packet ids still queued anywhere in the network.
    pub fn queued_packets(&self) -> Vec<u64> {
        self.nodes
            .iter()
            .flat_map(|n| n.queues.iter().flatten())
            .filter_map(|f| f.packet)
            .collect()
    }

    pub fn add_traffic(&mut self, packets: &[PacketSpec]) {
        for p in packets {
            assert!(p.time >= self.traffic_start, "traffic must start after discovery");
            self.kernel.schedule_at(p.time, p.origin, Ev::App { class: p.class, packet: p.id });
        }
    }

    /// Test hook: makes `node` publish `pct` with its next primary SYNC, as
    /// if the adaptation had produced it.
    pub fn force_duty_cycle(&mut self, node: NodeId, at_time: SimTime, pct: f64) {
        self.kernel.schedule_at(at_time, node, Ev::ForceDutyCycle { pct });
    }

    pub fn run_until(&mut self, t_end: SimTime) {
        while let Some(ev) = self.kernel.pop_until(t_end) {
            self.dispatch(ev);
        }
        self.kernel.advance_to(t_end);
        for n in &mut self.nodes {
            n.accrue(t_end);
        }
    }

    fn dispatch(&mut self, ev: Event<Ev>) {
        (ev.fire_at.0, ev.seq, ev.target, ev.payload.tag()).hash(&mut self.trace);
        let now = self.kernel.now();
        for n in &mut self.nodes {
            n.accrue(now);
        }
        let v = ev.target;
        match ev.payload {
            Ev::App { class, packet } => self.on_app(v, class, packet),
            Ev::CycleStart { sched } => self.on_cycle_start(v, sched),
            Ev::WindowEnd => self.on_window_end(v),
            Ev::Expire { entity, gen } => self.on_expire(v, entity, gen),
            Ev::TxEnd => self.on_tx_end(v),
            Ev::SendAck => self.on_send_ack(v),
            Ev::AckTimeout => self.on_ack_timeout(v),
            Ev::Recheck => {
                self.nodes[v].recheck = None;
                self.kick(v);
            }
            Ev::DiscoveryEnd => self.on_discovery_end(),
            Ev::BootListenEnd => {
                if self.nodes[v].fresh {
                    let p = self.params.period_us as i64;
                    let phase = self.nodes[v].rng.uniform_int(0, p - 1) as u64;
                    self.adopt(v, phase, true);
                    self.kick(v);
                }
            }
            Ev::RouteRecompute => self.on_route_recompute(),
            Ev::ForceDutyCycle { pct } => {
                self.nodes[v].forced_dc = Some(pct);
                if let Some(p) = self.nodes[v].primary() {
                    self.force_sync(v, p);
                }
                self.kick(v);
            }
        }
    }

    // ---- schedules -------------------------------------------------------

    /// Joins the schedule with `phase`. The first schedule a node joins is
    /// its primary.
    fn adopt(&mut self, v: NodeId, phase: u64, primary: bool) {
        let now = self.kernel.now();
        let period = self.params.period_us;
        let node = &mut self.nodes[v];
        if !node.own.add_phase(phase) {
            return;
        }
        node.fresh = false;
        let mut s = Schedule::new(period, phase, primary && node.primary().is_none());
        s.sync_periods_left = 0;
        node.schedules.push(s);
        let idx = node.schedules.len() - 1;
        let c = cycle_start(period, phase, now.0 as i64);
        let next = if c == now.0 as i64 { c } else { c + period as i64 };
        if c < now.0 as i64 {
            let end = c + node.own.plan.active_for_cycle(c) as i64;
            if end > now.0 as i64 {
                self.kernel.schedule_at(at(end), v, Ev::WindowEnd);
            }
        }
        self.kernel.schedule_at(at(next), v, Ev::CycleStart { sched: idx });
        self.update_awake(v);
    }

    fn on_cycle_start(&mut self, v: NodeId, sched: usize) {
        let now = self.kernel.now();
        let discovery = self.discovery;
        let period = self.params.period_us;
        let node = &mut self.nodes[v];
        node.own.plan.prune(now);
        if node.announce_until.is_some_and(|t| now.0 as i64 >= t) {
            node.announce_until = None;
        }
        let announcing = node.announce_until.is_some();
        let s = &mut node.schedules[sched];
        if s.repeat {
            s.repeat = false;
            s.sync_due = false;
        }
        if discovery {
            s.sync_due = true;
        } else {
            if s.sync_periods_left > 0 {
                s.sync_periods_left -= 1;
            }
            if s.sync_periods_left == 0 {
                s.sync_due = true;
            } else if announcing && !s.sync_due {
                s.sync_due = true;
                s.repeat = true;
            }
        }
        let active = node.own.plan.active_for_cycle(now.0 as i64);
        if active < period {
            self.kernel.schedule_at(now + active, v, Ev::WindowEnd);
        }
        self.kernel.schedule_at(now + period, v, Ev::CycleStart { sched });
        self.kick(v);
    }

    fn on_window_end(&mut self, v: NodeId) {
        self.check_neighbor_copies(v);
        self.kick(v);
    }

    /// At the end of one of `v`'s listen windows, compares every neighbour's
    /// recorded copy of that window with the real one.
    fn check_neighbor_copies(&mut self, v: NodeId) {
        let now = self.kernel.now().0 as i64;
        let period = self.params.period_us;
        let own = &self.nodes[v].own;
        for &phase in &own.phases {
            let c = cycle_start(period, phase, now - 1);
            let end = c + own.plan.active_for_cycle(c) as i64;
            if end != now {
                continue;
            }
            for w in self.channel.neighbors(v) {
                let Some(view) = self.nodes[*w].views.get(&v) else { continue };
                if !view.phases.contains(&phase) {
                    continue;
                }
                let seen = c + view.plan.active_for_cycle(c) as i64;
                if (seen - end).abs() > 1 {
                    self.log.sync_mismatches.push(format!(
                        "t={now} node {w} expects {v} (phase {phase}) to sleep at {seen}, actual {end}"
                    ));
                }
            }
        }
    }

    /// Zeroes a schedule's SYNC countdown; the SYNC goes out in the current
    /// window if there is one, otherwise at the next.
    fn force_sync(&mut self, v: NodeId, sched: usize) {
        let now = self.kernel.now();
        let node = &mut self.nodes[v];
        let phase = node.schedules[sched].phase;
        node.schedules[sched].sync_periods_left = 0;
        if node.own.window_end(phase, now).is_some() {
            node.schedules[sched].sync_due = true;
        }
    }

    fn on_discovery_end(&mut self) {
        let now = self.kernel.now();
        self.discovery = false;
        let sp = self.params.sync_period as i64;
        for v in 0..self.nodes.len() {
            let node = &mut self.nodes[v];
            for i in 0..node.schedules.len() {
                let left = node.rng.uniform_int(1, sp) as u32;
                node.schedules[i].sync_periods_left = left;
                node.schedules[i].sync_due = false;
                node.schedules[i].repeat = false;
            }
            let sync_on_air = node.tx.as_ref().is_some_and(|t| t.entity == Some(SYNC));
            if !sync_on_air && node.active[SYNC].is_some() {
                node.active[SYNC] = None;
                node.ent[SYNC].abandon();
            }
            node.take_window(now);
            node.rx_counts = [0; 2];
            node.next_hops.reset();
        }
        for v in 0..self.nodes.len() {
            self.kick(v);
        }
    }

    // ---- traffic and queues ----------------------------------------------

    fn on_app(&mut self, v: NodeId, class: TrafficClass, packet: u64) {
        let now = self.kernel.now();
        self.log.generated.push(PacketSpec {
            id: packet,
            origin: v,
            class,
            time: now,
        });
        let payload_bits = self.params.payload_bytes * 8;
        let dst = self.routes.next_hop(v).unwrap_or(self.sink);
        let frame = Frame::data(v, dst, class, packet, payload_bits, now);
        if v == self.sink {
            self.record_delivery(&frame);
            return;
        }
        self.enqueue(v, frame);
    }

    fn enqueue(&mut self, v: NodeId, frame: Frame) {
        let now = self.kernel.now();
        let class = frame.class.expect("data frame has a class");
        if self.nodes[v].queues[class.index()].len() >= self.params.queue_capacity {
            self.drop_packet(v, &frame, DropCause::QueueOverflow);
            return;
        }
        let mut frame = frame;
        frame.enqueue_time = now;
        frame.carrier_sense_start = None;
        frame.tx_start_time = None;
        frame.uid = 0;
        self.nodes[v].queues[class.index()].push_back(frame);
        self.kick(v);
    }

    fn drop_packet(&mut self, v: NodeId, frame: &Frame, cause: DropCause) {
        self.log.drops.push(DropRecord {
            time: self.kernel.now(),
            node: v,
            packet: frame.packet.expect("data frame carries a packet"),
            class: frame.class.expect("data frame has a class"),
            cause,
        });
    }

    fn record_delivery(&mut self, frame: &Frame) {
        let packet = frame.packet.expect("data frame carries a packet");
        if !self.delivered.insert(packet) {
            return;
        }
        self.log.deliveries.push(Delivery {
            packet,
            class: frame.class.expect("data frame has a class"),
            origin_node: frame.origin_node,
            origin_time: frame.origin_time,
            sink_time: self.kernel.now(),
        });
    }

    // ---- contention ------------------------------------------------------

    fn cw_range(&self, v: NodeId, entity: usize) -> Option<CwRange> {
        if entity == SYNC {
            return None;
        }
        Some(if self.params.scheme.adapts_cw() {
            *self.nodes[v].cw.range(class_of(entity))
        } else {
            self.uniform_cw
        })
    }

    fn difs_us(&self, entity: usize) -> u64 {
        let class = (entity != SYNC).then(|| class_of(entity));
        self.difs.slots(class) as u64 * self.params.slot_us
    }

    fn data_need(&self, entity: usize) -> u64 {
        self.difs_us(entity) + self.data_air + self.params.sifs_us + self.ack_air
    }

    fn sync_need(&self) -> u64 {
        self.difs_us(SYNC) + self.params.sync_cw as u64 * self.params.slot_us + self.sync_air
    }

    fn update_awake(&mut self, v: NodeId) {
        let now = self.kernel.now();
        let node = &mut self.nodes[v];
        let want = self.discovery || node.fresh || node.own.awake_at(now) || node.has_activity();
        node.set_awake(want, now);
    }

    /// Re-evaluates what `v` may transmit now: activates entities whose
    /// receiver is listening, starts countdowns on an idle channel and books
    /// the next re-evaluation.
    fn kick(&mut self, v: NodeId) {
        let now = self.kernel.now();
        if self.nodes[v].busy_with_frame() || self.nodes[v].fresh {
            self.update_awake(v);
            return;
        }
        let mut wake_at: Option<SimTime> = None;
        let mut note = |t: SimTime| {
            wake_at = Some(wake_at.map_or(t, |w: SimTime| w.min(t)));
        };

        // SYNC on a due schedule whose window is open.
        if let Some(act) = self.nodes[v].active[SYNC] {
            let sched = act.sched.expect("sync activation names a schedule");
            if now > act.deadline || !self.nodes[v].schedules[sched].sync_due {
                self.nodes[v].active[SYNC] = None;
                self.nodes[v].ent[SYNC].abandon();
            } else {
                note(act.deadline + 1);
            }
        }
        if self.nodes[v].active[SYNC].is_none() {
            let need = self.sync_need();
            let node = &self.nodes[v];
            let mut order: Vec<usize> = (0..node.schedules.len()).collect();
            order.sort_by_key(|&i| !node.schedules[i].is_primary);
            for i in order {
                let s = &node.schedules[i];
                if !s.sync_due {
                    continue;
                }
                if let Some(end) = node.own.window_end(s.phase, now) {
                    if end - now.0 as i64 >= need as i64 {
                        let deadline = at(end - need as i64);
                        self.nodes[v].active[SYNC] = Some(Activation {
                            receiver: None,
                            sched: Some(i),
                            deadline,
                        });
                        note(deadline + 1);
                        break;
                    }
                }
            }
        }

        // Data, per class.
        let route = self.routes.next_hop(v);
        for class in TrafficClass::BOTH {
            let e = entity_of(class);
            let ci = class.index();
            if let Some(act) = self.nodes[v].active[e] {
                if now > act.deadline || act.receiver != route || self.nodes[v].queues[ci].is_empty() {
                    self.nodes[v].active[e] = None;
                    self.nodes[v].ent[e].abandon();
                } else {
                    note(act.deadline + 1);
                    continue;
                }
            }
            if self.nodes[v].queues[ci].is_empty() {
                continue;
            }
            let Some(nh) = route else {
                while let Some(f) = self.nodes[v].queues[ci].pop_front() {
                    self.drop_packet(v, &f, DropCause::NoRoute);
                }
                continue;
            };
            let need = self.data_need(e);
            let Some(view) = self.nodes[v].views.get(&nh) else { continue };
            match view.interval_at(now) {
                Some((_, end)) if end - now.0 as i64 >= need as i64 => {
                    let deadline = at(end - need as i64);
                    let node = &mut self.nodes[v];
                    node.active[e] = Some(Activation {
                        receiver: Some(nh),
                        sched: None,
                        deadline,
                    });
                    let head = node.queues[ci].front_mut().expect("non-empty");
                    if head.carrier_sense_start.is_none() {
                        head.carrier_sense_start = Some(now);
                    }
                    note(deadline + 1);
                }
                _ => {
                    if let Some(t) = view.next_fit(now, need) {
                        note(t.max(now + 1));
                    }
                }
            }
        }

        if self.nodes[v].busy == 0 {
            for e in 0..N_ENTITIES {
                if self.nodes[v].active[e].is_none() || self.nodes[v].ent[e].is_counting() {
                    continue;
                }
                if self.nodes[v].ent[e].backoff.is_none() {
                    self.draw_backoff(v, e);
                }
                let difs = self.difs_us(e);
                let slot = self.params.slot_us;
                let expiry = self.nodes[v].ent[e].start(now, difs, slot);
                let gen = self.nodes[v].ent[e].gen;
                self.kernel.schedule_at(expiry, v, Ev::Expire { entity: e, gen });
            }
        }

        if let Some(t) = wake_at {
            self.book_recheck(v, t);
        }
        self.update_awake(v);
    }

    fn draw_backoff(&mut self, v: NodeId, e: usize) {
        let range = self.cw_range(v, e);
        let node = &mut self.nodes[v];
        let cw = node.ent[e].cw;
        if let Some(r) = range {
            if cw < r.cw_min || cw > r.cw_max {
                self.log
                    .violations
                    .push(format!("node {v} entity {e}: cw {cw} outside [{}, {}]", r.cw_min, r.cw_max));
            }
        }
        let b = node.rng.uniform_int(0, cw as i64) as u32;
        node.ent[e].backoff = Some(b);
        self.log.backoffs.push(BackoffRecord {
            time: self.kernel.now(),
            node: v,
            class: (e != SYNC).then(|| class_of(e)),
            cw,
            value: b,
        });
        if b > cw {
            self.log.violations.push(format!("node {v}: backoff {b} > cw {cw}"));
        }
    }

    fn book_recheck(&mut self, v: NodeId, t: SimTime) {
        let now = self.kernel.now();
        let t = t.max(now);
        if let Some((pending, seq)) = self.nodes[v].recheck {
            if pending <= t && pending >= now {
                return;
            }
            self.kernel.cancel(seq);
        }
        let seq = self.kernel.schedule_at(t, v, Ev::Recheck);
        self.nodes[v].recheck = Some((t, seq));
    }

    fn on_expire(&mut self, v: NodeId, e: usize, gen: u64) {
        let now = self.kernel.now();
        {
            let c = &self.nodes[v].ent[e];
            if c.gen != gen || c.expiry() != Some(now) {
                return;
            }
        }
        let best = (0..N_ENTITIES)
            .find(|&k| self.nodes[v].ent[k].expiry() == Some(now))
            .expect("the firing entity is counting");
        if best != e {
            return;
        }
        self.nodes[v].ent[e].expire();
        let act = self.nodes[v].active[e].expect("a counting entity is active");
        if e == SYNC {
            let sched = act.sched.expect("sync activation names a schedule");
            let phase = self.nodes[v].schedules[sched].phase;
            let fits = self.nodes[v]
                .own
                .window_end(phase, now)
                .is_some_and(|end| end - now.0 as i64 >= self.sync_air as i64);
            if !fits || !self.nodes[v].schedules[sched].sync_due {
                self.nodes[v].active[SYNC] = None;
                self.nodes[v].ent[SYNC].abandon();
                self.kick(v);
                return;
            }
            let frame = self.build_sync(v, sched);
            self.start_tx(v, frame, Some(SYNC), Some(sched));
        } else {
            let class = class_of(e);
            let nh = act.receiver.expect("data activation names a receiver");
            let need = self.data_air + self.params.sifs_us + self.ack_air;
            let fits = self.routes.next_hop(v) == Some(nh)
                && self.nodes[v].views.get(&nh).and_then(|view| view.interval_at(now)).is_some_and(|(_, end)| end - now.0 as i64 >= need as i64);
            if !fits {
                self.nodes[v].active[e] = None;
                self.nodes[v].ent[e].abandon();
                self.kick(v);
                return;
            }
            let uid = {
                let node = &mut self.nodes[v];
                let fresh_uid = node.next_uid;
                let head = node.queues[class.index()].front_mut().expect("active class has a frame");
                if head.uid == 0 {
                    head.uid = fresh_uid;
                    node.next_uid += 1;
                }
                head.tx_start_time = Some(now);
                head.dst = Some(nh);
                head.src = v;
                head.dss_delay_field = head.dss_sample();
                head.uid
            };
            let frame = self.nodes[v].queues[class.index()].front().expect("head").clone();
            debug_assert_eq!(frame.uid, uid);
            self.log.transmissions.push(TxRecord {
                time: now,
                node: v,
                dst: nh,
                class,
                packet: frame.packet.expect("data frame carries a packet"),
                enqueue_time: frame.enqueue_time,
                carrier_sense_start: frame.carrier_sense_start.expect("sensing started"),
                attempt: self.nodes[v].ent[e].attempts,
            });
            self.start_tx(v, frame, Some(e), None);
        }
    }

    fn build_sync(&mut self, v: NodeId, sched: usize) -> Frame {
        let now = self.kernel.now();
        let s = &self.nodes[v].schedules[sched];
        if s.is_primary && !s.repeat {
            self.primary_sync_hook(v);
        }
        let next_hop = self.routes.next_hop(v);
        let node = &mut self.nodes[v];
        let uid = node.next_uid;
        node.next_uid += 1;
        let s = &node.schedules[sched];
        let c = s.cycle_start(now);
        let mut frame = Frame::control(FrameKind::Sync, v, None, uid, now);
        frame.payload_bits = self.params.sync_bytes * 8;
        frame.next_hop_field = next_hop;
        let plan = &node.own.plan;
        frame.sync = Some(SyncInfo {
            cycle_start: c,
            next_sleep_at: c + plan.active_for_cycle(c) as i64,
            active_plan: plan.entries().to_vec(),
            duty_cycle_pct: 100.0 * plan.latest() as f64 / plan.period() as f64,
            is_primary: s.is_primary,
        });
        frame
    }

    /// Runs when a primary SYNC is about to go out: closes the measurement
    /// window and, for the duty-cycle schemes, adapts the listen length.
    fn primary_sync_hook(&mut self, v: NodeId) {
        let now = self.kernel.now();
        let scheme = self.params.scheme;
        let (ledger, awake) = self.nodes[v].take_window(now);
        if ledger.awake() != awake {
            self.log.violations.push(format!(
                "node {v} t={now}: ledger {} != awake {awake}",
                ledger.awake()
            ));
        }
        let node = &mut self.nodes[v];
        let u = compute_utilization(&ledger);
        let total_rx = node.rx_counts[0] + node.rx_counts[1];
        let rho = if total_rx == 0 {
            0.0
        } else {
            node.rx_counts[0] as f64 / total_rx as f64
        };
        let s = node.dss.average().unwrap_or(0.0);
        let n_next = node.next_hops.count();
        let dc_before = 100.0 * node.own.plan.latest() as f64 / node.own.plan.period() as f64;
        self.log.ledgers.push(LedgerRecord {
            time: now,
            node: v,
            trx: ledger.trx,
            ttx: ledger.ttx,
            tidle: ledger.tidle,
            awake,
            utilization: u,
            duty_cycle_pct: dc_before,
        });
        node.rx_counts = [0; 2];
        node.next_hops.reset();

        let mut new_dc = None;
        if let Some(f) = node.forced_dc.take() {
            node.dc.dc_current = f;
            new_dc = Some(f);
        } else if !self.discovery && scheme.adapts_duty_cycle() {
            let old = node.dc.dc_current;
            let inputs = DcInputs {
                utilization: u,
                rho,
                dss_avg_us: s,
            };
            let dc = if scheme.gates_on_next_hop() {
                node.dc.adapt_duty_cycle_gated(inputs, n_next, self.params.n_min_next_hop)
            } else {
                node.dc.adapt_duty_cycle(inputs)
            };
            let p = &node.dc;
            let in_range = dc >= p.dc_min - 1e-9 && dc <= p.dc_max + 1e-9;
            if (u < p.u_min && dc != p.dc_default) || (u >= p.u_min && !in_range) {
                self.log
                    .violations
                    .push(format!("node {v} t={now}: duty cycle {dc} with U={u:.3}"));
            }
            if u > p.u_min && scheme.gates_on_next_hop() && n_next <= self.params.n_min_next_hop && dc != old {
                self.log.violations.push(format!("node {v} t={now}: gate closed but duty cycle moved"));
            }
            self.log.adaptations.push(AdaptationRecord {
                time: now,
                node: v,
                scheme,
                parameter: "duty_cycle",
                old_value: old,
                new_value: dc,
                trigger_d_us: None,
                trigger_s_us: Some(s),
                utilization: Some(u),
                rho: Some(rho),
                n_next_hop: Some(n_next),
            });
            new_dc = Some(dc);
        }
        if let Some(dc) = new_dc {
            let active = self.params.active_us(dc);
            let node = &mut self.nodes[v];
            if active != node.own.plan.latest() {
                let primary = node.primary().expect("sending a primary SYNC");
                let lead = self.params.dc_lead_cycles.max(1) as i64 - 1;
                let from = node.schedules[primary].next_cycle_start(now) + lead * self.params.period_us as i64;
                node.own.plan.change_at(from, active);
                node.announce_until = Some(from);
                let others: Vec<usize> = (0..node.schedules.len()).filter(|&i| i != primary).collect();
                for i in others {
                    self.force_sync(v, i);
                }
            }
        }
    }

    // ---- the channel -----------------------------------------------------

    fn start_tx(&mut self, v: NodeId, frame: Frame, entity: Option<usize>, sched: Option<usize>) {
        let now = self.kernel.now();
        let air = self.channel.airtime_us(self.frame_bits(&frame));
        for k in 0..N_ENTITIES {
            if Some(k) == entity || !self.nodes[v].ent[k].is_counting() {
                continue;
            }
            if self.nodes[v].ent[k].expiry() == Some(now) {
                self.nodes[v].ent[k].abandon();
            } else {
                let difs = self.difs_us(k);
                self.nodes[v].ent[k].freeze(now, difs, self.params.slot_us);
            }
        }
        if self.nodes[v].rx.take().is_some() {
            self.log.collisions += 1;
        }
        let id = self.next_tx_id;
        self.next_tx_id += 1;
        let slot = self.params.slot_us;
        let difs: [u64; N_ENTITIES] = std::array::from_fn(|k| self.difs_us(k));
        for &w in self.channel.sensed_by(v) {
            let node = &mut self.nodes[w];
            node.busy += 1;
            if node.busy == 1 {
                for (k, d) in difs.iter().enumerate() {
                    node.ent[k].freeze(now, *d, slot);
                }
            }
            if !self.channel.in_range(v, w) {
                continue;
            }
            node.heard += 1;
            if node.heard == 1 {
                if node.awake && node.tx.is_none() {
                    node.rx = Some(RxLock { tx_id: id, ok: true });
                }
            } else if let Some(rx) = node.rx.as_mut() {
                if rx.ok {
                    self.log.collisions += 1;
                }
                rx.ok = false;
            }
        }
        self.nodes[v].tx = Some(OnAir { id, frame, entity, sched });
        self.kernel.schedule_at(now + air, v, Ev::TxEnd);
        self.update_awake(v);
    }

    fn frame_bits(&self, f: &Frame) -> u64 {
        match f.kind {
            FrameKind::Data => (self.params.payload_bytes + self.params.header_bytes) * 8,
            FrameKind::Ack => self.params.ack_bytes * 8,
            FrameKind::Sync => self.params.sync_bytes * 8,
        }
    }

    fn on_tx_end(&mut self, v: NodeId) {
        let now = self.kernel.now();
        let on_air = self.nodes[v].tx.take().expect("transmission in progress");
        let mut receivers = Vec::new();
        for &w in self.channel.sensed_by(v) {
            let node = &mut self.nodes[w];
            node.busy -= 1;
            if !self.channel.in_range(v, w) {
                continue;
            }
            node.heard -= 1;
            if let Some(rx) = node.rx {
                if rx.tx_id == on_air.id {
                    node.rx = None;
                    if rx.ok {
                        receivers.push(w);
                    }
                }
            }
        }
        for w in receivers {
            self.on_frame_rx(w, &on_air.frame);
        }
        match on_air.frame.kind {
            FrameKind::Data => {
                let e = on_air.entity.expect("data comes from a class entity");
                let seq = self
                    .kernel
                    .schedule_at(now + self.params.sifs_us + self.ack_air + self.params.slot_us, v, Ev::AckTimeout);
                self.nodes[v].wait_ack = Some(WaitAck {
                    uid: on_air.frame.uid,
                    entity: e,
                    receiver: on_air.frame.dst.expect("unicast"),
                    timeout_seq: seq,
                });
            }
            FrameKind::Sync => {
                let sched = on_air.sched.expect("sync names its schedule");
                let node = &mut self.nodes[v];
                let s = &mut node.schedules[sched];
                s.sync_due = false;
                if s.repeat {
                    s.repeat = false;
                } else {
                    s.sync_periods_left = if self.discovery { 0 } else { self.params.sync_period };
                }
                node.active[SYNC] = None;
                node.ent[SYNC].abandon();
            }
            FrameKind::Ack => {
                self.nodes[v].ack_pending = None;
            }
        }
        let nbrs: Vec<NodeId> = self.channel.sensed_by(v).to_vec();
        for w in nbrs {
            if self.nodes[w].busy == 0 {
                self.kick(w);
            } else {
                self.update_awake(w);
            }
        }
        self.kick(v);
    }

    fn on_frame_rx(&mut self, w: NodeId, frame: &Frame) {
        match frame.kind {
            FrameKind::Sync => self.handle_sync(w, frame),
            FrameKind::Data if frame.dst == Some(w) => self.on_data_rx(w, frame),
            FrameKind::Ack if frame.dst == Some(w) => {
                let matches = self.nodes[w]
                    .wait_ack
                    .is_some_and(|wa| wa.uid == frame.uid && wa.receiver == frame.src);
                if matches {
                    self.on_ack(w);
                }
            }
            _ => {}
        }
    }

    fn handle_sync(&mut self, w: NodeId, frame: &Frame) {
        let info = frame.sync.as_ref().expect("SYNC carries schedule info");
        let period = self.params.period_us;
        let phase = info.cycle_start.rem_euclid(period as i64) as u64;
        let plan = ActivePlan::from_entries(period, info.active_plan.clone());
        let node = &mut self.nodes[w];
        let view = node.views.entry(frame.src).or_insert_with(|| WakeView::new(plan.clone()));
        view.plan = plan.clone();
        view.add_phase(phase);
        node.next_hops.observe(w, frame.src, frame.next_hop_field);
        if info.is_primary && !node.own.phases.contains(&phase) {
            if node.fresh {
                node.own.plan = ActivePlan::new(period, plan.latest());
                node.dc.dc_current = info.duty_cycle_pct;
            }
            self.adopt(w, phase, true);
        }
    }

    fn on_data_rx(&mut self, w: NodeId, frame: &Frame) {
        let now = self.kernel.now();
        let ack = Frame::control(FrameKind::Ack, w, Some(frame.src), frame.uid, now);
        self.nodes[w].ack_pending = Some(ack);
        self.kernel.schedule_at(now + self.params.sifs_us, w, Ev::SendAck);
        let class = frame.class.expect("data frame has a class");
        let key = (frame.src, class.index());
        if self.nodes[w].last_rx.get(&key) == Some(&frame.uid) {
            return;
        }
        self.nodes[w].last_rx.insert(key, frame.uid);
        self.nodes[w].rx_counts[class.index()] += 1;
        if class == TrafficClass::ClassI && self.params.scheme.adapts_duty_cycle() {
            let node = &mut self.nodes[w];
            node.dss.update(frame.dss_delay_field as f64);
            if !node.dss.within_sample_bounds() {
                self.log.violations.push(format!("node {w}: DSS average left the sample range"));
            }
        }
        if w == self.sink {
            self.record_delivery(frame);
        } else {
            self.enqueue(w, frame.clone());
        }
    }

    fn on_send_ack(&mut self, w: NodeId) {
        let Some(ack) = self.nodes[w].ack_pending.clone() else { return };
        if self.nodes[w].tx.is_some() {
            self.nodes[w].ack_pending = None;
            self.kick(w);
            return;
        }
        self.start_tx(w, ack, None, None);
    }

    fn on_ack(&mut self, v: NodeId) {
        let wa = self.nodes[v].wait_ack.take().expect("waiting for this ACK");
        self.kernel.cancel(wa.timeout_seq);
        let e = wa.entity;
        let class = class_of(e);
        let ci = class.index();
        let frame = self.nodes[v].queues[ci].pop_front().expect("acked frame is queued");
        if let Some(prev) = self.nodes[v].last_departure[ci] {
            if frame.enqueue_time < prev {
                self.log.violations.push(format!("node {v}: class {} left out of FIFO order", class.label()));
            }
        }
        self.nodes[v].last_departure[ci] = Some(frame.enqueue_time);
        let scheme = self.params.scheme;
        if scheme.adapts_cw() && class == TrafficClass::ClassI {
            self.adapt_cw(v, frame.mac_delay() as f64);
        }
        if scheme.dss_routing() {
            let (lc, beta) = (self.params.lc_ori, self.params.beta);
            let link = self.nodes[v].links.entry(wa.receiver).or_insert_with(|| LinkCostState::new(lc, beta));
            link.update_link_dss(frame.dss_sample() as f64);
        }
        let cw_min = self.cw_range(v, e).expect("data entity").cw_min;
        let node = &mut self.nodes[v];
        node.ent[e].cw = cw_min;
        node.ent[e].attempts = 0;
        node.ent[e].abandon();
        node.active[e] = None;
        self.kick(v);
    }

    fn adapt_cw(&mut self, v: NodeId, sample_us: f64) {
        let now = self.kernel.now();
        let scheme = self.params.scheme;
        let node = &mut self.nodes[v];
        let d = node.mac_delay.update(sample_us);
        let old1 = node.cw.class1.cw_max;
        let new1 = node.cw.adapt_cw_class1(d);
        let old2 = node.cw.class2.cw_min;
        let new2 = node.cw.adapt_cw_class2();
        let c1 = node.cw.class1;
        let c2 = node.cw.class2;
        for (k, r) in [(1usize, c1), (2usize, c2)] {
            node.ent[k].cw = node.ent[k].cw.clamp(r.cw_min, r.cw_max);
        }
        if !node.mac_delay.within_sample_bounds() {
            self.log.violations.push(format!("node {v}: MAC-delay average left the sample range"));
        }
        if !(c1.cw_max_default..=c1.cw_max_max).contains(&c1.cw_max) || c2.cw_min <= c1.cw_max {
            self.log.violations.push(format!(
                "node {v}: class ranges I [{}, {}] II [{}, {}]",
                c1.cw_min, c1.cw_max, c2.cw_min, c2.cw_max
            ));
        }
        for (parameter, old, new) in [("cw_max_I", old1, new1), ("cw_min_II", old2, new2)] {
            self.log.adaptations.push(AdaptationRecord {
                time: now,
                node: v,
                scheme,
                parameter,
                old_value: old as f64,
                new_value: new as f64,
                trigger_d_us: Some(d),
                trigger_s_us: None,
                utilization: None,
                rho: None,
                n_next_hop: None,
            });
        }
    }

    fn on_ack_timeout(&mut self, v: NodeId) {
        let Some(wa) = self.nodes[v].wait_ack.take() else { return };
        let e = wa.entity;
        let ci = class_of(e).index();
        let range = self.cw_range(v, e).expect("data entity");
        let limit = self.params.retry_limit;
        let node = &mut self.nodes[v];
        node.ent[e].attempts += 1;
        if node.ent[e].attempts >= limit {
            let frame = node.queues[ci].pop_front().expect("unacked frame is queued");
            node.ent[e].attempts = 0;
            node.ent[e].cw = range.cw_min;
            self.drop_packet(v, &frame, DropCause::RetryLimit);
        } else {
            node.ent[e].cw = range.grow(node.ent[e].cw);
        }
        let node = &mut self.nodes[v];
        node.ent[e].abandon();
        node.active[e] = None;
        self.kick(v);
    }

    // ---- routing ---------------------------------------------------------

    fn on_route_recompute(&mut self) {
        let now = self.kernel.now();
        let s_i = self.params.s_i_us;
        let lc = self.params.lc_ori;
        let cost = |u: NodeId, w: NodeId| {
            self.nodes[u]
                .links
                .get(&w)
                .map_or(lc, |l| l.overall(s_i))
        };
        let table = shortest_path_table(self.channel.adjacency(), self.sink, RoutingMode::DssAware, cost);
        for u in 0..self.nodes.len() {
            for &w in self.channel.neighbors(u) {
                let l = self.nodes[u].links.get(&w);
                let lc_overall = l.map_or(lc, |l| l.overall(s_i));
                if lc_overall < lc {
                    self.log.violations.push(format!("link {u}->{w}: cost {lc_overall} below base"));
                }
                self.log.links.push(LinkRecord {
                    time: now,
                    src: u,
                    dst: w,
                    s_link_avg_us: l.and_then(|l| l.dss.average()),
                    lc_overall,
                });
            }
        }
        for u in 0..self.nodes.len() {
            if u != self.sink && table.next_hop(u).is_some() && table.hops_to_sink(u).is_none() {
                self.log.violations.push(format!("route from {u} loops"));
            }
            self.log.routes.push(RouteRecord {
                time: now,
                node: u,
                next_hop: table.next_hop(u),
            });
        }
        self.routes = table;
        let next = now + self.params.sync_period as u64 * self.params.period_us;
        self.kernel.schedule_at(next, self.sink, Ev::RouteRecompute);
        for v in 0..self.nodes.len() {
            self.kick(v);
        }
    }
}

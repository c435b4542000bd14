use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::adapt::{CwPolicy, DutyCyclePolicy, EwmaEstimator, Ledger};
use crate::kernel::{NodeId, RngStream, SimTime};
use crate::mac::{ActivePlan, Contender, Frame, Schedule, WakeView};
use crate::xlayer::{LinkCostState, NextHopStats};

/// Contention entities per node: SYNC, class I, class II, in priority order.
pub(crate) const SYNC: usize = 0;
pub(crate) const N_ENTITIES: usize = 3;

#[derive(Clone, Copy, Debug)]
pub(crate) struct Activation {
    pub receiver: Option<NodeId>,
    pub sched: Option<usize>,
    /// Last instant at which a countdown may still start a transmission.
    pub deadline: SimTime,
}

#[derive(Clone, Debug)]
pub(crate) struct OnAir {
    pub id: u64,
    pub frame: Frame,
    pub entity: Option<usize>,
    pub sched: Option<usize>,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct WaitAck {
    pub uid: u64,
    pub entity: usize,
    pub receiver: NodeId,
    pub timeout_seq: u64,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct RxLock {
    pub tx_id: u64,
    pub ok: bool,
}

pub(crate) struct Node {
    /// Union of own schedules with the node-wide listen plan.
    pub own: WakeView,
    pub schedules: Vec<Schedule>,
    /// Still listening for a schedule to join.
    pub fresh: bool,
    /// Recorded copies of neighbours' schedules, learned from their SYNCs.
    pub views: BTreeMap<NodeId, WakeView>,
    pub queues: [VecDeque<Frame>; 2],
    pub ent: [Contender; N_ENTITIES],
    pub active: [Option<Activation>; N_ENTITIES],
    pub tx: Option<OnAir>,
    pub wait_ack: Option<WaitAck>,
    pub ack_pending: Option<Frame>,
    pub rx: Option<RxLock>,
    /// Transmissions in progress within carrier-sense range.
    pub busy: u32,
    /// Transmissions in progress within communication range.
    pub heard: u32,
    pub awake: bool,
    awake_since: SimTime,
    window_awake: u64,
    pub ledger: Ledger,
    ledger_since: SimTime,
    pub next_uid: u64,
    pub last_rx: HashMap<(NodeId, usize), u64>,
    pub cw: CwPolicy,
    pub mac_delay: EwmaEstimator,
    pub dss: EwmaEstimator,
    pub links: BTreeMap<NodeId, LinkCostState>,
    pub dc: DutyCyclePolicy,
    pub next_hops: NextHopStats,
    pub rx_counts: [u64; 2],
    pub rng: RngStream,
    pub recheck: Option<(SimTime, u64)>,
    pub last_departure: [Option<SimTime>; 2],
    pub forced_dc: Option<f64>,
    /// Cycle start from which an announced duty-cycle change applies.
    pub announce_until: Option<i64>,
}

impl Node {
    pub fn new(plan: ActivePlan, cw: CwPolicy, dc: DutyCyclePolicy, eta: f64, zeta: f64, rng: RngStream) -> Self {
        Node {
            own: WakeView::new(plan),
            schedules: Vec::new(),
            fresh: true,
            views: BTreeMap::new(),
            queues: [VecDeque::new(), VecDeque::new()],
            ent: Default::default(),
            active: [None; N_ENTITIES],
            tx: None,
            wait_ack: None,
            ack_pending: None,
            rx: None,
            busy: 0,
            heard: 0,
            awake: false,
            awake_since: SimTime::ZERO,
            window_awake: 0,
            ledger: Ledger::default(),
            ledger_since: SimTime::ZERO,
            next_uid: 1,
            last_rx: HashMap::new(),
            cw,
            mac_delay: EwmaEstimator::new(eta),
            dss: EwmaEstimator::new(zeta),
            links: BTreeMap::new(),
            dc,
            next_hops: NextHopStats::default(),
            rx_counts: [0; 2],
            rng,
            recheck: None,
            last_departure: [None; 2],
            forced_dc: None,
            announce_until: None,
        }
    }

    pub fn primary(&self) -> Option<usize> {
        self.schedules.iter().position(|s| s.is_primary)
    }

    /// Attributes the time since the last call to the radio state that held
    /// over it. Must run before any state change.
    pub fn accrue(&mut self, now: SimTime) {
        let dt = now.since(self.ledger_since);
        self.ledger_since = now;
        if !self.awake {
            return;
        }
        if self.tx.is_some() {
            self.ledger.ttx += dt;
        } else if self.busy > 0 {
            self.ledger.trx += dt;
        } else {
            self.ledger.tidle += dt;
        }
    }

    pub fn set_awake(&mut self, awake: bool, now: SimTime) {
        if self.awake == awake {
            return;
        }
        if self.awake {
            self.window_awake += now.since(self.awake_since);
        } else {
            self.awake_since = now;
        }
        self.awake = awake;
    }

    /// Closes the measurement window. Returns the ledger together with the
    /// awake time tracked independently from wake/sleep transitions.
    pub fn take_window(&mut self, now: SimTime) -> (Ledger, u64) {
        self.accrue(now);
        if self.awake {
            self.window_awake += now.since(self.awake_since);
            self.awake_since = now;
        }
        let out = (self.ledger, self.window_awake);
        self.ledger = Ledger::default();
        self.window_awake = 0;
        out
    }

    pub fn busy_with_frame(&self) -> bool {
        self.tx.is_some() || self.wait_ack.is_some() || self.ack_pending.is_some()
    }

    pub fn has_activity(&self) -> bool {
        self.busy_with_frame() || self.rx.is_some() || self.active.iter().any(Option::is_some)
    }
}

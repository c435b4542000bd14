//! Per-class QoS adaptations layered on the baseline MAC: delay estimators,
//! contention-window adaptation, duty-cycle adaptation and per-class DIFS.

mod cw;
mod difs;
mod duty;
mod ewma;

use std::fmt;
use std::str::FromStr;

pub use cw::{CwPolicy, CwRange};
pub use difs::DifsProfile;
pub use duty::{compute_utilization, DcInputs, DutyCyclePolicy, Ledger};
pub use ewma::EwmaEstimator;

/// Which adaptations are wired into the MAC for a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Baseline,
    Cw,
    Dc,
    Difs,
    All,
    /// Duty-cycle adaptation gated on next-hop declarations.
    XlNextHop,
    /// Baseline MAC with routes chosen under DSS-inflated link costs.
    XlRoute,
}

impl Scheme {
    pub const ALL_SCHEMES: [Scheme; 7] = [
        Scheme::Baseline,
        Scheme::Cw,
        Scheme::Dc,
        Scheme::Difs,
        Scheme::All,
        Scheme::XlNextHop,
        Scheme::XlRoute,
    ];

    pub fn adapts_cw(self) -> bool {
        matches!(self, Scheme::Cw | Scheme::All)
    }

    pub fn adapts_duty_cycle(self) -> bool {
        matches!(self, Scheme::Dc | Scheme::All | Scheme::XlNextHop)
    }

    pub fn gates_on_next_hop(self) -> bool {
        self == Scheme::XlNextHop
    }

    pub fn per_class_difs(self) -> bool {
        matches!(self, Scheme::Difs | Scheme::All)
    }

    pub fn dss_routing(self) -> bool {
        self == Scheme::XlRoute
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Baseline => "baseline",
            Scheme::Cw => "cw",
            Scheme::Dc => "dc",
            Scheme::Difs => "difs",
            Scheme::All => "all",
            Scheme::XlNextHop => "xl-nexthop",
            Scheme::XlRoute => "xl-route",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scheme::ALL_SCHEMES
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| format!("unknown scheme `{s}`"))
    }
}

//! Utilization- and DSS-delay-driven duty-cycle adaptation, evaluated once
//! per SYNC period when the node broadcasts its primary SYNC.

/// Awake-time breakdown over one SYNC period, microseconds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Ledger {
    pub trx: u64,
    pub ttx: u64,
    pub tidle: u64,
}

impl Ledger {
    pub fn awake(&self) -> u64 {
        self.trx + self.ttx + self.tidle
    }
}

/// `(Trx + Ttx) / (Trx + Ttx + Tidle)`; an empty window counts as idle.
pub fn compute_utilization(ledger: &Ledger) -> f64 {
    let total = ledger.awake();
    if total == 0 {
        return 0.0;
    }
    (ledger.trx + ledger.ttx) as f64 / total as f64
}

/// Inputs sampled at the moment the adaptation runs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DcInputs {
    pub utilization: f64,
    /// Class-I share of DATA frames received in the window.
    pub rho: f64,
    /// Class-I DSS-delay average, microseconds.
    pub dss_avg_us: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DutyCyclePolicy {
    /// Duty cycle currently published, percent.
    pub dc_current: f64,
    pub dc_default: f64,
    pub dc_min: f64,
    pub dc_max: f64,
    /// Relative change below which the previous duty cycle is kept.
    pub dc_thresh: f64,
    pub u_min: f64,
    /// Utilization seen at the previous evaluation; `None` before the first.
    pub u_prev: Option<f64>,
    pub rho_min: f64,
    /// Class-I DSS-delay target, microseconds.
    pub target_dss_us: f64,
}

impl DutyCyclePolicy {
    pub fn new(target_dss_us: f64) -> Self {
        assert!(target_dss_us > 0.0, "class-I DSS target must be positive");
        DutyCyclePolicy {
            dc_current: 30.0,
            dc_default: 30.0,
            dc_min: 30.0,
            dc_max: 60.0,
            dc_thresh: 0.05,
            u_min: 0.10,
            u_prev: None,
            rho_min: 0.30,
            target_dss_us,
        }
    }

    /// Duty cycle the utilization trend alone would permit.
    ///
    /// With no usable previous utilization the growth factor is unbounded and
    /// the result saturates at `dc_max`.
    pub fn utilization_bound(&self, u: f64) -> f64 {
        let prev = self.dc_current;
        let dc_u = match self.u_prev {
            Some(up) if up > 0.0 => (prev * (1.0 + (u - up) / up)).min(self.dc_max),
            _ => self.dc_max,
        };
        dc_u.max(self.dc_min)
    }

    /// Candidate driven by the DSS-delay error alone.
    pub fn dss_candidate(&self, s_us: f64) -> f64 {
        self.dc_current * (1.0 + (s_us - self.target_dss_us) / self.target_dss_us)
    }

    /// Runs one evaluation and returns the new duty cycle.
    pub fn adapt_duty_cycle(&mut self, inputs: DcInputs) -> f64 {
        let out = self.evaluate(inputs, true);
        self.u_prev = Some(inputs.utilization);
        out
    }

    /// Same as [`adapt_duty_cycle`](Self::adapt_duty_cycle) but only acts when
    /// more than `n_min` distinct neighbours routed through this node.
    pub fn adapt_duty_cycle_gated(&mut self, inputs: DcInputs, n_next_hop: usize, n_min: usize) -> f64 {
        let out = self.evaluate(inputs, n_next_hop > n_min);
        self.u_prev = Some(inputs.utilization);
        out
    }

    fn evaluate(&mut self, inputs: DcInputs, gate_open: bool) -> f64 {
        let u = inputs.utilization;
        if u < self.u_min {
            self.dc_current = self.dc_default;
            return self.dc_current;
        }
        if !gate_open || u <= self.u_min {
            return self.dc_current;
        }
        let prev = self.dc_current;
        let dc_u = self.utilization_bound(u);
        if inputs.rho > self.rho_min {
            let candidate = self.dss_candidate(inputs.dss_avg_us);
            if ((candidate - prev) / prev).abs() < self.dc_thresh {
                return prev;
            }
            if candidate < prev {
                self.dc_current = dc_u.max(self.dc_min);
            } else if candidate > prev {
                self.dc_current = candidate.min(dc_u);
            }
        }
        self.dc_current
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inputs(u: f64, rho: f64, s_ms: f64) -> DcInputs {
        DcInputs {
            utilization: u,
            rho,
            dss_avg_us: s_ms * 1_000.0,
        }
    }

    #[test]
    fn utilization_arithmetic() {
        let l = Ledger {
            trx: 10_000,
            ttx: 20_000,
            tidle: 70_000,
        };
        assert!((compute_utilization(&l) - 0.30).abs() < 1e-12);
        assert_eq!(compute_utilization(&Ledger { tidle: 5, ..Default::default() }), 0.0);
        assert_eq!(compute_utilization(&Ledger { trx: 3, ttx: 4, tidle: 0 }), 1.0);
        assert_eq!(compute_utilization(&Ledger::default()), 0.0);
    }

    #[test]
    fn low_utilization_resets() {
        let mut p = DutyCyclePolicy::new(20_000.0);
        p.dc_current = 45.0;
        assert_eq!(p.adapt_duty_cycle(inputs(0.05, 0.9, 500.0)), 30.0);
    }

    #[test]
    fn rising_load_and_delay_saturate() {
        let mut p = DutyCyclePolicy::new(20_000.0);
        p.u_prev = Some(0.1);
        assert_eq!(p.utilization_bound(0.2), 60.0);
        assert_eq!(p.dss_candidate(40_000.0), 60.0);
        assert_eq!(p.adapt_duty_cycle(inputs(0.2, 0.5, 40.0)), 60.0);
    }

    #[test]
    fn small_change_is_ignored() {
        let mut p = DutyCyclePolicy::new(20_000.0);
        p.u_prev = Some(0.2);
        assert!((p.dss_candidate(20_500.0) - 30.75).abs() < 1e-9);
        assert_eq!(p.adapt_duty_cycle(inputs(0.4, 0.5, 20.5)), 30.0);
    }

    #[test]
    fn low_class1_share_keeps_value() {
        let mut p = DutyCyclePolicy::new(20_000.0);
        p.dc_current = 40.0;
        p.u_prev = Some(0.2);
        assert_eq!(p.adapt_duty_cycle(inputs(0.4, 0.2, 80.0)), 40.0);
        assert_eq!(p.u_prev, Some(0.4));
    }

    #[test]
    fn falling_delay_follows_utilization() {
        let mut p = DutyCyclePolicy::new(20_000.0);
        p.dc_current = 50.0;
        p.u_prev = Some(0.4);
        // candidate = 25 < 50; DC_U = 50 * 0.3/0.4 = 37.5
        assert_eq!(p.adapt_duty_cycle(inputs(0.3, 0.5, 10.0)), 37.5);
    }

    #[test]
    fn gate_closed_holds() {
        let mut p = DutyCyclePolicy::new(20_000.0);
        p.u_prev = Some(0.1);
        assert_eq!(p.adapt_duty_cycle_gated(inputs(0.4, 0.5, 40.0), 1, 2), 30.0);
        p.u_prev = Some(0.1);
        assert_eq!(p.adapt_duty_cycle_gated(inputs(0.2, 0.5, 40.0), 3, 2), 60.0);
        p.dc_current = 50.0;
        assert_eq!(p.adapt_duty_cycle_gated(inputs(0.05, 0.5, 40.0), 9, 2), 30.0);
    }

    #[test]
    fn first_window_has_unbounded_growth() {
        let p = DutyCyclePolicy::new(20_000.0);
        assert_eq!(p.utilization_bound(0.3), 60.0);
    }
}

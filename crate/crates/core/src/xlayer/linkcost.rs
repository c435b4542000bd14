use crate::adapt::EwmaEstimator;

/// Cost of one directed link, kept by the sending node.
#[derive(Clone, Debug, PartialEq)]
pub struct LinkCostState {
    pub lc_ori: f64,
    pub dss: EwmaEstimator,
}

impl LinkCostState {
    pub fn new(lc_ori: f64, beta: f64) -> Self {
        LinkCostState {
            lc_ori,
            dss: EwmaEstimator::new(beta),
        }
    }

    /// Folds a sender-side DSS sample (microseconds) into the link average.
    pub fn update_link_dss(&mut self, sample_us: f64) -> f64 {
        self.dss.update(sample_us)
    }

    pub fn overall(&self, target_dss_us: f64) -> f64 {
        overall_link_cost(self.lc_ori, self.dss.average(), target_dss_us)
    }
}

/// Base cost inflated by the link's average DSS excess over the target.
pub fn overall_link_cost(lc_ori: f64, dss_avg_us: Option<f64>, target_dss_us: f64) -> f64 {
    assert!(target_dss_us > 0.0, "DSS target must be positive");
    match dss_avg_us {
        Some(avg) if avg > target_dss_us => lc_ori * (1.0 + (avg - target_dss_us) / target_dss_us),
        _ => lc_ori,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cost_examples() {
        assert_eq!(overall_link_cost(1.0, Some(30_000.0), 20_000.0), 1.5);
        assert_eq!(overall_link_cost(1.0, Some(20_000.0), 20_000.0), 1.0);
        assert_eq!(overall_link_cost(2.0, Some(40_000.0), 20_000.0), 4.0);
        assert_eq!(overall_link_cost(1.0, None, 20_000.0), 1.0);
    }

    #[test]
    #[should_panic]
    fn zero_target_is_fatal() {
        overall_link_cost(1.0, Some(1.0), 0.0);
    }

    #[test]
    fn link_average() {
        let mut l = LinkCostState::new(1.0, 0.5);
        assert_eq!(l.update_link_dss(30_000.0), 30_000.0);
        assert_eq!(l.update_link_dss(10_000.0), 20_000.0);
        let mut m = LinkCostState::new(1.0, 0.0);
        m.update_link_dss(5.0);
        assert_eq!(m.update_link_dss(9.0), 9.0);
    }
}

//! Per-class contention-window ranges and their delay-driven adaptation.

use crate::mac::TrafficClass;

/// Contention-window range for one traffic class, in slots.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CwRange {
    pub cw_min_default: u32,
    pub cw_max_default: u32,
    /// Upper bound the adaptation may raise `cw_max` to.
    pub cw_max_max: u32,
    pub cw_min: u32,
    pub cw_max: u32,
}

impl CwRange {
    pub fn new(cw_min: u32, cw_max: u32, cw_max_max: u32) -> Self {
        assert!(cw_min <= cw_max && cw_max <= cw_max_max);
        CwRange {
            cw_min_default: cw_min,
            cw_max_default: cw_max,
            cw_max_max,
            cw_min,
            cw_max,
        }
    }

    /// Window after one more failed attempt: `2(cw+1) - 1`, capped at `cw_max`.
    pub fn grow(&self, cw: u32) -> u32 {
        (2 * (cw + 1) - 1).clamp(self.cw_min, self.cw_max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CwPolicy {
    pub class1: CwRange,
    pub class2: CwRange,
    /// Gain applied to the relative delay error.
    pub alpha: f64,
    /// Minimum change (slots) before a new class-I `cw_max` is published.
    pub cw_thresh: u32,
    /// Class-I per-hop MAC-delay target, microseconds.
    pub target_delay_us: f64,
}

impl CwPolicy {
    /// Default per-class ranges: class I `[7, 15]` growing to 31, class II `[32, 63]`.
    pub fn with_defaults(alpha: f64, cw_thresh: u32, target_delay_us: f64) -> Self {
        assert!(target_delay_us > 0.0, "class-I delay target must be positive");
        CwPolicy {
            class1: CwRange::new(7, 15, 31),
            class2: CwRange::new(32, 63, 63),
            alpha,
            cw_thresh,
            target_delay_us,
        }
    }

    pub fn range(&self, class: TrafficClass) -> &CwRange {
        match class {
            TrafficClass::ClassI => &self.class1,
            TrafficClass::ClassII => &self.class2,
        }
    }

    /// Unclamped, rounded candidate for the class-I `cw_max`.
    pub fn class1_candidate(&self, delay_us: f64) -> i64 {
        let d = if delay_us <= 0.0 { 1.0 } else { delay_us };
        let prev = self.class1.cw_max as f64;
        let raw = prev * (1.0 - self.alpha * (d - self.target_delay_us) / d);
        round_half_up(raw)
    }

    /// Moves the class-I `cw_max` toward the value that would bring the
    /// measured MAC delay `delay_us` back to target. Returns the new value.
    pub fn adapt_cw_class1(&mut self, delay_us: f64) -> u32 {
        let prev = self.class1.cw_max as i64;
        let candidate = self.class1_candidate(delay_us);
        if (candidate - prev).unsigned_abs() < self.cw_thresh as u64 {
            return self.class1.cw_max;
        }
        let next = if candidate < prev {
            candidate.max(self.class1.cw_max_default as i64)
        } else if candidate > prev {
            candidate.min(self.class1.cw_max_max as i64)
        } else {
            prev
        };
        self.class1.cw_max = next as u32;
        self.class1.cw_max
    }

    /// Keeps the best-effort range strictly above the class-I range.
    pub fn adapt_cw_class2(&mut self) -> u32 {
        let floor = self.class1.cw_max + 1;
        self.class2.cw_min = self.class2.cw_min_default.max(floor);
        self.class2.cw_max = self.class2.cw_max_default.max(self.class2.cw_min);
        self.class2.cw_min
    }

    pub fn ranges_disjoint(&self) -> bool {
        self.class2.cw_min > self.class1.cw_max
    }
}

pub(crate) fn round_half_up(x: f64) -> i64 {
    (x + 0.5).floor() as i64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn policy() -> CwPolicy {
        CwPolicy::with_defaults(0.1, 1, 50_000.0)
    }

    #[test]
    fn on_target_is_unchanged() {
        let mut p = policy();
        assert_eq!(p.adapt_cw_class1(50_000.0), 15);
    }

    #[test]
    fn double_delay_shrinks_to_floor() {
        let mut p = policy();
        p.class1.cw_max = 16;
        assert_eq!(p.class1_candidate(100_000.0), 15);
        assert_eq!(p.adapt_cw_class1(100_000.0), 15);
    }

    #[test]
    fn half_delay_grows() {
        let mut p = policy();
        assert_eq!(p.class1_candidate(25_000.0), 17);
        // 15 * 1.1 = 16.5 rounds half-up to 17
        assert_eq!(p.adapt_cw_class1(25_000.0), 17);
    }

    #[test]
    fn growth_capped_at_max() {
        let mut p = policy();
        p.class1.cw_max = 30;
        assert_eq!(p.adapt_cw_class1(1_000.0), 31);
    }

    #[test]
    fn zero_delay_uses_one_tick() {
        let mut p = policy();
        assert_eq!(p.adapt_cw_class1(0.0), 31);
    }

    #[test]
    fn dead_band_holds_value() {
        let mut p = policy();
        p.cw_thresh = 3;
        p.class1.cw_max = 16;
        // candidate 15 differs by one slot, below the threshold
        assert_eq!(p.adapt_cw_class1(100_000.0), 16);
    }

    #[test]
    fn class2_floor() {
        let mut p = policy();
        assert_eq!(p.adapt_cw_class2(), 32);
        p.class1.cw_max = 31;
        assert_eq!(p.adapt_cw_class2(), 32);
        p.class1.cw_max = 40;
        assert_eq!(p.adapt_cw_class2(), 41);
        assert!(p.ranges_disjoint());
    }

    #[test]
    fn exponential_growth_caps() {
        let r = CwRange::new(7, 15, 31);
        assert_eq!(r.grow(7), 15);
        assert_eq!(r.grow(15), 15);
    }
}

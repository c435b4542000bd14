//! Sleep/listen schedules and the wake-window arithmetic shared by a node's
//! own schedules and its recorded copies of neighbours' schedules.

use crate::kernel::SimTime;

/// One sleep/listen cycle followed by a node. The listen portion length is a
/// node-wide property (see [`ActivePlan`]) because a duty-cycle change applies
/// to every schedule the node follows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    pub period: u64,
    /// Offset of cycle starts, in `[0, period)`.
    pub phase: u64,
    /// Cycles remaining before the next SYNC on this schedule.
    pub sync_periods_left: u32,
    pub is_primary: bool,
    /// A SYNC on this schedule is waiting for its listen window.
    pub sync_due: bool,
    /// The due SYNC only re-announces a pending duty-cycle change.
    pub repeat: bool,
}

impl Schedule {
    pub fn new(period: u64, phase: u64, is_primary: bool) -> Self {
        assert!(period > 0 && phase < period);
        Schedule {
            period,
            phase,
            sync_periods_left: 0,
            is_primary,
            sync_due: false,
            repeat: false,
        }
    }

    /// Start of the cycle containing `t` (may precede time zero).
    pub fn cycle_start(&self, t: SimTime) -> i64 {
        cycle_start(self.period, self.phase, t.0 as i64)
    }

    /// First cycle start strictly after `t`.
    pub fn next_cycle_start(&self, t: SimTime) -> i64 {
        self.cycle_start(t) + self.period as i64
    }
}

pub(crate) fn cycle_start(period: u64, phase: u64, t: i64) -> i64 {
    let p = period as i64;
    phase as i64 + (t - phase as i64).div_euclid(p) * p
}

/// Listen-portion length over time. Each entry `(from, active)` applies to
/// cycles starting at or after `from`; changes only ever take effect at a
/// cycle boundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActivePlan {
    period: u64,
    history: Vec<(i64, u64)>,
}

impl ActivePlan {
    pub fn new(period: u64, active: u64) -> Self {
        assert!(active > 0 && active <= period, "0 < active <= period violated");
        ActivePlan {
            period,
            history: vec![(i64::MIN, active)],
        }
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn active_for_cycle(&self, cycle_start: i64) -> u64 {
        self.history
            .iter()
            .rev()
            .find(|(from, _)| *from <= cycle_start)
            .map(|&(_, a)| a)
            .expect("plan has a base entry")
    }

    /// Listen length for cycles that start at or after `now`'s latest entry.
    pub fn latest(&self) -> u64 {
        self.history.last().expect("plan has a base entry").1
    }

    pub fn duty_cycle_pct(&self, cycle_start: i64) -> f64 {
        100.0 * self.active_for_cycle(cycle_start) as f64 / self.period as f64
    }

    /// Schedules a new listen length for cycles starting at `from` or later.
    pub fn change_at(&mut self, from: i64, active: u64) {
        assert!(active > 0 && active <= self.period);
        self.history.retain(|(f, _)| *f < from);
        self.history.push((from, active));
    }

    /// Drops entries that can no longer affect any cycle overlapping `now`.
    pub fn prune(&mut self, now: SimTime) {
        let horizon = now.0 as i64 - 2 * self.period as i64;
        while self.history.len() > 1 && self.history[1].0 <= horizon {
            self.history.remove(0);
        }
    }

    pub fn entries(&self) -> &[(i64, u64)] {
        &self.history
    }

    pub fn from_entries(period: u64, entries: Vec<(i64, u64)>) -> Self {
        assert!(!entries.is_empty());
        let mut history = entries;
        history[0].0 = i64::MIN;
        ActivePlan { period, history }
    }
}

/// The union of listen windows of a set of schedule phases sharing one plan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WakeView {
    pub phases: Vec<u64>,
    pub plan: ActivePlan,
}

impl WakeView {
    pub fn new(plan: ActivePlan) -> Self {
        WakeView {
            phases: Vec::new(),
            plan,
        }
    }

    pub fn add_phase(&mut self, phase: u64) -> bool {
        if self.phases.contains(&phase) {
            return false;
        }
        self.phases.push(phase);
        self.phases.sort_unstable();
        true
    }

    /// Merged listen intervals `[start, end)` touching `[from, to)`.
    pub fn intervals(&self, from: i64, to: i64) -> Vec<(i64, i64)> {
        let p = self.plan.period() as i64;
        let mut raw = Vec::new();
        for &phase in &self.phases {
            let mut c = cycle_start(self.plan.period(), phase, from) - p;
            while c <= to + p {
                let end = c + self.plan.active_for_cycle(c) as i64;
                if end > from - p {
                    raw.push((c, end));
                }
                c += p;
            }
        }
        raw.sort_unstable();
        let mut merged: Vec<(i64, i64)> = Vec::with_capacity(raw.len());
        for (s, e) in raw {
            match merged.last_mut() {
                Some(last) if s <= last.1 => last.1 = last.1.max(e),
                _ => merged.push((s, e)),
            }
        }
        merged
    }

    pub fn interval_at(&self, t: SimTime) -> Option<(i64, i64)> {
        let t = t.0 as i64;
        let p = self.plan.period() as i64;
        self.intervals(t - p, t + p)
            .into_iter()
            .find(|&(s, e)| s <= t && t < e)
    }

    pub fn awake_at(&self, t: SimTime) -> bool {
        let t = t.0 as i64;
        self.phases.iter().any(|&ph| {
            let c = cycle_start(self.plan.period(), ph, t);
            t - c < self.plan.active_for_cycle(c) as i64
        })
    }

    /// End of the listen window of `phase` that contains `t`, if any.
    pub fn window_end(&self, phase: u64, t: SimTime) -> Option<i64> {
        let t = t.0 as i64;
        let c = cycle_start(self.plan.period(), phase, t);
        let end = c + self.plan.active_for_cycle(c) as i64;
        (t < end).then_some(end)
    }

    /// Earliest instant `>= t` at which the listener stays awake for at least
    /// `need` more microseconds.
    pub fn next_fit(&self, t: SimTime, need: u64) -> Option<SimTime> {
        let p = self.plan.period() as i64;
        let mut from = t.0 as i64;
        for _ in 0..4 {
            for (s, e) in self.intervals(from - p, from + 2 * p) {
                let start = s.max(t.0 as i64);
                if e > start && (e - start) as u64 >= need {
                    return Some(SimTime(start as u64));
                }
            }
            from += 2 * p;
        }
        None
    }

    /// Next instant after `t` at which the awake/asleep state may flip.
    pub fn next_edge(&self, t: SimTime) -> Option<SimTime> {
        let ti = t.0 as i64;
        let p = self.plan.period() as i64;
        self.intervals(ti - p, ti + 2 * p)
            .into_iter()
            .flat_map(|(s, e)| [s, e])
            .filter(|&x| x > ti)
            .min()
            .map(|x| SimTime(x as u64))
    }
}

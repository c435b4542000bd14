//! Discrete-event kernel: simulation clock, ordered dispatch and seeded
//! random streams.
//!
//! Events are ordered by `(fire_at, seq)`. The sequence number is assigned at
//! insertion, so two events scheduled for the same tick dispatch in the order
//! they were scheduled. Cancellation is a tombstone: the entry stays in the
//! heap and is skipped when popped.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};
use std::fmt;
use std::ops::{Add, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Node identifier. Nodes are numbered densely from zero.
pub type NodeId = usize;

/// Simulation instant in microseconds since the start of the run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SimTime(pub u64);

impl SimTime {
    pub const ZERO: SimTime = SimTime(0);

    pub fn from_secs(s: u64) -> Self {
        SimTime(s * 1_000_000)
    }

    pub fn from_millis(ms: u64) -> Self {
        SimTime(ms * 1_000)
    }

    pub fn as_micros(self) -> u64 {
        self.0
    }

    pub fn as_secs_f64(self) -> f64 {
        self.0 as f64 / 1e6
    }

    /// Elapsed time since `earlier`, panicking if `earlier` is in the future.
    pub fn since(self, earlier: SimTime) -> u64 {
        self.0
            .checked_sub(earlier.0)
            .unwrap_or_else(|| panic!("time went backwards: {} < {}", self, earlier))
    }
}

impl Add<u64> for SimTime {
    type Output = SimTime;
    fn add(self, rhs: u64) -> SimTime {
        SimTime(self.0 + rhs)
    }
}

impl Sub<u64> for SimTime {
    type Output = SimTime;
    fn sub(self, rhs: u64) -> SimTime {
        SimTime(self.0 - rhs)
    }
}

impl fmt::Display for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}us", self.0)
    }
}

/// A scheduled event addressed to one node.
#[derive(Clone, Debug)]
pub struct Event<P> {
    pub fire_at: SimTime,
    pub seq: u64,
    pub target: NodeId,
    pub payload: P,
}

struct Queued<P>(Event<P>);

impl<P> PartialEq for Queued<P> {
    fn eq(&self, other: &Self) -> bool {
        self.0.fire_at == other.0.fire_at && self.0.seq == other.0.seq
    }
}

impl<P> Eq for Queued<P> {}

impl<P> PartialOrd for Queued<P> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<P> Ord for Queued<P> {
    // BinaryHeap is a max-heap; invert so the earliest (fire_at, seq) pops first.
    fn cmp(&self, other: &Self) -> Ordering {
        (other.0.fire_at, other.0.seq).cmp(&(self.0.fire_at, self.0.seq))
    }
}

pub struct Kernel<P> {
    now: SimTime,
    next_seq: u64,
    heap: BinaryHeap<Queued<P>>,
    cancelled: HashSet<u64>,
    dispatched: u64,
}

impl<P> Default for Kernel<P> {
    fn default() -> Self {
        Self::new()
    }
}

impl<P> Kernel<P> {
    pub fn new() -> Self {
        Kernel {
            now: SimTime::ZERO,
            next_seq: 0,
            heap: BinaryHeap::new(),
            cancelled: HashSet::new(),
            dispatched: 0,
        }
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    pub fn pending(&self) -> usize {
        self.heap.len() - self.cancelled.len()
    }

    pub fn dispatched(&self) -> u64 {
        self.dispatched
    }

    /// Schedules `payload` for `target` at `fire_at` and returns its sequence number.
    pub fn schedule_at(&mut self, fire_at: SimTime, target: NodeId, payload: P) -> u64 {
        let seq = self.next_seq;
        self.schedule(Event {
            fire_at,
            seq,
            target,
            payload,
        });
        seq
    }

    /// Queues a fully formed event. Scheduling in the past aborts the run.
    pub fn schedule(&mut self, ev: Event<P>) {
        assert!(
            ev.fire_at >= self.now,
            "event scheduled in the past: fire_at={} now={}",
            ev.fire_at,
            self.now
        );
        self.next_seq = self.next_seq.max(ev.seq + 1);
        self.heap.push(Queued(ev));
    }

    /// Marks an event as dead; it will be skipped at dispatch.
    pub fn cancel(&mut self, seq: u64) {
        self.cancelled.insert(seq);
    }

    /// Pops the next live event with `fire_at <= t_end`, advancing the clock to it.
    pub fn pop_until(&mut self, t_end: SimTime) -> Option<Event<P>> {
        loop {
            let head = self.heap.peek()?;
            if head.0.fire_at > t_end {
                return None;
            }
            let Queued(ev) = self.heap.pop().expect("peeked");
            if self.cancelled.remove(&ev.seq) {
                continue;
            }
            debug_assert!(ev.fire_at >= self.now);
            self.now = ev.fire_at;
            self.dispatched += 1;
            return Some(ev);
        }
    }

    /// Moves the clock forward without dispatching anything.
    pub fn advance_to(&mut self, t: SimTime) {
        assert!(t >= self.now, "cannot rewind clock to {} from {}", t, self.now);
        self.now = t;
    }

    /// Dispatches every event with `fire_at <= t_end` through `handler` and
    /// leaves the clock at `t_end`. Returns the number of events dispatched.
    pub fn run_until<F>(&mut self, t_end: SimTime, mut handler: F) -> u64
    where
        F: FnMut(&mut Kernel<P>, Event<P>),
    {
        assert!(t_end >= self.now);
        let mut count = 0;
        while let Some(ev) = self.pop_until(t_end) {
            handler(self, ev);
            count += 1;
        }
        self.advance_to(t_end);
        count
    }
}

/// Seeded pseudo-random stream. Each node owns one; streams derived from the
/// same master seed with different ids are independent.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RngStream { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream
    }

    /// Uniform integer in `[lo, hi]`.
    pub fn uniform_int(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi, "uniform_int: empty range [{lo}, {hi}]");
        self.rng.random_range(lo..=hi)
    }

    /// Uniform real in `[0, 1)`.
    pub fn uniform_f64(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn exponential(&mut self, mean: f64) -> f64 {
        use rand_distr::{Distribution, Exp};
        Exp::new(1.0 / mean).expect("positive mean").sample(&mut self.rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn drain(k: &mut Kernel<&'static str>, t_end: SimTime) -> Vec<(u64, u64, &'static str)> {
        let mut log = Vec::new();
        k.run_until(t_end, |_, ev| log.push((ev.fire_at.0, ev.seq, ev.payload)));
        log
    }

    #[test]
    fn dispatches_in_time_order() {
        let mut k = Kernel::new();
        k.schedule_at(SimTime(100), 0, "late");
        k.schedule_at(SimTime(50), 0, "early");
        let log = drain(&mut k, SimTime(1_000));
        assert_eq!(log.iter().map(|e| e.0).collect::<Vec<_>>(), vec![50, 100]);
    }

    #[test]
    fn ties_break_by_seq() {
        let mut k = Kernel::new();
        for (seq, name) in [(7, "seven"), (3, "three")] {
            k.schedule(Event {
                fire_at: SimTime(100),
                seq,
                target: 0,
                payload: name,
            });
        }
        let log = drain(&mut k, SimTime(100));
        assert_eq!(log.iter().map(|e| e.1).collect::<Vec<_>>(), vec![3, 7]);
    }

    #[test]
    fn event_at_now_precedes_later_events() {
        let mut k = Kernel::new();
        k.advance_to(SimTime(10));
        k.schedule_at(SimTime(11), 0, "later");
        k.schedule_at(SimTime(10), 0, "now");
        let log = drain(&mut k, SimTime(20));
        assert_eq!(log[0].2, "now");
    }

    #[test]
    #[should_panic(expected = "in the past")]
    fn scheduling_in_the_past_aborts() {
        let mut k: Kernel<()> = Kernel::new();
        k.advance_to(SimTime(10));
        k.schedule_at(SimTime(9), 0, ());
    }

    #[test]
    fn empty_run_advances_clock() {
        let mut k: Kernel<()> = Kernel::new();
        let n = k.run_until(SimTime(1_000_000_000), |_, _| {});
        assert_eq!(n, 0);
        assert_eq!(k.now(), SimTime(1_000_000_000));
    }

    #[test]
    fn counts_only_events_up_to_horizon() {
        let mut k = Kernel::new();
        for t in [1, 2, 3, 99] {
            k.schedule_at(SimTime(t), 0, ());
        }
        assert_eq!(k.run_until(SimTime(10), |_, _| {}), 3);
        assert_eq!(k.pending(), 1);
    }

    #[test]
    fn cancelled_events_are_skipped() {
        let mut k = Kernel::new();
        let a = k.schedule_at(SimTime(5), 0, "a");
        k.schedule_at(SimTime(6), 0, "b");
        k.cancel(a);
        let log = drain(&mut k, SimTime(10));
        assert_eq!(log.len(), 1);
        assert_eq!(log[0].2, "b");
    }

    #[test]
    fn handlers_may_schedule_follow_ups() {
        let mut k = Kernel::new();
        k.schedule_at(SimTime(1), 0, 3u32);
        let mut seen = Vec::new();
        k.run_until(SimTime(100), |k, ev| {
            seen.push(ev.fire_at.0);
            if ev.payload > 0 {
                let at = k.now() + 10;
                k.schedule_at(at, 0, ev.payload - 1);
            }
        });
        assert_eq!(seen, vec![1, 11, 21, 31]);
    }

    #[test]
    fn degenerate_range() {
        let mut r = RngStream::new(1, 0);
        assert_eq!(r.uniform_int(5, 5), 5);
    }

    #[test]
    #[should_panic]
    fn inverted_range_is_fatal() {
        RngStream::new(1, 0).uniform_int(3, 2);
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let draw = |stream| {
            let mut r = RngStream::new(42, stream);
            (0..100).map(|_| r.uniform_int(0, 1_000_000)).collect::<Vec<_>>()
        };
        assert_eq!(draw(0), draw(0));
        assert_ne!(draw(0), draw(1));
    }

    #[test]
    fn uniform_frequencies() {
        // Each bucket count should sit within 5 standard errors of n/16.
        let mut r = RngStream::new(7, 3);
        let n = 100_000usize;
        let mut counts = [0usize; 16];
        for _ in 0..n {
            counts[r.uniform_int(0, 15) as usize] += 1;
        }
        let p = 1.0 / 16.0;
        let mean = n as f64 * p;
        let se = (n as f64 * p * (1.0 - p)).sqrt();
        for c in counts {
            assert!((c as f64 - mean).abs() < 5.0 * se, "count {c} vs {mean}");
        }
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - mean).powi(2) / mean)
            .sum();
        // 15 degrees of freedom, p = 0.001 critical value.
        assert!(chi2 < 37.7, "chi2 = {chi2}");
    }
}

//! DIFS + slotted random backoff, driven by channel busy/idle edges rather
//! than per-slot ticks.

use crate::kernel::SimTime;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Countdown {
    started: SimTime,
    expiry: SimTime,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Contender {
    /// Remaining backoff slots; `None` until drawn for the current attempt.
    pub backoff: Option<u32>,
    countdown: Option<Countdown>,
    /// Bumped whenever a pending expiry becomes stale.
    pub gen: u64,
    /// Current contention window (backoff is drawn from `[0, cw]`).
    pub cw: u32,
    /// Failed attempts for the frame at the head of the queue.
    pub attempts: u32,
}

impl Contender {
    pub fn new(cw: u32) -> Self {
        Contender {
            cw,
            ..Default::default()
        }
    }

    pub fn is_counting(&self) -> bool {
        self.countdown.is_some()
    }

    pub fn expiry(&self) -> Option<SimTime> {
        self.countdown.map(|c| c.expiry)
    }

    /// Starts (or resumes) sensing an idle channel. Returns the instant the
    /// backoff reaches zero.
    pub fn start(&mut self, now: SimTime, difs_us: u64, slot_us: u64) -> SimTime {
        let slots = self.backoff.expect("backoff must be drawn before counting");
        let expiry = now + difs_us + slots as u64 * slot_us;
        self.countdown = Some(Countdown { started: now, expiry });
        self.gen += 1;
        expiry
    }

    /// Stops the countdown because the channel turned busy or the attempt is
    /// no longer allowed. Slots that fully elapsed after DIFS are consumed.
    ///
    /// A countdown that reaches zero at `now` is left running: stations whose
    /// backoff ends in the same slot transmit together.
    pub fn freeze(&mut self, now: SimTime, difs_us: u64, slot_us: u64) {
        let Some(cd) = self.countdown else { return };
        if now >= cd.expiry {
            return;
        }
        let sensing_end = cd.started + difs_us;
        if now > sensing_end {
            let elapsed = (now.since(sensing_end) / slot_us) as u32;
            let left = self.backoff.expect("counting implies drawn backoff");
            self.backoff = Some(left.saturating_sub(elapsed));
        }
        self.countdown = None;
        self.gen += 1;
    }

    /// Called when the countdown's expiry event fires.
    pub fn expire(&mut self) {
        self.countdown = None;
        self.backoff = Some(0);
    }

    /// Forgets the current attempt state; the next attempt redraws.
    pub fn abandon(&mut self) {
        self.countdown = None;
        self.backoff = None;
        self.gen += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SLOT: u64 = 20;

    #[test]
    fn zero_backoff_fires_after_difs() {
        let mut c = Contender::new(15);
        c.backoff = Some(0);
        assert_eq!(c.start(SimTime(1_000), 8 * SLOT, SLOT), SimTime(1_160));
    }

    #[test]
    fn freeze_during_difs_keeps_backoff() {
        let mut c = Contender::new(15);
        c.backoff = Some(5);
        c.start(SimTime(0), 160, SLOT);
        c.freeze(SimTime(100), 160, SLOT);
        assert_eq!(c.backoff, Some(5));
        assert!(!c.is_counting());
    }

    #[test]
    fn freeze_consumes_whole_slots() {
        let mut c = Contender::new(15);
        c.backoff = Some(5);
        c.start(SimTime(0), 160, SLOT);
        // 160 + 2.5 slots
        c.freeze(SimTime(210), 160, SLOT);
        assert_eq!(c.backoff, Some(3));
        let exp = c.start(SimTime(1_000), 160, SLOT);
        assert_eq!(exp, SimTime(1_000 + 160 + 60));
    }

    #[test]
    fn freeze_at_expiry_does_not_stop() {
        let mut c = Contender::new(15);
        c.backoff = Some(2);
        let exp = c.start(SimTime(0), 160, SLOT);
        let g = c.gen;
        c.freeze(exp, 160, SLOT);
        assert!(c.is_counting());
        assert_eq!(c.gen, g);
    }
}

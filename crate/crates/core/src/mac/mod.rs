//! Baseline duty-cycled MAC building blocks: frames, schedules, the radio
//! channel and the contention state machine.

mod channel;
mod contention;
mod frame;
mod schedule;

pub use channel::ChannelModel;
pub use contention::Contender;
pub use frame::{Frame, FrameKind, SyncInfo, TrafficClass};
pub use schedule::{ActivePlan, Schedule, WakeView};
pub(crate) use schedule::cycle_start;

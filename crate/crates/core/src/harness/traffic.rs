//! Per-source application traffic.

use crate::kernel::{NodeId, RngStream, SimTime};
use crate::mac::TrafficClass;
use crate::net::PacketSpec;

/// Traffic streams live above the per-node MAC streams.
const STREAM_BASE: u64 = 1 << 32;

/// How class-I packets arrive. Class II is always periodic.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Arrivals {
    #[default]
    Poisson,
    Periodic,
}

impl Arrivals {
    pub fn name(self) -> &'static str {
        match self {
            Arrivals::Poisson => "poisson",
            Arrivals::Periodic => "periodic",
        }
    }
}

impl std::str::FromStr for Arrivals {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "poisson" => Ok(Arrivals::Poisson),
            "periodic" => Ok(Arrivals::Periodic),
            _ => Err(format!("expected poisson or periodic, got `{s}`")),
        }
    }
}

/// Class II is strictly periodic with a random phase; class I follows
/// `class1` with the same mean gap. Packets fall in `[start, end)`.
pub fn generate(
    seed: u64,
    sources: &[NodeId],
    period_us: f64,
    class1: Arrivals,
    start: SimTime,
    end: SimTime,
) -> Vec<PacketSpec> {
    assert!(period_us > 0.0, "traffic period must be positive");
    let mut out = Vec::new();
    for &node in sources {
        let mut rng = RngStream::new(seed, STREAM_BASE + 2 * node as u64);
        let mut t = start.as_micros() as f64 + rng.uniform_f64() * period_us;
        while (t as u64) < end.as_micros() {
            out.push((SimTime(t as u64), node, TrafficClass::ClassII));
            t += period_us;
        }

        let mut rng = RngStream::new(seed, STREAM_BASE + 2 * node as u64 + 1);
        let gap = |rng: &mut RngStream| match class1 {
            Arrivals::Poisson => rng.exponential(period_us),
            Arrivals::Periodic => period_us,
        };
        let first = match class1 {
            Arrivals::Poisson => gap(&mut rng),
            Arrivals::Periodic => rng.uniform_f64() * period_us,
        };
        let mut t = start.as_micros() as f64 + first;
        while (t as u64) < end.as_micros() {
            out.push((SimTime(t as u64), node, TrafficClass::ClassI));
            t += gap(&mut rng);
        }
    }
    out.sort_by_key(|&(t, node, class)| (t, node, class));
    out.into_iter()
        .enumerate()
        .map(|(i, (time, origin, class))| PacketSpec {
            id: i as u64,
            origin,
            class,
            time,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(p: &[PacketSpec], class: TrafficClass) -> usize {
        p.iter().filter(|x| x.class == class).count()
    }

    #[test]
    fn periodic_count_is_exact() {
        let sources: Vec<NodeId> = (1..=8).collect();
        let p = generate(3, &sources, 10e6, Arrivals::Poisson, SimTime::ZERO, SimTime::from_secs(100));
        assert_eq!(count(&p, TrafficClass::ClassII), 80);
        // 80 expected, sd about 9
        let c1 = count(&p, TrafficClass::ClassI) as f64;
        assert!((c1 - 80.0).abs() <= 3.0 * 80f64.sqrt(), "{c1}");
        assert!(p.iter().all(|x| x.origin != 0));
    }

    #[test]
    fn periodic_class_one_matches_class_two_count() {
        let sources: Vec<NodeId> = (1..=8).collect();
        let p = generate(3, &sources, 10e6, Arrivals::Periodic, SimTime::ZERO, SimTime::from_secs(100));
        assert_eq!(count(&p, TrafficClass::ClassI), 80);
        assert_eq!(count(&p, TrafficClass::ClassII), 80);
        assert_eq!("periodic".parse::<Arrivals>(), Ok(Arrivals::Periodic));
        assert!("bursty".parse::<Arrivals>().is_err());
    }

    #[test]
    fn ids_follow_time_order() {
        let p = generate(9, &[1, 2, 3], 2e6, Arrivals::Poisson, SimTime::from_secs(5), SimTime::from_secs(60));
        for w in p.windows(2) {
            assert!(w[0].time <= w[1].time);
            assert_eq!(w[0].id + 1, w[1].id);
        }
        assert!(p.iter().all(|x| x.time >= SimTime::from_secs(5) && x.time < SimTime::from_secs(60)));
        assert_eq!(p, generate(9, &[1, 2, 3], 2e6, Arrivals::Poisson, SimTime::from_secs(5), SimTime::from_secs(60)));
    }

    #[test]
    fn class_ratio_is_even_over_many_sources() {
        let sources: Vec<NodeId> = (1..50).collect();
        let p = generate(1, &sources, 10e6, Arrivals::Poisson, SimTime::ZERO, SimTime::from_secs(1000));
        let r = count(&p, TrafficClass::ClassI) as f64 / count(&p, TrafficClass::ClassII) as f64;
        assert!((r - 1.0).abs() < 0.05, "{r}");
    }
}

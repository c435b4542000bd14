//! Single-packet traces through the network model.

use qosmac::adapt::Scheme;
use qosmac::harness::{self, export, metrics, traffic, RunConfig, ScenarioChoice, TopologySpec};
use qosmac::kernel::{NodeId, SimTime};
use qosmac::mac::TrafficClass;
use qosmac::net::{DropCause, NetParams, Network, PacketSpec, TxRecord};

const SLOT: u64 = 20;
const DATA_AIR: u64 = 44_000;
const ACK_AIR: u64 = 4_000;
const SYNC_AIR: u64 = 6_400;
const SIFS: u64 = 10;

/// Nodes on the x axis, 100 m apart, each routing to its left neighbour.
fn line(n: usize) -> TopologySpec {
    TopologySpec {
        positions: (0..n).map(|i| (100.0 * i as f64, 0.0)).collect(),
        comm_range: 150.0,
        sink: 0,
        routes: (0..n).map(|i| i.checked_sub(1)).collect(),
        phases: vec![Some(0); n],
    }
}

fn params(scheme: Scheme) -> NetParams {
    NetParams {
        scheme,
        ..NetParams::default()
    }
}

fn packet(id: u64, origin: NodeId, class: TrafficClass, t_us: u64) -> PacketSpec {
    PacketSpec {
        id,
        origin,
        class,
        time: SimTime(t_us),
    }
}

fn run(topo: &TopologySpec, scheme: Scheme, seed: u64, packets: &[PacketSpec], until_s: u64) -> Network {
    let mut net = Network::new(params(scheme), topo, seed);
    net.add_traffic(packets);
    net.run_until(SimTime::from_secs(until_s));
    net
}

fn first_tx(net: &Network, node: NodeId) -> TxRecord {
    *net.log.transmissions.iter().find(|t| t.node == node).expect("node transmitted")
}

fn draw_before(net: &Network, node: NodeId, t: SimTime) -> u32 {
    net.log
        .backoffs
        .iter()
        .rev()
        .find(|b| b.node == node && b.class.is_some() && b.time <= t)
        .expect("a data backoff was drawn")
        .value
}

#[test]
fn awake_pair_waits_difs_plus_backoff() {
    let topo = line(2);
    let mut zero_seen = false;
    for seed in 1..400 {
        let net = run(&topo, Scheme::Difs, seed, &[packet(0, 1, TrafficClass::ClassI, 10_100_000)], 12);
        let tx = first_tx(&net, 1);
        let b = draw_before(&net, 1, tx.time) as u64;
        assert_eq!(tx.dss_us(), 0);
        assert_eq!(tx.time.since(tx.carrier_sense_start), (8 + b) * SLOT);
        let d = net.log.deliveries[0];
        assert_eq!(d.delay_us(), (8 + b) * SLOT + DATA_AIR);
        if b == 0 {
            zero_seen = true;
            assert_eq!(tx.time, SimTime(10_100_000 + 160));
        }
    }
    assert!(zero_seen, "no seed drew a zero backoff");
}

#[test]
fn sleeping_receiver_sets_the_dss_wait() {
    let topo = line(2);
    for seed in 1..20 {
        let net = run(&topo, Scheme::Baseline, seed, &[packet(0, 1, TrafficClass::ClassII, 10_800_000)], 13);
        let tx = first_tx(&net, 1);
        assert!(tx.dss_us().abs_diff(200_000) <= SLOT, "dss {}", tx.dss_us());
        assert_eq!(net.log.deliveries.len(), 1);
    }
}

#[test]
fn equal_draws_collide_and_double_the_window() {
    let topo = TopologySpec {
        positions: vec![(0.0, 0.0), (100.0, 0.0), (0.0, 100.0)],
        comm_range: 150.0,
        sink: 0,
        routes: vec![None, Some(0), Some(0)],
        phases: vec![Some(0); 3],
    };
    let packets = [
        packet(0, 1, TrafficClass::ClassI, 10_100_000),
        packet(1, 2, TrafficClass::ClassI, 10_100_000),
    ];
    let mut found = false;
    for seed in 1..500 {
        let net = run(&topo, Scheme::Baseline, seed, &packets, 14);
        let (a, b) = (first_tx(&net, 1), first_tx(&net, 2));
        if a.time != b.time {
            continue;
        }
        found = true;
        assert!(net.log.collisions > 0);
        // neither copy reached the sink on the first attempt
        assert!(net.log.deliveries.iter().all(|d| d.sink_time > a.time + DATA_AIR));
        for node in [1, 2] {
            let retry = net
                .log
                .transmissions
                .iter()
                .find(|t| t.node == node && t.attempt == 1)
                .expect("a retry follows the collision");
            let cw = net
                .log
                .backoffs
                .iter()
                .rev()
                .find(|d| d.node == node && d.class.is_some() && d.time <= retry.time)
                .unwrap()
                .cw;
            assert_eq!(cw, 63);
        }
        assert_eq!(net.log.deliveries.len(), 2);
        break;
    }
    assert!(found, "no seed produced equal draws");
}

#[test]
fn full_queue_drops_the_newest() {
    let topo = line(2);
    let packets: Vec<PacketSpec> = (0..51).map(|i| packet(i, 1, TrafficClass::ClassII, 10_500_000)).collect();
    let mut net = Network::new(params(Scheme::Baseline), &topo, 1);
    net.add_traffic(&packets);
    net.run_until(SimTime(10_600_000));
    assert_eq!(net.log.drops.len(), 1);
    assert_eq!(net.log.drops[0].cause, DropCause::QueueOverflow);
    assert_eq!(net.log.drops[0].packet, 50);
    assert_eq!(net.queued_packets().len(), 50);
}

#[test]
fn quiet_window_ledger_holds_one_sync() {
    let topo = TopologySpec {
        positions: vec![(0.0, 0.0)],
        comm_range: 150.0,
        sink: 0,
        routes: vec![None],
        phases: vec![Some(0)],
    };
    let net = run(&topo, Scheme::Baseline, 3, &[], 100);
    // the first window after discovery is short and carries no SYNC
    let ledgers: Vec<_> = net.log.ledgers.iter().filter(|l| l.time > SimTime::from_secs(20)).collect();
    assert!(ledgers.len() >= 7);
    for l in ledgers {
        assert_eq!(l.ttx, SYNC_AIR);
        assert_eq!(l.trx, 0);
        assert_eq!(l.trx + l.ttx + l.tidle, l.awake);
        // ten 300 ms windows give or take the SYNC backoffs
        assert!(l.awake.abs_diff(3_000_000) <= 2 * 35 * SLOT, "{}", l.awake);
    }
    assert!(net.log.violations.is_empty());
}

#[test]
fn bridging_node_follows_both_schedules() {
    let cfg = RunConfig {
        scenario: ScenarioChoice::Chain3,
        duration_s: 60,
        ..RunConfig::default()
    };
    let topo = harness::build_topology(&cfg).unwrap();
    let mut net = Network::new(cfg.net.clone(), &topo, 1);
    net.run_until(SimTime::from_secs(40));
    let mut phases = net.schedule_phases(1);
    phases.sort();
    assert_eq!(phases, vec![0, 500_000]);
    // the sink only ever hears the bridge's secondary SYNCs
    assert_eq!(net.schedule_phases(0), vec![0]);
    assert!(net.schedule_phases(2).contains(&500_000));
    let view = net.own_view(1);
    for ms in (0..1000).step_by(50) {
        let t = SimTime::from_secs(30) + ms * 1000;
        let expect = ms < 300 || (500..800).contains(&ms);
        assert_eq!(view.awake_at(t), expect, "at {ms} ms");
    }
    let windows: Vec<_> = net.log.ledgers.iter().filter(|l| l.node == 1 && l.time > SimTime::from_secs(20)).collect();
    assert!(!windows.is_empty());
    for l in windows {
        // two disjoint 30 % windows over ten cycles
        assert!(l.awake.abs_diff(6_000_000) <= 100_000, "{}", l.awake);
    }
}

#[test]
fn star_hub_counts_one_declarer() {
    let cfg = RunConfig {
        scenario: ScenarioChoice::Star,
        duration_s: 100,
        net: params(Scheme::XlNextHop),
        ..RunConfig::default()
    };
    let out = harness::run(&cfg).unwrap();
    let max_n = |node: NodeId| {
        out.log
            .adaptations
            .iter()
            .filter(|a| a.node == node)
            .filter_map(|a| a.n_next_hop)
            .max()
            .unwrap()
    };
    assert_eq!(max_n(1), 1);
    assert_eq!(max_n(0), 3);
}

#[test]
fn two_hops_without_contention() {
    let topo = line(3);
    for seed in 1..30 {
        let net = run(&topo, Scheme::Baseline, seed, &[packet(0, 2, TrafficClass::ClassI, 10_100_000)], 12);
        let t1 = first_tx(&net, 2);
        let t2 = first_tx(&net, 1);
        let (b1, b2) = (draw_before(&net, 2, t1.time) as u64, draw_before(&net, 1, t2.time) as u64);
        let difs = 10 * SLOT;
        let d = net.log.deliveries[0].delay_us();
        assert_eq!(d, 2 * (difs + DATA_AIR) + SIFS + ACK_AIR + (b1 + b2) * SLOT);
        let approx = 2 * (difs + DATA_AIR);
        assert!((d as f64 - approx as f64).abs() / (approx as f64) < 0.1);
    }
}

#[test]
fn same_config_same_bytes() {
    let cfg = RunConfig {
        duration_s: 60,
        net: params(Scheme::All),
        ..RunConfig::default()
    };
    let a = harness::run(&cfg).unwrap();
    let b = harness::run(&cfg).unwrap();
    assert_eq!(a.trace_digest, b.trace_digest);
    assert_eq!(export::deliveries_csv(&a), export::deliveries_csv(&b));
    assert_eq!(export::adaptations_csv(&a), export::adaptations_csv(&b));
    assert_eq!(export::summary_csv(&a), export::summary_csv(&b));
    let c = harness::run(&RunConfig { seed: 2, ..cfg }).unwrap();
    assert_ne!(a.trace_digest, c.trace_digest);
}

#[test]
fn written_outputs_match_their_schema() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        duration_s: 40,
        net: params(Scheme::Dc),
        ..RunConfig::default()
    };
    let out = harness::run(&cfg).unwrap();
    harness::write_outputs(&out, dir.path()).unwrap();
    let read = |f: &str| std::fs::read_to_string(dir.path().join(f)).unwrap();
    let deliveries = read("deliveries.csv");
    assert_eq!(deliveries.lines().next().unwrap(), export::DELIVERIES_HEADER);
    assert_eq!(deliveries.lines().count() as u64, out.summary.delivered_total() + 1);
    assert_eq!(read("adaptations.csv").lines().next().unwrap(), export::ADAPTATIONS_HEADER);
    assert!(read("cumulative_delay.svg").contains("<polyline"));
    let mut back = RunConfig::default();
    back.apply_text(&read("run.cfg")).unwrap();
    assert_eq!(back, cfg);
    let first = deliveries;
    harness::write_outputs(&out, dir.path()).unwrap();
    assert_eq!(read("deliveries.csv"), first);
}

#[test]
fn unwritable_directory_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("plain");
    std::fs::write(&file, "x").unwrap();
    let out = harness::run(&RunConfig {
        duration_s: 5,
        ..RunConfig::default()
    })
    .unwrap();
    let err = harness::write_outputs(&out, &file.join("sub")).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

/// Each seed runs twice, the second time with the class labels swapped, so
/// both classes see the same arrival patterns overall.
#[test]
fn baseline_treats_classes_alike() {
    for scenario in [ScenarioChoice::Grid1, ScenarioChoice::Grid2] {
        let mut sums = [0.0; 2];
        for seed in 1..=5 {
            let cfg = RunConfig {
                scenario: scenario.clone(),
                seed,
                ..RunConfig::default()
            };
            let topo = harness::build_topology(&cfg).unwrap();
            let sources = harness::traffic_sources(&cfg, &topo).unwrap();
            for swap in [false, true] {
                let mut net = Network::new(cfg.net.clone(), &topo, seed);
                let start = net.traffic_start();
                let end = start + cfg.duration_s * 1_000_000;
                let mut packets = traffic::generate(seed, &sources, cfg.traffic_period() * 1e6, cfg.class1_arrivals, start, end);
                if swap {
                    for p in &mut packets {
                        p.class = match p.class {
                            TrafficClass::ClassI => TrafficClass::ClassII,
                            TrafficClass::ClassII => TrafficClass::ClassI,
                        };
                    }
                }
                net.add_traffic(&packets);
                net.run_until(end);
                let summary = metrics::finalize(&net.log, &net.queued_packets());
                for c in TrafficClass::BOTH {
                    sums[c.index()] += summary.class(c).avg_delay_us.unwrap();
                }
            }
        }
        let gap = (sums[0] / sums[1] - 1.0).abs();
        assert!(gap < 0.10, "{}: class I vs II {:.1}%", scenario.name(), gap * 100.0);
    }
}

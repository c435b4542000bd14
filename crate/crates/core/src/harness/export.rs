//! CSV files written for every run.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use super::metrics::ordered_deliveries;
use super::plot;
use super::RunOutcome;

pub const DELIVERIES_HEADER: &str =
    "arrival_index,class,origin_node,origin_time_us,sink_time_us,delay_us,cumulative_delay_us";
pub const ADAPTATIONS_HEADER: &str =
    "time_us,node,scheme,parameter,old_value,new_value,trigger_D_us,trigger_S_us,U,rho,N_next_hop";
pub const LINKS_HEADER: &str = "time_us,src,dst,s_link_avg_us,lc_overall";
pub const ROUTES_HEADER: &str = "time_us,node,next_hop";
pub const LEDGER_HEADER: &str = "time_us,node,trx_us,ttx_us,tidle_us,awake_us,U,duty_cycle_pct";

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn deliveries_csv(run: &RunOutcome) -> String {
    let mut s = String::from(DELIVERIES_HEADER);
    s.push('\n');
    let mut index = [0u64; 2];
    let mut cum = [0u64; 2];
    for d in ordered_deliveries(&run.log) {
        let c = d.class.index();
        index[c] += 1;
        cum[c] += d.delay_us();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            index[c],
            d.class.label(),
            d.origin_node,
            d.origin_time.as_micros(),
            d.sink_time.as_micros(),
            d.delay_us(),
            cum[c]
        );
    }
    s
}

pub fn adaptations_csv(run: &RunOutcome) -> String {
    let mut s = String::from(ADAPTATIONS_HEADER);
    s.push('\n');
    for a in &run.log.adaptations {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{}",
            a.time.as_micros(),
            a.node,
            a.scheme.name(),
            a.parameter,
            a.old_value,
            a.new_value,
            opt(a.trigger_d_us),
            opt(a.trigger_s_us),
            opt(a.utilization),
            opt(a.rho),
            opt(a.n_next_hop)
        );
    }
    s
}

pub fn links_csv(run: &RunOutcome) -> String {
    let mut s = String::from(LINKS_HEADER);
    s.push('\n');
    for l in &run.log.links {
        let _ = writeln!(s, "{},{},{},{},{}", l.time.as_micros(), l.src, l.dst, opt(l.s_link_avg_us), l.lc_overall);
    }
    s
}

pub fn routes_csv(run: &RunOutcome) -> String {
    let mut s = String::from(ROUTES_HEADER);
    s.push('\n');
    for r in &run.log.routes {
        let _ = writeln!(s, "{},{},{}", r.time.as_micros(), r.node, opt(r.next_hop));
    }
    s
}

pub fn ledger_csv(run: &RunOutcome) -> String {
    let mut s = String::from(LEDGER_HEADER);
    s.push('\n');
    for l in &run.log.ledgers {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            l.time.as_micros(),
            l.node,
            l.trx,
            l.ttx,
            l.tidle,
            l.awake,
            l.utilization,
            l.duty_cycle_pct
        );
    }
    s
}

/// `key,value` pairs; the order is fixed.
pub fn summary_pairs(run: &RunOutcome) -> Vec<(String, String)> {
    let sm = &run.summary;
    let mut v: Vec<(String, String)> = vec![
        ("scenario".into(), run.config.scenario.name()),
        ("scheme".into(), run.config.net.scheme.name().into()),
        ("seed".into(), run.config.seed.to_string()),
    ];
    for class in crate::mac::TrafficClass::BOTH {
        let c = sm.class(class);
        let l = class.label();
        v.push((format!("generated_{l}"), c.generated.to_string()));
        v.push((format!("delivered_{l}"), c.delivered.to_string()));
        v.push((format!("dropped_{l}"), c.dropped.to_string()));
        v.push((format!("in_flight_{l}"), c.in_flight.to_string()));
        v.push((format!("avg_delay_us_{l}"), opt(c.avg_delay_us)));
    }
    for (cause, n) in &sm.drops_by_cause {
        v.push((format!("drops_{cause}"), n.to_string()));
    }
    v.push(("lost".into(), sm.lost.to_string()));
    v.push(("conserved".into(), sm.conserved().to_string()));
    v.push(("violations".into(), run.log.violations.len().to_string()));
    v.push(("sync_mismatches".into(), run.log.sync_mismatches.len().to_string()));
    v.push(("collisions".into(), run.log.collisions.to_string()));
    v.push(("events".into(), run.dispatched.to_string()));
    v.push(("trace_digest".into(), format!("{:016x}", run.trace_digest)));
    v
}

pub fn summary_csv(run: &RunOutcome) -> String {
    let mut s = String::from("key,value\n");
    for (k, v) in summary_pairs(run) {
        let _ = writeln!(s, "{k},{v}");
    }
    s
}

/// Writes every output file into `dir`, creating it if needed.
pub fn write_all(run: &RunOutcome, dir: &Path) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("run.cfg"), run.config.to_text())?;
    fs::write(dir.join("deliveries.csv"), deliveries_csv(run))?;
    fs::write(dir.join("adaptations.csv"), adaptations_csv(run))?;
    fs::write(dir.join("links.csv"), links_csv(run))?;
    fs::write(dir.join("routes.csv"), routes_csv(run))?;
    fs::write(dir.join("ledger.csv"), ledger_csv(run))?;
    fs::write(dir.join("summary.csv"), summary_csv(run))?;
    let series = plot::Series::from_run(run);
    fs::write(dir.join("cumulative_delay.svg"), plot::render(&series))?;
    Ok(())
}

/// Reads a `key,value` summary back.
pub fn read_summary(text: &str) -> Vec<(String, String)> {
    text.lines()
        .skip(1)
        .filter_map(|l| l.split_once(','))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

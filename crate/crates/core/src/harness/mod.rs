//! Scenarios, traffic, metrics and output files around the network model.

pub mod compare;
pub mod config;
pub mod export;
pub mod metrics;
pub mod plot;
pub mod scenario;
pub mod traffic;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::kernel::{NodeId, SimTime};
use crate::net::{Network, RunLog};

pub use config::{RunConfig, ScenarioChoice};
pub use metrics::Summary;
pub use scenario::{ClusterLayout, TopologySpec};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("bad value `{value}` for `{key}`: {reason}")]
    BadValue { key: String, value: String, reason: String },
    #[error("config syntax: {0}")]
    Syntax(String),
    #[error("topology: {0}")]
    Topology(String),
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("runs are not comparable: {}", .0.join("; "))]
    Mismatch(Vec<String>),
}

impl HarnessError {
    pub fn io(path: impl AsRef<Path>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.as_ref().to_path_buf(),
            source,
        }
    }

    /// 1 for anything wrong with the inputs, 2 for file system trouble.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Mismatch(_) => 1,
            HarnessError::Io { .. } => 2,
        }
    }
}

pub struct RunOutcome {
    pub config: RunConfig,
    pub topology: TopologySpec,
    pub summary: Summary,
    pub log: RunLog,
    pub trace_digest: u64,
    pub dispatched: u64,
    pub end: SimTime,
}

pub fn build_topology(cfg: &RunConfig) -> Result<TopologySpec, HarnessError> {
    let period = cfg.net.period_us;
    let topo = match &cfg.scenario {
        ScenarioChoice::Grid1 => scenario::build_scenario_1(cfg.layout, period),
        ScenarioChoice::Grid2 => scenario::build_scenario_2(cfg.layout, period),
        ScenarioChoice::TwoPath => scenario::two_path(period),
        ScenarioChoice::Chain3 => scenario::chain3(period),
        ScenarioChoice::Star => scenario::star(period),
        ScenarioChoice::File(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| HarnessError::io(p, e))?;
            scenario::parse_topology(&text)?
        }
    };
    topo.validate()?;
    Ok(topo)
}

/// Nodes that emit traffic: the configured list, or every non-sink node that
/// can reach the sink.
pub fn traffic_sources(cfg: &RunConfig, topo: &TopologySpec) -> Result<Vec<NodeId>, ConfigError> {
    let cut = topo.disconnected();
    match &cfg.sources {
        None => Ok((0..topo.len()).filter(|v| *v != topo.sink && !cut.contains(v)).collect()),
        Some(list) => {
            for &v in list {
                if v >= topo.len() || v == topo.sink || cut.contains(&v) {
                    return Err(ConfigError::BadValue {
                        key: "sources".into(),
                        value: v.to_string(),
                        reason: "not a connected non-sink node".into(),
                    });
                }
            }
            Ok(list.clone())
        }
    }
}

/// Builds, runs and summarises one simulation. `tweak` may schedule extra
/// events before the run starts.
pub fn run_with(cfg: &RunConfig, tweak: impl FnOnce(&mut Network)) -> Result<RunOutcome, HarnessError> {
    cfg.validate()?;
    let topo = build_topology(cfg)?;
    let sources = traffic_sources(cfg, &topo)?;
    let mut net = Network::new(cfg.net.clone(), &topo, cfg.seed);
    let start = net.traffic_start();
    let end = start + cfg.duration_s * 1_000_000;
    let packets = traffic::generate(cfg.seed, &sources, cfg.traffic_period() * 1e6, cfg.class1_arrivals, start, end);
    net.add_traffic(&packets);
    tweak(&mut net);
    net.run_until(end);
    let queued = net.queued_packets();
    let summary = metrics::finalize(&net.log, &queued);
    Ok(RunOutcome {
        config: cfg.clone(),
        topology: topo,
        summary,
        trace_digest: net.trace_digest(),
        dispatched: net.dispatched(),
        end,
        log: std::mem::take(&mut net.log),
    })
}

pub fn run(cfg: &RunConfig) -> Result<RunOutcome, HarnessError> {
    run_with(cfg, |_| {})
}

pub fn write_outputs(run: &RunOutcome, dir: &Path) -> Result<(), HarnessError> {
    export::write_all(run, dir).map_err(|e| HarnessError::io(dir, e))
}

//! Flat `key=value` run configuration.

use std::path::PathBuf;

use crate::kernel::NodeId;
use crate::net::NetParams;

use super::scenario::ClusterLayout;
use super::traffic::Arrivals;
use super::ConfigError;

#[derive(Clone, Debug, PartialEq)]
pub enum ScenarioChoice {
    Grid1,
    Grid2,
    TwoPath,
    Chain3,
    Star,
    File(PathBuf),
}

impl ScenarioChoice {
    pub fn parse(s: &str) -> Result<Self, String> {
        match s {
            "grid1" => Ok(ScenarioChoice::Grid1),
            "grid2" => Ok(ScenarioChoice::Grid2),
            "two-path" => Ok(ScenarioChoice::TwoPath),
            "chain3" => Ok(ScenarioChoice::Chain3),
            "star" => Ok(ScenarioChoice::Star),
            _ => match s.strip_prefix("file=") {
                Some(p) if !p.is_empty() => Ok(ScenarioChoice::File(PathBuf::from(p))),
                _ => Err(format!("unknown scenario `{s}`")),
            },
        }
    }

    pub fn name(&self) -> String {
        match self {
            ScenarioChoice::Grid1 => "grid1".into(),
            ScenarioChoice::Grid2 => "grid2".into(),
            ScenarioChoice::TwoPath => "two-path".into(),
            ScenarioChoice::Chain3 => "chain3".into(),
            ScenarioChoice::Star => "star".into(),
            ScenarioChoice::File(p) => format!("file={}", p.display()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub scenario: ScenarioChoice,
    pub layout: ClusterLayout,
    pub seed: u64,
    /// Seconds of traffic after the discovery phase.
    pub duration_s: u64,
    /// Mean gap between packets of one class at one source, seconds.
    /// `None` picks the scenario's default.
    pub traffic_period_s: Option<f64>,
    pub class1_arrivals: Arrivals,
    /// Traffic sources; `None` means every connected non-sink node.
    pub sources: Option<Vec<NodeId>>,
    pub out: Option<PathBuf>,
    pub net: NetParams,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            scenario: ScenarioChoice::Grid1,
            layout: ClusterLayout::Single,
            seed: 1,
            duration_s: 500,
            traffic_period_s: None,
            class1_arrivals: Arrivals::Poisson,
            sources: None,
            out: None,
            net: NetParams::default(),
        }
    }
}

fn bad(key: &str, value: &str, reason: impl ToString) -> ConfigError {
    ConfigError::BadValue {
        key: key.to_string(),
        value: value.to_string(),
        reason: reason.to_string(),
    }
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.trim().parse::<T>().map_err(|e| bad(key, value, e))
}

fn real(key: &str, value: &str) -> Result<f64, ConfigError> {
    let x: f64 = num(key, value)?;
    if !x.is_finite() {
        return Err(bad(key, value, "not a finite number"));
    }
    Ok(x)
}

impl RunConfig {
    pub const KEYS: &'static [&'static str] = &[
        "scenario",
        "scheme",
        "layout",
        "seed",
        "duration",
        "traffic_period",
        "class_I_arrivals",
        "sources",
        "out",
        "period_us",
        "dc_default",
        "dc_min",
        "dc_max",
        "dc_thresh",
        "u_min",
        "rho_min",
        "slot_us",
        "sifs_us",
        "bitrate",
        "payload_bytes",
        "header_bytes",
        "ack_bytes",
        "sync_bytes",
        "sync_period",
        "retry_limit",
        "queue_capacity",
        "difs_slots",
        "difs_I",
        "difs_II",
        "cw_min",
        "cw_max",
        "sync_cw",
        "cw_I_min",
        "cw_I_max",
        "cw_I_max_max",
        "cw_II_min",
        "cw_II_max",
        "eta",
        "zeta",
        "beta",
        "alpha_I",
        "cw_thresh",
        "D_I_ms",
        "S_I_ms",
        "n_min_next_hop",
        "lc_ori",
        "discovery_cycles",
        "cs_range_factor",
        "dc_lead_cycles",
    ];

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let v = value.trim();
        let n = &mut self.net;
        match key {
            "scenario" => self.scenario = ScenarioChoice::parse(v).map_err(|e| bad(key, v, e))?,
            "scheme" => n.scheme = v.parse().map_err(|e| bad(key, v, e))?,
            "layout" => self.layout = v.parse().map_err(|e| bad(key, v, e))?,
            "seed" => self.seed = num(key, v)?,
            "duration" => self.duration_s = num(key, v)?,
            "traffic_period" => {
                self.traffic_period_s = if v == "auto" { None } else { Some(real(key, v)?) }
            }
            "class_I_arrivals" => self.class1_arrivals = v.parse().map_err(|e| bad(key, v, e))?,
            "sources" => {
                self.sources = if v == "all" {
                    None
                } else {
                    Some(
                        v.split(',')
                            .map(|s| num::<NodeId>(key, s))
                            .collect::<Result<Vec<_>, _>>()?,
                    )
                }
            }
            "out" => self.out = if v.is_empty() { None } else { Some(PathBuf::from(v)) },
            "period_us" => n.period_us = num(key, v)?,
            "dc_default" => n.dc_default_pct = real(key, v)?,
            "dc_min" => n.dc_min_pct = real(key, v)?,
            "dc_max" => n.dc_max_pct = real(key, v)?,
            "dc_thresh" => n.dc_thresh = real(key, v)?,
            "u_min" => n.u_min = real(key, v)?,
            "rho_min" => n.rho_min = real(key, v)?,
            "slot_us" => n.slot_us = num(key, v)?,
            "sifs_us" => n.sifs_us = num(key, v)?,
            "bitrate" => n.bitrate_bps = num(key, v)?,
            "payload_bytes" => n.payload_bytes = num(key, v)?,
            "header_bytes" => n.header_bytes = num(key, v)?,
            "ack_bytes" => n.ack_bytes = num(key, v)?,
            "sync_bytes" => n.sync_bytes = num(key, v)?,
            "sync_period" => n.sync_period = num(key, v)?,
            "retry_limit" => n.retry_limit = num(key, v)?,
            "queue_capacity" => n.queue_capacity = num(key, v)?,
            "difs_slots" => n.difs_slots = num(key, v)?,
            "difs_I" => n.difs_class1_slots = num(key, v)?,
            "difs_II" => n.difs_class2_slots = num(key, v)?,
            "cw_min" => n.cw_min = num(key, v)?,
            "cw_max" => n.cw_max = num(key, v)?,
            "sync_cw" => n.sync_cw = num(key, v)?,
            "cw_I_min" => n.cw1_min = num(key, v)?,
            "cw_I_max" => n.cw1_max = num(key, v)?,
            "cw_I_max_max" => n.cw1_max_max = num(key, v)?,
            "cw_II_min" => n.cw2_min = num(key, v)?,
            "cw_II_max" => n.cw2_max = num(key, v)?,
            "eta" => n.eta = real(key, v)?,
            "zeta" => n.zeta = real(key, v)?,
            "beta" => n.beta = real(key, v)?,
            "alpha_I" => n.alpha_i = real(key, v)?,
            "cw_thresh" => n.cw_thresh = num(key, v)?,
            "D_I_ms" => n.d_i_us = real(key, v)? * 1_000.0,
            "S_I_ms" => n.s_i_us = real(key, v)? * 1_000.0,
            "n_min_next_hop" => n.n_min_next_hop = num(key, v)?,
            "lc_ori" => n.lc_ori = real(key, v)?,
            "discovery_cycles" => n.discovery_cycles = num(key, v)?,
            "cs_range_factor" => n.cs_range_factor = real(key, v)?,
            "dc_lead_cycles" => n.dc_lead_cycles = num(key, v)?,
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// Applies `key=value` lines; blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::Syntax(format!("line {}: expected key=value", i + 1)))?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn apply_override(&mut self, kv: &str) -> Result<(), ConfigError> {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| ConfigError::Syntax(format!("`{kv}`: expected KEY=VALUE")))?;
        self.set(k.trim(), v)
    }

    pub fn get(&self, key: &str) -> Option<String> {
        let n = &self.net;
        Some(match key {
            "scenario" => self.scenario.name(),
            "scheme" => n.scheme.name().to_string(),
            "layout" => self.layout.name().to_string(),
            "seed" => self.seed.to_string(),
            "duration" => self.duration_s.to_string(),
            "traffic_period" => self.traffic_period_s.map_or("auto".to_string(), |p| p.to_string()),
            "class_I_arrivals" => self.class1_arrivals.name().to_string(),
            "sources" => match &self.sources {
                None => "all".to_string(),
                Some(v) => v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
            },
            "out" => self.out.as_ref().map(|p| p.display().to_string()).unwrap_or_default(),
            "period_us" => n.period_us.to_string(),
            "dc_default" => n.dc_default_pct.to_string(),
            "dc_min" => n.dc_min_pct.to_string(),
            "dc_max" => n.dc_max_pct.to_string(),
            "dc_thresh" => n.dc_thresh.to_string(),
            "u_min" => n.u_min.to_string(),
            "rho_min" => n.rho_min.to_string(),
            "slot_us" => n.slot_us.to_string(),
            "sifs_us" => n.sifs_us.to_string(),
            "bitrate" => n.bitrate_bps.to_string(),
            "payload_bytes" => n.payload_bytes.to_string(),
            "header_bytes" => n.header_bytes.to_string(),
            "ack_bytes" => n.ack_bytes.to_string(),
            "sync_bytes" => n.sync_bytes.to_string(),
            "sync_period" => n.sync_period.to_string(),
            "retry_limit" => n.retry_limit.to_string(),
            "queue_capacity" => n.queue_capacity.to_string(),
            "difs_slots" => n.difs_slots.to_string(),
            "difs_I" => n.difs_class1_slots.to_string(),
            "difs_II" => n.difs_class2_slots.to_string(),
            "cw_min" => n.cw_min.to_string(),
            "cw_max" => n.cw_max.to_string(),
            "sync_cw" => n.sync_cw.to_string(),
            "cw_I_min" => n.cw1_min.to_string(),
            "cw_I_max" => n.cw1_max.to_string(),
            "cw_I_max_max" => n.cw1_max_max.to_string(),
            "cw_II_min" => n.cw2_min.to_string(),
            "cw_II_max" => n.cw2_max.to_string(),
            "eta" => n.eta.to_string(),
            "zeta" => n.zeta.to_string(),
            "beta" => n.beta.to_string(),
            "alpha_I" => n.alpha_i.to_string(),
            "cw_thresh" => n.cw_thresh.to_string(),
            "D_I_ms" => (n.d_i_us / 1_000.0).to_string(),
            "S_I_ms" => (n.s_i_us / 1_000.0).to_string(),
            "n_min_next_hop" => n.n_min_next_hop.to_string(),
            "lc_ori" => n.lc_ori.to_string(),
            "discovery_cycles" => n.discovery_cycles.to_string(),
            "cs_range_factor" => n.cs_range_factor.to_string(),
            "dc_lead_cycles" => n.dc_lead_cycles.to_string(),
            _ => return None,
        })
    }

    pub fn to_kv(&self) -> Vec<(&'static str, String)> {
        Self::KEYS
            .iter()
            .map(|k| (*k, self.get(k).expect("every listed key is readable")))
            .collect()
    }

    pub fn to_text(&self) -> String {
        self.to_kv().into_iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    /// Traffic period in seconds, resolving `auto`: the grids get loads that
    /// keep their sink neighbourhoods below saturation.
    pub fn traffic_period(&self) -> f64 {
        self.traffic_period_s.unwrap_or(match self.scenario {
            ScenarioChoice::Grid1 => 5.0,
            ScenarioChoice::Grid2 => 30.0,
            _ => 10.0,
        })
    }

    /// Rejects values the simulator cannot run with.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let n = &self.net;
        let check = |ok: bool, key: &str, why: &str| {
            if ok {
                Ok(())
            } else {
                Err(bad(key, &self.get(key).unwrap_or_default(), why))
            }
        };
        check(n.period_us > 0, "period_us", "must be positive")?;
        check(
            n.dc_min_pct > 0.0 && n.dc_min_pct <= n.dc_default_pct && n.dc_default_pct <= n.dc_max_pct && n.dc_max_pct <= 100.0,
            "dc_default",
            "need 0 < dc_min <= dc_default <= dc_max <= 100",
        )?;
        check(self.traffic_period() > 0.0, "traffic_period", "must be positive")?;
        check(n.bitrate_bps > 0, "bitrate", "must be positive")?;
        check(n.slot_us > 0, "slot_us", "must be positive")?;
        check(n.sync_period > 0, "sync_period", "must be positive")?;
        check(n.retry_limit > 0, "retry_limit", "must be positive")?;
        check(n.queue_capacity > 0, "queue_capacity", "must be positive")?;
        check(n.cw_min <= n.cw_max, "cw_min", "must not exceed cw_max")?;
        check(n.cw1_min <= n.cw1_max && n.cw1_max <= n.cw1_max_max, "cw_I_max", "need cw_I_min <= cw_I_max <= cw_I_max_max")?;
        check(n.cw2_min <= n.cw2_max, "cw_II_min", "must not exceed cw_II_max")?;
        check(n.cw2_min > n.cw1_max, "cw_II_min", "class ranges must not overlap")?;
        check(n.difs_class1_slots < n.difs_class2_slots, "difs_I", "must be below difs_II")?;
        check(n.s_i_us > 0.0, "S_I_ms", "must be positive")?;
        check(n.d_i_us > 0.0, "D_I_ms", "must be positive")?;
        for (key, x) in [("eta", n.eta), ("zeta", n.zeta), ("beta", n.beta)] {
            check((0.0..1.0).contains(&x), key, "must lie in [0, 1)")?;
        }
        check(n.lc_ori > 0.0, "lc_ori", "must be positive")?;
        check(n.cs_range_factor >= 1.0, "cs_range_factor", "must be at least 1")?;
        check(n.dc_lead_cycles >= 1, "dc_lead_cycles", "must be at least 1")?;
        Ok(())
    }
}

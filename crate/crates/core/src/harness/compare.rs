//! Baseline vs adapted comparison.

use std::fmt;
use std::path::Path;

use crate::mac::TrafficClass;

use super::config::RunConfig;
use super::export::read_summary;
use super::metrics::Summary;
use super::HarnessError;

/// Keys allowed to differ between the two runs.
const FREE_KEYS: [&str; 2] = ["scheme", "out"];

/// Delivery counts further apart than this set the parity flag.
pub const PARITY_TOLERANCE: f64 = 0.02;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassSide {
    pub delivered: u64,
    pub avg_delay_us: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassReport {
    pub class: TrafficClass,
    pub base: ClassSide,
    pub adapted: ClassSide,
}

impl ClassReport {
    /// adapted / base average delay.
    pub fn ratio(&self) -> Option<f64> {
        match (self.base.avg_delay_us, self.adapted.avg_delay_us) {
            (Some(b), Some(a)) if b > 0.0 => Some(a / b),
            _ => None,
        }
    }

    pub fn improvement_pct(&self) -> Option<f64> {
        self.ratio().map(|r| (1.0 - r) * 100.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub base_scheme: String,
    pub adapted_scheme: String,
    pub classes: [ClassReport; 2],
    pub delivered_base: u64,
    pub delivered_adapted: u64,
    /// Total deliveries differ by more than the parity tolerance.
    pub parity_warning: bool,
}

impl Report {
    pub fn class(&self, c: TrafficClass) -> &ClassReport {
        &self.classes[c.index()]
    }
}

pub fn parity_gap(base: u64, adapted: u64) -> f64 {
    if base == 0 {
        return if adapted == 0 { 0.0 } else { f64::INFINITY };
    }
    (adapted as f64 - base as f64).abs() / base as f64
}

/// Lists keys on which two configurations disagree, ignoring the scheme.
pub fn config_mismatches(a: &RunConfig, b: &RunConfig) -> Vec<String> {
    let (ka, kb) = (a.to_kv(), b.to_kv());
    ka.iter()
        .zip(&kb)
        .filter(|((k, va), (_, vb))| !FREE_KEYS.contains(k) && va != vb)
        .map(|((k, va), (_, vb))| format!("{k}: {va} vs {vb}"))
        .collect()
}

fn side(s: &Summary, c: TrafficClass) -> ClassSide {
    let cs = s.class(c);
    ClassSide {
        delivered: cs.delivered,
        avg_delay_us: cs.avg_delay_us,
    }
}

fn build(base_scheme: String, adapted_scheme: String, base: [ClassSide; 2], adapted: [ClassSide; 2]) -> Report {
    let delivered_base = base.iter().map(|c| c.delivered).sum();
    let delivered_adapted = adapted.iter().map(|c| c.delivered).sum();
    Report {
        base_scheme,
        adapted_scheme,
        classes: TrafficClass::BOTH.map(|c| ClassReport {
            class: c,
            base: base[c.index()],
            adapted: adapted[c.index()],
        }),
        delivered_base,
        delivered_adapted,
        parity_warning: parity_gap(delivered_base, delivered_adapted) > PARITY_TOLERANCE,
    }
}

pub fn compare(base_cfg: &RunConfig, base: &Summary, adapted_cfg: &RunConfig, adapted: &Summary) -> Result<Report, Vec<String>> {
    let bad = config_mismatches(base_cfg, adapted_cfg);
    if !bad.is_empty() {
        return Err(bad);
    }
    Ok(build(
        base_cfg.net.scheme.name().into(),
        adapted_cfg.net.scheme.name().into(),
        TrafficClass::BOTH.map(|c| side(base, c)),
        TrafficClass::BOTH.map(|c| side(adapted, c)),
    ))
}

fn load(dir: &Path) -> Result<(RunConfig, [ClassSide; 2]), HarnessError> {
    let cfg_text = std::fs::read_to_string(dir.join("run.cfg")).map_err(|e| HarnessError::io(dir.join("run.cfg"), e))?;
    let mut cfg = RunConfig::default();
    cfg.apply_text(&cfg_text)?;
    let sum_path = dir.join("summary.csv");
    let text = std::fs::read_to_string(&sum_path).map_err(|e| HarnessError::io(&sum_path, e))?;
    let kv = read_summary(&text);
    let get = |k: &str| kv.iter().find(|(key, _)| key == k).map(|(_, v)| v.as_str());
    let sides = TrafficClass::BOTH.map(|c| {
        let l = c.label();
        ClassSide {
            delivered: get(&format!("delivered_{l}")).and_then(|v| v.parse().ok()).unwrap_or(0),
            avg_delay_us: get(&format!("avg_delay_us_{l}")).and_then(|v| v.parse().ok()),
        }
    });
    Ok((cfg, sides))
}

/// Compares two run directories written by `export::write_all`.
pub fn compare_dirs(base: &Path, adapted: &Path) -> Result<Report, HarnessError> {
    let (bc, bs) = load(base)?;
    let (ac, as_) = load(adapted)?;
    let bad = config_mismatches(&bc, &ac);
    if !bad.is_empty() {
        return Err(HarnessError::Mismatch(bad));
    }
    Ok(build(bc.net.scheme.name().into(), ac.net.scheme.name().into(), bs, as_))
}

fn ms(x: Option<f64>) -> String {
    x.map(|v| format!("{:.1} ms", v / 1e3)).unwrap_or_else(|| "n/a".into())
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} vs {}", self.base_scheme, self.adapted_scheme)?;
        for c in &self.classes {
            writeln!(
                f,
                "  {}: avg {} -> {}  improvement {}  delivered {} -> {}",
                c.class,
                ms(c.base.avg_delay_us),
                ms(c.adapted.avg_delay_us),
                c.improvement_pct().map(|p| format!("{p:.1}%")).unwrap_or_else(|| "n/a".into()),
                c.base.delivered,
                c.adapted.delivered
            )?;
        }
        write!(
            f,
            "  delivered total {} -> {}{}",
            self.delivered_base,
            self.delivered_adapted,
            if self.parity_warning { "  WARNING: delivery counts differ by more than 2%" } else { "" }
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adapt::Scheme;

    fn side_of(delivered: u64, avg: f64) -> [ClassSide; 2] {
        [ClassSide { delivered, avg_delay_us: Some(avg) }; 2]
    }

    #[test]
    fn self_comparison_is_zero() {
        let r = build("a".into(), "a".into(), side_of(100, 2e6), side_of(100, 2e6));
        assert_eq!(r.class(TrafficClass::ClassI).improvement_pct(), Some(0.0));
        assert!(!r.parity_warning);
    }

    #[test]
    fn forty_percent() {
        let r = build("a".into(), "b".into(), side_of(100, 2.0e6), side_of(100, 1.2e6));
        let p = r.class(TrafficClass::ClassII).improvement_pct().unwrap();
        assert!((p - 40.0).abs() < 1e-9);
    }

    #[test]
    fn parity_flag() {
        assert!(build("a".into(), "b".into(), side_of(100, 1.0), side_of(97, 1.0)).parity_warning);
        assert!(!build("a".into(), "b".into(), side_of(100, 1.0), side_of(99, 1.0)).parity_warning);
    }

    #[test]
    fn mismatched_configs_are_refused() {
        let a = RunConfig::default();
        let mut b = RunConfig::default();
        b.net.scheme = Scheme::All;
        assert!(config_mismatches(&a, &b).is_empty());
        b.seed = 2;
        let s = Summary::default();
        let err = compare(&a, &s, &b, &s).unwrap_err();
        assert_eq!(err, vec!["seed: 1 vs 2".to_string()]);
    }

    #[test]
    fn missing_average_gives_no_ratio() {
        let mut base = side_of(0, 0.0);
        base[0].avg_delay_us = None;
        let r = build("a".into(), "b".into(), base, side_of(1, 1.0));
        assert_eq!(r.class(TrafficClass::ClassI).improvement_pct(), None);
    }
}

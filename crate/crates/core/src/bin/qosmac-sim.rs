use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qosmac::harness::compare::compare_dirs;
use qosmac::harness::plot::{render, Series};
use qosmac::harness::{run, write_outputs, ConfigError, HarnessError, RunConfig};

#[derive(Parser)]
#[command(name = "qosmac-sim", version, about = "Duty-cycled sensor MAC simulator with per-class QoS")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one simulation and write its CSV and SVG outputs.
    Run {
        /// Flat key=value file; command-line options override it.
        #[arg(long)]
        config: Option<PathBuf>,
        /// grid1, grid2, two-path, chain3, star or file=PATH
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long)]
        scheme: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Seconds of traffic.
        #[arg(long)]
        duration: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Any config key, as KEY=VALUE. Repeatable.
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
    },
    /// Compare a baseline run directory with an adapted one.
    Compare { base: PathBuf, adapted: PathBuf },
    /// Draw the cumulative delay curves of several run directories.
    Plot {
        #[arg(required = true)]
        dirs: Vec<PathBuf>,
        #[arg(long, default_value = "cumulative_delay.svg")]
        out: PathBuf,
    },
}

fn build_config(
    config: Option<PathBuf>,
    flags: [(&str, Option<String>); 5],
    params: &[String],
) -> Result<RunConfig, HarnessError> {
    let mut cfg = RunConfig::default();
    if let Some(p) = config {
        let text = std::fs::read_to_string(&p).map_err(|e| HarnessError::io(&p, e))?;
        cfg.apply_text(&text)?;
    }
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, &v)?;
        }
    }
    for kv in params {
        cfg.apply_override(kv)?;
    }
    Ok(cfg)
}

fn label_of(dir: &Path) -> String {
    std::fs::read_to_string(dir.join("run.cfg"))
        .ok()
        .and_then(|t| {
            let mut c = RunConfig::default();
            c.apply_text(&t).ok().map(|_| c.net.scheme.name().to_string())
        })
        .unwrap_or_else(|| dir.display().to_string())
}

fn main_inner(cli: Cli) -> Result<(), HarnessError> {
    match cli.cmd {
        Cmd::Run {
            config,
            scenario,
            scheme,
            seed,
            duration,
            out,
            params,
        } => {
            let flags = [
                ("scenario", scenario),
                ("scheme", scheme),
                ("seed", seed.map(|s| s.to_string())),
                ("duration", duration.map(|d| d.to_string())),
                ("out", out.map(|p| p.display().to_string())),
            ];
            let cfg = build_config(config, flags, &params)?;
            let dir = cfg.out.clone().ok_or_else(|| ConfigError::BadValue {
                key: "out".into(),
                value: String::new(),
                reason: "an output directory is required".into(),
            })?;
            let outcome = run(&cfg)?;
            write_outputs(&outcome, &dir)?;
            for (k, v) in qosmac::harness::export::summary_pairs(&outcome) {
                println!("{k}={v}");
            }
            for v in &outcome.log.violations {
                eprintln!("invariant violated: {v}");
            }
        }
        Cmd::Compare { base, adapted } => {
            let report = compare_dirs(&base, &adapted)?;
            println!("{report}");
        }
        Cmd::Plot { dirs, out } => {
            let mut series = Vec::new();
            for d in &dirs {
                let path = d.join("deliveries.csv");
                let text = std::fs::read_to_string(&path).map_err(|e| HarnessError::io(&path, e))?;
                let parsed = Series::from_deliveries_csv(&label_of(d), &text)
                    .map_err(|e| ConfigError::Syntax(format!("{}: {e}", path.display())))?;
                series.extend(parsed);
            }
            std::fs::write(&out, render(&series)).map_err(|e| HarnessError::io(&out, e))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match main_inner(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

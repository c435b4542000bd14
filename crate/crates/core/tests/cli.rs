use std::path::Path;
use std::process::{Command, Output};

fn sim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qosmac-sim")).args(args).output().unwrap()
}

fn run_into(dir: &Path, scheme: &str, seed: &str) -> Output {
    sim(&["run", "--scheme", scheme, "--seed", seed, "--duration", "30", "--out", dir.to_str().unwrap()])
}

#[test]
fn run_compare_plot() {
    let tmp = tempfile::tempdir().unwrap();
    let (base, all) = (tmp.path().join("base"), tmp.path().join("all"));
    let out = run_into(&base, "baseline", "1");
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("scheme=baseline"));
    assert_eq!(run_into(&all, "all", "1").status.code(), Some(0));

    let cmp = sim(&["compare", base.to_str().unwrap(), all.to_str().unwrap()]);
    assert_eq!(cmp.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&cmp.stdout).starts_with("baseline vs all"));

    let svg = tmp.path().join("both.svg");
    let plot = sim(&["plot", base.to_str().unwrap(), all.to_str().unwrap(), "--out", svg.to_str().unwrap()]);
    assert_eq!(plot.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(svg).unwrap().matches("<polyline").count(), 4);

    // a saved configuration reproduces the run
    let again = tmp.path().join("again");
    let cfg = base.join("run.cfg");
    let out = sim(&["run", "--config", cfg.to_str().unwrap(), "--out", again.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let read = |d: &Path| std::fs::read_to_string(d.join("deliveries.csv")).unwrap();
    assert_eq!(read(&base), read(&again));
}

#[test]
fn input_errors_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("x");
    let d = dir.to_str().unwrap();
    assert_eq!(sim(&["run", "--param", "colour=red", "--out", d]).status.code(), Some(1));
    assert_eq!(sim(&["run", "--scheme", "fast", "--out", d]).status.code(), Some(1));
    assert_eq!(sim(&["run", "--duration", "5"]).status.code(), Some(1));
    assert_eq!(sim(&["frobnicate"]).status.code(), Some(1));

    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run_into(&a, "baseline", "1");
    run_into(&b, "cw", "2");
    let cmp = sim(&["compare", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(cmp.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&cmp.stderr).contains("seed"));
}

#[test]
fn file_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("nope.cfg");
    assert_eq!(sim(&["run", "--config", missing.to_str().unwrap(), "--out", "x"]).status.code(), Some(2));
    let plain = tmp.path().join("plain");
    std::fs::write(&plain, "x").unwrap();
    let under = plain.join("sub");
    assert_eq!(run_into(&under, "baseline", "1").status.code(), Some(2));
}

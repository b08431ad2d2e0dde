//! End-to-end tests of the `attrsel` binary: exit codes, emitted files, and
//! run-to-run byte stability.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::atomic::{AtomicUsize, Ordering};

static DIR_SEQ: AtomicUsize = AtomicUsize::new(0);

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!(
        "attrsel-cli-{tag}-{}-{}",
        std::process::id(),
        DIR_SEQ.fetch_add(1, Ordering::Relaxed)
    ));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn attrsel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_attrsel"))
        .args(args)
        .env("NO_COLOR", "1")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Write a small synthetic dataset plus a matching config, returning the
/// config path with the given selection method and output dir patched in.
fn synth_setup(dir: &Path, method: &str) -> PathBuf {
    let data = dir.join("data.csv");
    let cfg_path = dir.join("run.ini");
    let out = attrsel(&[
        "synth", "--rows", "120", "--informative", "2", "--noise", "3", "--classes", "3",
        "--seed", "5", "--out", p(&data), "--config-out", p(&cfg_path),
    ]);
    assert_eq!(code(&out), 0, "synth failed: {}", String::from_utf8_lossy(&out.stderr));

    let ini = std::fs::read_to_string(&cfg_path).unwrap();
    let ini = ini
        .replace("method = filters", &format!("method = {method}"))
        .replace("folds = 10", "folds = 5")
        .replace("ga.population = 500", "ga.population = 16")
        .replace("ga.generations = 60", "ga.generations = 4")
        .replace("filter_top_k = 15", "filter_top_k = 2")
        .replace("dir = out", &format!("dir = {}", p(&dir.join("out"))));
    std::fs::write(&cfg_path, ini).unwrap();
    cfg_path
}

#[test]
fn run_emits_the_full_bundle_and_zero_exit() {
    let dir = scratch_dir("run");
    let cfg = synth_setup(&dir, "ga");
    let out = attrsel(&["run", "--config", p(&cfg)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["selection.csv", "comparison.csv", "trace.csv", "report.json", "report.md"] {
        assert!(dir.join("out").join(f).exists(), "{f} missing");
    }
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("Selection"));
    assert!(!stdout.contains('\x1b'), "NO_COLOR must strip escapes");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn identical_runs_produce_identical_bytes() {
    let dir = scratch_dir("determinism");
    let cfg = synth_setup(&dir, "ga");
    assert_eq!(code(&attrsel(&["run", "--config", p(&cfg)])), 0);
    let first: Vec<(String, Vec<u8>)> = ["report.json", "selection.csv", "trace.csv", "comparison.csv"]
        .iter()
        .map(|f| (f.to_string(), std::fs::read(dir.join("out").join(f)).unwrap()))
        .collect();
    assert_eq!(code(&attrsel(&["run", "--config", p(&cfg)])), 0);
    for (name, bytes) in first {
        let again = std::fs::read(dir.join("out").join(&name)).unwrap();
        assert_eq!(bytes, again, "{name} changed between identical runs");
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn filters_method_reports_panel_votes() {
    let dir = scratch_dir("filters");
    let cfg = synth_setup(&dir, "filters");
    let out = attrsel(&["run", "--config", p(&cfg)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    // Panel runs produce no search trace.
    assert!(!dir.join("out").join("trace.csv").exists());
    let json = std::fs::read_to_string(dir.join("out").join("report.json")).unwrap();
    assert!(json.contains("\"methods\": [{\"method\": \"oner\""));
    let sel = std::fs::read_to_string(dir.join("out").join("selection.csv")).unwrap();
    assert!(sel.starts_with("attribute,group,votes,average_rank,selected"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn method_override_wins_over_config() {
    let dir = scratch_dir("override");
    let cfg = synth_setup(&dir, "filters");
    let out = attrsel(&["run", "--config", p(&cfg), "--method", "forward", "--seed", "9"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let json = std::fs::read_to_string(dir.join("out").join("report.json")).unwrap();
    assert!(json.contains("\"method\": \"forward\""));
    assert!(json.contains("\"seed\": 9"));
    assert!(dir.join("out").join("trace.csv").exists());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn select_and_rank_and_evaluate_write_their_slices() {
    let dir = scratch_dir("subcommands");
    let cfg = synth_setup(&dir, "ga");

    let out = attrsel(&["select", "--config", p(&cfg)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.join("out").join("selection.csv").exists());

    let out = attrsel(&["rank", "--config", p(&cfg)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let ranks = std::fs::read_to_string(dir.join("out").join("ranks.csv")).unwrap();
    assert!(ranks.starts_with("attribute,group,oner,relieff,chi_square,gain_ratio,info_gain"));
    assert_eq!(ranks.lines().count(), 6, "five attributes plus header");

    let out = attrsel(&["evaluate", "--config", p(&cfg), "--attrs", "a01,a02", "--confusion"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.join("out").join("comparison.csv").exists());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("confusion"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn config_errors_exit_three_without_outputs() {
    let dir = scratch_dir("badcfg");
    let cfg = synth_setup(&dir, "ga");
    let broken = std::fs::read_to_string(&cfg)
        .unwrap()
        .replace("method = ga", "method = annealing");
    std::fs::write(&cfg, broken).unwrap();
    let out = attrsel(&["run", "--config", p(&cfg)]);
    assert_eq!(code(&out), 3);
    assert!(!dir.join("out").exists(), "no outputs on config error");
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown selection method"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn data_errors_exit_two() {
    let dir = scratch_dir("baddata");
    let cfg = synth_setup(&dir, "ga");
    std::fs::remove_file(dir.join("data.csv")).unwrap();
    let out = attrsel(&["run", "--config", p(&cfg)]);
    assert_eq!(code(&out), 2);
    assert!(!dir.join("out").exists());

    // Unknown attribute names are data-level failures too.
    let cfg2 = synth_setup(&dir, "ga");
    let out = attrsel(&["evaluate", "--config", p(&cfg2), "--attrs", "nonexistent"]);
    assert_eq!(code(&out), 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn usage_errors_exit_one_and_help_exits_zero() {
    let out = attrsel(&["run"]);
    assert_eq!(code(&out), 1, "missing --config is a usage error");
    let out = attrsel(&["frobnicate"]);
    assert_eq!(code(&out), 1);
    let out = attrsel(&["--help"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("attrsel"));
    let out = attrsel(&["synth", "--rows", "not-a-number", "--out", "x.csv"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn synth_csv_round_trips_through_ingestion() {
    let dir = scratch_dir("roundtrip");
    let cfg = synth_setup(&dir, "ga");
    // The generated config parses, and the data loads with every row kept.
    let out = attrsel(&["rank", "--config", p(&cfg)]);
    assert_eq!(code(&out), 0);
    let data = std::fs::read_to_string(dir.join("data.csv")).unwrap();
    assert_eq!(data.lines().count(), 121, "header plus 120 rows");
    assert!(data.lines().next().unwrap().ends_with("mean_income"));
    std::fs::remove_dir_all(&dir).unwrap();
}

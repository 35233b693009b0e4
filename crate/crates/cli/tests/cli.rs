use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use multiris_cli::output::Table;

fn multiris(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_multiris"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn simulate_into(dir: &Path, extra: &[&str]) -> Output {
    let out = dir.to_str().unwrap();
    let mut args = vec!["simulate", "--trials", "20", "--seed", "3", "--set", "n_users=3", "--out", out];
    args.extend_from_slice(extra);
    multiris(&args)
}

#[test]
fn simulate_writes_coverage_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = simulate_into(dir.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("coverage.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("threshold_db,coverage,ci"));
    assert_eq!(csv.lines().count(), 1 + 9);

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["base_seed"], 3);
    assert_eq!(manifest["command"], "simulate");
    let names: Vec<&str> = manifest["outputs"].as_array().unwrap().iter().map(|o| o["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"coverage.csv") && names.contains(&"rate.csv"));
}

#[test]
fn same_seed_gives_identical_bytes_across_thread_counts() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert!(simulate_into(a.path(), &["--threads", "1"]).status.success());
    assert!(simulate_into(b.path(), &["--threads", "2"]).status.success());
    for f in ["coverage.csv", "rate.csv"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn unknown_key_exits_2_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let o = simulate_into(dir.path(), &["--set", "bogus_key=1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bogus_key"));
}

#[test]
fn unknown_key_in_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "[system]\nn_users = 3\nwarp_factor = 9\n").unwrap();
    let o = simulate_into(dir.path(), &["--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("warp_factor"));
}

#[test]
fn non_positive_user_density_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = multiris(&["analyze", "--set", "user_density=0", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("invalid user density"));
}

#[test]
fn unknown_recipe_lists_the_available_ones() {
    let o = multiris(&["figure", "fig99"]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("fig99") && e.contains("fig4") && e.contains("fig13"));
}

#[test]
fn emitted_csv_round_trips_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    assert!(simulate_into(dir.path(), &[]).status.success());
    for f in ["coverage.csv", "rate.csv"] {
        let bytes = fs::read_to_string(dir.path().join(f)).unwrap();
        assert_eq!(Table::from_csv(&bytes).unwrap().to_csv(), bytes, "{f}");
    }
}

#[test]
fn manifest_replays_the_run() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert!(simulate_into(a.path(), &["--set", "ris_density=2e-3"]).status.success());
    let manifest = a.path().join("manifest.json");
    let o = multiris(&["simulate", "--config", manifest.to_str().unwrap(), "--out", b.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        fs::read(a.path().join("coverage.csv")).unwrap(),
        fs::read(b.path().join("coverage.csv")).unwrap()
    );
}

#[test]
fn analyze_emits_density_grid() {
    let dir = tempfile::tempdir().unwrap();
    let o = multiris(&[
        "analyze",
        "--set",
        "ris_densities=[1e-3, 2e-3]",
        "--set",
        "sweep.thresholds_db=[0, 10]",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let t = Table::from_csv(&fs::read_to_string(dir.path().join("analytical_density.csv")).unwrap()).unwrap();
    assert_eq!(t.header, ["ris_density", "coverage_0db", "coverage_10db"]);
    assert_eq!(t.rows.len(), 2);
    let c: Vec<f64> = t.column("coverage_0db").unwrap();
    assert!(c[1] >= c[0]);
}

//! End-to-end runs of the `trihelm` binary against a private cache directory.

use std::path::Path;
use std::process::{Command, Output};

fn trihelm(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trihelm"))
        .args(args)
        .env("TRIHELM_CACHE_DIR", cache)
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Parses the `G(x1, x2) = RE IMi` line.
fn green_value(o: &Output) -> (f64, f64) {
    let text = stdout(o);
    let line = text.lines().next().expect("value line");
    let rhs = line.split(" = ").nth(1).expect("value");
    let mut parts = rhs.split_whitespace();
    let re: f64 = parts.next().unwrap().parse().unwrap();
    let im: f64 = parts.next().unwrap().trim_end_matches('i').parse().unwrap();
    (re, im)
}

#[test]
fn green_methods_agree_in_the_stop_band() {
    let cache = tempfile::tempdir().unwrap();
    let a = trihelm(cache.path(), &["green", "--k2", "-1.5,0.4", "--at", "3,-2"]);
    let b = trihelm(cache.path(), &["green", "--k2", "-1.5,0.4", "--at", "3,-2", "--method", "quadrature"]);
    assert!(a.status.success(), "{}", stderr(&a));
    assert!(b.status.success(), "{}", stderr(&b));
    let (ar, ai) = green_value(&a);
    let (br, bi) = green_value(&b);
    assert!((ar - br).abs() < 1e-12 && (ai - bi).abs() < 1e-12);
}

#[test]
fn table_build_hits_the_cache_on_rerun() {
    let cache = tempfile::tempdir().unwrap();
    let first = trihelm(cache.path(), &["table", "build", "--k", "1.1", "--radius", "6"]);
    assert!(first.status.success(), "{}", stderr(&first));
    assert!(stderr(&first).contains("built"));
    let second = trihelm(cache.path(), &["table", "build", "--k", "1.1", "--radius", "6"]);
    assert!(stderr(&second).contains("loaded from cache"));
    let path = stdout(&first).trim().to_string();
    assert!(path.starts_with(cache.path().to_str().unwrap()));
    let inspect = trihelm(cache.path(), &["table", "inspect", &path]);
    assert!(inspect.status.success());
    assert!(stdout(&inspect).contains("radius          6"));
}

#[test]
fn demo_export_is_deterministic_across_cache_states() {
    let cache = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    let cold = out.path().join("cold");
    let warm = out.path().join("warm");
    let args = |dir: &Path| {
        vec![
            "demo".to_string(),
            "two-slits".into(),
            "--window".into(),
            "-15,15,12".into(),
            "--out-dir".into(),
            dir.to_str().unwrap().into(),
        ]
    };
    let run = |dir: &Path| {
        let a = args(dir);
        let refs: Vec<&str> = a.iter().map(String::as_str).collect();
        trihelm(cache.path(), &refs)
    };
    let first = run(&cold);
    assert!(first.status.success(), "{}", stderr(&first));
    let second = run(&warm);
    assert!(second.status.success());
    assert!(stdout(&second).contains("loaded from cache"));
    let a = std::fs::read(cold.join("two-slits.csv")).unwrap();
    let b = std::fs::read(warm.join("two-slits.csv")).unwrap();
    assert_eq!(a, b);

    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x1,x2,eu1,eu2,re,im"));
    // Window rows, boundary support and incident rows below.
    assert_eq!(lines.count(), 31 * 12 + 4 + 31 * 12);
    assert!(text.contains("\n10,0,10,0,1,0\n"));

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(cold.join("two-slits-report.json")).unwrap()).unwrap();
    assert_eq!(report["boundary_deviation"], 0.0);
    assert!(report["max_residual"].as_f64().unwrap() <= 1e-7);
}

#[test]
fn solve_reads_boundary_and_config() {
    let cache = tempfile::tempdir().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let boundary = dir.path().join("f.json");
    std::fs::write(&boundary, r#"[{"y1": -2, "re": 1.0, "im": 0.0}, {"y1": 2, "re": 1.0, "im": 0.0}]"#).unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(&config, "k = 0.8\nformat = \"json\"\n[window]\nx1_min = -6\nx1_max = 6\nx2_max = 6\n").unwrap();
    let out = dir.path().join("u.json");
    let o = trihelm(
        cache.path(),
        &[
            "--config",
            config.to_str().unwrap(),
            "solve",
            "--boundary",
            boundary.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let rows: Vec<serde_json::Value> = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(rows.len(), 13 * 6 + 2);
    // Reflection symmetry of symmetric data: u(x1, x2) = u(-x1 - x2, x2).
    let find = |x1: i64, x2: i64| {
        rows.iter()
            .find(|r| r["x1"] == x1 && r["x2"] == x2)
            .map(|r| (r["re"].as_f64().unwrap(), r["im"].as_f64().unwrap()))
            .unwrap()
    };
    let (a, b) = (find(1, 3), find(-4, 3));
    assert!((a.0 - b.0).abs() < 1e-9 && (a.1 - b.1).abs() < 1e-9);
}

#[test]
fn exit_codes() {
    let cache = tempfile::tempdir().unwrap();
    let out_of_band = trihelm(cache.path(), &["green", "--k", "4", "--at", "0,0"]);
    assert_eq!(out_of_band.status.code(), Some(2));
    assert!(stderr(&out_of_band).contains("pass band"));
    let missing = trihelm(cache.path(), &["table", "inspect", "/definitely/not/here.json"]);
    assert_eq!(missing.status.code(), Some(5));
    let dup = trihelm(cache.path(), &["demo", "two-slits", "--openings", "1,1", "--window", "-2,2,2"]);
    assert_eq!(dup.status.code(), Some(2));
    let bad_config = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(bad_config.path(), "no_such_key = 1").unwrap();
    let o = trihelm(
        cache.path(),
        &["--config", bad_config.path().to_str().unwrap(), "green", "--k", "1", "--at", "0,0"],
    );
    assert_eq!(o.status.code(), Some(2));
}

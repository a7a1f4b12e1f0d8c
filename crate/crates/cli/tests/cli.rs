use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stableprobe"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn bench_writes_csv_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let out = run(&[
        "bench",
        "--m",
        "1000",
        "--alpha",
        "0.5",
        "--rounds",
        "1000",
        "--measure-every",
        "100",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("deletions,avg_successful,avg_unsuccessful,tombstones,elements")
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 11);
    assert!(rows[10].starts_with("1000,"));
    assert!(rows[10].ends_with(",500"));
}

#[test]
fn bench_is_deterministic_on_stdout() {
    let args = [
        "bench", "--m", "500", "--alpha", "0.7", "--policy", "random", "--seed", "4",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn naive_saturation_is_reported() {
    let out = run(&[
        "bench",
        "--m",
        "32",
        "--alpha",
        "0.5",
        "--variant",
        "naive",
        "--rounds",
        "1000",
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("saturated"));
}

#[test]
fn bad_arguments_exit_with_usage() {
    for args in [
        &["bench", "--alpha", "1.5"][..],
        &["bench", "--alpha", "0"],
        &["bench", "--m", "1"],
        &["bench", "--policy", "lifo"],
        &["check", "--variant", "robin-hood"],
        &["demo-lru", "--capacity", "0"],
        &[],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn check_passes_for_minimal_and_fails_for_naive() {
    let ok = run(&["check", "--seed", "1", "--ops", "5000", "--m", "64"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).starts_with("ok:"));

    let bad = run(&[
        "check",
        "--seed",
        "1",
        "--ops",
        "5000",
        "--m",
        "64",
        "--variant",
        "naive",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&bad.stdout);
    assert!(stdout.contains("UnjustifiedTombstone\t"), "{stdout}");
}

#[test]
fn demo_lru_reports_ok() {
    let out = run(&[
        "demo-lru",
        "--capacity",
        "16",
        "--ops",
        "2000",
        "--seed",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok:"));
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_fragile");

fn fragile(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_is_byte_reproducible_and_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.jsonl"), dir.path().join("b.jsonl"));
    for out in [&a, &b] {
        let o = fragile(&[
            "run",
            "--algo",
            "sort_by_inv",
            "--n",
            "500",
            "--inv",
            "300",
            "--trials",
            "4",
            "--seed",
            "11",
            "--out",
            path(out),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let o = fragile(&["verify", path(&a)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("PASS"));
}

#[test]
fn spec_file_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("exp.spec");
    fs::write(
        &spec,
        "# two-run median\nalgorithm = median_two_runs\nn = 300\ngenerator = two_runs(120)\ntrials = 3\nseed = 5\n",
    )
    .unwrap();
    let from_file = fragile(&["run", "--spec", path(&spec)]);
    let from_flags = fragile(&[
        "run",
        "--algo",
        "median_two_runs",
        "--n",
        "300",
        "--generator",
        "two_runs(120)",
        "--trials",
        "3",
        "--seed",
        "5",
    ]);
    assert!(from_file.status.success());
    assert_eq!(from_file.stdout, from_flags.stdout);
    // flags override the file
    let overridden = fragile(&["run", "--spec", path(&spec), "--seed", "6"]);
    assert_ne!(overridden.stdout, from_file.stdout);
}

#[test]
fn corrupted_report_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.jsonl");
    let o = fragile(&[
        "run",
        "--algo",
        "min_by_runs",
        "--n",
        "256",
        "--runs",
        "8",
        "--trials",
        "2",
        "--out",
        path(&report),
    ]);
    assert!(o.status.success());
    let text = fs::read_to_string(&report).unwrap();
    let corrupted = text.replacen("\"max_fragility\":", "\"max_fragility\":9", 1);
    assert_ne!(corrupted, text);
    fs::write(&report, corrupted).unwrap();
    let o = fragile(&["verify", path(&report)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn config_errors_exit_two() {
    assert_eq!(
        fragile(&["run", "--algo", "bogus", "--n", "10"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        fragile(&["run", "--algo", "min_by_runs", "--n", "10", "--runs", "11"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(fragile(&["run", "--n", "10"]).status.code(), Some(2));
    assert_eq!(
        fragile(&["verify", "/nonexistent/report.jsonl"])
            .status
            .code(),
        Some(2)
    );
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.jsonl");
    fragile(&[
        "run",
        "--algo",
        "min_by_runs",
        "--n",
        "16",
        "--out",
        path(&report),
    ]);
    let o = fragile(&["verify", path(&report), "--bounds", "sort_by_inv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn generate_emits_exact_disorder() {
    let o = fragile(&[
        "generate",
        "--algo",
        "min_by_runs",
        "--n",
        "40",
        "--runs",
        "7",
        "--seed",
        "3",
    ]);
    assert!(o.status.success());
    let values: Vec<i64> = String::from_utf8(o.stdout)
        .unwrap()
        .lines()
        .map(|l| l.parse().unwrap())
        .collect();
    assert_eq!(values.len(), 40);
    let runs = 1 + values.windows(2).filter(|w| w[1] < w[0]).count();
    assert_eq!(runs, 7);
}

#[test]
fn csv_profiles_and_aggregate_report() {
    let dir = tempfile::tempdir().unwrap();
    let csv = fragile(&[
        "run",
        "--algo",
        "network_sort",
        "--n",
        "16",
        "--trials",
        "2",
        "--format",
        "csv",
    ]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("trial,element_index,role,count"));
    assert_eq!(text.lines().count(), 1 + 2 * 16);

    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    fragile(&[
        "run",
        "--algo",
        "median_by_inv",
        "--n",
        "200",
        "--inv",
        "50",
        "--trials",
        "3",
        "--out",
        path(&a),
    ]);
    fragile(&[
        "run",
        "--algo",
        "median_by_inv",
        "--n",
        "200",
        "--inv",
        "500",
        "--trials",
        "3",
        "--out",
        path(&b),
    ]);
    let o = fragile(&["report", path(&a), path(&b)]);
    assert!(o.status.success());
    let table = String::from_utf8(o.stdout).unwrap();
    assert_eq!(table.lines().count(), 3);
    assert!(table.contains("controlled_inv(500)"));
    let o = fragile(&["report", "--format", "json", path(&a), path(&b)]);
    let rows: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 2);
}

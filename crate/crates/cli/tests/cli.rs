use std::path::PathBuf;
use std::process::{Command, Output};

fn qbc1(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qbc1"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qbc1-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn honest_run_accepts() {
    let o = qbc1(&["run", "--seed", "3", "--n", "3"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = stdout(&o);
    assert!(text
        .lines()
        .last()
        .unwrap()
        .contains("\"phase\":\"verified\""));
    assert!(text.lines().all(|l| l.starts_with('{')));
}

#[test]
fn cheating_run_exits_2() {
    let o = qbc1(&["run", "--seed", "3", "--alice", "declare-flipped"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_1() {
    for args in [
        &["run"][..],
        &["run", "--seed", "1", "--bogus"],
        &["run", "--seed", "1", "--alice", "sneaky"],
        &["run", "--seed", "1", "--lambda", "3/2"],
        &["run", "--seed", "1", "--n", "9"],
        &["frobnicate"],
    ] {
        let o = qbc1(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(qbc1(&["--help"]).status.code(), Some(0));
    assert_eq!(qbc1(&["attack", "--help"]).status.code(), Some(0));
    assert_eq!(qbc1(&["--version"]).status.code(), Some(0));
}

#[test]
fn same_seed_same_bytes() {
    let a = scratch("a.jsonl");
    let b = scratch("b.jsonl");
    for path in [&a, &b] {
        let o = qbc1(&[
            "run",
            "--seed",
            "42",
            "--eq8-check",
            "true",
            "--output",
            path.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let args = [
        "attack", "--seed", "9", "--bob", "helstrom", "--trials", "60", "--format", "jsonl",
    ];
    assert_eq!(stdout(&qbc1(&args)), stdout(&qbc1(&args)));
}

#[test]
fn config_file_is_merged_and_flags_win() {
    let path = scratch("flipped.toml");
    std::fs::write(&path, "seed = 5\nn = 3\nalice = \"declare-flipped\"\n").unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(qbc1(&["run", "--config", p]).status.code(), Some(2));
    assert_eq!(
        qbc1(&["run", "--config", p, "--alice", "honest"])
            .status
            .code(),
        Some(0)
    );

    let bad = scratch("bad.toml");
    std::fs::write(&bad, "seed = 5\nnn = 3\n").unwrap();
    assert_eq!(
        qbc1(&["run", "--config", bad.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn sweep_table_has_one_row_per_n() {
    let o = qbc1(&["sweep", "--seed", "1", "--ns", "2,3,4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header[0], "schema_version");
    assert!(header.contains(&"trace_distance"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.split(',').count() == header.len()));
}

#[test]
fn attack_experiments_produce_tables() {
    let epr = qbc1(&[
        "attack",
        "--seed",
        "1",
        "--n",
        "3",
        "--experiment",
        "epr",
        "--format",
        "jsonl",
    ]);
    assert_eq!(epr.status.code(), Some(0));
    assert!(stdout(&epr).contains("\"eq5_holds\":true"));

    let fixed = qbc1(&[
        "attack",
        "--seed",
        "1",
        "--experiment",
        "fixed-states",
        "--bob",
        "fixed:0.5",
    ]);
    assert_eq!(fixed.status.code(), Some(0));
    assert!(stdout(&fixed).starts_with("schema_version,"));
}

#[test]
fn bounds_hold_and_check_demo_runs() {
    let out = scratch("bounds.csv");
    let o = qbc1(&[
        "bounds",
        "--seed",
        "2",
        "--ns",
        "2,3",
        "--trials",
        "200",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 3);

    let demo = qbc1(&[
        "check-demo",
        "--seed",
        "1",
        "--ns",
        "3,4",
        "--format",
        "jsonl",
    ]);
    assert_eq!(demo.status.code(), Some(0));
    let text = stdout(&demo);
    assert_eq!(text.lines().count(), 4);
    assert!(text.contains("\"entanglement\":\"permutation\""));
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn pmp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pmp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = pmp(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_solve_verify() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("i.pmp");
    let sol = dir.path().join("s.sol");
    ok(&[
        "generate",
        "--class",
        "3*4/H5",
        "--seed",
        "3",
        "-o",
        path(&inst),
    ]);
    let text = fs::read_to_string(&inst).unwrap();
    assert!(text.starts_with("4 5\n"));
    assert!(text.contains("# name 3-4-H5-3"));
    ok(&[
        "solve",
        path(&inst),
        "--config",
        "lookahead-what-minmax-stop",
        "-o",
        path(&sol),
    ]);
    assert!(fs::read_to_string(&sol).unwrap().starts_with("moves "));
    assert!(ok(&["verify", path(&inst), path(&sol)]).starts_with("ok "));
}

#[test]
fn generate_by_dimensions_matches_class() {
    let a = ok(&["generate", "--class", "3*3/H5", "--seed", "1"]);
    let b = ok(&[
        "generate", "-w", "3", "-t", "3", "--height", "5", "--seed", "1",
    ]);
    assert_eq!(a, b);
    assert!(!pmp(&["generate", "-w", "3"]).status.success());
}

#[test]
fn portfolio_is_no_worse_than_the_oracle_bound() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("tiny.pmp");
    fs::write(&inst, "3 3\n2 1 3\n1 2\n0\n").unwrap();
    let best = ok(&["portfolio", path(&inst), "--table"]);
    let opt = ok(&["oracle", path(&inst), "--cap", "10"]);
    let count = |s: &str| {
        s.lines()
            .next()
            .unwrap()
            .strip_prefix("moves ")
            .unwrap()
            .parse::<usize>()
            .unwrap()
    };
    assert!(count(&best) >= count(&opt));
    assert_eq!(count(&opt), 1);
}

#[test]
fn verify_rejects_an_unsorting_solution() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("i.pmp");
    let sol = dir.path().join("s.sol");
    fs::write(&inst, "3 3\n2 1 3\n1 2\n0\n").unwrap();
    fs::write(&sol, "moves 1\n1 2\n").unwrap();
    let out = pmp(&["verify", path(&inst), path(&sol)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn malformed_instance_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("bad.pmp");
    fs::write(&inst, "3 3\n2 1 x\n1 2\n0\n").unwrap();
    let out = pmp(&["portfolio", path(&inst)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2, column 5"));
}

#[test]
fn unknown_config_label_fails() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("i.pmp");
    fs::write(&inst, "2 3\n1 1\n0\n").unwrap();
    assert!(!pmp(&["solve", path(&inst), "--config", "max-w-best-none"])
        .status
        .success());
}

#[test]
fn bench_writes_stable_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    let args = [
        "bench",
        "--preset",
        "table2",
        "--classes",
        "3*3/H5,3*4/H5",
        "--seeds",
        "4",
        "--threads",
        "2",
    ];
    let stdout = ok(&args);
    let mut with_out = args.to_vec();
    with_out.extend(["-o", path(&out)]);
    ok(&with_out);
    assert_eq!(fs::read_to_string(&out).unwrap(), stdout);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(
        lines[0],
        "class,max-w-minmax-none,lookahead-what-minmax-none,portfolio"
    );
    assert_eq!(lines.len(), 3);
    assert!(!pmp(&["bench", "--preset", "table7", "--seeds", "1"])
        .status
        .success());
}

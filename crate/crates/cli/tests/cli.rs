use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sparsedisc"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = path(dir, name);
    fs::write(&p, text).unwrap();
    p
}

fn json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn generate_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (path(&dir, "a.json"), path(&dir, "b.json"));
    for p in [&a, &b] {
        ok(&[
            "generate",
            "random",
            "--n",
            "50",
            "--m",
            "3",
            "--t",
            "2",
            "--seed",
            "1",
            "--out",
            s(p),
        ]);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let inst = sparsedisc::read_instance(&fs::read_to_string(&a).unwrap()).unwrap();
    assert!(inst.t() <= 2);
    assert_eq!(inst.m(), 3);
}

#[test]
fn partition_has_sparsity_one() {
    let text = ok(&["generate", "partition", "--n", "6", "--blocks", "3"]);
    let inst = sparsedisc::read_instance(&text).unwrap();
    assert_eq!(inst.t(), 1);
    assert_eq!(inst.num_sets(), 3);
}

#[test]
fn other_generators_run() {
    let text = ok(&[
        "generate",
        "beck-fiala",
        "--n",
        "12",
        "--m",
        "4",
        "--t",
        "2",
        "--seed",
        "3",
    ]);
    assert!(sparsedisc::read_instance(&text).unwrap().t() <= 2);
    let text = ok(&[
        "generate",
        "edge-cover",
        "--n",
        "10",
        "--vertices",
        "6",
        "--m",
        "2",
    ]);
    assert_eq!(sparsedisc::read_instance(&text).unwrap().t(), 4);
    assert_eq!(
        run(&["generate", "edge-cover", "--n", "50", "--vertices", "4"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(
        run(&["generate", "random", "--m", "3"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["solve", "--k", "2"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn big_solver_reaches_zero() {
    let dir = TempDir::new().unwrap();
    let s_big = sparsedisc::lll_threshold(1, 2).unwrap();
    let sets: Vec<String> = (0..3)
        .map(|b| {
            let items: Vec<String> = (b * s_big..(b + 1) * s_big)
                .map(|j| j.to_string())
                .collect();
            format!("[{}]", items.join(","))
        })
        .collect();
    let text = format!(
        r#"{{"n": {}, "functions": [{{"sets": [{}]}}]}}"#,
        3 * s_big,
        sets.join(",")
    );
    let input = write(&dir, "big.json", &text);
    let report = path(&dir, "r.json");
    let coloring = path(&dir, "c.json");
    ok(&[
        "solve",
        "--algo",
        "big",
        "--k",
        "2",
        "--in",
        s(&input),
        "--out",
        s(&coloring),
        "--report",
        s(&report),
    ]);
    assert_eq!(json(&report)["discrepancy"], 0);
    // auto picks the big-sets solver here
    let auto = ok(&["solve", "--k", "2", "--in", s(&input)]);
    let auto: Value = serde_json::from_str(&auto).unwrap();
    assert_eq!(auto["algorithm"], "big");
}

#[test]
fn small_solver_rejects_oversized_sets() {
    let dir = TempDir::new().unwrap();
    let input = write(
        &dir,
        "i.json",
        r#"{"n": 4, "functions": [{"sets": [[0, 1, 2, 3]]}]}"#,
    );
    let out = run(&[
        "solve",
        "--algo",
        "small",
        "--k",
        "2",
        "--s",
        "2",
        "--in",
        s(&input),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("more than s = 2"));
}

#[test]
fn solve_is_reproducible_and_verifiable() {
    let dir = TempDir::new().unwrap();
    let input = path(&dir, "i.json");
    ok(&[
        "generate",
        "random",
        "--n",
        "80",
        "--m",
        "3",
        "--t",
        "3",
        "--seed",
        "4",
        "--out",
        s(&input),
    ]);
    for algo in ["small", "all"] {
        let mut files = Vec::new();
        for round in 0..2 {
            let c = path(&dir, &format!("{algo}{round}.c.json"));
            let r = path(&dir, &format!("{algo}{round}.r.json"));
            ok(&[
                "solve",
                "--algo",
                algo,
                "--k",
                "3",
                "--seed",
                "9",
                "--in",
                s(&input),
                "--out",
                s(&c),
                "--report",
                s(&r),
            ]);
            files.push((fs::read(&c).unwrap(), fs::read(&r).unwrap()));
        }
        assert_eq!(files[0], files[1], "{algo} is not reproducible");
        let c = path(&dir, &format!("{algo}0.c.json"));
        let r = path(&dir, &format!("{algo}0.r.json"));
        let v = ok(&["verify", "--in", s(&input), "--coloring", s(&c), "--k", "3"]);
        let v: Value = serde_json::from_str(&v).unwrap();
        assert_eq!(v["discrepancy"], json(&r)["discrepancy"]);
        assert_eq!(json(&r)["certified"], true);
    }
    let table = ok(&[
        "solve",
        "--algo",
        "small",
        "--k",
        "2",
        "--in",
        s(&input),
        "--pretty",
        "--precision",
        "f32",
    ]);
    assert!(table.contains("certified"));
}

#[test]
fn verify_checks_shapes() {
    let dir = TempDir::new().unwrap();
    let input = write(
        &dir,
        "i.json",
        r#"{"n": 3, "functions": [{"sets": [[0, 1], [2]]}]}"#,
    );
    let uniform = write(
        &dir,
        "y.json",
        r#"{"k": 2, "Y": [[0.5, 0.5], [0.5, 0.5], [0.5, 0.5]]}"#,
    );
    let v: Value = serde_json::from_str(&ok(&[
        "verify",
        "--in",
        s(&input),
        "--coloring",
        s(&uniform),
        "--k",
        "2",
    ]))
    .unwrap();
    assert_eq!(v["frac_discrepancy"], 0.0);
    let short = write(&dir, "s.json", r#"{"k": 2, "chi": [0, 1]}"#);
    assert_eq!(
        run(&[
            "verify",
            "--in",
            s(&input),
            "--coloring",
            s(&short),
            "--k",
            "2"
        ])
        .status
        .code(),
        Some(1)
    );
    let good = write(&dir, "g.json", r#"{"k": 2, "chi": [0, 1, 1]}"#);
    assert_eq!(
        run(&[
            "verify",
            "--in",
            s(&input),
            "--coloring",
            s(&good),
            "--k",
            "3"
        ])
        .status
        .code(),
        Some(1)
    );
    let v: Value = serde_json::from_str(&ok(&[
        "verify",
        "--in",
        s(&input),
        "--coloring",
        s(&good),
        "--k",
        "2",
    ]))
    .unwrap();
    assert_eq!(v["discrepancy"], 1);
    assert_eq!(v["values"], serde_json::json!([[1, 2]]));
    assert_eq!(v["rainbow"], serde_json::json!([[true, false]]));
}

#[test]
fn bench_grid() {
    let args = [
        "bench",
        "--algo",
        "small",
        "--n",
        "40,60,80",
        "--m",
        "2",
        "--t",
        "2",
        "--k",
        "2,3",
        "--seeds",
        "5",
        "--seed-base",
        "7",
        "--no-timing",
    ];
    let a = ok(&args);
    let lines: Vec<&str> = a.lines().collect();
    assert_eq!(
        lines[0],
        "algo,n,m,t,k,seed,status,discrepancy,bound,ratio,retries,millis"
    );
    assert_eq!(lines.len(), 31);
    for row in &lines[1..] {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols.len(), 12);
        if cols[6] == "ok" {
            assert!(cols[9].parse::<f64>().unwrap() <= 1.0);
        }
    }
    let mut parallel = args.to_vec();
    parallel.extend(["--jobs", "4"]);
    assert_eq!(ok(&parallel), a);
    let mut other = args.to_vec();
    other[14] = "8";
    assert_ne!(ok(&other), a);
}

#[test]
fn bench_records_failures() {
    let out = ok(&[
        "bench",
        "--algo",
        "big",
        "--n",
        "5",
        "--t",
        "2",
        "--k",
        "3",
        "--no-timing",
    ]);
    assert!(out.lines().nth(1).unwrap().contains(",error,"));
}

#[test]
fn oracle_examples() {
    let dir = TempDir::new().unwrap();
    let single = write(
        &dir,
        "one.json",
        r#"{"n": 1, "functions": [{"sets": [[0], [0], [0], [0]]}]}"#,
    );
    let v: Value = serde_json::from_str(&ok(&["oracle", "--in", s(&single), "--k", "2"])).unwrap();
    assert_eq!(v["minimum"], 4);
    let pair = write(
        &dir,
        "two.json",
        r#"{"n": 2, "functions": [{"sets": [[0], [1]]}]}"#,
    );
    let v: Value = serde_json::from_str(&ok(&["oracle", "--in", s(&pair), "--k", "2"])).unwrap();
    assert_eq!(v["minimum"], 0);
    let worse = write(&dir, "c.json", r#"{"k": 2, "chi": [0, 0]}"#);
    let v: Value = serde_json::from_str(&ok(&[
        "oracle",
        "--in",
        s(&pair),
        "--k",
        "2",
        "--compare",
        s(&worse),
    ]))
    .unwrap();
    assert_eq!(v["compare"]["gap"], 2);
}

#[test]
fn oracle_guard() {
    let dir = TempDir::new().unwrap();
    let input = path(&dir, "i.json");
    ok(&[
        "generate",
        "random",
        "--n",
        "30",
        "--m",
        "2",
        "--t",
        "2",
        "--out",
        s(&input),
    ]);
    let out = run(&["oracle", "--in", s(&input), "--k", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("SPARSEDISC_MAX_ENUM"));
    let small = path(&dir, "s.json");
    ok(&[
        "generate",
        "random",
        "--n",
        "8",
        "--m",
        "2",
        "--t",
        "2",
        "--out",
        s(&small),
    ]);
    let out = bin()
        .args(["oracle", "--in", s(&small), "--k", "2"])
        .env("SPARSEDISC_MAX_ENUM", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

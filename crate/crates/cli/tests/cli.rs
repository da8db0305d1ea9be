use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_twopoint"));
    c.env_remove("TWOPOINT_OUTPUT_DIR");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("twopoint-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn write_k5(dir: &Path) -> PathBuf {
    let mut text = String::from("5 10\n");
    for u in 0..5 {
        for v in u + 1..5 {
            text += &format!("{u} {v}\n");
        }
    }
    let path = dir.join("k5.txt");
    std::fs::write(&path, text).unwrap();
    path
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn solve_complete_graph() {
    let dir = scratch("solve");
    let k5 = write_k5(&dir);
    let o = run(&["solve", "--graph-file", k5.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("alpha=1\n"));
}

#[test]
fn predict_writes_report() {
    let dir = scratch("predict");
    let out = dir.join("out.json");
    let o = run(&["predict", "--n", "100000", "--p", "0.01", "--json", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let r = &v["result"];
    assert!(r["k_z"].as_u64().unwrap() <= r["k_x"].as_u64().unwrap());
    assert_eq!(r["predicted_interval"][0], r["k_z"]);
    assert_eq!(v["config"]["predict"]["n"], 100000);
    assert_eq!(r["point"]["epsilon"].as_f64().unwrap(), 2.0 / 3.0 + 0.01f64.ln() / 100000f64.ln());
}

#[test]
fn predict_with_ratio_runs_exact_check() {
    let o = run(&["predict", "--n", "100", "--p", "1/5", "--unit-kx"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["exact_check"]["agrees"], true);
    assert_eq!(v["result"]["exact_check"]["k_x"], v["result"]["k_x"]);
}

#[test]
fn power_notation() {
    let o = run(&["predict", "--n", "1000", "--p", "n^-0.6"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["result"]["point"]["p"].as_f64().unwrap() - 1000f64.powf(-0.6)).abs() < 1e-15);
    assert_eq!(v["config"]["predict"]["model"]["p"], "n^-0.6");
}

#[test]
fn validation_errors_exit_1() {
    let dir = scratch("validation");
    for args in [
        vec!["predict", "--n", "100", "--p", "0.1", "--c", "2"],
        vec!["predict", "--n", "100"],
        vec!["predict", "--n", "100", "--p", "1.5"],
        vec!["predict", "--n", "1", "--p", "0.5"],
        vec!["concentrate", "--n", "10", "--p", "0.5", "--trials", "0"],
        vec!["frobnicate"],
        vec!["predict", "--n", "10", "--p", "0.5", "--bogus"],
        vec!["solve", "--graph-file", "/nonexistent/graph.txt"],
    ] {
        assert_eq!(run(&args).status.code(), Some(1), "{args:?}");
    }
    let blocker = dir.join("file");
    std::fs::write(&blocker, "").unwrap();
    let target = blocker.join("out.json");
    let o = run(&["predict", "--n", "100", "--p", "0.1", "--json", target.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn budget_exhaustion_exits_2() {
    let dir = scratch("budget");
    let g = run(&["sample", "--n", "120", "--p", "0.5", "--seed", "3"]);
    let path = dir.join("g.txt");
    std::fs::write(&path, g.stdout).unwrap();
    let o = run(&["solve", "--graph-file", path.to_str().unwrap(), "--max-nodes", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["concentrate", "--n", "60", "--p", "0.5", "--trials", "5", "--max-nodes", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn trees_residuals_are_zero() {
    let dir = scratch("trees");
    let csv = dir.join("trees.csv");
    let o = run(&["trees", "--n", "400", "--c", "1.0", "--trials", "200", "--seed", "7", "--csv", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("trial,t,stars,alpha,alpha_H,residual"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 200);
    assert!(rows.iter().all(|r| r.ends_with(",0")));
}

#[test]
fn sample_formats() {
    let a = run(&["sample", "--n", "30", "--p", "0.2", "--seed", "5"]);
    let b = run(&["sample", "--n", "30", "--c", "6", "--seed", "5"]);
    assert_eq!(a.stdout, b.stdout);
    let m = stdout(&run(&["sample", "--n", "30", "--m", "17", "--seed", "5"]));
    assert!(m.starts_with("30 17\n"));
    assert_eq!(m.lines().count(), 18);
}

#[test]
fn augmented_reports_order() {
    let dir = scratch("augmented");
    let path = dir.join("c5.txt");
    std::fs::write(&path, "5 5\n0 1\n1 2\n2 3\n3 4\n0 4\n").unwrap();
    let o = run(&["augmented", "--graph-file", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("alpha=2\n"));
    assert!(s.contains("alpha_hat=2\n"));
    assert!(s.contains("order=2 r=1\n"), "{s}");
}

#[test]
fn config_file_and_output_dir() {
    let dir = scratch("config");
    let cfg = dir.join("run.json");
    std::fs::write(&cfg, r#"{"n": 30, "p": "1/2", "trials": 40, "seed": 9, "csv": "hist.csv", "json": "sub/summary.json"}"#)
        .unwrap();
    let o = bin()
        .args(["concentrate", "--config", cfg.to_str().unwrap(), "--trials", "20"])
        .env("TWOPOINT_OUTPUT_DIR", &dir)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("sub/summary.json")).unwrap()).unwrap();
    assert_eq!(v["result"]["plan"]["trials"], 20);
    assert_eq!(v["result"]["plan"]["seed"], 9);
    assert_eq!(v["config"]["concentrate"]["trials"]["budget"]["time_limit"], 60.0);
    let hist = std::fs::read_to_string(dir.join("hist.csv")).unwrap();
    let total: u64 = hist.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(total, 20);
}

#[test]
fn outputs_are_byte_identical_across_runs_and_threads() {
    let dir = scratch("determinism");
    let runs: [(&str, &[&str]); 2] = [
        ("concentrate", &["--n", "40", "--p", "0.3", "--trials", "50", "--seed", "4"]),
        ("trees", &["--n", "100", "--c", "2", "--trials", "60", "--seed", "3"]),
    ];
    for (cmd, args) in runs {
        let mut files = Vec::new();
        for (i, threads) in ["1", "3", "1"].iter().enumerate() {
            let sub = dir.join(format!("{cmd}-{i}"));
            let o = bin()
                .arg(cmd)
                .args(args)
                .args(["--threads", threads, "--csv", "out.csv", "--json", "out.json"])
                .env("TWOPOINT_OUTPUT_DIR", &sub)
                .output()
                .unwrap();
            assert_eq!(o.status.code(), Some(0));
            files.push((o.stdout, std::fs::read(sub.join("out.csv")).unwrap(), std::fs::read(sub.join("out.json")).unwrap()));
        }
        assert!(files.windows(2).all(|w| w[0] == w[1]), "{cmd}");
    }
}

#[test]
fn check_suite_passes() {
    let o = run(&["check", "--random", "2000"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("ok")).count(), 6);
}

#[test]
fn sweep_csv() {
    let o = run(&["sweep", "--n", "100,1000", "--p", "n^-0.6,0.1,0.99999"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines.len(), 7);
    assert!(lines[0].starts_with("n,p,epsilon,regime,k_x,k_z,r_z"));
    assert!(lines[1].contains(",dense,"));
}

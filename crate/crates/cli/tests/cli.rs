use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn immunet(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_immunet"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// 2-regular-ish ring with chords, labels starting at 10.
fn ring(dir: &TempDir) -> PathBuf {
    let mut text = String::new();
    for i in 0..30 {
        text.push_str(&format!("{} {}\n", 10 + i, 10 + (i + 1) % 30));
        if i % 3 == 0 {
            text.push_str(&format!("{} {}\n", 10 + i, 10 + (i + 7) % 30));
        }
    }
    write(dir, "ring.edges", &text)
}

#[test]
fn run_on_triangle() {
    let dir = TempDir::new().unwrap();
    write(&dir, "k3.edges", "0 1\n1 2\n2 0\n");
    let o = immunet(&["run", "greedywalk", "k3.edges", "--T", "1.5", "--out", "k3.csv"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("k3.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "step,item,cost,cumulative_cost,fraction_removed,lambda1");
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[1], "0,,0,0,0,2");
    assert!(lines[2].ends_with(",1,1,0.333333333333,1.41421356237"));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("k3.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["result"]["removals"], 1);
    assert!((manifest["result"]["final_lambda1"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-9);
    assert_eq!(manifest["config"]["T"], 1.5);
}

#[test]
fn missing_file_is_a_usage_error_naming_the_path() {
    let dir = TempDir::new().unwrap();
    let o = immunet(&["run", "greedywalk", "absent.edges", "--T", "1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("absent.edges"));
}

#[test]
fn usage_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    write(&dir, "k3.edges", "0 1\n1 2\n2 0\n");
    write(&dir, "bad.edges", "0 1\n1 x\n");
    for args in [
        vec!["run", "nonsense", "k3.edges"],
        vec!["run", "greedywalk", "k3.edges"],
        vec!["run", "greedywalk", "bad.edges", "--T", "1"],
        vec!["run", "greedywalk-nonuniform", "k3.edges"],
        vec!["validate", "nonsense"],
        vec!["run", "productdegree", "k3.edges", "--stop", "budget"],
    ] {
        let o = immunet(&args, dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
    let o = immunet(&["run", "greedywalk", "bad.edges", "--T", "1"], dir.path());
    assert!(stderr(&o).contains("line 2"));
}

#[test]
fn output_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    ring(&dir);
    for alg in ["greedywalk", "hybrid", "hitwalks-first"] {
        let a = immunet(&["run", alg, "ring.edges", "--T", "2.1"], dir.path());
        let b = immunet(&["run", alg, "ring.edges", "--T", "2.1"], dir.path());
        assert!(a.status.success(), "{alg}: {}", stderr(&a));
        assert_eq!(a.stdout, b.stdout, "{alg}");
    }
}

#[test]
fn single_algorithm_compare_matches_run() {
    let dir = TempDir::new().unwrap();
    ring(&dir);
    let run = stdout(&immunet(&["run", "productdegree", "ring.edges", "--T", "2.1"], dir.path()));
    let cmp = immunet(&["compare", "ring.edges", "--T", "2.1", "--algorithms", "productdegree"], dir.path());
    assert!(cmp.status.success(), "{}", stderr(&cmp));
    let cmp = stdout(&cmp);
    let run_col: Vec<&str> = run.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    let cmp_col: Vec<&str> = cmp.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(cmp.lines().next().unwrap(), "step,fraction_removed,productdegree");
    assert_eq!(run_col, cmp_col);
}

#[test]
fn compare_uses_one_grid() {
    let dir = TempDir::new().unwrap();
    ring(&dir);
    let o = immunet(&["compare", "ring.edges", "--T", "1.2", "--stop", "budget", "--budget", "0.25m"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    assert_eq!(header.len(), 2 + 7);
    // 40 edges, budget 10: rows for 0..=10 removals, every column filled.
    assert_eq!(text.lines().count(), 1 + 11);
    assert!(text.lines().all(|l| !l.contains(",,")));
}

#[test]
fn config_file_fills_in_and_flags_win() {
    let dir = TempDir::new().unwrap();
    ring(&dir);
    write(&dir, "c.toml", "T = 1.9\nbudget = \"3\"\n");
    let o = immunet(&["run", "greedywalk", "ring.edges", "--config", "c.toml", "--out", "a.csv"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(std::fs::read_to_string(dir.path().join("a.csv")).unwrap().lines().count(), 1 + 4);
    let o = immunet(&["run", "greedywalk", "ring.edges", "--config", "c.toml", "--budget", "5", "--out", "b.csv"], dir.path());
    assert!(o.status.success());
    let m: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("b.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(m["config"]["T"], 1.9);
    assert_eq!(m["config"]["budget"], "5");
    assert_eq!(m["result"]["removals"], 5);
}

#[test]
fn node_algorithms_and_costs() {
    let dir = TempDir::new().unwrap();
    ring(&dir);
    write(&dir, "costs.txt", "10 100\n13 100\n");
    for alg in ["greedywalk-nodes", "degree-nodes", "eigenscore-nodes"] {
        let o = immunet(&["run", alg, "ring.edges", "--T", "2", "--cost-file", "costs.txt"], dir.path());
        assert!(o.status.success(), "{alg}: {}", stderr(&o));
        let text = stdout(&o);
        let last: f64 = text.lines().last().unwrap().rsplit(',').next().unwrap().parse().unwrap();
        assert!(last < 2.0 * 1.05, "{alg}");
    }
}

#[test]
fn nonuniform_rates() {
    let dir = TempDir::new().unwrap();
    let g = ring(&dir);
    let text = std::fs::read_to_string(g).unwrap();
    let rates: String = text
        .lines()
        .enumerate()
        .map(|(i, l)| format!("{l} {}\n", 0.2 + 0.05 * (i % 5) as f64))
        .collect();
    write(&dir, "rates.txt", &rates);
    let o = immunet(
        &["run", "greedywalk-nonuniform", "ring.edges", "--rates-file", "rates.txt", "--delta", "0.5"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let last: f64 = stdout(&o).lines().last().unwrap().rsplit(',').next().unwrap().parse().unwrap();
    assert!(last < 0.5 * 1.05);
}

#[test]
fn validate_suites_pass_and_spot_check_plans() {
    let dir = TempDir::new().unwrap();
    ring(&dir);
    let o = immunet(&["run", "greedywalk", "ring.edges", "--T", "2.1", "--out", "plan.csv"], dir.path());
    assert!(o.status.success());
    let o = immunet(
        &["validate", "oracles", "--count", "10", "--graph", "ring.edges", "--plan", "plan.csv", "--out", "r.json"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS plan λ₁ recomputable"));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["suite"], "oracles");

    let o = immunet(&["validate", "adversarial", "--Tprime", "4"], dir.path());
    assert!(o.status.success());
    assert!(stdout(&o).contains("T' 4: witness"));
    for suite in ["pruning-bounds", "spectral-bounds"] {
        let o = immunet(&["validate", suite, "--count", "5"], dir.path());
        assert!(o.status.success(), "{suite}: {}", stdout(&o));
    }
}

#[test]
fn tampered_plan_fails_with_counterexample() {
    let dir = TempDir::new().unwrap();
    ring(&dir);
    immunet(&["run", "greedywalk", "ring.edges", "--T", "2.1", "--out", "plan.csv"], dir.path());
    let text = std::fs::read_to_string(dir.path().join("plan.csv")).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let last = lines.len() - 1;
    let (head, _) = lines[last].rsplit_once(',').unwrap();
    lines[last] = format!("{head},9.5");
    write(&dir, "plan.csv", &(lines.join("\n") + "\n"));
    let o = immunet(&["validate", "oracles", "--count", "2", "--graph", "ring.edges", "--plan", "plan.csv"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("counterexample"));
}

#[test]
fn make_adversarial_round_trips() {
    let dir = TempDir::new().unwrap();
    let o = immunet(&["make-adversarial", "--Tprime", "3", "--out", "adv.edges"], dir.path());
    assert!(o.status.success());
    let m: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("adv.edges.manifest.json")).unwrap()).unwrap();
    assert_eq!(m["instance"]["q"], 9);
    assert_eq!(m["instance"]["witness_edges"].as_array().unwrap().len(), 11);
    let o = immunet(&["run", "productdegree", "adv.edges", "--T", "3"], dir.path());
    assert!(o.status.success());
    assert!(stdout(&o).lines().count() - 2 >= 9);
}

#[test]
fn sis_writes_sorted_times() {
    let dir = TempDir::new().unwrap();
    ring(&dir);
    let o = immunet(&["sis", "ring.edges", "--beta", "0.2", "--runs", "30", "--seed", "4"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let times: Vec<f64> = stdout(&o).lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(times.len(), 30);
    assert!(times.windows(2).all(|w| w[0] <= w[1]));
    let again = immunet(&["sis", "ring.edges", "--beta", "0.2", "--runs", "30", "--seed", "4"], dir.path());
    assert_eq!(o.stdout, again.stdout);
    let o = immunet(&["sis", "ring.edges", "--initial", "10,99"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

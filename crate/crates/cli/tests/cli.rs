use std::path::PathBuf;

use assert_cmd::Command;
use serde_json::Value;
use tempfile::TempDir;

fn triboot() -> Command {
    Command::cargo_bin("triboot").unwrap()
}

fn run(args: &[&str]) -> (i32, String) {
    let out = triboot().args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn json(args: &[&str]) -> (i32, Value) {
    let (code, s) = run(args);
    (code, serde_json::from_str(&s).unwrap_or_else(|e| panic!("{s}: {e}")))
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

const STAR4: &str = r#"{"n":4,"edges":[[0,1],[0,2],[0,3]]}"#;
const K4: &str = r#"{"n":4,"edges":[[0,1],[0,2],[0,3],[1,2],[1,3],[2,3]]}"#;

#[test]
fn wsat_of_k5_is_four() {
    let (code, out) = run(&["wsat", "--complete", "5"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "4");
    let (_, v) = json(&["wsat", "--complete", "5", "--detail"]);
    assert_eq!(v["value"], 4);
    assert_eq!(v["witness"]["edges"].as_array().unwrap().len(), 4);
}

#[test]
fn census_above_the_emptiness_line_is_zero() {
    let (code, out) = run(&["census", "--ell", "3", "--v", "3", "--w", "7"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "0");
    let (_, v) = json(&["census", "--ell", "3", "--v", "4", "--w", "0", "--detail"]);
    assert_eq!(v["base_count"], 16);
    assert_eq!(v["count"], 64);
    assert_eq!(v["within_bound"], true);
}

#[test]
fn closure_of_a_star_in_k4() {
    let dir = TempDir::new().unwrap();
    let s = write(&dir, "star.json", STAR4);
    let k = write(&dir, "k4.json", K4);
    let (code, v) = json(&["closure", "--starter", s.to_str().unwrap(), "--ambient", k.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["steps"].as_array().unwrap().len(), 3);
    assert_eq!(v["fully_activated"], true);
    let (_, w) = json(&["closure", "--starter", s.to_str().unwrap(), "--ambient", k.to_str().unwrap(), "--seed", "4"]);
    assert_eq!(w["closure"], v["closure"]);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["wsat"]).0, 2);
    assert_eq!(run(&["no-such-command"]).0, 2);
    assert_eq!(run(&["closure", "--starter", "/nonexistent", "--ambient", "/nonexistent"]).0, 2);
    assert_eq!(run(&["gen", "--n", "5"]).0, 2);
}

#[test]
fn version_lists_schemas() {
    let (code, out) = run(&["--version"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("triboot "));
    assert!(out.contains("schemas: graph v1"));
}

#[test]
fn gen_is_seeded_and_feeds_other_commands() {
    let dir = TempDir::new().unwrap();
    let (_, a) = run(&["gen", "--n", "40", "--c", "1.6", "--seed", "3"]);
    let (_, b) = run(&["gen", "--n", "40", "--c", "1.6", "--seed", "3"]);
    assert_eq!(a, b);
    let g = write(&dir, "g.json", &a);
    let g = g.to_str().unwrap();
    let (code, t) = json(&["build-tree4", "--graph", g]);
    assert!(code == 0 || code == 1);
    assert_eq!(t["activated"], code == 0);
    let (code, h) = json(&["build-hampath", "--graph", g, "--seed", "1"]);
    assert_eq!(h["activated"], code == 0);
    let (code, sc) = json(&["check-sc", "--graph", g]);
    assert_eq!(sc["verdict"] == "basis-contractible", code == 0);
    let (_, edges) = run(&["gen", "--model", "cycle", "--n", "5", "--format", "edges"]);
    let c5 = write(&dir, "c5.txt", &edges);
    assert_eq!(run(&["wsat", "--graph", c5.to_str().unwrap()]).1.trim(), "5");
    let (code, _) = json(&["find-tree", "--graph", c5.to_str().unwrap()]);
    assert_eq!(code, 1);
}

#[test]
fn check_sc_on_a_hollow_cycle_says_no() {
    let dir = TempDir::new().unwrap();
    let (_, edges) = run(&["gen", "--model", "cycle", "--n", "5"]);
    let c5 = write(&dir, "c5.json", &edges);
    let (code, v) = json(&["check-sc", "--graph", c5.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(v["verdict"], "not-simply-connected");
    assert_eq!(v["betti1"], 1);
    let k = write(&dir, "k4.json", K4);
    let (code, v) = json(&["check-sc", "--graph", k.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["certificates"].as_array().unwrap().len(), 3);
}

#[test]
fn diagrams_and_reduction_from_a_process_file() {
    let dir = TempDir::new().unwrap();
    let proc = r#"{"starter":[[0,1],[0,2],[0,3]],"steps":[{"edge":[1,2],"triangle":[0,1,2]},{"edge":[2,3],"triangle":[0,2,3]}],"n":4}"#;
    let p = write(&dir, "p.json", proc);
    let p = p.to_str().unwrap();
    for kind in ["algorithmic", "filling"] {
        let (code, d) = json(&["diagram", "--process", p, "--cycle", "0,1,2", "--kind", kind]);
        assert_eq!(code, 0, "{kind}");
        assert_eq!(d["faces"].as_array().unwrap().len(), 1);
    }
    // The step activating 23 is superfluous, so no marked edge carries it.
    assert_eq!(run(&["diagram", "--process", p, "--cycle", "0,1,2", "--kind", "activation"]).0, 2);
    let (code, r) = json(&["reduce-nice", "--process", p, "--cycle", "0,1,2"]);
    assert_eq!(code, 0);
    assert_eq!(r["process"]["steps"].as_array().unwrap().len(), 1);
    assert!(r["ledger"]["edges"].as_array().unwrap().iter().all(|e| e["excess"].as_i64().unwrap() >= 0));
    let nice = write(&dir, "nice.json", &serde_json::to_string(&r["process"]).unwrap());
    let (code, d) = json(&["diagram", "--process", nice.to_str().unwrap(), "--cycle", "0,1,2"]);
    assert_eq!(code, 0);
    assert_eq!(d["internal"].as_array().unwrap().len(), 4);
    assert_eq!(run(&["diagram", "--process", p, "--cycle", "0,1,3,2"]).0, 2);
}

#[test]
fn lm_commands() {
    let dir = TempDir::new().unwrap();
    let (code, v) = json(&["lm-sample", "--n", "6", "--p", "1", "--seed", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["triangles"].as_array().unwrap().len(), 20);
    let x = write(&dir, "x.json", &serde_json::to_string(&v).unwrap());
    let (code, s) = json(&["lm-star", "--complex", x.to_str().unwrap()]);
    assert_eq!((code, s["activated"].clone()), (0, Value::Bool(true)));
    let (code, s) = json(&["lm-star", "--n", "30", "--p", "0", "--seed", "1"]);
    assert_eq!((code, s["activated"].clone()), (1, Value::Bool(false)));
    assert_eq!(run(&["lm-sample", "--n", "6", "--p", "2", "--seed", "1"]).0, 2);
}

#[test]
fn sweep_is_reproducible_and_jobs_do_not_matter() {
    let dir = TempDir::new().unwrap();
    let base = ["sweep", "--model", "gnp-tree4", "--n-list", "50,80", "--c-list", "1.0,2.0", "--trials", "4", "--seed", "7", "--no-timestamp"];
    let one = triboot().args(base).args(["--jobs", "1"]).output().unwrap();
    let two = triboot().args(base).args(["--jobs", "2"]).output().unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, two.stdout);
    let csv = String::from_utf8(one.stdout).unwrap();
    assert!(csv.starts_with("model,n,p,c,trial,seed,outcome,diag_json\n"));
    assert_eq!(csv.lines().count(), 17);

    let cfg = write(&dir, "sweep.toml", "model = \"lm-star\"\nn_list = [30]\nc_list = [0.5, 3.0]\ntrials = 3\nmaster_seed = 1\n");
    let out = dir.path().join("out");
    let (code, v) = json(&["sweep", "--config", cfg.to_str().unwrap(), "--out-dir", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["cells"].as_array().unwrap().len(), 2);
    let written = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert!(written.starts_with("# generated"));
    assert!(out.join("summary.json").exists());
}

#[test]
fn verify_quick_passes() {
    let (code, v) = json(&["verify", "--quick", "--seed", "5"]);
    assert_eq!(code, 0);
    assert_eq!(v["passed"], true);
    assert_eq!(v["properties"].as_array().unwrap().len(), 5);
    let (code, human) = run(&["--human", "verify", "--quick", "--seed", "5"]);
    assert_eq!(code, 0);
    assert_eq!(human.lines().filter(|l| l.starts_with("PASS")).count(), 5);
}

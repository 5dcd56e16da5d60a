use std::path::Path;
use std::process::{Command, Output};

use hypermatch::format::{read_h3, read_meta, to_h3_string};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypermatch"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_writes_instance_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let star = dir.path().join("star9.h3");
    let out = run(&["gen", "star", "--n", "9", "--out", path_str(&star)]);
    assert!(out.status.success());
    let h = read_h3(&star).unwrap();
    assert_eq!(h.edge_count(), 49);
    assert_eq!(std::fs::read_to_string(&star).unwrap(), to_h3_string(&h));
    let meta = read_meta(&dir.path().join("star9.json")).unwrap();
    assert_eq!(meta.kind, "star");
    assert_eq!(meta.partition.unwrap().w_size(), 2);

    let hnd = dir.path().join("hnd.h3");
    assert!(run(&["gen", "hnd", "--n", "9", "--d", "3", "--out", path_str(&hnd)]).status.success());
    assert_eq!(read_h3(&hnd).unwrap().edge_count(), 63);

    let out = run(&["gen", "random", "--n", "12", "--p", "0", "--seed", "1"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "12 0\n");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["gen", "hnd", "--n", "9"]).status.code(), Some(2));
    assert_eq!(run(&["gen", "star", "--n", "10"]).status.code(), Some(2));
    assert_eq!(run(&["solve", "--exact", "--augment", "x.h3"]).status.code(), Some(2));
    assert_eq!(run(&["solve", "/nonexistent/file.h3"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn solve_methods() {
    let dir = tempfile::tempdir().unwrap();
    let star = dir.path().join("star9.h3");
    let hnd = dir.path().join("hnd12_4.h3");
    let pert = dir.path().join("perturbed_hnd30_10.h3");
    run(&["gen", "star", "--n", "9", "--out", path_str(&star)]);
    run(&["gen", "hnd", "--n", "12", "--d", "4", "--out", path_str(&hnd)]);
    run(&["gen", "hnd", "--n", "30", "--d", "10", "--remove", "5", "--seed", "2", "--out", path_str(&pert)]);

    let out = run(&["solve", "--exact", path_str(&star)]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["schema"], "hypermatch.solve.v1");
    assert_eq!((v["size"].as_u64(), v["optimal"].as_bool()), (Some(2), Some(true)));

    let v = json(&run(&["solve", "--augment", path_str(&hnd), "--d", "4"]));
    assert_eq!(v["size"], 4);

    let v = json(&run(&["solve", "--extremal", path_str(&pert), "--d", "10"]));
    assert_eq!(v["size"], 10);
    assert_eq!(v["stages"]["schema"], "hypermatch.stages.v1");

    std::fs::remove_file(dir.path().join("perturbed_hnd30_10.json")).unwrap();
    let v = json(&run(&["solve", "--extremal", path_str(&pert), "--d", "10", "--mode", "local"]));
    assert_eq!(v["size"], 10);

    let v = json(&run(&["solve", "--augment", path_str(&star), "--explain"]));
    assert_eq!(v["size"], 2);
    assert!(v["failure"].as_str().unwrap().contains("stalled"));
    assert!(v["explain"]["deficiency"].is_u64());

    let k15 = dir.path().join("k15.h3");
    run(&["gen", "random", "--n", "15", "--p", "1", "--out", path_str(&k15)]);
    let v = json(&run(&["solve", "--absorbing", path_str(&k15)]));
    assert_eq!(v["size"], 5);
    assert!(v["absorbing"]["success"].as_bool().unwrap());
}

#[test]
fn exact_budget_exhaustion_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("r.h3");
    run(&["gen", "random", "--n", "24", "--p", "0.05", "--seed", "3", "--out", path_str(&f)]);
    let out = run(&["solve", "--exact", path_str(&f), "--budget-nodes", "2"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["optimal"], false);
}

#[test]
fn degrees_and_closeness() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("star6.h3");
    run(&["gen", "star", "--n", "6", "--out", path_str(&f)]);
    let v = json(&run(&["degrees", path_str(&f)]));
    assert_eq!(v["profile"]["delta1"], 4);
    let hnd = dir.path().join("hnd.h3");
    run(&["gen", "hnd", "--n", "9", "--d", "3", "--out", path_str(&hnd)]);
    let v = json(&run(&["closeness", path_str(&hnd), "--d", "3", "--mode", "exhaustive"]));
    assert_eq!(v["deficiency"], 0);
    assert_eq!(v["schema"], "hypermatch.closeness.v1");
}

#[test]
fn verify_suites() {
    let out = run(&["verify", "fact1"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["patterns"], 512);
    assert_eq!(v["violations"].as_array().unwrap().len(), 0);

    let out = run(&["verify", "tightness", "--n-max", "15"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
    assert_eq!(v["ok"], true);

    let a = run(&["verify", "thresholds", "--n", "6", "--d", "2"]);
    let b = run(&["verify", "thresholds", "--n", "6", "--d", "2"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["hypergraphs"], 1u64 << 20);
    assert_eq!(v["threshold"], 4);
}

#[test]
fn sweep_csv() {
    let out = run(&["sweep", "--n", "9", "--trials", "0"]);
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "n,d,p,seed,delta1,threshold,oracle_size,augment_size,agree\n"
    );
    let args = ["sweep", "--n", "12", "--trials", "5", "--p", "0.5,0.8", "--seed", "4"];
    let a = run(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_hypermatch"))
        .args(args)
        .env("HYPERMATCH_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert_eq!(text.lines().count(), 11);
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    for rec in rdr.records() {
        let rec = rec.unwrap();
        assert_eq!(&rec[0], "12");
        assert!(rec[7].parse::<usize>().unwrap() <= rec[6].parse::<usize>().unwrap());
    }
    let bad = Command::new(env!("CARGO_BIN_EXE_hypermatch"))
        .args(["sweep", "--n", "9", "--trials", "0"])
        .env("HYPERMATCH_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

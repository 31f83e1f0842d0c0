use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn nnreduce(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nnreduce"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn generate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for kind in ["random-gp", "degenerate-grid", "collinear", "random-1d"] {
        let a = nnreduce(dir.path(), &["generate", kind, "--n", "6", "--m", "3", "--seed", "7"]);
        let b = nnreduce(dir.path(), &["generate", kind, "--n", "6", "--m", "3", "--seed", "7"]);
        assert_eq!(code(&a), 0, "{kind}");
        assert_eq!(a.stdout, b.stdout, "{kind}");
    }
    let json = nnreduce(dir.path(), &["generate", "random-gp", "--n", "5", "--json"]);
    assert!(stdout(&json).trim_start().starts_with('{'));
}

#[test]
fn solve_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    for (kind, method) in [
        ("random-gp", "relevant points"),
        ("random-1d", "line solver"),
        ("degenerate-grid", "exact search"),
    ] {
        let n = if kind == "degenerate-grid" { "3" } else { "9" };
        assert_eq!(code(&nnreduce(p, &["generate", kind, "--n", n, "--seed", "3", "-o", "i.txt"])), 0);
        let s = nnreduce(p, &["solve", "i.txt", "-o", "s.txt"]);
        assert_eq!(code(&s), 0, "{kind}");
        assert!(stdout(&s).contains(method), "{kind}: {}", stdout(&s));
        let v = nnreduce(p, &["verify", "i.txt", "s.txt"]);
        assert_eq!(code(&v), 0, "{kind}");
    }
}

#[test]
fn verify_prints_counterexample() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::write(p.join("i.txt"), "2 2 3\n0 0 1\n4 0 2\n0 4 2\n").unwrap();
    fs::write(p.join("s.txt"), "0\n1\n").unwrap();
    let v = nnreduce(p, &["verify", "i.txt", "s.txt"]);
    assert_eq!(code(&v), 1);
    assert!(stdout(&v).contains("counterexample:"));
}

#[test]
fn relevant_methods_agree() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    nnreduce(p, &["generate", "collinear", "--n", "7", "--seed", "1", "-o", "i.txt"]);
    let r = nnreduce(p, &["relevant", "i.txt", "--method", "both", "--witnesses"]);
    assert_eq!(code(&r), 0);
    assert!(!stdout(&r).contains("disagree"));
}

#[test]
fn render_writes_svg() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::write(p.join("i.txt"), "2 2 2\n0 0 1\n4 0 2\n").unwrap();
    fs::write(p.join("s.txt"), "0\n1\n").unwrap();
    let r = nnreduce(p, &["render", "i.txt", "--subset", "s.txt", "--svg", "o.svg"]);
    assert_eq!(code(&r), 0);
    let svg = fs::read_to_string(p.join("o.svg")).unwrap();
    assert_eq!(svg.matches("class=\"decision\"").count(), 1);
    assert_eq!(svg.matches("class=\"member\"").count(), 2);
}

#[test]
fn reduce_sat_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::write(p.join("f.sat"), "c one clause\np vcmax2sat 2 1 1\n1 -2\n").unwrap();
    let r = nnreduce(
        p,
        &["reduce-sat", "f.sat", "--instance", "i.txt", "--manifest", "m.json", "--svg", "l.svg"],
    );
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(p.join("m.json")).unwrap()).unwrap();
    let n = m["points"].as_u64().unwrap();
    assert_eq!(m["n2"], 5);
    assert_eq!(m["target_size"], m["n1"].as_u64().unwrap() + 4);
    let header = fs::read_to_string(p.join("i.txt")).unwrap();
    assert!(header.starts_with(&format!("2 2 {n}\n")));
    assert!(fs::read_to_string(p.join("l.svg")).unwrap().contains("class=\"region\""));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(code(&nnreduce(p, &["solve", "missing.txt"])), 2);
    fs::write(p.join("bad.txt"), "2 2 1\n0 0 9\n").unwrap();
    assert_eq!(code(&nnreduce(p, &["solve", "bad.txt"])), 2);
    fs::write(p.join("f.sat"), "p vcmax2sat 6 3 1\n1 4\n2 5\n3 6\n").unwrap();
    let r = nnreduce(p, &["reduce-sat", "f.sat", "--instance", "i.txt", "--manifest", "m.json"]);
    assert_eq!(code(&r), 2);
    // A 5x5 grid with random labels needs more than two nodes of search.
    nnreduce(p, &["generate", "degenerate-grid", "--n", "5", "--seed", "4", "-o", "g.txt"]);
    let s = nnreduce(p, &["solve", "g.txt", "--budget-nodes", "2", "-o", "s.txt"]);
    assert_eq!(code(&s), 3);
    assert!(p.join("s.txt").exists());
}

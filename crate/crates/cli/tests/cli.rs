use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const SAMPLE: &str = "p cnf 4 3\n1 -2 3 0\n1 3 0\n-1 -3 -4 0\n";
const UNSAT_PAIRS: &str = "p cnf 2 4\n1 2 0\n1 -2 0\n-1 2 0\n-1 -2 0\n";

fn mimham(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mimham"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn setup(cnf: &str) -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("f.cnf"), cnf).unwrap();
    dir
}

#[test]
fn pipeline_round_trip() {
    let dir = setup(SAMPLE);
    let d = dir.path();
    fs::write(d.join("a.txt"), "assign 1=0 2=0 3=1 4=1\n").unwrap();
    assert_eq!(code(&mimham(d, &["reduce", "f.cnf", "-o", "out"])), 0);
    for f in ["instance.txt", "order.txt", "wiring.txt", "manifest.json"] {
        assert!(d.join("out").join(f).exists(), "{f}");
    }
    let cert = mimham(d, &["certify", "out/instance.txt"]);
    assert_eq!(code(&cert), 0);
    assert!(stdout(&cert).contains("(cap 25)"));

    assert_eq!(
        code(&mimham(
            d,
            &["witness", "out/instance.txt", "-a", "a.txt", "-o", "p.txt"]
        )),
        0
    );
    assert_eq!(
        code(&mimham(d, &["respect", "out/instance.txt", "p.txt"])),
        0
    );
    let back = mimham(d, &["extract", "out/instance.txt", "p.txt"]);
    assert_eq!(code(&back), 0);
    assert_eq!(stdout(&back), "assign 1=0 2=0 3=1 4=1\n");

    let solved = mimham(d, &["solve", "out/instance.txt", "-o", "s.txt"]);
    assert_eq!(code(&solved), 0);
    assert!(stdout(&solved).contains("HAMILTONIAN PATH FOUND"));
    let extracted = mimham(d, &["extract", "out/instance.txt", "s.txt"]);
    assert_eq!(code(&extracted), 0);
    assert!(d.join("s.txt.manifest.json").exists());
}

#[test]
fn oracle_witness_satisfies_formula() {
    let dir = setup("p cnf 3 3\n1 2 0\n-1 -2 3 0\n-3 -1 0\n");
    let d = dir.path();
    assert_eq!(code(&mimham(d, &["reduce", "f.cnf", "-o", "out"])), 0);
    assert_eq!(
        code(&mimham(d, &["witness", "out/instance.txt", "-o", "p.txt"])),
        0
    );
    let text = stdout(&mimham(d, &["extract", "out/instance.txt", "p.txt"]));
    let values: Vec<bool> = text
        .split_whitespace()
        .skip(1)
        .map(|t| t.ends_with("=1"))
        .collect();
    let lit = |l: i64| values[l.unsigned_abs() as usize - 1] == (l > 0);
    assert!([[1, 2, 0], [-1, -2, 3], [-3, -1, 0]]
        .iter()
        .all(|c| c.iter().filter(|&&l| l != 0).any(|&l| lit(l))));
}

#[test]
fn cycle_instance_certifies_at_26() {
    let dir = setup(SAMPLE);
    let d = dir.path();
    assert_eq!(
        code(&mimham(d, &["reduce", "f.cnf", "-o", "cyc", "--cycle"])),
        0
    );
    let text = fs::read_to_string(d.join("cyc/instance.txt")).unwrap();
    assert!(text.contains("kind cycle"));
    assert_eq!(text.lines().filter(|l| l.ends_with(" apex")).count(), 1);
    assert_eq!(
        code(&mimham(d, &["certify", "cyc/instance.txt", "--cap", "26"])),
        0
    );
    let solved = mimham(d, &["solve", "cyc/instance.txt"]);
    assert!(stdout(&solved).contains("HAMILTONIAN CYCLE FOUND"));
}

#[test]
fn exit_codes() {
    let dir = setup(UNSAT_PAIRS);
    let d = dir.path();
    assert_eq!(code(&mimham(d, &["reduce", "f.cnf", "-o", "u"])), 0);
    let no = mimham(d, &["solve", "u/instance.txt"]);
    assert_eq!(code(&no), 1);
    assert!(stdout(&no).contains("NO HAMILTONIAN PATH"));
    assert_eq!(
        code(&mimham(d, &["witness", "u/instance.txt", "-o", "w.txt"])),
        1
    );

    let budget = mimham(d, &["solve", "u/instance.txt", "--budget-nodes", "3"]);
    assert_eq!(code(&budget), 5);

    fs::write(d.join("unit.cnf"), "p cnf 1 2\n1 0\n-1 0\n").unwrap();
    let decided = mimham(d, &["reduce", "unit.cnf", "-o", "x"]);
    assert_eq!(code(&decided), 3);
    assert!(stdout(&decided).contains("UNSAT by propagation"));
    assert!(!d.join("x/instance.txt").exists());

    fs::write(d.join("bad.cnf"), "p cnf 2 1\n1 2\n").unwrap();
    assert_eq!(code(&mimham(d, &["reduce", "bad.cnf"])), 2);
    assert_eq!(code(&mimham(d, &["certify", "missing.txt"])), 2);
}

#[test]
fn cap_exceeded_on_matching_graph() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let k = 30;
    let mut text = format!("graph {}\n", 2 * k);
    for i in 0..k {
        text.push_str(&format!("e {i} {} core\n", k + i));
    }
    let order: Vec<String> = (0..2 * k).map(|v| v.to_string()).collect();
    text.push_str(&format!("order {}\n", order.join(" ")));
    fs::write(d.join("kk2.txt"), text).unwrap();
    let out = mimham(d, &["certify", "kk2.txt", "--cap", "25"]);
    assert_eq!(code(&out), 4);
    let matching = stdout(&out)
        .lines()
        .find(|l| l.starts_with("matching"))
        .unwrap()
        .split_whitespace()
        .count()
        - 1;
    assert_eq!(matching, 26);
}

#[test]
fn respect_rejects_swapped_triple() {
    let dir = setup(SAMPLE);
    let d = dir.path();
    mimham(d, &["reduce", "f.cnf", "-o", "out"]);
    mimham(d, &["witness", "out/instance.txt", "-o", "p.txt"]);
    let mut p: Vec<String> = fs::read_to_string(d.join("p.txt"))
        .unwrap()
        .split_whitespace()
        .map(String::from)
        .collect();
    p.swap(4, 5);
    fs::write(d.join("q.txt"), p.join(" ")).unwrap();
    assert_ne!(
        code(&mimham(d, &["respect", "out/instance.txt", "q.txt"])),
        0
    );
}

#[test]
fn outputs_are_reproducible() {
    let dir = setup(SAMPLE);
    let d = dir.path();
    mimham(d, &["reduce", "f.cnf", "-o", "a"]);
    mimham(d, &["reduce", "f.cnf", "-o", "b"]);
    for f in ["instance.txt", "order.txt", "wiring.txt"] {
        assert_eq!(
            fs::read(d.join("a").join(f)).unwrap(),
            fs::read(d.join("b").join(f)).unwrap()
        );
    }
    let manifest = fs::read_to_string(d.join("a/manifest.json")).unwrap();
    assert!(manifest.contains("\"subcommand\": \"reduce\""));
    assert!(manifest.contains("sha256"));
}

#[test]
fn counterexample_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = mimham(d, &["counterexample", "-o", "ce", "--format", "dot"]);
    assert_eq!(code(&out), 0);
    for f in [
        "g.txt",
        "h.txt",
        "cycle.txt",
        "report.txt",
        "g.dot",
        "h.dot",
        "manifest.json",
    ] {
        assert!(d.join("ce").join(f).exists(), "{f}");
    }
    assert!(stdout(&out).contains("G has no Hamiltonian cycle"));
    assert_eq!(
        code(&mimham(
            d,
            &["counterexample", "-o", "none", "--max-n", "2"]
        )),
        1
    );
}

#[test]
fn export_and_gadgets() {
    let dir = setup(SAMPLE);
    let d = dir.path();
    mimham(d, &["reduce", "f.cnf", "-o", "out"]);
    let dot = stdout(&mimham(d, &["export", "out/instance.txt"]));
    assert!(dot.starts_with("graph instance {"));
    assert!(dot.contains("style=dashed"));
    let text = stdout(&mimham(
        d,
        &["export", "out/instance.txt", "--format", "text"],
    ));
    assert_eq!(
        text,
        fs::read_to_string(d.join("out/instance.txt")).unwrap()
    );

    let gadgets = mimham(d, &["gadgets", "-o", "cat"]);
    assert_eq!(code(&gadgets), 0);
    assert_eq!(stdout(&gadgets).matches("contract ok").count(), 2);
    assert!(fs::read_to_string(d.join("cat/gamma3.txt"))
        .unwrap()
        .contains("pair 3"));
}

#[test]
fn slow_gadget_check_regenerates_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let out = mimham(dir.path(), &["gadgets", "--slow-gadget-check"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).matches("identical to catalog").count(), 2);
}

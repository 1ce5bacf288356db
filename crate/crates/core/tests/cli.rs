use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use quasigroups::{format, QTable};

fn qgroup(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qgroup")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_reports_valid_invalid_and_malformed() {
    let dir = tempfile::tempdir().unwrap();
    let xor = write(dir.path(), "xor.txt", "qtable v1 order=2 arity=2\n0 1\n1 0\n");
    let out = qgroup(&["check", s(&xor)]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "valid order=2 arity=2\nmembers=4\nmin-distance=2\n");

    let bad = write(dir.path(), "bad.txt", "qtable v1 order=2 arity=2\n0 1\n0 1\n");
    let out = qgroup(&["check", s(&bad)]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).starts_with("invalid"));

    let broken = write(dir.path(), "broken.txt", "qtable v1 order=2 arity=2\n0 1\n1\n");
    assert_eq!(code(&qgroup(&["check", s(&broken)])), 2);
    assert_eq!(code(&qgroup(&["check", s(&dir.path().join("missing.txt"))])), 2);
    assert_eq!(code(&qgroup(&["frobnicate"])), 2);

    let code_file = write(dir.path(), "code.txt", "mdscode v1 order=2 length=2\n0 0\n0 1\n");
    assert_eq!(code(&qgroup(&["check", s(&code_file)])), 1);
}

#[test]
fn fixture_checks_and_is_irreducible() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("fixture.txt");
    assert_eq!(code(&qgroup(&["fixture", "irreducible-4ary-order4", "-o", s(&f)])), 0);
    assert_eq!(code(&qgroup(&["check", s(&f)])), 0);
    let out = qgroup(&["reduce", s(&f)]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("irreducible\ndtree v1 order=4 arity=5\nouter order=4 arity=5\n"));
    assert!(text.ends_with("groups 1 2 3 4 5\n"));
    let out = qgroup(&["theorem1", s(&f)]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).starts_with("hypothesis not met, k=3"));
}

#[test]
fn reduce_splits_a_group_sum() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    assert_eq!(code(&qgroup(&["gen", "--kind", "group", "--order", "4", "--arity", "3", "-o", s(&g)])), 0);
    assert_eq!(format::parse_qtable(&fs::read_to_string(&g).unwrap()).unwrap(), QTable::cyclic_sum(4, 3).unwrap());
    let out = qgroup(&["reduce", s(&g)]);
    let text = stdout(&out);
    assert!(text.starts_with("reducible\n"));
    let tree = format::parse_dtree(text.split_once('\n').unwrap().1).unwrap();
    assert_eq!(tree.node_count(), 2);
}

#[test]
fn gen_is_deterministic_and_checks() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str, fmt: &str| {
        let p = dir.path().join(name);
        let args = ["gen", "--kind", "random-isotope-of-group", "--order", "3", "--arity", "3", "--seed", seed];
        let out = qgroup(&[&args[..], &["--format", fmt, "-o", s(&p)]].concat());
        assert_eq!(code(&out), 0);
        assert_eq!(code(&qgroup(&["check", s(&p)])), 0);
        fs::read_to_string(p).unwrap()
    };
    assert_eq!(run("a", "5", "qtable"), run("b", "5", "qtable"));
    assert_ne!(run("c", "5", "qtable"), run("d", "6", "qtable"));
    assert!(run("e", "5", "mdscode").starts_with("mdscode v1 order=3 length=4\n"));
}

#[test]
fn planted_instance_through_theorem1() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.txt");
    let out = qgroup(&[
        "gen",
        "--kind",
        "planted-superposition",
        "--order",
        "4",
        "--groups",
        "1,5,6:2,7:3:4",
        "--irreducible-outer",
        "--seed",
        "1",
        "-o",
        s(&p),
    ]);
    assert_eq!(code(&out), 0);
    assert!(fs::read_to_string(&p).unwrap().starts_with("qtable v1 order=4 arity=6\n"));
    assert_eq!(code(&qgroup(&["check", s(&p)])), 0);
    let out = qgroup(&["--threads", "2", "theorem1", s(&p)]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("groupmap=1,1,2"));
    let dec = format::parse_theorem(text.split_once('\n').unwrap().1).unwrap();
    let m = format::parse_qtable(&fs::read_to_string(&p).unwrap()).unwrap();
    assert_eq!(dec.to_predicate().unwrap().defining_table(), &m);
    assert_eq!(stdout(&qgroup(&["--threads", "1", "theorem1", "--strict", s(&p)])), text);
}

#[test]
fn theorem1_rejects_small_arity() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.txt", &format::write_qtable(&QTable::cyclic_sum(3, 2).unwrap()));
    assert_eq!(code(&qgroup(&["theorem1", s(&g)])), 2);
}

#[test]
fn search_budget_exhaustion_fails() {
    let out = qgroup(&["gen", "--kind", "random-search-irreducible", "--order", "3", "--arity", "3", "--budget", "5"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
    let out = qgroup(&["gen", "--kind", "random-search-irreducible", "--order", "4", "--arity", "3", "--seed", "3"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn isotopic_witness_and_refusal() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.txt", &format::write_qtable(&QTable::cyclic_sum(4, 2).unwrap()));
    let shifted = QTable::from_fn(4, 2, |w| (w[0] + w[1] + 1) % 4).unwrap();
    let b = write(dir.path(), "b.txt", &format::write_mdscode(&shifted));
    let klein = QTable::from_fn(4, 2, |w| w[0] ^ w[1]).unwrap();
    let c = write(dir.path(), "c.txt", &format::write_qtable(&klein));

    let out = qgroup(&["isotopic", s(&a), s(&a)]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "isotopic\n0 1 2 3\n0 1 2 3\n0 1 2 3\n");
    let out = qgroup(&["isotopic", s(&a), s(&b)]);
    assert_eq!(code(&out), 0);
    let witness: quasigroups::IsotopyMap = stdout(&out).split_once('\n').unwrap().1.parse().unwrap();
    let pa = quasigroups::QPredicate::from_table(&QTable::cyclic_sum(4, 2).unwrap()).unwrap();
    let pb = quasigroups::QPredicate::from_table(&shifted).unwrap();
    assert_eq!(quasigroups::apply(&pa, &witness).unwrap(), pb);
    let out = qgroup(&["isotopic", s(&a), s(&c)]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout(&out), "not isotopic\n");
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const F1_WEIGHTED: &str = "2\na 2\n0 0 0\n5 1 1 b\nb 2\n0 0 0\n3 0 1 a\n";
const F2: &str = "3\na 1\n0 0 0\nb 3\n0 0 0\n2 0 1 a\n4 0 1 c\nc 2\n0 0 0\n3 1 2 a b\n";

fn wbnsl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wbnsl"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn file(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn f1_insert_example() {
    let dir = tempfile::tempdir().unwrap();
    let f1 = file(dir.path(), "f1.txt", F1_WEIGHTED);
    let out = wbnsl(&["ls", "--distance", "insert", "-r", "1", "-k", "1", "--weighted", s(&f1)]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("a <- b"), "{text}");
    assert!(text.contains("score 5"), "{text}");
    assert!(text.contains("ordering b a"), "{text}");

    let dot = stdout(&wbnsl(&["brute", "-k", "1", "--weighted", s(&f1), "--format", "dot"]));
    assert!(dot.contains("b -> a;"), "{dot}");
}

#[test]
fn witness_orderings_chain_into_the_next_run() {
    let dir = tempfile::tempdir().unwrap();
    let f2 = file(dir.path(), "f2.txt", F2);
    let first = stdout(&wbnsl(&["ls", "--distance", "swap", "-r", "1", s(&f2), "--weighted"]));
    assert!(first.contains("score 4"), "{first}");
    let witness = first.lines().find_map(|l| l.strip_prefix("ordering ")).unwrap();
    let ordering = file(dir.path(), "order.txt", &witness.replace(' ', "\n"));
    let again = stdout(&wbnsl(&["score", s(&f2), "--weighted", "--ordering", s(&ordering)]));
    assert!(again.contains("score 4"), "{again}");
}

#[test]
fn zero_radius_inversions_equal_score() {
    let dir = tempfile::tempdir().unwrap();
    let f2 = file(dir.path(), "f2.txt", F2);
    for k in ["0", "1"] {
        let score = stdout(&wbnsl(&["score", s(&f2), "--weighted", "-k", k, "--format", "json"]));
        let inv = stdout(&wbnsl(&[
            "ls",
            "--distance",
            "inv",
            "-r",
            "0",
            "-k",
            k,
            s(&f2),
            "--weighted",
            "--format",
            "json",
        ]));
        let value = |json: &str| json.lines().find(|l| l.contains("\"score\"")).unwrap().to_owned();
        assert_eq!(value(&score), value(&inv));
    }
}

#[test]
fn exact_invwin_matches_brute() {
    let dir = tempfile::tempdir().unwrap();
    let f2 = file(dir.path(), "f2.txt", F2);
    let exact = stdout(&wbnsl(&[
        "ls",
        "--distance",
        "invwin",
        "--exact",
        "-r",
        "3",
        s(&f2),
        "--weighted",
    ]));
    let brute = stdout(&wbnsl(&[
        "brute",
        "--distance",
        "invwin",
        "-r",
        "3",
        s(&f2),
        "--weighted",
    ]));
    let score = |t: &str| t.lines().find(|l| l.starts_with("score")).unwrap().to_owned();
    assert_eq!(score(&exact), score(&brute));
}

#[test]
fn hillclimb_csv_shape() {
    let dir = tempfile::tempdir().unwrap();
    let f2 = file(dir.path(), "f2.txt", F2);
    let out = wbnsl(&[
        "hillclimb",
        "-r",
        "2",
        "--restarts",
        "3",
        "--seed",
        "7",
        s(&f2),
        "--weighted",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = stdout(&out);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "instance,r,restart,score,iterations");
    assert_eq!(lines.len(), 1 + 3 + 2);
    assert!(lines[4].starts_with("f2,2,avg,"));
    assert_eq!(lines[5], "f2,2,max,4,");
    let named = stdout(&wbnsl(&[
        "hillclimb",
        "--restarts",
        "1",
        "--instance-name",
        "x,y",
        s(&f2),
        "--weighted",
    ]));
    assert!(named.lines().nth(1).unwrap().starts_with("\"x,y\",3,0,"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let f2 = file(dir.path(), "f2.txt", F2);
    let bad = file(dir.path(), "bad.txt", "2\na 1\n0 0\n");
    let order = file(dir.path(), "order.txt", "a\nb\nzz\n");

    assert_eq!(wbnsl(&["--help"]).status.code(), Some(0));
    assert_eq!(wbnsl(&["--version"]).status.code(), Some(0));
    assert_eq!(wbnsl(&[]).status.code(), Some(1));
    assert_eq!(wbnsl(&["ls", s(&f2), "--weighted"]).status.code(), Some(1));
    assert_eq!(
        wbnsl(&["ls", "--distance", "nope", s(&f2), "--weighted"]).status.code(),
        Some(1)
    );
    assert_eq!(
        wbnsl(&["hillclimb", "-r", "16", s(&f2), "--weighted"]).status.code(),
        Some(1)
    );
    assert_eq!(
        wbnsl(&["hillclimb", "--restarts", "0", s(&f2), "--weighted"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        wbnsl(&["score", s(&f2), "--weighted", "--indegree-limit", "-1"])
            .status
            .code(),
        Some(1)
    );

    let missing = wbnsl(&["score", "/definitely/not/here"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(!missing.stderr.is_empty());
    assert!(missing.stdout.is_empty());
    assert_eq!(wbnsl(&["score", s(&bad)]).status.code(), Some(2));
    assert_eq!(
        wbnsl(&["score", s(&f2), "--weighted", "--ordering", s(&order)])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(wbnsl(&["score", s(&f2)]).status.code(), Some(2));
}

#[test]
fn xp_work_bound_refuses_without_force() {
    let dir = tempfile::tempdir().unwrap();
    let f2 = file(dir.path(), "f2.txt", F2);
    let refused = wbnsl(&[
        "ls",
        "--distance",
        "swap",
        "-r",
        "3",
        "--work-bound",
        "5",
        s(&f2),
        "--weighted",
    ]);
    assert_eq!(refused.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&refused.stderr).contains("--force"));
    let forced = wbnsl(&[
        "ls",
        "--distance",
        "swap",
        "-r",
        "3",
        "--work-bound",
        "5",
        "--force",
        s(&f2),
        "--weighted",
    ]);
    assert_eq!(forced.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&forced.stderr).contains("warning"));
}

#[test]
fn assume_empty_score_and_encoders() {
    let dir = tempfile::tempdir().unwrap();
    let partial = file(dir.path(), "p.txt", "2\na 1\n1 1 b\nb 1\n0 0\n");
    assert_eq!(wbnsl(&["score", s(&partial)]).status.code(), Some(2));
    let out = wbnsl(&["score", s(&partial), "--assume-empty-score", "-2.5"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("score -2.5"));

    let f2 = file(dir.path(), "f2.txt", F2);
    let arcs0 = stdout(&wbnsl(&["brute", s(&f2), "--weighted", "--bounded-arcs", "-k", "0"]));
    assert!(arcs0.contains("score 0"), "{arcs0}");
    let arcs1 = stdout(&wbnsl(&["brute", s(&f2), "--weighted", "--bounded-arcs", "-k", "1"]));
    assert!(arcs1.contains("score 4"), "{arcs1}");
}

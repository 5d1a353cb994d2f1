use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_localview"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn localview")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn topology(dir: &Path, name: &str, users: usize, edges: &[(usize, usize)]) -> PathBuf {
    let cross: Vec<String> = edges.iter().map(|(t, r)| format!("{{\"tx\": {t}, \"rx\": {r}}}")).collect();
    let text = format!("{{\"users\": {users}, \"model\": \"connectivity\", \"cross\": [{}]}}", cross.join(", "));
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn d_to_many(dir: &Path) -> PathBuf {
    let edges: Vec<(usize, usize)> =
        (1..=4).flat_map(|i| (1..=6).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    topology(dir, "dtm.json", 6, &edges)
}

fn cyclic(dir: &Path, k: usize) -> PathBuf {
    let edges: Vec<(usize, usize)> = (1..=k).map(|i| (i, i % k + 1)).collect();
    topology(dir, &format!("cyclic{k}.json"), k, &edges)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn alpha_of_four_to_many() {
    let dir = TempDir::new().unwrap();
    let f = d_to_many(dir.path());
    let o = run(&["alpha", s(&f), "--hops", "2"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("alpha(2) = 4/7 (exact)"), "{}", stdout(&o));
    let o = run(&["--json", "alpha", s(&f), "--hops", "1"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["results"]["alpha"]["lower"], "1/5");
    assert_eq!(v["results"]["alpha"]["upper"], "1/5");
    assert_eq!(v["input_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn classify_isolated_and_z() {
    let dir = TempDir::new().unwrap();
    let f = topology(dir.path(), "iso.json", 3, &[]);
    let out = stdout(&run(&["classify", s(&f)]));
    assert_eq!(out.matches("isolated").count(), 3, "{out}");
    let f = topology(dir.path(), "z.json", 2, &[(1, 2)]);
    let out = stdout(&run(&["classify", s(&f)]));
    assert!(out.contains("Z-network"), "{out}");
}

#[test]
fn coded_schedule_round_trips_through_verify() {
    let dir = TempDir::new().unwrap();
    let f = cyclic(dir.path(), 5);
    let sched = dir.path().join("s.json");
    let o = run(&["schedule", s(&f), "--hops", "1", "--coded", "--out", s(&sched)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("value 1/2"));
    let o = run(&["verify", s(&f), "--schedule", s(&sched), "--trials", "50", "--seed", "7"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("all-decoded: 50 of 50"), "{}", stdout(&o));
}

#[test]
fn coded_requires_one_hop() {
    let dir = TempDir::new().unwrap();
    let f = cyclic(dir.path(), 5);
    let o = run(&["schedule", s(&f), "--hops", "2", "--coded"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(run(&["classify", s(&missing)]).status.code(), Some(4));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"users\": 2}").unwrap();
    assert_eq!(run(&["classify", s(&bad)]).status.code(), Some(2));

    let self_loop = topology(dir.path(), "loop.json", 2, &[(1, 1)]);
    assert_eq!(run(&["classify", s(&self_loop)]).status.code(), Some(2));

    let edges: Vec<(usize, usize)> = (1..14).map(|i| (i, i + 1)).collect();
    let big = topology(dir.path(), "big.json", 14, &edges);
    assert_eq!(run(&["alpha", s(&big), "--hops", "1"]).status.code(), Some(3));
    let o = run(&["alpha", s(&big), "--hops", "1", "--approx"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("warning:"));

    let f = cyclic(dir.path(), 7);
    assert_eq!(run(&["schedule", s(&f), "--hops", "1", "--coded"]).status.code(), Some(3));
    assert_eq!(run(&["alpha", s(&f), "--hops", "5"]).status.code(), Some(2));
    assert_eq!(run(&["zchain", "det", "--gains", "1,2"]).status.code(), Some(2));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let f = d_to_many(dir.path());
    let c = cyclic(dir.path(), 5);
    let cases: Vec<Vec<&str>> = vec![
        vec!["--json", "alpha", s(&f), "--hops", "2"],
        vec!["--json", "schedule", s(&f), "--hops", "2"],
        vec!["--json", "schedule", s(&c), "--hops", "1", "--coded"],
        vec!["--json", "coloring", s(&c)],
        vec!["--json", "zchain", "gauss", "--gains", "10,20,30,5,15", "--db"],
    ];
    for args in cases {
        let a = run(&args);
        let b = run(&args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn sequential_matches_parallel() {
    let dir = TempDir::new().unwrap();
    let f = d_to_many(dir.path());
    let a = run(&["schedule", s(&f), "--hops", "2"]);
    let b = run(&["--sequential", "schedule", s(&f), "--hops", "2"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn curve_csv_rows() {
    let dir = TempDir::new().unwrap();
    let f = d_to_many(dir.path());
    let out = dir.path().join("curve.csv");
    assert!(run(&["curve", s(&f), "--out", s(&out)]).status.success());
    let mut r = csv::Reader::from_path(&out).unwrap();
    assert_eq!(r.headers().unwrap(), vec!["h", "alpha_lower", "alpha_upper", "exact", "provenance"]);
    let rows: Vec<(String, String)> =
        r.records().map(|x| x.unwrap()).map(|x| (x[0].to_string(), x[1].to_string())).collect();
    let want = [("1", "1/5"), ("2", "4/7"), ("4", "1")];
    assert_eq!(rows.len(), want.len());
    for ((h, v), (wh, wv)) in rows.iter().zip(want) {
        assert_eq!((h.as_str(), v.as_str()), (wh, wv));
    }
}

#[test]
fn zchain_sweeps() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("det.csv");
    let o = run(&["zchain", "det", "--sweep", "2", "--out", s(&out)]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("243 instances, 0 region violations"));
    assert_eq!(csv::Reader::from_path(&out).unwrap().records().count(), 243);

    let out = dir.path().join("gauss.csv");
    let o = run(&["zchain", "gauss", "--sweep", "0,30,60", "--out", s(&out)]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("0 outside [0, 4]"), "{}", stdout(&o));
    let mut r = csv::Reader::from_path(&out).unwrap();
    assert_eq!(r.headers().unwrap().len(), 10);
    assert_eq!(r.records().count(), 243);

    let o = run(&["--strict-paper", "zchain", "gauss", "--sweep", "0,30,60"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("violation"));
}

#[test]
fn coloring_of_five_cycle() {
    let dir = TempDir::new().unwrap();
    let f = cyclic(dir.path(), 5);
    let out = stdout(&run(&["coloring", s(&f)]));
    assert!(out.starts_with("chi_f = 5/2\n"), "{out}");
    assert!(out.contains("xi_2 = 5"));
}

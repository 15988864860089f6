use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ultrasmall"))
        .args(args)
        .env("RUST_BACKTRACE", "0")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn gen_cm_is_reproducible_and_preserves_degree_total() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    for f in [&a, &b] {
        ok(&["gen-cm", "--tau", "2.5", "--dmin", "2", "--n", "500", "--seed", "9", "--out", p(f)]);
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    let edges = text.lines().filter(|l| !l.starts_with('#')).count();
    let deg = dir.path().join("deg.txt");
    let seq = ultrasmall::quantile_sequence(ultrasmall::PowerLawSpec { tau: 2.5, d_min: 2, n: 500 }).unwrap();
    seq.write_to(fs::File::create(&deg).unwrap()).unwrap();
    assert_eq!(2 * edges as u64, seq.ell());
}

#[test]
fn odd_degree_file_is_rejected_until_fixed() {
    let dir = tempfile::tempdir().unwrap();
    let deg = dir.path().join("deg.txt");
    fs::write(&deg, "1\n2\n").unwrap();
    let out = run(&["gen-cm", "--degrees", p(&deg)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("odd"));

    let fixed = dir.path().join("fixed.txt");
    ok(&["fix-parity", "--in", p(&deg), "--out", p(&fixed)]);
    let edges = ok(&["gen-cm", "--degrees", p(&fixed), "--seed", "1"]);
    assert_eq!(edges.lines().filter(|l| !l.starts_with('#')).count(), 2);
}

#[test]
fn diameter_methods_agree() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    ok(&["gen-cm", "--tau", "2.4", "--dmin", "2", "--n", "800", "--seed", "4", "--out", p(&g)]);
    let exact = ok(&["diameter", "--in", p(&g), "--exact", "--seed", "4"]);
    let ifub = ok(&["diameter", "--in", p(&g), "--ifub", "--seed", "4"]);
    assert_eq!(exact, ifub);
    let mut lines = exact.lines();
    assert_eq!(lines.next(), Some("n,seed,diam,lcc_fraction"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "800");
    assert_eq!(row[1], "4");
}

#[test]
fn pam_file_round_trips_through_analysis() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("pam.txt");
    ok(&["gen-pam", "--m", "2", "--delta", "-1", "--t", "600", "--seed", "2", "--out", p(&g)]);
    let text = fs::read_to_string(&g).unwrap();
    assert!(text.starts_with("# pam"));
    assert_eq!(text.lines().count(), 1 + 2 * 600);

    let mkc: serde_json::Value = serde_json::from_str(&ok(&["analyze", "--in", p(&g), "--what", "mkc", "--k", "1"])).unwrap();
    assert_eq!(mkc["n"], 600);
    assert_eq!(mkc["i_k"], 3);

    let per_vertex = ok(&["analyze", "--in", p(&g), "--what", "mkc", "--k", "1", "--per-vertex"]);
    assert_eq!(per_vertex.lines().count() as u64, 1 + mkc["count"].as_u64().unwrap());

    let core: serde_json::Value = serde_json::from_str(&ok(&["analyze", "--in", p(&g), "--what", "core-dist"])).unwrap();
    assert!(core["core_size"].as_u64().unwrap() >= 1);
    assert_eq!(core["unreachable"], 0);

    let expl = ok(&["analyze", "--in", p(&g), "--what", "explore", "--k", "2", "--per-vertex"]);
    assert_eq!(expl.lines().count(), 601);
}

#[test]
fn core_distances_on_cm_need_tau() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    ok(&["gen-cm", "--tau", "2.5", "--dmin", "3", "--n", "400", "--out", p(&g)]);
    assert!(!run(&["analyze", "--in", p(&g), "--what", "core-dist"]).status.success());
    let v: serde_json::Value =
        serde_json::from_str(&ok(&["analyze", "--in", p(&g), "--what", "core-dist", "--tau", "2.5"])).unwrap();
    assert!(v["reference"].as_u64().is_some());
}

#[test]
fn bounds_echo_their_inputs() {
    let v: serde_json::Value = serde_json::from_str(&ok(&[
        "bounds",
        "--which",
        "mk1",
        "--params",
        r#"{"degrees":[2,2,2,2,2,2,3,3],"k":1}"#,
    ]))
    .unwrap();
    assert_eq!(v["which"], "mk1");
    assert_eq!(v["input"]["k"], 1);
    assert!(v["result"]["value"].as_f64().unwrap() >= 0.0);

    let v: serde_json::Value = serde_json::from_str(&ok(&[
        "bounds",
        "--which",
        "appA",
        "--params",
        r#"{"t":500,"r":2,"gamma":0.75,"k_max":3}"#,
    ]))
    .unwrap();
    assert_eq!(v["result"]["R"], 2.0);
    assert!(v["result"]["c"].as_f64().unwrap() >= 1.0);

    let v: serde_json::Value = serde_json::from_str(&ok(&[
        "bounds",
        "--which",
        "constants",
        "--params",
        r#"{"model":"pam","m":2,"delta":-1,"n":100000}"#,
    ]))
    .unwrap();
    assert_eq!(v["result"]["c_dist"], 2);
    assert!(v["result"]["k_plus"].as_i64().unwrap() >= v["result"]["k_minus"].as_i64().unwrap());

    assert!(!run(&["bounds", "--which", "mk1", "--params", "{"]).status.success());
}

#[test]
fn experiment_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"params":{"model":"cm","tau":2.5,"d_min":3},"sizes":[300,600],"replicas":2,"seed_base":11,
            "measurements":["diameter","typical","mkc"]}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    ok(&["experiment", "--config", p(&cfg), "--out", p(&out), "--threads", "2", "--gnuplot"]);
    for f in ["rows.csv", "aggregate.json", "aggregate.dat", "timing.csv"] {
        assert!(out.join(f).exists(), "missing {f}");
    }
    let rows = fs::read_to_string(out.join("rows.csv")).unwrap();
    assert_eq!(rows.lines().count(), 5);

    let again = dir.path().join("again");
    ok(&["experiment", "--config", p(&cfg), "--out", p(&again), "--threads", "1"]);
    assert_eq!(rows, fs::read_to_string(again.join("rows.csv")).unwrap());
}

#[test]
fn experiment_rejects_unknown_fields() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"params":{"model":"cm","tau":2.5,"d_min":3},"sizes":[100],"replicas":1,"bogus":1}"#).unwrap();
    let out = run(&["experiment", "--config", p(&cfg), "--out", p(&dir.path().join("o"))]);
    assert!(!out.status.success());
}

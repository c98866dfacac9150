use std::path::Path;
use std::process::{Command, Output};

fn fica(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fica"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = fica(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

fn metric(csv: &str, name: &str) -> f64 {
    csv.lines()
        .find_map(|l| l.strip_prefix(&format!("{name},")))
        .unwrap_or_else(|| panic!("no {name} in {csv}"))
        .parse()
        .unwrap()
}

#[test]
fn mixed_sources_are_recovered() {
    let dir = tempfile::tempdir().unwrap();
    let (x, b, w) = (
        path(dir.path(), "x.txt"),
        path(dir.path(), "b.txt"),
        path(dir.path(), "w.txt"),
    );
    ok(&[
        "gen",
        "bernoulli",
        "--d",
        "6",
        "--n",
        "20000",
        "--p",
        "0.3",
        "--mixing-matrix",
        &b,
        "--seed",
        "4",
        "--out",
        &x,
    ]);
    let report = ok(&["glica", &x, "--mixing-matrix", &w]);
    assert!(metric(&report, "lower_bound") <= metric(&report, "objective") + 1e-9);

    let b = fica::FieldMatrix::from_text(&std::fs::read_to_string(&b).unwrap()).unwrap();
    let w = fica::FieldMatrix::from_text(&std::fs::read_to_string(&w).unwrap()).unwrap();
    assert!(!b.is_monomial());
    assert!(w.mul(&b).unwrap().is_monomial());
}

#[test]
fn compress_round_trip_in_every_mode() {
    let dir = tempfile::tempdir().unwrap();
    let x = path(dir.path(), "x.txt");
    ok(&[
        "gen", "zipf", "--q", "3", "--d", "4", "--n", "3000", "--out", &x,
    ]);
    for mode in ["none", "glica", "bloglica"] {
        let blob = path(dir.path(), &format!("{mode}.fica"));
        let back = path(dir.path(), &format!("{mode}.txt"));
        ok(&["compress", "--in", &x, "--mode", mode, "--out", &blob]);
        ok(&["decompress", "--in", &blob, "--out", &back]);
        assert_eq!(
            std::fs::read(&x).unwrap(),
            std::fs::read(&back).unwrap(),
            "{mode}"
        );
    }
}

#[test]
fn json_reports() {
    let dir = tempfile::tempdir().unwrap();
    let x = path(dir.path(), "x.txt");
    ok(&["gen", "betabin", "--d", "6", "--n", "2000", "--out", &x]);
    let v: serde_json::Value =
        serde_json::from_str(&ok(&["bloglica", &x, "--blocks", "3", "--format", "json"])).unwrap();
    let trace = v["trace"].as_array().unwrap();
    assert!(trace.windows(2).all(|w| w[1].as_f64() <= w[0].as_f64()));
    assert_eq!(v["w"].as_array().unwrap().len(), 6);

    let v: serde_json::Value =
        serde_json::from_str(&ok(&["orderperm", &x, "--format", "json"])).unwrap();
    assert_eq!(v["assignment"].as_array().unwrap().len(), 64);
    assert!(v["total_correlation"].as_f64().unwrap() >= 0.0);

    let rates: serde_json::Value = serde_json::from_str(&ok(&[
        "rate-report",
        "--in",
        &x,
        "--all",
        "--format",
        "json",
        "--realistic-dictionary",
    ]))
    .unwrap();
    let schemes: Vec<&str> = rates
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["scheme"].as_str().unwrap())
        .collect();
    assert_eq!(
        schemes,
        [
            "huffman+canonical-dictionary",
            "marginal-no-transform",
            "codec-identity",
            "codec-glica",
            "codec-bloglica"
        ]
    );
}

#[test]
fn pmf_files_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let p = path(dir.path(), "p.txt");
    // X1 uniform, X2 = X1.
    std::fs::write(&p, "2 2\n0.5 0 0 0.5\n").unwrap();
    let bound = ok(&["bound", &p]);
    assert!((metric(&bound, "lower_bound") - 1.0).abs() < 1e-12);
    let glica = ok(&["glica", &p]);
    assert!((metric(&glica, "objective") - 1.0).abs() < 1e-12);
}

#[test]
fn experiment_output_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "avg.csv");
    ok(&[
        "experiment",
        "average-case",
        "--d",
        "2..4",
        "-P",
        "draws=100",
        "--seed",
        "9",
        "--out",
        &out,
    ]);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("experiment,point,metric,value,runtime_s,seed\n"));
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(format!("{out}.meta.json")).unwrap())
            .unwrap();
    assert_eq!(meta["seed"], 9);
    assert_eq!(meta["params"]["d"], "2,3,4");

    let json = ok(&[
        "experiment",
        "bound-statistics",
        "--d",
        "5",
        "--q",
        "3",
        "-P",
        "trials=200",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["meta"]["params"]["trials"], "200");
}

#[test]
fn exit_codes() {
    assert_eq!(fica(&["--no-such-flag"]).status.code(), Some(1));
    assert_eq!(fica(&["experiment", "nope"]).status.code(), Some(1));
    assert_eq!(
        fica(&["experiment", "zipf", "-P", "bogus=1"]).status.code(),
        Some(1)
    );
    assert_eq!(
        fica(&["gen", "zipf", "--d", "40", "--n", "5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(fica(&["glica", "/no/such/file"]).status.code(), Some(1));
    assert_eq!(fica(&["--help"]).status.code(), Some(0));
    assert_eq!(fica(&["glica"]).status.code(), Some(1));
    assert_eq!(
        fica(&["glica", "a.txt", "--in", "b.txt"]).status.code(),
        Some(1)
    );
}

#[test]
fn corrupt_blob_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let blob = path(dir.path(), "bad.fica");
    std::fs::write(&blob, b"NOPE").unwrap();
    let out = fica(&["decompress", &blob]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn verify_single_criterion() {
    let out = ok(&["verify", "--criterion", "3"]);
    assert!(out.starts_with("[PASS] 3."), "{out}");
}

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hlb(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hlb")).args(args).arg("--cache-dir").arg(cache).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

#[test]
fn bound_examples() {
    let dir = tempfile::tempdir().unwrap();
    let o = hlb(&["bound", "--method", "clarkson", "--m", "2", "--p", "4", "--format", "json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let b = json(&o)["bound"].as_f64().unwrap();
    assert!(b > 1.1546 && (b - 2.0 / 3f64.sqrt()).abs() < 1e-12);

    let o = hlb(&["bound", "--method", "gbh-thispel", "--m", "3", "--alpha", "2", "--format", "json"], dir.path());
    assert_eq!(json(&o)["bound"].as_f64().unwrap(), 2f64.powf(0.75));
    assert_eq!(json(&o)["exponent"], serde_json::json!([4.0 / 3.0, 4.0 / 3.0, 2.0]));

    let o = hlb(&["bound", "--method", "dimant", "--m", "100", "--p", "199999/1000", "--format", "csv"], dir.path());
    let line = stdout(&o).lines().nth(1).unwrap().to_string();
    assert!(line.starts_with("100,199999,1000,dimant,"), "{line}");

    let o = hlb(
        &["bound", "--method", "numeric", "--m", "3", "--p", "6", "--starts", "16", "--format", "json"],
        dir.path(),
    );
    let v = json(&o);
    assert_eq!(v["seed"], 0x484C_2015u64);
    assert_eq!(v["starts"], 16);
    assert!(v["certified_bound_lower"].as_f64().unwrap() <= v["bound"].as_f64().unwrap());
    assert!(v["bound"].as_f64().unwrap() > 1.215);
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["bound", "--method", "dimant", "--m", "2", "--p", "5"][..],
        &["bound", "--method", "clarkson", "--p", "4"],
        &["bound", "--method", "gbh-jfapel", "--m", "3", "--alpha", "3"],
        &["table", "nope"],
        &["sup", "--family", "littlewood", "--m", "3", "--p", "1/0"],
        &["coeffs", "--family", "tilde", "--m", "16"],
    ] {
        let o = hlb(args, dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(!stderr(&o).is_empty());
    }
}

#[test]
fn verify_suites() {
    let dir = tempfile::tempdir().unwrap();
    let o = hlb(&["verify", "optimal3"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.contains("lower = upper = 2^{3/4}")).count(), 3);

    let o = hlb(&["verify", "eqm", "--max-m", "2", "--max-n", "3"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(), 6);

    let o = hlb(&["verify", "oracles", "--format", "json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(json(&o)["checks"].as_array().unwrap().iter().all(|c| c["ok"] == true));

    let o = hlb(&["verify", "sandwich", "--max-m", "4", "--starts", "16"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn verification_failures_exit_1() {
    // Q_64 expands past the term cap; the suite reports it and fails.
    let dir = tempfile::tempdir().unwrap();
    let o = hlb(&["verify", "eqm", "--max-m", "6", "--max-n", "1"], dir.path());
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn dell99_desk_scale_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = hlb(&["table", "dell99", "--max-m", "5", "--starts", "128", "--format", "json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let rows = json(&o)["rows"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 4);
    let expected = [(2, 3f64.sqrt(), 1.149), (3, 3.29, 1.215), (4, 6.40, 1.250), (5, 12.60, 1.269)];
    for (row, (m, norm, bound)) in rows.iter().zip(expected) {
        assert_eq!(row["m"], m);
        assert_eq!(row["p"], 2 * m);
        assert!((row["norm"].as_f64().unwrap() / norm - 1.0).abs() <= 0.01);
        assert!(row["bound"].as_f64().unwrap() > bound);
    }
}

#[test]
fn t44_rows_and_heavy_marker() {
    let dir = tempfile::tempdir().unwrap();
    let o = hlb(&["table", "t44", "--starts", "32"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let md = stdout(&o);
    assert!(md.contains("| 4 | 8 | 8 | 6.20 | 1.290 |"), "{md}");
    assert!(md.contains("| 16 | 32 | 32768 | — |"), "{md}");
    assert!(md.contains("absent"));

    let o = hlb(&["table", "t44", "--min-m", "16", "--starts", "4", "--include-heavy", "--format", "json"], dir.path());
    let row = &json(&o)["rows"][0];
    assert_eq!(row["status"], "ok");
    assert!(row["norm"].as_f64().unwrap() >= 21000.0);

    // now cached: the default table reports it without --include-heavy
    let o = hlb(&["table", "t44", "--min-m", "16", "--starts", "4", "--format", "json"], dir.path());
    assert_eq!(json(&o)["rows"][0]["status"], "ok");
}

#[test]
fn deterministic_single_start_table() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["table", "dell99", "--max-m", "6", "--starts", "1", "--seed", "0", "--format", "csv"];
    let first = hlb(&args, a.path());
    let second = hlb(&args, b.path());
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(stdout(&first), stdout(&second));
}

#[test]
fn formats_agree_on_values() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["table", "dell99", "--max-m", "4", "--starts", "8"];
    let run = |fmt: &str| {
        let mut args = base.to_vec();
        args.extend(["--format", fmt]);
        hlb(&args, dir.path())
    };
    let j = json(&run("json"));
    let csv = stdout(&run("csv"));
    let md = stdout(&run("md"));
    let csv_rows: Vec<Vec<String>> = csv.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect();
    for (row, cells) in j["rows"].as_array().unwrap().iter().zip(&csv_rows) {
        let norm = row["norm"].as_f64().unwrap();
        assert_eq!(cells[4].parse::<f64>().unwrap(), norm);
        assert_eq!(cells[5].parse::<f64>().unwrap(), row["bound"].as_f64().unwrap());
        let numerator = row["numerator"].as_f64().unwrap();
        let cell = format!("| {} | {} | {numerator} | {} |", row["m"], row["p"], hlb::tables::round_half_up(norm, 2));
        assert!(md.contains(&cell), "{cell} not in {md}");
    }
}

#[test]
fn cache_hits_reproduce_output() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["sup", "--family", "tilde", "--m", "4", "--p", "8", "--starts", "8", "--format", "json"];
    let first = hlb(&args, dir.path());
    assert!(stderr(&first).is_empty());
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 1);
    let second = hlb(&args, dir.path());
    assert_eq!(stdout(&first), stdout(&second));
    let v = json(&first);
    assert_eq!(v["starts"], 8);
    assert_eq!(v["per_start"].as_array().unwrap().len(), 8);
    assert!((v["best"].as_f64().unwrap() / 6.20 - 1.0).abs() < 0.01);

    let o = hlb(&["table", "dell99", "--max-m", "3", "--starts", "8"], dir.path());
    let o2 = hlb(&["table", "dell99", "--max-m", "3", "--starts", "8"], dir.path());
    assert!(stderr(&o).contains("computed"));
    assert!(stderr(&o2).contains("cache hit"));
    assert_eq!(stdout(&o), stdout(&o2));
}

#[test]
fn manifest_replay() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("run.json");
    let out = dir.path().join("out.md");
    let m = manifest.to_str().unwrap();
    let o = hlb(
        &["table", "dell99", "--max-m", "4", "--starts", "8", "--out", out.to_str().unwrap(), "--manifest", m],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).is_empty());
    let written = std::fs::read_to_string(&out).unwrap();
    let man: Value = serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
    assert_eq!(man["command"], "table");
    assert_eq!(man["config"]["starts"], 8);
    assert_eq!(man["output_sha256"].as_str().unwrap(), hlb::manifest::sha256_hex(written.as_bytes()));

    let replay = hlb(&["replay", m], dir.path());
    assert_eq!(replay.status.code(), Some(0), "{}", stdout(&replay));
    assert!(stdout(&replay).contains("matches"));

    let mut tampered = man.clone();
    tampered["output_sha256"] = Value::String("0".repeat(64));
    std::fs::write(&manifest, tampered.to_string()).unwrap();
    let replay = hlb(&["replay", m], dir.path());
    assert_eq!(replay.status.code(), Some(1));
    assert!(stdout(&replay).contains("DIFFERS"));
}

#[test]
fn coefficient_and_polynomial_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&hlb(&["coeffs", "--family", "littlewood", "--m", "3"], dir.path()));
    assert_eq!(v["degree"], 3);
    assert_eq!(v["dims"], serde_json::json!([4, 4, 2]));
    let entries = v["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 16);
    let idx: Vec<Vec<u64>> =
        entries.iter().map(|e| e["idx"].as_array().unwrap().iter().map(|i| i.as_u64().unwrap()).collect()).collect();
    let mut sorted = idx.clone();
    sorted.sort();
    assert_eq!(idx, sorted);
    assert!(idx.iter().flatten().all(|&i| i >= 1));

    let v = json(&hlb(&["poly", "--d", "2", "--n", "2"], dir.path()));
    assert_eq!(v["nvars"], 2);
    assert_eq!(v["degree"], 4);
    assert_eq!(
        v["entries"],
        serde_json::json!([{"alpha": [0, 4], "c": 1}, {"alpha": [2, 2], "c": -2}, {"alpha": [4, 0], "c": 1}])
    );
}

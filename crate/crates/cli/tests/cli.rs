use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn phasetime(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phasetime"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn ok(args: &[&str], out: &Path) -> String {
    let o = phasetime(args, out);
    assert!(
        o.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout).unwrap()
}

fn records(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn comments(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| l.starts_with('#'))
        .map(String::from)
        .collect()
}

#[test]
fn table1_default_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t");
    let stdout = ok(&["table1"], &out);
    assert!(stdout.lines().nth(1).unwrap().starts_with("0.00"));
    let (header, rows) = records(&out.join("table1.csv"));
    assert_eq!(header, ["w_a", "L_a", "kmax_a", "flag"]);
    assert_eq!(rows.len(), 77);
    let starred: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r[3] == "*")
        .map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap()))
        .collect();
    assert_eq!(starred, [(1.5, 0.8), (1.5, 0.9), (1.5, 1.0), (2.0, 1.0)]);
    let cell = rows.iter().find(|r| r[0] == "4" && r[1] == "0.5").unwrap();
    assert!((cell[2].parse::<f64>().unwrap() - 2.1155).abs() < 1e-3);
    let c = comments(&out.join("table1.csv"));
    assert!(c.iter().any(|l| l == "# k0_a = 1.0"));
    assert_eq!(manifest(&out)["results"]["boundary_dominated_cells"], 4);
}

#[test]
fn table1_other_k0_stays_in_bounds() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["table1", "--k0-a", "0.5"], dir.path());
    let (_, rows) = records(&dir.path().join("table1.csv"));
    for r in rows {
        let w: f64 = r[0].parse().unwrap();
        let k: f64 = r[2].parse().unwrap();
        assert!(k >= 0.5 - 1e-7 && k <= w, "{r:?}");
    }
}

#[test]
fn invalid_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["table1", "--l-a", ""][..],
        &["table1", "--k0-a", "-1"],
        &["rates", "--n", "1.5"],
        &["distortion", "--w-a", "0.9"],
        &["cutoff", "--delta", "1.2"],
        &["collide", "--x-min", "-8", "--x-max", "6"],
    ] {
        let o = phasetime(args, dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    }
}

#[test]
fn quadrature_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = phasetime(
        &[
            "packet",
            "--tolerance",
            "1e-17",
            "--x-points",
            "11",
            "--t-steps",
            "2",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no convergence"));
}

#[test]
fn rates_limits_and_note() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(&["rates"], dir.path());
    assert!(stdout.contains("do not commute"));
    let path = dir.path().join("rates.csv");
    assert!(comments(&path).iter().any(|l| l.contains("do not commute")));
    let (header, rows) = records(&path);
    assert_eq!(header, ["alpha", "n", "R_T", "R_phi"]);
    assert_eq!(rows.len(), 4 * 141);
    for r in &rows {
        let v: Vec<f64> = r.iter().map(|s| s.parse().unwrap()).collect();
        let (alpha, n) = (v[0], v[1]);
        if alpha == 1e-4 {
            let want_t = if n == 1.0 { 4.0 / 3.0 } else { 1.0 + 0.5 / n };
            assert!((v[2] - want_t).abs() < 1e-3, "{r:?}");
            if n < 1.0 {
                assert!((v[3] - (1.0 + 1.0 / n)).abs() < 1e-3, "{r:?}");
            }
        }
        if alpha == 1e3 {
            assert!(v[2] < 1e-2 && v[3] < 1e-2, "{r:?}");
        }
    }
    assert!(manifest(dir.path())["results"]["note"].is_string());
}

#[test]
fn distortion_values() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["distortion"], dir.path());
    let (_, rows) = records(&dir.path().join("distortion.csv"));
    let get = |name: &str| -> f64 {
        rows.iter().find(|r| r[0] == name).unwrap()[1]
            .parse()
            .unwrap()
    };
    assert!((get("L_literal_a") - (1.5f64).sqrt() / 3.0).abs() < 1e-12);
    assert!((get("L_rederived_a") - (0.5f64).sqrt()).abs() < 1e-12);
    assert!(get("L_numeric_a") > 0.7 && get("L_numeric_a") < 0.8);
    assert_eq!(get("gaussian_log_slope"), 0.25);
}

#[test]
fn cutoff_tails_increase() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["cutoff"], dir.path());
    let (_, rows) = records(&dir.path().join("cutoff_summary.csv"));
    let tails: Vec<f64> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
    assert_eq!(tails.len(), 3);
    assert!(tails[0] < tails[1] && tails[1] < tails[2]);
    assert_eq!(
        manifest(dir.path())["results"]["tail_increases_as_cutoff_drops"],
        true
    );
    let (header, profile) = records(&dir.path().join("cutoff_profiles.csv"));
    assert_eq!(header.len(), 4);
    assert_eq!(profile.len(), 801);
}

#[test]
fn collide_is_symmetric() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["collide"], dir.path());
    let m = manifest(dir.path());
    assert!(m["results"]["symmetry_residual"].as_f64().unwrap() < 1e-10);
    assert!(m["results"]["outgoing_modulus_error"].as_f64().unwrap() < 1e-8);
    let snaps = m["files"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|f| f.as_str().unwrap().starts_with("collide_t"))
        .count();
    assert_eq!(snaps, 9);
    let first = dir.path().join("collide_t0000.csv");
    assert!(comments(&first).iter().any(|l| l.starts_with("# t = ")));
    let (header, rows) = records(&first);
    assert_eq!(header, ["x", "re_psi", "im_psi", "abs_psi2"]);
    assert_eq!(rows.len(), 321);
}

#[test]
fn packet_snapshots_and_arrival() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        &["packet", "--t-steps", "31", "--x-points", "241"],
        dir.path(),
    );
    let m = manifest(dir.path());
    let r = &m["results"];
    assert!(r["tau"].as_f64().unwrap() > 0.0);
    assert!(r["empirical_delay"].as_f64().is_some());
    assert!(r["discrepancy_over_tau"].as_f64().is_some());
    assert!(dir.path().join("arrival.csv").exists());
    assert!(dir.path().join("packet_t0030.csv").exists());
}

fn read_all(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn runs_are_deterministic_and_replayable() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (
        dir.path().join("a"),
        dir.path().join("b"),
        dir.path().join("c"),
    );
    let args = ["collide", "--l-a", "0.3", "--t-steps", "3"];
    ok(&args, &a);
    ok(&args, &b);
    let first = read_all(&a);
    assert!(!first.is_empty());
    assert_eq!(first, read_all(&b));
    let manifest_path = a.join("manifest.json");
    ok(&["replay", manifest_path.to_str().unwrap()], &c);
    assert_eq!(first, read_all(&c));
    assert_eq!(manifest(&a)["parameters"], manifest(&c)["parameters"]);
    assert!(manifest(&a)["parameters"].get("out").is_none());
}

#[test]
fn replay_rejects_bad_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"parameters": {"command": "nope"}}"#).unwrap();
    let o = phasetime(&["replay", bad.to_str().unwrap()], &dir.path().join("o"));
    assert_eq!(o.status.code(), Some(2));
}

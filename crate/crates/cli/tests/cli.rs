//! End-to-end tests of the command-line surface: flags, file formats,
//! exit codes, and byte-determinism of result artifacts.

use std::path::Path;
use std::process::{Command, Output};

fn speclab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_speclab"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).expect("file exists")
}

#[test]
fn radial_output_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &str| {
        vec![
            "radial".to_string(),
            "--dim".into(),
            "7".into(),
            "--weight".into(),
            "inv-square".into(),
            "--grid".into(),
            "256".into(),
            "--delta".into(),
            "1e-6".into(),
            "--gamma".into(),
            "2".into(),
            "--lmax".into(),
            "4".into(),
            "--k".into(),
            "3".into(),
            "--out".into(),
            out.into(),
        ]
    };
    for out in ["a.csv", "b.csv"] {
        let argv = args(out);
        let argv: Vec<&str> = argv.iter().map(String::as_str).collect();
        let output = speclab(&argv, dir.path());
        assert!(output.status.success(), "{output:?}");
    }
    let a = read(&dir.path().join("a.csv"));
    let b = read(&dir.path().join("b.csv"));
    assert_eq!(a, b, "identical configs must give byte-identical output");
    // output must not depend on the worker-thread cap either
    let argv = args("c.csv");
    let argv: Vec<&str> = argv.iter().map(String::as_str).collect();
    let output = Command::new(env!("CARGO_BIN_EXE_speclab"))
        .args(&argv)
        .env("SPECLAB_THREADS", "1")
        .current_dir(dir.path())
        .output()
        .expect("binary runs");
    assert!(output.status.success());
    assert_eq!(a, read(&dir.path().join("c.csv")));
    assert!(a.starts_with("k,value,sector_ell,multiplicity,essential_flag\n"));
    // λ₁ = 6 for the coordinate sector
    let line1 = a.lines().nth(2).unwrap();
    assert!(line1.starts_with("1,6.0000000000"), "{line1}");
    assert!(line1.contains(",1,7,false"), "{line1}");
    // manifest written next to the artifact
    let manifest = read(&dir.path().join("a.csv.manifest.json"));
    assert!(manifest.contains("\"wall_time_ms\""));
    assert!(manifest.contains("\"mass\""));
}

#[test]
fn disk_mobius_reaches_weinstock_equality() {
    let dir = tempfile::tempdir().unwrap();
    let output = speclab(
        &[
            "disk", "--mobius", "0.5,0", "--modes", "256", "--k", "3", "--out", "disk.csv",
        ],
        dir.path(),
    );
    assert!(output.status.success(), "{output:?}");
    let csv = read(&dir.path().join("disk.csv"));
    let line = csv.lines().nth(2).expect("sigma_1 row");
    let fields: Vec<&str> = line.split(',').collect();
    let sigma_bar: f64 = fields[2].parse().unwrap();
    assert!(
        (sigma_bar - 2.0 * std::f64::consts::PI).abs() < 1e-6,
        "sigma_bar_1 = {sigma_bar}"
    );
}

#[test]
fn invalid_dimension_exits_2_with_code_on_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let output = speclab(
        &[
            "radial",
            "--dim",
            "2",
            "--weight",
            "inv-square",
            "--grid",
            "64",
            "--k",
            "1",
        ],
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("invalid-dimension"), "{stderr}");
}

#[test]
fn center_recovers_symmetric_root() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("mu.csv"),
        "x1,x2,x3,mass\n0.6,0,0,1\n-0.6,0,0,1\n0,0.4,0,1\n0,-0.4,0,1\n",
    )
    .unwrap();
    let output = speclab(
        &[
            "center",
            "--measure",
            "mu.csv",
            "--radius",
            "1.0",
            "--out",
            "center.json",
        ],
        dir.path(),
    );
    assert!(output.status.success(), "{output:?}");
    let doc: serde_json::Value = serde_json::from_str(&read(&dir.path().join("center.json"))).unwrap();
    let c = doc["c"].as_array().unwrap();
    for v in c {
        assert!(v.as_f64().unwrap().abs() < 1e-7);
    }
    assert!(doc["p"].is_null());
    assert!(doc["residual"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn center_fold_variant_emits_pair() {
    let dir = tempfile::tempdir().unwrap();
    // antipodal pairs on a sphere, phi1 = x1 exactly orthogonal by symmetry
    let mut csv = String::from("x1,x2,x3,mass\n");
    let mut phi = String::from("phi1\n");
    for k in 0..40 {
        let t = k as f64;
        let (x, y, z) = (
            (t * 0.7).sin() * (t * 1.3).cos(),
            (t * 0.7).sin() * (t * 1.3).sin(),
            (t * 0.7).cos(),
        );
        for s in [1.0f64, -1.0] {
            csv.push_str(&format!("{},{},{},1\n", 0.6 * s * x, 0.6 * s * y, 0.6 * s * z));
            phi.push_str(&format!("{}\n", 0.6 * s * x));
        }
    }
    std::fs::write(dir.path().join("mu.csv"), csv).unwrap();
    std::fs::write(dir.path().join("phi.csv"), phi).unwrap();
    let output = speclab(
        &[
            "center",
            "--measure",
            "mu.csv",
            "--radius",
            "1.0",
            "--phi1",
            "phi.csv",
            "--fold",
            "--out",
            "fold.json",
        ],
        dir.path(),
    );
    assert!(output.status.success(), "{output:?}");
    let doc: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("fold.json"))).unwrap();
    assert_eq!(doc["p"].as_array().unwrap().len(), 3);
    assert!(doc["residual"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn bounds_table_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let output = speclab(
        &[
            "bounds", "--table", "--dmin", "3", "--dmax", "5", "--out", "constants.csv",
        ],
        dir.path(),
    );
    assert!(output.status.success(), "{output:?}");
    let csv = read(&dir.path().join("constants.csv"));
    assert!(csv.starts_with("d,k,constant\n"));
    assert_eq!(csv.lines().count(), 1 + 3 * 2);
    // d=3, k=1 row is 2·(4π)^{2/3}
    let first: f64 = csv
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(2)
        .unwrap()
        .parse()
        .unwrap();
    let expected = 2.0 * (4.0 * std::f64::consts::PI).powf(2.0 / 3.0);
    assert!((first - expected).abs() / expected < 1e-12);

    // single report for d = 7 recomputes the spectrum and flags equality
    let output = speclab(
        &["bounds", "--dim", "7", "--k", "1", "--out", "report.json"],
        dir.path(),
    );
    assert!(output.status.success(), "{output:?}");
    let doc: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("report.json"))).unwrap();
    assert_eq!(doc["neumann"]["sharp"], true);
    assert_eq!(doc["neumann"]["equality_flagged"], true);
    assert!(doc["steklov_unit_ball"]["margin"].as_f64().unwrap() > 0.0);
}

#[test]
fn bounds_consumes_radial_csv() {
    let dir = tempfile::tempdir().unwrap();
    let output = speclab(
        &[
            "radial",
            "--dim",
            "7",
            "--weight",
            "inv-square",
            "--grid",
            "256",
            "--k",
            "1",
            "--out",
            "spec.csv",
        ],
        dir.path(),
    );
    assert!(output.status.success());
    let output = speclab(
        &[
            "bounds", "--dim", "7", "--k", "1", "--input", "spec.csv", "--out", "from_csv.json",
        ],
        dir.path(),
    );
    assert!(output.status.success(), "{output:?}");
    let doc: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("from_csv.json"))).unwrap();
    assert_eq!(doc["neumann"]["equality_flagged"], true);
}

#[test]
fn foldcheck_cases_hold() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("cases.toml"),
        r#"
dim = 3
samples = 200000

[[cases]]
kind = "two-balls"
t = 1.2

[[cases]]
kind = "centered-ball"
p = 0.5
"#,
    )
    .unwrap();
    let output = speclab(
        &["foldcheck", "--config", "cases.toml", "--out", "fold.csv"],
        dir.path(),
    );
    assert!(output.status.success(), "{output:?}");
    let csv = read(&dir.path().join("fold.csv"));
    assert!(csv.starts_with("case,kind,param,lhs,rhs,std_error,holds\n"));
    for line in csv.lines().skip(1) {
        assert!(line.ends_with(",true"), "{line}");
    }
    // the equality case sits within a few percent of the analytic value
    let first: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    let lhs: f64 = first[3].parse().unwrap();
    let rhs: f64 = first[4].parse().unwrap();
    assert!((lhs - rhs).abs() / rhs < 0.05, "lhs {lhs} rhs {rhs}");
}

#[test]
fn disk_density_json_input() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("rho.json"),
        r#"{"M": 4, "modes": [[0, 1.0, 0.0], [1, 0.2, 0.1]]}"#,
    )
    .unwrap();
    let output = speclab(
        &[
            "disk", "--density", "rho.json", "--modes", "16", "--k", "2", "--out", "disk.csv",
        ],
        dir.path(),
    );
    assert!(output.status.success(), "{output:?}");
    let csv = read(&dir.path().join("disk.csv"));
    assert_eq!(csv.lines().count(), 1 + 3);
    // a negative density must be rejected with the module error code
    std::fs::write(
        dir.path().join("bad.json"),
        r#"{"M": 2, "modes": [[0, 1.0, 0.0], [1, 4.0, 0.0]]}"#,
    )
    .unwrap();
    let output = speclab(
        &["disk", "--density", "bad.json", "--modes", "8", "--k", "1"],
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("invalid-density"));
}

#[test]
fn sweep_bumps_rows_in_input_order() {
    let dir = tempfile::tempdir().unwrap();
    let output = speclab(
        &[
            "sweep",
            "--kind",
            "bumps-epsilon",
            "--values",
            "0.4,0.3,0.2",
            "--modes",
            "64",
            "--k",
            "2",
            "--out",
            "sweep.csv",
        ],
        dir.path(),
    );
    assert!(output.status.success(), "{output:?}");
    let csv = read(&dir.path().join("sweep.csv"));
    assert!(csv.starts_with("index,epsilon,sigma_k,sigma_bar_k\n"));
    let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3);
    // ordered by grid index, σ̄₂ increasing as ε shrinks
    let eps: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(eps[0] > eps[1] && eps[1] > eps[2]);
    let bars: Vec<f64> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(bars[0] < bars[1] && bars[1] < bars[2]);
}

#[test]
fn config_file_mirrors_flags() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("radial.toml"),
        r#"
dim = 7
weight = "inv-square"
grid = 256
delta = 1e-6
gamma = 2.0
lmax = 4
k = 1
"#,
    )
    .unwrap();
    let from_config = speclab(&["radial", "--config", "radial.toml"], dir.path());
    assert!(from_config.status.success(), "{from_config:?}");
    let from_flags = speclab(
        &[
            "radial",
            "--dim",
            "7",
            "--weight",
            "inv-square",
            "--grid",
            "256",
            "--delta",
            "1e-6",
            "--gamma",
            "2.0",
            "--lmax",
            "4",
            "--k",
            "1",
        ],
        dir.path(),
    );
    assert_eq!(from_config.stdout, from_flags.stdout);
    // explicit flag overrides the config value
    let overridden = speclab(
        &["radial", "--config", "radial.toml", "--dim", "8"],
        dir.path(),
    );
    assert!(overridden.status.success());
    assert_ne!(overridden.stdout, from_config.stdout);
}

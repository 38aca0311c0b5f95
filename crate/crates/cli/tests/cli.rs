use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn qlimits(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qlimits"))
        .args(args)
        .env_remove("QLIMITS_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf8")
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn jc_undamped_fock_is_cosine() {
    let o = qlimits(&["jc", "--dist", "fock:0", "--gamma0", "0", "--tmax", "2", "--steps", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("gt,p_down"));
    for line in lines {
        let (t, p) = line.split_once(',').unwrap();
        let (t, p): (f64, f64) = (t.parse().unwrap(), p.parse().unwrap());
        assert!((p - t.cos().powi(2)).abs() < 1e-11, "{line}");
    }
}

#[test]
fn jc_oracle_column_tracks_analytic_curve() {
    let o = qlimits(&[
        "jc", "--dist", "coherent:3.0", "--d", "0.4", "--gamma0", "0.127", "--tmax", "25", "--steps", "50", "--oracle",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("gt,p_down,p_down_oracle\n"));
    assert_eq!(text.lines().count(), 52);
    let first: Vec<f64> = text.lines().nth(1).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert!((first[1] - 1.0).abs() < 1e-12 && (first[2] - 1.0).abs() < 1e-12);
}

#[test]
fn jc_bad_flags_exit_2() {
    assert_eq!(qlimits(&["jc", "--dist", "coherent"]).status.code(), Some(2));
    assert_eq!(qlimits(&["jc", "--tmax", "-1"]).status.code(), Some(2));
    assert_eq!(qlimits(&["jc", "--model", "xx"]).status.code(), Some(2));
    assert_eq!(qlimits(&["nonsense"]).status.code(), Some(2));
}

#[test]
fn budget_reference_rows() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("report.json");
    let o = qlimits(&[
        "budget", "--L", "4,40", "--epsilon", "500", "--eta", "1", "--ratio", "1e-16", "--json",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let table = stdout(&o);
    assert!(table.contains("6.46814394030e-3"));
    let report: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let t40 = report["rows"][1]["T_bound_s"].as_f64().unwrap();
    assert!((t40 / 6.4e5 - 1.0).abs() < 0.02);
    assert!(!Path::new(&format!("{}.partial", out.display())).exists());
}

#[test]
fn budget_factorization_row_and_ions() {
    let o = qlimits(&["budget", "--L", "78"]);
    assert_eq!(o.status.code(), Some(0));
    let table = stdout(&o);
    assert!(table.contains("1.35224868229e8"));
    assert!(table.contains("3.6 years"));

    let dir = TempDir::new().unwrap();
    let ions = write(
        &dir,
        "ions.json",
        r#"{"ions":[{"name":"synthetic","Gamma22":1.2e8,"Gamma33":4.0e7,"Delta2":3.1e15,
            "Delta13":2.2e15,"omega12":1.1e15,"omega13":2.9e15,"beta":0.37}]}"#,
    );
    let o = qlimits(&["budget", "--ions", &ions, "--L", "7", "--N", "1e6"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("r[synthetic]"));

    let bad = write(&dir, "bad.json", r#"[{"name":"x","Gamma22":-1}]"#);
    assert_eq!(qlimits(&["budget", "--ions", &bad]).status.code(), Some(3));
    let missing = dir.path().join("absent.json");
    assert_eq!(qlimits(&["budget", "--ions", missing.to_str().unwrap()]).status.code(), Some(3));
}

const STANDARD: &str = r#"{"cats":[{"particles":[1,2],"bits":[0,0],"sign":"+"},
                                   {"particles":[3,4],"bits":[0,0],"sign":"+"}],
                           "measure":[2,3]}"#;

#[test]
fn swap_standard_and_three_cat_scenarios() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "standard.json", STANDARD);
    let o = qlimits(&["swap", &path, "--verify"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let outcomes = v["outcomes"].as_array().unwrap();
    assert_eq!(outcomes.len(), 4);
    assert!(outcomes.iter().all(|o| o["probability"] == 0.25));
    assert_eq!(v["verification"]["agrees"], true);

    let three = write(
        &dir,
        "three.json",
        r#"{"cats":[{"particles":[1,2],"bits":[0,0],"sign":"+"},
                    {"particles":[3,4],"bits":[0,0],"sign":"+"},
                    {"particles":[5,6,7],"bits":[0,0,0],"sign":"+"}],
            "measure":[2,4,7]}"#,
    );
    let o = qlimits(&["swap", &three]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["summary"]["polygon_counts"], serde_json::json!([3, 4]));
}

#[test]
fn swap_malformed_scenarios_exit_3() {
    let dir = TempDir::new().unwrap();
    for (name, text) in [
        ("syntax.json", "{"),
        ("overlap.json", r#"{"cats":[{"particles":[1,2],"bits":[0,0],"sign":"+"},{"particles":[2,3],"bits":[0,0],"sign":"+"}],"measure":[1]}"#),
        ("unknown.json", r#"{"cats":[{"particles":[1,2],"bits":[0,0],"sign":"+"}],"measure":[5]}"#),
        ("empty.json", r#"{"cats":[{"particles":[1,2],"bits":[0,0],"sign":"+"}],"measure":[]}"#),
    ] {
        let path = write(&dir, name, text);
        assert_eq!(qlimits(&["swap", &path]).status.code(), Some(3), "{name}");
    }
}

#[test]
fn exchange_three_of_four_users() {
    let o = qlimits(&["exchange", "--users", "A,B,C,D", "--request", "A,B,C", "--verify"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["summary"]["measured"], serde_json::json!([2, 3, 5]));
    assert_eq!(v["exchange"]["user_particles"], serde_json::json!([1, 4, 6]));
    assert_eq!(v["exchange"]["users_share_cat"], true);
    for o in v["outcomes"].as_array().unwrap() {
        assert_eq!(o["residual"]["particles"], serde_json::json!([1, 4, 6]));
    }
    assert_eq!(
        qlimits(&["exchange", "--users", "A,B", "--request", "Q"]).status.code(),
        Some(3)
    );
}

fn density_json(m: &[[f64; 4]; 4]) -> String {
    let rows: Vec<Vec<[f64; 2]>> = m.iter().map(|r| r.iter().map(|&x| [x, 0.0]).collect()).collect();
    serde_json::json!({"dims": [2, 2], "matrix": rows}).to_string()
}

#[test]
fn ree_bell_and_product_inputs() {
    let dir = TempDir::new().unwrap();
    let bell = write(
        &dir,
        "bell.json",
        &density_json(&[[0.5, 0.0, 0.0, 0.5], [0.0; 4], [0.0; 4], [0.5, 0.0, 0.0, 0.5]]),
    );
    let o = qlimits(&["ree", &bell]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["value_nats"].as_f64().unwrap() - std::f64::consts::LN_2).abs() < 1e-3);
    assert!((v["value_bits"].as_f64().unwrap() - 1.0).abs() < 2e-3);
    assert_eq!(v["restarts"], 16);

    let product = write(
        &dir,
        "product.json",
        &density_json(&[[0.25, 0.0, 0.0, 0.0], [0.0, 0.25, 0.0, 0.0], [0.0, 0.0, 0.25, 0.0], [0.0, 0.0, 0.0, 0.25]]),
    );
    let o = qlimits(&["ree", &product]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["value_nats"].as_f64().unwrap() < 1e-3);
}

#[test]
fn ree_is_reproducible_and_seed_from_env() {
    let dir = TempDir::new().unwrap();
    let m = [[0.4, 0.0, 0.0, 0.3], [0.0, 0.1, 0.0, 0.0], [0.0, 0.0, 0.1, 0.0], [0.3, 0.0, 0.0, 0.4]];
    let path = write(&dir, "s.json", &density_json(&m));
    let a = qlimits(&["ree", &path, "--seed", "7"]);
    let b = Command::new(env!("CARGO_BIN_EXE_qlimits"))
        .args(["ree", &path])
        .env("QLIMITS_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, qlimits(&["ree", &path, "--seed", "7"]).stdout);
}

#[test]
fn ree_input_errors() {
    let dir = TempDir::new().unwrap();
    let not_density = write(
        &dir,
        "neg.json",
        &density_json(&[[1.5, 0.0, 0.0, 0.0], [0.0, -0.5, 0.0, 0.0], [0.0; 4], [0.0; 4]]),
    );
    assert_eq!(qlimits(&["ree", &not_density]).status.code(), Some(3));
    let tripartite = write(
        &dir,
        "tri.json",
        &serde_json::json!({"dims": [2, 1, 2], "matrix": [[[0.5,0],[0,0],[0,0],[0,0]],[[0,0],[0.5,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]]]}).to_string(),
    );
    assert_eq!(qlimits(&["ree", &tripartite]).status.code(), Some(3));
    assert_eq!(qlimits(&["ree"]).status.code(), Some(2));
}

#[test]
fn ree_axiom_report() {
    let o = qlimits(&["ree", "--axioms", "--samples", "3", "--restarts", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let checks = v["axioms"]["checks"].as_array().unwrap();
    let names: Vec<&str> = checks.iter().map(|c| c["axiom"].as_str().unwrap()).collect();
    assert_eq!(names, ["E1", "E2", "E3", "E4", "E5", "E6"]);
    assert_eq!(checks[5]["asserted"], false);
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use matvar_core::BoundReport;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_matvar"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_reports(path: &Path) -> Vec<BoundReport> {
    let text = std::fs::read_to_string(path).unwrap();
    let values: Vec<serde_json::Value> = serde_json::from_str(&text).unwrap();
    values
        .into_iter()
        .map(|v| BoundReport::from_json(&v.to_string()).unwrap())
        .collect()
}

#[test]
fn infer_q_recovers_the_beta_table_quadratic() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("fit.json");
    let o = run(&["infer-q", "--dist", path_str(&data("beta23_table.json")), "--out-json", path_str(&json)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    let q = &v["fit"]["quadratic"];
    assert!((q["delta"].as_f64().unwrap() + 0.2).abs() < 1e-3);
    assert!((q["beta"].as_f64().unwrap() - 0.2).abs() < 1e-3);
    assert!(q["gamma"].as_f64().unwrap().abs() < 1e-3);
    assert_eq!(v["membership"]["pass"], true);
}

#[test]
fn corrupted_pmf_is_a_membership_failure() {
    assert_eq!(code(&run(&["infer-q", "--dist", path_str(&data("poisson_corrupted.json"))])), 2);
    assert_eq!(code(&run(&["verify", "--dist", path_str(&data("poisson_corrupted.json"))])), 2);
    assert_eq!(code(&run(&["verify", "--dist", "poisson:lambda=3"])), 0);
}

#[test]
fn missing_input_is_an_io_failure() {
    let o = run(&["infer-q", "--dist", path_str(&data("does-not-exist.json"))]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("does-not-exist.json"));
    assert_eq!(code(&run(&["bounds", "--dist", "normal", "--n", "1"])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn gaussian_first_order_bound_passes() {
    let o = run(&[
        "bounds",
        "--dist",
        "normal",
        "--functions",
        path_str(&data("x_x2.json")),
        "--n",
        "1",
        "--theorems",
        "poincare",
    ]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let line = out.lines().find(|l| l.contains("poincare")).unwrap();
    assert!(line.contains("PASS min-eig=") && line.contains(" tol="), "{line}");
}

#[test]
fn poisson_two_function_inequality() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let csv = dir.path().join("r.csv");
    let o = run(&[
        "bounds",
        "--dist",
        "poisson:lambda=2",
        "--functions",
        path_str(&data("poisson_pair.json")),
        "--n",
        "1",
        "--out-json",
        path_str(&json),
        "--out-csv",
        path_str(&csv),
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let r = &read_reports(&json)[0];

    // Direct sums over the pmf: D and λ·E[Δg_i Δg_j] for g = (x², 2^{−x}).
    let lambda: f64 = 2.0;
    let mut pmf = vec![(-lambda).exp()];
    for j in 0..200 {
        pmf.push(pmf[j] * lambda / (j + 1) as f64);
    }
    let g = [|x: f64| x * x, |x: f64| 0.5f64.powf(x)];
    let e = |f: &dyn Fn(f64) -> f64| pmf.iter().enumerate().map(|(j, p)| p * f(j as f64)).sum::<f64>();
    for i in 0..2 {
        for k in 0..2 {
            let d = e(&|x| g[i](x) * g[k](x)) - e(&|x| g[i](x)) * e(&|x| g[k](x));
            let h = lambda * e(&|x| (g[i](x + 1.0) - g[i](x)) * (g[k](x + 1.0) - g[k](x)));
            assert!((r.d.get(i, k) - d).abs() < 1e-10, "D[{i}{k}]");
            assert!((r.h[0].get(i, k) - h).abs() < 1e-10, "H[{i}{k}]");
        }
    }
    let rows = std::fs::read_to_string(csv).unwrap();
    assert!(rows.starts_with("n,matrix,index,eigenvalue"));
    assert!(rows.lines().any(|l| l.starts_with("1,A_n,")));
}

#[test]
fn reports_round_trip_and_reverify() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let o = run(&[
        "bounds",
        "--dist",
        "gamma:shape=3,scale=0.5",
        "--functions",
        path_str(&data("gauss4.json")),
        "--n",
        "1,2",
        "--out-json",
        path_str(&json),
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let reports = read_reports(&json);
    assert_eq!(reports.len(), 2);
    for r in &reports {
        assert_eq!(r.reverify().unwrap(), r.verdicts);
        assert_eq!(r.provenance.engine, matvar_core::EngineConfig::default());
    }
}

#[test]
fn singular_coefficient_exit() {
    let o = run(&["bounds", "--dist", "student-t:nu=2", "--functions", path_str(&data("x_x2.json")), "--n", "2"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("k = 2"));
}

#[test]
fn class_failure_exit() {
    let o = run(&[
        "bounds",
        "--dist",
        "beta:a=0.5,b=0.5",
        "--functions",
        r#"{"functions": [{"expr": "log(x) - log(1 - x)"}]}"#,
        "--n",
        "1",
    ]);
    assert_eq!(code(&o), 4);
}

#[test]
fn tabulated_member_has_no_sampler() {
    let o = run(&[
        "mc-verify",
        "--dist",
        path_str(&data("beta23_table.json")),
        "--functions",
        path_str(&data("x_x2.json")),
        "--n",
        "1",
    ]);
    assert_eq!(code(&o), 5);
}

#[test]
fn gaussian_chain() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("chain.csv");
    let o = run(&[
        "chain",
        "--dist",
        "normal",
        "--functions",
        path_str(&data("cube.json")),
        "--n",
        "3",
        "--out-csv",
        path_str(&csv),
    ]);
    assert_eq!(code(&o), 0);
    let mut rdr = csv::Reader::from_path(&csv).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    let s: Vec<(String, f64, f64)> = rows
        .iter()
        .filter(|r| &r[1] == "S_n")
        .map(|r| (r[2].to_string(), r[3].parse().unwrap(), r[4].parse().unwrap()))
        .collect();
    let want = [("upper", 27.0), ("lower", 9.0), ("upper", 15.0)];
    for ((side, bound, var), (ws, wb)) in s.iter().zip(want) {
        assert_eq!(side, ws);
        assert!((bound - wb).abs() < 1e-6 && (var - 15.0).abs() < 1e-6);
    }
    assert_eq!(s.len(), 3);
}

#[test]
fn linear_chain_is_tight() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("chain.csv");
    let o = run(&[
        "chain",
        "--dist",
        "poisson:lambda=4",
        "--functions",
        r#"{"functions": [{"poly": [1, 2]}, {"poly": [0, -1]}]}"#,
        "--n",
        "1",
        "--out-csv",
        path_str(&csv),
    ]);
    assert_eq!(code(&o), 0);
    let mut rdr = csv::Reader::from_path(&csv).unwrap();
    for r in rdr.records().map(Result::unwrap) {
        let min: f64 = r[5].parse().unwrap();
        assert!(min.abs() < 1e-9, "{r:?}");
    }
    assert_eq!(code(&run(&["chain", "--dist", "normal", "--functions", path_str(&data("cube.json")), "--n", "0"])), 1);
}

#[test]
fn mc_verify_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for i in 0..2 {
        let json = dir.path().join(format!("mc{i}.json"));
        let o = run(&[
            "mc-verify",
            "--dist",
            "normal:mean=1,var=2",
            "--functions",
            path_str(&data("gauss4.json")),
            "--n",
            "1",
            "--mc-samples",
            "40000",
            "--out-json",
            path_str(&json),
        ]);
        assert_eq!(code(&o), 0, "{}", stdout(&o));
        outputs.push((o.stdout, std::fs::read(json).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
    let other = run(&[
        "mc-verify",
        "--dist",
        "normal:mean=1,var=2",
        "--functions",
        path_str(&data("gauss4.json")),
        "--n",
        "1",
        "--mc-samples",
        "40000",
        "--mc-seed",
        "7",
    ]);
    assert_eq!(code(&other), 0);
    assert_ne!(other.stdout, outputs[0].0);
}

#[test]
fn config_file_with_flag_overrides() {
    let o = run(&["mc-verify", "--config", path_str(&data("poisson_run.json"))]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("samples=50000"));

    let o = run(&["bounds", "--config", path_str(&data("poisson_run.json")), "--theorems", "bessel"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("bessel: PASS") && !out.contains("poincare"), "{out}");

    let o = run(&["bounds", "--config", path_str(&data("poisson_run.json")), "--quiet"]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
}

#[test]
fn null_term_is_annotated() {
    let o = run(&[
        "bounds",
        "--dist",
        path_str(&data("two_point.json")),
        "--functions",
        path_str(&data("x_x2.json")),
        "--n",
        "2",
        "--theorems",
        "bessel",
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("null matrix"));
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use framekz_cli::io::{read_cholesky, read_sequence, SequenceFile};
use serde_json::Value;

const S3: f64 = 0.866_025_403_784_438_6;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn framekz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_framekz"))
        .args(args)
        .env_remove("FRAMEKZ_EPS_RANK")
        .env_remove("FRAMEKZ_EPS_ID")
        .output()
        .expect("binary runs")
}

fn fx(name: &str) -> String {
    fixture(name).to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json_report(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.push("--json");
    let o = framekz(&all);
    let v = serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(&o)));
    (o.status.code().unwrap(), v)
}

fn close(a: &[Vec<[f64; 2]>], b: &[[f64; 2]], row: usize, tol: f64) -> bool {
    a[row].iter().zip(b).all(|(x, y)| (x[0] - y[0]).abs() <= tol && (x[1] - y[1]).abs() <= tol)
}

#[test]
fn forward_orthonormal_matches_golden_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.json");
    let gram = dir.path().join("gram.json");
    let o = framekz(&["forward", &fx("orthonormal.json"), "--out", out.to_str().unwrap(), "--gram-out", gram.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(fs::read_to_string(&out).unwrap(), fs::read_to_string(fixture("expected/orthonormal_forward.json")).unwrap());
    assert_eq!(fs::read_to_string(&gram).unwrap(), fs::read_to_string(fixture("expected/orthonormal_gram.json")).unwrap());
    let g = read_sequence(&out).unwrap();
    let input = read_sequence(&fixture("orthonormal.json")).unwrap();
    assert_eq!(g.vectors, input.vectors);
}

#[test]
fn forward_angle_pair() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.json");
    let o = framekz(&["forward", &fx("angle.json"), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let g = read_sequence(&out).unwrap();
    assert!(close(&g.vectors, &[[1.0, 0.0], [0.0, 0.0]], 0, 1e-15));
    assert!(close(&g.vectors, &[[0.0, 0.0], [S3, 0.0]], 1, 1e-15));
    assert_eq!(g.metadata.get("source").map(String::as_str), Some("forward"));
}

#[test]
fn forward_rejects_non_unit_row_with_margin() {
    let o = framekz(&["forward", &fx("non_unit.json")]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("unit_norm[1] = 0.2"), "{}", stdout(&o));
    let (code, r) = json_report(&["forward", &fx("non_unit.json")]);
    assert_eq!(code, 3);
    assert_eq!(r["status"], "error");
    assert!((r["diagnostics"]["unit_norm[1]"].as_f64().unwrap() - 0.2).abs() < 1e-15);
}

#[test]
fn synthesize_admissible_angle() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e.json");
    let o = framekz(&["synthesize", &fx("angle_aux.json"), "--method", "admissible", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let e = read_sequence(&out).unwrap();
    assert!(close(&e.vectors, &[[1.0, 0.0], [0.0, 0.0]], 0, 1e-12));
    assert!(close(&e.vectors, &[[0.5, 0.0], [S3, 0.0]], 1, 1e-12));
    assert_eq!(e.metadata.get("method").map(String::as_str), Some("admissible"));
}

#[test]
fn synthesize_orthonormal_is_identity_for_both_methods() {
    for method in ["triangular", "admissible"] {
        let (code, r) = json_report(&["synthesize", &fx("orthonormal.json"), "--method", method]);
        assert_eq!(code, 0);
        let e: Vec<Vec<[f64; 2]>> = serde_json::from_value(r["outputs"]["e"].clone()).unwrap();
        assert!(close(&e, &[[1.0, 0.0], [0.0, 0.0]], 0, 1e-12), "{method}");
        assert!(close(&e, &[[0.0, 0.0], [1.0, 0.0]], 1, 1e-12), "{method}");
    }
}

#[test]
fn synthesize_rejects_gram_norm_above_one() {
    let o = framekz(&["synthesize", &fx("gram_norm_1_5.json"), "--method", "triangular"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("contraction margin 0.5"), "{}", stdout(&o));
}

#[test]
fn analyze_reports_bessel_verdicts() {
    let o = framekz(&["analyze", &fx("angle_aux.json"), "--kind", "bessel"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("Bessel: yes; tight: no; eigenvalues 1, 0.75"), "{}", stdout(&o));

    let o = framekz(&["analyze", &fx("parseval.json"), "--kind", "bessel"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("tight frame: yes; trace = 2 (d = 2)"), "{}", stdout(&o));

    let o = framekz(&["analyze", &fx("angle.json"), "--kind", "units"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("Bessel: yes; tight: no; eigenvalues 1, 0.75"), "{text}");
    assert!(text.contains("consecutive overlaps 0.5"), "{text}");
}

#[test]
fn analyze_non_bessel_is_a_warning() {
    let (code, r) = json_report(&["analyze", &fx("gram_norm_1_5.json"), "--kind", "bessel"]);
    assert_eq!(code, 1);
    assert_eq!(r["status"], "warning");
    assert!((r["diagnostics"]["contraction"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn analyze_empty_file_is_a_parse_error() {
    assert_eq!(framekz(&["analyze", &fx("empty.json"), "--kind", "units"]).status.code(), Some(2));
}

#[test]
fn kaczmarz_traces() {
    let (code, r) = json_report(&["kaczmarz", &fx("orthonormal.json"), "--x", "2,3"]);
    assert_eq!(code, 0);
    assert_eq!(r["outputs"]["residuals"], serde_json::json!([3.0, 0.0]));
    assert_eq!(r["diagnostics"]["defect"], 0.0);

    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("trace.csv");
    let o = framekz(&["kaczmarz", &fx("angle.json"), "--x-file", &fx("x_angle.json"), "--trace-out", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("residuals 1, 0.5; defect 0.25"), "{}", stdout(&o));
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,residual,coef_abs,energy_residual"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 2);
    assert!((rows[1][1] - 0.5).abs() < 1e-15 && (rows[1][2] - S3).abs() < 1e-15);
    assert!(rows.iter().all(|r| r[3] <= 1e-12));
}

#[test]
fn kaczmarz_wrong_dimension_is_usage_error() {
    assert_eq!(framekz(&["kaczmarz", &fx("orthonormal.json"), "--x", "1,2,3"]).status.code(), Some(2));
    assert_eq!(framekz(&["kaczmarz", &fx("orthonormal.json"), "--x", "1,oops"]).status.code(), Some(2));
    assert_eq!(framekz(&["kaczmarz", &fx("orthonormal.json")]).status.code(), Some(2));
}

#[test]
fn chol_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("chol.json");
    let o = framekz(&["chol", &fx("rank_one.json"), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read_to_string(&out).unwrap(), fs::read_to_string(fixture("expected/rank_one_chol.json")).unwrap());
    let f = read_cholesky(&out).unwrap();
    assert_eq!((f.pivots, f.rank), (vec![1], 1));

    let (code, r) = json_report(&["chol", &fx("identity3.json")]);
    assert_eq!(code, 0);
    assert_eq!(r["outputs"]["pivots"], serde_json::json!([1, 2, 3]));
    assert_eq!(r["diagnostics"]["factorization_residual"], 0.0);

    let o = framekz(&["chol", &fx("indefinite.json")]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("eigenvalue -1"), "{}", stdout(&o));
}

#[test]
fn equiv_verdicts() {
    let (code, r) = json_report(&["equiv", &fx("angle.json"), &fx("angle.json")]);
    assert_eq!(code, 0);
    assert_eq!(r["outputs"]["equivalent"], true);
    assert_eq!(r["diagnostics"]["uu_star_distance"], 0.0);

    let (_, r) = json_report(&["equiv", &fx("angle.json"), &fx("angle_rotated.json")]);
    assert_eq!(r["outputs"]["equivalent"], true);
    assert!(r["diagnostics"]["alignment_residual"].as_f64().unwrap() <= 1e-12);

    let (_, r) = json_report(&["equiv", &fx("orthonormal.json"), &fx("angle.json")]);
    assert_eq!(r["outputs"]["equivalent"], false);
    assert!((r["diagnostics"]["uu_star_distance"].as_f64().unwrap() - 0.25).abs() < 1e-15);

    assert_eq!(framekz(&["equiv", &fx("angle.json"), &fx("three_units.json")]).status.code(), Some(2));
}

#[test]
fn tolerance_precedence() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_framekz"));
        cmd.args(["chol", &fx("identity3.json"), "--json"]).env_remove("FRAMEKZ_EPS_ID").env_remove("FRAMEKZ_EPS_RANK");
        if let Some(v) = env {
            cmd.env("FRAMEKZ_EPS_ID", v).env("FRAMEKZ_EPS_RANK", v);
        }
        if let Some(v) = flag {
            cmd.args(["--eps-id", v, "--eps-rank", v]);
        }
        let r: Value = serde_json::from_slice(&cmd.output().unwrap().stdout).unwrap();
        let t = &r["inputs"]["tolerances"];
        (t["eps_id"].as_f64().unwrap(), t["eps_rank"].as_f64().unwrap())
    };
    assert_eq!(run(None, None), (1e-8, 1e-9));
    assert_eq!(run(Some("1e-5"), None), (1e-5, 1e-5));
    assert_eq!(run(Some("1e-5"), Some("1e-3")), (1e-3, 1e-3));
    assert_eq!(run(None, Some("1e-3")), (1e-3, 1e-3));
}

#[test]
fn invalid_tolerances_are_usage_errors() {
    assert_eq!(framekz(&["chol", &fx("identity3.json"), "--eps-id", "-1"]).status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_framekz"))
        .args(["chol", &fx("identity3.json")])
        .env("FRAMEKZ_EPS_RANK", "abc")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn malformed_documents_are_parse_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        r#"{"dim": 2, "vectors": []}"#,
        r#"{"dim": 2, "vectors": [[[1, 0]]]}"#,
        r#"{"dim": 1, "vectors": [[[1, 0, 3]]]}"#,
        r#"{"dim": 1, "vectors": [[[1, 0]]], "extra": 1}"#,
        r#"[1, 2]"#,
    ];
    for (i, text) in cases.iter().enumerate() {
        let p = dir.path().join(format!("bad{i}.json"));
        fs::write(&p, text).unwrap();
        assert_eq!(framekz(&["forward", p.to_str().unwrap()]).status.code(), Some(2), "{text}");
    }
}

#[test]
fn forward_output_reads_back_as_sequence_file() {
    let (code, r) = json_report(&["forward", &fx("three_units.json")]);
    assert_eq!(code, 0);
    let g: Vec<Vec<[f64; 2]>> = serde_json::from_value(r["outputs"]["g"].clone()).unwrap();
    let file = SequenceFile { dim: 3, vectors: g, metadata: Default::default() };
    file.validate().unwrap();
    // g_1 = e_1 - <e_1, e_0> g_0 = (0, 0.8, 0)
    assert!(close(&file.vectors, &[[0.0, 0.0], [0.8, 0.0], [0.0, 0.0]], 1, 1e-15));
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(framekz(&["--help"]).status.code(), Some(0));
    assert_eq!(framekz(&["--version"]).status.code(), Some(0));
    assert_eq!(framekz(&["bogus"]).status.code(), Some(2));
}

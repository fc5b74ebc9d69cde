use std::path::Path;

use framekz_cli::io::{self, MatrixFile, SequenceFile};
use framekz_testkit as tk;
use proptest::prelude::*;
use rand::Rng;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

fn run(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = framekz_cli::run(std::iter::once("framekz").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap())
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn finite_f64() -> impl Strategy<Value = f64> {
    any::<u64>().prop_map(f64::from_bits).prop_filter("finite", |x| x.is_finite())
}

fn bits(rows: &[Vec<[f64; 2]>]) -> Vec<u64> {
    rows.iter().flatten().flatten().map(|x| x.to_bits()).collect()
}

proptest! {
    #![proptest_config(config(128))]

    #[test]
    fn sequence_files_round_trip_bit_exact(dim in 1usize..5, len in 1usize..6, seed in any::<u64>(), special in finite_f64()) {
        let mut rng = tk::rng(seed);
        let mut vectors: Vec<Vec<[f64; 2]>> = (0..len)
            .map(|_| (0..dim).map(|_| [f64::from_bits(rng.random::<u64>() >> 2), rng.random::<f64>() - 0.5]).collect())
            .collect();
        vectors[0][0] = [special, -0.0];
        for row in &mut vectors {
            for e in row.iter_mut() {
                if !e[0].is_finite() {
                    e[0] = 1.0;
                }
            }
        }
        let file = SequenceFile { dim, vectors, metadata: [("k".to_string(), "v".to_string())].into() };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.json");
        io::write_json(&path, &file).unwrap();
        let back = io::read_sequence(&path).unwrap();
        prop_assert_eq!(bits(&back.vectors), bits(&file.vectors));
        prop_assert_eq!(back.metadata, file.metadata);
    }

    #[test]
    fn matrix_files_round_trip_bit_exact(rows in 1usize..5, cols in 1usize..5, seed in any::<u64>()) {
        let mut rng = tk::rng(seed);
        let a = tk::gaussian_matrix(&mut rng, rows, cols).map(|z| z * 10f64.powi(rng.random_range(-300..300)));
        let file = MatrixFile::from_matrix(&a);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        io::write_json(&path, &file).unwrap();
        let back = io::read_matrix(&path).unwrap();
        prop_assert_eq!(bits(&back.entries), bits(&file.entries));
        prop_assert_eq!(back.to_matrix(), a);
    }
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn forward_synthesize_forward_reproduces_g(seed in any::<u64>(), d in 1usize..=5, len in 1usize..=10, admissible in any::<bool>()) {
        let mut rng = tk::rng(seed);
        let es = tk::unit_sequence(&mut rng, d, len);
        let dir = tempfile::tempdir().unwrap();
        let e0 = dir.path().join("e0.json");
        let g = dir.path().join("g.json");
        let e1 = dir.path().join("e1.json");
        let g1 = dir.path().join("g1.json");
        io::write_json(&e0, &SequenceFile::from_vectors(&es)).unwrap();
        let method = if admissible { "admissible" } else { "triangular" };

        let (code, text) = run(&["forward", p(&e0), "--out", p(&g)]);
        prop_assert_eq!(code, 0, "{}", text);
        let (code, text) = run(&["synthesize", p(&g), "--method", method, "--out", p(&e1)]);
        prop_assert!(code <= 1, "{}", text);
        let (code, text) = run(&["forward", p(&e1), "--out", p(&g1)]);
        prop_assert_eq!(code, 0, "{}", text);

        let a = io::read_sequence(&g).unwrap().to_vectors();
        let b = io::read_sequence(&g1).unwrap().to_vectors();
        prop_assert!(tk::max_entry_distance(&a, &b) <= 1e-8);
        // the synthesized units are equivalent to the originals
        let (code, text) = run(&["equiv", p(&e0), p(&e1), "--json"]);
        prop_assert_eq!(code, 0);
        let r: serde_json::Value = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&r["outputs"]["equivalent"], &serde_json::Value::Bool(true));
    }

    #[test]
    fn json_reports_have_numeric_diagnostics(seed in any::<u64>(), d in 1usize..=4, len in 1usize..=6) {
        let mut rng = tk::rng(seed);
        let es = tk::unit_sequence(&mut rng, d, len);
        let dir = tempfile::tempdir().unwrap();
        let e0 = dir.path().join("e.json");
        io::write_json(&e0, &SequenceFile::from_vectors(&es)).unwrap();
        let (code, text) = run(&["analyze", p(&e0), "--kind", "units", "--json"]);
        prop_assert_eq!(code, 0, "{}", text);
        let r: serde_json::Value = serde_json::from_str(&text).unwrap();
        let diags = r["diagnostics"].as_object().unwrap();
        prop_assert!(diags.values().all(|v| v.is_f64()));
        prop_assert_eq!(diags["stability_disagreements"].as_f64(), Some(0.0));
        prop_assert_eq!(&r["status"], "ok");
    }
}

#[test]
fn inline_vectors_parse() {
    let v = io::parse_vector("1, -2.5").unwrap();
    assert_eq!(v.len(), 2);
    assert_eq!(v[1].re, -2.5);
    let v = io::parse_vector("[[1, 2], 3]").unwrap();
    assert_eq!((v[0].im, v[1].re), (2.0, 3.0));
    assert!(io::parse_vector("").is_err());
    assert!(io::parse_vector("[]").is_err());
    assert!(io::parse_vector("1,,2").is_err());
}

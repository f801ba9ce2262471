use std::path::PathBuf;
use std::process::{Command, Output};

use sistab_cli::{model_hash, parse_model, parse_model_str, CertificateFile};
use sistab_core::DirectionKind;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn sistab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sistab")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

const EXAMPLE1: &str = include_str!("../fixtures/example1.toml");

#[test]
fn fixtures_parse() {
    let m1 = parse_model(&fixture("example1.toml")).unwrap();
    assert_eq!((m1.n0(), m1.dim()), (2, 2));
    assert!(m1.all_infinite());
    let m2 = parse_model(&fixture("example2.toml")).unwrap();
    assert_eq!(m2.directions()[1].kind, DirectionKind::Periodic(3));
}

#[test]
fn shape_error_names_block() {
    let bad = EXAMPLE1.replace(
        r#"A_TS = [["1", "0", "0", "2"], ["0", "0", "0.5", "0"]]"#,
        r#"A_TS = [["1", "0", "0"], ["0", "0", "0.5"]]"#,
    );
    let e = parse_model_str(&bad).unwrap_err().to_string();
    assert!(e.contains("A_TS") && e.contains("2x4"), "{e}");
}

#[test]
fn bad_kind_and_entry_are_rejected() {
    let e = parse_model_str(&EXAMPLE1.replacen("\"infinite\"", "\"toroidal\"", 1)).unwrap_err();
    assert!(e.to_string().contains("toroidal"));
    let e = parse_model_str(&EXAMPLE1.replace("\"-0.5\"", "\"minus a half\"")).unwrap_err();
    assert!(e.to_string().contains("A_TT"));
}

#[test]
fn hash_ignores_spelling() {
    let a = parse_model_str(EXAMPLE1).unwrap();
    let b = parse_model_str(&EXAMPLE1.replace("\"-0.5\"", "\"-1/2\"")).unwrap();
    let c = parse_model_str(&EXAMPLE1.replace("\"-0.5\"", "\"-0.25\"")).unwrap();
    assert_eq!(model_hash(&a), model_hash(&b));
    assert_ne!(model_hash(&a), model_hash(&c));
}

#[test]
fn analyze_example1() {
    let o = sistab(&["analyze", fixture("example1.toml").to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["status"], "Stable");
    assert!((v["epsilon_star"].as_f64().unwrap() - 3.375).abs() < 5e-3);
}

#[test]
fn analyze_example2() {
    let o = sistab(&["analyze", fixture("example2.toml").to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    assert!((json(&o)["epsilon_star"].as_f64().unwrap() - 19.5).abs() < 5e-2);
}

#[test]
fn destabilized_example1_exits_one_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("flip.toml");
    std::fs::write(&p, EXAMPLE1.replace(r#"[["-0.5", "0"], ["0", "-1"]]"#, r#"[["0.5", "0"], ["0", "1"]]"#)).unwrap();
    let o = sistab(&["analyze", p.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!json(&o)["witness"].is_null());
}

#[test]
fn finite_directions_are_unsupported() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("finite.toml");
    std::fs::write(&p, EXAMPLE1.replacen("kind = \"infinite\"", "kind = \"finite\"\nextent = 5", 1)).unwrap();
    let o = sistab(&["analyze", p.to_str().unwrap()]);
    assert!(o.status.code().unwrap() > 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("unsupported"));
}

#[test]
fn certify_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("c.json");
    let model = fixture("example1.toml");
    let o = sistab(&["certify", model.to_str().unwrap(), "-o", cert.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = sistab(&["verify", model.to_str().unwrap(), cert.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v = json(&o);
    assert_eq!(v["valid"], true);
    assert!(v["residual"].as_f64().unwrap() < 1e-6);

    // JSON round trip is stable
    let text = std::fs::read_to_string(&cert).unwrap();
    let parsed = CertificateFile::from_json(&text).unwrap();
    assert_eq!(parsed.to_json(), text);

    // tampering is detected
    let mut bad = parsed.clone();
    bad.blocks[0].re[0][0] = (bad.blocks[0].re[0][0].parse::<f64>().unwrap() + 0.1).to_string();
    std::fs::write(&cert, bad.to_json()).unwrap();
    let o = sistab(&["verify", model.to_str().unwrap(), cert.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["valid"], false);

    // wrong model
    std::fs::write(&cert, text).unwrap();
    let o = sistab(&["verify", fixture("example2.toml").to_str().unwrap(), cert.to_str().unwrap()]);
    assert!(o.status.code().unwrap() > 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("hash"));
}

#[test]
fn certify_example2_has_blocks_per_polynomial() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("c.json");
    let o = sistab(&["certify", fixture("example2.toml").to_str().unwrap(), "-o", cert.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let f = CertificateFile::from_json(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    let mut polys: Vec<usize> = f.blocks.iter().map(|b| b.poly).collect();
    polys.dedup();
    assert_eq!(polys, vec![0, 1, 2]);
    assert!((f.epsilon - 19.5).abs() < 5e-2);
}

#[test]
fn sample_example1() {
    let o = sistab(&["sample", fixture("example1.toml").to_str().unwrap(), "--grid", "64,64", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(json(&o)["max_abscissa"].as_f64().unwrap() < 0.0);
}

#[test]
fn simulate_example1_decays() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("t.csv");
    let o = sistab(&[
        "simulate",
        fixture("example1.toml").to_str().unwrap(),
        "--sites",
        "24,24",
        "--init",
        "5,5:*=1",
        "--init",
        "6,5:*=1",
        "--init",
        "6,6:*=1",
        "-o",
        csv_path.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let norms: Vec<f64> = v["norms"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(norms.len(), 4);
    assert!(norms.windows(2).all(|w| w[1] < w[0]));
    let mut r = csv::Reader::from_path(&csv_path).unwrap();
    assert_eq!(r.headers().unwrap(), vec!["time", "k1", "k2", "x1", "x2"]);
    assert_eq!(r.records().count(), 4 * 24 * 24);
}

#[test]
fn simulate_zero_state_is_all_zero() {
    let o = sistab(&["simulate", fixture("example2.toml").to_str().unwrap(), "--sites", "6,3"]);
    assert_eq!(o.status.code(), Some(0));
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    for rec in r.records() {
        let rec = rec.unwrap();
        assert!(rec.iter().skip(3).all(|x| x.parse::<f64>().unwrap() == 0.0));
    }
}

#[test]
fn output_is_deterministic() {
    let run = || stdout(&sistab(&["analyze", fixture("example2.toml").to_str().unwrap(), "--format", "json"]));
    assert_eq!(run(), run());
}

#[test]
fn usage_errors_do_not_collide_with_indeterminate() {
    assert_eq!(sistab(&["analyze"]).status.code(), Some(3));
    assert_eq!(sistab(&["--help"]).status.code(), Some(0));
}

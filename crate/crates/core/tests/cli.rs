use std::path::Path;
use std::process::Command;

use quiverdm::io::RepDocument;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn quiverdm(args: &[&str], dir: &Path) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_quiverdm"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        out: String::from_utf8_lossy(&out.stdout).into_owned(),
        err: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

const OUTLIER: &str = r#"{
  "format": 1,
  "n": 1,
  "vertices": [
    {"subset": [], "dim": 1},
    {"subset": [1], "dim": 1}
  ],
  "edges": [
    {
      "from": [],
      "direction": 1,
      "u": {"rows": 1, "cols": 1, "entries": [
        [[1.0,0.0]]
      ]},
      "y": {"rows": 1, "cols": 1, "entries": [
        [[1.5,0.0]]
      ]}
    }
  ],
  "metadata": {}
}
"#;

const OUTLIER_SIGMA1_REPORT: &str = r#"validate sigma1: FAIL
  tol: 1e-9  seed: none
  sigma1.spectrum: 1 checks, 1 failed, max residual 5.000e-1
  violation sigma1.spectrum at edge ({},1): residual 5.000e-1 (eigenvalues of y*u outside the strip: 1.500000+0.000000i)

{
  "checks": [
    {
      "detail": "eigenvalues of y*u outside the strip: 1.500000+0.000000i",
      "location": "edge ({},1)",
      "passed": false,
      "residual": 0.5,
      "tag": "sigma1.spectrum",
      "threshold": 1e-9
    }
  ],
  "passed": false,
  "seed": null,
  "title": "validate sigma1",
  "tol": 1e-9,
  "violations": [
    {
      "detail": "eigenvalues of y*u outside the strip: 1.500000+0.000000i",
      "location": "edge ({},1)",
      "residual": 0.5,
      "tag": "sigma1.spectrum"
    }
  ]
}
"#;

fn gen_to(dir: &Path, name: &str, args: &[&str]) {
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["-o", name]);
    let r = quiverdm(&full, dir);
    assert_eq!(r.code, 0, "{}", r.err);
}

#[test]
fn outlier_report_is_golden() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("o.json"), OUTLIER).unwrap();
    let r = quiverdm(&["validate", "o.json", "--category", "sigma1"], tmp.path());
    assert_eq!(r.code, 1);
    assert_eq!(r.out, OUTLIER_SIGMA1_REPORT);
    let r = quiverdm(&["validate", "o.json"], tmp.path());
    assert_eq!(r.code, 0);
}

#[test]
fn canonical_output_is_a_fixed_point() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("o.json"), OUTLIER).unwrap();
    let doc = RepDocument::parse(OUTLIER).unwrap();
    assert_eq!(doc.to_json_string().unwrap(), OUTLIER);
    let r = quiverdm(&["apply", "o.json", "--functor", "D", "-o", "d.json"], tmp.path());
    assert_eq!(r.code, 0, "{}", r.out);
    let r = quiverdm(&["apply", "d.json", "--functor", "D"], tmp.path());
    assert_eq!(r.code, 0);
    assert_eq!(r.out, OUTLIER);
    assert!(r.err.starts_with("apply D: PASS"));
}

#[test]
fn q_refuses_inputs_outside_sigma1() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("o.json"), OUTLIER).unwrap();
    let r = quiverdm(&["apply", "o.json", "--functor", "Q", "-o", "q.json"], tmp.path());
    assert_eq!(r.code, 1);
    assert!(r.out.contains("1.500000+0.000000i"), "{}", r.out);
    assert!(!tmp.path().join("q.json").exists());
    let r = quiverdm(&["verify", "o.json", "--suite", "pde"], tmp.path());
    assert_eq!(r.code, 1);
    assert!(r.out.contains("input is not in sigma1"));
}

#[test]
fn generation_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["gen", "--n", "3", "--dim", "1,2,1", "--seed", "11"];
    let a = quiverdm(&args, tmp.path());
    let b = quiverdm(&args, tmp.path());
    assert_eq!(a.code, 0);
    assert_eq!(a.out, b.out);
    assert_eq!(a.err, b.err);
    let other = quiverdm(&["gen", "--n", "3", "--dim", "1,2,1", "--seed", "12"], tmp.path());
    assert_ne!(a.out, other.out);
    let doc = RepDocument::parse(&a.out).unwrap();
    assert_eq!(doc.rep.dims(), &[2; 8]);
    assert_eq!(doc.metadata["seed"], 11);
}

#[test]
fn q_then_g_returns_to_the_input() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    gen_to(dir, "s.json", &["--n", "2", "--dim", "2", "--seed", "5", "--nilpotent"]);
    let r = quiverdm(&["apply", "s.json", "--functor", "Q", "-o", "c.json"], dir);
    assert_eq!(r.code, 0, "{}", r.out);
    assert!(r.out.contains("roundtrip.u"));
    assert_eq!(quiverdm(&["validate", "c.json", "--category", "c"], dir).code, 0);
    assert_eq!(quiverdm(&["validate", "c.json", "--category", "qui"], dir).code, 0);
    let r = quiverdm(&["apply", "c.json", "--functor", "G", "-o", "back.json"], dir);
    assert_eq!(r.code, 0, "{}", r.out);
    let start = RepDocument::read(&dir.join("s.json")).unwrap();
    let back = RepDocument::read(&dir.join("back.json")).unwrap();
    for ((_, a), (_, b)) in start.rep.edges().zip(back.rep.edges()) {
        assert!(a.u.dist_fro(&b.u) < 1e-8 * (1.0 + a.u.norm_fro()));
        assert!(a.y.dist_fro(&b.y) < 1e-8 * (1.0 + a.y.norm_fro()));
    }
    assert_eq!(back.metadata, start.metadata);
}

#[test]
fn verify_suites_pass_on_generated_input() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    gen_to(dir, "s.json", &["--n", "2", "--dim", "2,1", "--seed", "8"]);
    for suite in ["pde", "canvar", "main"] {
        let r = quiverdm(&["verify", "s.json", "--suite", suite, "--seed", "4", "--samples", "4"], dir);
        assert_eq!(r.code, 0, "{suite}: {}", r.out);
        assert!(r.out.contains("seed: 4"));
        assert!(r.out.contains("\"seed\": 4"));
    }
    gen_to(dir, "c.json", &["--n", "2", "--dim", "2", "--category", "c", "--seed", "9"]);
    assert_eq!(quiverdm(&["verify", "c.json", "--suite", "main"], dir).code, 1);
}

#[test]
fn scalar_pde_residuals_are_tiny() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    gen_to(dir, "s.json", &["--n", "1", "--dim", "1", "--seed", "2", "--no-conjugate"]);
    let r = quiverdm(&["verify", "s.json", "--suite", "pde", "--tol", "1e-12"], dir);
    assert_eq!(r.code, 0, "{}", r.out);
    let json = &r.out[r.out.find("\n{").unwrap()..];
    let v: serde_json::Value = serde_json::from_str(json).unwrap();
    for check in v["checks"].as_array().unwrap() {
        assert!(check["residual"].as_f64().unwrap() <= 1e-12, "{check}");
    }
}

#[test]
fn broken_relation_names_the_edge() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    gen_to(dir, "s.json", &["--n", "2", "--dim", "1", "--seed", "3"]);
    let mut doc = RepDocument::read(&dir.join("s.json")).unwrap();
    let text = doc.to_json_string().unwrap();
    let edge = doc.rep.edges().next().map(|(e, _)| *e).unwrap();
    let mut maps: std::collections::BTreeMap<_, _> = doc.rep.edges().map(|(e, m)| (*e, m.clone())).collect();
    let m = maps.get_mut(&edge).unwrap();
    m.u[(0, 0)] += num_complex::Complex64::new(0.5, 0.0);
    doc.rep = quiverdm::quiver::QuiverRep::new(2, doc.rep.dims().to_vec(), maps).unwrap();
    doc.write(&dir.join("bad.json")).unwrap();
    assert_ne!(std::fs::read_to_string(dir.join("bad.json")).unwrap(), text);
    let r = quiverdm(&["validate", "bad.json"], dir);
    assert_eq!(r.code, 1);
    assert!(r.out.contains("violation qui.uu at I={} i=1 j=2"), "{}", r.out);
}

#[test]
fn malformed_input_exits_two_with_position() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    std::fs::write(dir.join("t.json"), &OUTLIER[..200]).unwrap();
    let r = quiverdm(&["validate", "t.json"], dir);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("line") && r.err.contains("column"), "{}", r.err);
    let shape = OUTLIER.replacen(r#""rows": 1, "cols": 1"#, r#""rows": 2, "cols": 1"#, 1);
    std::fs::write(dir.join("shape.json"), shape).unwrap();
    let r = quiverdm(&["validate", "shape.json"], dir);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("edge"), "{}", r.err);
    let r = quiverdm(&["validate", "missing.json"], dir);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("missing.json"));
}

#[test]
fn usage_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    std::fs::write(dir.join("o.json"), OUTLIER).unwrap();
    assert_eq!(quiverdm(&["validate", "o.json", "--category", "nope"], dir).code, 2);
    assert_eq!(quiverdm(&["apply", "o.json"], dir).code, 2);
    assert_eq!(quiverdm(&["frobnicate"], dir).code, 2);
    assert_eq!(quiverdm(&["gen", "--n", "0"], dir).code, 2);
    assert_eq!(quiverdm(&["gen", "--n", "2", "--dim", "1,2,3"], dir).code, 2);
    assert_eq!(quiverdm(&["gen", "--n", "2", "--category", "c", "--nilpotent"], dir).code, 2);
    assert_eq!(quiverdm(&["gen", "--n", "2", "--dim", "2000"], dir).code, 2);
    let help = quiverdm(&["--help"], dir);
    assert_eq!(help.code, 0);
    assert!(help.out.contains("validate"));
}

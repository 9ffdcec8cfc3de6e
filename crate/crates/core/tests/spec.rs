use paracurv::geometry::evaluate_point;
use paracurv::sampling::candidate_points;
use paracurv::spec::{load_spec, load_spec_str, to_json, SpecError};
use paracurv::zoo::{build_example, ZooBackend, ZooId, ZooParams};

fn zoo_cases() -> Vec<(ZooId, ZooParams)> {
    vec![
        (ZooId::E1, ZooParams::default()),
        (ZooId::E2, ZooParams::beta(0.5)),
        (ZooId::E2, ZooParams::beta(-2.0).with_backend(ZooBackend::Chart)),
        (ZooId::E3, ZooParams::beta(2.0)),
        (ZooId::E5, ZooParams::alpha(-1.0)),
        (ZooId::E6, ZooParams::default()),
    ]
}

#[test]
fn export_then_load_reproduces_every_zoo_entry() {
    for (id, params) in zoo_cases() {
        let (m, _) = build_example(id, params).unwrap();
        let loaded = load_spec_str(&to_json(&m), m.id.clone()).unwrap();
        assert_eq!(loaded, m, "{id}");
        for p in candidate_points(&m.domain, 3, 0, 10) {
            assert_eq!(evaluate_point(&loaded, p), evaluate_point(&m, p), "{id} at {p:?}");
        }
        assert_eq!(to_json(&loaded), to_json(&m));
    }
}

#[test]
fn load_from_file() {
    let (m, _) = build_example(ZooId::E3, ZooParams::beta(1.0)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("space_form.json");
    std::fs::write(&path, to_json(&m)).unwrap();
    let loaded = load_spec(&path).unwrap();
    assert_eq!(loaded.id, "space_form");
    assert_eq!(loaded.backend, m.backend);
    assert!(matches!(load_spec(dir.path().join("missing.json")), Err(SpecError::Io { .. })));
}

const FLAT: &str = r#"{
  "backend": "chart",
  "coords": ["x", "y", "z"],
  "metric": [["1", "0", "0"], ["0", "-1", "0"], ["0", "0", "1"]],
  "phi": [["0", "1", "0"], ["1", "0", "0"], ["0", "0", "0"]],
  "xi": ["0", "0", "1"],
  "eta": ["0", "0", "1"]
}"#;

fn edited(from: &str, to: &str) -> String {
    assert!(FLAT.contains(from));
    FLAT.replacen(from, to, 1)
}

#[test]
fn minimal_chart_spec_loads_with_defaults() {
    let m = load_spec_str(FLAT, "flat").unwrap();
    assert_eq!(m.domain, [[-1.0, 1.0]; 3]);
    let numbers = edited(r#"["0", "0", "1"]
}"#, "[0, 0, 1]\n}");
    assert_eq!(load_spec_str(&numbers, "flat").unwrap(), m);
}

#[test]
fn asymmetric_metric_names_the_pair() {
    let bad = edited(r#"["0", "-1", "0"]"#, r#"["x", "-1", "0"]"#);
    let err = load_spec_str(&bad, "bad").unwrap_err();
    assert!(matches!(err, SpecError::Schema(_)));
    assert!(err.to_string().contains("metric[0][1] != metric[1][0]"), "{err}");
}

#[test]
fn riemannian_metric_fails_the_signature_check() {
    let bad = edited(r#"["0", "-1", "0"]"#, r#"["0", "1", "0"]"#);
    assert!(matches!(load_spec_str(&bad, "bad"), Err(SpecError::Signature(_))));
}

#[test]
fn parse_errors_carry_the_field_path() {
    let bad = edited(r#"["0", "-1", "0"]"#, r#"["0", "-1 +", "0"]"#);
    let err = load_spec_str(&bad, "bad").unwrap_err();
    assert!(matches!(err, SpecError::Parse { ref path, .. } if path == "metric[1][1]"), "{err}");
    let bad = edited(r#""xi": ["0", "0", "1"]"#, r#""xi": ["0", "0", "w"]"#);
    let err = load_spec_str(&bad, "bad").unwrap_err();
    assert!(err.to_string().starts_with("xi[2]: unknown identifier 'w'"), "{err}");
}

#[test]
fn schema_violations() {
    let unknown = edited(r#""backend": "chart","#, r#""backend": "chart", "colour": 1,"#);
    assert!(matches!(load_spec_str(&unknown, "bad"), Err(SpecError::Json(_))));
    let tag = edited(r#""backend": "chart""#, r#""backend": "atlas""#);
    assert!(matches!(load_spec_str(&tag, "bad"), Err(SpecError::Json(_))));
    let missing = edited(r#""eta": ["0", "0", "1"]"#, r#""etc": ["0", "0", "1"]"#);
    assert!(matches!(load_spec_str(&missing, "bad"), Err(SpecError::Json(_))));
    let no_metric = FLAT.replace(r#""metric": [["1", "0", "0"], ["0", "-1", "0"], ["0", "0", "1"]],"#, "");
    assert!(matches!(load_spec_str(&no_metric, "bad"), Err(SpecError::Schema(_))));
    let mixed = edited(r#""backend": "chart","#, r#""backend": "chart", "epsilon": [1, -1, 1],"#);
    assert!(matches!(load_spec_str(&mixed, "bad"), Err(SpecError::Schema(_))));
}

#[test]
fn eta_must_be_dual_to_xi() {
    let bad = edited(r#""eta": ["0", "0", "1"]"#, r#""eta": ["0", "0", "2"]"#);
    assert!(matches!(load_spec_str(&bad, "bad"), Err(SpecError::EtaXi { value }) if value == 2.0));
}

#[test]
fn scalars_are_inlined() {
    let with_scalars = r#"{
      "backend": "chart",
      "metric": [["w", "0", "0"], ["0", "-w", "0"], ["0", "0", "1"]],
      "phi": [["0", "1", "0"], ["1", "0", "0"], ["0", "0", "0"]],
      "xi": ["0", "0", "1"], "eta": ["0", "0", "1"],
      "domain": [[-1, 1], [-1, 1], [-0.5, 0.5]],
      "scalars": {"w": "exp(2*z)"}
    }"#;
    let m = load_spec_str(with_scalars, "warped").unwrap();
    let (e5, _) = build_example(ZooId::E5, ZooParams::alpha(1.0)).unwrap();
    let p = [0.1, -0.2, 0.3];
    let (a, b) = (evaluate_point(&m, p).unwrap(), evaluate_point(&e5, p).unwrap());
    assert!((a.structure.alpha - b.structure.alpha).abs() < 1e-12);
    assert!((a.curvature.tensors.scalar - b.curvature.tensors.scalar).abs() < 1e-9);

    let clash = with_scalars.replace(r#"{"w": "exp(2*z)"}"#, r#"{"z": "1"}"#);
    assert!(matches!(load_spec_str(&clash, "bad"), Err(SpecError::Schema(_))));
    let func = with_scalars.replace(r#"{"w": "exp(2*z)"}"#, r#"{"sin": "1"}"#);
    assert!(matches!(load_spec_str(&func, "bad"), Err(SpecError::Schema(_))));
}

const FRAME: &str = r#"{
  "backend": "lie_frame",
  "structure_constants": {"c12": [0, 0, 2], "c23": [0, 0, 0], "c31": [0, 0, 0]},
  "epsilon": [1, -1, 1],
  "phi": [[0, 1, 0], [1, 0, 0], [0, 0, 0]],
  "xi": [0, 0, 1],
  "eta": [0, 0, 1]
}"#;

#[test]
fn lie_frame_specs() {
    let m = load_spec_str(FRAME, "heisenberg").unwrap();
    let (e2, _) = build_example(ZooId::E2, ZooParams::beta(1.0)).unwrap();
    assert_eq!(m.backend, e2.backend);

    let as_strings = FRAME.replace(r#""xi": [0, 0, 1]"#, r#""xi": ["0", "0", "2/2"]"#);
    assert_eq!(load_spec_str(&as_strings, "h").unwrap().backend, e2.backend);
    let varying = FRAME.replace(r#""xi": [0, 0, 1]"#, r#""xi": ["0", "0", "x"]"#);
    assert!(load_spec_str(&varying, "h").is_err());
    let not_lie = FRAME.replace(r#""c23": [0, 0, 0]"#, r#""c23": [0, 1, 0]"#);
    assert!(matches!(load_spec_str(&not_lie, "h"), Err(SpecError::Geometry { .. })));
    let signs = FRAME.replace("[1, -1, 1]", "[1, 1, 1]");
    assert!(load_spec_str(&signs, "h").is_err());
    let with_metric = FRAME.replace(r#""epsilon""#, r#""metric": [["1","0","0"],["0","-1","0"],["0","0","1"]], "epsilon""#);
    assert!(matches!(load_spec_str(&with_metric, "h"), Err(SpecError::Schema(_))));
}

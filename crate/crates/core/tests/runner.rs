use paracurv::report::Check;
use paracurv::runner::{run_suite, Format, ManifoldSource, RunConfig, RunError, Suite};
use paracurv::spec::to_json;
use paracurv::zoo::{build_example, ZooId, ZooParams};
use serde_json::json;

fn zoo(id: ZooId, params: ZooParams) -> RunConfig {
    RunConfig::new(ManifoldSource::Zoo { id, params })
}

#[test]
fn space_form_passes_with_the_expected_verdicts() {
    let mut cfg = zoo(ZooId::E3, ZooParams::beta(1.0));
    cfg.seed = 7;
    let r = run_suite(&cfg).unwrap();
    assert!(r.passed, "{}", r.to_text());
    assert_eq!(r.exit_code(), 0);
    assert_eq!(r.verdicts["classification"], json!("β-para-Sasakian"));
    assert_eq!(r.verdicts["conformally_flat"], json!(true));
    assert_eq!(r.verdicts["locally_symmetric"], json!(true));
    let k = r.verdicts["constant_curvature"].as_f64().unwrap();
    assert!((k + 1.0).abs() < 1e-9);
    assert_eq!(r.coverage_flags["grad_beta_identically_zero"], json!(true));
    assert!(r.to_text().ends_with("RESULT PASS\n"));
}

#[test]
fn negative_control_fails_at_the_axioms() {
    let r = run_suite(&zoo(ZooId::E6, ZooParams::default())).unwrap();
    assert!(!r.passed);
    assert_eq!(r.exit_code(), 1);
    let c = r.check("axioms.phi_squared").unwrap();
    assert_eq!(c.pass, Some(false));
    assert!((c.max_residual.unwrap() - 0.21).abs() < 1e-9);
    let skipped = r.check("qps.nabla_phi").unwrap();
    assert_eq!(skipped.pass, None);
    assert!(skipped.detail.as_deref().unwrap().contains("non-normal"));
}

#[test]
fn every_other_entry_passes() {
    for (id, params) in [
        (ZooId::E1, ZooParams::default()),
        (ZooId::E2, ZooParams::beta(-2.0)),
        (ZooId::E2, ZooParams::beta(0.5).with_backend(paracurv::zoo::ZooBackend::Chart)),
        (ZooId::E3, ZooParams::beta(-1.0)),
        (ZooId::E5, ZooParams::alpha(2.0)),
    ] {
        let mut cfg = zoo(id, params);
        cfg.samples = 30;
        let r = run_suite(&cfg).unwrap();
        assert!(r.passed, "{id}: {}", r.to_text());
    }
}

#[test]
fn reports_are_byte_identical_across_runs_and_thread_counts() {
    let mut cfg = zoo(ZooId::E2, ZooParams::beta(0.5).with_backend(paracurv::zoo::ZooBackend::Chart));
    cfg.samples = 40;
    cfg.seed = 11;
    let a = run_suite(&cfg).unwrap().to_json();
    let b = run_suite(&cfg).unwrap().to_json();
    assert_eq!(a, b);
    std::env::set_var("PARACURV_THREADS", "1");
    let c = run_suite(&cfg).unwrap().to_json();
    std::env::remove_var("PARACURV_THREADS");
    assert_eq!(a, c);
    cfg.seed = 12;
    assert_ne!(a, run_suite(&cfg).unwrap().to_json());
}

#[test]
fn suites_can_be_selected() {
    let mut cfg = zoo(ZooId::E3, ZooParams::beta(2.0));
    cfg.samples = 5;
    cfg.suites = vec![Suite::Classify, Suite::Axioms, Suite::Axioms];
    let r = run_suite(&cfg).unwrap();
    assert_eq!(r.config["suites"], json!(["axioms", "classify"]));
    assert!(r.checks.iter().all(|c| !c.name.starts_with("qps.") && !c.name.starts_with("normality.")));
    assert!(r.check("axioms.phi_squared").is_some());
    assert_eq!(Suite::parse_list("all").unwrap(), Suite::ALL.to_vec());
    assert!(Suite::parse_list("everything").is_err());
    assert_eq!("json".parse::<Format>().unwrap(), Format::Json);
}

#[test]
fn spec_source_matches_the_zoo_source() {
    let (m, _) = build_example(ZooId::E3, ZooParams::beta(0.5)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e3.json");
    std::fs::write(&path, to_json(&m)).unwrap();
    let mut from_zoo = zoo(ZooId::E3, ZooParams::beta(0.5));
    from_zoo.samples = 20;
    let mut from_spec = from_zoo.clone();
    from_spec.source = ManifoldSource::Spec(path);
    let a = run_suite(&from_zoo).unwrap();
    let b = run_suite(&from_spec).unwrap();
    let computed = |checks: &[Check]| -> Vec<Check> {
        checks.iter().filter(|c| !c.name.starts_with("reference.")).cloned().collect()
    };
    assert_eq!(computed(&a.checks), computed(&b.checks));
    assert_eq!(a.verdicts, b.verdicts);
    assert!(b.passed);
}

#[test]
fn invalid_configurations_are_rejected() {
    let base = zoo(ZooId::E1, ZooParams::default());
    let mut c = base.clone();
    c.samples = 0;
    assert!(matches!(run_suite(&c), Err(RunError::Config(_))));
    let mut c = base.clone();
    c.tol = -1.0;
    assert!(matches!(run_suite(&c), Err(RunError::Config(_))));
    let mut c = base.clone();
    c.spread = f64::NAN;
    assert!(matches!(run_suite(&c), Err(RunError::Config(_))));
    let mut c = base.clone();
    c.suites.clear();
    assert!(matches!(run_suite(&c), Err(RunError::Config(_))));
    let c = zoo(ZooId::E2, ZooParams::beta(5.0));
    let err = run_suite(&c).unwrap_err();
    assert!(matches!(err, RunError::Zoo(_)));
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn non_finite_residuals_fail_and_serialize_as_null() {
    let c = Check::residual("x", "f = 0", f64::NAN, 1e-9);
    assert_eq!(c.pass, Some(false));
    let v = serde_json::to_value(&c).unwrap();
    assert_eq!(v["max_residual"], serde_json::Value::Null);
    assert_eq!(v["pass"], json!(false));
    let s = Check::skipped("y", "g = 0", "not applicable");
    assert_eq!(serde_json::to_value(&s).unwrap()["pass"], serde_json::Value::Null);
}

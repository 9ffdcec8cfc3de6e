use paracurv::geometry::{GeometryError, ManifoldInstance, PointData};
use paracurv::paracontact::{
    apm_axioms, classify, homothetic_deform, normal_structure_checks, normality_residual, signed_frame_traces,
    structure_functions, Classification,
};
use paracurv::sampling::sample_points;
use paracurv::zoo::{build_example, ZooBackend, ZooId, ZooParams};

const TOL: f64 = 1e-9;
const PARAMS: [f64; 5] = [-2.0, -1.0, 0.5, 1.0, 2.0];

fn points(m: &ManifoldInstance, n: usize, seed: u64) -> Vec<PointData> {
    sample_points(m, n, seed).unwrap().into_iter().map(|s| s.data).collect()
}

fn example(id: ZooId, params: ZooParams) -> ManifoldInstance {
    build_example(id, params).unwrap().0
}

#[test]
fn axioms_hold_on_the_constructed_examples() {
    let cases = [
        (ZooId::E1, ZooParams::default()),
        (ZooId::E2, ZooParams::default()),
        (ZooId::E2, ZooParams::default().with_backend(ZooBackend::Chart)),
        (ZooId::E3, ZooParams::default()),
        (ZooId::E5, ZooParams::default()),
    ];
    for (id, params) in cases {
        for pd in points(&example(id, params), 100, 7) {
            let rec = apm_axioms(&pd);
            assert!(rec.max() < TOL, "{id}: {rec:?}");
        }
    }
}

#[test]
fn negative_control_violates_phi_squared() {
    // φ² = 1.21 on ker η, so the defect on a unit vector is 0.21.
    for pd in points(&example(ZooId::E6, ZooParams::default()), 20, 1) {
        let rec = apm_axioms(&pd);
        let d = rec.get("phi_squared").unwrap();
        assert!((d - 0.21).abs() < 1e-9, "{d}");
        assert!(rec.get("eta_xi").unwrap() < TOL);
    }
}

#[test]
fn normality_separates_the_negative_control() {
    for id in [ZooId::E1, ZooId::E2, ZooId::E3, ZooId::E5] {
        for pd in points(&example(id, ZooParams::default()), 100, 11) {
            assert!(normality_residual(&pd) < TOL, "{id}");
        }
    }
    for pd in points(&example(ZooId::E6, ZooParams::default()), 100, 11) {
        assert!(normality_residual(&pd) > 1e-3);
        assert!(normal_structure_checks(&pd).get("nabla_xi").unwrap() > 1e-3);
    }
}

#[test]
fn structure_functions_track_the_parameters() {
    for b in PARAMS {
        for id in [ZooId::E2, ZooId::E3] {
            for pd in points(&example(id, ZooParams::beta(b)), 20, 2) {
                let sf = structure_functions(&pd);
                assert!(sf.alpha.abs() < TOL, "{id} {b}");
                assert!((sf.beta - b).abs() < TOL, "{id} {b}: {}", sf.beta);
                assert!(sf.d_beta.iter().all(|v| v.abs() < TOL));
                assert!(normal_structure_checks(&pd).max() < TOL);
            }
        }
        for pd in points(&example(ZooId::E2, ZooParams::beta(b).with_backend(ZooBackend::Chart)), 20, 2) {
            let sf = structure_functions(&pd);
            assert!((sf.beta - b).abs() < TOL, "chart {b}: {}", sf.beta);
        }
    }
    for a in PARAMS {
        for pd in points(&example(ZooId::E5, ZooParams::alpha(a)), 20, 2) {
            let sf = structure_functions(&pd);
            assert!((sf.alpha - a).abs() < TOL, "{a}: {}", sf.alpha);
            assert!(sf.beta.abs() < TOL);
            assert!(normal_structure_checks(&pd).max() < TOL);
        }
    }
}

#[test]
fn alpha_beta_are_invariant_under_hyperbolic_rotation() {
    let cases = [
        example(ZooId::E2, ZooParams::beta(0.5).with_backend(ZooBackend::Chart)),
        example(ZooId::E3, ZooParams::beta(-2.0)),
        example(ZooId::E5, ZooParams::alpha(2.0)),
    ];
    for m in &cases {
        for pd in points(m, 10, 5) {
            let base = signed_frame_traces(&pd, &pd.basis);
            assert!((base.0 - pd.structure.alpha).abs() < TOL);
            assert!((base.1 - pd.structure.beta).abs() < TOL);
            for t in [-1.5, -0.3, 0.7, 2.0] {
                let s = &pd.structure;
                let rotated = pd.basis.rotated(&pd.metric, &s.phi, s.eta, t).unwrap();
                assert!(rotated.orthonormality_defect < 1e-9);
                let r = signed_frame_traces(&pd, &rotated);
                assert!((r.0 - base.0).abs() < TOL, "{}: {t}", m.id);
                assert!((r.1 - base.1).abs() < TOL, "{}: {t}", m.id);
            }
        }
    }
}

#[test]
fn classification_labels() {
    let label = |id, params| classify(&points(&example(id, params), 30, 3), TOL, 1e-8).verdict;
    assert_eq!(label(ZooId::E1, ZooParams::default()), Classification::Paracosymplectic);
    assert_eq!(label(ZooId::E2, ZooParams::beta(1.0)), Classification::BetaParaSasakian);
    assert_eq!(label(ZooId::E2, ZooParams::beta(-1.0)), Classification::ParaSasakian);
    assert_eq!(label(ZooId::E3, ZooParams::beta(2.0)), Classification::BetaParaSasakian);
    assert_eq!(label(ZooId::E3, ZooParams::beta(-1.0)), Classification::ParaSasakian);
    assert_eq!(label(ZooId::E5, ZooParams::alpha(0.5)), Classification::AlphaParaKenmotsu);
    assert_eq!(label(ZooId::E6, ZooParams::default()), Classification::NonNormal);
    for b in PARAMS {
        let (m, entry) = build_example(ZooId::E2, ZooParams::beta(b)).unwrap();
        assert_eq!(classify(&points(&m, 10, 0), TOL, 1e-8).verdict, entry.expected.classification.value);
    }
}

#[test]
fn homothetic_deformation_rescales_beta_and_curvature() {
    let m = example(ZooId::E3, ZooParams::beta(2.0));
    let d = homothetic_deform(&m, -2.0).unwrap();
    for pd in points(&d, 20, 9) {
        assert!((pd.structure.beta + 1.0).abs() < TOL, "{}", pd.structure.beta);
        assert!(pd.structure.alpha.abs() < TOL);
        assert!(apm_axioms(&pd).max() < TOL);
        let e = pd.basis.vectors();
        for (x, y) in [(e[0], e[1]), (e[0], e[2]), (e[1], e[2])] {
            assert!((pd.sectional(x, y).unwrap() + 1.0).abs() < TOL);
        }
    }
    assert_eq!(
        classify(&points(&d, 20, 9), TOL, 1e-8).verdict,
        Classification::ParaSasakian
    );

    let chart = example(ZooId::E2, ZooParams::beta(1.0).with_backend(ZooBackend::Chart));
    for c in [-2.0, 0.5, 3.0] {
        for pd in points(&homothetic_deform(&chart, c).unwrap(), 10, 4) {
            assert!((pd.structure.beta - 1.0 / c).abs() < TOL, "{c}: {}", pd.structure.beta);
            assert!(apm_axioms(&pd).max() < TOL);
            assert!(normality_residual(&pd) < TOL);
        }
    }

    let e5 = example(ZooId::E5, ZooParams::alpha(1.0));
    for pd in points(&homothetic_deform(&e5, 2.0).unwrap(), 10, 4) {
        assert!((pd.structure.alpha - 0.5).abs() < TOL);
    }

    assert_eq!(homothetic_deform(&m, 0.0).unwrap_err(), GeometryError::InvalidScale(0.0));
}

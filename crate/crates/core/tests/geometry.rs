//! Curvature engine against values frozen from `tests/oracle/frame_oracle.py`.

#![allow(clippy::needless_range_loop)]

use paracurv::expr::parse;
use paracurv::geometry::{
    covariant_derivative, evaluate_point, exterior_d1, grad_hess_at, killing_h_at, local_symmetry_residual_at,
    sectional_at, FieldComponent, GeometryError, ManifoldInstance, PointData, TensorField,
};
use paracurv::sampling::sample_points;
use paracurv::tensor::{bilinear, unit, Vec3};
use paracurv::zoo::{build_example, ZooBackend, ZooId, ZooParams};

fn entry(id: ZooId, params: ZooParams) -> ManifoldInstance {
    build_example(id, params).unwrap().0
}

fn at(m: &ManifoldInstance, p: Vec3) -> PointData {
    evaluate_point(m, p).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn assert_vec(got: Vec3, want: Vec3, tol: f64) {
    for i in 0..3 {
        assert!(close(got[i], want[i], tol), "{got:?} vs {want:?}");
    }
}

const ORIGIN: Vec3 = [0.0; 3];

#[test]
fn flat_chart_has_no_connection_or_curvature() {
    let m = entry(ZooId::E1, ZooParams::default());
    for p in [[0.3, -0.2, 0.9], ORIGIN, [-1.0, 1.0, 0.5]] {
        let pd = at(&m, p);
        let c = &pd.curvature;
        assert!(c.christoffel.iter().flatten().flatten().all(|&v| v == 0.0));
        assert!(c.tensors.riemann.iter().flatten().flatten().flatten().all(|&v| v == 0.0));
        assert_eq!(c.tensors.scalar, 0.0);
        assert_eq!(c.nabla_riemann_norm, 0.0);
    }
}

#[test]
fn heisenberg_frame_matches_oracle() {
    let m = entry(ZooId::E2, ZooParams::beta(1.0));
    let pd = at(&m, ORIGIN);
    let c = &pd.curvature;
    // ∇_{e1}e2 = e3, ∇_{e3}e1 = e2, ∇_{e1}ξ = e2
    assert_vec(c.christoffel[0][1], [0.0, 0.0, 1.0], 1e-15);
    assert_vec(c.christoffel[2][0], [0.0, 1.0, 0.0], 1e-15);
    assert_vec(pd.structure.nabla_xi[0], [0.0, 1.0, 0.0], 1e-15);
    // R(e1,e2)e2 = −3 e1, τ = 2, S = diag(2, −2, −2)
    assert_vec(c.tensors.riemann[0][1][1], [-3.0, 0.0, 0.0], 1e-14);
    assert!(close(c.tensors.scalar, 2.0, 1e-14));
    let s = c.tensors.ricci;
    for (i, want) in [2.0, -2.0, -2.0].into_iter().enumerate() {
        assert!(close(s[i][i], want, 1e-14));
    }
    assert!(close(pd.sectional(unit(0), unit(1)).unwrap(), 3.0, 1e-14));
    assert!(close(pd.sectional(unit(0), unit(2)).unwrap(), -1.0, 1e-14));
    assert!(close(pd.sectional(unit(1), unit(2)).unwrap(), -1.0, 1e-14));
    // L = diag(3/2, 3/2, −5/2)
    for (i, want) in [1.5, 1.5, -2.5].into_iter().enumerate() {
        assert!(close(c.tensors.l_operator[i][i], want, 1e-14));
    }
    // Cotton: C(e1,e2) = 8ξ, C(e1,e3) = −4e2, C(e2,e3) = −4e1
    assert_vec(c.tensors.cotton[0][1], [0.0, 0.0, 8.0], 1e-13);
    assert_vec(c.tensors.cotton[0][2], [0.0, -4.0, 0.0], 1e-13);
    assert_vec(c.tensors.cotton[1][2], [-4.0, 0.0, 0.0], 1e-13);
    assert!(c.nabla_riemann_norm > 0.1);
}

#[test]
fn heisenberg_scales_with_beta() {
    for b in [-2.0, 0.5, 2.0] {
        let pd = at(&entry(ZooId::E2, ZooParams::beta(b)), ORIGIN);
        let t = &pd.curvature.tensors;
        assert!(close(t.scalar, 2.0 * b * b, 1e-12));
        assert!(close(t.riemann[0][1][1][0], -3.0 * b * b, 1e-12));
        assert!(close(t.cotton[0][1][2], 8.0 * b * b * b, 1e-12));
        assert!(close(pd.structure.beta, b, 1e-14));
    }
}

#[test]
fn space_form_matches_oracle() {
    for b in [1.0, -1.0, 0.5, 2.0] {
        let m = entry(ZooId::E3, ZooParams::beta(b));
        let pd = at(&m, [0.2, 0.4, -0.1]);
        let t = &pd.curvature.tensors;
        assert!(close(t.scalar, -6.0 * b * b, 1e-12));
        assert!(close(t.riemann[0][1][1][0], b * b, 1e-12));
        for i in 0..3 {
            for j in 0..3 {
                assert!(close(t.ricci[i][j], -2.0 * b * b * pd.metric[i][j], 1e-12));
                let want = if i == j { -0.5 * b * b } else { 0.0 };
                assert!(close(t.l_operator[i][j], want, 1e-12));
            }
        }
        for (x, y) in [(0, 1), (0, 2), (1, 2)] {
            assert!(close(pd.sectional(unit(x), unit(y)).unwrap(), -b * b, 1e-12));
        }
        // a mixed plane
        let k = pd.sectional([1.0, 0.3, 0.2], [0.1, 1.0, -0.7]).unwrap();
        assert!(close(k, -b * b, 1e-12));
        assert!(t.cotton.iter().flatten().flatten().all(|v| v.abs() < 1e-12));
        assert!(pd.curvature.nabla_riemann_norm < 1e-12);
    }
}

#[test]
fn warped_product_has_constant_negative_curvature() {
    for a in [1.0, -2.0, 0.5] {
        let m = entry(ZooId::E5, ZooParams::alpha(a));
        for s in sample_points(&m, 20, 11).unwrap() {
            let pd = &s.data;
            let t = &pd.curvature.tensors;
            assert!(close(t.scalar, -6.0 * a * a, 1e-9 * a * a));
            for i in 0..3 {
                for j in 0..3 {
                    assert!(close(t.ricci[i][j], -2.0 * a * a * pd.metric[i][j], 1e-9));
                }
            }
            assert!(close(pd.sectional(unit(0), unit(2)).unwrap(), -a * a, 1e-9));
            assert!(close(pd.sectional(unit(0), unit(1)).unwrap(), -a * a, 1e-9));
            assert!(pd.curvature.nabla_riemann_norm < 1e-9);
            assert!(close(pd.structure.alpha, a, 1e-12));
            assert!(pd.structure.beta.abs() < 1e-12);
        }
    }
}

#[test]
fn engine_identities_hold_on_every_entry() {
    let entries = [
        entry(ZooId::E1, ZooParams::default()),
        entry(ZooId::E2, ZooParams::beta(1.5)),
        entry(ZooId::E2, ZooParams::beta(-1.0).with_backend(ZooBackend::Chart)),
        entry(ZooId::E3, ZooParams::beta(2.0)),
        entry(ZooId::E5, ZooParams::alpha(1.0)),
        entry(ZooId::E6, ZooParams::beta(1.0)),
    ];
    for m in &entries {
        for s in sample_points(m, 100, 5).unwrap() {
            let d = s.data.diagnostics;
            assert!(d.metricity < 1e-10, "{}: metricity {}", m.id, d.metricity);
            assert!(d.torsion < 1e-10, "{}: torsion {}", m.id, d.torsion);
            assert!(d.first_bianchi < 1e-9, "{}: {}", m.id, d.first_bianchi);
            assert!(d.second_bianchi < 1e-9, "{}: {}", m.id, d.second_bianchi);
            assert!(d.contracted_bianchi < 1e-8, "{}: {}", m.id, d.contracted_bianchi);
            assert!(d.ricci_asymmetry < 1e-12);
            assert!(d.ricci_operator_consistency < 1e-10);
            let t = &s.data.curvature.tensors;
            for a in 0..3 {
                for b in 0..3 {
                    for k in 0..3 {
                        assert_eq!(t.riemann[a][b][k], t.riemann[b][a][k].map(|v| -v));
                        assert_eq!(t.cotton[a][b], t.cotton[b][a].map(|v| -v));
                    }
                }
            }
        }
    }
}

#[test]
fn heisenberg_backends_agree() {
    for b in [1.0, -0.5] {
        let lie = entry(ZooId::E2, ZooParams::beta(b));
        let chart = entry(ZooId::E2, ZooParams::beta(b).with_backend(ZooBackend::Chart));
        let reference = at(&lie, ORIGIN).curvature.orthonormal;
        for s in sample_points(&chart, 50, 2).unwrap() {
            let got = &s.data.curvature.orthonormal;
            let diff = got.max_difference(&reference);
            assert!(diff < 1e-9, "difference {diff} at {:?}", s.point);
        }
    }
}

#[test]
fn covariant_derivative_of_the_metric_vanishes() {
    let coords = ["x".to_string(), "y".to_string(), "z".to_string()];
    let m = entry(ZooId::E2, ZooParams::beta(1.0).with_backend(ZooBackend::Chart));
    let metric_src = ["1", "0", "0", "0", "-1 + (2*x)^2", "-2*x", "0", "-2*x", "1"];
    let field = TensorField {
        lower: 2,
        upper: false,
        components: metric_src
            .iter()
            .map(|s| FieldComponent::Expr(parse(s, &coords).unwrap()))
            .collect(),
    };
    for s in sample_points(&m, 100, 9).unwrap() {
        for x in [unit(0), unit(1), unit(2), [0.3, -1.0, 2.0]] {
            let v = covariant_derivative(&m, s.point, &field, x).unwrap();
            assert!(v.max_abs() < 1e-10);
        }
    }
    let lie = entry(ZooId::E3, ZooParams::beta(1.0));
    let frame_metric = TensorField {
        lower: 2,
        upper: false,
        components: [1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 1.0].map(FieldComponent::Constant).to_vec(),
    };
    for x in [unit(0), unit(1), unit(2)] {
        assert!(covariant_derivative(&lie, ORIGIN, &frame_metric, x).unwrap().max_abs() < 1e-14);
    }
}

#[test]
fn covariant_derivative_of_eta_on_heisenberg() {
    for b in [1.0, 2.0, -0.5] {
        let m = entry(ZooId::E2, ZooParams::beta(b));
        let eta = TensorField {
            lower: 1,
            upper: false,
            components: [0.0, 0.0, 1.0].map(FieldComponent::Constant).to_vec(),
        };
        let v = covariant_derivative(&m, ORIGIN, &eta, unit(0)).unwrap();
        assert!(close(v.components[1], -b, 1e-14));
    }
}

#[test]
fn covariant_derivative_rejects_large_valence() {
    let m = entry(ZooId::E1, ZooParams::default());
    let field = TensorField {
        lower: 3,
        upper: true,
        components: vec![FieldComponent::Constant(0.0); 81],
    };
    assert_eq!(
        covariant_derivative(&m, ORIGIN, &field, unit(0)).unwrap_err(),
        GeometryError::UnsupportedValence(4)
    );
}

#[test]
fn gradient_and_hessian() {
    let coords = ["x".to_string(), "y".to_string(), "z".to_string()];
    let m = entry(ZooId::E1, ZooParams::default());
    let (grad, hess) = grad_hess_at(&m, [0.1, 0.2, 0.3], &FieldComponent::Constant(4.0)).unwrap();
    assert_eq!(grad, [0.0; 3]);
    assert!(hess.iter().flatten().all(|&v| v == 0.0));
    let f = FieldComponent::Expr(parse("x", &coords).unwrap());
    let (grad, hess) = grad_hess_at(&m, [0.1, 0.2, 0.3], &f).unwrap();
    assert_eq!(grad, [1.0, 0.0, 0.0]);
    assert!(hess.iter().flatten().all(|&v| v == 0.0));
    // g(grad f, ∂y) = df(∂y) = 0 although g(∂y, ∂y) = −1
    let g = m.metric_at(ORIGIN).unwrap();
    assert_eq!(bilinear(&g, grad, unit(1)), 0.0);
    // f = y: raising flips the sign
    let f = FieldComponent::Expr(parse("y", &coords).unwrap());
    let (grad, _) = grad_hess_at(&m, ORIGIN, &f).unwrap();
    assert_eq!(grad, [0.0, -1.0, 0.0]);
    // a curved chart keeps the Hessian symmetric
    let e5 = entry(ZooId::E5, ZooParams::alpha(1.0));
    let f = FieldComponent::Expr(parse("sin(x)*exp(z) + y^2*z", &coords).unwrap());
    let (_, hess) = grad_hess_at(&e5, [0.3, -0.4, 0.2], &f).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            assert!(close(hess[i][j], hess[j][i], 1e-12));
        }
    }
}

#[test]
fn exterior_derivative_convention() {
    let coords = ["x".to_string(), "y".to_string(), "z".to_string()];
    let e1 = entry(ZooId::E1, ZooParams::default());
    let dz = [0.0, 0.0, 1.0].map(FieldComponent::Constant);
    assert!(exterior_d1(&e1, ORIGIN, &dz).unwrap().iter().flatten().all(|&v| v == 0.0));
    for b in [1.0, -2.0] {
        let e2 = entry(ZooId::E2, ZooParams::beta(b));
        let d_eta = exterior_d1(&e2, ORIGIN, &dz).unwrap();
        assert!(close(d_eta[0][1], -b, 1e-15));
        assert_eq!(d_eta[0][1], -d_eta[1][0]);
    }
    let omega = ["x*y", "sin(z)", "x^2*z"].map(|s| FieldComponent::Expr(parse(s, &coords).unwrap()));
    let d = exterior_d1(&e1, [0.3, 0.1, -0.4], &omega).unwrap();
    for a in 0..3 {
        for b in 0..3 {
            assert_eq!(d[a][b], -d[b][a]);
        }
    }
    // dω(∂x, ∂y) = ½(∂x ω_y − ∂y ω_x) = −x/2
    assert!(close(d[0][1], -0.15, 1e-15));
}

#[test]
fn sectional_curvature_rejects_degenerate_planes() {
    let m = entry(ZooId::E3, ZooParams::beta(1.0));
    assert!(matches!(
        sectional_at(&m, ORIGIN, unit(0), unit(0)),
        Err(GeometryError::DegeneratePlane(_))
    ));
    // null plane: span(e1 + e2, e3) has Gram determinant 0
    assert!(matches!(
        sectional_at(&m, ORIGIN, [1.0, 1.0, 0.0], unit(2)),
        Err(GeometryError::DegeneratePlane(_))
    ));
    assert!(close(sectional_at(&m, ORIGIN, unit(0), unit(2)).unwrap(), -1.0, 1e-14));
}

#[test]
fn killing_tensor_h() {
    for (id, p) in [(ZooId::E2, ZooParams::beta(1.0)), (ZooId::E3, ZooParams::beta(1.0))] {
        let h = killing_h_at(&entry(id, p), ORIGIN).unwrap();
        assert!(h.norm < 1e-14, "{id}: {h:?}");
    }
    let chart = entry(ZooId::E2, ZooParams::beta(1.0).with_backend(ZooBackend::Chart));
    let h = killing_h_at(&chart, [0.4, 0.1, -0.3]).unwrap();
    assert!(h.norm < 1e-12);
    let e5 = entry(ZooId::E5, ZooParams::alpha(1.0));
    let h = killing_h_at(&e5, [0.4, 0.1, -0.3]).unwrap();
    assert!(h.trace.abs() < 1e-12);
    assert!(h.h_xi.iter().all(|v| v.abs() < 1e-12));
}

#[test]
fn local_symmetry() {
    assert_eq!(local_symmetry_residual_at(&entry(ZooId::E1, ZooParams::default()), ORIGIN).unwrap(), 0.0);
    assert!(local_symmetry_residual_at(&entry(ZooId::E3, ZooParams::beta(1.0)), ORIGIN).unwrap() < 1e-9);
    assert!(local_symmetry_residual_at(&entry(ZooId::E5, ZooParams::alpha(1.0)), [0.1, 0.2, 0.3]).unwrap() < 1e-9);
}

#[test]
fn points_outside_the_chart_domain_are_rejected() {
    let m = entry(ZooId::E5, ZooParams::alpha(1.0));
    assert!(matches!(
        evaluate_point(&m, [0.0, 0.0, 0.9]),
        Err(GeometryError::OutsideDomain(_))
    ));
}

//! Identity checks for 3-dimensional normal and quasi-para-Sasakian structures.
//!
//! Every closed form is evaluated in the working frame from the pointwise
//! data and compared with the directly computed tensor; residuals are
//! Euclidean norms of φ-basis components.

use serde::Serialize;
use thiserror::Error;

use crate::geometry::PointData;
use crate::paracontact::{endo_norm, nabla_phi_defect, nabla_xi_defect, vv2_norm, Range};
use crate::residual::ResidualRecord;
use crate::tensor::{add, apply, bilinear, combine, dot, max_abs, norm, scale, sub, unit, Mat3, Tensor3, Tensor4, Vec3, ZERO3};

#[derive(Debug, Clone, PartialEq, Error, Serialize)]
pub enum QpsRefusal {
    #[error("α = {alpha:e} is not zero within {tol:e}; the check applies to quasi-para-Sasakian structures only")]
    NonZeroAlpha { alpha: f64, tol: f64 },
    #[error("β varies across samples (spread {spread:e}); the check assumes constant β")]
    NonConstantBeta { spread: f64 },
    #[error("no sample points")]
    NoSamples,
}

fn check_alpha(pd: &PointData, tol: f64) -> Result<(), QpsRefusal> {
    let alpha = pd.structure.alpha;
    if alpha.abs() < tol {
        Ok(())
    } else {
        Err(QpsRefusal::NonZeroAlpha { alpha, tol })
    }
}

/// Residuals of `(∇_Xφ)Y = β(g(X,Y)ξ − η(Y)X)`, `∇_Xξ = βφX`, `ξ(β) = 0`, `ξ(τ) = 0`.
pub fn qps_axioms(pd: &PointData, tol: f64) -> Result<ResidualRecord, QpsRefusal> {
    check_alpha(pd, tol)?;
    let s = &pd.structure;
    let beta = s.beta;
    Ok(ResidualRecord::new()
        .with("nabla_phi", vv2_norm(pd, &nabla_phi_defect(pd, 0.0, beta)))
        .with("nabla_xi", endo_norm(pd, &nabla_xi_defect(pd, 0.0, beta)))
        .with("xi_beta", dot(s.d_beta, s.xi).abs())
        .with("xi_tau", dot(pd.curvature.tensors.scalar_differential, s.xi).abs()))
}

/// Shorthands shared by the closed forms.
struct Local<'a> {
    g: &'a Mat3,
    phi: &'a Mat3,
    xi: Vec3,
    eta: Vec3,
    alpha: f64,
    beta: f64,
    tau: f64,
    d_alpha: Vec3,
    d_beta: Vec3,
    grad_alpha: Vec3,
    grad_beta: Vec3,
}

impl<'a> Local<'a> {
    fn new(pd: &'a PointData) -> Self {
        let s = &pd.structure;
        Self {
            g: &pd.metric,
            phi: &s.phi,
            xi: s.xi,
            eta: s.eta,
            alpha: s.alpha,
            beta: s.beta,
            tau: pd.curvature.tensors.scalar,
            d_alpha: s.d_alpha,
            d_beta: s.d_beta,
            grad_alpha: s.grad_alpha,
            grad_beta: s.grad_beta,
        }
    }

    fn g(&self, x: Vec3, y: Vec3) -> f64 {
        bilinear(self.g, x, y)
    }

    fn eta(&self, x: Vec3) -> f64 {
        dot(self.eta, x)
    }

    fn phi(&self, x: Vec3) -> Vec3 {
        apply(self.phi, x)
    }

    /// `(φW)(β) − W(α)`.
    fn f(&self, w: Vec3) -> f64 {
        dot(self.d_beta, self.phi(w)) - dot(self.d_alpha, w)
    }

    fn xi_alpha(&self) -> f64 {
        dot(self.d_alpha, self.xi)
    }
}

/// Right-hand side of the curvature identity for normal structures.
fn riemann_general(l: &Local, x: Vec3, y: Vec3, z: Vec3) -> Vec3 {
    let (a2b2, xa) = (l.alpha * l.alpha + l.beta * l.beta, l.xi_alpha());
    let big_a = 2.0 * (xa + a2b2) + 0.5 * l.tau;
    let big_b = xa + 3.0 * a2b2 + 0.5 * l.tau;
    let (gyz, gxz) = (l.g(y, z), l.g(x, z));
    let (ex, ey, ez) = (l.eta(x), l.eta(y), l.eta(z));
    let w = add(l.phi(l.grad_beta), l.grad_alpha);
    combine(&[
        (big_a * gyz, x),
        (-big_a * gxz, y),
        (-big_b * (gyz * ex - gxz * ey), l.xi),
        (-big_b * ey * ez, x),
        (big_b * ex * ez, y),
        (l.f(z) * ey, x),
        (-l.f(z) * ex, y),
        (l.f(y) * ez, x),
        (-l.f(y) * gxz, l.xi),
        (-l.f(x) * ez, y),
        (l.f(x) * gyz, l.xi),
        (ey * gxz - ex * gyz, w),
    ])
}

/// Right-hand side of the curvature identity with α = 0.
fn riemann_quasi(l: &Local, x: Vec3, y: Vec3, z: Vec3) -> Vec3 {
    let b2 = l.beta * l.beta;
    let big_a = 2.0 * b2 + 0.5 * l.tau;
    let big_b = 3.0 * b2 + 0.5 * l.tau;
    let (gyz, gxz) = (l.g(y, z), l.g(x, z));
    let (ex, ey, ez) = (l.eta(x), l.eta(y), l.eta(z));
    let pb = |w: Vec3| dot(l.d_beta, l.phi(w));
    combine(&[
        (big_a * gyz, x),
        (-big_a * gxz, y),
        (-big_b * (gyz * ex - gxz * ey), l.xi),
        (-big_b * ey * ez, x),
        (big_b * ex * ez, y),
        (pb(z) * ey, x),
        (-pb(z) * ex, y),
        (pb(y) * ez, x),
        (-pb(y) * gxz, l.xi),
        (-pb(x) * ez, y),
        (pb(x) * gyz, l.xi),
        (ey * gxz - ex * gyz, l.phi(l.grad_beta)),
    ])
}

fn ricci_general(l: &Local, y: Vec3, z: Vec3) -> f64 {
    let a2b2 = l.alpha * l.alpha + l.beta * l.beta;
    -(l.xi_alpha() + a2b2 + 0.5 * l.tau) * l.g(l.phi(y), l.phi(z)) + l.eta(z) * l.f(y) + l.eta(y) * l.f(z)
        - 2.0 * a2b2 * l.eta(y) * l.eta(z)
}

fn ricci_quasi(l: &Local, y: Vec3, z: Vec3) -> f64 {
    let b2 = l.beta * l.beta;
    let pb = |w: Vec3| dot(l.d_beta, l.phi(w));
    (b2 + 0.5 * l.tau) * l.g(y, z) - (3.0 * b2 + 0.5 * l.tau) * l.eta(y) * l.eta(z)
        + l.eta(y) * pb(z)
        + l.eta(z) * pb(y)
}

fn riemann_defect(pd: &PointData, rhs: impl Fn(Vec3, Vec3, Vec3) -> Vec3) -> f64 {
    let r = &pd.curvature.tensors.riemann;
    let mut t: Tensor4 = [[[[0.0; 3]; 3]; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                let want = rhs(unit(a), unit(b), unit(c));
                t[a][b][c] = std::array::from_fn(|m| r[a][b][c][m] - want[m]);
            }
        }
    }
    let tb = pd.basis.change.vector_valued_3(&t);
    tb.iter().flatten().flatten().fold(0.0, |m, &v| m.max(norm(v)))
}

fn ricci_defect(pd: &PointData, rhs: impl Fn(Vec3, Vec3) -> f64) -> f64 {
    let s = &pd.curvature.tensors.ricci;
    let d: Mat3 = std::array::from_fn(|a| std::array::from_fn(|b| s[a][b] - rhs(unit(a), unit(b))));
    max_abs(pd.basis.change.bilinear(&d).into_iter().flatten())
}

/// Curvature identities of normal structures; the α = 0 forms are only
/// evaluated (and only recorded) when α vanishes within `tol`.
pub fn curvature_identity_residuals(pd: &PointData, tol: f64) -> ResidualRecord {
    let l = Local::new(pd);
    let mut rec = ResidualRecord::new()
        .with("riemann_normal", riemann_defect(pd, |x, y, z| riemann_general(&l, x, y, z)))
        .with("ricci_normal", ricci_defect(pd, |y, z| ricci_general(&l, y, z)));
    if check_alpha(pd, tol).is_ok() {
        rec.push("riemann_quasi", riemann_defect(pd, |x, y, z| riemann_quasi(&l, x, y, z)));
        rec.push("ricci_quasi", ricci_defect(pd, |y, z| ricci_quasi(&l, y, z)));
    }
    rec
}

/// Closed form of `L Y`.
fn l_closed(l: &Local, y: Vec3) -> Vec3 {
    let b2 = l.beta * l.beta;
    let ey = l.eta(y);
    combine(&[
        (0.25 * l.tau + b2, y),
        (-(3.0 * b2 + 0.5 * l.tau) * ey + dot(l.d_beta, l.phi(y)), l.xi),
        (-ey, l.phi(l.grad_beta)),
    ])
}

/// Closed form of `(∇_X L)Y`.
fn nabla_l_closed(pd: &PointData, l: &Local, x: Vec3, y: Vec3) -> Vec3 {
    let s = &pd.structure;
    let b = l.beta;
    let b2 = b * b;
    let dt = dot(pd.curvature.tensors.scalar_differential, x);
    let db = dot(l.d_beta, x);
    let ey = l.eta(y);
    let gpxy = l.g(l.phi(x), y);
    let k = b * (3.0 * b2 + 0.5 * l.tau);
    let nabla_x_grad: Vec3 = std::array::from_fn(|m| (0..3).map(|a| x[a] * s.nabla_grad_beta[a][m]).sum());
    let hess_x_phi_y = bilinear(&s.hess_beta, x, l.phi(y));
    let db_phi_y = dot(l.d_beta, l.phi(y));
    combine(&[
        (0.25 * dt + 2.0 * b * db, y),
        (-(6.0 * b * db + 0.5 * dt) * ey, l.xi),
        (-k * gpxy, l.xi),
        (-k * ey, l.phi(x)),
        (-b * gpxy, l.phi(l.grad_beta)),
        (-b * db * ey, l.xi),
        (-ey, l.phi(nabla_x_grad)),
        (hess_x_phi_y, l.xi),
        (-b * ey * db, l.xi),
        (b * db_phi_y, l.phi(x)),
    ])
}

/// Closed forms of `L`, `∇L` and `∇_ξ grad β` against direct computation.
pub fn l_closed_forms(pd: &PointData) -> ResidualRecord {
    let l = Local::new(pd);
    let t = &pd.curvature.tensors;
    let l_defect: Mat3 = std::array::from_fn(|b| {
        let want = l_closed(&l, unit(b));
        std::array::from_fn(|m| t.l_operator[b][m] - want[m])
    });
    let nabla_defect: Tensor3 = std::array::from_fn(|a| {
        std::array::from_fn(|b| {
            let want = nabla_l_closed(pd, &l, unit(a), unit(b));
            std::array::from_fn(|m| t.nabla_l[a][b][m] - want[m])
        })
    });
    let s = &pd.structure;
    let mut xi_grad_beta = ZERO3;
    for a in 0..3 {
        xi_grad_beta = add(xi_grad_beta, scale(s.xi[a], s.nabla_grad_beta[a]));
    }
    let xi_grad_beta = sub(xi_grad_beta, scale(l.beta, l.phi(l.grad_beta)));
    ResidualRecord::new()
        .with("l_operator", endo_norm(pd, &l_defect))
        .with("nabla_l", vv2_norm(pd, &nabla_defect))
        .with("xi_derivative_of_grad_beta", norm(pd.basis.change.vector(xi_grad_beta)))
}

/// Pointwise φ-basis components used by the conformal-flatness conditions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentTable {
    /// `τ_i = dτ(e_i)`.
    pub tau: Vec3,
    /// `β_i = dβ(e_i)`.
    pub beta: Vec3,
    /// `β_ij = (∇_{e_i} dβ)(e_j)`.
    pub beta_hessian: Mat3,
    /// `l[i][j]` = φ-basis components of `(∇_{e_i}L)e_j`.
    pub l: Tensor3,
}

pub fn component_table(pd: &PointData) -> (ComponentTable, ResidualRecord) {
    let fc = &pd.basis.change;
    let table = ComponentTable {
        tau: fc.covector(pd.curvature.tensors.scalar_differential),
        beta: fc.covector(pd.structure.d_beta),
        beta_hessian: fc.bilinear(&pd.structure.hess_beta),
        l: pd.curvature.orthonormal.nabla_l,
    };
    let b = pd.structure.beta;
    let (bi, bij) = (table.beta, table.beta_hessian);
    let rec = ResidualRecord::new()
        .with("beta_3", bi[2].abs())
        .with("tau_3", table.tau[2].abs())
        .with("beta_13", (bij[0][2] + b * bi[1]).abs().max((bij[2][0] + b * bi[1]).abs()))
        .with("beta_23", (bij[1][2] + b * bi[0]).abs().max((bij[2][1] + b * bi[0]).abs()))
        .with("beta_33", bij[2][2].abs())
        .with(
            "hessian_symmetry",
            max_abs((0..3).flat_map(|i| (0..3).map(move |j| bij[i][j] - bij[j][i]))),
        );
    (table, rec)
}

/// The three formulations of conformal flatness at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConformalPoint {
    /// Max norm of `C(e_i,e_j)`, `i < j`.
    pub cotton: f64,
    /// Max norm of the table expressions for `L_ij − L_ji`, `i < j`.
    pub table_differences: f64,
    /// Max of the pointwise table conditions and the full Hessian condition.
    pub conditions: f64,
    /// Max norm of `C(e_i,e_j)` minus the table expression.
    pub cotton_vs_table: f64,
    /// Max over φ-basis pairs of the Hessian condition residual.
    pub hessian_residual: f64,
    /// Right-hand side of the Hessian condition on `(e1, e1)`.
    pub hessian_rhs_e1e1: f64,
    /// `τ + 10β²`.
    pub tau_plus_10_beta2: f64,
}

pub fn conformal_point(pd: &PointData) -> ConformalPoint {
    let (t, _) = component_table(pd);
    let b = pd.structure.beta;
    let tau = pd.curvature.tensors.scalar;
    let k = b * (3.0 * b * b + 0.5 * tau);
    let (ti, bi, bij) = (t.tau, t.beta, t.beta_hessian);
    let d12 = [
        -(ti[1] / 4.0 + 5.0 * b * bi[1]),
        ti[0] / 4.0 + 5.0 * b * bi[0],
        bij[0][0] - bij[1][1] + b * (tau + 6.0 * b * b),
    ];
    let d13 = [bij[0][1], -bij[0][0] - k, -ti[0] / 4.0 - 5.0 * b * bi[0]];
    let d23 = [bij[1][1] - k, -bij[0][1], -ti[1] / 4.0 - 5.0 * b * bi[1]];
    let cot = &pd.curvature.orthonormal.cotton;
    let pairs = [(cot[0][1], d12), (cot[0][2], d13), (cot[1][2], d23)];
    let cotton = pairs.iter().map(|(c, _)| norm(*c)).fold(0.0, f64::max);
    let table_differences = pairs.iter().map(|(_, d)| norm(*d)).fold(0.0, f64::max);
    let cotton_vs_table = pairs
        .iter()
        .map(|(c, d)| norm(sub(*c, *d)))
        .fold(0.0, f64::max);

    let pointwise = max_abs([
        ti[0] + 20.0 * b * bi[0],
        ti[1] + 20.0 * b * bi[1],
        bij[0][1],
        bij[1][1] - k,
        bij[0][0] + k,
    ]);

    // (∇_X dβ)(Y) = −β(3β² + τ/2)(g(X,Y) − η(X)η(Y)) − βη(X)dβ(φY) − βη(Y)dβ(φX)
    let l = Local::new(pd);
    let e = pd.basis.vectors();
    let rhs = |x: Vec3, y: Vec3| {
        -k * (l.g(x, y) - l.eta(x) * l.eta(y))
            - b * l.eta(x) * dot(l.d_beta, l.phi(y))
            - b * l.eta(y) * dot(l.d_beta, l.phi(x))
    };
    let mut hessian_residual: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            hessian_residual = hessian_residual.max((bij[i][j] - rhs(e[i], e[j])).abs());
        }
    }
    ConformalPoint {
        cotton,
        table_differences,
        conditions: pointwise.max(hessian_residual),
        cotton_vs_table,
        hessian_residual,
        hessian_rhs_e1e1: rhs(e[0], e[0]),
        tau_plus_10_beta2: tau + 10.0 * b * b,
    }
}

/// Largest tolerated disagreement between the Cotton vectors and the table expressions.
pub const AGREEMENT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConformalVerdict {
    pub conformally_flat: bool,
    pub by_cotton: bool,
    pub by_table: bool,
    pub by_conditions: bool,
    pub max_cotton: f64,
    pub max_table_differences: f64,
    pub max_conditions: f64,
    pub max_cotton_vs_table: f64,
    pub max_hessian_residual: f64,
    /// Largest `|rhs(e1,e1)|` of the Hessian condition over samples.
    pub max_hessian_rhs_e1e1: f64,
    pub tau_plus_10_beta2: Range,
    /// The formulations disagree: a bug in the engine, never resolved silently.
    pub engine_fault: bool,
    pub diagnostics: Vec<String>,
}

/// Conformal flatness by three independent formulations.
///
/// `tol` decides α = 0, `tol3` applies to the pointwise quantities (all
/// involve third metric derivatives), `spread` to the constancy of `τ + 10β²`.
pub fn conformal_flatness_verdict(
    points: &[PointData],
    tol: f64,
    tol3: f64,
    spread: f64,
) -> Result<ConformalVerdict, QpsRefusal> {
    if points.is_empty() {
        return Err(QpsRefusal::NoSamples);
    }
    for pd in points {
        check_alpha(pd, tol)?;
    }
    let per: Vec<ConformalPoint> = points.iter().map(conformal_point).collect();
    let max = |f: fn(&ConformalPoint) -> f64| per.iter().map(f).fold(0.0, f64::max);
    let max_cotton = max(|c| c.cotton);
    let max_table = max(|c| c.table_differences);
    let max_conditions = max(|c| c.conditions);
    let max_cotton_vs_table = max(|c| c.cotton_vs_table);
    let tau_beta = Range::of(per.iter().map(|c| c.tau_plus_10_beta2));
    let by_cotton = max_cotton < tol3;
    let by_table = max_table < tol3;
    let by_conditions = max_conditions < tol3 && tau_beta.spread() < spread;
    let mut diagnostics = Vec::new();
    let disagree = !(by_cotton == by_table && by_table == by_conditions);
    if disagree {
        diagnostics.push(format!(
            "verdicts disagree: Cotton {by_cotton}, table {by_table}, conditions {by_conditions}"
        ));
    }
    let mismatch = !(max_cotton_vs_table < AGREEMENT_TOLERANCE);
    if mismatch {
        diagnostics.push(format!(
            "Cotton vectors differ from the table expressions by {max_cotton_vs_table:e}"
        ));
    }
    Ok(ConformalVerdict {
        conformally_flat: by_cotton && by_table && by_conditions,
        by_cotton,
        by_table,
        by_conditions,
        max_cotton,
        max_table_differences: max_table,
        max_conditions,
        max_cotton_vs_table,
        max_hessian_residual: max(|c| c.hessian_residual),
        max_hessian_rhs_e1e1: max(|c| c.hessian_rhs_e1e1.abs()),
        tau_plus_10_beta2: tau_beta,
        engine_fault: disagree || mismatch,
        diagnostics,
    })
}

/// Plane pairs probed for constant curvature, in φ-basis components.
const PROBE_PLANES: [(Vec3, Vec3); 6] = [
    ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]),
    ([1.0, 0.0, 0.0], [0.0, 0.0, 1.0]),
    ([0.0, 1.0, 0.0], [0.0, 0.0, 1.0]),
    ([1.0, 0.3, 0.2], [0.1, 1.0, -0.7]),
    ([0.5, -0.2, 1.0], [1.0, 0.4, 0.3]),
    ([-0.3, 2.0, 0.6], [0.8, 0.1, -1.1]),
];

/// Constant sectional curvature detected across samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureProbe {
    pub sectional: Range,
    /// `Some(K)` when every probed plane at every sample agrees within `tol`.
    pub constant: Option<f64>,
    /// Max `‖S − 2K g‖` (φ-basis components) when constant.
    pub space_form_ricci: Option<f64>,
    /// Max `|τ − 6K|` when constant.
    pub space_form_scalar: Option<f64>,
}

pub fn probe_curvature(points: &[PointData], tol: f64) -> CurvatureProbe {
    let mut values = Vec::new();
    for pd in points {
        let e = pd.basis.vectors();
        for (x, y) in PROBE_PLANES {
            let to_working = |v: Vec3| combine(&[(v[0], e[0]), (v[1], e[1]), (v[2], e[2])]);
            if let Ok(k) = pd.sectional(to_working(x), to_working(y)) {
                values.push(k);
            }
        }
    }
    let sectional = Range::of(values.iter().copied());
    let constant = (!values.is_empty() && sectional.spread() < tol).then(|| sectional.mid());
    let (space_form_ricci, space_form_scalar) = match constant {
        Some(k) => {
            let ricci = points
                .iter()
                .map(|pd| {
                    let o = &pd.curvature.orthonormal;
                    let gb = pd.basis.change.bilinear(&pd.metric);
                    max_abs((0..3).flat_map(|i| (0..3).map(move |j| o.ricci[i][j] - 2.0 * k * gb[i][j])))
                })
                .fold(0.0, f64::max);
            let scalar = points
                .iter()
                .map(|pd| (pd.curvature.tensors.scalar - 6.0 * k).abs())
                .fold(0.0, f64::max);
            (Some(ricci), Some(scalar))
        }
        None => (None, None),
    };
    CurvatureProbe {
        sectional,
        constant,
        space_form_ricci,
        space_form_scalar,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    /// Locally symmetric.
    pub locally_symmetric: bool,
    /// Conformally flat with constant τ.
    pub conformally_flat_constant_tau: bool,
    /// Conformally flat with constant β.
    pub conformally_flat_constant_beta: bool,
    /// Paracosymplectic product (β = 0), or constant curvature −β² with τ = −6β² and Einstein.
    pub structure_statement: bool,
    pub unanimous: bool,
    pub beta: f64,
    pub tau: Range,
    pub max_nabla_riemann: f64,
    pub einstein_residual: f64,
    pub curvature: CurvatureProbe,
    /// `K ≤ tol` whenever constant curvature is detected; `None` otherwise.
    pub nonpositive_curvature: Option<bool>,
    pub conformal: ConformalVerdict,
}

/// The four-way equivalence for constant-β quasi-para-Sasakian structures.
pub fn classification_l6(
    points: &[PointData],
    tol: f64,
    tol3: f64,
    spread: f64,
) -> Result<EquivalenceReport, QpsRefusal> {
    if points.is_empty() {
        return Err(QpsRefusal::NoSamples);
    }
    for pd in points {
        check_alpha(pd, tol)?;
    }
    let beta_range = Range::of(points.iter().map(|p| p.structure.beta));
    if !(beta_range.spread() < spread) {
        return Err(QpsRefusal::NonConstantBeta {
            spread: beta_range.spread(),
        });
    }
    let beta = beta_range.mid();
    let conformal = conformal_flatness_verdict(points, tol, tol3, spread)?;
    let tau = Range::of(points.iter().map(|p| p.curvature.tensors.scalar));
    let max_nabla_riemann = points.iter().map(|p| p.curvature.nabla_riemann_norm).fold(0.0, f64::max);
    let einstein_residual = points
        .iter()
        .map(|pd| {
            let o = &pd.curvature.orthonormal;
            let gb = pd.basis.change.bilinear(&pd.metric);
            max_abs((0..3).flat_map(|i| (0..3).map(move |j| o.ricci[i][j] - o.scalar / 3.0 * gb[i][j])))
        })
        .fold(0.0, f64::max);
    let curvature = probe_curvature(points, tol);

    let i = max_nabla_riemann < tol3;
    let ii = conformal.conformally_flat && tau.spread() < spread;
    let iii = conformal.conformally_flat && beta_range.spread() < spread;
    let iv = if beta.abs() < tol {
        let flat = points
            .iter()
            .all(|pd| pd.curvature.orthonormal.riemann.iter().flatten().flatten().flatten().all(|v| v.abs() < tol));
        let parallel_xi = points.iter().all(|pd| {
            let nx = pd.basis.change.endomorphism(&pd.structure.nabla_xi);
            let e = pd.basis.vectors();
            // g(∇_{e_i}ξ, e_j)
            (0..3).all(|a| (0..3).all(|b| bilinear(&pd.metric, combine(&[(nx[a][0], e[0]), (nx[a][1], e[1]), (nx[a][2], e[2])]), e[b]).abs() < tol))
        });
        flat && parallel_xi
    } else {
        let k_ok = curvature.constant.is_some_and(|k| (k + beta * beta).abs() < tol);
        let tau_ok = (tau.min + 6.0 * beta * beta).abs() < tol && (tau.max + 6.0 * beta * beta).abs() < tol;
        k_ok && tau_ok && einstein_residual < tol
    };
    let nonpositive_curvature = curvature.constant.map(|k| k <= tol);
    Ok(EquivalenceReport {
        locally_symmetric: i,
        conformally_flat_constant_tau: ii,
        conformally_flat_constant_beta: iii,
        structure_statement: iv,
        unanimous: i == ii && ii == iii && iii == iv,
        beta,
        tau,
        max_nabla_riemann,
        einstein_residual,
        curvature,
        nonpositive_curvature,
        conformal,
    })
}

//! Almost paracontact metric structures `(φ, ξ, η, g)`: axioms, φ-basis,
//! normality, the structure functions α and β, and classification.

use serde::Serialize;

use crate::expr::Expr;
use crate::geometry::{
    evaluate_point, Backend, Chart, GeometryError, LieFrame, ManifoldInstance, PointData,
};
use crate::residual::ResidualRecord;
use crate::tensor::{
    apply, bilinear, combine, dot, max_abs, norm, scale, sub, to_matrix, trace, unit, FrameChange, Mat3, Vec3,
};

/// `φ`, `ξ`, `η` in the working frame. `phi[b][m]` is the m-th component of `φ E_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParacontactFields<T> {
    pub phi: [[T; 3]; 3],
    pub xi: [T; 3],
    pub eta: [T; 3],
}

/// Minimum `g(v, v)` for a unit-normalised seed vector of the φ-basis.
pub const SEED_THRESHOLD: f64 = 1e-8;

const SIGNS: [f64; 3] = [1.0, -1.0, 1.0];

/// Frame `(e1, e2 = φe1, e3 = ξ)`, or a plain orthonormal frame when the
/// structure is too broken to produce one.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiBasis {
    pub change: FrameChange,
    /// Expected `g(e_i, e_i)`: (+1, −1, +1).
    pub signs: [f64; 3],
    /// `max |g(e_i,e_j) − diag(1,−1,1)|`.
    pub orthonormality_defect: f64,
    /// `max(|η(e1)|, |η(e2)|, |η(e3) − 1|)`.
    pub kernel_defect: f64,
    /// False when the frame is the eigenvector fallback, not built from φ and ξ.
    pub from_structure: bool,
}

impl PhiBasis {
    pub fn vectors(&self) -> [Vec3; 3] {
        self.change.vectors
    }

    fn build(g: &Mat3, eta: Vec3, vectors: [Vec3; 3], from_structure: bool) -> Result<Self, GeometryError> {
        let change = FrameChange::new(vectors)
            .ok_or_else(|| GeometryError::PhiBasis("basis vectors are linearly dependent".into()))?;
        let mut defect: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { SIGNS[i] } else { 0.0 };
                defect = defect.max((bilinear(g, vectors[i], vectors[j]) - want).abs());
            }
        }
        let kernel_defect = dot(eta, vectors[0])
            .abs()
            .max(dot(eta, vectors[1]).abs())
            .max((dot(eta, vectors[2]) - 1.0).abs());
        Ok(Self {
            change,
            signs: SIGNS,
            orthonormality_defect: defect,
            kernel_defect,
            from_structure,
        })
    }

    /// g-orthonormal frame from the eigenvectors of `g`, ordered (+, −, +).
    pub fn fallback(g: &Mat3) -> Result<Self, GeometryError> {
        let eig = to_matrix(g).symmetric_eigen();
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for i in 0..3 {
            let lambda = eig.eigenvalues[i];
            let v: Vec3 = std::array::from_fn(|a| eig.eigenvectors[(a, i)] / lambda.abs().sqrt());
            if lambda > 0.0 {
                pos.push(v);
            } else if lambda < 0.0 {
                neg.push(v);
            }
        }
        if pos.len() != 2 || neg.len() != 1 {
            return Err(GeometryError::PhiBasis("metric does not have signature (2,1)".into()));
        }
        Self::build(g, [0.0, 0.0, 0.0], [pos[0], neg[0], pos[1]], false).map(|mut b| {
            b.kernel_defect = f64::NAN;
            b
        })
    }

    /// The φ-basis obtained from `e1 → cosh t·e1 + sinh t·e2`.
    pub fn rotated(&self, g: &Mat3, phi: &Mat3, eta: Vec3, t: f64) -> Result<Self, GeometryError> {
        let [e1, e2, e3] = self.vectors();
        let r1 = combine(&[(t.cosh(), e1), (t.sinh(), e2)]);
        Self::build(g, eta, [r1, apply(phi, r1), e3], self.from_structure)
    }
}

/// Builds the φ-basis from point values.
///
/// The seed `e1` is the first working-frame vector whose projection onto
/// `ker η`, normalised, has `g(v,v) > 1e-8`. If only timelike projections
/// exist, `φ` of the first one is used instead.
pub fn phi_basis_from(g: &Mat3, phi: &Mat3, xi: Vec3, eta: Vec3) -> Result<PhiBasis, GeometryError> {
    let projected: Vec<Vec3> = (0..3)
        .filter_map(|a| {
            let w = sub(unit(a), scale(eta[a], xi));
            let n = norm(w);
            (n > 1e-12).then(|| scale(1.0 / n, w))
        })
        .collect();
    let unit_spacelike = |v: Vec3| {
        let q = bilinear(g, v, v);
        (q > SEED_THRESHOLD).then(|| scale(1.0 / q.sqrt(), v))
    };
    let seed = projected.iter().find_map(|&w| unit_spacelike(w)).or_else(|| {
        projected
            .iter()
            .filter(|&&w| bilinear(g, w, w) < -SEED_THRESHOLD)
            .find_map(|&w| {
                let u = apply(phi, w);
                let n = norm(u);
                (n > 1e-12).then(|| unit_spacelike(scale(1.0 / n, u))).flatten()
            })
    });
    let e1 = seed.ok_or_else(|| GeometryError::PhiBasis("no unit spacelike vector in ker η".into()))?;
    PhiBasis::build(g, eta, [e1, apply(phi, e1), xi], true)
}

pub fn phi_basis_at(m: &ManifoldInstance, p: Vec3) -> Result<PhiBasis, GeometryError> {
    let pd = evaluate_point(m, p)?;
    let s = &pd.structure;
    phi_basis_from(&pd.metric, &s.phi, s.xi, s.eta)
}

/// Residuals of the almost paracontact metric axioms at one point.
pub fn apm_axioms(pd: &PointData) -> ResidualRecord {
    let g = &pd.metric;
    let s = &pd.structure;
    let (phi, xi, eta) = (&s.phi, s.xi, s.eta);
    let fc = &pd.basis.change;
    let e = pd.basis.vectors();

    let phi2_defect = |v: Vec3| {
        let r = sub(apply(phi, apply(phi, v)), sub(v, scale(dot(eta, v), xi)));
        norm(fc.vector(r))
    };
    let phi_squared = e.iter().map(|&v| phi2_defect(v)).fold(0.0, f64::max);
    let kernel_phi_squared = phi2_defect(e[0]).max(phi2_defect(e[1]));

    let mut compat: f64 = 0.0;
    let mut skew: f64 = 0.0;
    for &x in &e {
        for &y in &e {
            let lhs = bilinear(g, apply(phi, x), apply(phi, y));
            compat = compat.max((lhs + bilinear(g, x, y) - dot(eta, x) * dot(eta, y)).abs());
            skew = skew.max((bilinear(g, x, apply(phi, y)) + bilinear(g, y, apply(phi, x))).abs());
        }
    }
    let eta_dual = max_abs(e.iter().map(|&v| dot(eta, v) - bilinear(g, v, xi)));
    let eta_phi = max_abs(e.iter().map(|&v| dot(eta, apply(phi, v))));
    let basis = if pd.basis.from_structure {
        pd.basis.orthonormality_defect.max(pd.basis.kernel_defect)
    } else {
        f64::INFINITY
    };

    ResidualRecord::new()
        .with("phi_squared", phi_squared)
        .with("metric_compatibility", compat)
        .with("eta_xi", (dot(eta, xi) - 1.0).abs())
        .with("phi_xi", norm(fc.vector(apply(phi, xi))))
        .with("eta_phi", eta_phi)
        .with("eta_metric_dual", eta_dual)
        .with("fundamental_form_skew", skew)
        .with("eigen_split", trace(phi).abs().max(kernel_phi_squared))
        .with("phi_basis", basis)
}

pub fn apm_axioms_at(m: &ManifoldInstance, p: Vec3) -> Result<ResidualRecord, GeometryError> {
    Ok(apm_axioms(&evaluate_point(m, p)?))
}

/// Max orthonormal-frame norm of `N^(1)(e_i, e_j)`.
pub fn normality_residual(pd: &PointData) -> f64 {
    let n = pd.basis.change.vector_valued_2(&pd.structure.nijenhuis);
    n.iter().flatten().fold(0.0, |m, &v| m.max(norm(v)))
}

pub fn normality_residual_at(m: &ManifoldInstance, p: Vec3) -> Result<f64, GeometryError> {
    Ok(normality_residual(&evaluate_point(m, p)?))
}

/// α, β and the derivatives of β at a point; vectors and forms in φ-basis components.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureFunctions {
    pub alpha: f64,
    pub beta: f64,
    /// `dβ(e_i)`.
    pub d_beta: Vec3,
    pub grad_beta: Vec3,
    /// `(∇_{e_i} dβ)(e_j)`.
    pub hess_beta: Mat3,
    /// `dβ(φ e_i)`.
    pub d_beta_phi: Vec3,
    pub grad_tau: Vec3,
}

pub fn structure_functions(pd: &PointData) -> StructureFunctions {
    let s = &pd.structure;
    let fc = &pd.basis.change;
    StructureFunctions {
        alpha: s.alpha,
        beta: s.beta,
        d_beta: fc.covector(s.d_beta),
        grad_beta: fc.vector(s.grad_beta),
        hess_beta: fc.bilinear(&s.hess_beta),
        d_beta_phi: pd.basis.vectors().map(|v| dot(s.d_beta, apply(&s.phi, v))),
        grad_tau: fc.vector(pd.curvature.tensors.scalar_gradient),
    }
}

pub fn alpha_beta_at(m: &ManifoldInstance, p: Vec3) -> Result<StructureFunctions, GeometryError> {
    Ok(structure_functions(&evaluate_point(m, p)?))
}

/// `(α, β)` from the signed frame sums `½ Σ ε_i g(A e_i, e_i)` over a given basis.
pub fn signed_frame_traces(pd: &PointData, basis: &PhiBasis) -> (f64, f64) {
    let s = &pd.structure;
    let mut two_alpha = 0.0;
    let mut two_beta = 0.0;
    for (i, &e) in basis.vectors().iter().enumerate() {
        let a_e = apply(&s.nabla_xi, e);
        two_alpha += basis.signs[i] * bilinear(&pd.metric, a_e, e);
        two_beta += basis.signs[i] * bilinear(&pd.metric, apply(&s.phi, a_e), e);
    }
    (0.5 * two_alpha, 0.5 * two_beta)
}

/// Working-frame (1,2) residual of `(∇_Xφ)Y − β(g(X,Y)ξ − η(Y)X) − α(g(φX,Y)ξ − η(Y)φX)`.
pub(crate) fn nabla_phi_defect(pd: &PointData, alpha: f64, beta: f64) -> crate::tensor::Tensor3 {
    let s = &pd.structure;
    let g = &pd.metric;
    std::array::from_fn(|a| {
        std::array::from_fn(|b| {
            let phi_a_b = bilinear(g, s.phi[a], unit(b));
            std::array::from_fn(|m| {
                let delta = if a == m { 1.0 } else { 0.0 };
                s.nabla_phi[a][b][m]
                    - beta * (g[a][b] * s.xi[m] - s.eta[b] * delta)
                    - alpha * (phi_a_b * s.xi[m] - s.eta[b] * s.phi[a][m])
            })
        })
    })
}

/// Working-frame residual of `∇_Xξ − α(X − η(X)ξ) − βφX`, endomorphism layout.
pub(crate) fn nabla_xi_defect(pd: &PointData, alpha: f64, beta: f64) -> Mat3 {
    let s = &pd.structure;
    std::array::from_fn(|a| {
        std::array::from_fn(|m| {
            let delta = if a == m { 1.0 } else { 0.0 };
            s.nabla_xi[a][m] - alpha * (delta - s.eta[a] * s.xi[m]) - beta * s.phi[a][m]
        })
    })
}

pub(crate) fn vv2_norm(pd: &PointData, t: &crate::tensor::Tensor3) -> f64 {
    let tb = pd.basis.change.vector_valued_2(t);
    tb.iter().flatten().fold(0.0, |m, &v| m.max(norm(v)))
}

pub(crate) fn endo_norm(pd: &PointData, t: &Mat3) -> f64 {
    pd.basis.change.endomorphism(t).iter().fold(0.0, |m, &v| m.max(norm(v)))
}

/// Residuals of the normal-structure characterisations with the computed α, β.
pub fn normal_structure_checks(pd: &PointData) -> ResidualRecord {
    let s = &pd.structure;
    let fc = &pd.basis.change;
    let (alpha, beta) = (s.alpha, s.beta);
    let xi_xi = apply(&s.nabla_xi, s.xi);
    let mut d_eta = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            d_eta[a][b] = s.d_eta[a][b] + beta * bilinear(&pd.metric, unit(a), s.phi[b]);
        }
    }
    ResidualRecord::new()
        .with("nabla_phi", vv2_norm(pd, &nabla_phi_defect(pd, alpha, beta)))
        .with("nabla_xi", endo_norm(pd, &nabla_xi_defect(pd, alpha, beta)))
        .with("nabla_xi_xi", norm(fc.vector(xi_xi)))
        .with("d_eta_fundamental_form", max_abs(fc.bilinear(&d_eta).into_iter().flatten()))
}

pub fn normal_structure_checks_at(m: &ManifoldInstance, p: Vec3) -> Result<ResidualRecord, GeometryError> {
    Ok(normal_structure_checks(&evaluate_point(m, p)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    #[serde(rename = "paracosymplectic")]
    Paracosymplectic,
    #[serde(rename = "quasi-para-Sasakian")]
    QuasiParaSasakian,
    #[serde(rename = "β-para-Sasakian")]
    BetaParaSasakian,
    #[serde(rename = "para-Sasakian")]
    ParaSasakian,
    #[serde(rename = "α-para-Kenmotsu")]
    AlphaParaKenmotsu,
    #[serde(rename = "normal-other")]
    NormalOther,
    #[serde(rename = "non-normal")]
    NonNormal,
}

impl Classification {
    pub fn label(self) -> &'static str {
        match self {
            Classification::Paracosymplectic => "paracosymplectic",
            Classification::QuasiParaSasakian => "quasi-para-Sasakian",
            Classification::BetaParaSasakian => "β-para-Sasakian",
            Classification::ParaSasakian => "para-Sasakian",
            Classification::AlphaParaKenmotsu => "α-para-Kenmotsu",
            Classification::NormalOther => "normal-other",
            Classification::NonNormal => "non-normal",
        }
    }

    /// Normal with α = 0 (β = 0 included).
    pub fn is_quasi_para_sasakian(self) -> bool {
        matches!(
            self,
            Classification::Paracosymplectic
                | Classification::QuasiParaSasakian
                | Classification::BetaParaSasakian
                | Classification::ParaSasakian
        )
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Range of a sampled scalar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
}

impl Range {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Self {
        values.into_iter().fold(
            Range {
                min: f64::INFINITY,
                max: f64::NEG_INFINITY,
            },
            |r, v| Range {
                min: r.min.min(v),
                max: r.max.max(v),
            },
        )
    }

    pub fn spread(&self) -> f64 {
        self.max - self.min
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.max + self.min)
    }

    /// Every sample within `tol` of zero.
    pub fn near_zero(&self, tol: f64) -> bool {
        self.min.abs() < tol && self.max.abs() < tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub verdict: Classification,
    pub alpha: Range,
    pub beta: Range,
    pub max_normality_residual: f64,
    pub diagnostics: Vec<String>,
}

/// Classifies a structure from its pointwise data.
///
/// `tol` decides "zero" and normality, `spread` decides constancy.
pub fn classify(points: &[PointData], tol: f64, spread: f64) -> ClassificationReport {
    let normality = points.iter().map(normality_residual).fold(0.0, f64::max);
    let alpha = Range::of(points.iter().map(|p| p.structure.alpha));
    let beta = Range::of(points.iter().map(|p| p.structure.beta));
    let mut diagnostics = Vec::new();
    let verdict = if points.is_empty() {
        diagnostics.push("no sample points".into());
        Classification::NormalOther
    } else if !(normality < tol) {
        diagnostics.push(format!("normality residual {normality:e} is not below {tol:e}"));
        Classification::NonNormal
    } else if alpha.near_zero(tol) {
        if beta.near_zero(tol) {
            Classification::Paracosymplectic
        } else if beta.spread() < spread {
            if (beta.mid() + 1.0).abs() < tol {
                Classification::ParaSasakian
            } else {
                Classification::BetaParaSasakian
            }
        } else if beta.min > 0.0 || beta.max < 0.0 {
            if beta.min.abs().min(beta.max.abs()) < tol {
                diagnostics.push("β comes within tolerance of zero at some sample".into());
                Classification::NormalOther
            } else {
                Classification::QuasiParaSasakian
            }
        } else {
            diagnostics.push(format!(
                "β changes sign across samples (range [{:e}, {:e}])",
                beta.min, beta.max
            ));
            Classification::NormalOther
        }
    } else if beta.near_zero(tol) && alpha.spread() < spread {
        Classification::AlphaParaKenmotsu
    } else {
        diagnostics.push(format!(
            "α in [{:e}, {:e}], β in [{:e}, {:e}] match no named class",
            alpha.min, alpha.max, beta.min, beta.max
        ));
        Classification::NormalOther
    };
    ClassificationReport {
        verdict,
        alpha,
        beta,
        max_normality_residual: normality,
        diagnostics,
    }
}

pub fn classify_at(
    m: &ManifoldInstance,
    samples: &[Vec3],
    tol: f64,
    spread: f64,
) -> Result<ClassificationReport, GeometryError> {
    let points = samples
        .iter()
        .map(|&p| evaluate_point(m, p))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(classify(&points, tol, spread))
}

/// `ḡ = c²g, η̄ = cη, ξ̄ = ξ/c, φ̄ = φ`.
///
/// Lie-frame instances are rescaled to the orthonormal frame `ē = e/|c|`,
/// which keeps the frame metric signs and multiplies the brackets by `1/|c|`.
pub fn homothetic_deform(m: &ManifoldInstance, c: f64) -> Result<ManifoldInstance, GeometryError> {
    if c == 0.0 || !c.is_finite() {
        return Err(GeometryError::InvalidScale(c));
    }
    let id = format!("{} (c = {c})", m.id);
    match &m.backend {
        Backend::Chart(ch) => {
            let scaled = |e: &Expr, k: f64| if k == 1.0 { e.clone() } else { e.scaled(k) };
            let chart = Chart {
                coords: ch.coords.clone(),
                metric: ch.metric.clone().map(|row| row.map(|e| scaled(&e, c * c))),
                fields: ParacontactFields {
                    phi: ch.fields.phi.clone(),
                    xi: ch.fields.xi.clone().map(|e| scaled(&e, 1.0 / c)),
                    eta: ch.fields.eta.clone().map(|e| scaled(&e, c)),
                },
            };
            ManifoldInstance::chart(id, chart, m.domain)
        }
        Backend::LieFrame(f) => {
            let k = 1.0 / c.abs();
            let sign = c.signum();
            let frame = LieFrame {
                brackets: f.brackets.map(|x| x.map(|y| y.map(|v| v * k))),
                epsilon: f.epsilon,
                fields: ParacontactFields {
                    phi: f.fields.phi,
                    xi: f.fields.xi.map(|v| v * sign),
                    eta: f.fields.eta.map(|v| v * sign),
                },
            };
            ManifoldInstance::lie_frame(id, frame, m.domain)
        }
    }
}

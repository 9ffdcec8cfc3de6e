//! Manifold instances, Levi-Civita connection and curvature.
//!
//! Everything is computed in a single working frame `E_a`: the coordinate
//! frame `∂_a` for the chart backend, the left-invariant frame `e_a` for the
//! Lie-frame backend. Brackets `[E_a, E_b] = c^k_ab E_k` vanish for charts,
//! and frame derivatives `E_a(f)` vanish for Lie-frame components, so a
//! single set of formulas covers both.

mod ops;
mod point;

use thiserror::Error;

use crate::expr::{eval_f64, eval_jet, EvalError, Expr};
use crate::jet::ScalarJet;
use crate::paracontact::ParacontactFields;
use crate::tensor::{Mat3, Tensor3, Vec3};

pub use ops::{
    conformal_ops_at, covariant_derivative, curvature_at, exterior_d1, grad_hess_at, killing_h_at,
    local_symmetry_residual_at, sectional_at, ConformalOps, HTensor, TensorField, TensorValue,
};
pub use point::{evaluate_point, CurvatureData, Diagnostics, PointData, StructureData, TensorialCurvature};


/// Absolute determinant below which the metric counts as degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;
/// Maximum Jacobi identity residual accepted for Lie-frame brackets.
pub const JACOBI_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("metric is degenerate at {point:?} (det g = {det:e})")]
    Degenerate { point: Vec3, det: f64 },
    #[error("metric signature at {point:?} is ({positive},{negative}), expected (2,1)")]
    Signature {
        point: Vec3,
        positive: usize,
        negative: usize,
    },
    #[error("point {0:?} lies outside the domain box")]
    OutsideDomain(Vec3),
    #[error("cannot evaluate {field} at {point:?}: {source}")]
    Evaluation {
        field: String,
        point: Vec3,
        #[source]
        source: EvalError,
    },
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("the plane spanned by the vectors is degenerate (Gram determinant {0:e})")]
    DegeneratePlane(f64),
    #[error("tensor fields with {0} slots are not supported (at most 3)")]
    UnsupportedValence(usize),
    #[error("expected {expected} components, found {found}")]
    ComponentCount { expected: usize, found: usize },
    #[error("frame component {0} is not constant")]
    NonConstantFrameComponent(String),
    #[error("metric components g[{i}][{j}] and g[{j}][{i}] differ")]
    AsymmetricMetric { i: usize, j: usize },
    #[error("structure constants are not antisymmetric in ({i},{j})")]
    NotAntisymmetric { i: usize, j: usize },
    #[error("Jacobi identity residual {0:e} exceeds {JACOBI_TOLERANCE:e}")]
    Jacobi(f64),
    #[error("frame signs {0:?} must contain +1 twice and -1 once")]
    InvalidEpsilon([f64; 3]),
    #[error("domain interval {axis} is empty or not finite")]
    EmptyDomain { axis: usize },
    #[error("cannot build a φ-basis: {0}")]
    PhiBasis(String),
    #[error("homothety factor must be finite and nonzero, got {0}")]
    InvalidScale(f64),
}

/// Chart components `g_ij` as expressions in three coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub coords: [String; 3],
    pub metric: [[Expr; 3]; 3],
    pub fields: ParacontactFields<Expr>,
}

/// Left-invariant frame with constant brackets and a diagonal metric.
#[derive(Debug, Clone, PartialEq)]
pub struct LieFrame {
    /// `brackets[i][j][k]` = k-th component of `[e_i, e_j]`.
    pub brackets: Tensor3,
    /// `g(e_i, e_j) = epsilon[i] δ_ij`.
    pub epsilon: [f64; 3],
    pub fields: ParacontactFields<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum Backend {
    Chart(Chart),
    LieFrame(LieFrame),
}

impl Backend {
    pub fn tag(&self) -> &'static str {
        match self {
            Backend::Chart(_) => "chart",
            Backend::LieFrame(_) => "lie_frame",
        }
    }
}

/// A 3-dimensional pseudo-Riemannian manifold with paracontact fields.
///
/// Immutable once built; all pointwise operations take `&self`.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldInstance {
    pub id: String,
    pub backend: Backend,
    /// Closed interval per coordinate; used for sampling, and enforced for charts.
    pub domain: [[f64; 2]; 3],
}

pub const DEFAULT_DOMAIN: [[f64; 2]; 3] = [[-1.0, 1.0]; 3];

fn check_domain(domain: &[[f64; 2]; 3]) -> Result<(), GeometryError> {
    for (axis, [lo, hi]) in domain.iter().enumerate() {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(GeometryError::EmptyDomain { axis });
        }
    }
    Ok(())
}

impl ManifoldInstance {
    pub fn chart(id: impl Into<String>, chart: Chart, domain: [[f64; 2]; 3]) -> Result<Self, GeometryError> {
        check_domain(&domain)?;
        for i in 0..3 {
            for j in i + 1..3 {
                if chart.metric[i][j] != chart.metric[j][i] {
                    return Err(GeometryError::AsymmetricMetric { i, j });
                }
            }
        }
        Ok(Self {
            id: id.into(),
            backend: Backend::Chart(chart),
            domain,
        })
    }

    pub fn lie_frame(id: impl Into<String>, frame: LieFrame, domain: [[f64; 2]; 3]) -> Result<Self, GeometryError> {
        check_domain(&domain)?;
        let c = &frame.brackets;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    if c[i][j][k] != -c[j][i][k] || !c[i][j][k].is_finite() {
                        return Err(GeometryError::NotAntisymmetric { i, j });
                    }
                }
            }
        }
        let residual = jacobi_residual(c);
        if residual >= JACOBI_TOLERANCE {
            return Err(GeometryError::Jacobi(residual));
        }
        let eps = frame.epsilon;
        let plus = eps.iter().filter(|&&e| e == 1.0).count();
        let minus = eps.iter().filter(|&&e| e == -1.0).count();
        if plus != 2 || minus != 1 {
            return Err(GeometryError::InvalidEpsilon(eps));
        }
        Ok(Self {
            id: id.into(),
            backend: Backend::LieFrame(frame),
            domain,
        })
    }

    pub fn is_chart(&self) -> bool {
        matches!(self.backend, Backend::Chart(_))
    }

    /// Structure constants of the working frame (zero for charts).
    pub fn brackets(&self) -> Tensor3 {
        match &self.backend {
            Backend::Chart(_) => [[[0.0; 3]; 3]; 3],
            Backend::LieFrame(f) => f.brackets,
        }
    }

    /// Centre of the domain box.
    pub fn center(&self) -> Vec3 {
        std::array::from_fn(|i| 0.5 * (self.domain[i][0] + self.domain[i][1]))
    }

    pub fn contains(&self, p: Vec3) -> bool {
        (0..3).all(|i| {
            let [lo, hi] = self.domain[i];
            let slack = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
            p[i] >= lo - slack && p[i] <= hi + slack
        })
    }

    fn check_point(&self, p: Vec3) -> Result<(), GeometryError> {
        if p.iter().any(|v| !v.is_finite()) || (self.is_chart() && !self.contains(p)) {
            return Err(GeometryError::OutsideDomain(p));
        }
        Ok(())
    }

    /// Metric components at `p` in the working frame, without derivatives.
    pub fn metric_at(&self, p: Vec3) -> Result<Mat3, GeometryError> {
        self.check_point(p)?;
        match &self.backend {
            Backend::LieFrame(f) => Ok(std::array::from_fn(|i| {
                std::array::from_fn(|j| if i == j { f.epsilon[i] } else { 0.0 })
            })),
            Backend::Chart(c) => {
                let mut g = [[0.0; 3]; 3];
                for i in 0..3 {
                    for j in 0..3 {
                        g[i][j] = eval_f64(&c.metric[i][j], p).map_err(|source| GeometryError::Evaluation {
                            field: format!("metric[{i}][{j}]"),
                            point: p,
                            source,
                        })?;
                    }
                }
                Ok(g)
            }
        }
    }

    /// Checks that the metric at `p` is nondegenerate with signature (2,1).
    pub fn check_metric_at(&self, p: Vec3) -> Result<Mat3, GeometryError> {
        let g = self.metric_at(p)?;
        check_signature(&g, p)?;
        Ok(g)
    }

    /// Order-3 jets of all component fields at `p`.
    pub(crate) fn local_jets(&self, p: Vec3) -> Result<LocalJets, GeometryError> {
        self.check_point(p)?;
        let order = crate::jet::MAX_ORDER;
        match &self.backend {
            Backend::LieFrame(f) => {
                let k = |v: f64| ScalarJet::constant_unchecked(v, order);
                Ok(LocalJets {
                    point: p,
                    g: std::array::from_fn(|i| std::array::from_fn(|j| k(if i == j { f.epsilon[i] } else { 0.0 }))),
                    phi: f.fields.phi.map(|row| row.map(k)),
                    xi: f.fields.xi.map(k),
                    eta: f.fields.eta.map(k),
                    brackets: f.brackets,
                })
            }
            Backend::Chart(c) => {
                let vars = chart_variables(p, order);
                let ev = |e: &Expr, name: String| {
                    eval_jet(e, &vars).map_err(|source| GeometryError::Evaluation {
                        field: name,
                        point: p,
                        source,
                    })
                };
                let mut g = [[ScalarJet::constant_unchecked(0.0, order); 3]; 3];
                let mut phi = g;
                let mut xi = g[0];
                let mut eta = g[0];
                for i in 0..3 {
                    for j in 0..3 {
                        g[i][j] = ev(&c.metric[i][j], format!("metric[{i}][{j}]"))?;
                        phi[i][j] = ev(&c.fields.phi[i][j], format!("phi[{j}][{i}]"))?;
                    }
                    xi[i] = ev(&c.fields.xi[i], format!("xi[{i}]"))?;
                    eta[i] = ev(&c.fields.eta[i], format!("eta[{i}]"))?;
                }
                Ok(LocalJets {
                    point: p,
                    g,
                    phi,
                    xi,
                    eta,
                    brackets: [[[0.0; 3]; 3]; 3],
                })
            }
        }
    }

    /// Order-3 jet of a user-supplied scalar component at `p`.
    pub(crate) fn component_jet(&self, p: Vec3, comp: &FieldComponent, name: &str) -> Result<ScalarJet, GeometryError> {
        let order = crate::jet::MAX_ORDER;
        match comp {
            FieldComponent::Constant(v) => {
                if !v.is_finite() {
                    return Err(GeometryError::NonFinite(name.to_string()));
                }
                Ok(ScalarJet::constant_unchecked(*v, order))
            }
            FieldComponent::Expr(e) => match &self.backend {
                Backend::Chart(_) => eval_jet(e, &chart_variables(p, order)).map_err(|source| GeometryError::Evaluation {
                    field: name.to_string(),
                    point: p,
                    source,
                }),
                Backend::LieFrame(_) => {
                    if !e.is_constant() {
                        return Err(GeometryError::NonConstantFrameComponent(name.to_string()));
                    }
                    let v = eval_f64(e, [0.0; 3]).map_err(|source| GeometryError::Evaluation {
                        field: name.to_string(),
                        point: p,
                        source,
                    })?;
                    Ok(ScalarJet::constant_unchecked(v, order))
                }
            },
        }
    }
}

fn chart_variables(p: Vec3, order: u8) -> [ScalarJet; 3] {
    std::array::from_fn(|i| ScalarJet::variable(p[i], i, order).expect("order within range"))
}

/// Largest component of the cyclic sum `[[e_i,e_j],e_k] + cyclic`.
pub fn jacobi_residual(c: &Tensor3) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for m in 0..3 {
                    let mut s = 0.0;
                    for l in 0..3 {
                        s += c[i][j][l] * c[l][k][m] + c[j][k][l] * c[l][i][m] + c[k][i][l] * c[l][j][m];
                    }
                    worst = worst.max(s.abs());
                }
            }
        }
    }
    worst
}

pub(crate) fn check_signature(g: &Mat3, p: Vec3) -> Result<(), GeometryError> {
    let m = crate::tensor::to_matrix(g);
    if m.iter().any(|v| !v.is_finite()) {
        return Err(GeometryError::NonFinite("metric".into()));
    }
    let det = m.determinant();
    if det.abs() < DEGENERACY_THRESHOLD {
        return Err(GeometryError::Degenerate { point: p, det });
    }
    let eig = m.symmetric_eigen().eigenvalues;
    let positive = eig.iter().filter(|&&v| v > 0.0).count();
    let negative = eig.iter().filter(|&&v| v < 0.0).count();
    if positive != 2 || negative != 1 {
        return Err(GeometryError::Signature { point: p, positive, negative });
    }
    Ok(())
}

/// A component of a user-supplied field.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldComponent {
    Expr(Expr),
    Constant(f64),
}

impl From<f64> for FieldComponent {
    fn from(v: f64) -> Self {
        FieldComponent::Constant(v)
    }
}

impl From<Expr> for FieldComponent {
    fn from(e: Expr) -> Self {
        FieldComponent::Expr(e)
    }
}

/// Jets of all structure components at one point, in the working frame.
#[derive(Debug, Clone)]
pub(crate) struct LocalJets {
    pub point: Vec3,
    pub g: [[ScalarJet; 3]; 3],
    /// `phi[b][m]` = m-th component of `φ E_b`.
    pub phi: [[ScalarJet; 3]; 3],
    pub xi: [ScalarJet; 3],
    pub eta: [ScalarJet; 3],
    pub brackets: Tensor3,
}

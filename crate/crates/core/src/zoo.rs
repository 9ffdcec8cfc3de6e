//! Built-in example manifolds with reference values.
//!
//! | id | structure | backends |
//! |----|-----------|----------|
//! | E1 | flat paracosymplectic, `dx² − dy² + dz²` | chart |
//! | E2 | para-Heisenberg, `[e1,e2] = 2β₀e3` | lie-frame, chart |
//! | E3 | constant curvature `−β₀²`, cyclic brackets `2β₀` | lie-frame |
//! | E5 | warped product `e^{2α₀z}(dx² − dy²) + dz²` | chart |
//! | E6 | E2 with φ scaled by 1.1 on ker η (non-normal) | lie-frame |

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::expr::{parse, Expr};
use crate::geometry::{Chart, GeometryError, LieFrame, ManifoldInstance, DEFAULT_DOMAIN};
use crate::paracontact::{Classification, ParacontactFields};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZooError {
    #[error("unknown zoo entry `{0}` (expected one of E1, E2, E3, E5, E6)")]
    UnknownId(String),
    #[error("parameter {name} = {value} is outside [-4, 4] \\ {{0}}")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("invalid parameter `{0}`, expected name=value")]
    InvalidParameter(String),
    #[error("{id} has no {backend} backend")]
    NoBackend { id: ZooId, backend: &'static str },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ZooId {
    E1,
    E2,
    E3,
    E5,
    E6,
}

impl ZooId {
    pub const ALL: [ZooId; 5] = [ZooId::E1, ZooId::E2, ZooId::E3, ZooId::E5, ZooId::E6];
}

impl fmt::Display for ZooId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for ZooId {
    type Err = ZooError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "E1" => Ok(ZooId::E1),
            "E2" => Ok(ZooId::E2),
            "E3" => Ok(ZooId::E3),
            "E5" => Ok(ZooId::E5),
            "E6" => Ok(ZooId::E6),
            _ => Err(ZooError::UnknownId(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZooBackend {
    /// The entry's native backend (Lie frame where one exists).
    #[default]
    Default,
    Chart,
    LieFrame,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZooParams {
    pub beta0: f64,
    pub alpha0: f64,
    pub backend: ZooBackend,
}

impl Default for ZooParams {
    fn default() -> Self {
        Self {
            beta0: 1.0,
            alpha0: 1.0,
            backend: ZooBackend::Default,
        }
    }
}

impl ZooParams {
    pub fn beta(beta0: f64) -> Self {
        Self {
            beta0,
            ..Self::default()
        }
    }

    pub fn alpha(alpha0: f64) -> Self {
        Self {
            alpha0,
            ..Self::default()
        }
    }

    pub fn with_backend(mut self, backend: ZooBackend) -> Self {
        self.backend = backend;
        self
    }

    /// Applies one `name=value` assignment (`beta0`, `alpha0`, or `backend`).
    /// Values accept the expression syntax, so `beta0=1/2` works.
    pub fn set(&mut self, assignment: &str) -> Result<(), ZooError> {
        let (name, value) = assignment
            .split_once('=')
            .ok_or_else(|| ZooError::InvalidParameter(assignment.to_string()))?;
        let (name, value) = (name.trim(), value.trim());
        let number = || {
            let coords = ["x".to_string(), "y".to_string(), "z".to_string()];
            parse(value, &coords)
                .ok()
                .filter(Expr::is_constant)
                .and_then(|e| crate::expr::eval_f64(&e, [0.0; 3]).ok())
                .ok_or_else(|| ZooError::InvalidParameter(assignment.to_string()))
        };
        match name {
            "beta0" | "β0" | "β₀" => self.beta0 = number()?,
            "alpha0" | "α0" | "α₀" => self.alpha0 = number()?,
            "backend" => {
                self.backend = match value {
                    "chart" => ZooBackend::Chart,
                    "lie_frame" | "lie-frame" | "lie" => ZooBackend::LieFrame,
                    "default" => ZooBackend::Default,
                    _ => return Err(ZooError::InvalidParameter(assignment.to_string())),
                }
            }
            _ => return Err(ZooError::UnknownParameter(name.to_string())),
        }
        Ok(())
    }
}

/// Where a reference value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Holds because the entry is constructed to satisfy it.
    Construction,
    /// Constant-metric or constant-coefficient arithmetic.
    Elementary,
    /// Independent symbolic Koszul computation in the Lie frame.
    FrameOracle,
    /// Warped-product curvature formula `−f''/f` for `f = e^{αz}`.
    WarpedProductOracle,
    /// The classification rules applied to the reference α and β.
    ClassificationRule,
    /// The deliberate perturbation of the negative control.
    Perturbation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Expected<T> {
    pub value: T,
    pub provenance: Provenance,
}

fn exp<T>(value: T, provenance: Provenance) -> Option<Expected<T>> {
    Some(Expected { value, provenance })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SectionalCurvature {
    Constant(f64),
    NonConstant,
}

/// Reference values; `None` means the entry makes no claim.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpectedValues {
    pub axioms_hold: Expected<bool>,
    pub normal: Expected<bool>,
    pub alpha: Option<Expected<f64>>,
    pub beta: Option<Expected<f64>>,
    pub tau: Option<Expected<f64>>,
    pub sectional: Option<Expected<SectionalCurvature>>,
    pub conformally_flat: Option<Expected<bool>>,
    pub locally_symmetric: Option<Expected<bool>>,
    pub classification: Expected<Classification>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZooEntry {
    pub id: ZooId,
    pub params: ZooParams,
    pub backends: Vec<&'static str>,
    pub expected: ExpectedValues,
}

fn check_range(name: &'static str, value: f64) -> Result<f64, ZooError> {
    if value.is_finite() && value != 0.0 && value.abs() <= 4.0 {
        Ok(value)
    } else {
        Err(ZooError::OutOfRange { name, value })
    }
}

fn xyz() -> [String; 3] {
    ["x".into(), "y".into(), "z".into()]
}

fn chart_expr(src: &str) -> Expr {
    parse(src, &xyz()).expect("zoo expressions are well formed")
}

fn exprs<const N: usize>(src: [&str; N]) -> [Expr; N] {
    src.map(chart_expr)
}

/// `φ∂x = ∂y, φ∂y = ∂x, φ∂z = 0` in a chart.
fn standard_chart_phi() -> [[Expr; 3]; 3] {
    [exprs(["0", "1", "0"]), exprs(["1", "0", "0"]), exprs(["0", "0", "0"])]
}

fn quasi_label(beta0: f64) -> Classification {
    if beta0 == -1.0 {
        Classification::ParaSasakian
    } else {
        Classification::BetaParaSasakian
    }
}

/// Literal of a parameter inside an expression string.
fn lit(v: f64) -> String {
    format!("({v})")
}

fn lie_frame(id: &str, brackets: [[[f64; 3]; 3]; 3], phi_scale: f64) -> Result<ManifoldInstance, GeometryError> {
    let frame = LieFrame {
        brackets,
        epsilon: [1.0, -1.0, 1.0],
        fields: ParacontactFields {
            phi: [[0.0, phi_scale, 0.0], [phi_scale, 0.0, 0.0], [0.0; 3]],
            xi: [0.0, 0.0, 1.0],
            eta: [0.0, 0.0, 1.0],
        },
    };
    ManifoldInstance::lie_frame(id, frame, DEFAULT_DOMAIN)
}

fn heisenberg_brackets(beta0: f64) -> [[[f64; 3]; 3]; 3] {
    let mut c = [[[0.0; 3]; 3]; 3];
    c[0][1][2] = 2.0 * beta0;
    c[1][0][2] = -2.0 * beta0;
    c
}

fn space_form_brackets(beta0: f64) -> [[[f64; 3]; 3]; 3] {
    let mut c = heisenberg_brackets(beta0);
    c[1][2][0] = 2.0 * beta0;
    c[2][1][0] = -2.0 * beta0;
    c[2][0][1] = -2.0 * beta0;
    c[0][2][1] = 2.0 * beta0;
    c
}

/// Builds a zoo entry and its reference values.
pub fn build_example(id: ZooId, params: ZooParams) -> Result<(ManifoldInstance, ZooEntry), ZooError> {
    use Provenance::*;
    let name = id.to_string();
    let (instance, backends, expected) = match id {
        ZooId::E1 => {
            if params.backend == ZooBackend::LieFrame {
                return Err(ZooError::NoBackend { id, backend: "lie_frame" });
            }
            let chart = Chart {
                coords: xyz(),
                metric: [exprs(["1", "0", "0"]), exprs(["0", "-1", "0"]), exprs(["0", "0", "1"])],
                fields: ParacontactFields {
                    phi: standard_chart_phi(),
                    xi: exprs(["0", "0", "1"]),
                    eta: exprs(["0", "0", "1"]),
                },
            };
            let m = ManifoldInstance::chart(name, chart, DEFAULT_DOMAIN)?;
            let expected = ExpectedValues {
                axioms_hold: Expected { value: true, provenance: Construction },
                normal: Expected { value: true, provenance: Elementary },
                alpha: exp(0.0, Elementary),
                beta: exp(0.0, Elementary),
                tau: exp(0.0, Elementary),
                sectional: exp(SectionalCurvature::Constant(0.0), Elementary),
                conformally_flat: exp(true, Elementary),
                locally_symmetric: exp(true, Elementary),
                classification: Expected {
                    value: Classification::Paracosymplectic,
                    provenance: ClassificationRule,
                },
            };
            (m, vec!["chart"], expected)
        }
        ZooId::E2 => {
            let b = check_range("beta0", params.beta0)?;
            let m = if params.backend == ZooBackend::Chart {
                let two_bx = format!("2*{}*x", lit(b));
                let chart = Chart {
                    coords: xyz(),
                    metric: [
                        exprs(["1", "0", "0"]),
                        [chart_expr("0"), chart_expr(&format!("-1 + ({two_bx})^2")), chart_expr(&format!("-{two_bx}"))],
                        [chart_expr("0"), chart_expr(&format!("-{two_bx}")), chart_expr("1")],
                    ],
                    fields: ParacontactFields {
                        phi: [
                            [chart_expr("0"), chart_expr("1"), chart_expr(&two_bx)],
                            exprs(["1", "0", "0"]),
                            exprs(["0", "0", "0"]),
                        ],
                        xi: exprs(["0", "0", "1"]),
                        eta: [chart_expr("0"), chart_expr(&format!("-{two_bx}")), chart_expr("1")],
                    },
                };
                ManifoldInstance::chart(name, chart, DEFAULT_DOMAIN)?
            } else {
                lie_frame(&name, heisenberg_brackets(b), 1.0)?
            };
            let expected = ExpectedValues {
                axioms_hold: Expected { value: true, provenance: Construction },
                normal: Expected { value: true, provenance: FrameOracle },
                alpha: exp(0.0, FrameOracle),
                beta: exp(b, FrameOracle),
                tau: exp(2.0 * b * b, FrameOracle),
                sectional: exp(SectionalCurvature::NonConstant, FrameOracle),
                conformally_flat: exp(false, FrameOracle),
                locally_symmetric: None,
                classification: Expected {
                    value: quasi_label(b),
                    provenance: ClassificationRule,
                },
            };
            (m, vec!["lie_frame", "chart"], expected)
        }
        ZooId::E3 | ZooId::E6 => {
            if params.backend == ZooBackend::Chart {
                return Err(ZooError::NoBackend { id, backend: "chart" });
            }
            let b = check_range("beta0", params.beta0)?;
            if id == ZooId::E3 {
                let m = lie_frame(&name, space_form_brackets(b), 1.0)?;
                let expected = ExpectedValues {
                    axioms_hold: Expected { value: true, provenance: Construction },
                    normal: Expected { value: true, provenance: FrameOracle },
                    alpha: exp(0.0, FrameOracle),
                    beta: exp(b, FrameOracle),
                    tau: exp(-6.0 * b * b, FrameOracle),
                    sectional: exp(SectionalCurvature::Constant(-b * b), FrameOracle),
                    conformally_flat: exp(true, FrameOracle),
                    locally_symmetric: exp(true, FrameOracle),
                    classification: Expected {
                        value: quasi_label(b),
                        provenance: ClassificationRule,
                    },
                };
                (m, vec!["lie_frame"], expected)
            } else {
                let m = lie_frame(&name, heisenberg_brackets(b), 1.1)?;
                let expected = ExpectedValues {
                    axioms_hold: Expected { value: false, provenance: Perturbation },
                    normal: Expected { value: false, provenance: Perturbation },
                    alpha: None,
                    beta: None,
                    tau: None,
                    sectional: None,
                    conformally_flat: None,
                    locally_symmetric: None,
                    classification: Expected {
                        value: Classification::NonNormal,
                        provenance: Perturbation,
                    },
                };
                (m, vec!["lie_frame"], expected)
            }
        }
        ZooId::E5 => {
            if params.backend == ZooBackend::LieFrame {
                return Err(ZooError::NoBackend { id, backend: "lie_frame" });
            }
            let a = check_range("alpha0", params.alpha0)?;
            let warp = format!("exp(2*{}*z)", lit(a));
            let chart = Chart {
                coords: xyz(),
                metric: [
                    [chart_expr(&warp), chart_expr("0"), chart_expr("0")],
                    [chart_expr("0"), chart_expr(&format!("-{warp}")), chart_expr("0")],
                    exprs(["0", "0", "1"]),
                ],
                fields: ParacontactFields {
                    phi: standard_chart_phi(),
                    xi: exprs(["0", "0", "1"]),
                    eta: exprs(["0", "0", "1"]),
                },
            };
            let domain = [[-1.0, 1.0], [-1.0, 1.0], [-0.5, 0.5]];
            let m = ManifoldInstance::chart(name, chart, domain)?;
            let expected = ExpectedValues {
                axioms_hold: Expected { value: true, provenance: Construction },
                normal: Expected { value: true, provenance: WarpedProductOracle },
                alpha: exp(a, WarpedProductOracle),
                beta: exp(0.0, WarpedProductOracle),
                tau: exp(-6.0 * a * a, WarpedProductOracle),
                sectional: exp(SectionalCurvature::Constant(-a * a), WarpedProductOracle),
                conformally_flat: exp(true, WarpedProductOracle),
                locally_symmetric: exp(true, WarpedProductOracle),
                classification: Expected {
                    value: Classification::AlphaParaKenmotsu,
                    provenance: ClassificationRule,
                },
            };
            (m, vec!["chart"], expected)
        }
    };
    let entry = ZooEntry {
        id,
        params,
        backends,
        expected,
    };
    Ok((instance, entry))
}

//! Manifold-spec JSON: loading, validation and export.
//!
//! ```json
//! {"backend": "chart", "coords": ["x","y","z"],
//!  "metric": [["1","0","0"],["0","-1","0"],["0","0","1"]],
//!  "phi": [["0","1","0"],["1","0","0"],["0","0","0"]],
//!  "xi": ["0","0","1"], "eta": ["0","0","1"],
//!  "domain": [[-1,1],[-1,1],[-1,1]]}
//! ```
//!
//! `phi[i][j]` is the i-th component of `φ(e_j)` (matrix convention).
//! Lie-frame specs give `structure_constants` (`c12` = components of
//! `[e1,e2]`, and so on), `epsilon` and frame-constant numbers for `phi`,
//! `xi`, `eta`. `scalars` names coordinate expressions that the other
//! expressions may refer to.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{eval_f64, parse, parse_with_definitions, validate_coords, Expr, Func, ParseError};
use crate::geometry::{Backend, Chart, GeometryError, LieFrame, ManifoldInstance, DEFAULT_DOMAIN};
use crate::paracontact::ParacontactFields;
use crate::tensor::{Mat3, Vec3};

/// Tolerance on `η(ξ) = 1` at the domain centre.
pub const LOAD_SANITY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("schema violation: {0}")]
    Json(#[from] serde_json::Error),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("{path}: {source}")]
    Geometry { path: String, source: GeometryError },
    #[error("signature check at the domain centre failed: {0}")]
    Signature(GeometryError),
    #[error("η(ξ) = {value} at the domain centre, expected 1")]
    EtaXi { value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendTag {
    Chart,
    LieFrame,
}

/// A component given as a number or as an expression string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Component {
    Number(f64),
    Expr(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureConstants {
    pub c12: [f64; 3],
    pub c23: [f64; 3],
    pub c31: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldSpec {
    pub backend: BackendTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<[String; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<[[Component; 3]; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure_constants: Option<StructureConstants>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<[f64; 3]>,
    pub phi: [[Component; 3]; 3],
    pub xi: [Component; 3],
    pub eta: [Component; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<[[f64; 2]; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scalars: Option<BTreeMap<String, String>>,
}

fn schema(msg: impl Into<String>) -> SpecError {
    SpecError::Schema(msg.into())
}

struct ExprContext {
    coords: [String; 3],
    definitions: BTreeMap<String, Expr>,
}

impl ExprContext {
    fn new(coords: [String; 3], scalars: Option<&BTreeMap<String, String>>) -> Result<Self, SpecError> {
        validate_coords(&coords).map_err(|source| SpecError::Parse {
            path: "coords".into(),
            source,
        })?;
        let mut definitions = BTreeMap::new();
        for (name, src) in scalars.into_iter().flatten() {
            let path = format!("scalars.{name}");
            if validate_coords(&[name.clone(), "_a".into(), "_b".into()]).is_err() || Func::from_name(name).is_some() {
                return Err(schema(format!("{path}: '{name}' is not a usable scalar name")));
            }
            if coords.contains(name) {
                return Err(schema(format!("{path}: '{name}' is also a coordinate")));
            }
            let expr = parse(src, &coords).map_err(|source| SpecError::Parse { path, source })?;
            definitions.insert(name.clone(), expr);
        }
        Ok(Self { coords, definitions })
    }

    fn expr(&self, c: &Component, path: String) -> Result<Expr, SpecError> {
        match c {
            Component::Number(v) if v.is_finite() => Ok(Expr::constant(*v)),
            Component::Number(v) => Err(schema(format!("{path}: {v} is not finite"))),
            Component::Expr(s) => {
                parse_with_definitions(s, &self.coords, &self.definitions).map_err(|source| SpecError::Parse { path, source })
            }
        }
    }
}

/// Frame-constant value of a lie-frame component.
fn constant(c: &Component, path: String) -> Result<f64, SpecError> {
    match c {
        Component::Number(v) if v.is_finite() => Ok(*v),
        Component::Number(v) => Err(schema(format!("{path}: {v} is not finite"))),
        Component::Expr(s) => {
            let expr = parse(s, &["_u".into(), "_v".into(), "_w".into()]).map_err(|source| SpecError::Parse {
                path: path.clone(),
                source,
            })?;
            if !expr.is_constant() {
                return Err(SpecError::Geometry {
                    path,
                    source: GeometryError::NonConstantFrameComponent(s.clone()),
                });
            }
            eval_f64(&expr, [0.0; 3]).map_err(|source| SpecError::Geometry {
                path,
                source: GeometryError::Evaluation {
                    field: s.clone(),
                    point: [0.0; 3],
                    source,
                },
            })
        }
    }
}

fn map3<T, U, E>(a: &[T; 3], mut f: impl FnMut(usize, &T) -> Result<U, E>) -> Result<[U; 3], E> {
    let [x, y, z] = a;
    Ok([f(0, x)?, f(1, y)?, f(2, z)?])
}

impl ManifoldSpec {
    /// Validates the spec and builds the instance.
    pub fn build(&self, id: impl Into<String>) -> Result<ManifoldInstance, SpecError> {
        let id = id.into();
        let domain = self.domain.unwrap_or(DEFAULT_DOMAIN);
        let geometry = |path: &str| {
            let path = path.to_string();
            move |source| SpecError::Geometry { path, source }
        };
        let m = match self.backend {
            BackendTag::Chart => {
                if self.structure_constants.is_some() || self.epsilon.is_some() {
                    return Err(schema("chart specs take no structure_constants or epsilon"));
                }
                let metric = self.metric.as_ref().ok_or_else(|| schema("chart specs need a metric"))?;
                let coords = self
                    .coords
                    .clone()
                    .unwrap_or_else(|| ["x".into(), "y".into(), "z".into()]);
                let cx = ExprContext::new(coords, self.scalars.as_ref())?;
                let metric = map3(metric, |i, row| map3(row, |j, c| cx.expr(c, format!("metric[{i}][{j}]"))))?;
                for i in 0..3 {
                    for j in i + 1..3 {
                        if metric[i][j] != metric[j][i] {
                            return Err(schema(format!("metric is not symmetric: metric[{i}][{j}] != metric[{j}][{i}]")));
                        }
                    }
                }
                let matrix = map3(&self.phi, |i, row| map3(row, |j, c| cx.expr(c, format!("phi[{i}][{j}]"))))?;
                let phi = std::array::from_fn(|b| std::array::from_fn(|m| matrix[m][b].clone()));
                let fields = ParacontactFields {
                    phi,
                    xi: map3(&self.xi, |i, c| cx.expr(c, format!("xi[{i}]")))?,
                    eta: map3(&self.eta, |i, c| cx.expr(c, format!("eta[{i}]")))?,
                };
                let chart = Chart {
                    coords: cx.coords,
                    metric,
                    fields,
                };
                ManifoldInstance::chart(id, chart, domain).map_err(geometry("metric"))?
            }
            BackendTag::LieFrame => {
                if self.metric.is_some() || self.coords.is_some() || self.scalars.is_some() {
                    return Err(schema("lie_frame specs take no metric, coords or scalars"));
                }
                let mut brackets = [[[0.0; 3]; 3]; 3];
                if let Some(sc) = &self.structure_constants {
                    for (i, j, v) in [(0, 1, sc.c12), (1, 2, sc.c23), (2, 0, sc.c31)] {
                        brackets[i][j] = v;
                        brackets[j][i] = v.map(|x| -x);
                    }
                }
                let matrix: Mat3 = map3(&self.phi, |i, row| map3(row, |j, c| constant(c, format!("phi[{i}][{j}]"))))?;
                let frame = LieFrame {
                    brackets,
                    epsilon: self.epsilon.unwrap_or([1.0, -1.0, 1.0]),
                    fields: ParacontactFields {
                        phi: std::array::from_fn(|b| std::array::from_fn(|m| matrix[m][b])),
                        xi: map3(&self.xi, |i, c| constant(c, format!("xi[{i}]")))?,
                        eta: map3(&self.eta, |i, c| constant(c, format!("eta[{i}]")))?,
                    },
                };
                ManifoldInstance::lie_frame(id, frame, domain).map_err(geometry("structure_constants"))?
            }
        };
        sanity_at_center(&m)?;
        Ok(m)
    }
}

fn sanity_at_center(m: &ManifoldInstance) -> Result<(), SpecError> {
    let p = m.center();
    m.check_metric_at(p).map_err(SpecError::Signature)?;
    let (xi, eta): (Vec3, Vec3) = match &m.backend {
        Backend::LieFrame(f) => (f.fields.xi, f.fields.eta),
        Backend::Chart(c) => {
            let eval = |e: &Expr, path: String| {
                eval_f64(e, p).map_err(|source| SpecError::Geometry {
                    path: path.clone(),
                    source: GeometryError::Evaluation {
                        field: path,
                        point: p,
                        source,
                    },
                })
            };
            (
                map3(&c.fields.xi, |i, e| eval(e, format!("xi[{i}]")))?,
                map3(&c.fields.eta, |i, e| eval(e, format!("eta[{i}]")))?,
            )
        }
    };
    let value: f64 = (0..3).map(|i| xi[i] * eta[i]).sum();
    if (value - 1.0).abs() < LOAD_SANITY_TOLERANCE {
        Ok(())
    } else {
        Err(SpecError::EtaXi { value })
    }
}

pub fn load_spec_str(json: &str, id: impl Into<String>) -> Result<ManifoldInstance, SpecError> {
    let spec: ManifoldSpec = serde_json::from_str(json)?;
    spec.build(id)
}

/// Loads a spec file; the instance id is the file stem.
pub fn load_spec(path: impl AsRef<Path>) -> Result<ManifoldInstance, SpecError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    load_spec_str(&text, id)
}

/// Spec that loads back to an equal instance.
pub fn to_spec(m: &ManifoldInstance) -> ManifoldSpec {
    match &m.backend {
        Backend::Chart(c) => {
            let show = |e: &Expr| Component::Expr(e.display(&c.coords).to_string());
            ManifoldSpec {
                backend: BackendTag::Chart,
                coords: Some(c.coords.clone()),
                metric: Some(c.metric.each_ref().map(|row| row.each_ref().map(show))),
                structure_constants: None,
                epsilon: None,
                phi: std::array::from_fn(|i| std::array::from_fn(|j| show(&c.fields.phi[j][i]))),
                xi: c.fields.xi.each_ref().map(show),
                eta: c.fields.eta.each_ref().map(show),
                domain: Some(m.domain),
                scalars: None,
            }
        }
        Backend::LieFrame(f) => ManifoldSpec {
            backend: BackendTag::LieFrame,
            coords: None,
            metric: None,
            structure_constants: Some(StructureConstants {
                c12: f.brackets[0][1],
                c23: f.brackets[1][2],
                c31: f.brackets[2][0],
            }),
            epsilon: Some(f.epsilon),
            phi: std::array::from_fn(|i| std::array::from_fn(|j| Component::Number(f.fields.phi[j][i]))),
            xi: f.fields.xi.map(Component::Number),
            eta: f.fields.eta.map(Component::Number),
            domain: Some(m.domain),
            scalars: None,
        },
    }
}

pub fn to_json(m: &ManifoldInstance) -> String {
    serde_json::to_string_pretty(&to_spec(m)).expect("specs serialize")
}

use super::point::{max_vector_norm, JetGeometry};
use super::{evaluate_point, CurvatureData, FieldComponent, GeometryError, ManifoldInstance, PointData};
use crate::jet::ScalarJet;
use crate::tensor::{bilinear, trace, Mat3, Tensor3, Vec3};

/// Connection and curvature of `m` at `p`.
pub fn curvature_at(m: &ManifoldInstance, p: Vec3) -> Result<CurvatureData, GeometryError> {
    Ok(evaluate_point(m, p)?.curvature)
}

/// Tensor field of type (0,q) or (1,q), components in the crate's layout:
/// covariant slots first, the contravariant component last.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorField {
    pub lower: usize,
    pub upper: bool,
    pub components: Vec<FieldComponent>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TensorValue {
    pub lower: usize,
    pub upper: bool,
    pub components: Vec<f64>,
}

impl TensorValue {
    pub fn max_abs(&self) -> f64 {
        crate::tensor::max_abs(self.components.iter().copied())
    }
}

fn slots(lower: usize, upper: bool) -> Result<usize, GeometryError> {
    let total = lower + usize::from(upper);
    if total > 3 {
        return Err(GeometryError::UnsupportedValence(total));
    }
    Ok(total)
}

/// Digits of `index` in base 3, most significant first.
fn multi_index(mut index: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in (0..len).rev() {
        out[slot] = index % 3;
        index /= 3;
    }
    out
}

fn flat_index(idx: &[usize]) -> usize {
    idx.iter().fold(0, |acc, &i| acc * 3 + i)
}

/// `∇_X T` at `p` by the Leibniz rule.
pub fn covariant_derivative(
    m: &ManifoldInstance,
    p: Vec3,
    field: &TensorField,
    x: Vec3,
) -> Result<TensorValue, GeometryError> {
    let total = slots(field.lower, field.upper)?;
    let count = 3usize.pow(total as u32);
    if field.components.len() != count {
        return Err(GeometryError::ComponentCount {
            expected: count,
            found: field.components.len(),
        });
    }
    let geo = JetGeometry::new(m.local_jets(p)?)?;
    let jets = field
        .components
        .iter()
        .enumerate()
        .map(|(i, c)| m.component_jet(p, c, &format!("component {i}")))
        .collect::<Result<Vec<ScalarJet>, _>>()?;
    let gamma = geo.gamma_values();
    let t: Vec<f64> = jets.iter().map(|j| j.value()).collect();

    let mut out = vec![0.0; count];
    for (flat, slot_out) in out.iter_mut().enumerate() {
        let idx = multi_index(flat, total);
        let mut s = 0.0;
        for a in 0..3 {
            if x[a] == 0.0 {
                continue;
            }
            let mut term = jets[flat].derivative(a).expect("order 3 field").value();
            for k in 0..3 {
                for slot in 0..total {
                    let mut moved = idx.clone();
                    moved[slot] = k;
                    let v = t[flat_index(&moved)];
                    if field.upper && slot == total - 1 {
                        term += gamma[a][k][idx[slot]] * v;
                    } else {
                        term -= gamma[a][idx[slot]][k] * v;
                    }
                }
            }
            s += x[a] * term;
        }
        *slot_out = s;
    }
    Ok(TensorValue {
        lower: field.lower,
        upper: field.upper,
        components: out,
    })
}

/// Gradient (raised with the indefinite metric) and Hessian `(∇_X df)(Y)`.
pub fn grad_hess_at(m: &ManifoldInstance, p: Vec3, f: &FieldComponent) -> Result<(Vec3, Mat3), GeometryError> {
    let geo = JetGeometry::new(m.local_jets(p)?)?;
    let jet = m.component_jet(p, f, "scalar field")?;
    let (df, hess) = geo.differential_and_hessian(&jet);
    let ginv = geo.ginv.map(|row| row.map(|j| j.value()));
    let grad = std::array::from_fn(|i| (0..3).map(|k| ginv[i][k] * df[k]).sum());
    Ok((grad, hess))
}

/// `dω(E_a,E_b) = ½(E_a ω_b − E_b ω_a − ω([E_a,E_b]))`.
pub fn exterior_d1(m: &ManifoldInstance, p: Vec3, omega: &[FieldComponent; 3]) -> Result<Mat3, GeometryError> {
    m.check_metric_at(p)?;
    let jets: [ScalarJet; 3] = [
        m.component_jet(p, &omega[0], "omega[0]")?,
        m.component_jet(p, &omega[1], "omega[1]")?,
        m.component_jet(p, &omega[2], "omega[2]")?,
    ];
    let c = m.brackets();
    let dj = |i: usize, a: usize| jets[i].derivative(a).expect("order 3 field").value();
    let mut out = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            if a == b {
                continue;
            }
            let bracket: f64 = (0..3).map(|k| c[a][b][k] * jets[k].value()).sum();
            out[a][b] = 0.5 * (dj(b, a) - dj(a, b) - bracket);
        }
    }
    Ok(out)
}

/// Minimum |Gram determinant| of a plane, after normalising the inputs.
pub const PLANE_DEGENERACY: f64 = 1e-8;

impl PointData {
    /// Sectional curvature of the plane spanned by `x` and `y` (working-frame components).
    pub fn sectional(&self, x: Vec3, y: Vec3) -> Result<f64, GeometryError> {
        let (nx, ny) = (crate::tensor::norm(x), crate::tensor::norm(y));
        if nx == 0.0 || ny == 0.0 {
            return Err(GeometryError::DegeneratePlane(0.0));
        }
        let x = crate::tensor::scale(1.0 / nx, x);
        let y = crate::tensor::scale(1.0 / ny, y);
        let g = &self.metric;
        let gram = bilinear(g, x, x) * bilinear(g, y, y) - bilinear(g, x, y).powi(2);
        if gram.abs() <= PLANE_DEGENERACY {
            return Err(GeometryError::DegeneratePlane(gram));
        }
        let r = &self.curvature.tensors.riemann;
        let mut ryy = [0.0; 3];
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    let w = x[a] * y[b] * y[c];
                    if w != 0.0 {
                        for k in 0..3 {
                            ryy[k] += w * r[a][b][c][k];
                        }
                    }
                }
            }
        }
        Ok(bilinear(g, ryy, x) / gram)
    }
}

/// Sectional curvature `g(R(X,Y)Y,X) / (g(X,X)g(Y,Y) − g(X,Y)²)`.
pub fn sectional_at(m: &ManifoldInstance, p: Vec3, x: Vec3, y: Vec3) -> Result<f64, GeometryError> {
    evaluate_point(m, p)?.sectional(x, y)
}

/// `L`, `∇L` and the Cotton tensor at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalOps {
    /// Working-frame components, endomorphism layout.
    pub l: Mat3,
    pub nabla_l: Tensor3,
    pub cotton: Tensor3,
    /// Max over `i < j` of the Euclidean norm of `C(e_i,e_j)` in the orthonormal frame.
    pub cotton_norm: f64,
}

impl ConformalOps {
    pub fn from_point(pd: &PointData) -> Self {
        let t = &pd.curvature.tensors;
        let o = &pd.curvature.orthonormal;
        let pairs = [(0, 1), (0, 2), (1, 2)];
        Self {
            l: t.l_operator,
            nabla_l: t.nabla_l,
            cotton: t.cotton,
            cotton_norm: max_vector_norm(pairs.iter().map(|&(i, j)| o.cotton[i][j])),
        }
    }

    pub fn conformally_flat(&self, tol: f64) -> bool {
        self.cotton_norm < tol
    }
}

pub fn conformal_ops_at(m: &ManifoldInstance, p: Vec3) -> Result<ConformalOps, GeometryError> {
    Ok(ConformalOps::from_point(&evaluate_point(m, p)?))
}

/// Max Euclidean norm of `(∇_{e_l}R)(e_i,e_j)e_k` over the orthonormal frame.
pub fn local_symmetry_residual_at(m: &ManifoldInstance, p: Vec3) -> Result<f64, GeometryError> {
    Ok(evaluate_point(m, p)?.curvature.nabla_riemann_norm)
}

/// `h = ½ 𝓛_ξ φ` with its trace and `hξ`.
#[derive(Debug, Clone, PartialEq)]
pub struct HTensor {
    /// Working-frame components, endomorphism layout.
    pub h: Mat3,
    pub trace: f64,
    pub h_xi: Vec3,
    /// Max Euclidean norm of `h e_i` in the orthonormal frame.
    pub norm: f64,
}

impl HTensor {
    pub fn from_point(pd: &PointData) -> Self {
        let h: Mat3 = pd.structure.lie_xi_phi.map(|row| row.map(|v| 0.5 * v));
        let fc = &pd.basis.change;
        let hb = fc.endomorphism(&h);
        Self {
            h,
            trace: trace(&h),
            h_xi: fc.vector(crate::tensor::apply(&h, pd.structure.xi)),
            norm: max_vector_norm(hb),
        }
    }
}

pub fn killing_h_at(m: &ManifoldInstance, p: Vec3) -> Result<HTensor, GeometryError> {
    Ok(HTensor::from_point(&evaluate_point(m, p)?))
}

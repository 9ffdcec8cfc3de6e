use super::{check_signature, GeometryError, LocalJets, ManifoldInstance, DEGENERACY_THRESHOLD};
use crate::jet::ScalarJet;
use crate::paracontact::{phi_basis_from, PhiBasis};
use crate::tensor::{FrameChange, Mat3, Tensor3, Tensor4, Tensor5, Vec3, ZERO3};

type J = ScalarJet;
type JVec = [J; 3];
type JMat = [[J; 3]; 3];

fn zero(order: u8) -> J {
    J::constant_unchecked(0.0, order)
}

/// Frame derivative `E_a(f)`. Lie-frame components are constant jets, so
/// this is the coordinate partial in both backends.
fn d(f: &J, a: usize) -> J {
    f.derivative(a).expect("jet order budget")
}

fn values<const N: usize>(v: &[J; N]) -> [f64; N] {
    v.map(|j| j.value())
}

fn mat_values(m: &JMat) -> Mat3 {
    m.map(|row| values(&row))
}

/// Jets of the connection and curvature at one point.
///
/// Orders: g, φ, ξ, η carry 3; Γ, ∇ξ, α, β carry 2; R, S, τ, L, dβ carry 1.
pub(crate) struct JetGeometry {
    pub point: Vec3,
    pub brackets: Tensor3,
    pub g: JMat,
    pub ginv: JMat,
    /// `gamma[a][b][m]` = m-th component of `∇_{E_a} E_b`.
    pub gamma: [JMat; 3],
    pub riemann: [[JMat; 3]; 3],
    pub ricci: JMat,
    pub tau: J,
    pub l_op: JMat,
    pub phi: JMat,
    pub xi: JVec,
    pub eta: JVec,
    /// `nabla_xi[a][m]` = m-th component of `∇_{E_a} ξ`.
    pub nabla_xi: JMat,
    pub alpha: J,
    pub beta: J,
}

impl JetGeometry {
    pub fn new(local: LocalJets) -> Result<Self, GeometryError> {
        let LocalJets {
            point,
            g,
            phi,
            xi,
            eta,
            brackets: c,
        } = local;
        check_signature(&mat_values(&g), point)?;

        let det = g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
            + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
        if det.value().abs() < DEGENERACY_THRESHOLD {
            return Err(GeometryError::Degenerate {
                point,
                det: det.value(),
            });
        }
        let inv_det = det.recip().map_err(|_| GeometryError::Degenerate {
            point,
            det: det.value(),
        })?;
        let cof = |i: usize, j: usize| {
            let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
            let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
            g[r0][c0] * g[r1][c1] - g[r0][c1] * g[r1][c0]
        };
        let ginv: JMat = std::array::from_fn(|i| std::array::from_fn(|j| cof(i, j) * inv_det));

        // Lowered Koszul: Γ_abc = ½(E_a g_bc + E_b g_ac − E_c g_ab + C_abc − C_bca + C_cab),
        // with C_abc = c^k_ab g_kc.
        let o2 = 2;
        let cl = |a: usize, b: usize, cc: usize| {
            let mut s = zero(3);
            for k in 0..3 {
                if c[a][b][k] != 0.0 {
                    s += g[k][cc] * c[a][b][k];
                }
            }
            s
        };
        let mut lowered = [[[zero(o2); 3]; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                for cc in 0..3 {
                    let metric_part = d(&g[b][cc], a) + d(&g[a][cc], b) - d(&g[a][b], cc);
                    let bracket_part = (cl(a, b, cc) - cl(b, cc, a) + cl(cc, a, b)).truncate(o2);
                    lowered[a][b][cc] = (metric_part + bracket_part) * 0.5;
                }
            }
        }
        let mut gamma = [[[zero(o2); 3]; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                for m in 0..3 {
                    let mut s = zero(o2);
                    for k in 0..3 {
                        s += ginv[m][k] * lowered[a][b][k];
                    }
                    gamma[a][b][m] = s;
                }
            }
        }

        // R(E_a,E_b)E_c = E_aΓ_bc − E_bΓ_ac + Γ_bc^k Γ_ak − Γ_ac^k Γ_bk − c^k_ab Γ_kc
        let o1 = 1;
        let mut riemann = [[[[zero(o1); 3]; 3]; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                for cc in 0..3 {
                    for m in 0..3 {
                        let mut s = d(&gamma[b][cc][m], a) - d(&gamma[a][cc][m], b);
                        for k in 0..3 {
                            s += gamma[b][cc][k] * gamma[a][k][m] - gamma[a][cc][k] * gamma[b][k][m];
                            if c[a][b][k] != 0.0 {
                                s -= gamma[k][cc][m] * c[a][b][k];
                            }
                        }
                        riemann[a][b][cc][m] = s.truncate(o1);
                    }
                }
            }
        }

        // S(Y,Z) = trace(X ↦ R(X,Y)Z)
        let mut ricci = [[zero(o1); 3]; 3];
        for b in 0..3 {
            for cc in 0..3 {
                let mut s = zero(o1);
                for a in 0..3 {
                    s += riemann[a][b][cc][a];
                }
                ricci[b][cc] = s;
            }
        }
        let mut tau = zero(o1);
        for b in 0..3 {
            for cc in 0..3 {
                tau += ginv[b][cc] * ricci[b][cc];
            }
        }
        let mut l_op = [[zero(o1); 3]; 3];
        for b in 0..3 {
            for m in 0..3 {
                let mut s = zero(o1);
                for k in 0..3 {
                    s += ginv[m][k] * ricci[k][b];
                }
                if b == m {
                    s -= tau * 0.25;
                }
                l_op[b][m] = s;
            }
        }

        let nabla_xi = covariant_vector(&gamma, &xi);
        let mut alpha = zero(o2);
        let mut beta = zero(o2);
        for a in 0..3 {
            alpha += nabla_xi[a][a] * 0.5;
            for k in 0..3 {
                beta += nabla_xi[a][k] * phi[k][a] * 0.5;
            }
        }

        let out = Self {
            point,
            brackets: c,
            g,
            ginv,
            gamma,
            riemann,
            ricci,
            tau,
            l_op,
            phi,
            xi,
            eta,
            nabla_xi,
            alpha,
            beta,
        };
        if !out.all_finite() {
            return Err(GeometryError::NonFinite("curvature".into()));
        }
        Ok(out)
    }

    fn all_finite(&self) -> bool {
        let flat = |m: &JMat| m.iter().flatten().all(J::is_finite);
        flat(&self.ginv)
            && self.gamma.iter().all(flat)
            && self.riemann.iter().flatten().all(flat)
            && self.tau.is_finite()
            && self.beta.is_finite()
            && self.alpha.is_finite()
    }

    /// Covariant derivative of a vector field: `[a][m]` = m-th comp of `∇_{E_a} V`.
    pub fn nabla_vector(&self, v: &JVec) -> JMat {
        covariant_vector(&self.gamma, v)
    }

    /// `dF[a]` and `∇dF[a][b] = (∇_{E_a} dF)(E_b)` of a scalar field jet.
    pub fn differential_and_hessian(&self, f: &J) -> (Vec3, Mat3) {
        let df: JVec = std::array::from_fn(|a| d(f, a));
        let mut hess = [[0.0; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                let mut s = d(&df[b], a).value();
                for k in 0..3 {
                    s -= self.gamma[a][b][k].value() * df[k].value();
                }
                hess[a][b] = s;
            }
        }
        (values(&df), hess)
    }

    pub fn raise_jet(&self, w: &JVec) -> JVec {
        std::array::from_fn(|m| {
            let mut s = zero(w[0].order());
            for k in 0..3 {
                s += self.ginv[m][k] * w[k];
            }
            s
        })
    }

    pub fn gamma_values(&self) -> Tensor3 {
        self.gamma.map(|m| mat_values(&m))
    }
}

fn covariant_vector(gamma: &[JMat; 3], v: &JVec) -> JMat {
    std::array::from_fn(|a| {
        std::array::from_fn(|m| {
            let mut s = d(&v[m], a);
            for k in 0..3 {
                s += gamma[a][k][m] * v[k];
            }
            s
        })
    })
}

/// Frame-change-covariant curvature quantities (everything but Γ).
#[derive(Debug, Clone, PartialEq)]
pub struct TensorialCurvature {
    /// `riemann[a][b][c][m]` = m-th component of `R(E_a,E_b)E_c`.
    pub riemann: Tensor4,
    /// `S(E_a, E_b)`.
    pub ricci: Mat3,
    /// `ricci_operator[b][m]` = m-th component of `Q E_b`.
    pub ricci_operator: Mat3,
    pub scalar: f64,
    /// `dτ(E_a)`.
    pub scalar_differential: Vec3,
    pub scalar_gradient: Vec3,
    /// `L = Q − (τ/4)·Id`, endomorphism layout.
    pub l_operator: Mat3,
    /// `nabla_l[a][b][m]` = m-th component of `(∇_{E_a}L)E_b`.
    pub nabla_l: Tensor3,
    /// `cotton[a][b][m]` = m-th component of `(∇_{E_a}L)E_b − (∇_{E_b}L)E_a`.
    pub cotton: Tensor3,
    /// `nabla_riemann[l][a][b][c][m]` = m-th component of `(∇_{E_l}R)(E_a,E_b)E_c`.
    pub nabla_riemann: Tensor5,
}

impl TensorialCurvature {
    /// The same quantities expressed in another basis.
    pub fn in_basis(&self, fc: &FrameChange) -> Self {
        Self {
            riemann: fc.vector_valued_3(&self.riemann),
            ricci: fc.bilinear(&self.ricci),
            ricci_operator: fc.endomorphism(&self.ricci_operator),
            scalar: self.scalar,
            scalar_differential: fc.covector(self.scalar_differential),
            scalar_gradient: fc.vector(self.scalar_gradient),
            l_operator: fc.endomorphism(&self.l_operator),
            nabla_l: fc.vector_valued_2(&self.nabla_l),
            cotton: fc.vector_valued_2(&self.cotton),
            nabla_riemann: fc.vector_valued_4(&self.nabla_riemann),
        }
    }

    /// Largest absolute difference over all components.
    pub fn max_difference(&self, other: &Self) -> f64 {
        let a = self.flatten();
        let b = other.flatten();
        a.iter().zip(&b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(400);
        out.extend(self.riemann.iter().flat_map(|x| x.as_flattened().as_flattened().to_vec()));
        out.extend_from_slice(self.ricci.as_flattened());
        out.extend_from_slice(self.ricci_operator.as_flattened());
        out.push(self.scalar);
        out.extend_from_slice(&self.scalar_differential);
        out.extend_from_slice(&self.scalar_gradient);
        out.extend_from_slice(self.l_operator.as_flattened());
        out.extend_from_slice(self.nabla_l.as_flattened().as_flattened());
        out.extend_from_slice(self.cotton.as_flattened().as_flattened());
        for x in &self.nabla_riemann {
            for y in x {
                out.extend_from_slice(y.as_flattened().as_flattened());
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureData {
    /// `christoffel[a][b][m]` = m-th component of `∇_{E_a}E_b` in the working frame.
    pub christoffel: Tensor3,
    /// Working-frame components.
    pub tensors: TensorialCurvature,
    /// Same quantities in the φ-basis (or the fallback orthonormal frame).
    pub orthonormal: TensorialCurvature,
    /// Max Euclidean norm of `(∇_{e_l}R)(e_i,e_j)e_k` over orthonormal-frame tuples.
    pub nabla_riemann_norm: f64,
}

/// Structure tensors at one point, working-frame components.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureData {
    /// `phi[b][m]` = m-th component of `φ E_b`.
    pub phi: Mat3,
    pub xi: Vec3,
    pub eta: Vec3,
    /// `nabla_xi[a][m]` = m-th component of `∇_{E_a} ξ`.
    pub nabla_xi: Mat3,
    /// `nabla_phi[a][b][m]` = m-th component of `(∇_{E_a}φ)E_b`.
    pub nabla_phi: Tensor3,
    /// `(∇_{E_a}η)(E_b)`.
    pub nabla_eta: Mat3,
    /// `dη(E_a,E_b)` with the ½ convention.
    pub d_eta: Mat3,
    /// `nijenhuis[a][b][m]` = m-th component of `N^(1)(E_a,E_b)`.
    pub nijenhuis: Tensor3,
    /// `lie_xi_phi[a][m]` = m-th component of `(𝓛_ξ φ)E_a`.
    pub lie_xi_phi: Mat3,
    pub alpha: f64,
    pub beta: f64,
    pub d_alpha: Vec3,
    pub grad_alpha: Vec3,
    pub d_beta: Vec3,
    pub grad_beta: Vec3,
    /// `(∇_{E_a} dβ)(E_b)`.
    pub hess_beta: Mat3,
    /// `[a][m]` = m-th component of `∇_{E_a} grad β`.
    pub nabla_grad_beta: Mat3,
}

/// Engine self-consistency residuals, orthonormal-frame norms.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Diagnostics {
    pub metricity: f64,
    pub torsion: f64,
    pub first_bianchi: f64,
    pub second_bianchi: f64,
    /// `trace{Y ↦ (∇_Y Q)X} − ½ dτ(X)`.
    pub contracted_bianchi: f64,
    pub ricci_asymmetry: f64,
    pub ricci_operator_consistency: f64,
}

/// Every pointwise quantity the suites need.
#[derive(Debug, Clone, PartialEq)]
pub struct PointData {
    pub point: Vec3,
    pub metric: Mat3,
    pub metric_inverse: Mat3,
    pub curvature: CurvatureData,
    pub structure: StructureData,
    pub basis: PhiBasis,
    pub diagnostics: Diagnostics,
}

/// Computes all curvature and structure data of `m` at `p`.
pub fn evaluate_point(m: &ManifoldInstance, p: Vec3) -> Result<PointData, GeometryError> {
    let geo = JetGeometry::new(m.local_jets(p)?)?;
    assemble(&geo)
}

fn assemble(geo: &JetGeometry) -> Result<PointData, GeometryError> {
    let gamma = geo.gamma_values();
    let metric = mat_values(&geo.g);
    let metric_inverse = mat_values(&geo.ginv);
    let riemann: Tensor4 = geo.riemann.map(|x| x.map(|y| mat_values(&y)));
    let ricci = mat_values(&geo.ricci);
    let tau = geo.tau.value();
    let l_op = mat_values(&geo.l_op);
    let ricci_operator: Mat3 = std::array::from_fn(|b| {
        std::array::from_fn(|mm| l_op[b][mm] + if b == mm { 0.25 * tau } else { 0.0 })
    });
    let d_tau: Vec3 = std::array::from_fn(|a| d(&geo.tau, a).value());
    let grad_tau = raise(&metric_inverse, d_tau);

    let mut nabla_l = [[ZERO3; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            for mm in 0..3 {
                let mut s = d(&geo.l_op[b][mm], a).value();
                for k in 0..3 {
                    s += gamma[a][k][mm] * l_op[b][k] - gamma[a][b][k] * l_op[k][mm];
                }
                nabla_l[a][b][mm] = s;
            }
        }
    }
    let cotton: Tensor3 =
        std::array::from_fn(|a| std::array::from_fn(|b| std::array::from_fn(|mm| nabla_l[a][b][mm] - nabla_l[b][a][mm])));

    let mut nabla_riemann = [[[[ZERO3; 3]; 3]; 3]; 3];
    for l in 0..3 {
        for a in 0..3 {
            for b in 0..3 {
                for cc in 0..3 {
                    for mm in 0..3 {
                        let mut s = d(&geo.riemann[a][b][cc][mm], l).value();
                        for k in 0..3 {
                            s += gamma[l][k][mm] * riemann[a][b][cc][k]
                                - gamma[l][a][k] * riemann[k][b][cc][mm]
                                - gamma[l][b][k] * riemann[a][k][cc][mm]
                                - gamma[l][cc][k] * riemann[a][b][k][mm];
                        }
                        nabla_riemann[l][a][b][cc][mm] = s;
                    }
                }
            }
        }
    }

    let tensors = TensorialCurvature {
        riemann,
        ricci,
        ricci_operator,
        scalar: tau,
        scalar_differential: d_tau,
        scalar_gradient: grad_tau,
        l_operator: l_op,
        nabla_l,
        cotton,
        nabla_riemann,
    };

    let structure = structure_data(geo, &gamma);
    let basis = phi_basis_from(&metric, &structure.phi, structure.xi, structure.eta)
        .or_else(|_| PhiBasis::fallback(&metric))?;
    let fc = &basis.change;
    let orthonormal = tensors.in_basis(fc);
    let nabla_riemann_norm = max_vector_norm_5(&orthonormal.nabla_riemann);

    let diagnostics = diagnostics(geo, &gamma, &tensors, &orthonormal, fc);
    let finite = structure.nijenhuis.iter().flatten().flatten().all(|v| v.is_finite())
        && nabla_riemann_norm.is_finite()
        && structure.hess_beta.iter().flatten().all(|v| v.is_finite());
    if !finite {
        return Err(GeometryError::NonFinite("point data".into()));
    }
    Ok(PointData {
        point: geo.point,
        metric,
        metric_inverse,
        curvature: CurvatureData {
            christoffel: gamma,
            tensors,
            orthonormal,
            nabla_riemann_norm,
        },
        structure,
        basis,
        diagnostics,
    })
}

fn raise(ginv: &Mat3, w: Vec3) -> Vec3 {
    std::array::from_fn(|m| (0..3).map(|k| ginv[m][k] * w[k]).sum())
}

pub(crate) fn max_vector_norm(chunks: impl IntoIterator<Item = Vec3>) -> f64 {
    chunks.into_iter().fold(0.0, |m, v| m.max(crate::tensor::norm(v)))
}

fn max_vector_norm_5(t: &Tensor5) -> f64 {
    max_vector_norm(t.iter().flatten().flatten().flatten().copied())
}

fn structure_data(geo: &JetGeometry, gamma: &Tensor3) -> StructureData {
    let c = &geo.brackets;
    let phi = mat_values(&geo.phi);
    let xi = values(&geo.xi);
    let eta = values(&geo.eta);
    let nabla_xi = mat_values(&geo.nabla_xi);

    let mut nabla_phi = [[ZERO3; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            for m in 0..3 {
                let mut s = d(&geo.phi[b][m], a).value();
                for k in 0..3 {
                    s += gamma[a][k][m] * phi[b][k] - gamma[a][b][k] * phi[k][m];
                }
                nabla_phi[a][b][m] = s;
            }
        }
    }
    let mut nabla_eta = [[0.0; 3]; 3];
    let mut d_eta = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            let mut s = d(&geo.eta[b], a).value();
            let mut bracket = 0.0;
            for k in 0..3 {
                s -= gamma[a][b][k] * eta[k];
                bracket += c[a][b][k] * eta[k];
            }
            nabla_eta[a][b] = s;
            d_eta[a][b] = 0.5 * (d(&geo.eta[b], a).value() - d(&geo.eta[a], b).value() - bracket);
        }
    }

    // ∇_U V at p for U, V among E_b, φE_b and ξ: Σ_a U^a (E_a V^m + Γ_ak^m V^k)
    let cov_e = |b: usize| -> Mat3 { std::array::from_fn(|a| gamma[a][b]) };
    let cov_phi_e: [Mat3; 3] = std::array::from_fn(|b| mat_values(&geo.nabla_vector(&geo.phi[b])));
    let along = |u: Vec3, cov: &Mat3| -> Vec3 {
        let mut out = ZERO3;
        for a in 0..3 {
            for m in 0..3 {
                out[m] += u[a] * cov[a][m];
            }
        }
        out
    };
    use crate::tensor::{apply, sub, unit};
    let bracket = |u: Vec3, cov_v: &Mat3, v: Vec3, cov_u: &Mat3| sub(along(u, cov_v), along(v, cov_u));

    let mut nijenhuis = [[ZERO3; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            let (ea, eb) = (unit(a), unit(b));
            let (pa, pb) = (phi[a], phi[b]);
            let e_e = bracket(ea, &cov_e(b), eb, &cov_e(a));
            let p_p = bracket(pa, &cov_phi_e[b], pb, &cov_phi_e[a]);
            let p_e = bracket(pa, &cov_e(b), eb, &cov_phi_e[a]);
            let e_p = bracket(ea, &cov_phi_e[b], pb, &cov_e(a));
            let phi2 = apply(&phi, apply(&phi, e_e));
            for m in 0..3 {
                nijenhuis[a][b][m] =
                    phi2[m] + p_p[m] - apply(&phi, p_e)[m] - apply(&phi, e_p)[m] - 2.0 * d_eta[a][b] * xi[m];
            }
        }
    }
    let mut lie_xi_phi = [ZERO3; 3];
    for a in 0..3 {
        let xi_phi = bracket(xi, &cov_phi_e[a], phi[a], &nabla_xi);
        let xi_e = bracket(xi, &cov_e(a), unit(a), &nabla_xi);
        lie_xi_phi[a] = sub(xi_phi, apply(&phi, xi_e));
    }

    let d_beta_j: JVec = std::array::from_fn(|a| d(&geo.beta, a));
    let d_alpha_j: JVec = std::array::from_fn(|a| d(&geo.alpha, a));
    let grad_beta_j = geo.raise_jet(&d_beta_j);
    let grad_alpha_j = geo.raise_jet(&d_alpha_j);
    let (_, hess_beta) = geo.differential_and_hessian(&geo.beta);
    let nabla_grad_beta = mat_values(&geo.nabla_vector(&grad_beta_j));

    StructureData {
        phi,
        xi,
        eta,
        nabla_xi,
        nabla_phi,
        nabla_eta,
        d_eta,
        nijenhuis,
        lie_xi_phi,
        alpha: geo.alpha.value(),
        beta: geo.beta.value(),
        d_alpha: values(&d_alpha_j),
        grad_alpha: values(&grad_alpha_j),
        d_beta: values(&d_beta_j),
        grad_beta: values(&grad_beta_j),
        hess_beta,
        nabla_grad_beta,
    }
}

fn diagnostics(
    geo: &JetGeometry,
    gamma: &Tensor3,
    working: &TensorialCurvature,
    ortho: &TensorialCurvature,
    fc: &FrameChange,
) -> Diagnostics {
    let c = &geo.brackets;
    let g = mat_values(&geo.g);

    // (∇_a g)(E_b, E_c) and torsion, moved to the orthonormal frame
    let mut nabla_g = [[ZERO3; 3]; 3];
    let mut torsion = [[ZERO3; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            for cc in 0..3 {
                let mut s = d(&geo.g[b][cc], a).value();
                for k in 0..3 {
                    s -= gamma[a][b][k] * g[k][cc] + gamma[a][cc][k] * g[b][k];
                }
                nabla_g[a][b][cc] = s;
                torsion[a][b][cc] = gamma[a][b][cc] - gamma[b][a][cc] - c[a][b][cc];
            }
        }
    }
    let nabla_g_o = fc.tensor(nabla_g.as_flattened().as_flattened(), 3, false);
    let torsion_o = fc.vector_valued_2(&torsion);

    let r = &ortho.riemann;
    let nr = &ortho.nabla_riemann;
    let mut b1: f64 = 0.0;
    let mut b2: f64 = 0.0;
    for x in 0..3 {
        for y in 0..3 {
            for z in 0..3 {
                let v: Vec3 = std::array::from_fn(|m| r[x][y][z][m] + r[y][z][x][m] + r[z][x][y][m]);
                b1 = b1.max(crate::tensor::norm(v));
                for w in 0..3 {
                    let v: Vec3 =
                        std::array::from_fn(|m| nr[x][y][z][w][m] + nr[y][z][x][w][m] + nr[z][x][y][w][m]);
                    b2 = b2.max(crate::tensor::norm(v));
                }
            }
        }
    }

    // trace{Y ↦ (∇_Y Q)X} with ∇Q = ∇L + ¼ dτ ⊗ Id
    let mut contracted = ZERO3;
    for b in 0..3 {
        let mut s = 0.25 * working.scalar_differential[b];
        for a in 0..3 {
            s += working.nabla_l[a][b][a];
        }
        contracted[b] = s - 0.5 * working.scalar_differential[b];
    }
    let contracted = fc.covector(contracted);

    let s = &ortho.ricci;
    let ricci_asymmetry = crate::tensor::max_abs((0..3).flat_map(|i| (0..3).map(move |j| s[i][j] - s[j][i])));
    // g(QX, Y) = S(X, Y), working frame then orthonormal
    let mut gq = [[0.0; 3]; 3];
    for x in 0..3 {
        for y in 0..3 {
            gq[x][y] = (0..3).map(|k| working.ricci_operator[x][k] * g[k][y]).sum::<f64>() - working.ricci[x][y];
        }
    }
    let gq = fc.bilinear(&gq);

    Diagnostics {
        metricity: crate::tensor::max_abs(nabla_g_o),
        torsion: max_vector_norm(torsion_o.iter().flatten().copied()),
        first_bianchi: b1,
        second_bianchi: b2,
        contracted_bianchi: crate::tensor::norm(contracted),
        ricci_asymmetry,
        ricci_operator_consistency: crate::tensor::max_abs(gq.as_flattened().iter().copied()),
    }
}

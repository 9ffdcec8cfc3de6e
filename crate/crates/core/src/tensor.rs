//! Fixed-size tensor components in three dimensions.
//!
//! Layout convention used throughout the crate: covariant (lower) slots come
//! first and the contravariant component, if any, comes last. So an
//! endomorphism `T` is stored as `t[b][m]` = m-th component of `T(E_b)`, and
//! the curvature as `r[a][b][c][m]` = m-th component of `R(E_a, E_b)E_c`.

use nalgebra::Matrix3;

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];
pub type Tensor3 = [[[f64; 3]; 3]; 3];
pub type Tensor4 = [[[[f64; 3]; 3]; 3]; 3];
pub type Tensor5 = [[[[[f64; 3]; 3]; 3]; 3]; 3];

pub const ZERO3: Vec3 = [0.0; 3];

pub fn unit(i: usize) -> Vec3 {
    let mut v = ZERO3;
    v[i] = 1.0;
    v
}

pub fn identity() -> Mat3 {
    [unit(0), unit(1), unit(2)]
}

pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn scale(k: f64, a: Vec3) -> Vec3 {
    [k * a[0], k * a[1], k * a[2]]
}

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

/// Linear combination `Σ k_i v_i`.
pub fn combine(terms: &[(f64, Vec3)]) -> Vec3 {
    terms
        .iter()
        .fold(ZERO3, |acc, (k, v)| add(acc, scale(*k, *v)))
}

/// `g(u, v)` for a bilinear form stored as `g[a][b]`.
pub fn bilinear(g: &Mat3, u: Vec3, v: Vec3) -> f64 {
    let mut s = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            s += g[a][b] * u[a] * v[b];
        }
    }
    s
}

/// `T(v)` for an endomorphism stored as `t[b][m]`.
pub fn apply(t: &Mat3, v: Vec3) -> Vec3 {
    let mut out = ZERO3;
    for b in 0..3 {
        for m in 0..3 {
            out[m] += t[b][m] * v[b];
        }
    }
    out
}

/// Composition `(S ∘ T)` in the endomorphism layout.
pub fn compose(s: &Mat3, t: &Mat3) -> Mat3 {
    let mut out = [ZERO3; 3];
    for b in 0..3 {
        out[b] = apply(s, t[b]);
    }
    out
}

/// Endomorphism trace.
pub fn trace(t: &Mat3) -> f64 {
    t[0][0] + t[1][1] + t[2][2]
}

/// Lowers the index of a vector.
pub fn flat(g: &Mat3, v: Vec3) -> Vec3 {
    let mut out = ZERO3;
    for a in 0..3 {
        for b in 0..3 {
            out[a] += g[a][b] * v[b];
        }
    }
    out
}

pub fn max_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn to_matrix(m: &Mat3) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| m[i][j])
}

pub fn from_matrix(m: &Matrix3<f64>) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]))
}

/// Change of components from the working frame `E_a` to a basis `e_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameChange {
    /// `vectors[i]` = working-frame components of `e_i`.
    pub vectors: [Vec3; 3],
    /// `inverse[a][i]` = i-th basis component of `E_a`.
    pub inverse: [Vec3; 3],
}

impl FrameChange {
    /// Returns `None` if the vectors are linearly dependent.
    pub fn new(vectors: [Vec3; 3]) -> Option<Self> {
        // columns of P are the basis vectors
        let p = Matrix3::from_fn(|a, i| vectors[i][a]);
        let det = p.determinant();
        if !det.is_finite() || det.abs() < 1e-14 {
            return None;
        }
        let inv = p.try_inverse()?;
        // inv[(i, a)] = i-th component of E_a
        let inverse = std::array::from_fn(|a| std::array::from_fn(|i| inv[(i, a)]));
        Some(Self { vectors, inverse })
    }

    /// Basis components of a vector given in the working frame.
    pub fn vector(&self, v: Vec3) -> Vec3 {
        let mut out = ZERO3;
        for (a, va) in v.iter().enumerate() {
            for i in 0..3 {
                out[i] += self.inverse[a][i] * va;
            }
        }
        out
    }

    /// Transforms a tensor with `lower` covariant slots and an optional
    /// contravariant component, stored flat in the crate's layout.
    pub fn tensor(&self, data: &[f64], lower: usize, upper: bool) -> Vec<f64> {
        let total = lower + usize::from(upper);
        assert_eq!(data.len(), 3usize.pow(total as u32));
        let mut current = data.to_vec();
        for slot in 0..total {
            let stride = 3usize.pow((total - slot - 1) as u32);
            let block = stride * 3;
            let mut next = vec![0.0; current.len()];
            let is_upper = upper && slot == total - 1;
            for base in (0..current.len()).step_by(block) {
                for rest in 0..stride {
                    for i in 0..3 {
                        let mut s = 0.0;
                        for a in 0..3 {
                            let coeff = if is_upper {
                                self.inverse[a][i]
                            } else {
                                self.vectors[i][a]
                            };
                            s += coeff * current[base + a * stride + rest];
                        }
                        next[base + i * stride + rest] = s;
                    }
                }
            }
            current = next;
        }
        current
    }

    pub fn covector(&self, w: Vec3) -> Vec3 {
        to_vec3(&self.tensor(&w, 1, false))
    }

    pub fn endomorphism(&self, t: &Mat3) -> Mat3 {
        to_mat3(&self.tensor(t.as_flattened(), 1, true))
    }

    pub fn bilinear(&self, b: &Mat3) -> Mat3 {
        to_mat3(&self.tensor(b.as_flattened(), 2, false))
    }

    /// (1,2) tensor in the layout `t[a][b][m]`.
    pub fn vector_valued_2(&self, t: &Tensor3) -> Tensor3 {
        to_tensor3(&self.tensor(t.as_flattened().as_flattened(), 2, true))
    }

    pub fn vector_valued_3(&self, t: &Tensor4) -> Tensor4 {
        let flat: Vec<f64> = t.iter().flat_map(|x| x.as_flattened().as_flattened().to_vec()).collect();
        to_tensor4(&self.tensor(&flat, 3, true))
    }

    pub fn vector_valued_4(&self, t: &Tensor5) -> Tensor5 {
        let flat: Vec<f64> = t
            .iter()
            .flat_map(|x| x.iter().flat_map(|y| y.as_flattened().as_flattened().to_vec()))
            .collect();
        let out = self.tensor(&flat, 4, true);
        std::array::from_fn(|l| to_tensor4(&out[l * 81..(l + 1) * 81]))
    }
}

pub fn to_vec3(s: &[f64]) -> Vec3 {
    std::array::from_fn(|i| s[i])
}

pub fn to_mat3(s: &[f64]) -> Mat3 {
    std::array::from_fn(|i| to_vec3(&s[3 * i..]))
}

pub fn to_tensor3(s: &[f64]) -> Tensor3 {
    std::array::from_fn(|i| to_mat3(&s[9 * i..]))
}

pub fn to_tensor4(s: &[f64]) -> Tensor4 {
    std::array::from_fn(|i| to_tensor3(&s[27 * i..]))
}

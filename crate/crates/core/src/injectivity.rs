//! Compatibility of exponents and control points, and the resulting
//! certificates that a patch is injective for every choice of weights.
//!
//! The Jacobian of G_k(x) = Σ_i k_i x^{y_i} z_i is also provided in two forms:
//! the Cauchy–Binet expansion over n-subsets and the direct determinant. They
//! are used to cross-check the combinatorial verdict numerically.

use itertools::Itertools;
use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blending::ControlPoints;
use crate::geometry::{all_integral, orientation_unchecked, GeometryError, PointConfig};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InjectivityError {
    #[error("{exponents} exponents but {controls} control points")]
    SizeMismatch { exponents: usize, controls: usize },
    #[error("control points live in R^{found}, expected R^{expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("projection is not defined at control point {0}")]
    ProjectionUndefined(usize),
    #[error("control point {0} lies on the other side of a projection center")]
    ProjectionSideChange(usize),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CompatibilityStatus {
    Compatible,
    Incompatible,
    AllDegenerate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompatibilityVerdict {
    pub status: CompatibilityStatus,
    /// Common sign of all nonzero products (when compatible).
    pub global_sign: Option<i32>,
    /// First subset with a nonzero product and the first subset of opposite sign.
    pub witness: Option<(Vec<usize>, Vec<usize>)>,
}

impl CompatibilityVerdict {
    pub fn is_compatible(&self) -> bool {
        self.status == CompatibilityStatus::Compatible
    }
}

/// Orientation product s_I = or(𝒜_I)·or(ℬ_I) for one (d+1)-subset.
pub fn subset_sign(a: &[&[f64]], b: &[&[f64]], subset: &[usize], eps: f64) -> i32 {
    let ai: Vec<&[f64]> = subset.iter().map(|&i| a[i]).collect();
    let oa = orientation_unchecked(&ai, eps).value();
    if oa == 0 {
        return 0;
    }
    let bi: Vec<&[f64]> = subset.iter().map(|&i| b[i]).collect();
    oa * orientation_unchecked(&bi, eps).value()
}

/// Enumerates every (d+1)-subset in lexicographic order.
pub fn compatibility<B: AsRef<[f64]>>(
    a: &PointConfig,
    b: &[B],
) -> Result<CompatibilityVerdict, InjectivityError> {
    if a.len() != b.len() {
        return Err(InjectivityError::SizeMismatch {
            exponents: a.len(),
            controls: b.len(),
        });
    }
    let d = a.dim();
    if let Some(p) = b.iter().find(|p| p.as_ref().len() != d) {
        return Err(InjectivityError::DimensionMismatch {
            expected: d,
            found: p.as_ref().len(),
        });
    }
    let ar = a.point_refs();
    let br: Vec<&[f64]> = b.iter().map(|p| p.as_ref()).collect();
    let eps = a.eps();
    let mut first: Option<(Vec<usize>, i32)> = None;
    for subset in (0..a.len()).combinations(d + 1) {
        let s = subset_sign(&ar, &br, &subset, eps);
        if s == 0 {
            continue;
        }
        match &first {
            None => first = Some((subset, s)),
            Some((i, s0)) if *s0 != s => {
                return Ok(CompatibilityVerdict {
                    status: CompatibilityStatus::Incompatible,
                    global_sign: None,
                    witness: Some((i.clone(), subset)),
                });
            }
            _ => {}
        }
    }
    Ok(match first {
        Some((_, s)) => CompatibilityVerdict {
            status: CompatibilityStatus::Compatible,
            global_sign: Some(s),
            witness: None,
        },
        None => CompatibilityVerdict {
            status: CompatibilityStatus::AllDegenerate,
            global_sign: None,
            witness: None,
        },
    })
}

/// Compatible ⇔ F_w is injective for every positive weight vector w.
pub fn certify_all_weights_injective(
    a: &PointConfig,
    b: &ControlPoints,
) -> Result<CompatibilityVerdict, InjectivityError> {
    if b.ambient_dim() != a.dim() {
        return Err(InjectivityError::DimensionMismatch {
            expected: a.dim(),
            found: b.ambient_dim(),
        });
    }
    compatibility(a, b.points())
}

/// One step of a projection ℝ^k ⇢ ℝ^{k−1} onto the hyperplane x_k = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectionCenter {
    /// Center at infinity: project along this direction (last entry nonzero).
    Direction(Vec<f64>),
    /// Finite center p (last entry nonzero): x ↦ line px ∩ {x_k = 0}.
    Point(Vec<f64>),
}

/// A map ℝ^n ⇢ ℝ^d applied to control points.
///
/// JSON forms: `{"affine": {"matrix": [[..]], "offset": [..]}}` and
/// `{"centers": [{"point": [..]}, {"direction": [..]}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Projection {
    /// x ↦ M x + c, with M a d×n matrix given by rows. A missing offset is zero.
    Affine {
        matrix: Vec<Vec<f64>>,
        #[serde(default)]
        offset: Vec<f64>,
    },
    /// A sequence of projections from points, each dropping one dimension.
    Centers(Vec<ProjectionCenter>),
}

impl Projection {
    /// Coordinate deletion keeping the listed coordinates.
    pub fn coordinates(n: usize, keep: &[usize]) -> Self {
        let matrix = keep
            .iter()
            .map(|&k| (0..n).map(|j| if j == k { 1.0 } else { 0.0 }).collect())
            .collect();
        Projection::Affine {
            matrix,
            offset: vec![0.0; keep.len()],
        }
    }

    /// Builds the composed map from a list of centers.
    pub fn from_centers(centers: Vec<ProjectionCenter>) -> Self {
        Projection::Centers(centers)
    }

    pub fn apply(&self, points: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, InjectivityError> {
        match self {
            Projection::Affine { matrix, offset } => points
                .iter()
                .enumerate()
                .map(|(i, x)| {
                    if matrix.iter().any(|row| row.len() != x.len()) {
                        return Err(InjectivityError::ProjectionUndefined(i));
                    }
                    Ok(matrix
                        .iter()
                        .enumerate()
                        .map(|(r, row)| {
                            let c = offset.get(r).copied().unwrap_or(0.0);
                            row.iter().zip(x).map(|(m, v)| m * v).sum::<f64>() + c
                        })
                        .collect())
                })
                .collect(),
            Projection::Centers(centers) => {
                let mut cur = points.to_vec();
                for center in centers {
                    cur = project_once(center, &cur)?;
                }
                Ok(cur)
            }
        }
    }
}

fn project_once(
    center: &ProjectionCenter,
    points: &[Vec<f64>],
) -> Result<Vec<Vec<f64>>, InjectivityError> {
    let mut side = 0.0f64;
    points
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let k = x.len() - 1;
            match center {
                ProjectionCenter::Direction(u) => {
                    if u.len() != x.len() || u[k] == 0.0 {
                        return Err(InjectivityError::ProjectionUndefined(i));
                    }
                    let s = x[k] / u[k];
                    Ok((0..k).map(|j| x[j] - s * u[j]).collect())
                }
                ProjectionCenter::Point(p) => {
                    if p.len() != x.len() || p[k] == 0.0 || p[k] == x[k] {
                        return Err(InjectivityError::ProjectionUndefined(i));
                    }
                    // all points must sit on one side of the plane through p parallel to x_k = 0
                    let this = (p[k] - x[k]).signum();
                    if side == 0.0 {
                        side = this;
                    } else if side != this {
                        return Err(InjectivityError::ProjectionSideChange(i));
                    }
                    let s = p[k] / (p[k] - x[k]);
                    Ok((0..k).map(|j| p[j] + s * (x[j] - p[j])).collect())
                }
            }
        })
        .collect()
}

/// Compatible ⇒ F: Δ → ℝ^n is injective. Anything else is inconclusive.
pub fn projected_injectivity(
    a: &PointConfig,
    b: &ControlPoints,
    proj: &Projection,
) -> Result<CompatibilityVerdict, InjectivityError> {
    let projected = proj.apply(b.points())?;
    compatibility(a, &projected)
}

/// Determinant of the n×n matrix with the given vectors as columns.
pub fn minor(vectors: &[&[f64]]) -> f64 {
    let n = vectors.len();
    if n == 0 {
        return 1.0;
    }
    if all_integral(vectors.iter().copied()) {
        let rows: Vec<Vec<i128>> = (0..n)
            .map(|r| vectors.iter().map(|v| v[r] as i128).collect())
            .collect();
        return crate::geometry::det_i128(&rows) as f64;
    }
    DMatrix::from_fn(n, n, |r, c| vectors[c][r]).determinant()
}

fn monomial(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(xi, yi)| yi * xi.ln())
        .sum::<f64>()
        .exp()
}

/// det Jac(G_k)(x) = x^{−𝟙} Σ_{I} (Π_{i∈I} k_i x^{y_i}) Y_I Z_I.
pub fn jacobian_cb<P: AsRef<[f64]>>(y: &[P], z: &[P], k: &[f64], x: &[f64]) -> f64 {
    let n = x.len();
    let mono: Vec<f64> = y
        .iter()
        .zip(k)
        .map(|(yi, ki)| ki * monomial(x, yi.as_ref()))
        .collect();
    let inv: f64 = x.iter().map(|v| 1.0 / v).product();
    let sum: f64 = (0..y.len())
        .combinations(n)
        .map(|set| {
            let yi: Vec<&[f64]> = set.iter().map(|&i| y[i].as_ref()).collect();
            let zi: Vec<&[f64]> = set.iter().map(|&i| z[i].as_ref()).collect();
            let weight: f64 = set.iter().map(|&i| mono[i]).product();
            weight * minor(&yi) * minor(&zi)
        })
        .sum();
    inv * sum
}

/// G_k(x) = Σ_i k_i x^{y_i} z_i.
pub fn g_map<P: AsRef<[f64]>>(y: &[P], z: &[P], k: &[f64], x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    for ((yi, zi), ki) in y.iter().zip(z).zip(k) {
        let c = ki * monomial(x, yi.as_ref());
        for (o, zv) in out.iter_mut().zip(zi.as_ref()) {
            *o += c * zv;
        }
    }
    out
}

/// Direct determinant of Jac(G_k)(x) = Σ_i k_i x^{y_i} z_i (y_i / x)ᵀ.
pub fn jacobian_direct<P: AsRef<[f64]>>(y: &[P], z: &[P], k: &[f64], x: &[f64]) -> f64 {
    let n = x.len();
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for ((yi, zi), ki) in y.iter().zip(z).zip(k) {
        let (yi, zi) = (yi.as_ref(), zi.as_ref());
        let c = ki * monomial(x, yi);
        for r in 0..n {
            for s in 0..n {
                jac[(r, s)] += c * zi[r] * yi[s] / x[s];
            }
        }
    }
    jac.determinant()
}

/// Signs found by probing det Jac(G_k) with k(K, t) at x = 𝟙 for every
/// n-subset K with Y_K Z_K ≠ 0. Returns the set of observed signs.
pub fn probe_signs<P: AsRef<[f64]>>(y: &[P], z: &[P]) -> Vec<i32> {
    let m = y.len();
    let n = y.first().map_or(0, |v| v.as_ref().len());
    let products: Vec<(Vec<usize>, f64)> = (0..m)
        .combinations(n)
        .map(|set| {
            let yi: Vec<&[f64]> = set.iter().map(|&i| y[i].as_ref()).collect();
            let zi: Vec<&[f64]> = set.iter().map(|&i| z[i].as_ref()).collect();
            let p = minor(&yi) * minor(&zi);
            (set, p)
        })
        .collect();
    let total: f64 = products.iter().map(|(_, p)| p.abs()).sum();
    let ones = vec![1.0; n];
    let mut signs = Vec::new();
    for (set, p) in &products {
        if *p == 0.0 {
            continue;
        }
        // t^n |Y_K Z_K| dominates t^{n−1} Σ_I |Y_I Z_I|
        let t = 2.0 * total / p.abs() + 2.0;
        let mut k = vec![1.0; m];
        for &j in set {
            k[j] = t;
        }
        let det = jacobian_direct(y, z, &k, &ones);
        let s = if det > 0.0 {
            1
        } else if det < 0.0 {
            -1
        } else {
            0
        };
        if s != 0 && !signs.contains(&s) {
            signs.push(s);
        }
    }
    signs.sort();
    signs
}

/// Samples random (k, x) plus the deterministic k(K, t) probes; true when all
/// nonzero Jacobian values share one sign.
pub fn sign_constancy_check<P: AsRef<[f64]>, R: Rng>(
    y: &[P],
    z: &[P],
    trials: usize,
    rng: &mut R,
) -> bool {
    let m = y.len();
    let n = y.first().map_or(0, |v| v.as_ref().len());
    let mut signs = probe_signs(y, z);
    for _ in 0..trials {
        let k: Vec<f64> = (0..m)
            .map(|_| (rng.gen_range(-3.0..3.0f64)).exp())
            .collect();
        let x: Vec<f64> = (0..n)
            .map(|_| (rng.gen_range(-1.0..1.0f64)).exp())
            .collect();
        let v = jacobian_cb(y, z, &k, &x);
        let s = if v > 0.0 {
            1
        } else if v < 0.0 {
            -1
        } else {
            0
        };
        if s != 0 && !signs.contains(&s) {
            signs.push(s);
        }
    }
    signs.len() <= 1
}

/// Homogenized vectors (1, p) used to pass from patches to G_k.
pub fn homogenized<P: AsRef<[f64]>>(points: &[P]) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|p| {
            std::iter::once(1.0)
                .chain(p.as_ref().iter().copied())
                .collect()
        })
        .collect()
}

//! Toric Bézier blending functions β_a(x) = Π_i h_i(x)^{h_i(a)} and the
//! patch map F(x) = Σ_a w_a β_a(x) b_a / Σ_a w_a β_a(x).
//!
//! Everything is evaluated in log space so that weights such as `t^λ(a)` with
//! large `t` do not overflow. Conventions at the boundary of Δ: `0^0 = 1` and
//! `0^s = 0` for `s > 0`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{convex_hull, GeometryError, PointConfig, Polytope};

/// Facet values in `[-BOUNDARY_TOL, 0)` are clamped onto the facet.
pub const BOUNDARY_TOL: f64 = 1e-12;
/// Tolerance on Σ z = 1 for [`SimplexPoint`].
pub const SIMPLEX_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BlendError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("point lies outside the domain polytope (facet {facet} has value {value})")]
    OutsideDomain { facet: usize, value: f64 },
    #[error("expected a {expected}-vector, got length {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("weight {index} is not strictly positive ({value})")]
    NonPositiveWeight { index: usize, value: f64 },
    #[error("not a point of the simplex: {0}")]
    NotInSimplex(String),
}

/// Positive weights w ∈ ℝ^𝒜_>, stored as natural logarithms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    log_w: Vec<f64>,
}

impl WeightVector {
    pub fn new(values: Vec<f64>) -> Result<Self, BlendError> {
        for (index, &value) in values.iter().enumerate() {
            if !(value > 0.0 && value.is_finite()) {
                return Err(BlendError::NonPositiveWeight { index, value });
            }
        }
        Ok(WeightVector {
            log_w: values.into_iter().map(f64::ln).collect(),
        })
    }

    pub fn from_log(log_w: Vec<f64>) -> Result<Self, BlendError> {
        for (index, &value) in log_w.iter().enumerate() {
            if !value.is_finite() {
                return Err(BlendError::NonPositiveWeight {
                    index,
                    value: value.exp(),
                });
            }
        }
        Ok(WeightVector { log_w })
    }

    pub fn ones(n: usize) -> Self {
        WeightVector {
            log_w: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.log_w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_w.is_empty()
    }

    pub fn log_values(&self) -> &[f64] {
        &self.log_w
    }

    /// Weights as plain numbers; may overflow to `inf` for extreme degenerations.
    pub fn values(&self) -> Vec<f64> {
        self.log_w.iter().map(|v| v.exp()).collect()
    }

    /// Coordinatewise product (w·w′).
    pub fn product(&self, other: &WeightVector) -> WeightVector {
        WeightVector {
            log_w: self
                .log_w
                .iter()
                .zip(&other.log_w)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Coordinatewise inverse 1/w.
    pub fn inverse(&self) -> WeightVector {
        WeightVector {
            log_w: self.log_w.iter().map(|v| -v).collect(),
        }
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<(), BlendError> {
        if self.len() != n {
            return Err(BlendError::LengthMismatch {
                expected: n,
                found: self.len(),
            });
        }
        Ok(())
    }
}

/// A point of the 𝒜-simplex: nonnegative coordinates summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexPoint(Vec<f64>);

/// Blending vectors live in the 𝒜-simplex.
pub type BlendingVector = SimplexPoint;

impl SimplexPoint {
    pub fn new(z: Vec<f64>) -> Result<Self, BlendError> {
        if z.iter().any(|&c| !c.is_finite() || c < 0.0) {
            return Err(BlendError::NotInSimplex(
                "negative or non-finite coordinate".into(),
            ));
        }
        let s: f64 = z.iter().sum();
        if (s - 1.0).abs() > SIMPLEX_TOL {
            return Err(BlendError::NotInSimplex(format!("coordinates sum to {s}")));
        }
        Ok(SimplexPoint(z))
    }

    /// Normalizes a nonzero nonnegative vector `[z]`.
    pub fn from_unnormalized(z: Vec<f64>) -> Result<Self, BlendError> {
        if z.iter().any(|&c| !c.is_finite() || c < 0.0) {
            return Err(BlendError::NotInSimplex(
                "negative or non-finite coordinate".into(),
            ));
        }
        let s: f64 = z.iter().sum();
        if s <= 0.0 {
            return Err(BlendError::NotInSimplex("zero vector".into()));
        }
        Ok(SimplexPoint(z.into_iter().map(|c| c / s).collect()))
    }

    /// `[exp(l_a)]`, with `-inf` entries mapping to exact zeros.
    pub fn from_log(logs: &[f64]) -> Result<Self, BlendError> {
        let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return Err(BlendError::NotInSimplex("all coordinates vanish".into()));
        }
        let raw: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
        Self::from_unnormalized(raw)
    }

    /// Indicator vector e_i.
    pub fn vertex(n: usize, i: usize) -> Self {
        let mut z = vec![0.0; n];
        z[i] = 1.0;
        SimplexPoint(z)
    }

    pub fn uniform(n: usize) -> Self {
        SimplexPoint(vec![1.0 / n as f64; n])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl AsRef<[f64]> for SimplexPoint {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Control points ℬ = {b_a} ⊂ ℝ^n, one per element of 𝒜.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlPoints {
    points: Vec<Vec<f64>>,
    ambient_dim: usize,
}

impl ControlPoints {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self, BlendError> {
        let ambient_dim = points.first().map_or(0, Vec::len);
        for p in &points {
            if p.len() != ambient_dim {
                return Err(BlendError::LengthMismatch {
                    expected: ambient_dim,
                    found: p.len(),
                });
            }
        }
        Ok(ControlPoints {
            points,
            ambient_dim,
        })
    }

    /// b_a = a.
    pub fn tautological(config: &PointConfig) -> Self {
        ControlPoints {
            points: config.points().to_vec(),
            ambient_dim: config.dim(),
        }
    }

    /// b_a = e_a ∈ ℝ^𝒜.
    pub fn indicators(n: usize) -> Self {
        ControlPoints {
            points: (0..n)
                .map(|i| SimplexPoint::vertex(n, i).into_inner())
                .collect(),
            ambient_dim: n,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    /// π_ℬ(z) = Σ_a z_a b_a.
    pub fn project(&self, z: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.ambient_dim];
        for (za, b) in z.iter().zip(&self.points) {
            if *za != 0.0 {
                for (o, bi) in out.iter_mut().zip(b) {
                    *o += za * bi;
                }
            }
        }
        out
    }

    /// max_a ‖b_a‖.
    pub fn max_norm(&self) -> f64 {
        self.points
            .iter()
            .map(|p| crate::geometry::norm(p))
            .fold(0.0, f64::max)
    }
}

/// A toric patch shape: the exponents 𝒜, the facet data of Δ, and the
/// exponent table h_i(a).
#[derive(Debug, Clone, PartialEq)]
pub struct ToricPatch {
    config: PointConfig,
    polytope: Polytope,
    /// `exponents[a][i] = h_i(a)`, with values below the config epsilon snapped to 0.
    exponents: Vec<Vec<f64>>,
}

impl ToricPatch {
    /// Uses the normalized hull facets of `config`.
    pub fn new(config: PointConfig) -> Result<Self, BlendError> {
        let polytope = convex_hull(&config)?;
        Ok(Self::with_polytope(config, polytope))
    }

    /// Uses caller-chosen facet data (any positive rescaling of the facets of Δ).
    pub fn with_polytope(config: PointConfig, polytope: Polytope) -> Self {
        let snap = if config.is_integral() { 0.0 } else { 1e-9 };
        let exponents = config
            .points()
            .iter()
            .map(|a| {
                polytope
                    .facets
                    .iter()
                    .map(|f| {
                        let h = f.eval(a);
                        if h.abs() <= snap || h < 0.0 {
                            0.0
                        } else {
                            h
                        }
                    })
                    .collect()
            })
            .collect();
        ToricPatch {
            config,
            polytope,
            exponents,
        }
    }

    pub fn config(&self) -> &PointConfig {
        &self.config
    }

    pub fn polytope(&self) -> &Polytope {
        &self.polytope
    }

    pub fn dim(&self) -> usize {
        self.config.dim()
    }

    pub fn len(&self) -> usize {
        self.config.len()
    }

    pub fn is_empty(&self) -> bool {
        self.config.is_empty()
    }

    /// h_i(a) for every facet i.
    pub fn exponents(&self, a: usize) -> &[f64] {
        &self.exponents[a]
    }

    /// h_i(x), with tiny negatives clamped to zero.
    pub fn facet_values(&self, x: &[f64]) -> Result<Vec<f64>, BlendError> {
        if x.len() != self.dim() {
            return Err(BlendError::LengthMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        self.polytope
            .facets
            .iter()
            .enumerate()
            .map(|(facet, f)| {
                let value = f.eval(x);
                if value >= 0.0 {
                    Ok(value)
                } else if value >= -BOUNDARY_TOL {
                    Ok(0.0)
                } else {
                    Err(BlendError::OutsideDomain { facet, value })
                }
            })
            .collect()
    }

    /// ln β_a(x); `-inf` where β_a vanishes.
    pub fn log_basis(&self, x: &[f64]) -> Result<Vec<f64>, BlendError> {
        let h = self.facet_values(x)?;
        let logs: Vec<f64> = h.iter().map(|v| v.ln()).collect();
        Ok(self
            .exponents
            .iter()
            .map(|ex| {
                ex.iter().zip(&logs).fold(
                    0.0,
                    |acc, (&e, &l)| {
                        if e == 0.0 {
                            acc
                        } else {
                            acc + e * l
                        }
                    },
                )
            })
            .collect())
    }

    /// Unnormalized toric Bézier functions β_a(x).
    pub fn toric_basis(&self, x: &[f64]) -> Result<Vec<f64>, BlendError> {
        Ok(self.log_basis(x)?.into_iter().map(f64::exp).collect())
    }

    /// [w_a β_a(x)] in the 𝒜-simplex.
    pub fn blend(&self, w: &WeightVector, x: &[f64]) -> Result<BlendingVector, BlendError> {
        w.check_len(self.len())?;
        let logs: Vec<f64> = self
            .log_basis(x)?
            .iter()
            .zip(w.log_values())
            .map(|(b, lw)| b + lw)
            .collect();
        SimplexPoint::from_log(&logs)
    }

    /// F(x) = Σ_a blend_a(x) b_a.
    pub fn patch_eval(
        &self,
        w: &WeightVector,
        controls: &ControlPoints,
        x: &[f64],
    ) -> Result<Vec<f64>, BlendError> {
        if controls.len() != self.len() {
            return Err(BlendError::LengthMismatch {
                expected: self.len(),
                found: controls.len(),
            });
        }
        Ok(controls.project(self.blend(w, x)?.coords()))
    }
}

/// Which classical Bézier family [`bernstein_weights`] targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BernsteinShape {
    /// 𝒜 = {0..m}, weights C(m, i).
    Curve,
    /// 𝒜 = m△ ∩ ℤ² in [`PointConfig::scaled_triangle`] order, multinomial weights.
    Triangle,
}

pub fn bernstein_weights(m: usize, shape: BernsteinShape) -> WeightVector {
    let values = match shape {
        BernsteinShape::Curve => (0..=m).map(|i| binomial(m, i)).collect(),
        BernsteinShape::Triangle => (0..=m)
            .flat_map(|i| (0..=m - i).map(move |j| multinomial(m, i, j)))
            .collect(),
    };
    WeightVector::new(values).expect("binomial coefficients are positive")
}

pub fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k)
        .fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
        .round()
}

/// m! / (i! j! (m−i−j)!).
pub fn multinomial(m: usize, i: usize, j: usize) -> f64 {
    binomial(m, i) * binomial(m - i, j)
}

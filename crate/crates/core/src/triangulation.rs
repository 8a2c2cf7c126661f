//! Regular triangulations induced by lifting functions, regularity
//! certificates via an exact linear program, and control polytopes.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blending::ControlPoints;
use crate::geometry::{
    convex_hull, orientation_unchecked, simplex_volume, GeometryError, Orientation, PointConfig,
};
use crate::lp::{self, LpOutcome, Rational};

/// Minimum LP slack accepted as strict on non-integral configurations.
pub const SLACK_TOL: f64 = 1e-9;
/// Relative tolerance when comparing total simplex volume with vol(Δ).
pub const VOLUME_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TriangulationError {
    #[error("lifting is not generic: point {point} lies on the upper facet through {simplex:?}")]
    NonGenericLifting { simplex: Vec<usize>, point: usize },
    #[error("expected {expected} lifting values, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("lifting value {0} is not finite")]
    NonFinite(usize),
    #[error("invalid triangulation: {0}")]
    InvalidTriangulation(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// λ: 𝒜 → ℝ, indexed like the configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LiftingFunction {
    values: Vec<f64>,
}

impl LiftingFunction {
    pub fn new(values: Vec<f64>) -> Result<Self, TriangulationError> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(TriangulationError::NonFinite(i));
        }
        Ok(LiftingFunction { values })
    }

    pub fn zeros(n: usize) -> Self {
        LiftingFunction {
            values: vec![0.0; n],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// max λ − min λ.
    pub fn spread(&self) -> f64 {
        let (lo, hi) = self
            .values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        if self.values.is_empty() {
            0.0
        } else {
            hi - lo
        }
    }

    fn check_len(&self, n: usize) -> Result<(), TriangulationError> {
        if self.len() != n {
            return Err(TriangulationError::LengthMismatch {
                expected: n,
                found: self.len(),
            });
        }
        Ok(())
    }
}

/// A set of (d+1)-subsets of 𝒜-indices, stored sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<Vec<usize>>", into = "Vec<Vec<usize>>")]
pub struct Triangulation {
    simplices: Vec<Vec<usize>>,
}

impl From<Vec<Vec<usize>>> for Triangulation {
    fn from(simplices: Vec<Vec<usize>>) -> Self {
        Triangulation::new(simplices)
    }
}

impl From<Triangulation> for Vec<Vec<usize>> {
    fn from(t: Triangulation) -> Self {
        t.simplices
    }
}

impl Triangulation {
    pub fn new(simplices: Vec<Vec<usize>>) -> Self {
        let mut simplices: Vec<Vec<usize>> = simplices
            .into_iter()
            .map(|mut s| {
                s.sort_unstable();
                s
            })
            .collect();
        simplices.sort();
        simplices.dedup();
        Triangulation { simplices }
    }

    pub fn simplices(&self) -> &[Vec<usize>] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// Indices appearing as a vertex of some simplex, sorted.
    pub fn used_points(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.simplices.iter().flatten().copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Images of the simplices of a triangulation under a ↦ b_a.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplicialComplexEmbedding {
    pub simplices: Vec<Vec<Vec<f64>>>,
    pub combinatorics: Triangulation,
}

impl SimplicialComplexEmbedding {
    pub fn ambient_dim(&self) -> usize {
        self.simplices
            .first()
            .and_then(|s| s.first())
            .map_or(0, Vec::len)
    }
}

fn rational_point(p: &[f64]) -> Vec<Rational> {
    p.iter().map(|&c| lp::rational(c)).collect()
}

/// Projects the upper facets of conv{(a, λ(a))}. Exact rational arithmetic.
pub fn regular_triangulation(
    config: &PointConfig,
    lambda: &LiftingFunction,
) -> Result<Triangulation, TriangulationError> {
    lambda.check_len(config.len())?;
    let d = config.dim();
    let pts: Vec<Vec<Rational>> = config.points().iter().map(|p| rational_point(p)).collect();
    let lift: Vec<Rational> = lambda.values().iter().map(|&v| lp::rational(v)).collect();
    let mut simplices = Vec::new();
    'subsets: for subset in (0..config.len()).combinations(d + 1) {
        // affine function h(x) = c·x + c0 interpolating λ on the subset
        let rows: Vec<Vec<Rational>> = subset
            .iter()
            .map(|&i| {
                let mut r = pts[i].clone();
                r.push(Rational::from_integer(1.into()));
                r
            })
            .collect();
        let rhs: Vec<Rational> = subset.iter().map(|&i| lift[i].clone()).collect();
        let Some(coef) = lp::solve(&rows, &rhs) else {
            continue;
        };
        let mut on_plane = None;
        for (j, p) in pts.iter().enumerate() {
            if subset.contains(&j) {
                continue;
            }
            let h = p
                .iter()
                .zip(&coef)
                .fold(coef[d].clone(), |acc, (x, c)| acc + x * c);
            let gap = &lift[j] - h;
            if gap.is_positive() {
                continue 'subsets;
            }
            if gap.is_zero() && on_plane.is_none() {
                on_plane = Some(j);
            }
        }
        if let Some(point) = on_plane {
            return Err(TriangulationError::NonGenericLifting {
                simplex: subset,
                point,
            });
        }
        simplices.push(subset);
    }
    Ok(Triangulation::new(simplices))
}

/// λ′(a) = λ(a) + ε·index(a)², ε = 1e−7·spread(λ), or 1e−7 when λ is flat.
pub fn perturb_lifting(lambda: &LiftingFunction, _config: &PointConfig) -> LiftingFunction {
    let spread = lambda.spread();
    let eps = 1e-7 * if spread > 0.0 { spread } else { 1.0 };
    LiftingFunction {
        values: lambda
            .values()
            .iter()
            .enumerate()
            .map(|(i, v)| v + eps * (i * i) as f64)
            .collect(),
    }
}

/// Retries with [`perturb_lifting`] while the lifting is not generic.
/// Returns the triangulation together with the lifting that produced it.
pub fn regular_triangulation_generic(
    config: &PointConfig,
    lambda: &LiftingFunction,
) -> Result<(Triangulation, LiftingFunction), TriangulationError> {
    let mut current = lambda.clone();
    for _ in 0..8 {
        match regular_triangulation(config, &current) {
            Ok(t) => return Ok((t, current)),
            Err(TriangulationError::NonGenericLifting { .. }) => {
                current = perturb_lifting(&current, config);
            }
            Err(e) => return Err(e),
        }
    }
    regular_triangulation(config, &current).map(|t| (t, current))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityVerdict {
    pub regular: bool,
    /// A lifting inducing the triangulation, when regular.
    pub witness: Option<LiftingFunction>,
    /// Optimal minimum gap between lifted points and simplex hyperplanes (capped at 1).
    pub slack: f64,
}

/// Decides regularity by maximizing the minimum lift-below slack s ≤ 1.
pub fn is_regular(
    config: &PointConfig,
    t: &Triangulation,
) -> Result<RegularityVerdict, TriangulationError> {
    validate(config, t)?;
    let n = config.len();
    let d = config.dim();
    let pts: Vec<Vec<Rational>> = config.points().iter().map(|p| rational_point(p)).collect();
    let one = Rational::from_integer(1.into());
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for s in t.simplices() {
        // columns of [s_j; 1]
        let m: Vec<Vec<Rational>> = (0..=d)
            .map(|r| {
                s.iter()
                    .map(|&j| {
                        if r < d {
                            pts[j][r].clone()
                        } else {
                            one.clone()
                        }
                    })
                    .collect()
            })
            .collect();
        for a in (0..n).filter(|a| !s.contains(a)) {
            let mut rhs = pts[a].clone();
            rhs.push(one.clone());
            let alpha = lp::solve(&m, &rhs).ok_or_else(|| {
                TriangulationError::InvalidTriangulation(format!("simplex {s:?} is degenerate"))
            })?;
            let mut row = vec![Rational::zero(); n + 1];
            row[a] += &one;
            for (&j, al) in s.iter().zip(&alpha) {
                row[j] -= al;
            }
            row[n] = one.clone();
            rows.push(row);
        }
    }
    let mut cap = vec![Rational::zero(); n + 1];
    cap[n] = one.clone();
    rows.push(cap);
    let mut b = vec![Rational::zero(); rows.len()];
    *b.last_mut().unwrap() = one.clone();
    let mut c = vec![Rational::zero(); n + 1];
    c[n] = one;
    let (x, value) = match lp::maximize(&c, &rows, &b) {
        LpOutcome::Optimal { x, value } => (x, value),
        LpOutcome::Unbounded => unreachable!("slack is capped at 1"),
    };
    let slack = lp::to_f64(&value);
    let regular = if config.is_integral() {
        value.is_positive()
    } else {
        slack > SLACK_TOL
    };
    let witness = regular.then(|| LiftingFunction {
        values: x[..n].iter().map(lp::to_f64).collect(),
    });
    Ok(RegularityVerdict {
        regular,
        witness,
        slack,
    })
}

/// Volumes of the simplices of `t`, in order.
pub fn simplex_volumes(config: &PointConfig, t: &Triangulation) -> Vec<f64> {
    t.simplices()
        .iter()
        .map(|s| {
            let pts: Vec<&[f64]> = s.iter().map(|&i| config.point(i)).collect();
            simplex_volume(&pts)
        })
        .collect()
}

/// Checks that `t` is a triangulation of conv(𝒜) with vertices in 𝒜.
pub fn validate(config: &PointConfig, t: &Triangulation) -> Result<(), TriangulationError> {
    let invalid = |m: String| Err(TriangulationError::InvalidTriangulation(m));
    let d = config.dim();
    let n = config.len();
    let eps = config.eps();
    if t.is_empty() {
        return invalid("no simplices".into());
    }
    for s in t.simplices() {
        if s.len() != d + 1 || s.windows(2).any(|w| w[0] == w[1]) || s.iter().any(|&i| i >= n) {
            return invalid(format!("{s:?} is not a {d}-simplex of the configuration"));
        }
        let pts: Vec<&[f64]> = s.iter().map(|&i| config.point(i)).collect();
        if orientation_unchecked(&pts, eps) == Orientation::Degenerate {
            return invalid(format!("simplex {s:?} is degenerate"));
        }
    }

    let side = |facet: &[usize], v: &[f64]| -> i32 {
        let mut pts: Vec<&[f64]> = facet.iter().map(|&i| config.point(i)).collect();
        pts.push(v);
        orientation_unchecked(&pts, eps).value()
    };
    let mut facets: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for s in t.simplices() {
        for (k, &opposite) in s.iter().enumerate() {
            let f: Vec<usize> = s
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, &i)| i)
                .collect();
            facets.entry(f).or_default().push(opposite);
        }
    }
    for (f, opp) in &facets {
        match opp.as_slice() {
            [a, b] => {
                if side(f, config.point(*a)) * side(f, config.point(*b)) >= 0 {
                    return invalid(format!("simplices on facet {f:?} overlap"));
                }
            }
            [a] => {
                let s0 = side(f, config.point(*a));
                if config.points().iter().any(|p| side(f, p) == -s0) {
                    return invalid(format!("facet {f:?} is interior but bounds one simplex"));
                }
            }
            _ => return invalid(format!("facet {f:?} is shared by {} simplices", opp.len())),
        }
    }

    let total: f64 = simplex_volumes(config, t).iter().sum();
    let hull = convex_hull(config)?.volume(config);
    if (total - hull).abs() > VOLUME_TOL * hull.max(1.0) {
        return invalid(format!(
            "simplex volumes sum to {total}, hull volume is {hull}"
        ));
    }

    let used = t.used_points();
    for s in t.simplices() {
        for &v in used.iter().filter(|v| !s.contains(v)) {
            let inside = s.iter().enumerate().all(|(k, &opposite)| {
                let f: Vec<usize> = s
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .map(|(_, &i)| i)
                    .collect();
                let sv = side(&f, config.point(v));
                sv == 0 || sv == side(&f, config.point(opposite))
            });
            if inside {
                return invalid(format!("vertex {v} lies in simplex {s:?}"));
            }
        }
    }
    Ok(())
}

/// The (possibly degenerate) simplicial complex with vertices b_a and the
/// combinatorics of `t`.
pub fn control_polytope(t: &Triangulation, controls: &ControlPoints) -> SimplicialComplexEmbedding {
    SimplicialComplexEmbedding {
        simplices: t
            .simplices()
            .iter()
            .map(|s| s.iter().map(|&i| controls.point(i).to_vec()).collect())
            .collect(),
        combinatorics: t.clone(),
    }
}

/// Geometric realization |𝒯| inside the 𝒜-simplex with `n` vertices.
pub fn realization_in_simplex(t: &Triangulation, n: usize) -> SimplicialComplexEmbedding {
    control_polytope(t, &ControlPoints::indicators(n))
}

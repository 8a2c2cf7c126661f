#![allow(clippy::needless_range_loop)]

//! Point configurations, convex hulls with facet inequalities, and orientation
//! predicates for d ≤ 3.
//!
//! Configurations whose coordinates are all integers take an exact `i128`
//! route for every sign decision. Real configurations use `f64` with a
//! per-configuration epsilon (default [`DEFAULT_EPS`]).

use std::cmp::Ordering;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Zero tolerance for orientation determinants on real inputs.
pub const DEFAULT_EPS: f64 = 1e-10;
/// Duplicate detection tolerance on real inputs.
pub const DUPLICATE_EPS: f64 = 1e-12;
/// Largest magnitude for which an `f64` coordinate is treated as an exact integer.
const MAX_EXACT: f64 = 9.007_199_254_740_992e15;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("dimension {0} is not supported (only 1, 2 and 3)")]
    DimensionUnsupported(usize),
    #[error("points do not affinely span R^{0}")]
    DegenerateSpan(usize),
    #[error("points {0} and {1} coincide")]
    DuplicatePoint(usize, usize),
    #[error("point {index} has {found} coordinates, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("expected {expected} points, got {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("non-finite coordinate in point {0}")]
    NonFinite(usize),
    #[error("configuration is empty")]
    Empty,
}

/// Returns `Some(i64)` when `v` is an integer representable exactly.
pub(crate) fn as_exact_int(v: f64) -> Option<i64> {
    if v.fract() == 0.0 && v.abs() <= MAX_EXACT {
        Some(v as i64)
    } else {
        None
    }
}

pub(crate) fn all_integral<'a>(pts: impl IntoIterator<Item = &'a [f64]>) -> bool {
    pts.into_iter()
        .all(|p| p.iter().all(|&c| as_exact_int(c).is_some()))
}

/// A finite set of exponents 𝒜 ⊂ ℝ^d that affinely spans ℝ^d.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConfig", into = "RawConfig")]
pub struct PointConfig {
    points: Vec<Vec<f64>>,
    dim: usize,
    integral: bool,
    eps: f64,
}

/// On-disk form: `{"dim": d, "points": [[...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawConfig {
    pub dim: usize,
    pub points: Vec<RawPoint>,
}

/// A point may be written as a bare number when `dim == 1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawPoint {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl From<RawPoint> for Vec<f64> {
    fn from(p: RawPoint) -> Self {
        match p {
            RawPoint::Scalar(v) => vec![v],
            RawPoint::Vector(v) => v,
        }
    }
}

impl TryFrom<RawConfig> for PointConfig {
    type Error = GeometryError;

    fn try_from(raw: RawConfig) -> Result<Self, Self::Error> {
        PointConfig::new(raw.dim, raw.points.into_iter().map(Vec::from).collect())
    }
}

impl From<PointConfig> for RawConfig {
    fn from(c: PointConfig) -> Self {
        RawConfig {
            dim: c.dim,
            points: c.points.into_iter().map(RawPoint::Vector).collect(),
        }
    }
}

impl PointConfig {
    pub fn new(dim: usize, points: Vec<Vec<f64>>) -> Result<Self, GeometryError> {
        Self::with_eps(dim, points, DEFAULT_EPS)
    }

    /// Like [`PointConfig::new`] with an explicit orientation epsilon for real inputs.
    pub fn with_eps(dim: usize, points: Vec<Vec<f64>>, eps: f64) -> Result<Self, GeometryError> {
        if !(1..=3).contains(&dim) {
            return Err(GeometryError::DimensionUnsupported(dim));
        }
        if points.is_empty() {
            return Err(GeometryError::Empty);
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(GeometryError::DimensionMismatch {
                    index: i,
                    expected: dim,
                    found: p.len(),
                });
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(GeometryError::NonFinite(i));
            }
        }
        let integral = all_integral(points.iter().map(Vec::as_slice));
        for (i, j) in (0..points.len()).tuple_combinations() {
            let same = if integral {
                points[i] == points[j]
            } else {
                points[i]
                    .iter()
                    .zip(&points[j])
                    .all(|(a, b)| (a - b).abs() <= DUPLICATE_EPS)
            };
            if same {
                return Err(GeometryError::DuplicatePoint(i, j));
            }
        }
        let config = PointConfig {
            points,
            dim,
            integral,
            eps,
        };
        if affine_rank(&config.point_refs(), integral, eps) != dim {
            return Err(GeometryError::DegenerateSpan(dim));
        }
        Ok(config)
    }

    /// 𝒜 = {0, 1, …, m} ⊂ ℝ¹.
    pub fn interval(m: usize) -> Result<Self, GeometryError> {
        Self::new(1, (0..=m).map(|i| vec![i as f64]).collect())
    }

    /// 𝒜 = m△ ∩ ℤ², ordered lexicographically by (i, j).
    pub fn scaled_triangle(m: usize) -> Result<Self, GeometryError> {
        let pts = (0..=m)
            .flat_map(|i| (0..=m - i).map(move |j| vec![i as f64, j as f64]))
            .collect();
        Self::new(2, pts)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub(crate) fn point_refs(&self) -> Vec<&[f64]> {
        self.points.iter().map(Vec::as_slice).collect()
    }

    /// True when every coordinate is an integer; sign tests are then exact.
    pub fn is_integral(&self) -> bool {
        self.integral
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Sub-configuration on the given indices (not re-validated for spanning).
    pub(crate) fn subset_points(&self, idx: &[usize]) -> Vec<Vec<f64>> {
        idx.iter().map(|&i| self.points[i].clone()).collect()
    }
}

/// Facet inequality h(x) = normal · x + offset ≥ 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Facet {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Facet {
    pub fn eval(&self, x: &[f64]) -> f64 {
        dot(&self.normal, x) + self.offset
    }
}

/// Convex hull Δ of a configuration, described by inward facet inequalities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polytope {
    pub facets: Vec<Facet>,
    /// Indices into the source configuration, sorted lexicographically by coordinates.
    pub vertices: Vec<usize>,
}

impl Polytope {
    pub fn facet_values(&self, x: &[f64]) -> Vec<f64> {
        self.facets.iter().map(|f| f.eval(x)).collect()
    }

    /// Whether `x` satisfies every facet inequality up to `tol`.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.facets.iter().all(|f| f.eval(x) >= -tol)
    }

    /// Indices of facets whose inequality is (numerically) tight at `x`.
    pub fn active_facets(&self, x: &[f64], tol: f64) -> Vec<usize> {
        self.facets
            .iter()
            .enumerate()
            .filter(|(_, f)| f.eval(x).abs() <= tol)
            .map(|(i, _)| i)
            .collect()
    }

    /// d-dimensional volume of Δ, computed by coning each facet from the
    /// vertex centroid.
    pub fn volume(&self, config: &PointConfig) -> f64 {
        let d = config.dim();
        let verts: Vec<&[f64]> = self.vertices.iter().map(|&i| config.point(i)).collect();
        let center = centroid(&verts);
        let tol = 1e-9;
        let mut total = 0.0;
        for f in &self.facets {
            let on: Vec<&[f64]> = verts
                .iter()
                .copied()
                .filter(|v| f.eval(v).abs() <= tol * (1.0 + norm(&f.normal)))
                .collect();
            match d {
                1 => total += (f.eval(&center) / norm(&f.normal)).abs(),
                2 => {
                    // a facet of a polygon is a segment between its two vertices
                    if on.len() >= 2 {
                        total += simplex_volume(&[&center, on[0], on[1]]);
                    }
                }
                _ => {
                    let fc = centroid(&on);
                    let ordered = order_around(&on, &fc, &f.normal);
                    for k in 0..ordered.len() {
                        let a = ordered[k];
                        let b = ordered[(k + 1) % ordered.len()];
                        total += simplex_volume(&[&center, &fc, a, b]);
                    }
                }
            }
        }
        total
    }
}

/// Orders coplanar 3-d points counterclockwise around `c` in the plane with normal `n`.
fn order_around<'a>(pts: &[&'a [f64]], c: &[f64], n: &[f64]) -> Vec<&'a [f64]> {
    let seed = [1.0, 0.0, 0.0];
    let alt = [0.0, 1.0, 0.0];
    let u0 = cross(n, &seed);
    let u = if norm(&u0) > 1e-6 { u0 } else { cross(n, &alt) };
    let v = cross(n, &u);
    let mut tagged: Vec<(f64, &'a [f64])> = pts
        .iter()
        .map(|p| {
            let r = sub(p, c);
            (dot(&r, &v).atan2(dot(&r, &u)), *p)
        })
        .collect();
    tagged.sort_by(|a, b| a.0.total_cmp(&b.0));
    tagged.into_iter().map(|(_, p)| p).collect()
}

/// Sign of det[p_1 − p_0, …, p_d − p_0].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Orientation {
    Negative,
    Degenerate,
    Positive,
}

impl Orientation {
    pub fn from_sign(s: i32) -> Self {
        match s.cmp(&0) {
            Ordering::Less => Orientation::Negative,
            Ordering::Equal => Orientation::Degenerate,
            Ordering::Greater => Orientation::Positive,
        }
    }

    pub fn value(self) -> i32 {
        match self {
            Orientation::Negative => -1,
            Orientation::Degenerate => 0,
            Orientation::Positive => 1,
        }
    }
}

/// Orientation of d+1 points in ℝ^d, exact on integer input.
pub fn orientation<P: AsRef<[f64]>>(points: &[P]) -> Result<Orientation, GeometryError> {
    orientation_with_eps(points, DEFAULT_EPS)
}

pub fn orientation_with_eps<P: AsRef<[f64]>>(
    points: &[P],
    eps: f64,
) -> Result<Orientation, GeometryError> {
    let Some(first) = points.first() else {
        return Err(GeometryError::ArityMismatch {
            expected: 2,
            found: 0,
        });
    };
    let d = first.as_ref().len();
    if points.len() != d + 1 {
        return Err(GeometryError::ArityMismatch {
            expected: d + 1,
            found: points.len(),
        });
    }
    for (i, p) in points.iter().enumerate() {
        if p.as_ref().len() != d {
            return Err(GeometryError::DimensionMismatch {
                index: i,
                expected: d,
                found: p.as_ref().len(),
            });
        }
    }
    let refs: Vec<&[f64]> = points.iter().map(|p| p.as_ref()).collect();
    Ok(orientation_unchecked(&refs, eps))
}

pub(crate) fn orientation_unchecked(points: &[&[f64]], eps: f64) -> Orientation {
    if all_integral(points.iter().copied()) {
        let p0: Vec<i128> = points[0].iter().map(|&c| c as i128).collect();
        let rows: Vec<Vec<i128>> = points[1..]
            .iter()
            .map(|p| p.iter().zip(&p0).map(|(&c, &o)| c as i128 - o).collect())
            .collect();
        Orientation::from_sign(det_i128(&rows).signum() as i32)
    } else {
        let rows: Vec<Vec<f64>> = points[1..].iter().map(|p| sub(p, points[0])).collect();
        let det = det_f64(&rows);
        if det.abs() <= eps {
            Orientation::Degenerate
        } else if det > 0.0 {
            Orientation::Positive
        } else {
            Orientation::Negative
        }
    }
}

/// Convex hull with inward, normalized facets (see [`normalize_facets`]).
pub fn convex_hull(config: &PointConfig) -> Result<Polytope, GeometryError> {
    let d = config.dim();
    if d > 3 {
        return Err(GeometryError::DimensionUnsupported(d));
    }
    let raw = if config.is_integral() {
        hull_facets_exact(config)
    } else {
        hull_facets_float(config)
    };
    if raw.len() < d + 1 {
        return Err(GeometryError::DegenerateSpan(d));
    }
    let poly = Polytope {
        facets: raw,
        vertices: Vec::new(),
    };
    let mut poly = normalize_facets(&poly, config);
    poly.vertices = hull_vertices(config, &poly.facets);
    Ok(poly)
}

fn hull_facets_exact(config: &PointConfig) -> Vec<Facet> {
    let d = config.dim();
    let pts: Vec<Vec<i128>> = config
        .points()
        .iter()
        .map(|p| p.iter().map(|&c| c as i128).collect())
        .collect();
    let mut found: Vec<(Vec<i128>, i128)> = Vec::new();
    for subset in (0..pts.len()).combinations(d) {
        let base = &pts[subset[0]];
        let diffs: Vec<Vec<i128>> = subset[1..]
            .iter()
            .map(|&j| pts[j].iter().zip(base).map(|(a, b)| a - b).collect())
            .collect();
        let n = normal_i128(&diffs, d);
        if n.iter().all(|&c| c == 0) {
            continue;
        }
        let side = |p: &Vec<i128>| -> i128 {
            n.iter()
                .zip(p.iter().zip(base))
                .map(|(ni, (a, b))| ni * (a - b))
                .sum()
        };
        let (mut pos, mut neg) = (false, false);
        for p in &pts {
            match side(p).signum() {
                1 => pos = true,
                -1 => neg = true,
                _ => {}
            }
        }
        if pos && neg {
            continue;
        }
        let mut n = if neg {
            n.iter().map(|c| -c).collect()
        } else {
            n
        };
        let g = n.iter().fold(0i128, |g, &c| gcd(g, c)).max(1);
        for c in n.iter_mut() {
            *c /= g;
        }
        let c: i128 = -n.iter().zip(base).map(|(a, b)| a * b).sum::<i128>();
        if !found.iter().any(|(fn_, fc)| *fn_ == n && *fc == c) {
            found.push((n, c));
        }
    }
    found
        .into_iter()
        .map(|(n, c)| Facet {
            normal: n.into_iter().map(|v| v as f64).collect(),
            offset: c as f64,
        })
        .collect()
}

fn hull_facets_float(config: &PointConfig) -> Vec<Facet> {
    let d = config.dim();
    let pts = config.points();
    let scale = pts
        .iter()
        .flat_map(|p| p.iter())
        .fold(1.0f64, |m, c| m.max(c.abs()));
    let tol = config.eps() * scale;
    let mut found: Vec<Facet> = Vec::new();
    for subset in (0..pts.len()).combinations(d) {
        let base = &pts[subset[0]];
        let diffs: Vec<Vec<f64>> = subset[1..].iter().map(|&j| sub(&pts[j], base)).collect();
        let n = normal_f64(&diffs, d);
        let len = norm(&n);
        if len <= config.eps() {
            continue;
        }
        let n: Vec<f64> = n.iter().map(|c| c / len).collect();
        let (mut pos, mut neg) = (false, false);
        for p in pts {
            let s = dot(&n, &sub(p, base));
            if s > tol {
                pos = true;
            } else if s < -tol {
                neg = true;
            }
        }
        if pos && neg {
            continue;
        }
        let n: Vec<f64> = if neg {
            n.iter().map(|c| -c).collect()
        } else {
            n
        };
        let offset = -dot(&n, base);
        let dup = found.iter().any(|f| {
            (f.offset - offset).abs() <= 1e-9 * scale
                && f.normal.iter().zip(&n).all(|(a, b)| (a - b).abs() <= 1e-9)
        });
        if !dup {
            found.push(Facet { normal: n, offset });
        }
    }
    found
}

/// Normal to the hyperplane spanned by d−1 difference vectors (d ≤ 3).
fn normal_i128(diffs: &[Vec<i128>], d: usize) -> Vec<i128> {
    match d {
        1 => vec![1],
        2 => vec![-diffs[0][1], diffs[0][0]],
        _ => {
            let (u, v) = (&diffs[0], &diffs[1]);
            vec![
                u[1] * v[2] - u[2] * v[1],
                u[2] * v[0] - u[0] * v[2],
                u[0] * v[1] - u[1] * v[0],
            ]
        }
    }
}

fn normal_f64(diffs: &[Vec<f64>], d: usize) -> Vec<f64> {
    match d {
        1 => vec![1.0],
        2 => vec![-diffs[0][1], diffs[0][0]],
        _ => cross(&diffs[0], &diffs[1]),
    }
}

fn hull_vertices(config: &PointConfig, facets: &[Facet]) -> Vec<usize> {
    let d = config.dim();
    let tol = if config.is_integral() { 0.0 } else { 1e-9 };
    let mut verts: Vec<usize> = (0..config.len())
        .filter(|&i| {
            let p = config.point(i);
            let normals: Vec<&[f64]> = facets
                .iter()
                .filter(|f| f.eval(p).abs() <= tol)
                .map(|f| f.normal.as_slice())
                .collect();
            normals.len() >= d && linear_rank(&normals, 1e-9) == d
        })
        .collect();
    verts.sort_by(|&a, &b| lex_cmp(config.point(a), config.point(b)));
    verts
}

/// Rescales facet data: primitive integer normals when 𝒜 is integral,
/// unit normals otherwise. Facets come out sorted by (normal, offset).
pub fn normalize_facets(poly: &Polytope, config: &PointConfig) -> Polytope {
    let mut facets: Vec<Facet> = poly
        .facets
        .iter()
        .map(|f| {
            let scale = if config.is_integral() {
                primitive_scale(&f.normal)
            } else {
                1.0 / norm(&f.normal)
            };
            let mut nf = Facet {
                normal: f.normal.iter().map(|c| c * scale).collect(),
                offset: f.offset * scale,
            };
            if config.is_integral() {
                for c in nf.normal.iter_mut() {
                    *c = c.round();
                }
                if (nf.offset - nf.offset.round()).abs() < 1e-9 {
                    nf.offset = nf.offset.round();
                }
            }
            nf
        })
        .collect();
    facets.sort_by(|a, b| lex_cmp(&a.normal, &b.normal).then(a.offset.total_cmp(&b.offset)));
    Polytope {
        facets,
        vertices: poly.vertices.clone(),
    }
}

/// Positive factor turning a rational-direction vector into a primitive integer vector.
fn primitive_scale(v: &[f64]) -> f64 {
    let min_abs = v
        .iter()
        .map(|c| c.abs())
        .filter(|&c| c > 1e-12)
        .fold(f64::INFINITY, f64::min);
    let unit: Vec<f64> = v.iter().map(|c| c / min_abs).collect();
    for k in 1..=1000u32 {
        let scaled: Vec<f64> = unit.iter().map(|c| c * k as f64).collect();
        if scaled.iter().all(|c| (c - c.round()).abs() < 1e-9) {
            let g = scaled
                .iter()
                .fold(0i128, |g, c| gcd(g, c.round() as i128))
                .max(1);
            return k as f64 / (min_abs * g as f64);
        }
    }
    1.0 / norm(v)
}

// ---- small dense linear algebra ------------------------------------------

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub(crate) fn cross(u: &[f64], v: &[f64]) -> Vec<f64> {
    vec![
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ]
}

pub(crate) fn centroid(pts: &[&[f64]]) -> Vec<f64> {
    let d = pts[0].len();
    let mut c = vec![0.0; d];
    for p in pts {
        for (ci, pi) in c.iter_mut().zip(p.iter()) {
            *ci += pi;
        }
    }
    c.iter().map(|v| v / pts.len() as f64).collect()
}

pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| *o != Ordering::Equal)
        .unwrap_or(Ordering::Equal)
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Determinant by Gaussian elimination with partial pivoting.
pub(crate) fn det_f64(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len();
    if n == 0 {
        return 1.0;
    }
    let mut m: Vec<Vec<f64>> = rows.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap();
        if m[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        det *= m[col][col];
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
        }
    }
    det
}

/// Exact determinant by Bareiss fraction-free elimination.
pub(crate) fn det_i128(rows: &[Vec<i128>]) -> i128 {
    let n = rows.len();
    if n == 0 {
        return 1;
    }
    let mut m = rows.to_vec();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&r| m[r][k] != 0) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// Rank of a set of vectors (f64, relative tolerance).
pub(crate) fn linear_rank(vectors: &[&[f64]], tol: f64) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let cols = vectors[0].len();
    let mut m: Vec<Vec<f64>> = vectors.iter().map(|v| v.to_vec()).collect();
    let scale = m
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |a, c| a.max(c.abs()))
        .max(1e-300);
    let mut rank = 0;
    for col in 0..cols {
        let piv = (rank..m.len()).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()));
        let Some(piv) = piv else { break };
        if m[piv][col].abs() <= tol * scale {
            continue;
        }
        m.swap(piv, rank);
        for r in 0..m.len() {
            if r != rank {
                let f = m[r][col] / m[rank][col];
                for c in col..cols {
                    m[r][c] -= f * m[rank][c];
                }
            }
        }
        rank += 1;
    }
    rank
}

fn linear_rank_i128(vectors: &[Vec<i128>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let cols = vectors[0].len();
    let mut m = vectors.to_vec();
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(piv, rank);
        for r in rank + 1..m.len() {
            let (a, b) = (m[rank][col], m[r][col]);
            for c in col..cols {
                m[r][c] = m[r][c] * a - m[rank][c] * b;
            }
            let g = m[r].iter().fold(0i128, |g, &v| gcd(g, v.abs()));
            if g > 1 {
                for v in m[r].iter_mut() {
                    *v /= g;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Dimension of the affine span of `points`.
pub(crate) fn affine_rank(points: &[&[f64]], integral: bool, eps: f64) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    if integral {
        let p0 = points[0];
        let diffs: Vec<Vec<i128>> = points[1..]
            .iter()
            .map(|p| {
                p.iter()
                    .zip(p0)
                    .map(|(&a, &b)| a as i128 - b as i128)
                    .collect()
            })
            .collect();
        linear_rank_i128(&diffs)
    } else {
        let diffs: Vec<Vec<f64>> = points[1..].iter().map(|p| sub(p, points[0])).collect();
        let refs: Vec<&[f64]> = diffs.iter().map(Vec::as_slice).collect();
        linear_rank(&refs, eps)
    }
}

/// Unsigned volume of a simplex given by k+1 points in ℝ^n (Gram determinant).
pub fn simplex_volume(pts: &[&[f64]]) -> f64 {
    let k = pts.len() - 1;
    if k == 0 {
        return 1.0;
    }
    let diffs: Vec<Vec<f64>> = pts[1..].iter().map(|p| sub(p, pts[0])).collect();
    let gram: Vec<Vec<f64>> = diffs
        .iter()
        .map(|a| diffs.iter().map(|b| dot(a, b)).collect())
        .collect();
    let fact: f64 = (1..=k).map(|i| i as f64).product();
    det_f64(&gram).max(0.0).sqrt() / fact
}

/// Solves a square system by Gaussian elimination; `None` if singular.
pub(crate) fn solve_linear(a: &[Vec<f64>], b: &[f64], tol: f64) -> Option<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |s, c| s.max(c.abs()))
        .max(1e-300);
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))?;
        if m[piv][col].abs() <= tol * scale {
            return None;
        }
        m.swap(piv, col);
        for r in 0..n {
            if r != col {
                let f = m[r][col] / m[col][col];
                for c in col..=n {
                    m[r][c] -= f * m[col][c];
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

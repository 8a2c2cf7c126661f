//! Toric degenerations t^λ·w and sampled distances between a patch and a
//! simplicial complex (its control polytope or |𝒯| in the 𝒜-simplex).
//!
//! Distances are estimates from finite samples. The patch is sampled in two
//! ways: a barycentric grid over a triangulation of Δ, and the log-coordinate
//! parametrization u ↦ w·φ_𝒜(e^u) over a box. The second resolves the sharp
//! transitions of strongly degenerate weights that a uniform grid on Δ misses.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blending::{BlendError, ControlPoints, SimplexPoint, ToricPatch, WeightVector};
use crate::geometry::{dist, dot, solve_linear, sub, PointConfig};
use crate::triangulation::{
    realization_in_simplex, regular_triangulation_generic, LiftingFunction,
    SimplicialComplexEmbedding, Triangulation, TriangulationError,
};

/// Default samples per axis (d = 1) or per simplex edge (d ≥ 2).
pub const DEFAULT_GRID_CURVE: usize = 201;
pub const DEFAULT_GRID_SURFACE: usize = 101;
/// Extra log-range added to the weight spread when sizing the log box.
const LOG_MARGIN: f64 = 30.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DegenerationError {
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("grid must have at least 2 points, got {0}")]
    GridTooSmall(usize),
    #[error("t must be positive, got {0}")]
    NonPositiveT(f64),
    #[error("distance {distance} passes the threshold but the recovered triangulation differs")]
    ConverseViolated {
        distance: f64,
        recovered: Triangulation,
    },
    #[error(transparent)]
    Blend(#[from] BlendError),
    #[error(transparent)]
    Triangulation(#[from] TriangulationError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegenerationSchedule {
    pub base_weights: WeightVector,
    pub lambda: LiftingFunction,
    pub t_values: Vec<f64>,
}

impl DegenerationSchedule {
    pub fn new(
        base_weights: WeightVector,
        lambda: LiftingFunction,
        t_values: Vec<f64>,
    ) -> Result<Self, DegenerationError> {
        if base_weights.len() != lambda.len() {
            return Err(DegenerationError::InvalidSchedule(format!(
                "{} weights but {} lifting values",
                base_weights.len(),
                lambda.len()
            )));
        }
        if t_values.iter().any(|&t| !(t >= 1.0 && t.is_finite())) {
            return Err(DegenerationError::InvalidSchedule(
                "t values must be finite and at least 1".into(),
            ));
        }
        if t_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(DegenerationError::InvalidSchedule(
                "t values must be strictly increasing".into(),
            ));
        }
        Ok(DegenerationSchedule {
            base_weights,
            lambda,
            t_values,
        })
    }

    pub fn weights_at(&self, t: f64) -> Result<WeightVector, DegenerationError> {
        degenerate_weights(&self.base_weights, &self.lambda, t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub t: f64,
    pub sup_patch_to_complex: f64,
    pub sup_complex_to_patch: f64,
    pub samples: usize,
}

impl DistanceReport {
    /// max of both directions.
    pub fn two_sided(&self) -> f64 {
        self.sup_patch_to_complex.max(self.sup_complex_to_patch)
    }
}

/// w_i = t^{i(m−i)}, i = 0..=m.
pub fn curve_weights(m: usize, t: f64) -> Result<WeightVector, DegenerationError> {
    curve_weights_scaled(m, t, 1.0)
}

/// w_i = t^{i(m−i)/2}, the schedule of the degree-5 figure captions.
pub fn curve_weights_halved(m: usize, t: f64) -> Result<WeightVector, DegenerationError> {
    curve_weights_scaled(m, t, 0.5)
}

fn curve_weights_scaled(m: usize, t: f64, k: f64) -> Result<WeightVector, DegenerationError> {
    if t.is_nan() || t <= 0.0 {
        return Err(DegenerationError::NonPositiveT(t));
    }
    let lt = t.ln();
    Ok(WeightVector::from_log(
        (0..=m).map(|i| k * (i * (m - i)) as f64 * lt).collect(),
    )?)
}

/// Coordinatewise t^{λ(a)}·w_a, computed in log space.
pub fn degenerate_weights(
    w: &WeightVector,
    lambda: &LiftingFunction,
    t: f64,
) -> Result<WeightVector, DegenerationError> {
    if t.is_nan() || t <= 0.0 {
        return Err(DegenerationError::NonPositiveT(t));
    }
    if w.len() != lambda.len() {
        return Err(DegenerationError::InvalidSchedule(format!(
            "{} weights but {} lifting values",
            w.len(),
            lambda.len()
        )));
    }
    let lt = t.ln();
    Ok(WeightVector::from_log(
        w.log_values()
            .iter()
            .zip(lambda.values())
            .map(|(lw, l)| lw + l * lt)
            .collect(),
    )?)
}

/// κ·m/ε with κ = max ‖b_a‖.
pub fn curve_bound_t0(controls: &ControlPoints, m: usize, eps: f64) -> f64 {
    controls.max_norm() * m as f64 / eps
}

/// Euclidean distance from `p` to the convex hull of `vertices`, exact up to
/// rounding. Degenerate faces are skipped; their points are covered by
/// lower-dimensional faces.
pub fn point_simplex_distance(p: &[f64], vertices: &[Vec<f64>]) -> f64 {
    let k = vertices.len();
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << k) {
        let face: Vec<&[f64]> = (0..k)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| vertices[i].as_slice())
            .collect();
        if let Some(q) = project_to_face(p, &face) {
            best = best.min(dist(p, &q));
        }
    }
    best
}

/// Orthogonal projection onto the affine hull of `face` if it lands inside
/// the face; `None` otherwise or when the face is degenerate.
fn project_to_face(p: &[f64], face: &[&[f64]]) -> Option<Vec<f64>> {
    let v0 = face[0];
    if face.len() == 1 {
        return Some(v0.to_vec());
    }
    let edges: Vec<Vec<f64>> = face[1..].iter().map(|v| sub(v, v0)).collect();
    let rel = sub(p, v0);
    let gram: Vec<Vec<f64>> = edges
        .iter()
        .map(|e| edges.iter().map(|f| dot(e, f)).collect())
        .collect();
    let scale = gram
        .iter()
        .enumerate()
        .map(|(i, r)| r[i])
        .fold(0.0, f64::max);
    let rhs: Vec<f64> = edges.iter().map(|e| dot(e, &rel)).collect();
    let c = solve_linear(&gram, &rhs, 1e-12 * scale.max(f64::MIN_POSITIVE))?;
    let sum: f64 = c.iter().sum();
    if c.iter().any(|&ci| ci < 0.0) || sum > 1.0 {
        return None;
    }
    let mut q = v0.to_vec();
    for (ci, e) in c.iter().zip(&edges) {
        for (qj, ej) in q.iter_mut().zip(e) {
            *qj += ci * ej;
        }
    }
    Some(q)
}

pub fn point_complex_distance(p: &[f64], complex: &SimplicialComplexEmbedding) -> f64 {
    complex
        .simplices
        .iter()
        .map(|s| point_simplex_distance(p, s))
        .fold(f64::INFINITY, f64::min)
}

/// Barycentric grid with `grid` points along each edge of every simplex.
pub fn simplex_grid(vertices: &[Vec<f64>], grid: usize) -> Vec<Vec<f64>> {
    let k = grid - 1;
    let mut out = Vec::new();
    let mut counts = vec![0usize; vertices.len()];
    compositions(k, vertices.len(), &mut counts, 0, &mut |c| {
        let mut q = vec![0.0; vertices[0].len()];
        for (ci, v) in c.iter().zip(vertices) {
            let l = *ci as f64 / k as f64;
            for (qj, vj) in q.iter_mut().zip(v) {
                *qj += l * vj;
            }
        }
        out.push(q);
    });
    out
}

fn compositions(
    remaining: usize,
    parts: usize,
    acc: &mut Vec<usize>,
    pos: usize,
    f: &mut dyn FnMut(&[usize]),
) {
    if pos == parts - 1 {
        acc[pos] = remaining;
        f(acc);
        return;
    }
    for v in 0..=remaining {
        acc[pos] = v;
        compositions(remaining - v, parts, acc, pos + 1, f);
    }
}

/// Sample points of Δ: a uniform grid for d = 1, otherwise a barycentric
/// grid on each simplex of a triangulation of the vertices of Δ.
pub fn domain_samples(patch: &ToricPatch, grid: usize) -> Result<Vec<Vec<f64>>, DegenerationError> {
    if grid < 2 {
        return Err(DegenerationError::GridTooSmall(grid));
    }
    let config = patch.config();
    let verts = &patch.polytope().vertices;
    let vpts: Vec<Vec<f64>> = verts.iter().map(|&i| config.point(i).to_vec()).collect();
    if config.dim() == 1 {
        return Ok(simplex_grid(&vpts, grid));
    }
    let vconf = PointConfig::new(config.dim(), vpts.clone())
        .map_err(|e| DegenerationError::Blend(e.into()))?;
    let (t, _) = regular_triangulation_generic(&vconf, &LiftingFunction::zeros(vpts.len()))?;
    Ok(t.simplices()
        .iter()
        .flat_map(|s| {
            let simplex: Vec<Vec<f64>> = s.iter().map(|&i| vpts[i].clone()).collect();
            simplex_grid(&simplex, grid)
        })
        .collect())
}

/// Points w·φ_𝒜(e^u) for u on a grid over [−L, L]^d, where L is large
/// enough that the dominant monomials at the box boundary win by e^30.
pub fn log_samples(config: &PointConfig, w: &WeightVector, grid: usize) -> Vec<SimplexPoint> {
    let d = config.dim();
    let lw = w.log_values();
    let spread = lw.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - lw.iter().copied().fold(f64::INFINITY, f64::min);
    let mut gap = f64::INFINITY;
    for (i, a) in config.points().iter().enumerate() {
        for b in &config.points()[i + 1..] {
            let g = a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            gap = gap.min(g);
        }
    }
    let half = (spread + LOG_MARGIN) / gap;
    let axis: Vec<f64> = (0..grid)
        .map(|i| -half + 2.0 * half * i as f64 / (grid - 1) as f64)
        .collect();
    let total = grid.pow(d as u32);
    (0..total)
        .map(|mut k| {
            let u: Vec<f64> = (0..d)
                .map(|_| {
                    let v = axis[k % grid];
                    k /= grid;
                    v
                })
                .collect();
            let logs: Vec<f64> = config
                .points()
                .iter()
                .zip(lw)
                .map(|(a, l)| l + dot(a, &u))
                .collect();
            SimplexPoint::from_log(&logs).expect("finite logs")
        })
        .collect()
}

/// Blending vectors sampled from the closure of X_{𝒜,w}.
pub fn patch_samples(
    patch: &ToricPatch,
    w: &WeightVector,
    grid: usize,
) -> Result<Vec<SimplexPoint>, DegenerationError> {
    let mut out: Vec<SimplexPoint> = domain_samples(patch, grid)?
        .iter()
        .map(|x| patch.blend(w, x))
        .collect::<Result<_, _>>()?;
    out.extend(log_samples(patch.config(), w, grid));
    Ok(out)
}

/// Two-sided sampled distance between F(Δ) = π_ℬ(X_{𝒜,w}) and `complex`.
/// The reported `t` is 1; use [`distance_schedule`] to sweep t.
pub fn patch_complex_distance(
    patch: &ToricPatch,
    w: &WeightVector,
    controls: &ControlPoints,
    complex: &SimplicialComplexEmbedding,
    grid: usize,
) -> Result<DistanceReport, DegenerationError> {
    let cloud: Vec<Vec<f64>> = patch_samples(patch, w, grid)?
        .iter()
        .map(|z| controls.project(z.coords()))
        .collect();
    let forward = cloud
        .par_iter()
        .map(|p| point_complex_distance(p, complex))
        .reduce(|| 0.0, f64::max);
    let targets: Vec<Vec<f64>> = complex
        .simplices
        .iter()
        .flat_map(|s| simplex_grid(s, grid))
        .collect();
    let reverse = targets
        .par_iter()
        .map(|q| {
            cloud
                .iter()
                .map(|p| dist(p, q))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| 0.0, f64::max);
    Ok(DistanceReport {
        t: 1.0,
        sup_patch_to_complex: forward,
        sup_complex_to_patch: reverse,
        samples: cloud.len(),
    })
}

/// One [`DistanceReport`] per t in the schedule.
pub fn distance_schedule(
    patch: &ToricPatch,
    schedule: &DegenerationSchedule,
    controls: &ControlPoints,
    complex: &SimplicialComplexEmbedding,
    grid: usize,
) -> Result<Vec<DistanceReport>, DegenerationError> {
    schedule
        .t_values
        .iter()
        .map(|&t| {
            let w = schedule.weights_at(t)?;
            let mut r = patch_complex_distance(patch, &w, controls, complex, grid)?;
            r.t = t;
            Ok(r)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConverseReport {
    pub distance: f64,
    pub passes: bool,
    pub recovered: Triangulation,
    pub threshold: f64,
}

/// Compares X_{𝒜,w} for w = t^λ with |𝒯| in the 𝒜-simplex. Passing the
/// 1/(2(d+1)) threshold forces 𝒯 to be the triangulation induced by λ.
pub fn converse_check(
    config: &PointConfig,
    lambda: &LiftingFunction,
    t: &Triangulation,
    t_value: f64,
    grid: usize,
) -> Result<ConverseReport, DegenerationError> {
    let patch = ToricPatch::new(config.clone())?;
    let n = config.len();
    let w = degenerate_weights(&WeightVector::ones(n), lambda, t_value)?;
    let realization = realization_in_simplex(t, n);
    let report = patch_complex_distance(
        &patch,
        &w,
        &ControlPoints::indicators(n),
        &realization,
        grid,
    )?;
    let distance = report.two_sided();
    let threshold = 1.0 / (2.0 * (config.dim() + 1) as f64);
    let passes = distance < threshold;
    let (recovered, _) = regular_triangulation_generic(config, lambda)?;
    if passes && recovered != *t {
        return Err(DegenerationError::ConverseViolated {
            distance,
            recovered,
        });
    }
    Ok(ConverseReport {
        distance,
        passes,
        recovered,
        threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangulation::control_polytope;
    use approx::assert_abs_diff_eq;

    #[test]
    fn curve_weight_examples() {
        let w = curve_weights(3, 1.0).unwrap().values();
        assert_eq!(w, vec![1.0; 4]);
        let w = curve_weights(5, 20.0).unwrap().values();
        let expect = [
            1.0,
            20f64.powi(4),
            20f64.powi(6),
            20f64.powi(6),
            20f64.powi(4),
            1.0,
        ];
        for (a, b) in w.iter().zip(expect) {
            assert_abs_diff_eq!(*a / b, 1.0, epsilon = 1e-12);
        }
        let w = curve_weights(2, 10.0).unwrap().values();
        for (a, b) in w.iter().zip([1.0, 10.0, 1.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
        let h = curve_weights_halved(5, 20.0).unwrap().values();
        assert_abs_diff_eq!(h[1], 400.0, epsilon = 1e-9);
        assert_abs_diff_eq!(h[2], 8000.0, epsilon = 1e-8);
    }

    #[test]
    fn degenerate_weight_examples() {
        let w = WeightVector::new(vec![1.0, 3.0, 2.0]).unwrap();
        let l = LiftingFunction::new(vec![0.5, -1.0, 2.0]).unwrap();
        assert_eq!(degenerate_weights(&w, &l, 1.0).unwrap(), w);
        let m = 4;
        let l = LiftingFunction::new((0..=m).map(|i| (i * (m - i)) as f64).collect()).unwrap();
        let a = degenerate_weights(&WeightVector::ones(m + 1), &l, 7.0).unwrap();
        let b = curve_weights(m, 7.0).unwrap();
        for (x, y) in a.log_values().iter().zip(b.log_values()) {
            assert_abs_diff_eq!(*x, *y, epsilon = 1e-12);
        }
    }

    #[test]
    fn constant_lift_leaves_blend_unchanged() {
        let p = ToricPatch::new(PointConfig::interval(3).unwrap()).unwrap();
        let w = WeightVector::new(vec![1.0, 2.0, 5.0, 1.5]).unwrap();
        let l = LiftingFunction::new(vec![2.5; 4]).unwrap();
        let w2 = degenerate_weights(&w, &l, 40.0).unwrap();
        let (a, b) = (p.blend(&w, &[1.2]).unwrap(), p.blend(&w2, &[1.2]).unwrap());
        for (x, y) in a.coords().iter().zip(b.coords()) {
            assert_abs_diff_eq!(*x, *y, epsilon = 1e-14);
        }
    }

    #[test]
    fn bound_formula() {
        let b = ControlPoints::new(vec![vec![0.0, 1.0], vec![0.6, 0.8]]).unwrap();
        assert_abs_diff_eq!(curve_bound_t0(&b, 5, 0.1), 50.0, epsilon = 1e-12);
        let b = ControlPoints::new(vec![vec![2.0], vec![-1.0]]).unwrap();
        assert_abs_diff_eq!(curve_bound_t0(&b, 3, 0.5), 12.0, epsilon = 1e-12);
        assert!(curve_bound_t0(&b, 3, 0.1) > curve_bound_t0(&b, 3, 0.5));
    }

    #[test]
    fn point_to_triangle() {
        let tri = vec![
            vec![0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
        ];
        assert_abs_diff_eq!(
            point_simplex_distance(&[0.2, 0.2, 3.0], &tri),
            3.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            point_simplex_distance(&[-1.0, -1.0, 0.0], &tri),
            2f64.sqrt(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            point_simplex_distance(&[1.0, 1.0, 0.0], &tri),
            0.5f64.sqrt(),
            epsilon = 1e-15
        );
        let flat = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]];
        assert_abs_diff_eq!(
            point_simplex_distance(&[3.0, 0.0], &flat),
            1.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn simplex_grid_counts() {
        let tri = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        assert_eq!(simplex_grid(&tri, 5).len(), 15);
        let seg = vec![vec![0.0], vec![2.0]];
        let g = simplex_grid(&seg, 3);
        assert_eq!(g.len(), 3);
        assert!(g.contains(&vec![1.0]));
    }

    #[test]
    fn linear_patch_lies_on_its_control_polytope() {
        let c = PointConfig::interval(1).unwrap();
        let p = ToricPatch::new(c).unwrap();
        let b = ControlPoints::new(vec![vec![0.0, 1.0], vec![2.0, -1.0]]).unwrap();
        let t = Triangulation::new(vec![vec![0, 1]]);
        let r = patch_complex_distance(
            &p,
            &WeightVector::ones(2),
            &b,
            &control_polytope(&t, &b),
            51,
        )
        .unwrap();
        assert!(r.sup_patch_to_complex < 1e-12);
        assert!(r.sup_complex_to_patch < 1e-12);
    }

    #[test]
    fn converse_on_quadratic() {
        let c = PointConfig::interval(2).unwrap();
        let t = Triangulation::new(vec![vec![0, 1], vec![1, 2]]);
        let l = LiftingFunction::new(vec![0.0, 1.0, 0.0]).unwrap();
        let r = converse_check(&c, &l, &t, 1e6, 201).unwrap();
        assert!(r.passes, "distance {}", r.distance);
        assert_eq!(r.recovered, t);

        let t = Triangulation::new(vec![vec![0, 2]]);
        let l = LiftingFunction::new(vec![0.0, -1.0, 0.0]).unwrap();
        let r = converse_check(&c, &l, &t, 1e6, 201).unwrap();
        assert!(r.passes, "distance {}", r.distance);
        assert_eq!(r.recovered, t);
    }

    #[test]
    fn schedule_validation() {
        let w = WeightVector::ones(3);
        let l = LiftingFunction::zeros(3);
        assert!(DegenerationSchedule::new(w.clone(), l.clone(), vec![1.0, 2.0]).is_ok());
        assert!(DegenerationSchedule::new(w.clone(), l.clone(), vec![2.0, 2.0]).is_err());
        assert!(DegenerationSchedule::new(w, l, vec![0.5]).is_err());
    }
}

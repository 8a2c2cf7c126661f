//! Homogenization of 𝒜 and iterative proportional fitting (generalized
//! iterative scaling), which inverts the tautological projection restricted
//! to w.X_𝒜 and so yields blending functions with linear precision.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blending::{BlendError, BlendingVector, SimplexPoint, ToricPatch, WeightVector};
use crate::geometry::{PointConfig, Polytope};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 100_000;
/// Facet values at or below this count as "on the boundary" for IPF queries.
pub const INTERIOR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IpfError {
    #[error("target lies on the boundary of the domain (facet {0} is tight)")]
    NotInterior(usize),
    #[error("no convergence after {} iterations (error {})", .best.iterations, .best.final_error)]
    MaxIterationsExceeded { best: IpfResult },
    #[error(transparent)]
    Blend(#[from] BlendError),
}

/// 𝒜 moved into the standard simplex and lifted to a⁺ = (1 − Σa, a).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomogenizedConfig {
    pub plus_points: Vec<Vec<f64>>,
    /// Translation b: every translated coordinate is at least 1.
    pub translation: Vec<f64>,
    /// Scale t = 1 / (2 max_a Σ(a + b)).
    pub scale: f64,
    pub domain: Polytope,
}

/// Output of [`ipf_solve`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IpfResult {
    pub p: SimplexPoint,
    pub iterations: usize,
    /// ‖π(p) − ψ(y)‖∞ in homogenized coordinates.
    pub final_error: f64,
}

impl HomogenizedConfig {
    /// ψ₀(y) = t (y + b).
    pub fn scaled(&self, y: &[f64]) -> Vec<f64> {
        y.iter()
            .zip(&self.translation)
            .map(|(yi, bi)| self.scale * (yi + bi))
            .collect()
    }

    /// ψ(y) = (1 − Σψ₀(y), ψ₀(y)).
    pub fn forward(&self, y: &[f64]) -> Vec<f64> {
        let s = self.scaled(y);
        let mut out = Vec::with_capacity(s.len() + 1);
        out.push(1.0 - s.iter().sum::<f64>());
        out.extend(s);
        out
    }

    pub fn len(&self) -> usize {
        self.plus_points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plus_points.is_empty()
    }
}

pub fn homogenize(config: &PointConfig, domain: &Polytope) -> HomogenizedConfig {
    let d = config.dim();
    let translation: Vec<f64> = (0..d)
        .map(|j| {
            let min = config
                .points()
                .iter()
                .map(|a| a[j])
                .fold(f64::INFINITY, f64::min);
            1.0 - min
        })
        .collect();
    let max_sum = config
        .points()
        .iter()
        .map(|a| a.iter().zip(&translation).map(|(x, b)| x + b).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    let mut h = HomogenizedConfig {
        plus_points: Vec::new(),
        translation,
        scale: 1.0 / (2.0 * max_sum),
        domain: domain.clone(),
    };
    h.plus_points = config.points().iter().map(|a| h.forward(a)).collect();
    h
}

/// Finds p ∈ w.X_𝒜 with π_𝒜(p) = y for y in the interior of Δ.
pub fn ipf_solve(
    h: &HomogenizedConfig,
    w: &WeightVector,
    y: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<IpfResult, IpfError> {
    w.check_len(h.len())?;
    if y.len() + 1 != h.plus_points.first().map_or(0, Vec::len) {
        return Err(BlendError::LengthMismatch {
            expected: h.plus_points[0].len() - 1,
            found: y.len(),
        }
        .into());
    }
    for (i, f) in h.domain.facets.iter().enumerate() {
        let v = f.eval(y);
        if v < -INTERIOR_TOL {
            return Err(BlendError::OutsideDomain { facet: i, value: v }.into());
        }
        if v <= INTERIOR_TOL {
            return Err(IpfError::NotInterior(i));
        }
    }
    let idx: Vec<usize> = (0..h.len()).collect();
    fit(h, &idx, w.log_values(), &h.forward(y), tol, max_iter)
}

/// Generalized iterative scaling over the points `idx`, in log space:
/// ln p_a += Σ_j a⁺_j (ln ŷ_j − ln q_j), then renormalize.
fn fit(
    h: &HomogenizedConfig,
    idx: &[usize],
    log_w: &[f64],
    target: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<IpfResult, IpfError> {
    let n = h.len();
    let k = target.len();
    let plus: Vec<&[f64]> = idx.iter().map(|&i| h.plus_points[i].as_slice()).collect();
    let log_target: Vec<f64> = target.iter().map(|v| v.ln()).collect();
    let mut log_p: Vec<f64> = idx.iter().map(|&i| log_w[i]).collect();
    let mut p = vec![0.0; idx.len()];
    let mut q = vec![0.0; k];

    let normalize = |log_p: &mut [f64], p: &mut [f64]| {
        let max = log_p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut s = 0.0;
        for (pi, lp) in p.iter_mut().zip(log_p.iter()) {
            *pi = (lp - max).exp();
            s += *pi;
        }
        let ls = s.ln() + max;
        for (pi, lp) in p.iter_mut().zip(log_p.iter_mut()) {
            *pi /= s;
            *lp -= ls;
        }
    };
    let moments = |p: &[f64], q: &mut [f64]| {
        q.iter_mut().for_each(|v| *v = 0.0);
        for (pi, a) in p.iter().zip(&plus) {
            for (qj, aj) in q.iter_mut().zip(a.iter()) {
                *qj += pi * aj;
            }
        }
    };
    let sup_err = |q: &[f64]| {
        q.iter()
            .zip(target)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    };

    normalize(&mut log_p, &mut p);
    moments(&p, &mut q);
    let mut err = sup_err(&q);
    let mut iterations = 0;
    while err >= tol {
        if iterations >= max_iter {
            return Err(IpfError::MaxIterationsExceeded {
                best: IpfResult {
                    p: embed(n, idx, &p),
                    iterations,
                    final_error: err,
                },
            });
        }
        let step: Vec<f64> = log_target
            .iter()
            .zip(&q)
            .map(|(lt, qj)| lt - qj.ln())
            .collect();
        for (lp, a) in log_p.iter_mut().zip(&plus) {
            *lp += a.iter().zip(&step).map(|(aj, s)| aj * s).sum::<f64>();
        }
        normalize(&mut log_p, &mut p);
        moments(&p, &mut q);
        err = sup_err(&q);
        iterations += 1;
    }
    Ok(IpfResult {
        p: embed(n, idx, &p),
        iterations,
        final_error: err,
    })
}

fn embed(n: usize, idx: &[usize], p: &[f64]) -> SimplexPoint {
    let mut z = vec![0.0; n];
    for (&i, &v) in idx.iter().zip(p) {
        z[i] = v;
    }
    SimplexPoint::from_unnormalized(z).expect("iterate is a nonzero nonnegative vector")
}

/// The linear-precision blending vector at y: μ⁻¹(y) on w.X_𝒜.
///
/// Points on ∂Δ are solved on the sub-configuration of the smallest face
/// containing them; coordinates off that face are zero.
pub fn preferred_blending(
    patch: &ToricPatch,
    w: &WeightVector,
    y: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<BlendingVector, IpfError> {
    let h = homogenize(patch.config(), patch.polytope());
    preferred_blending_with(patch, &h, w, y, tol, max_iter).map(|r| r.p)
}

/// [`preferred_blending`] reusing a precomputed homogenization and returning the IPF report.
pub fn preferred_blending_with(
    patch: &ToricPatch,
    h: &HomogenizedConfig,
    w: &WeightVector,
    y: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<IpfResult, IpfError> {
    w.check_len(patch.len())?;
    let fv = patch.facet_values(y)?;
    let active: Vec<usize> = fv
        .iter()
        .enumerate()
        .filter(|(_, v)| **v <= INTERIOR_TOL)
        .map(|(i, _)| i)
        .collect();
    if active.is_empty() {
        return ipf_solve(h, w, y, tol, max_iter);
    }
    let face_tol = if patch.config().is_integral() {
        0.0
    } else {
        1e-9
    };
    let idx: Vec<usize> = (0..patch.len())
        .filter(|&a| {
            active.iter().all(|&f| {
                patch.polytope().facets[f]
                    .eval(patch.config().point(a))
                    .abs()
                    <= face_tol
            })
        })
        .collect();
    fit(h, &idx, w.log_values(), &h.forward(y), tol, max_iter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blending::{bernstein_weights, BernsteinShape};
    use crate::geometry::convex_hull;
    use crate::variety::tautological_projection;
    use approx::assert_abs_diff_eq;

    fn close(a: &[f64], b: &[f64], eps: f64) {
        for (x, y) in a.iter().zip(b) {
            assert_abs_diff_eq!(*x, *y, epsilon = eps);
        }
    }

    fn quad() -> ToricPatch {
        ToricPatch::new(PointConfig::interval(2).unwrap()).unwrap()
    }

    #[test]
    fn homogenize_quadratic() {
        let p = quad();
        let h = homogenize(p.config(), p.polytope());
        assert_eq!(h.translation, vec![1.0]);
        assert_abs_diff_eq!(h.scale, 1.0 / 6.0, epsilon = 1e-15);
        close(&h.plus_points[0], &[5. / 6., 1. / 6.], 1e-15);
        close(&h.plus_points[1], &[4. / 6., 2. / 6.], 1e-15);
        close(&h.plus_points[2], &[3. / 6., 3. / 6.], 1e-15);
    }

    #[test]
    fn homogenized_points_lie_in_simplex() {
        let c = PointConfig::new(2, vec![vec![0., 0.], vec![1., 0.], vec![0., 1.]]).unwrap();
        let h = homogenize(&c, &convex_hull(&c).unwrap());
        for p in &h.plus_points {
            assert_abs_diff_eq!(p.iter().sum::<f64>(), 1.0, epsilon = 1e-15);
            assert!(p.iter().all(|&v| v > 0.0));
        }
    }

    #[test]
    fn ipf_fixed_points() {
        let p = quad();
        let h = homogenize(p.config(), p.polytope());
        let w = WeightVector::new(vec![1.0, 2.0, 1.0]).unwrap();
        let r = ipf_solve(&h, &w, &[1.0], 1e-12, 1000).unwrap();
        close(r.p.coords(), &[0.25, 0.5, 0.25], 1e-12);
        let r = ipf_solve(&h, &WeightVector::ones(3), &[1.0], 1e-12, 1000).unwrap();
        close(r.p.coords(), &[1. / 3.; 3], 1e-12);
    }

    #[test]
    fn ipf_triangle_matches_bernstein() {
        let p = ToricPatch::new(PointConfig::scaled_triangle(2).unwrap()).unwrap();
        let h = homogenize(p.config(), p.polytope());
        let w = bernstein_weights(2, BernsteinShape::Triangle);
        let y = [0.5, 0.5];
        let r = ipf_solve(&h, &w, &y, 1e-12, DEFAULT_MAX_ITER).unwrap();
        close(&tautological_projection(p.config(), &r.p), &y, 1e-10);
        // Bernstein bases have linear precision: the blend at y is the answer.
        close(r.p.coords(), p.blend(&w, &y).unwrap().coords(), 1e-9);
    }

    #[test]
    fn ipf_rejects_boundary_and_outside() {
        let p = quad();
        let h = homogenize(p.config(), p.polytope());
        let w = WeightVector::ones(3);
        assert!(matches!(
            ipf_solve(&h, &w, &[0.0], 1e-9, 10),
            Err(IpfError::NotInterior(_))
        ));
        assert!(matches!(
            ipf_solve(&h, &w, &[3.0], 1e-9, 10),
            Err(IpfError::Blend(BlendError::OutsideDomain { .. }))
        ));
    }

    #[test]
    fn ipf_reports_best_iterate_on_budget_exhaustion() {
        let p = quad();
        let h = homogenize(p.config(), p.polytope());
        match ipf_solve(&h, &WeightVector::ones(3), &[0.3], 1e-14, 3) {
            Err(IpfError::MaxIterationsExceeded { best }) => {
                assert_eq!(best.iterations, 3);
                assert!(best.final_error > 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn preferred_blending_examples() {
        let p = quad();
        let w = WeightVector::new(vec![1.0, 2.0, 1.0]).unwrap();
        let z = preferred_blending(&p, &w, &[1.0], 1e-12, DEFAULT_MAX_ITER).unwrap();
        close(z.coords(), p.blend(&w, &[1.0]).unwrap().coords(), 1e-12);

        let sym = preferred_blending(&p, &WeightVector::ones(3), &[1.0], 1e-12, 1000).unwrap();
        assert_abs_diff_eq!(sym.coords()[0], sym.coords()[2], epsilon = 1e-12);

        for y in [0.1, 0.77, 1.5, 1.93] {
            let z = preferred_blending(&p, &w, &[y], 1e-12, DEFAULT_MAX_ITER).unwrap();
            assert_abs_diff_eq!(
                tautological_projection(p.config(), &z)[0],
                y,
                epsilon = 1e-8
            );
        }
    }

    #[test]
    fn preferred_blending_on_boundary_restricts_to_face() {
        let p = ToricPatch::new(PointConfig::scaled_triangle(2).unwrap()).unwrap();
        let w = WeightVector::ones(6);
        let z = preferred_blending(&p, &w, &[0.0, 0.5], 1e-12, DEFAULT_MAX_ITER).unwrap();
        for (i, a) in p.config().points().iter().enumerate() {
            if a[0] != 0.0 {
                assert_eq!(z.coords()[i], 0.0);
            }
        }
        close(&tautological_projection(p.config(), &z), &[0.0, 0.5], 1e-10);
        let v = preferred_blending(&p, &w, &[2.0, 0.0], 1e-12, 10).unwrap();
        let idx = p
            .config()
            .points()
            .iter()
            .position(|a| a == &[2.0, 0.0])
            .unwrap();
        assert_eq!(v.coords()[idx], 1.0);
    }
}

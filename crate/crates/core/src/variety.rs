//! The monomial parameterization φ_𝒜, the weight action, the tautological
//! projection and analytic-binomial membership tests for X_𝒜 and w.X_𝒜.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blending::{BlendError, SimplexPoint, WeightVector};
use crate::geometry::{convex_hull, dot, PointConfig, Polytope};

/// Singular values below this are treated as zero when extracting relations.
pub const NULL_SPACE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VarietyError {
    #[error("monomial map needs strictly positive input, coordinate {0} is {1}")]
    NonPositiveInput(usize, f64),
    #[error("expected a {expected}-vector, got length {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Blend(#[from] BlendError),
}

/// An affine relation Σ μ_a a = Σ ν_a a with Σ μ = Σ ν = 1, μ, ν ≥ 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineRelation {
    pub mu: Vec<f64>,
    pub nu: Vec<f64>,
}

impl AffineRelation {
    /// μ − ν, a null vector of the homogenized exponent matrix.
    pub fn difference(&self) -> Vec<f64> {
        self.mu.iter().zip(&self.nu).map(|(m, n)| m - n).collect()
    }
}

/// φ_𝒜(x) = [x^a | a ∈ 𝒜].
pub fn phi_a(config: &PointConfig, x: &[f64]) -> Result<SimplexPoint, VarietyError> {
    if x.len() != config.dim() {
        return Err(VarietyError::LengthMismatch {
            expected: config.dim(),
            found: x.len(),
        });
    }
    if let Some((i, &v)) = x.iter().enumerate().find(|(_, &v)| v.is_nan() || v <= 0.0) {
        return Err(VarietyError::NonPositiveInput(i, v));
    }
    let log_x: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    Ok(phi_a_log(config, &log_x)?)
}

/// φ_𝒜(exp(u)), taking the log-coordinates u directly.
pub fn phi_a_log(config: &PointConfig, log_x: &[f64]) -> Result<SimplexPoint, BlendError> {
    let logs: Vec<f64> = config.points().iter().map(|a| dot(a, log_x)).collect();
    SimplexPoint::from_log(&logs)
}

/// w.z = [w_a z_a].
pub fn weight_action(w: &WeightVector, z: &SimplexPoint) -> Result<SimplexPoint, BlendError> {
    w.check_len(z.len())?;
    let logs: Vec<f64> = z
        .coords()
        .iter()
        .zip(w.log_values())
        .map(|(&za, lw)| za.ln() + lw)
        .collect();
    SimplexPoint::from_log(&logs)
}

/// π_𝒜(z) = Σ_a z_a a.
pub fn tautological_projection(config: &PointConfig, z: &SimplexPoint) -> Vec<f64> {
    let mut out = vec![0.0; config.dim()];
    for (za, a) in z.coords().iter().zip(config.points()) {
        for (o, ai) in out.iter_mut().zip(a) {
            *o += za * ai;
        }
    }
    out
}

/// A spanning set of |𝒜| − d − 1 affine relations of the configuration.
pub fn relation_basis(config: &PointConfig) -> Vec<AffineRelation> {
    relations_for_points(config.points())
}

/// Affine relations among arbitrary points (used for faces of Δ as well).
///
/// Null space of the homogenized matrix [(1, a)]_a via SVD of the matrix padded
/// to square size. Each basis vector is canonicalized (unit norm, first nonzero
/// entry positive) and split into positive and negative parts.
pub fn relations_for_points(points: &[Vec<f64>]) -> Vec<AffineRelation> {
    let n = points.len();
    if n == 0 {
        return Vec::new();
    }
    let d = points[0].len();
    let rows = (d + 1).max(n);
    let m = DMatrix::from_fn(rows, n, |r, c| match r {
        0 => 1.0,
        r if r <= d => points[c][r - 1],
        _ => 0.0,
    });
    let scale = m.amax().max(1.0);
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut out = Vec::new();
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s >= NULL_SPACE_TOL * scale {
            continue;
        }
        let mut v: Vec<f64> = v_t.row(k).iter().copied().collect();
        let len = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        v.iter_mut().for_each(|c| *c /= len);
        if let Some(first) = v.iter().find(|c| c.abs() > 1e-12) {
            if *first < 0.0 {
                v.iter_mut().for_each(|c| *c = -*c);
            }
        }
        for c in v.iter_mut() {
            if c.abs() < 1e-14 {
                *c = 0.0;
            }
        }
        let pos: f64 = v.iter().filter(|c| **c > 0.0).sum();
        let neg: f64 = -v.iter().filter(|c| **c < 0.0).sum::<f64>();
        if pos <= 0.0 || neg <= 0.0 {
            continue;
        }
        out.push(AffineRelation {
            mu: v
                .iter()
                .map(|&c| if c > 0.0 { c / pos } else { 0.0 })
                .collect(),
            nu: v
                .iter()
                .map(|&c| if c < 0.0 { -c / neg } else { 0.0 })
                .collect(),
        });
    }
    out
}

/// z^μ with the conventions 0^0 = 1 and 0^s = 0 for s > 0.
fn log_monomial(z: &[f64], e: &[f64]) -> f64 {
    z.iter().zip(e).fold(
        0.0,
        |acc, (&zi, &ei)| {
            if ei == 0.0 {
                acc
            } else {
                acc + ei * zi.ln()
            }
        },
    )
}

/// z^μ − z^ν.
pub fn binomial_residual(rel: &AffineRelation, z: &[f64]) -> f64 {
    log_monomial(z, &rel.mu).exp() - log_monomial(z, &rel.nu).exp()
}

/// z^μ w^ν − z^ν w^μ, which vanishes on w.X_𝒜.
pub fn twisted_residual(rel: &AffineRelation, w: &WeightVector, z: &[f64]) -> f64 {
    let lw = w.log_values();
    (log_monomial(z, &rel.mu) + dot(lw, &rel.nu)).exp()
        - (log_monomial(z, &rel.nu) + dot(lw, &rel.mu)).exp()
}

/// Whether `z` lies on X_𝒜 (all relevant binomial residuals below `tol`).
pub fn membership_test(config: &PointConfig, z: &SimplexPoint, tol: f64) -> bool {
    membership_test_weighted(config, &WeightVector::ones(config.len()), z, tol)
}

/// Whether `z` lies on w.X_𝒜.
///
/// A boundary point must be supported on exactly the points of 𝒜 in some
/// face of Δ; its residuals are then checked on that face's sub-configuration.
pub fn membership_test_weighted(
    config: &PointConfig,
    w: &WeightVector,
    z: &SimplexPoint,
    tol: f64,
) -> bool {
    if z.len() != config.len() || w.len() != config.len() {
        return false;
    }
    let Ok(poly) = convex_hull(config) else {
        return false;
    };
    let support: Vec<usize> = (0..z.len()).filter(|&i| z.coords()[i] > 0.0).collect();
    if support.is_empty() {
        return false;
    }
    let face = minimal_face(config, &poly, &support);
    if face != support {
        return false;
    }
    let pts = config.subset_points(&support);
    let zs: Vec<f64> = support.iter().map(|&i| z.coords()[i]).collect();
    let ws = WeightVector::from_log(support.iter().map(|&i| w.log_values()[i]).collect())
        .expect("finite log weights");
    relations_for_points(&pts)
        .iter()
        .all(|rel| twisted_residual(rel, &ws, &zs).abs() < tol)
}

/// Indices of 𝒜 on the smallest face of Δ containing the given points.
pub(crate) fn minimal_face(config: &PointConfig, poly: &Polytope, idx: &[usize]) -> Vec<usize> {
    let tol = if config.is_integral() { 0.0 } else { 1e-9 };
    let active: Vec<usize> = (0..poly.facets.len())
        .filter(|&f| {
            idx.iter()
                .all(|&i| poly.facets[f].eval(config.point(i)).abs() <= tol)
        })
        .collect();
    (0..config.len())
        .filter(|&i| {
            active
                .iter()
                .all(|&f| poly.facets[f].eval(config.point(i)).abs() <= tol)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn close(a: &[f64], b: &[f64], eps: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert_abs_diff_eq!(*x, *y, epsilon = eps);
        }
    }

    #[test]
    fn phi_examples() {
        let c = PointConfig::interval(2).unwrap();
        close(
            phi_a(&c, &[2.0]).unwrap().coords(),
            &[1. / 7., 2. / 7., 4. / 7.],
            1e-15,
        );
        close(phi_a(&c, &[1.0]).unwrap().coords(), &[1. / 3.; 3], 1e-15);
        let tri = PointConfig::new(2, vec![vec![0., 0.], vec![1., 0.], vec![0., 1.]]).unwrap();
        close(
            phi_a(&tri, &[2.0, 3.0]).unwrap().coords(),
            &[1. / 6., 2. / 6., 3. / 6.],
            1e-15,
        );
        assert_eq!(
            phi_a(&c, &[0.0]),
            Err(VarietyError::NonPositiveInput(0, 0.0))
        );
    }

    #[test]
    fn weight_action_examples() {
        let z = SimplexPoint::uniform(3);
        let w = WeightVector::new(vec![1.0, 2.0, 1.0]).unwrap();
        close(
            weight_action(&w, &z).unwrap().coords(),
            &[0.25, 0.5, 0.25],
            1e-15,
        );
        let same = weight_action(&WeightVector::ones(3), &z).unwrap();
        close(same.coords(), z.coords(), 1e-15);
    }

    #[test]
    fn projection_examples() {
        let c = PointConfig::interval(2).unwrap();
        let z = SimplexPoint::new(vec![0.25, 0.5, 0.25]).unwrap();
        close(&tautological_projection(&c, &z), &[1.0], 1e-15);
        close(
            &tautological_projection(&c, &SimplexPoint::vertex(3, 2)),
            &[2.0],
            0.0,
        );
        close(
            &tautological_projection(&c, &SimplexPoint::uniform(3)),
            &[1.0],
            1e-15,
        );
    }

    #[test]
    fn relation_basis_quadratic() {
        let rels = relation_basis(&PointConfig::interval(2).unwrap());
        assert_eq!(rels.len(), 1);
        close(&rels[0].mu, &[0.5, 0.0, 0.5], 1e-12);
        close(&rels[0].nu, &[0.0, 1.0, 0.0], 1e-12);
    }

    #[test]
    fn relation_basis_square_and_simplex() {
        let sq = PointConfig::new(
            2,
            vec![vec![0., 0.], vec![1., 0.], vec![0., 1.], vec![1., 1.]],
        )
        .unwrap();
        let rels = relation_basis(&sq);
        assert_eq!(rels.len(), 1);
        close(&rels[0].mu, &[0.5, 0.0, 0.0, 0.5], 1e-12);
        close(&rels[0].nu, &[0.0, 0.5, 0.5, 0.0], 1e-12);
        let tri = PointConfig::new(2, vec![vec![0., 0.], vec![1., 0.], vec![0., 1.]]).unwrap();
        assert!(relation_basis(&tri).is_empty());
    }

    #[test]
    fn relations_are_affine() {
        let c = PointConfig::scaled_triangle(3).unwrap();
        let rels = relation_basis(&c);
        assert_eq!(rels.len(), 10 - 3);
        for r in &rels {
            assert_abs_diff_eq!(r.mu.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(r.nu.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
            for j in 0..2 {
                let lhs: f64 = r.mu.iter().zip(c.points()).map(|(m, a)| m * a[j]).sum();
                let rhs: f64 = r.nu.iter().zip(c.points()).map(|(m, a)| m * a[j]).sum();
                assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn residual_examples() {
        let c = PointConfig::interval(2).unwrap();
        let rel = &relation_basis(&c)[0];
        let r = binomial_residual(rel, &[0.5, 0.25, 0.25]);
        assert_abs_diff_eq!(r, 2f64.sqrt() / 4.0 - 0.25, epsilon = 1e-12);
        let z = phi_a(&c, &[0.37]).unwrap();
        assert!(binomial_residual(rel, z.coords()).abs() < 1e-10);

        let w = WeightVector::new(vec![3.0, 0.5, 7.0]).unwrap();
        let zw = weight_action(&w, &z).unwrap();
        assert!(twisted_residual(rel, &w, zw.coords()).abs() < 1e-10);
        assert!(binomial_residual(rel, zw.coords()).abs() > 1e-3);
    }

    #[test]
    fn membership_examples() {
        let c = PointConfig::interval(2).unwrap();
        assert!(membership_test(&c, &phi_a(&c, &[1.7]).unwrap(), 1e-9));
        let off = SimplexPoint::new(vec![0.7, 0.1, 0.2]).unwrap();
        assert!(!membership_test(&c, &off, 1e-6));
        let c3 = PointConfig::interval(3).unwrap();
        assert!(membership_test(&c3, &SimplexPoint::uniform(4), 1e-6));
    }

    #[test]
    fn boundary_membership_uses_faces() {
        let tri = PointConfig::scaled_triangle(2).unwrap();
        // points (0,0),(0,1),(0,2) form the edge x = 0
        let edge: Vec<usize> = (0..tri.len()).filter(|&i| tri.point(i)[0] == 0.0).collect();
        let mut z = vec![0.0; tri.len()];
        // (1/4, 1/2, 1/4) on the edge is φ of the quadratic at x = 1 with weights (1,2,1):
        // not on the unweighted edge curve, which needs z0 z2 = z1².
        for (k, &i) in edge.iter().enumerate() {
            z[i] = [0.25, 0.25, 0.25][k];
        }
        let zs = SimplexPoint::from_unnormalized(z.clone()).unwrap();
        assert!(membership_test(&tri, &zs, 1e-9));
        for (k, &i) in edge.iter().enumerate() {
            z[i] = [0.25, 0.5, 0.25][k];
        }
        assert!(!membership_test(
            &tri,
            &SimplexPoint::new(z.clone()).unwrap(),
            1e-6
        ));
        // support not a face: (0,0) and (1,1)
        let mut bad = vec![0.0; tri.len()];
        bad[0] = 0.5;
        let diag = (0..tri.len())
            .find(|&i| tri.point(i) == [1.0, 1.0])
            .unwrap();
        bad[diag] = 0.5;
        assert!(!membership_test(
            &tri,
            &SimplexPoint::new(bad).unwrap(),
            1e-6
        ));
        // a vertex is always a member
        assert!(membership_test(
            &tri,
            &SimplexPoint::vertex(tri.len(), 0),
            1e-12
        ));
    }
}

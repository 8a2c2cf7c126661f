mod common;

use common::{any_config, load};
use proptest::prelude::*;
use toric_core::injectivity::{g_map, homogenized, jacobian_direct, probe_signs, subset_sign};
use toric_core::{
    compatibility, jacobian_cb, projected_injectivity, CompatibilityStatus, ControlPoints,
    PointConfig, Projection, ToricPatch, WeightVector,
};

fn config_with_controls() -> impl Strategy<Value = (PointConfig, Vec<Vec<f64>>)> {
    any_config().prop_flat_map(|cfg| {
        let (n, d) = (cfg.len(), cfg.dim());
        let b = prop::collection::vec(prop::collection::vec(-3i32..=3, d), n).prop_map(|b| {
            b.into_iter()
                .map(|p| p.into_iter().map(f64::from).collect())
                .collect()
        });
        (Just(cfg), b)
    })
}

/// Invertible integer matrix with a shift, applied to every point.
fn affine_image(points: &[Vec<f64>], m: &[i32], shift: &[i32]) -> Option<Vec<Vec<f64>>> {
    let d = points[0].len();
    let det = if d == 1 {
        m[0]
    } else {
        m[0] * m[3] - m[1] * m[2]
    };
    if det == 0 {
        return None;
    }
    Some(
        points
            .iter()
            .map(|p| {
                (0..d)
                    .map(|r| {
                        (0..d).map(|c| f64::from(m[r * d + c]) * p[c]).sum::<f64>()
                            + f64::from(shift[r])
                    })
                    .collect()
            })
            .collect(),
    )
}

proptest! {
    #[test]
    fn subset_product_ignores_order(
        (cfg, b) in config_with_controls(),
        seed in any::<u64>(),
    ) {
        let d = cfg.dim();
        let a: Vec<&[f64]> = cfg.points().iter().map(Vec::as_slice).collect();
        let bb: Vec<&[f64]> = b.iter().map(Vec::as_slice).collect();
        let subset: Vec<usize> = (0..=d).collect();
        let mut perm = subset.clone();
        let mut s = seed;
        for k in (1..perm.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1);
            perm.swap(k, (s >> 33) as usize % (k + 1));
        }
        prop_assert_eq!(
            subset_sign(&a, &bb, &subset, 1e-10),
            subset_sign(&a, &bb, &perm, 1e-10)
        );
    }

    #[test]
    fn verdict_survives_affine_maps(
        (cfg, b) in config_with_controls(),
        ma in prop::collection::vec(-2i32..=2, 4),
        mb in prop::collection::vec(-2i32..=2, 4),
        sa in prop::collection::vec(-3i32..=3, 2),
        sb in prop::collection::vec(-3i32..=3, 2),
    ) {
        let Some(a2) = affine_image(cfg.points(), &ma, &sa) else { return Ok(()); };
        let Some(b2) = affine_image(&b, &mb, &sb) else { return Ok(()); };
        let cfg2 = PointConfig::new(cfg.dim(), a2).unwrap();
        let before = compatibility(&cfg, &b).unwrap();
        let after = compatibility(&cfg2, &b2).unwrap();
        prop_assert_eq!(before.status, after.status);
    }

    #[test]
    fn certificate_agrees_with_probes((cfg, b) in config_with_controls()) {
        let verdict = compatibility(&cfg, &b).unwrap();
        let signs = probe_signs(&homogenized(cfg.points()), &homogenized(&b));
        prop_assert_eq!(verdict.is_compatible(), signs.len() == 1);
    }

    #[test]
    fn cauchy_binet_matches_direct_determinant(
        yz in prop::collection::vec(prop::collection::vec(-2.0f64..2.0, 3), 10),
        k in prop::collection::vec(0.1f64..3.0, 5),
        x in prop::collection::vec(0.2f64..3.0, 3),
        n in 1usize..=3,
    ) {
        let m = 5;
        let y: Vec<Vec<f64>> = yz[..m].iter().map(|v| v[..n].to_vec()).collect();
        let z: Vec<Vec<f64>> = yz[m..].iter().map(|v| v[..n].to_vec()).collect();
        let cb = jacobian_cb(&y, &z, &k, &x[..n]);
        let direct = jacobian_direct(&y, &z, &k, &x[..n]);
        prop_assert!((cb - direct).abs() <= 1e-9 * cb.abs().max(1.0));
    }
}

#[test]
fn jacobian_of_linear_sum_by_hand() {
    // n = 1: g(x) = Σ k_j z_j x^{y_j}, so dg/dx = Σ k_j y_j z_j x^{y_j − 1}
    let y = [[1.0], [2.0]];
    let z = [[1.0], [2.0]];
    let k = [1.0, 1.0];
    let g = g_map(&y, &z, &k, &[2.0]);
    assert!((g[0] - (2.0 + 8.0)).abs() < 1e-12);
    let j = jacobian_cb(&y, &z, &k, &[2.0]);
    assert!((j - (1.0 + 8.0)).abs() < 1e-12);
}

#[test]
fn figure_fixtures_have_expected_verdicts() {
    let quad: PointConfig = load("quadrilateral.json");
    let convex: Vec<Vec<f64>> = load("quadrilateral_convex.json");
    let crossed: Vec<Vec<f64>> = load("quadrilateral_crossed.json");
    assert!(compatibility(&quad, &convex).unwrap().is_compatible());
    let v = compatibility(&quad, &crossed).unwrap();
    assert_eq!(v.status, CompatibilityStatus::Incompatible);
    assert_eq!(v.witness, Some((vec![0, 1, 2], vec![0, 2, 3])));

    let tri: PointConfig = load("cubic_triangle.json");
    let moved: Vec<Vec<f64>> = load("cubic_triangle_moved_center.json");
    assert!(compatibility(&tri, &moved).unwrap().is_compatible());
}

#[test]
fn vertical_projection_of_quintic_is_compatible() {
    let cfg: PointConfig = load("quintic.json");
    let b: Vec<Vec<f64>> = load("quintic_controls.json");
    let proj: Projection = load("projection_vertical.json");
    let v = projected_injectivity(&cfg, &ControlPoints::new(b).unwrap(), &proj).unwrap();
    assert!(v.is_compatible());
}

#[test]
fn compatible_patch_has_no_collisions() {
    use rand::{Rng, SeedableRng};
    let cfg: PointConfig = load("quadrilateral.json");
    let b = ControlPoints::new(load("quadrilateral_convex.json")).unwrap();
    assert!(compatibility(&cfg, b.points()).unwrap().is_compatible());
    let patch = ToricPatch::new(cfg.clone()).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
    let grid: Vec<Vec<f64>> = (0..50)
        .flat_map(|i| (0..50).map(move |j| vec![2.0 * i as f64 / 49.0, 2.0 * j as f64 / 49.0]))
        .filter(|x| patch.polytope().contains(x, 1e-12))
        .collect();
    for _ in 0..10 {
        let w =
            WeightVector::new((0..cfg.len()).map(|_| rng.gen_range(0.1..10.0)).collect()).unwrap();
        let image: Vec<Vec<f64>> = grid
            .iter()
            .map(|x| patch.patch_eval(&w, &b, x).unwrap())
            .collect();
        for i in 0..grid.len() {
            for j in i + 1..grid.len() {
                if common::dist(&grid[i], &grid[j]) > 1e-2 {
                    assert!(common::dist(&image[i], &image[j]) >= 1e-7);
                }
            }
        }
    }
}

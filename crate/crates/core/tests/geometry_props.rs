mod common;

use common::any_config;
use proptest::prelude::*;
use toric_core::geometry::normalize_facets;
use toric_core::{convex_hull, orientation, PointConfig};

fn facet_set(cfg: &PointConfig) -> Vec<(Vec<i64>, i64)> {
    let hull = normalize_facets(&convex_hull(cfg).unwrap(), cfg);
    let mut f: Vec<(Vec<i64>, i64)> = hull
        .facets
        .iter()
        .map(|f| {
            (
                f.normal.iter().map(|c| (c * 1e9).round() as i64).collect(),
                (f.offset * 1e9).round() as i64,
            )
        })
        .collect();
    f.sort();
    f
}

proptest! {
    #[test]
    fn every_point_satisfies_normalized_facets(cfg in any_config()) {
        let hull = normalize_facets(&convex_hull(&cfg).unwrap(), &cfg);
        for p in cfg.points() {
            for f in &hull.facets {
                prop_assert!(f.eval(p) >= -1e-12);
            }
        }
    }

    #[test]
    fn orientation_alternates(
        pts in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 2), 3),
        i in 0usize..3,
        j in 0usize..3,
    ) {
        prop_assume!(i != j);
        let mut swapped = pts.clone();
        swapped.swap(i, j);
        let a = orientation(&pts).unwrap().value();
        let b = orientation(&swapped).unwrap().value();
        prop_assert_eq!(a, -b);
    }

    #[test]
    fn hull_ignores_point_order(cfg in any_config(), seed in any::<u64>()) {
        let mut pts = cfg.points().to_vec();
        let n = pts.len();
        let mut s = seed;
        for k in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            pts.swap(k, (s >> 33) as usize % (k + 1));
        }
        let shuffled = PointConfig::new(cfg.dim(), pts).unwrap();
        prop_assert_eq!(facet_set(&cfg), facet_set(&shuffled));
    }
}

#[test]
fn cubic_triangle_has_three_facets() {
    let cfg = PointConfig::scaled_triangle(3).unwrap();
    let hull = convex_hull(&cfg).unwrap();
    assert_eq!(hull.facets.len(), 3);
    assert_eq!(hull.vertices.len(), 3);
    assert!((hull.volume(&cfg) - 4.5).abs() < 1e-12);
}

#[test]
fn duplicate_points_are_rejected() {
    assert!(PointConfig::new(1, vec![vec![0.0], vec![1.0], vec![1.0]]).is_err());
}

#[test]
fn flat_configuration_is_rejected() {
    let pts = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]];
    assert!(PointConfig::new(2, pts).is_err());
}

mod common;

use common::load;
use proptest::prelude::*;
use toric_core::degeneration::{distance_schedule, point_simplex_distance};
use toric_core::triangulation::regular_triangulation_generic;
use toric_core::{
    control_polytope, converse_check, curve_bound_t0, curve_weights, degenerate_weights,
    patch_complex_distance, ControlPoints, DegenerationSchedule, LiftingFunction, PointConfig,
    ToricPatch, Triangulation, WeightVector,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn simplex_distance_matches_segment_formula(
        a in prop::collection::vec(-2.0f64..2.0, 2),
        b in prop::collection::vec(-2.0f64..2.0, 2),
        p in prop::collection::vec(-3.0f64..3.0, 2),
    ) {
        let ab = [b[0] - a[0], b[1] - a[1]];
        let len2 = ab[0] * ab[0] + ab[1] * ab[1];
        prop_assume!(len2 > 1e-6);
        let s = (((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1]) / len2).clamp(0.0, 1.0);
        let q = [a[0] + s * ab[0], a[1] + s * ab[1]];
        let expected = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
        let got = point_simplex_distance(&p, &[a.clone(), b.clone()]);
        prop_assert!((got - expected).abs() < 1e-9);
    }

    #[test]
    fn converse_pass_implies_same_triangulation(
        lambda in prop::collection::vec(0.0f64..1.0, 4),
        diagonal in any::<bool>(),
        k in 1i32..=6,
    ) {
        let cfg: PointConfig = load("square.json");
        let t = if diagonal {
            Triangulation::new(vec![vec![0, 1, 3], vec![0, 2, 3]])
        } else {
            Triangulation::new(vec![vec![0, 1, 2], vec![1, 2, 3]])
        };
        let lambda = LiftingFunction::new(lambda).unwrap();
        let r = converse_check(&cfg, &lambda, &t, 10f64.powi(k), 41).unwrap();
        if r.passes {
            prop_assert_eq!(r.recovered, t);
        }
    }
}

#[test]
fn curve_tube_bound_holds_on_quintic_fixture() {
    let cfg: PointConfig = load("quintic.json");
    let b = ControlPoints::new(load("quintic_controls.json")).unwrap();
    let patch = ToricPatch::new(cfg).unwrap();
    let polygon = control_polytope(
        &Triangulation::new((0..5).map(|i| vec![i, i + 1]).collect()),
        &b,
    );
    for eps in [0.5, 0.2] {
        let t = 1.01 * curve_bound_t0(&b, 5, eps);
        let w = curve_weights(5, t).unwrap();
        let r = patch_complex_distance(&patch, &w, &b, &polygon, 2001).unwrap();
        assert!(r.sup_patch_to_complex < eps, "{r:?}");
    }
}

#[test]
fn surface_distances_shrink_along_schedule() {
    let cfg: PointConfig = load("cubic_triangle.json");
    let b = ControlPoints::new(load("cubic_triangle_surface.json")).unwrap();
    let lambda: LiftingFunction = load("cubic_triangle_lifting.json");
    let (t, _) = regular_triangulation_generic(&cfg, &lambda).unwrap();
    let complex = control_polytope(&t, &b);
    let patch = ToricPatch::new(cfg.clone()).unwrap();
    let schedule =
        DegenerationSchedule::new(WeightVector::ones(cfg.len()), lambda, vec![1.0, 5.0, 100.0])
            .unwrap();
    let reports = distance_schedule(&patch, &schedule, &b, &complex, 21).unwrap();
    let d: Vec<f64> = reports.iter().map(|r| r.sup_patch_to_complex).collect();
    assert!(d[0] > d[1] && d[1] > d[2], "{d:?}");
    assert!(reports[2].two_sided() < reports[0].two_sided());
}

#[test]
fn doubling_schedule_is_soft_monotone() {
    let cfg: PointConfig = load("cubic_triangle.json");
    let b = ControlPoints::new(load("cubic_triangle_surface.json")).unwrap();
    let lambda: LiftingFunction = load("cubic_triangle_lifting.json");
    let (t, _) = regular_triangulation_generic(&cfg, &lambda).unwrap();
    let complex = control_polytope(&t, &b);
    let patch = ToricPatch::new(cfg.clone()).unwrap();
    let ts: Vec<f64> = (0..=8).map(|k| f64::from(1 << k)).collect();
    let schedule = DegenerationSchedule::new(WeightVector::ones(cfg.len()), lambda, ts).unwrap();
    let reports = distance_schedule(&patch, &schedule, &b, &complex, 15).unwrap();
    for pair in reports.windows(2) {
        if pair[1].sup_patch_to_complex > pair[0].sup_patch_to_complex {
            eprintln!(
                "distance rose from {} at t = {} to {} at t = {}",
                pair[0].sup_patch_to_complex, pair[0].t, pair[1].sup_patch_to_complex, pair[1].t
            );
        }
    }
    let first = reports.first().unwrap().sup_patch_to_complex;
    let last = reports.last().unwrap().sup_patch_to_complex;
    assert!(last < first);
}

#[test]
fn degenerate_weights_multiply_by_powers_of_t() {
    let w = WeightVector::new(vec![1.0, 2.0, 3.0]).unwrap();
    let lambda = LiftingFunction::new(vec![0.0, 1.0, 2.0]).unwrap();
    let d = degenerate_weights(&w, &lambda, 10.0).unwrap();
    for (got, want) in d.values().iter().zip([1.0, 20.0, 300.0]) {
        assert!((got - want).abs() < 1e-12 * want);
    }
}

#[test]
fn schedule_rejects_decreasing_t() {
    let r = DegenerationSchedule::new(
        WeightVector::ones(2),
        LiftingFunction::zeros(2),
        vec![5.0, 2.0],
    );
    assert!(r.is_err());
}

#[test]
fn huge_t_does_not_overflow() {
    let patch = ToricPatch::new(PointConfig::interval(3).unwrap()).unwrap();
    let w = curve_weights(3, 300f64.powi(3)).unwrap();
    let z = patch.blend(&w, &[1.5]).unwrap();
    assert!(z.coords().iter().all(|v| v.is_finite()));
    assert!((z.coords().iter().sum::<f64>() - 1.0).abs() < 1e-12);
}

mod common;

use proptest::prelude::*;
use skelevo::creation_time::CreationTimeField;
use skelevo::indicators::{
    dtw, total_persistence, vivacity, vivacity_ratio, ActivityCurve, VivacityMode,
};
use skelevo::persistence::{growth_persistence, DiagramKind, DiagramPoint, PersistenceDiagram};
use skelevo::temporal_match::PixelClass;
use skelevo::{Pixel, PixelSet, SkeletonGraph};

fn diagram(points: &[(u32, u32)]) -> PersistenceDiagram {
    PersistenceDiagram {
        kind: DiagramKind::AgePersistence,
        step: 0,
        points: points
            .iter()
            .enumerate()
            .map(|(i, &(birth, death))| DiagramPoint {
                birth,
                death,
                segment_id: i,
                branch: Pixel::new(0, 0),
            })
            .collect(),
    }
}

fn points() -> impl Strategy<Value = Vec<(u32, u32)>> {
    proptest::collection::vec((0u32..100, 0u32..100), 0..20)
}

fn class() -> impl Strategy<Value = PixelClass> {
    prop_oneof![
        Just(PixelClass::Known),
        Just(PixelClass::Growth),
        Just(PixelClass::Decay),
        Just(PixelClass::Irregular),
    ]
}

const STEP: usize = 15;

fn step_inputs() -> impl Strategy<Value = (SkeletonGraph, Vec<PixelClass>, CreationTimeField)> {
    (4u32..=16, 4u32..=16)
        .prop_flat_map(|(w, h)| {
            proptest::collection::vec((0..w, 0..h), 0..80).prop_map(move |pts| {
                SkeletonGraph::build(
                    PixelSet::new(w, h, STEP, pts.into_iter().map(|(x, y)| Pixel::new(x, y)))
                        .unwrap(),
                )
            })
        })
        .prop_flat_map(|g| {
            let n = g.len();
            (
                Just(g),
                proptest::collection::vec(class(), n),
                proptest::collection::vec(0..=STEP as u32, n),
            )
        })
        .prop_map(|(g, c, times)| (g, c, CreationTimeField { index: STEP, times }))
}

fn curve() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.0f64..50.0, 1..10)
}

proptest! {
    #[test]
    fn reflection_leaves_total_persistence_unchanged(pts in points(), order in 0.5f64..4.0) {
        let flipped: Vec<(u32, u32)> = pts.iter().map(|&(b, d)| (d, b)).collect();
        let a = total_persistence(&diagram(&pts), order).unwrap();
        let b = total_persistence(&diagram(&flipped), order).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn adding_a_point_never_lowers_total_persistence(pts in points(), extra in (0u32..100, 0u32..100)) {
        let before = total_persistence(&diagram(&pts), 2.0).unwrap();
        let mut more = pts.clone();
        more.push(extra);
        let after = total_persistence(&diagram(&more), 2.0).unwrap();
        prop_assert!(after >= before);
    }

    #[test]
    fn order_one_is_the_plain_sum(pts in points()) {
        let sum: u32 = pts.iter().map(|&(b, d)| b.abs_diff(d)).sum();
        prop_assert_eq!(total_persistence(&diagram(&pts), 1.0).unwrap(), sum as f64);
    }

    #[test]
    fn vivacity_is_a_monotone_fraction((graph, classes, field) in step_inputs()) {
        let growth = growth_persistence(&graph, &field, STEP);
        for mode in [VivacityMode::Segment, VivacityMode::Pixel, VivacityMode::Segments] {
            let mut last = 0.0;
            for t_g in 0..=STEP as u32 + 1 {
                let v = vivacity(&graph, &classes, &growth, &field, t_g, mode);
                if let Some(v) = v {
                    prop_assert!((0.0..=1.0).contains(&v));
                    prop_assert!(v >= last);
                    last = v;
                }
            }
        }
        if graph.is_empty() {
            prop_assert_eq!(vivacity_ratio(&classes, &[], 3), None);
        }
    }

    #[test]
    fn dtw_agrees_with_enumeration(a in curve(), b in curve()) {
        prop_assume!(a.len() <= 7 && b.len() <= 7);
        let fast = dtw(&a, &b).unwrap();
        prop_assert!((fast - common::dtw_enumerate(&a, &b)).abs() <= 1e-9);
    }

    #[test]
    fn dtw_is_symmetric_and_zero_on_self(a in curve(), b in curve()) {
        prop_assert_eq!(dtw(&a, &b).unwrap(), dtw(&b, &a).unwrap());
        prop_assert_eq!(dtw(&a, &a).unwrap(), 0.0);
        prop_assert!(dtw(&a, &b).unwrap() >= 0.0);
    }

    #[test]
    fn curve_csv_round_trip(values in curve()) {
        let samples: Vec<(usize, f64)> = values.iter().enumerate().map(|(i, &v)| (2 * i + 1, v)).collect();
        let c = ActivityCurve::new("c", samples).unwrap();
        prop_assert_eq!(ActivityCurve::from_csv("c", &c.to_csv()).unwrap(), c);
    }
}

#[test]
fn empty_diagram_has_zero_total() {
    let z = total_persistence(&diagram(&[]), 2.0).unwrap();
    assert_eq!(z.to_bits(), 0.0f64.to_bits());
}

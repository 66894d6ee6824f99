use proptest::prelude::*;
use skelevo::creation_time::CreationTimeField;
use skelevo::persistence::{
    age_persistence_diagram, branch_inconsistency_diagram, filter_by_inconsistency,
    filter_combined, growth_persistence, remove_segments,
};
use skelevo::skeleton_graph::DegreeClass;
use skelevo::{Pixel, PixelSet, SkeletonGraph};

const STEP: usize = 12;

/// A graph with creation times in `0..=STEP`.
fn timed_graph() -> impl Strategy<Value = (SkeletonGraph, CreationTimeField)> {
    (4u32..=18, 4u32..=18)
        .prop_flat_map(|(w, h)| {
            proptest::collection::vec((0..w, 0..h), 1..90).prop_map(move |pts| {
                SkeletonGraph::build(
                    PixelSet::new(w, h, STEP, pts.into_iter().map(|(x, y)| Pixel::new(x, y)))
                        .unwrap(),
                )
            })
        })
        .prop_flat_map(|g| {
            let n = g.len();
            (Just(g), proptest::collection::vec(0..=STEP as u32, n))
        })
        .prop_map(|(g, times)| (g, CreationTimeField { index: STEP, times }))
}

fn is_subset(a: &SkeletonGraph, b: &SkeletonGraph) -> bool {
    a.pixels().iter().all(|p| b.pixels().contains(p))
}

proptest! {
    #[test]
    fn one_point_per_branch_incidence((graph, field) in timed_graph()) {
        let bi = branch_inconsistency_diagram(&graph, &field);
        let age = age_persistence_diagram(&graph, &field);
        let incidences: usize = graph
            .segments()
            .iter()
            .filter_map(|s| s.ends)
            .map(|ends| {
                ends.iter()
                    .filter(|&&p| graph.class_of(p) == Some(DegreeClass::Branch))
                    .count()
            })
            .sum();
        prop_assert_eq!(bi.points.len(), incidences);
        prop_assert_eq!(age.points.len(), incidences);
        let time = |p: Pixel| field.times[graph.vertex(p).unwrap()];
        for (b, a) in bi.points.iter().zip(&age.points) {
            prop_assert_eq!(b.birth, time(b.branch));
            prop_assert_eq!(a.birth, time(a.branch));
            prop_assert!(b.death as usize <= STEP && a.death as usize <= STEP);
        }
    }

    #[test]
    fn growth_persistence_is_bounded((graph, field) in timed_graph()) {
        let g = growth_persistence(&graph, &field, STEP);
        prop_assert_eq!(g.values.len(), graph.segments().len());
        for (seg, &v) in graph.segments().iter().zip(&g.values) {
            let newest = seg.pixels().map(|p| field.times[graph.vertex(p).unwrap()]).max().unwrap();
            prop_assert_eq!(v as usize, STEP - newest as usize);
        }
    }

    #[test]
    fn higher_threshold_keeps_more((graph, field) in timed_graph(), a in 0u32..14, b in 0u32..14) {
        let (lo, hi) = (a.min(b), a.max(b));
        let bi = branch_inconsistency_diagram(&graph, &field);
        let strict = filter_by_inconsistency(&graph, &bi, lo);
        let loose = filter_by_inconsistency(&graph, &bi, hi);
        prop_assert!(is_subset(&strict, &loose));
        prop_assert!(is_subset(&loose, &graph));
    }

    #[test]
    fn combined_without_age_clause_is_plain((graph, field) in timed_graph(), t in 0u32..14) {
        let bi = branch_inconsistency_diagram(&graph, &field);
        let age = age_persistence_diagram(&graph, &field);
        prop_assert_eq!(
            filter_combined(&graph, &bi, &age, t, u32::MAX),
            filter_by_inconsistency(&graph, &bi, t)
        );
        // the age clause can only rescue segments
        let with_age = filter_combined(&graph, &bi, &age, t, 3);
        prop_assert!(is_subset(&filter_by_inconsistency(&graph, &bi, t), &with_age));
    }

    #[test]
    fn removal_keeps_shared_and_isolated_pixels(
        (graph, _) in timed_graph(),
        mask in proptest::collection::vec(any::<bool>(), 64),
    ) {
        let removed: Vec<bool> = (0..graph.segments().len()).map(|i| mask[i % 64]).collect();
        let out = remove_segments(&graph, &removed);
        let incident = graph.incident_segments();
        for (v, p) in graph.pixels().iter().enumerate() {
            let keep = incident[v].is_empty() || incident[v].iter().any(|&s| !removed[s]);
            prop_assert_eq!(out.pixels().contains(p), keep);
        }
    }
}

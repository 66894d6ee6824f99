mod common;

use std::collections::HashMap;

use proptest::prelude::*;
use skelevo::skeleton_graph::DegreeClass;
use skelevo::synthgen::generate;
use skelevo::{Pixel, PixelSet, SkeletonGraph};

fn pixel_set() -> impl Strategy<Value = PixelSet> {
    (3u32..=20, 3u32..=20).prop_flat_map(|(w, h)| {
        proptest::collection::vec((0..w, 0..h), 0..120).prop_map(move |pts| {
            PixelSet::new(w, h, 0, pts.into_iter().map(|(x, y)| Pixel::new(x, y))).unwrap()
        })
    })
}

fn edge(a: Pixel, b: Pixel) -> (Pixel, Pixel) {
    if (a.y, a.x) <= (b.y, b.x) {
        (a, b)
    } else {
        (b, a)
    }
}

/// Checks every structural invariant of a built graph against brute-force
/// adjacency.
fn check_graph(graph: &SkeletonGraph) -> Result<(), TestCaseError> {
    let set = graph.pixels();
    let mut edges: HashMap<(Pixel, Pixel), usize> = HashMap::new();
    for p in set.iter() {
        let degree = common::brute_degree(set, p);
        prop_assert_eq!(graph.degree(p), Some(degree));
        prop_assert_eq!(graph.class_of(p), Some(DegreeClass::from_degree(degree)));
        for q in graph.neighbors(p) {
            prop_assert!(p.is_adjacent(q));
            prop_assert!(graph.neighbors(q).any(|r| r == p), "asymmetric adjacency");
            edges.insert(edge(p, q), 0);
        }
    }

    let regular = graph
        .classes()
        .iter()
        .filter(|c| **c == DegreeClass::Regular)
        .count();
    let interior: usize = graph.segments().iter().map(|s| s.interior.len()).sum();
    prop_assert_eq!(interior, regular);

    for (id, seg) in graph.segments().iter().enumerate() {
        prop_assert_eq!(seg.id, id);
        for &p in &seg.interior {
            prop_assert_eq!(graph.class_of(p), Some(DegreeClass::Regular));
            prop_assert_eq!(graph.segment_of(p).unwrap().map(|s| s.id), Some(id));
        }
        let mut chain: Vec<Pixel> = Vec::new();
        match seg.ends {
            Some([a, b]) => {
                prop_assert_ne!(graph.class_of(a), Some(DegreeClass::Regular));
                prop_assert_ne!(graph.class_of(b), Some(DegreeClass::Regular));
                chain.push(a);
                chain.extend(&seg.interior);
                chain.push(b);
            }
            None => {
                prop_assert!(seg.interior.len() >= 3);
                chain.extend(&seg.interior);
                chain.push(seg.interior[0]);
            }
        }
        for w in chain.windows(2) {
            let count = edges.get_mut(&edge(w[0], w[1]));
            prop_assert!(count.is_some(), "segment step between non-neighbours");
            *count.unwrap() += 1;
        }
    }
    for (e, n) in &edges {
        prop_assert_eq!(*n, 1, "edge {:?} covered {} times", e, n);
    }
    Ok(())
}

proptest! {
    #[test]
    fn random_sets_satisfy_graph_invariants(set in pixel_set()) {
        check_graph(&SkeletonGraph::build(set))?;
    }

    #[test]
    fn branch_points_are_degree_three_or_more(set in pixel_set()) {
        let graph = SkeletonGraph::build(set);
        for p in graph.branch_points() {
            prop_assert!(graph.degree(p).unwrap() >= 3);
        }
    }
}

#[test]
fn generated_frames_satisfy_graph_invariants() {
    for script in [
        common::three_finger_script(),
        common::loop_script(),
        common::fork_script(true),
    ] {
        let (frames, _) = generate(&script).unwrap();
        for frame in frames {
            check_graph(&SkeletonGraph::build(frame)).unwrap();
        }
    }
}

#[test]
fn unknown_pixel_is_an_error() {
    let set = PixelSet::new(8, 8, 0, [Pixel::new(1, 1)]).unwrap();
    let graph = SkeletonGraph::build(set);
    assert!(graph.segment_of(Pixel::new(5, 5)).is_err());
    assert_eq!(graph.segment_of(Pixel::new(1, 1)).unwrap(), None);
}

#[test]
fn plus_cross_under_eight_adjacency() {
    let c = Pixel::new(4, 4);
    let mut pts = vec![c];
    for (dx, dy) in [(1i32, 0i32), (-1, 0), (0, 1), (0, -1)] {
        for r in 1..=2 {
            pts.push(Pixel::new((4 + dx * r) as u32, (4 + dy * r) as u32));
        }
    }
    let set = PixelSet::new(9, 9, 0, pts).unwrap();
    let graph = SkeletonGraph::build(set.clone());
    check_graph(&graph).unwrap();
    let want: Vec<Pixel> = set
        .iter()
        .filter(|&p| common::brute_degree(&set, p) >= 3)
        .collect();
    assert_eq!(graph.branch_points(), want);
    // the inner arm pixels touch diagonally, so the centre is not alone
    assert_eq!(want.len(), 5);
}

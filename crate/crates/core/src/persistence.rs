//! Branch inconsistency, age persistence and growth persistence, and the
//! segment filters built on them.
//!
//! Diagrams have one point per (branch point, incident segment) pair. A
//! segment bounded by a branch point on one side and an endpoint on the other
//! contributes one point; a loop leaving and re-entering the same branch
//! point contributes two. Segments without any branch point contribute none.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::creation_time::CreationTimeField;
use crate::pixel::{Pixel, PixelSet};
use crate::skeleton_graph::{DegreeClass, Segment, Side, SkeletonGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagramKind {
    BranchInconsistency,
    AgePersistence,
}

impl DiagramKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagramKind::BranchInconsistency => "branch-inconsistency",
            DiagramKind::AgePersistence => "age-persistence",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiagramPoint {
    /// Creation time of the branch point.
    pub birth: u32,
    pub death: u32,
    pub segment_id: usize,
    pub branch: Pixel,
}

impl DiagramPoint {
    /// `|death - birth|`
    pub fn persistence(&self) -> u32 {
        self.birth.abs_diff(self.death)
    }

    /// `death - birth`, negative below the diagonal.
    pub fn signed(&self) -> i64 {
        self.death as i64 - self.birth as i64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PersistenceDiagram {
    pub kind: DiagramKind,
    pub step: usize,
    pub points: Vec<DiagramPoint>,
}

pub const DIAGRAM_CSV_HEADER: &str = "kind,step,birth,death,branch_x,branch_y,segment_id\n";

impl PersistenceDiagram {
    /// Rows without header, see [`DIAGRAM_CSV_HEADER`].
    pub fn write_csv_rows(&self, out: &mut String) {
        for pt in &self.points {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                self.kind.as_str(),
                self.step,
                pt.birth,
                pt.death,
                pt.branch.x,
                pt.branch.y,
                pt.segment_id
            );
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(DIAGRAM_CSV_HEADER);
        self.write_csv_rows(&mut out);
        out
    }
}

/// Growth persistence per segment id of one step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthField {
    pub step: usize,
    pub values: Vec<u32>,
}

impl GrowthField {
    /// `step,segment_id,pers_g`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,segment_id,pers_g\n");
        for (id, v) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{},{id},{v}", self.step);
        }
        out
    }
}

struct Lookup<'a> {
    graph: &'a SkeletonGraph,
    field: &'a CreationTimeField,
}

impl Lookup<'_> {
    fn time(&self, p: Pixel) -> u32 {
        let v = self.graph.vertex(p).expect("segment pixels are vertices");
        self.field.times[v]
    }

    fn is_branch(&self, p: Pixel) -> bool {
        self.graph.class_of(p) == Some(DegreeClass::Branch)
    }

    /// Every (branch side, segment) incidence in segment order.
    fn incidences(&self) -> impl Iterator<Item = (&Segment, Side, Pixel)> + '_ {
        self.graph.segments().iter().flat_map(move |seg| {
            [Side::Start, Side::End]
                .into_iter()
                .filter_map(move |side| {
                    let b = seg.end(side)?;
                    self.is_branch(b).then_some((seg, side, b))
                })
        })
    }
}

fn check(graph: &SkeletonGraph, field: &CreationTimeField) {
    assert_eq!(
        graph.len(),
        field.times.len(),
        "creation time field does not cover the graph"
    );
}

pub fn branch_inconsistency_diagram(
    graph: &SkeletonGraph,
    field: &CreationTimeField,
) -> PersistenceDiagram {
    check(graph, field);
    let lk = Lookup { graph, field };
    let points = lk
        .incidences()
        .map(|(seg, side, b)| DiagramPoint {
            birth: lk.time(b),
            death: lk.time(seg.first_from(side).expect("bounded segment")),
            segment_id: seg.id,
            branch: b,
        })
        .collect();
    PersistenceDiagram {
        kind: DiagramKind::BranchInconsistency,
        step: field.index,
        points,
    }
}

pub fn age_persistence_diagram(
    graph: &SkeletonGraph,
    field: &CreationTimeField,
) -> PersistenceDiagram {
    check(graph, field);
    let lk = Lookup { graph, field };
    let points = lk
        .incidences()
        .map(|(seg, _, b)| {
            let death = if seg.interior.is_empty() {
                seg.endpoints().into_iter().map(|p| lk.time(p)).max()
            } else {
                seg.interior.iter().map(|&p| lk.time(p)).max()
            };
            DiagramPoint {
                birth: lk.time(b),
                death: death.expect("segment has pixels"),
                segment_id: seg.id,
                branch: b,
            }
        })
        .collect();
    PersistenceDiagram {
        kind: DiagramKind::AgePersistence,
        step: field.index,
        points,
    }
}

/// `step - max creation time` over each segment's interior and bounding
/// pixels.
pub fn growth_persistence(
    graph: &SkeletonGraph,
    field: &CreationTimeField,
    step: usize,
) -> GrowthField {
    check(graph, field);
    let lk = Lookup { graph, field };
    let values = graph
        .segments()
        .iter()
        .map(|seg| {
            let newest = seg.pixels().map(|p| lk.time(p)).max().unwrap_or(0);
            (step as u32).saturating_sub(newest)
        })
        .collect();
    GrowthField { step, values }
}

/// Removes the flagged segments: their interior pixels, and bounding pixels
/// all of whose segments are flagged. Pixels on no segment are kept.
pub fn remove_segments(graph: &SkeletonGraph, removed: &[bool]) -> SkeletonGraph {
    let incident = graph.incident_segments();
    let keep: Vec<Pixel> = graph
        .pixels()
        .iter()
        .enumerate()
        .filter(|(v, _)| {
            let segs = &incident[*v];
            segs.is_empty() || segs.iter().any(|&s| !removed[s])
        })
        .map(|(_, p)| p)
        .collect();
    let set = graph.pixels();
    let kept = PixelSet::new(set.width(), set.height(), set.index(), keep)
        .expect("subset of a valid pixel set");
    SkeletonGraph::build(kept)
}

/// Removes every segment with `|death - birth| >= threshold` at any of its
/// branch points.
pub fn filter_by_inconsistency(
    graph: &SkeletonGraph,
    diagram: &PersistenceDiagram,
    threshold: u32,
) -> SkeletonGraph {
    let mut removed = vec![false; graph.segments().len()];
    for pt in &diagram.points {
        if pt.persistence() >= threshold {
            removed[pt.segment_id] = true;
        }
    }
    remove_segments(graph, &removed)
}

/// Keeps a segment only if each of its branch incidences has age
/// persistence above `age_threshold` or branch inconsistency below
/// `bi_threshold`. `u32::MAX` as age threshold disables the age clause.
pub fn filter_combined(
    graph: &SkeletonGraph,
    bi: &PersistenceDiagram,
    age: &PersistenceDiagram,
    bi_threshold: u32,
    age_threshold: u32,
) -> SkeletonGraph {
    assert_eq!(
        bi.points.len(),
        age.points.len(),
        "diagrams of different graphs"
    );
    let mut removed = vec![false; graph.segments().len()];
    for (b, a) in bi.points.iter().zip(&age.points) {
        debug_assert_eq!((b.segment_id, b.branch), (a.segment_id, a.branch));
        let old = a.signed() > age_threshold as i64;
        let consistent = b.persistence() < bi_threshold;
        if !(old || consistent) {
            removed[b.segment_id] = true;
        }
    }
    remove_segments(graph, &removed)
}

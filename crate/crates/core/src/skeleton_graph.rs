//! 8-connectivity graphs over skeleton pixels.
//!
//! Vertices are the pixels of a [`PixelSet`]; two pixels are adjacent when
//! their Chebyshev distance is 1. Pixels are classified by degree and the
//! regular (degree 2) pixels are partitioned into segments:
//!
//! * a run of regular pixels between two non-regular pixels,
//! * an empty-interior segment for every pair of directly adjacent
//!   non-regular pixels,
//! * a closed loop of regular pixels with no anchor (a pure cycle).
//!
//! Together the segments cover every edge of the graph exactly once.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pixel::{Pixel, PixelSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DegreeClass {
    Isolated,
    Endpoint,
    Regular,
    Branch,
}

impl DegreeClass {
    pub fn from_degree(degree: usize) -> Self {
        match degree {
            0 => DegreeClass::Isolated,
            1 => DegreeClass::Endpoint,
            2 => DegreeClass::Regular,
            _ => DegreeClass::Branch,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DegreeClass::Isolated => "isolated",
            DegreeClass::Endpoint => "endpoint",
            DegreeClass::Regular => "regular",
            DegreeClass::Branch => "branch",
        }
    }
}

/// Which bounding pixel of a segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Start,
    End,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub id: usize,
    /// Regular pixels, consecutive entries are 8-neighbours.
    pub interior: Vec<Pixel>,
    /// Non-regular pixels attached before `interior[0]` and after its last
    /// entry. `None` for pure cycles. Both entries are equal for a loop that
    /// leaves and re-enters the same branch point.
    pub ends: Option<[Pixel; 2]>,
}

impl Segment {
    /// The distinct bounding pixels (0, 1 or 2 of them).
    pub fn endpoints(&self) -> Vec<Pixel> {
        match self.ends {
            None => Vec::new(),
            Some([a, b]) if a == b => vec![a],
            Some([a, b]) => vec![a, b],
        }
    }

    pub fn end(&self, side: Side) -> Option<Pixel> {
        self.ends.map(|[a, b]| match side {
            Side::Start => a,
            Side::End => b,
        })
    }

    /// The segment pixel next to the bounding pixel on `side`: the adjacent
    /// interior pixel, or the opposite bounding pixel when the interior is
    /// empty.
    pub fn first_from(&self, side: Side) -> Option<Pixel> {
        let [a, b] = self.ends?;
        Some(match (side, self.interior.first(), self.interior.last()) {
            (Side::Start, Some(&p), _) => p,
            (Side::End, _, Some(&p)) => p,
            (Side::Start, None, _) => b,
            (Side::End, _, None) => a,
        })
    }

    pub fn is_cycle(&self) -> bool {
        self.ends.is_none()
    }

    /// Interior followed by the distinct bounding pixels.
    pub fn pixels(&self) -> impl Iterator<Item = Pixel> + '_ {
        self.interior.iter().copied().chain(self.endpoints())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkeletonGraph {
    pixels: PixelSet,
    adjacency: Vec<Vec<u32>>,
    classes: Vec<DegreeClass>,
    segments: Vec<Segment>,
    segment_of: Vec<Option<u32>>,
}

impl SkeletonGraph {
    pub fn build(pixels: PixelSet) -> Self {
        let adjacency: Vec<Vec<u32>> = pixels
            .iter()
            .map(|p| {
                p.neighbors()
                    .filter_map(|q| pixels.position(q).map(|j| j as u32))
                    .collect()
            })
            .collect();
        let classes: Vec<DegreeClass> = adjacency
            .iter()
            .map(|a| DegreeClass::from_degree(a.len()))
            .collect();
        let mut graph = SkeletonGraph {
            segment_of: vec![None; pixels.len()],
            pixels,
            adjacency,
            classes,
            segments: Vec::new(),
        };
        graph.extract_segments();
        graph
    }

    fn extract_segments(&mut self) {
        let n = self.pixels.len();
        let is_anchor = |c: DegreeClass| matches!(c, DegreeClass::Endpoint | DegreeClass::Branch);
        for i in 0..n {
            if !is_anchor(self.classes[i]) {
                continue;
            }
            for k in 0..self.adjacency[i].len() {
                let j = self.adjacency[i][k] as usize;
                if self.classes[j] == DegreeClass::Regular {
                    if self.segment_of[j].is_none() {
                        self.walk_from_anchor(i, j);
                    }
                } else if i < j {
                    let id = self.segments.len();
                    let ends = [self.pixels.pixels()[i], self.pixels.pixels()[j]];
                    self.segments.push(Segment {
                        id,
                        interior: Vec::new(),
                        ends: Some(ends),
                    });
                }
            }
        }
        for i in 0..n {
            if self.classes[i] == DegreeClass::Regular && self.segment_of[i].is_none() {
                self.walk_cycle(i);
            }
        }
    }

    /// The neighbour of regular vertex `cur` that is not `prev`.
    fn step(&self, prev: usize, cur: usize) -> usize {
        let [a, b] = [
            self.adjacency[cur][0] as usize,
            self.adjacency[cur][1] as usize,
        ];
        if a == prev {
            b
        } else {
            a
        }
    }

    fn walk_from_anchor(&mut self, anchor: usize, first: usize) {
        let mut run = vec![first];
        let (mut prev, mut cur) = (anchor, first);
        let last_anchor = loop {
            let next = self.step(prev, cur);
            if self.classes[next] != DegreeClass::Regular {
                break next;
            }
            run.push(next);
            prev = cur;
            cur = next;
        };
        let px = self.pixels.pixels();
        let (mut start, mut end) = (px[anchor], px[last_anchor]);
        let reverse = if start == end {
            px[*run.last().unwrap()] < px[run[0]]
        } else {
            end < start
        };
        if reverse {
            run.reverse();
            std::mem::swap(&mut start, &mut end);
        }
        self.push_segment(run, Some([start, end]));
    }

    fn walk_cycle(&mut self, start: usize) {
        let mut run = vec![start];
        let (mut prev, mut cur) = (start, self.adjacency[start][0] as usize);
        while cur != start {
            run.push(cur);
            let next = self.step(prev, cur);
            prev = cur;
            cur = next;
        }
        self.push_segment(run, None);
    }

    fn push_segment(&mut self, run: Vec<usize>, ends: Option<[Pixel; 2]>) {
        let id = self.segments.len();
        for &v in &run {
            self.segment_of[v] = Some(id as u32);
        }
        let interior = run.iter().map(|&v| self.pixels.pixels()[v]).collect();
        self.segments.push(Segment { id, interior, ends });
    }

    pub fn pixels(&self) -> &PixelSet {
        &self.pixels
    }

    pub fn index(&self) -> usize {
        self.pixels.index()
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn segment(&self, id: usize) -> Option<&Segment> {
        self.segments.get(id)
    }

    pub fn vertex(&self, p: Pixel) -> Option<usize> {
        self.pixels.position(p)
    }

    pub fn neighbors(&self, p: Pixel) -> impl Iterator<Item = Pixel> + '_ {
        let adj = self
            .vertex(p)
            .map(|v| self.adjacency[v].as_slice())
            .unwrap_or(&[]);
        adj.iter().map(|&j| self.pixels.pixels()[j as usize])
    }

    /// Neighbour vertex ids of vertex `v`, ascending.
    pub fn adjacent_vertices(&self, v: usize) -> &[u32] {
        &self.adjacency[v]
    }

    pub fn degree(&self, p: Pixel) -> Option<usize> {
        self.vertex(p).map(|v| self.adjacency[v].len())
    }

    pub fn class_of(&self, p: Pixel) -> Option<DegreeClass> {
        self.vertex(p).map(|v| self.classes[v])
    }

    pub fn classes(&self) -> &[DegreeClass] {
        &self.classes
    }

    pub fn branch_points(&self) -> Vec<Pixel> {
        self.pixels
            .iter()
            .zip(&self.classes)
            .filter(|(_, &c)| c == DegreeClass::Branch)
            .map(|(p, _)| p)
            .collect()
    }

    /// The segment whose interior contains `p`; `None` for non-regular
    /// pixels.
    pub fn segment_of(&self, p: Pixel) -> Result<Option<&Segment>> {
        let v = self
            .vertex(p)
            .ok_or(Error::UnknownPixel { x: p.x, y: p.y })?;
        Ok(self.segment_of[v].map(|id| &self.segments[id as usize]))
    }

    /// Segment id for each vertex whose interior contains it.
    pub fn segment_ids(&self) -> &[Option<u32>] {
        &self.segment_of
    }

    /// Ids of all segments touching each vertex, as interior pixel or as a
    /// bounding pixel.
    pub fn incident_segments(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.len()];
        for seg in &self.segments {
            for p in seg.pixels() {
                let v = self.vertex(p).expect("segment pixels are vertices");
                if out[v].last() != Some(&seg.id) {
                    out[v].push(seg.id);
                }
            }
        }
        out
    }

    /// Debug export: `x,y,degree_class,segment_id` (segment id empty for
    /// non-regular pixels).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,degree_class,segment_id\n");
        for (v, p) in self.pixels.iter().enumerate() {
            let _ = write!(out, "{},{},{},", p.x, p.y, self.classes[v].as_str());
            if let Some(id) = self.segment_of[v] {
                let _ = write!(out, "{id}");
            }
            out.push('\n');
        }
        out
    }
}

pub fn build_graph(pixels: PixelSet) -> SkeletonGraph {
    SkeletonGraph::build(pixels)
}

pub fn branch_points(graph: &SkeletonGraph) -> Vec<Pixel> {
    graph.branch_points()
}

pub fn segment_of(graph: &SkeletonGraph, pixel: Pixel) -> Result<Option<&Segment>> {
    graph.segment_of(pixel)
}

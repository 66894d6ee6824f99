//! Nearest-neighbour matching between consecutive skeletons and the
//! known / growth / decay / irregular pixel classification.
//!
//! Every pixel of step `i` is matched forward to its nearest pixel of step
//! `i + 1`, and every pixel of step `i + 1` backward to its nearest pixel of
//! step `i` (exact squared Euclidean distance, ties to the smallest `(y, x)`).
//!
//! For a pixel `q` of step `i + 1` with backward partner `p`:
//!
//! * `reciprocal`: `p` is matched forward to `q`,
//! * `extra_forward`: forward matches into `q` from pixels other than `p`,
//! * `extra_backward`: backward matches into `p` from pixels other than `q`.
//!
//! | class     | predicate                                                  |
//! |-----------|------------------------------------------------------------|
//! | known     | reciprocal, `extra_forward == 0`, `extra_backward == 0`    |
//! | growth    | not known, `extra_forward <= 1`                            |
//! | decay     | `extra_forward >= 2`, `extra_backward <= 1`                |
//! | irregular | `extra_forward >= 2`, `extra_backward >= 2`                |
//!
//! A growth pixel that no forward match reaches is new at step `i + 1`.

mod grid;

pub use grid::{nearest_by_scan, GridIndex, DEFAULT_CELL};

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pixel::PixelSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PixelClass {
    Known,
    Growth,
    Decay,
    Irregular,
}

impl PixelClass {
    pub const ALL: [PixelClass; 4] = [
        PixelClass::Known,
        PixelClass::Growth,
        PixelClass::Decay,
        PixelClass::Irregular,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PixelClass::Known => "known",
            PixelClass::Growth => "growth",
            PixelClass::Decay => "decay",
            PixelClass::Irregular => "irregular",
        }
    }
}

impl std::str::FromStr for PixelClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PixelClass::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Input(format!("unknown pixel class {s:?}")))
    }
}

/// Matches between step `from_index` and step `to_index = from_index + 1`.
///
/// Match targets are vertex ids, i.e. positions in the target
/// [`PixelSet`]'s sorted pixel list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchSet {
    pub from_index: usize,
    pub to_index: usize,
    /// `forward[i]`: nearest pixel of step `i + 1` for pixel `i` of step `i`.
    /// `None` when the later step is empty.
    pub forward: Option<Vec<u32>>,
    /// `backward[j]`: nearest pixel of step `i` for pixel `j` of step `i + 1`.
    /// `None` when the earlier step is empty.
    pub backward: Option<Vec<u32>>,
    /// One class per pixel of the later step.
    pub classification: Vec<PixelClass>,
}

impl MatchSet {
    /// One of the two steps is empty, so one direction could not be computed.
    pub fn is_degenerate(&self) -> bool {
        self.forward.is_none() || self.backward.is_none()
    }

    /// Number of forward matches arriving at each pixel of the later step.
    pub fn forward_in_degree(&self) -> Vec<u32> {
        let mut deg = vec![0u32; self.classification.len()];
        if let Some(fwd) = &self.forward {
            for &q in fwd {
                deg[q as usize] += 1;
            }
        }
        deg
    }

    /// Debug export `direction,from_x,from_y,to_x,to_y`.
    pub fn matches_csv(&self, prev: &PixelSet, next: &PixelSet) -> String {
        let mut out = String::from("direction,from_x,from_y,to_x,to_y\n");
        let (pp, np) = (prev.pixels(), next.pixels());
        if let Some(fwd) = &self.forward {
            for (i, &j) in fwd.iter().enumerate() {
                let (a, b) = (pp[i], np[j as usize]);
                let _ = writeln!(out, "forward,{},{},{},{}", a.x, a.y, b.x, b.y);
            }
        }
        if let Some(bwd) = &self.backward {
            for (j, &i) in bwd.iter().enumerate() {
                let (a, b) = (np[j], pp[i as usize]);
                let _ = writeln!(out, "backward,{},{},{},{}", a.x, a.y, b.x, b.y);
            }
        }
        out
    }

    /// Debug export `x,y,class` over the later step.
    pub fn classes_csv(&self, next: &PixelSet) -> String {
        let mut out = String::from("x,y,class\n");
        for (p, c) in next.iter().zip(&self.classification) {
            let _ = writeln!(out, "{},{},{}", p.x, p.y, c.as_str());
        }
        out
    }

    pub fn class_counts(&self) -> [usize; 4] {
        let mut counts = [0; 4];
        for c in &self.classification {
            counts[*c as usize] += 1;
        }
        counts
    }
}

/// For every pixel of `from`, the vertex id of its nearest pixel in `to`.
pub fn nearest_targets(from: &PixelSet, to: &PixelSet) -> Vec<u32> {
    let width = from.width().max(to.width());
    let height = from.height().max(to.height());
    let index = GridIndex::new(to.pixels(), width, height, DEFAULT_CELL);
    from.iter()
        .map(|p| index.nearest(p).expect("target set is non-empty"))
        .collect()
}

/// Forward and backward matches between consecutive steps, classified.
pub fn match_pair(prev: &PixelSet, next: &PixelSet) -> MatchSet {
    let from_index = prev.index();
    let to_index = from_index + 1;
    if prev.is_empty() || next.is_empty() {
        log::warn!(
            "degenerate step {from_index}->{to_index}: {} -> {} pixels",
            prev.len(),
            next.len()
        );
        return MatchSet {
            from_index,
            to_index,
            forward: (prev.is_empty() || !next.is_empty()).then(Vec::new),
            backward: (next.is_empty() || !prev.is_empty()).then(Vec::new),
            classification: vec![PixelClass::Growth; next.len()],
        };
    }
    let mut set = MatchSet {
        from_index,
        to_index,
        forward: Some(nearest_targets(prev, next)),
        backward: Some(nearest_targets(next, prev)),
        classification: Vec::new(),
    };
    classify(&mut set);
    set
}

/// Fills `classification` from the forward and backward maps. Degenerate
/// sets are left as they are.
pub fn classify(matches: &mut MatchSet) {
    let (Some(fwd), Some(bwd)) = (&matches.forward, &matches.backward) else {
        return;
    };
    let mut forward_in = vec![0u32; bwd.len()];
    for &q in fwd {
        forward_in[q as usize] += 1;
    }
    let mut backward_in = vec![0u32; fwd.len()];
    for &p in bwd {
        backward_in[p as usize] += 1;
    }
    matches.classification = bwd
        .iter()
        .enumerate()
        .map(|(q, &p)| {
            let reciprocal = fwd[p as usize] as usize == q;
            let extra_forward = forward_in[q] - reciprocal as u32;
            let extra_backward = backward_in[p as usize] - 1;
            if reciprocal && extra_forward == 0 && extra_backward == 0 {
                PixelClass::Known
            } else if extra_forward <= 1 {
                PixelClass::Growth
            } else if extra_backward <= 1 {
                PixelClass::Decay
            } else {
                PixelClass::Irregular
            }
        })
        .collect();
}

/// Matches for every consecutive pair, in time order.
pub fn match_all(sequence: &[PixelSet]) -> Result<Vec<MatchSet>> {
    if sequence.len() < 2 {
        return Err(Error::Input(format!(
            "matching needs at least 2 time steps, got {}",
            sequence.len()
        )));
    }
    Ok(sequence
        .par_windows(2)
        .map(|w| match_pair(&w[0], &w[1]))
        .collect())
}

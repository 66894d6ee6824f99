//! Per-pixel creation times, propagated through the matches of consecutive
//! steps and cleaned up with a neighbourhood mode filter.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pixel::{Pixel, PixelSet};
use crate::skeleton_graph::SkeletonGraph;
use crate::temporal_match::{MatchSet, PixelClass};

/// Creation times of one step, aligned with the step's sorted pixel list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CreationTimeField {
    pub index: usize,
    pub times: Vec<u32>,
}

impl CreationTimeField {
    pub fn time_of(&self, pixels: &PixelSet, p: Pixel) -> Option<u32> {
        pixels.position(p).map(|v| self.times[v])
    }

    pub fn max(&self) -> Option<u32> {
        self.times.iter().copied().max()
    }

    /// `x,y,creation_time`
    pub fn to_csv(&self, pixels: &PixelSet) -> String {
        let mut out = String::from("x,y,creation_time\n");
        for (p, t) in pixels.iter().zip(&self.times) {
            let _ = writeln!(out, "{},{},{t}", p.x, p.y);
        }
        out
    }
}

/// Where the mode filter runs relative to propagation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Smoothing {
    /// Smooth every step right after propagating it; the smoothed times feed
    /// the next step.
    #[default]
    EachStep,
    /// Propagate unsmoothed times and smooth each field only for output.
    AtExport,
    Off,
}

impl Smoothing {
    pub fn as_str(self) -> &'static str {
        match self {
            Smoothing::EachStep => "each-step",
            Smoothing::AtExport => "at-export",
            Smoothing::Off => "off",
        }
    }
}

/// Fields before and after smoothing. Identical when smoothing is off.
#[derive(Debug, Clone)]
pub struct Propagation {
    pub raw: Vec<CreationTimeField>,
    pub smoothed: Vec<CreationTimeField>,
}

fn check_alignment(sequence: &[&PixelSet], matches: &[MatchSet]) -> Result<()> {
    if sequence.is_empty() {
        return Err(Error::Input("empty sequence".into()));
    }
    if matches.len() + 1 != sequence.len() {
        return Err(Error::Input(format!(
            "{} match sets for {} steps",
            matches.len(),
            sequence.len()
        )));
    }
    for (i, m) in matches.iter().enumerate() {
        let (prev, next) = (sequence[i], sequence[i + 1]);
        let fwd_ok = m.forward.as_ref().is_none_or(|f| f.len() == prev.len());
        let bwd_ok = m.backward.as_ref().is_none_or(|b| b.len() == next.len());
        if m.from_index != prev.index()
            || m.classification.len() != next.len()
            || !fwd_ok
            || !bwd_ok
        {
            return Err(Error::Input(format!(
                "match set {} does not fit steps {} and {}",
                m.from_index,
                prev.index(),
                next.index()
            )));
        }
    }
    Ok(())
}

/// Times of step `step` from the times of the step before it.
fn propagate_step(prev: &[u32], matches: &MatchSet, step: u32) -> Vec<u32> {
    let n_next = matches.classification.len();
    let Some(bwd) = &matches.backward else {
        return vec![step; n_next];
    };
    let fwd = matches.forward.as_deref().unwrap_or(&[]);
    let mut incoming = vec![0u32; n_next];
    let mut min_incoming = vec![u32::MAX; n_next];
    for (p, &q) in fwd.iter().enumerate() {
        incoming[q as usize] += 1;
        min_incoming[q as usize] = min_incoming[q as usize].min(prev[p]);
    }
    bwd.iter()
        .enumerate()
        .map(|(q, &p)| {
            let partner = prev[p as usize];
            match matches.classification[q] {
                PixelClass::Known => partner,
                PixelClass::Growth if incoming[q] == 0 => step,
                PixelClass::Growth => partner,
                PixelClass::Decay | PixelClass::Irregular => partner.min(min_incoming[q]),
            }
        })
        .collect()
}

/// Unsmoothed creation times for every step. Step 0 is all zeros.
pub fn propagate(sequence: &[PixelSet], matches: &[MatchSet]) -> Result<Vec<CreationTimeField>> {
    let refs: Vec<&PixelSet> = sequence.iter().collect();
    check_alignment(&refs, matches)?;
    let mut fields = vec![CreationTimeField {
        index: 0,
        times: vec![0; sequence[0].len()],
    }];
    for (i, m) in matches.iter().enumerate() {
        let times = propagate_step(&fields[i].times, m, (i + 1) as u32);
        fields.push(CreationTimeField {
            index: i + 1,
            times,
        });
    }
    Ok(fields)
}

/// Propagation with the mode filter placed according to `smoothing`.
///
/// `graphs[i]` must be the graph of step `i`.
pub fn propagate_with(
    graphs: &[SkeletonGraph],
    matches: &[MatchSet],
    smoothing: Smoothing,
) -> Result<Propagation> {
    let refs: Vec<&PixelSet> = graphs.iter().map(SkeletonGraph::pixels).collect();
    check_alignment(&refs, matches)?;
    let first = CreationTimeField {
        index: 0,
        times: vec![0; graphs[0].len()],
    };
    let mut raw = vec![first.clone()];
    let mut smoothed = vec![first];
    for (i, m) in matches.iter().enumerate() {
        let source = match smoothing {
            Smoothing::EachStep => &smoothed[i].times,
            Smoothing::AtExport | Smoothing::Off => &raw[i].times,
        };
        let field = CreationTimeField {
            index: i + 1,
            times: propagate_step(source, m, (i + 1) as u32),
        };
        let out = match smoothing {
            Smoothing::Off => field.clone(),
            Smoothing::EachStep | Smoothing::AtExport => smooth(&field, &graphs[i + 1], m),
        };
        raw.push(field);
        smoothed.push(out);
    }
    Ok(Propagation { raw, smoothed })
}

/// One simultaneous pass of the mode filter over the growth pixels of a step.
///
/// A growth pixel takes the most frequent time among its skeleton
/// neighbours (ties to the smaller time) when strictly more than half of
/// those neighbours disagree with it.
pub fn smooth(
    field: &CreationTimeField,
    graph: &SkeletonGraph,
    matches: &MatchSet,
) -> CreationTimeField {
    let mut times = field.times.clone();
    let mut counts: Vec<(u32, u32)> = Vec::with_capacity(8);
    for (v, class) in matches.classification.iter().enumerate() {
        if *class != PixelClass::Growth {
            continue;
        }
        let neighbors = graph.adjacent_vertices(v);
        if neighbors.is_empty() {
            continue;
        }
        let own = field.times[v];
        let differ = neighbors
            .iter()
            .filter(|&&u| field.times[u as usize] != own)
            .count();
        if 2 * differ <= neighbors.len() {
            continue;
        }
        counts.clear();
        for &u in neighbors {
            let t = field.times[u as usize];
            match counts.iter_mut().find(|(time, _)| *time == t) {
                Some((_, c)) => *c += 1,
                None => counts.push((t, 1)),
            }
        }
        let (mode, _) = counts
            .iter()
            .copied()
            .min_by_key(|&(t, c)| (std::cmp::Reverse(c), t))
            .expect("at least one neighbour");
        times[v] = mode;
    }
    CreationTimeField {
        index: field.index,
        times,
    }
}

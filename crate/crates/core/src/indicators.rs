//! Scalar activity curves over time and their comparison by dynamic time
//! warping.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::creation_time::CreationTimeField;
use crate::error::{Error, Result};
use crate::persistence::{GrowthField, PersistenceDiagram};
use crate::skeleton_graph::SkeletonGraph;
use crate::temporal_match::PixelClass;

pub const BRANCH_INCONSISTENCY: &str = "branch_inconsistency";
pub const AGE_PERSISTENCE: &str = "age_persistence";
pub const VIVACITY: &str = "vivacity";

/// A labelled series of `(step, value)` samples. Steps may have gaps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActivityCurve {
    pub label: String,
    pub samples: Vec<(usize, f64)>,
}

impl ActivityCurve {
    pub fn new(label: impl Into<String>, samples: Vec<(usize, f64)>) -> Result<Self> {
        let label = label.into();
        if samples.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::Input(format!("curve {label}: steps not increasing")));
        }
        if samples.iter().any(|&(_, v)| !v.is_finite() || v < 0.0) {
            return Err(Error::Input(format!(
                "curve {label}: values must be finite and non-negative"
            )));
        }
        Ok(ActivityCurve { label, samples })
    }

    pub fn values(&self) -> Vec<f64> {
        self.samples.iter().map(|&(_, v)| v).collect()
    }

    /// `step,value`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,value\n");
        for (t, v) in &self.samples {
            let _ = writeln!(out, "{t},{v}");
        }
        out
    }

    pub fn from_csv(label: &str, text: &str) -> Result<Self> {
        let mut samples = Vec::new();
        for (n, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let parsed = line
                .split_once(',')
                .and_then(|(t, v)| Some((t.trim().parse().ok()?, v.trim().parse().ok()?)));
            match parsed {
                Some(s) => samples.push(s),
                None => {
                    return Err(Error::Input(format!(
                        "curve {label}, line {}: expected \"step,value\"",
                        n + 1
                    )))
                }
            }
        }
        ActivityCurve::new(label, samples)
    }
}

/// `sum |death - birth|^order` over the diagram.
pub fn persistence_power_sum(diagram: &PersistenceDiagram, order: f64) -> Result<f64> {
    if order.is_nan() || order <= 0.0 || order.is_infinite() {
        return Err(Error::Parameter(format!(
            "persistence order must be positive, got {order}"
        )));
    }
    Ok(diagram
        .points
        .iter()
        .map(|p| (p.persistence() as f64).powf(order))
        .fold(0.0, |acc, x| acc + x))
}

/// `(sum |death - birth|^order)^(1/order)`
pub fn total_persistence(diagram: &PersistenceDiagram, order: f64) -> Result<f64> {
    let sum = persistence_power_sum(diagram, order)?;
    Ok(if order == 2.0 {
        sum.sqrt()
    } else if order == 1.0 {
        sum
    } else {
        sum.powf(order.recip())
    })
}

/// Which growth persistence decides whether a growth pixel counts as vivid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VivacityMode {
    /// The smallest growth persistence among the segments through the pixel.
    #[default]
    Segment,
    /// Step minus the pixel's own creation time.
    Pixel,
    /// Fraction of segments that hold a growth pixel and have growth
    /// persistence at most `t_G`.
    Segments,
}

impl std::str::FromStr for VivacityMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "segment" => Ok(VivacityMode::Segment),
            "pixel" => Ok(VivacityMode::Pixel),
            "segments" => Ok(VivacityMode::Segments),
            other => Err(Error::Parameter(format!(
                "vivacity mode must be segment, pixel or segments, got {other:?}"
            ))),
        }
    }
}

/// Growth persistence attributed to each pixel: the minimum over the
/// segments touching it, or `step - own time` for pixels on no segment.
pub fn pixel_growth_persistence(
    graph: &SkeletonGraph,
    growth: &GrowthField,
    field: &CreationTimeField,
) -> Vec<u32> {
    graph
        .incident_segments()
        .iter()
        .zip(&field.times)
        .map(|(segs, &t)| {
            segs.iter()
                .map(|&s| growth.values[s])
                .min()
                .unwrap_or((growth.step as u32).saturating_sub(t))
        })
        .collect()
}

/// Fraction of pixels that are growth pixels with `pers_g <= t_g`.
/// `None` for an empty step.
pub fn vivacity_ratio(classes: &[PixelClass], pers_g: &[u32], t_g: u32) -> Option<f64> {
    assert_eq!(classes.len(), pers_g.len());
    if classes.is_empty() {
        return None;
    }
    let vivid = classes
        .iter()
        .zip(pers_g)
        .filter(|&(&c, &g)| c == PixelClass::Growth && g <= t_g)
        .count();
    Some(vivid as f64 / classes.len() as f64)
}

pub fn vivacity(
    graph: &SkeletonGraph,
    classes: &[PixelClass],
    growth: &GrowthField,
    field: &CreationTimeField,
    t_g: u32,
    mode: VivacityMode,
) -> Option<f64> {
    match mode {
        VivacityMode::Segment => vivacity_ratio(
            classes,
            &pixel_growth_persistence(graph, growth, field),
            t_g,
        ),
        VivacityMode::Pixel => {
            let own: Vec<u32> = field
                .times
                .iter()
                .map(|&t| (growth.step as u32).saturating_sub(t))
                .collect();
            vivacity_ratio(classes, &own, t_g)
        }
        VivacityMode::Segments => {
            let segments = graph.segments();
            if segments.is_empty() {
                return None;
            }
            let vivid = segments
                .iter()
                .filter(|seg| {
                    growth.values[seg.id] <= t_g
                        && seg.pixels().any(|p| {
                            graph.vertex(p).map(|v| classes[v]) == Some(PixelClass::Growth)
                        })
                })
                .count();
            Some(vivid as f64 / segments.len() as f64)
        }
    }
}

/// Classical DTW with `|a - b|` cost and no window constraint.
pub fn dtw(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Input(
            "dynamic time warping needs non-empty curves".into(),
        ));
    }
    let m = b.len();
    let mut prev = vec![f64::INFINITY; m + 1];
    let mut cur = vec![f64::INFINITY; m + 1];
    prev[0] = 0.0;
    for &x in a {
        cur[0] = f64::INFINITY;
        for j in 1..=m {
            let best = prev[j - 1].min(prev[j]).min(cur[j - 1]);
            cur[j] = (x - b[j - 1]).abs() + best;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    Ok(prev[m])
}

pub fn dtw_distance(a: &ActivityCurve, b: &ActivityCurve) -> Result<f64> {
    dtw(&a.values(), &b.values())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DtwReport {
    pub a: String,
    pub b: String,
    pub distance: f64,
}

/// Per-step inputs of [`curve_suite`].
pub struct StepIndicators<'a> {
    pub step: usize,
    pub branch_inconsistency: &'a PersistenceDiagram,
    pub age_persistence: &'a PersistenceDiagram,
    /// `None` leaves a gap in the vivacity curve.
    pub vivacity: Option<f64>,
}

/// Total branch-inconsistency persistence, total age persistence and
/// vivacity over the steps.
pub fn curve_suite(steps: &[StepIndicators<'_>], order: f64) -> Result<Vec<ActivityCurve>> {
    let mut bi = Vec::with_capacity(steps.len());
    let mut age = Vec::with_capacity(steps.len());
    let mut viv = Vec::with_capacity(steps.len());
    for s in steps {
        bi.push((s.step, total_persistence(s.branch_inconsistency, order)?));
        age.push((s.step, total_persistence(s.age_persistence, order)?));
        if let Some(v) = s.vivacity {
            viv.push((s.step, v));
        }
    }
    Ok(vec![
        ActivityCurve::new(BRANCH_INCONSISTENCY, bi)?,
        ActivityCurve::new(AGE_PERSISTENCE, age)?,
        ActivityCurve::new(VIVACITY, viv)?,
    ])
}

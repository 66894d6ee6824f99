//! End-to-end runs over a frame sequence and the artifact tree they leave.
//!
//! ```text
//! <out>/manifest.json        status, configuration, tie-break rules, class totals
//! <out>/timings.json         wall-clock seconds per stage, when enabled
//! <out>/steps/NNNN/          creation_time.csv, classes.csv, diagrams.csv,
//!                            growth.csv, filtered.txt (+ optional debug files)
//! <out>/curves/              one step,value CSV per curve, curves.json,
//!                            power_sums.csv
//! <out>/render/NNNN.png      overlays, when requested
//! ```
//!
//! Everything except `timings.json` depends only on the configuration and
//! the input, whatever the number of worker threads. Timings are off by
//! default so that repeated runs leave identical trees.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use image::{Rgb, RgbImage};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coords;
use crate::creation_time::{propagate_with, CreationTimeField, Smoothing};
use crate::error::{Error, Result};
use crate::indicators::{
    self, curve_suite, dtw_distance, persistence_power_sum, vivacity, ActivityCurve, DtwReport,
    StepIndicators, VivacityMode,
};
use crate::persistence::{
    age_persistence_diagram, branch_inconsistency_diagram, filter_by_inconsistency,
    filter_combined, growth_persistence, DiagramKind, DiagramPoint, GrowthField,
    PersistenceDiagram, DIAGRAM_CSV_HEADER,
};
use crate::pixel::{Pixel, PixelSet};
use crate::skeleton_graph::SkeletonGraph;
use crate::skeletonize::{load_sequence, BinarizeConfig, InputFormat, Polarity};
use crate::temporal_match::{match_all, MatchSet, PixelClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FilterMode {
    /// Drop segments with branch inconsistency at or above `bi_threshold`.
    #[default]
    Inconsistency,
    /// Keep segments that are old enough or consistent enough.
    Combined,
    Off,
}

impl std::str::FromStr for FilterMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inconsistency" => Ok(FilterMode::Inconsistency),
            "combined" => Ok(FilterMode::Combined),
            "off" => Ok(FilterMode::Off),
            other => Err(Error::Parameter(format!(
                "filter must be inconsistency, combined or off, got {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RenderMode {
    CreationTime,
    Class,
    Growth,
    Inconsistency,
}

impl RenderMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RenderMode::CreationTime => "creation-time",
            RenderMode::Class => "class",
            RenderMode::Growth => "growth",
            RenderMode::Inconsistency => "inconsistency",
        }
    }
}

impl std::str::FromStr for RenderMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "creation-time" => Ok(RenderMode::CreationTime),
            "class" => Ok(RenderMode::Class),
            "growth" => Ok(RenderMode::Growth),
            "inconsistency" => Ok(RenderMode::Inconsistency),
            other => Err(Error::Parameter(format!(
                "render mode must be creation-time, class, growth or inconsistency, got {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExportToggles {
    pub creation_time: bool,
    /// Creation times before smoothing, next to the smoothed ones.
    pub raw_creation_time: bool,
    pub classes: bool,
    pub diagrams: bool,
    pub growth: bool,
    pub filtered: bool,
    pub matches: bool,
    pub graph: bool,
    /// Stage wall-clock times in `timings.json`.
    pub timings: bool,
}

impl Default for ExportToggles {
    fn default() -> Self {
        ExportToggles {
            creation_time: true,
            raw_creation_time: false,
            classes: true,
            diagrams: true,
            growth: true,
            filtered: true,
            matches: false,
            graph: false,
            timings: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub format: InputFormat,
    pub threshold: u8,
    pub polarity: Polarity,
    pub smoothing: Smoothing,
    pub filter: FilterMode,
    pub bi_threshold: u32,
    pub age_threshold: u32,
    pub t_g: u32,
    pub persistence_order: f64,
    pub vivacity: VivacityMode,
    pub export: ExportToggles,
    pub render: Option<RenderMode>,
    /// Output location and thread count do not change results and are left
    /// out of the manifest.
    #[serde(skip_serializing)]
    pub out: PathBuf,
    /// Worker threads, 0 for one per core.
    #[serde(skip_serializing)]
    pub jobs: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            input: PathBuf::new(),
            format: InputFormat::Png,
            threshold: BinarizeConfig::default().threshold,
            polarity: Polarity::Above,
            smoothing: Smoothing::EachStep,
            filter: FilterMode::Inconsistency,
            bi_threshold: 5,
            age_threshold: 5,
            t_g: 10,
            persistence_order: 2.0,
            vivacity: VivacityMode::Segment,
            export: ExportToggles::default(),
            render: None,
            out: PathBuf::from("out"),
            jobs: 0,
        }
    }
}

impl PipelineConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.input.as_os_str().is_empty() {
            return Err(Error::Parameter("no input given".into()));
        }
        if self.out.as_os_str().is_empty() {
            return Err(Error::Parameter("no output directory given".into()));
        }
        if !(self.persistence_order > 0.0 && self.persistence_order.is_finite()) {
            return Err(Error::Parameter(format!(
                "persistence order must be positive, got {}",
                self.persistence_order
            )));
        }
        Ok(())
    }

    fn binarize(&self) -> BinarizeConfig {
        BinarizeConfig {
            threshold: self.threshold,
            polarity: self.polarity,
        }
    }
}

/// Everything computed for one step.
#[derive(Debug)]
pub struct StepResult {
    pub graph: SkeletonGraph,
    pub matches: Option<MatchSet>,
    pub raw: CreationTimeField,
    pub field: CreationTimeField,
    pub branch_inconsistency: PersistenceDiagram,
    pub age_persistence: PersistenceDiagram,
    pub growth: GrowthField,
    pub filtered: SkeletonGraph,
    pub vivacity: Option<f64>,
}

#[derive(Debug)]
pub struct Analysis {
    pub steps: Vec<StepResult>,
    pub curves: Vec<ActivityCurve>,
}

#[derive(Serialize)]
struct Decisions {
    match_tie_break: &'static str,
    classification: &'static str,
    smoothing: &'static str,
    mode_tie_break: &'static str,
    first_pixel_of_empty_segment: &'static str,
    segment_order: &'static str,
    vivacity_step_0: &'static str,
}

const DECISIONS: Decisions = Decisions {
    match_tie_break: "smallest (y, x)",
    classification: "known: reciprocal, no other forward or backward match; \
        growth: at most one other forward match; decay: at most one other backward match; \
        irregular: otherwise",
    smoothing: "",
    mode_tie_break: "smallest time",
    first_pixel_of_empty_segment: "opposite bounding pixel",
    segment_order: "interior starts next to the smaller (y, x) bounding pixel",
    vivacity_step_0: "no sample (no classification)",
};

#[derive(Serialize, Default)]
struct ClassTotals {
    known: usize,
    growth: usize,
    decay: usize,
    irregular: usize,
}

#[derive(Serialize)]
struct Manifest<'a> {
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    failed_stage: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    steps: usize,
    width: u32,
    height: u32,
    completed_stages: Vec<&'static str>,
    class_totals: ClassTotals,
    irregular_fraction: f64,
    degenerate_steps: Vec<usize>,
    config: &'a PipelineConfig,
    decisions: Decisions,
}

#[derive(Serialize)]
struct Timing {
    stage: &'static str,
    seconds: f64,
}

struct Progress {
    completed: Vec<&'static str>,
    timings: Vec<Timing>,
    steps: usize,
    width: u32,
    height: u32,
    totals: ClassTotals,
    degenerate: Vec<usize>,
}

impl Progress {
    fn stage<T>(&mut self, name: &'static str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let start = Instant::now();
        log::info!("stage {name}");
        let out = f().map_err(|e| match e {
            e @ Error::Stage { .. } => e,
            e if name == "load" => e,
            e => Error::Stage {
                stage: name,
                source: Box::new(e),
            },
        })?;
        self.timings.push(Timing {
            stage: name,
            seconds: start.elapsed().as_secs_f64(),
        });
        self.completed.push(name);
        Ok(out)
    }
}

/// Runs every stage and writes the artifact tree under `config.out`.
///
/// A failure after the output directory exists still leaves a manifest,
/// with `"status": "FAILED"`.
pub fn run(config: &PipelineConfig) -> Result<Analysis> {
    config.validate()?;
    std::fs::create_dir_all(&config.out).map_err(|e| Error::io(&config.out, e))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| Error::Parameter(format!("cannot start {} workers: {e}", config.jobs)))?;
    let mut progress = Progress {
        completed: Vec::new(),
        timings: Vec::new(),
        steps: 0,
        width: 0,
        height: 0,
        totals: ClassTotals::default(),
        degenerate: Vec::new(),
    };
    let result = pool.install(|| run_stages(config, &mut progress));
    let failed_stage = match &result {
        Ok(_) => None,
        Err(Error::Stage { stage, .. }) => Some(*stage),
        Err(_) => Some("load"),
    };
    let classified = progress.totals.known
        + progress.totals.growth
        + progress.totals.decay
        + progress.totals.irregular;
    let irregular_fraction = if classified == 0 {
        0.0
    } else {
        progress.totals.irregular as f64 / classified as f64
    };
    let manifest = Manifest {
        status: if result.is_ok() { "ok" } else { "FAILED" },
        failed_stage,
        error: result.as_ref().err().map(|e| e.to_string()),
        steps: progress.steps,
        width: progress.width,
        height: progress.height,
        completed_stages: progress.completed.clone(),
        class_totals: progress.totals,
        irregular_fraction,
        degenerate_steps: progress.degenerate,
        config,
        decisions: Decisions {
            smoothing: config.smoothing.as_str(),
            ..DECISIONS
        },
    };
    write_text(
        &config.out.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;
    let total: f64 = progress.timings.iter().map(|t| t.seconds).sum();
    log::info!("finished in {total:.2} s");
    if config.export.timings {
        let timings = serde_json::json!({ "stages": progress.timings, "total_seconds": total });
        write_text(
            &config.out.join("timings.json"),
            serde_json::to_string_pretty(&timings)? + "\n",
        )?;
    }
    result
}

fn run_stages(config: &PipelineConfig, progress: &mut Progress) -> Result<Analysis> {
    let sequence = progress.stage("load", || {
        load_sequence(&config.input, config.format, &config.binarize())
    })?;
    progress.steps = sequence.len();
    progress.width = sequence[0].width();
    progress.height = sequence[0].height();

    let graphs: Vec<SkeletonGraph> = progress.stage("graph", || {
        Ok(sequence.into_par_iter().map(SkeletonGraph::build).collect())
    })?;
    let pixel_sets: Vec<PixelSet> = graphs.iter().map(|g| g.pixels().clone()).collect();
    let matches = progress.stage("match", || {
        if pixel_sets.len() < 2 {
            return Ok(Vec::new());
        }
        match_all(&pixel_sets)
    })?;
    drop(pixel_sets);
    for m in &matches {
        let [k, g, d, i] = m.class_counts();
        progress.totals.known += k;
        progress.totals.growth += g;
        progress.totals.decay += d;
        progress.totals.irregular += i;
        if m.is_degenerate() {
            progress.degenerate.push(m.to_index);
        }
    }
    let classified = progress.totals.known
        + progress.totals.growth
        + progress.totals.decay
        + progress.totals.irregular;
    if classified > 0 {
        log::info!(
            "irregular pixels: {:.1}% of {classified}",
            100.0 * progress.totals.irregular as f64 / classified as f64
        );
    }

    let propagation = progress.stage("propagate", || {
        propagate_with(&graphs, &matches, config.smoothing)
    })?;

    let mut matches: Vec<Option<MatchSet>> = matches.into_iter().map(Some).collect();
    matches.insert(0, None);
    let per_step: Vec<_> = graphs
        .into_iter()
        .zip(matches)
        .zip(propagation.raw.into_iter().zip(propagation.smoothed))
        .collect();

    let with_diagrams = progress.stage("persistence", || {
        Ok(per_step
            .into_par_iter()
            .enumerate()
            .map(|(step, ((graph, matches), (raw, field)))| {
                let bi = branch_inconsistency_diagram(&graph, &field);
                let age = age_persistence_diagram(&graph, &field);
                let growth = growth_persistence(&graph, &field, step);
                (graph, matches, raw, field, bi, age, growth)
            })
            .collect::<Vec<_>>())
    })?;

    let filtered: Vec<SkeletonGraph> = progress.stage("filter", || {
        Ok(with_diagrams
            .par_iter()
            .map(|(graph, _, _, _, bi, age, _)| match config.filter {
                FilterMode::Inconsistency => {
                    filter_by_inconsistency(graph, bi, config.bi_threshold)
                }
                FilterMode::Combined => {
                    filter_combined(graph, bi, age, config.bi_threshold, config.age_threshold)
                }
                FilterMode::Off => graph.clone(),
            })
            .collect())
    })?;

    let (steps, curves) = progress.stage("indicators", || {
        let steps: Vec<StepResult> = with_diagrams
            .into_par_iter()
            .zip(filtered)
            .map(
                |((graph, matches, raw, field, bi, age, growth), filtered)| {
                    let viv = matches.as_ref().and_then(|m| {
                        vivacity(
                            &graph,
                            &m.classification,
                            &growth,
                            &field,
                            config.t_g,
                            config.vivacity,
                        )
                    });
                    StepResult {
                        graph,
                        matches,
                        raw,
                        field,
                        branch_inconsistency: bi,
                        age_persistence: age,
                        growth,
                        filtered,
                        vivacity: viv,
                    }
                },
            )
            .collect();
        let inputs: Vec<StepIndicators<'_>> = steps
            .iter()
            .enumerate()
            .map(|(step, s)| StepIndicators {
                step,
                branch_inconsistency: &s.branch_inconsistency,
                age_persistence: &s.age_persistence,
                vivacity: s.vivacity,
            })
            .collect();
        let curves = curve_suite(&inputs, config.persistence_order)?;
        Ok((steps, curves))
    })?;

    progress.stage("export", || export(config, &steps, &curves))?;
    if let Some(mode) = config.render {
        progress.stage("render", || {
            let dir = config.out.join("render");
            create_dir(&dir)?;
            steps.par_iter().enumerate().try_for_each(|(i, s)| {
                let classes = s.matches.as_ref().map(|m| m.classification.as_slice());
                let values = overlay_values(
                    mode,
                    &s.graph,
                    &s.field,
                    classes,
                    &s.growth,
                    &s.branch_inconsistency,
                );
                write_png(
                    &dir.join(format!("{i:04}.png")),
                    &render_overlay(s.graph.pixels(), &values),
                )
            })
        })?;
    }
    Ok(Analysis { steps, curves })
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_text(path: &Path, text: String) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn step_dir(out: &Path, step: usize) -> PathBuf {
    out.join("steps").join(format!("{step:04}"))
}

fn export(config: &PipelineConfig, steps: &[StepResult], curves: &[ActivityCurve]) -> Result<()> {
    let ex = &config.export;
    steps
        .par_iter()
        .enumerate()
        .try_for_each(|(i, s)| -> Result<()> {
            let dir = step_dir(&config.out, i);
            create_dir(&dir)?;
            let pixels = s.graph.pixels();
            if ex.creation_time {
                write_text(&dir.join("creation_time.csv"), s.field.to_csv(pixels))?;
            }
            if ex.raw_creation_time {
                write_text(&dir.join("creation_time_raw.csv"), s.raw.to_csv(pixels))?;
            }
            if let Some(m) = &s.matches {
                if ex.classes {
                    write_text(&dir.join("classes.csv"), m.classes_csv(pixels))?;
                }
                if ex.matches {
                    let prev = steps[i - 1].graph.pixels();
                    write_text(&dir.join("matches.csv"), m.matches_csv(prev, pixels))?;
                }
            }
            if ex.graph {
                write_text(&dir.join("graph.csv"), s.graph.to_csv())?;
            }
            if ex.diagrams {
                let mut text = String::from(DIAGRAM_CSV_HEADER);
                s.branch_inconsistency.write_csv_rows(&mut text);
                s.age_persistence.write_csv_rows(&mut text);
                write_text(&dir.join("diagrams.csv"), text)?;
            }
            if ex.growth {
                write_text(&dir.join("growth.csv"), s.growth.to_csv())?;
            }
            if ex.filtered {
                coords::write(&dir.join("filtered.txt"), s.filtered.pixels())?;
            }
            Ok(())
        })?;

    let dir = config.out.join("curves");
    create_dir(&dir)?;
    for c in curves {
        write_text(&dir.join(format!("{}.csv", c.label)), c.to_csv())?;
    }
    write_text(
        &dir.join("curves.json"),
        serde_json::to_string_pretty(curves)? + "\n",
    )?;
    let mut sums = String::from("step,branch_inconsistency,age_persistence\n");
    for (i, s) in steps.iter().enumerate() {
        let bi = persistence_power_sum(&s.branch_inconsistency, config.persistence_order)?;
        let age = persistence_power_sum(&s.age_persistence, config.persistence_order)?;
        let _ = writeln!(sums, "{i},{bi},{age}");
    }
    write_text(&dir.join("power_sums.csv"), sums)
}

/// Value shown for each pixel of the step in an overlay.
pub fn overlay_values(
    mode: RenderMode,
    graph: &SkeletonGraph,
    field: &CreationTimeField,
    classes: Option<&[PixelClass]>,
    growth: &GrowthField,
    bi: &PersistenceDiagram,
) -> Vec<f64> {
    match mode {
        RenderMode::CreationTime => field.times.iter().map(|&t| t as f64).collect(),
        RenderMode::Class => match classes {
            Some(c) => c.iter().map(|&c| c as u8 as f64).collect(),
            None => vec![0.0; graph.len()],
        },
        RenderMode::Growth => indicators::pixel_growth_persistence(graph, growth, field)
            .into_iter()
            .map(f64::from)
            .collect(),
        RenderMode::Inconsistency => {
            let mut per_segment = vec![0u32; graph.segments().len()];
            for p in &bi.points {
                per_segment[p.segment_id] = per_segment[p.segment_id].max(p.persistence());
            }
            graph
                .incident_segments()
                .iter()
                .map(|segs| segs.iter().map(|&s| per_segment[s]).max().unwrap_or(0) as f64)
                .collect()
        }
    }
}

/// The smallest value is drawn at 15% red so it stays visible on white.
const RAMP_START: f64 = 0.15;

/// Skeleton pixels on a white background, coloured along a white to red
/// ramp spanning the observed value range.
pub fn render_overlay(pixels: &PixelSet, values: &[f64]) -> RgbImage {
    let mut img = RgbImage::from_pixel(pixels.width(), pixels.height(), Rgb([255, 255, 255]));
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for (p, &v) in pixels.iter().zip(values) {
        let t = if hi > lo { (v - lo) / (hi - lo) } else { 0.0 };
        let s = RAMP_START + (1.0 - RAMP_START) * t;
        let fade = (255.0 * (1.0 - s)).round() as u8;
        img.put_pixel(p.x, p.y, Rgb([255, fade, fade]));
    }
    img
}

fn write_png(path: &Path, img: &RgbImage) -> Result<()> {
    img.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| Error::io(path, std::io::Error::other(e)))
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Data rows after the header, with 1-based line numbers.
fn csv_rows(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .skip(1)
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| (n + 1, l.split(',').map(str::trim).collect()))
}

fn field_err(path: &Path, line: usize, what: &str) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: format!("bad {what}"),
    }
}

fn num<T: std::str::FromStr>(path: &Path, line: usize, s: Option<&&str>, what: &str) -> Result<T> {
    s.and_then(|s| s.parse().ok())
        .ok_or_else(|| field_err(path, line, what))
}

/// Reads `x,y,creation_time`.
pub fn read_creation_csv(path: &Path) -> Result<Vec<(Pixel, u32)>> {
    let text = read_text(path)?;
    csv_rows(&text)
        .map(|(n, f)| {
            let x = num(path, n, f.first(), "x")?;
            let y = num(path, n, f.get(1), "y")?;
            Ok((Pixel::new(x, y), num(path, n, f.get(2), "creation time")?))
        })
        .collect()
}

/// Reads `x,y,class`.
pub fn read_classes_csv(path: &Path) -> Result<Vec<(Pixel, PixelClass)>> {
    let text = read_text(path)?;
    csv_rows(&text)
        .map(|(n, f)| {
            let x = num(path, n, f.first(), "x")?;
            let y = num(path, n, f.get(1), "y")?;
            Ok((Pixel::new(x, y), num(path, n, f.get(2), "class")?))
        })
        .collect()
}

/// Reads `step,segment_id,pers_g` into a [`GrowthField`].
pub fn read_growth_csv(path: &Path, step: usize) -> Result<GrowthField> {
    let text = read_text(path)?;
    let mut values = Vec::new();
    for (n, f) in csv_rows(&text) {
        let id: usize = num(path, n, f.get(1), "segment id")?;
        if id != values.len() {
            return Err(field_err(path, n, "segment order"));
        }
        values.push(num(path, n, f.get(2), "growth persistence")?);
    }
    Ok(GrowthField { step, values })
}

/// Reads a diagrams CSV back into its branch-inconsistency and
/// age-persistence diagrams.
pub fn read_diagram_csv(path: &Path, step: usize) -> Result<[PersistenceDiagram; 2]> {
    let text = read_text(path)?;
    let mut out = [
        PersistenceDiagram {
            kind: DiagramKind::BranchInconsistency,
            step,
            points: Vec::new(),
        },
        PersistenceDiagram {
            kind: DiagramKind::AgePersistence,
            step,
            points: Vec::new(),
        },
    ];
    for (n, f) in csv_rows(&text) {
        let slot = match f.first().copied() {
            Some("branch-inconsistency") => 0,
            Some("age-persistence") => 1,
            _ => return Err(field_err(path, n, "diagram kind")),
        };
        let point = DiagramPoint {
            birth: num(path, n, f.get(2), "birth")?,
            death: num(path, n, f.get(3), "death")?,
            branch: Pixel::new(
                num(path, n, f.get(4), "branch x")?,
                num(path, n, f.get(5), "branch y")?,
            ),
            segment_id: num(path, n, f.get(6), "segment id")?,
        };
        out[slot].points.push(point);
    }
    Ok(out)
}

#[derive(Deserialize)]
struct ManifestDims {
    steps: usize,
    width: u32,
    height: u32,
}

/// Renders every step of an existing run from its exported files into
/// `out_dir`. Returns the number of images written.
pub fn render_run(run_dir: &Path, mode: RenderMode, out_dir: &Path) -> Result<usize> {
    let manifest_path = run_dir.join("manifest.json");
    let dims: ManifestDims = serde_json::from_str(&read_text(&manifest_path)?)?;
    create_dir(out_dir)?;
    (0..dims.steps).into_par_iter().try_for_each(|step| {
        let dir = step_dir(run_dir, step);
        let mut entries = read_creation_csv(&dir.join("creation_time.csv"))?;
        entries.sort_by_key(|e| e.0);
        let pixels = PixelSet::new(dims.width, dims.height, step, entries.iter().map(|e| e.0))?;
        let field = CreationTimeField {
            index: step,
            times: entries.iter().map(|e| e.1).collect(),
        };
        let graph = SkeletonGraph::build(pixels);
        let classes = if mode == RenderMode::Class && step > 0 {
            let mut c = read_classes_csv(&dir.join("classes.csv"))?;
            c.sort_by_key(|e| e.0);
            Some(c.into_iter().map(|e| e.1).collect::<Vec<_>>())
        } else {
            None
        };
        let growth = if mode == RenderMode::Growth {
            read_growth_csv(&dir.join("growth.csv"), step)?
        } else {
            GrowthField {
                step,
                values: vec![0; graph.segments().len()],
            }
        };
        let [bi, _] = if mode == RenderMode::Inconsistency {
            read_diagram_csv(&dir.join("diagrams.csv"), step)?
        } else {
            [
                PersistenceDiagram {
                    kind: DiagramKind::BranchInconsistency,
                    step,
                    points: Vec::new(),
                },
                PersistenceDiagram {
                    kind: DiagramKind::AgePersistence,
                    step,
                    points: Vec::new(),
                },
            ]
        };
        if growth.values.len() != graph.segments().len()
            || bi
                .points
                .iter()
                .any(|p| p.segment_id >= graph.segments().len())
        {
            return Err(Error::Input(format!(
                "{} does not match its creation-time export",
                dir.display()
            )));
        }
        let values = overlay_values(mode, &graph, &field, classes.as_deref(), &growth, &bi);
        write_png(
            &out_dir.join(format!("{step:04}.png")),
            &render_overlay(graph.pixels(), &values),
        )
    })?;
    Ok(dims.steps)
}

pub const CURVE_LABELS: [&str; 3] = [
    indicators::BRANCH_INCONSISTENCY,
    indicators::AGE_PERSISTENCE,
    indicators::VIVACITY,
];

pub fn read_curve(run_dir: &Path, label: &str) -> Result<ActivityCurve> {
    let path = run_dir.join("curves").join(format!("{label}.csv"));
    if !path.is_file() {
        return Err(Error::Input(format!("missing curve {}", path.display())));
    }
    ActivityCurve::from_csv(label, &read_text(&path)?)
}

/// DTW distance of each curve kind between two runs.
pub fn compare(run_a: &Path, run_b: &Path) -> Result<Vec<DtwReport>> {
    let name = |p: &Path| {
        p.file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| p.display().to_string())
    };
    let (name_a, name_b) = (name(run_a), name(run_b));
    CURVE_LABELS
        .iter()
        .map(|label| {
            let a = read_curve(run_a, label)?;
            let b = read_curve(run_b, label)?;
            Ok(DtwReport {
                a: format!("{name_a}/{label}"),
                b: format!("{name_b}/{label}"),
                distance: dtw_distance(&a, &b)?,
            })
        })
        .collect()
}

//! Scripted synthetic skeleton sequences with known creation times.
//!
//! A script starts from straight seed fingers (all pixels created at step 0)
//! and applies events: tips extend, branches spawn off existing pixels,
//! one-frame noise spurs appear, and finger portions are deleted, either for
//! good or for a number of frames. Every added pixel may touch only the pixel
//! it grows from, so the frames are one pixel wide without re-thinning.
//! Pixels that come back after a temporary deletion count as created at the
//! step they reappear.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coords;
use crate::error::{Error, Result};
use crate::pixel::{Pixel, PixelSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    N,
    NE,
    E,
    SE,
    S,
    SW,
    W,
    NW,
}

impl Direction {
    pub const ALL: [Direction; 8] = [
        Direction::N,
        Direction::NE,
        Direction::E,
        Direction::SE,
        Direction::S,
        Direction::SW,
        Direction::W,
        Direction::NW,
    ];

    /// `(dx, dy)` with `y` growing downwards.
    pub fn delta(self) -> (i64, i64) {
        match self {
            Direction::N => (0, -1),
            Direction::NE => (1, -1),
            Direction::E => (1, 0),
            Direction::SE => (1, 1),
            Direction::S => (0, 1),
            Direction::SW => (-1, 1),
            Direction::W => (-1, 0),
            Direction::NW => (-1, -1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FingerSeed {
    pub origin: [u32; 2],
    pub direction: Direction,
    /// Number of pixels, origin included.
    pub length: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Action {
    /// Appends `length` pixels at the finger's tip. With `until`, repeats at
    /// every step up to and including `until`.
    ExtendTip {
        finger: usize,
        length: u32,
        #[serde(default)]
        turn: Option<Direction>,
        #[serde(default)]
        allow_contact: bool,
        #[serde(default)]
        until: Option<usize>,
    },
    /// Starts a new finger next to pixel `at` of `parent`. New fingers are
    /// numbered after the seeds in the order their events run.
    SpawnBranch {
        parent: usize,
        at: usize,
        direction: Direction,
        length: u32,
        #[serde(default)]
        allow_contact: bool,
    },
    /// A spur of `length` pixels next to pixel `at` of `finger`, present in
    /// this step's frame only. Without a direction one is drawn from the
    /// script's random generator among those that fit.
    InjectNoiseSpur {
        finger: usize,
        at: usize,
        length: u32,
        #[serde(default)]
        direction: Option<Direction>,
    },
    /// Removes pixels `from..to` of the finger (`to` defaults to the tip),
    /// permanently or for `duration` frames. Only tip portions can go for
    /// good.
    DeleteSegment {
        finger: usize,
        from: usize,
        #[serde(default)]
        to: Option<usize>,
        #[serde(default)]
        duration: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptEvent {
    pub step: usize,
    #[serde(flatten)]
    pub action: Action,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthScript {
    pub seed: u64,
    pub width: u32,
    pub height: u32,
    pub steps: usize,
    pub fingers: Vec<FingerSeed>,
    #[serde(default)]
    pub events: Vec<ScriptEvent>,
}

impl GrowthScript {
    pub fn new(seed: u64, width: u32, height: u32, steps: usize) -> Self {
        GrowthScript {
            seed,
            width,
            height,
            steps,
            fingers: Vec::new(),
            events: Vec::new(),
        }
    }

    pub fn finger(mut self, origin: (u32, u32), direction: Direction, length: u32) -> Self {
        self.fingers.push(FingerSeed {
            origin: [origin.0, origin.1],
            direction,
            length,
        });
        self
    }

    pub fn event(mut self, step: usize, action: Action) -> Self {
        self.events.push(ScriptEvent { step, action });
        self
    }
}

/// True creation time and noise label of every pixel of one frame, aligned
/// with the frame's sorted pixel list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepTruth {
    pub times: Vec<u32>,
    pub noise: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    pub seed: u64,
    pub steps: Vec<StepTruth>,
}

#[derive(Serialize, Deserialize)]
struct TruthFile {
    seed: u64,
    steps: Vec<TruthStep>,
}

#[derive(Serialize, Deserialize)]
struct TruthStep {
    step: usize,
    /// `[x, y, creation_time, noise]`
    pixels: Vec<[u32; 4]>,
}

impl GroundTruth {
    pub fn to_json(&self, frames: &[PixelSet]) -> Result<String> {
        let file = TruthFile {
            seed: self.seed,
            steps: self
                .steps
                .iter()
                .zip(frames)
                .enumerate()
                .map(|(step, (truth, frame))| TruthStep {
                    step,
                    pixels: frame
                        .iter()
                        .zip(&truth.times)
                        .zip(&truth.noise)
                        .map(|((p, &t), &n)| [p.x, p.y, t, n as u32])
                        .collect(),
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }
}

struct Finger {
    path: Vec<Pixel>,
    born: Vec<u32>,
    direction: Direction,
    /// Hidden path range and the step it comes back.
    hidden: Option<(std::ops::Range<usize>, usize)>,
    /// Pixel of another finger the path grows from.
    anchor: Option<Pixel>,
}

impl Finger {
    fn is_visible(&self, i: usize) -> bool {
        i < self.path.len() && self.hidden.as_ref().is_none_or(|(r, _)| !r.contains(&i))
    }

    fn visible_pixel(&self, i: usize) -> Option<Pixel> {
        self.is_visible(i).then(|| self.path[i])
    }

    fn tip_hidden(&self) -> bool {
        self.hidden
            .as_ref()
            .is_some_and(|(r, _)| r.end == self.path.len())
    }

    fn tip(&self) -> Option<Pixel> {
        self.path.last().copied().or(self.anchor)
    }
}

struct State<'a> {
    script: &'a GrowthScript,
    fingers: Vec<Finger>,
    /// Every pixel that exists in some form, for contact checks.
    occupied: HashSet<Pixel>,
    spurs: Vec<Pixel>,
}

impl State<'_> {
    fn offset(&self, p: Pixel, d: Direction) -> Option<Pixel> {
        let (dx, dy) = d.delta();
        let (x, y) = (p.x as i64 + dx, p.y as i64 + dy);
        let inside =
            x >= 0 && y >= 0 && x < self.script.width as i64 && y < self.script.height as i64;
        inside.then(|| Pixel::new(x as u32, y as u32))
    }

    /// Pixels grown from `from` in direction `d`, checked for bounds and for
    /// contact with anything but their predecessor.
    fn ray(
        &self,
        from: Pixel,
        d: Direction,
        length: u32,
        allow_contact: bool,
    ) -> Option<Vec<Pixel>> {
        let mut out = Vec::with_capacity(length as usize);
        let mut prev = from;
        for _ in 0..length {
            let p = self.offset(prev, d)?;
            if self.occupied.contains(&p) || out.contains(&p) {
                return None;
            }
            let touches = p
                .neighbors()
                .filter(|&q| q != prev && (self.occupied.contains(&q) || out.contains(&q)))
                .count();
            if touches > 0 && !allow_contact {
                return None;
            }
            out.push(p);
            prev = p;
        }
        Some(out)
    }
}

fn gen_err(event: usize, step: usize, message: impl Into<String>) -> Error {
    Error::Generation {
        event,
        step,
        message: message.into(),
    }
}

/// Runs the script. Same script, same output, bit for bit.
pub fn generate(script: &GrowthScript) -> Result<(Vec<PixelSet>, GroundTruth)> {
    if script.steps == 0 || script.width == 0 || script.height == 0 {
        return Err(Error::Input(
            "script needs at least one step and a non-empty frame".into(),
        ));
    }
    for (i, e) in script.events.iter().enumerate() {
        let until = match e.action {
            Action::ExtendTip { until, .. } => until.unwrap_or(e.step),
            _ => e.step,
        };
        if e.step >= script.steps || until >= script.steps || until < e.step {
            return Err(gen_err(
                i,
                e.step,
                format!("step outside 0..{}", script.steps),
            ));
        }
    }
    let mut state = State {
        script,
        fingers: Vec::new(),
        occupied: HashSet::new(),
        spurs: Vec::new(),
    };
    for (i, seed) in script.fingers.iter().enumerate() {
        let origin = Pixel::new(seed.origin[0], seed.origin[1]);
        let seed_err = |m: &str| Error::Input(format!("finger {i}: {m}"));
        if seed.length == 0 {
            return Err(seed_err("length must be at least 1"));
        }
        if origin.x >= script.width || origin.y >= script.height {
            return Err(seed_err("origin outside the frame"));
        }
        if origin
            .neighbors()
            .chain([origin])
            .any(|q| state.occupied.contains(&q))
        {
            return Err(seed_err("touches another finger"));
        }
        let mut path = vec![origin];
        state.occupied.insert(origin);
        if seed.length > 1 {
            let rest = state
                .ray(origin, seed.direction, seed.length - 1, false)
                .ok_or_else(|| seed_err("leaves the frame or touches another finger"))?;
            state.occupied.extend(rest.iter().copied());
            path.extend(rest);
        }
        state.fingers.push(Finger {
            born: vec![0; path.len()],
            path,
            direction: seed.direction,
            hidden: None,
            anchor: None,
        });
    }

    let mut order: Vec<usize> = (0..script.events.len()).collect();
    order.sort_by_key(|&i| script.events[i].step);
    let mut rng = ChaCha8Rng::seed_from_u64(script.seed);
    let mut frames = Vec::with_capacity(script.steps);
    let mut truth = Vec::with_capacity(script.steps);

    for step in 0..script.steps {
        for f in &mut state.fingers {
            if let Some((range, back)) = f.hidden.clone() {
                if back == step {
                    for t in &mut f.born[range] {
                        *t = step as u32;
                    }
                    f.hidden = None;
                }
            }
        }
        for p in state.spurs.drain(..) {
            state.occupied.remove(&p);
        }
        let active = order.iter().copied().filter(|&i| {
            let e = &script.events[i];
            match e.action {
                Action::ExtendTip { until, .. } => {
                    (e.step..=until.unwrap_or(e.step)).contains(&step)
                }
                _ => e.step == step,
            }
        });
        let active: Vec<usize> = active.collect();
        for i in active {
            apply(&mut state, &mut rng, i, step)?;
        }
        let (frame, st) = emit(&state, step)?;
        frames.push(frame);
        truth.push(st);
    }
    Ok((
        frames,
        GroundTruth {
            seed: script.seed,
            steps: truth,
        },
    ))
}

fn apply(state: &mut State<'_>, rng: &mut ChaCha8Rng, i: usize, step: usize) -> Result<()> {
    let script = state.script;
    let event = &script.events[i];
    let finger_ref = |state: &State<'_>, id: usize| -> Result<()> {
        if id < state.fingers.len() {
            Ok(())
        } else {
            Err(gen_err(i, step, format!("no finger {id}")))
        }
    };
    match event.action {
        Action::ExtendTip {
            finger,
            length,
            turn,
            allow_contact,
            ..
        } => {
            finger_ref(state, finger)?;
            let f = &state.fingers[finger];
            if f.tip_hidden() {
                return Err(gen_err(
                    i,
                    step,
                    format!("tip of finger {finger} is hidden"),
                ));
            }
            let direction = match turn {
                Some(d) if step == event.step => d,
                _ => f.direction,
            };
            let tip = f.tip().expect("fingers are never empty");
            let new = state
                .ray(tip, direction, length, allow_contact)
                .ok_or_else(|| {
                    gen_err(
                        i,
                        step,
                        format!("finger {finger} cannot grow {direction:?} from {tip}"),
                    )
                })?;
            state.occupied.extend(new.iter().copied());
            let f = &mut state.fingers[finger];
            f.direction = direction;
            f.born.extend(std::iter::repeat_n(step as u32, new.len()));
            f.path.extend(new);
        }
        Action::SpawnBranch {
            parent,
            at,
            direction,
            length,
            allow_contact,
        } => {
            finger_ref(state, parent)?;
            let anchor = state.fingers[parent]
                .visible_pixel(at)
                .ok_or_else(|| gen_err(i, step, format!("finger {parent} has no pixel {at}")))?;
            if length == 0 {
                return Err(gen_err(i, step, "branch length must be at least 1"));
            }
            let new = state
                .ray(anchor, direction, length, allow_contact)
                .ok_or_else(|| {
                    gen_err(
                        i,
                        step,
                        format!("branch {direction:?} from {anchor} does not fit"),
                    )
                })?;
            state.occupied.extend(new.iter().copied());
            state.fingers.push(Finger {
                born: vec![step as u32; new.len()],
                path: new,
                direction,
                hidden: None,
                anchor: Some(anchor),
            });
        }
        Action::InjectNoiseSpur {
            finger,
            at,
            length,
            direction,
        } => {
            finger_ref(state, finger)?;
            let anchor = state.fingers[finger]
                .visible_pixel(at)
                .ok_or_else(|| gen_err(i, step, format!("finger {finger} has no pixel {at}")))?;
            if length == 0 {
                return Err(gen_err(i, step, "spur length must be at least 1"));
            }
            let candidates = match direction {
                Some(d) => vec![d],
                None => {
                    let mut all = Direction::ALL.to_vec();
                    all.shuffle(rng);
                    all
                }
            };
            let spur = candidates
                .into_iter()
                .find_map(|d| state.ray(anchor, d, length, false))
                .ok_or_else(|| gen_err(i, step, format!("no room for a spur at {anchor}")))?;
            state.occupied.extend(spur.iter().copied());
            state.spurs.extend(spur);
        }
        Action::DeleteSegment {
            finger,
            from,
            to,
            duration,
        } => {
            finger_ref(state, finger)?;
            let f = &mut state.fingers[finger];
            if f.hidden.is_some() {
                return Err(gen_err(
                    i,
                    step,
                    format!("finger {finger} is already hidden"),
                ));
            }
            let to = to.unwrap_or(f.path.len());
            if from >= to || to > f.path.len() {
                return Err(gen_err(
                    i,
                    step,
                    format!("finger {finger} has no pixels {from}..{to}"),
                ));
            }
            if from == 0 && f.anchor.is_none() && duration.is_none() {
                return Err(gen_err(i, step, "cannot delete a whole seed finger"));
            }
            match duration {
                Some(0) => return Err(gen_err(i, step, "duration must be at least 1")),
                Some(d) => f.hidden = Some((from..to, step + d)),
                None if to < f.path.len() => {
                    return Err(gen_err(
                        i,
                        step,
                        "only a tip portion can be deleted for good",
                    ))
                }
                None => {
                    for p in f.path.drain(from..) {
                        state.occupied.remove(&p);
                    }
                    f.born.truncate(from);
                }
            }
        }
    }
    Ok(())
}

fn emit(state: &State<'_>, step: usize) -> Result<(PixelSet, StepTruth)> {
    let mut entries: Vec<(Pixel, u32, bool)> = Vec::new();
    for f in &state.fingers {
        entries.extend(
            (0..f.path.len())
                .filter(|&i| f.is_visible(i))
                .map(|i| (f.path[i], f.born[i], false)),
        );
    }
    entries.extend(state.spurs.iter().map(|&p| (p, step as u32, true)));
    entries.sort_by_key(|e| e.0);
    // growth never lands on an occupied pixel
    debug_assert!(entries.windows(2).all(|w| w[0].0 != w[1].0));
    let frame = PixelSet::new(
        state.script.width,
        state.script.height,
        step,
        entries.iter().map(|e| e.0),
    )?;
    let truth = StepTruth {
        times: entries.iter().map(|e| e.1).collect(),
        noise: entries.iter().map(|e| e.2).collect(),
    };
    Ok((frame, truth))
}

/// Writes `frame_NNNN.txt` coordinate files, a `frames.json` manifest and
/// the `truth.json` sidecar into `dir`.
pub fn write_sequence(dir: &Path, frames: &[PixelSet], truth: &GroundTruth) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut names = Vec::with_capacity(frames.len());
    for (i, frame) in frames.iter().enumerate() {
        let name = format!("frame_{i:04}.txt");
        coords::write(&dir.join(&name), frame)?;
        names.push(name);
    }
    let manifest = serde_json::json!({ "frames": names });
    let path = dir.join("frames.json");
    std::fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")
        .map_err(|e| Error::io(&path, e))?;
    let path = dir.join("truth.json");
    std::fs::write(&path, truth.to_json(frames)? + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(())
}

/// Ground-truth time of every pixel per step, keyed by pixel.
pub fn truth_maps(frames: &[PixelSet], truth: &GroundTruth) -> Vec<HashMap<Pixel, u32>> {
    frames
        .iter()
        .zip(&truth.steps)
        .map(|(f, t)| f.iter().zip(t.times.iter().copied()).collect())
        .collect()
}

//! Brute-force oracles and shared scripts for the integration tests.
#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use skelevo::creation_time::{propagate_with, Propagation, Smoothing};
use skelevo::skeletonize::BinaryMask;
use skelevo::synthgen::{Action, Direction, GrowthScript};
use skelevo::temporal_match::{match_all, MatchSet, PixelClass};
use skelevo::{Pixel, PixelSet, SkeletonGraph};

/// Number of 8-connected foreground components, by breadth-first flood fill.
pub fn component_count(width: u32, height: u32, fg: &[bool]) -> usize {
    let (w, h) = (width as i64, height as i64);
    let mut seen = vec![false; fg.len()];
    let mut count = 0;
    for start in 0..fg.len() {
        if !fg[start] || seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(c) = queue.pop_front() {
            let (x, y) = ((c as i64) % w, (c as i64) / w);
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= w || ny >= h {
                        continue;
                    }
                    let n = (ny * w + nx) as usize;
                    if fg[n] && !seen[n] {
                        seen[n] = true;
                        queue.push_back(n);
                    }
                }
            }
        }
    }
    count
}

pub fn mask_components(mask: &BinaryMask) -> usize {
    component_count(mask.width(), mask.height(), mask.foreground())
}

pub fn set_components(set: &PixelSet) -> usize {
    mask_components(&BinaryMask::from_pixels(set))
}

/// Index of the nearest pixel of `to`, smallest index on ties, by checking
/// every candidate.
pub fn brute_nearest(p: Pixel, to: &[Pixel]) -> Option<u32> {
    let mut best: Option<(i64, u32)> = None;
    for (i, q) in to.iter().enumerate() {
        let dx = p.x as i64 - q.x as i64;
        let dy = p.y as i64 - q.y as i64;
        let d = dx * dx + dy * dy;
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, i as u32));
        }
    }
    best.map(|(_, i)| i)
}

pub struct BruteMatch {
    pub forward: Vec<u32>,
    pub backward: Vec<u32>,
    pub classification: Vec<PixelClass>,
}

/// Matching of two non-empty sets from scratch: nearest neighbours by full
/// scan, classes from explicit preimage sets.
pub fn brute_match(prev: &PixelSet, next: &PixelSet) -> BruteMatch {
    let forward: Vec<u32> = prev
        .iter()
        .map(|p| brute_nearest(p, next.pixels()).unwrap())
        .collect();
    let backward: Vec<u32> = next
        .iter()
        .map(|q| brute_nearest(q, prev.pixels()).unwrap())
        .collect();
    let classification = (0..next.len())
        .map(|q| {
            let p = backward[q] as usize;
            let into_q: HashSet<usize> = (0..prev.len())
                .filter(|&i| forward[i] as usize == q)
                .collect();
            let into_p: HashSet<usize> = (0..next.len())
                .filter(|&j| backward[j] as usize == p)
                .collect();
            let mutual = into_q.contains(&p);
            let others_q = into_q.iter().filter(|&&i| i != p).count();
            let others_p = into_p.iter().filter(|&&j| j != q).count();
            if mutual && others_q == 0 && others_p == 0 {
                PixelClass::Known
            } else if others_q < 2 {
                PixelClass::Growth
            } else if others_p < 2 {
                PixelClass::Decay
            } else {
                PixelClass::Irregular
            }
        })
        .collect();
    BruteMatch {
        forward,
        backward,
        classification,
    }
}

/// Number of 8-neighbours of `p` inside `set`, by listing offsets.
pub fn brute_degree(set: &PixelSet, p: Pixel) -> usize {
    let mut n = 0;
    for dy in -1i64..=1 {
        for dx in -1i64..=1 {
            if dx == 0 && dy == 0 {
                continue;
            }
            let (x, y) = (p.x as i64 + dx, p.y as i64 + dy);
            if x >= 0 && y >= 0 && set.contains(Pixel::new(x as u32, y as u32)) {
                n += 1;
            }
        }
    }
    n
}

/// Dynamic time warping by listing every monotone warping path.
pub fn dtw_enumerate(a: &[f64], b: &[f64]) -> f64 {
    fn walk(a: &[f64], b: &[f64], i: usize, j: usize, acc: f64, best: &mut f64) {
        let acc = acc + (a[i] - b[j]).abs();
        if i + 1 == a.len() && j + 1 == b.len() {
            *best = best.min(acc);
            return;
        }
        if i + 1 < a.len() {
            walk(a, b, i + 1, j, acc, best);
        }
        if j + 1 < b.len() {
            walk(a, b, i, j + 1, acc, best);
        }
        if i + 1 < a.len() && j + 1 < b.len() {
            walk(a, b, i + 1, j + 1, acc, best);
        }
    }
    let mut best = f64::INFINITY;
    walk(a, b, 0, 0, 0.0, &mut best);
    best
}

pub fn extend(finger: usize, until: usize) -> Action {
    Action::ExtendTip {
        finger,
        length: 2,
        turn: None,
        allow_contact: false,
        until: Some(until),
    }
}

pub fn spawn(parent: usize, at: usize, direction: Direction) -> Action {
    Action::SpawnBranch {
        parent,
        at,
        direction,
        length: 2,
        allow_contact: false,
    }
}

/// Three fingers growing 2 px per step, two side branches and one noise
/// spur that lives for a single frame at step 20.
pub fn three_finger_script() -> GrowthScript {
    GrowthScript::new(7, 256, 256, 40)
        .finger((60, 10), Direction::SE, 4)
        .finger((10, 200), Direction::NE, 4)
        .finger((200, 240), Direction::N, 4)
        .event(1, extend(0, 39))
        .event(1, extend(1, 39))
        .event(1, extend(2, 39))
        .event(2, spawn(0, 2, Direction::SW))
        .event(3, extend(3, 25))
        .event(12, spawn(0, 23, Direction::NE))
        .event(13, extend(4, 26))
        .event(
            20,
            Action::InjectNoiseSpur {
                finger: 1,
                at: 1,
                length: 3,
                direction: None,
            },
        )
}

/// An old diagonal finger and a young branch that leaves it, bends around
/// and touches it again at step 11, closing a loop.
pub fn loop_script() -> GrowthScript {
    let turn = |direction, length, allow_contact| Action::ExtendTip {
        finger: 1,
        length,
        turn: Some(direction),
        allow_contact,
        until: None,
    };
    let mut s = GrowthScript::new(11, 64, 64, 12)
        .finger((10, 10), Direction::SE, 40)
        .event(1, spawn(0, 5, Direction::NE));
    for step in 2..=3 {
        s = s.event(step, turn(Direction::NE, 2, false));
    }
    for step in 4..=8 {
        s = s.event(step, turn(Direction::SE, 2, false));
    }
    s.event(9, turn(Direction::SW, 1, false))
        .event(10, turn(Direction::SW, 2, false))
        .event(11, turn(Direction::SW, 2, true))
}

/// Step at which the loop of [`loop_script`] closes.
pub const LOOP_STEP: usize = 11;

/// Anchor step, perturbation step and perturbed path range of
/// [`fork_script`].
pub const FORK_ANCHOR_STEP: usize = 10;
pub const FORK_EVENT_STEP: usize = 12;

/// A diagonal finger that forks into two side branches from one pixel, with
/// an optional one-frame disappearance of the 16 pixels behind the fork.
pub fn fork_script(perturbed: bool) -> GrowthScript {
    let anchor = 2 * FORK_ANCHOR_STEP + 3;
    let mut s = GrowthScript::new(3, 240, 240, 40)
        .finger((60, 60), Direction::SE, 4)
        .event(1, extend(0, 39))
        .event(FORK_ANCHOR_STEP + 1, spawn(0, anchor, Direction::NE))
        .event(FORK_ANCHOR_STEP + 1, spawn(0, anchor, Direction::SW))
        .event(FORK_ANCHOR_STEP + 2, extend(1, 39))
        .event(FORK_ANCHOR_STEP + 2, extend(2, 39));
    if perturbed {
        s = s.event(
            FORK_EVENT_STEP,
            Action::DeleteSegment {
                finger: 0,
                from: anchor - 16,
                to: Some(anchor),
                duration: Some(1),
            },
        );
    }
    s
}

pub struct Analyzed {
    pub graphs: Vec<SkeletonGraph>,
    pub matches: Vec<MatchSet>,
    pub times: Propagation,
}

pub fn analyze(frames: &[PixelSet]) -> Analyzed {
    let graphs: Vec<SkeletonGraph> = frames.iter().cloned().map(SkeletonGraph::build).collect();
    let matches = match_all(frames).unwrap();
    let times = propagate_with(&graphs, &matches, Smoothing::EachStep).unwrap();
    Analyzed {
        graphs,
        matches,
        times,
    }
}

pub fn strict_local_max(curve: &[f64], k: usize) -> bool {
    k > 0 && k + 1 < curve.len() && curve[k] > curve[k - 1] && curve[k] > curve[k + 1]
}

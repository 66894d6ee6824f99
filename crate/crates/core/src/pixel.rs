//! Pixel coordinates and per-frame pixel sets.
//!
//! Pixels are ordered row-major, i.e. lexicographically by `(y, x)`. Every
//! deterministic choice in the crate (nearest-neighbour ties, segment
//! orientation, cycle anchors) uses this order.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pixel {
    pub x: u32,
    pub y: u32,
}

impl Pixel {
    pub const fn new(x: u32, y: u32) -> Self {
        Pixel { x, y }
    }

    /// Squared Euclidean distance, exact.
    pub fn dist2(self, other: Pixel) -> u64 {
        let dx = self.x.abs_diff(other.x) as u64;
        let dy = self.y.abs_diff(other.y) as u64;
        dx * dx + dy * dy
    }

    /// Chebyshev distance 1: the two pixels are distinct 8-neighbours.
    pub fn is_adjacent(self, other: Pixel) -> bool {
        self != other && self.x.abs_diff(other.x) <= 1 && self.y.abs_diff(other.y) <= 1
    }

    /// The 8-neighbourhood with non-negative coordinates, in `(y, x)` order.
    pub fn neighbors(self) -> impl Iterator<Item = Pixel> {
        const OFFSETS: [(i64, i64); 8] = [
            (-1, -1),
            (0, -1),
            (1, -1),
            (-1, 0),
            (1, 0),
            (-1, 1),
            (0, 1),
            (1, 1),
        ];
        OFFSETS.into_iter().filter_map(move |(dx, dy)| {
            let x = self.x as i64 + dx;
            let y = self.y as i64 + dy;
            (x >= 0 && y >= 0 && x <= u32::MAX as i64 && y <= u32::MAX as i64)
                .then(|| Pixel::new(x as u32, y as u32))
        })
    }
}

impl Ord for Pixel {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.y, self.x).cmp(&(other.y, other.x))
    }
}

impl PartialOrd for Pixel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Pixel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Skeleton pixels of one time step.
///
/// Pixels are kept sorted in `(y, x)` order without duplicates, so a pixel's
/// position in [`PixelSet::pixels`] is a stable vertex id for the step.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PixelSet {
    width: u32,
    height: u32,
    index: usize,
    pixels: Vec<Pixel>,
}

impl PixelSet {
    pub fn new(
        width: u32,
        height: u32,
        index: usize,
        pixels: impl IntoIterator<Item = Pixel>,
    ) -> Result<Self> {
        let mut pixels: Vec<Pixel> = pixels.into_iter().collect();
        if let Some(p) = pixels.iter().find(|p| p.x >= width || p.y >= height) {
            return Err(Error::Input(format!(
                "pixel {p} lies outside the {width}x{height} frame"
            )));
        }
        pixels.sort_unstable();
        pixels.dedup();
        Ok(PixelSet {
            width,
            height,
            index,
            pixels,
        })
    }

    pub fn empty(width: u32, height: u32, index: usize) -> Self {
        PixelSet {
            width,
            height,
            index,
            pixels: Vec::new(),
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Time-step ordinal.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn with_index(mut self, index: usize) -> Self {
        self.index = index;
        self
    }

    pub fn pixels(&self) -> &[Pixel] {
        &self.pixels
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Pixel> + '_ {
        self.pixels.iter().copied()
    }

    pub fn position(&self, p: Pixel) -> Option<usize> {
        self.pixels.binary_search(&p).ok()
    }

    pub fn contains(&self, p: Pixel) -> bool {
        self.position(p).is_some()
    }
}

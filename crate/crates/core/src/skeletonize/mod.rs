//! Raster frames to 1-pixel-wide skeletons.
//!
//! Frames are binarized against a fixed threshold and the foreground is
//! reduced with two-subiteration Zhang-Suen thinning. Out-of-bounds
//! neighbours count as background.

mod load;

pub use load::{load_frame, load_sequence, InputFormat};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pixel::{Pixel, PixelSet};

/// One grayscale time step, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub width: u32,
    pub height: u32,
    pub values: Vec<u8>,
    pub index: usize,
}

impl Frame {
    pub fn new(width: u32, height: u32, values: Vec<u8>, index: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Input(format!("degenerate frame {width}x{height}")));
        }
        if values.len() != width as usize * height as usize {
            return Err(Error::Input(format!(
                "frame {width}x{height} needs {} values, got {}",
                width as usize * height as usize,
                values.len()
            )));
        }
        Ok(Frame {
            width,
            height,
            values,
            index,
        })
    }
}

/// Which side of the threshold is foreground.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    /// `value >= threshold`
    #[default]
    Above,
    /// `value < threshold`
    Below,
}

impl std::str::FromStr for Polarity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "above" => Ok(Polarity::Above),
            "below" => Ok(Polarity::Below),
            other => Err(Error::Parameter(format!(
                "polarity must be \"above\" or \"below\", got {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinarizeConfig {
    pub threshold: u8,
    pub polarity: Polarity,
}

impl Default for BinarizeConfig {
    fn default() -> Self {
        BinarizeConfig {
            threshold: 128,
            polarity: Polarity::Above,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: u32,
    height: u32,
    foreground: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: u32, height: u32, foreground: Vec<bool>) -> Result<Self> {
        if foreground.len() != width as usize * height as usize {
            return Err(Error::Input(format!(
                "mask {width}x{height} needs {} cells, got {}",
                width as usize * height as usize,
                foreground.len()
            )));
        }
        Ok(BinaryMask {
            width,
            height,
            foreground,
        })
    }

    pub fn empty(width: u32, height: u32) -> Self {
        BinaryMask {
            width,
            height,
            foreground: vec![false; width as usize * height as usize],
        }
    }

    /// Rasterizes a pixel set back into a mask of the same frame size.
    pub fn from_pixels(pixels: &PixelSet) -> Self {
        let mut mask = BinaryMask::empty(pixels.width(), pixels.height());
        for p in pixels.iter() {
            mask.set(p.x, p.y, true);
        }
        mask
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn foreground(&self) -> &[bool] {
        &self.foreground
    }

    /// Out-of-bounds reads are background.
    pub fn get(&self, x: i64, y: i64) -> bool {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            return false;
        }
        self.foreground[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, value: bool) {
        let idx = y as usize * self.width as usize + x as usize;
        self.foreground[idx] = value;
    }

    pub fn count(&self) -> usize {
        self.foreground.iter().filter(|&&v| v).count()
    }

    pub fn to_pixel_set(&self, index: usize) -> PixelSet {
        let w = self.width as usize;
        let pixels = self
            .foreground
            .iter()
            .enumerate()
            .filter(|(_, &v)| v)
            .map(|(i, _)| Pixel::new((i % w) as u32, (i / w) as u32));
        PixelSet::new(self.width, self.height, index, pixels)
            .expect("mask cells are always in bounds")
    }
}

pub fn binarize(frame: &Frame, threshold: u8, polarity: Polarity) -> BinaryMask {
    let foreground = frame
        .values
        .iter()
        .map(|&v| match polarity {
            Polarity::Above => v >= threshold,
            Polarity::Below => v < threshold,
        })
        .collect();
    BinaryMask {
        width: frame.width,
        height: frame.height,
        foreground,
    }
}

/// Binarize and thin one frame; the result carries the frame's index.
pub fn skeletonize(frame: &Frame, config: &BinarizeConfig) -> PixelSet {
    thin(&binarize(frame, config.threshold, config.polarity)).with_index(frame.index)
}

/// Zhang-Suen thinning to a fixed point.
///
/// A pixel is deleted in a subiteration when it has between 2 and 6
/// foreground neighbours, exactly one 0->1 transition around its
/// neighbourhood, and satisfies the subiteration's directional condition
/// (`P2*P4*P6 = 0 && P4*P6*P8 = 0`, then `P2*P4*P8 = 0 && P2*P6*P8 = 0`).
///
/// The classical rule deletes isolated 2x2 squares outright. When every
/// pixel of an 8-connected component is flagged in the same subiteration,
/// its smallest pixel is kept so that no component disappears.
///
/// Masks narrower or shorter than 3 pixels are returned unchanged.
pub fn thin(mask: &BinaryMask) -> PixelSet {
    if mask.width < 3 || mask.height < 3 {
        return mask.to_pixel_set(0);
    }
    let mut grid = PaddedGrid::new(mask);
    let mut active: Vec<usize> = grid.foreground_cells();
    let mut flagged = vec![false; grid.cells.len()];
    loop {
        let mut changed = false;
        for pass in [SubIteration::First, SubIteration::Second] {
            let candidates: Vec<usize> = active
                .iter()
                .copied()
                .filter(|&c| grid.deletable(c, pass))
                .collect();
            if candidates.is_empty() {
                continue;
            }
            for &c in &candidates {
                flagged[c] = true;
            }
            let keep = grid.vanishing_component_anchors(&candidates, &flagged);
            for &c in &candidates {
                flagged[c] = false;
                if !keep.contains(&c) {
                    grid.cells[c] = false;
                    changed = true;
                }
            }
            active.retain(|&c| grid.cells[c]);
        }
        if !changed {
            break;
        }
    }
    grid.to_pixel_set()
}

#[derive(Clone, Copy)]
enum SubIteration {
    First,
    Second,
}

/// Foreground with a one-cell background border so neighbour reads never
/// leave the buffer.
struct PaddedGrid {
    width: u32,
    height: u32,
    stride: usize,
    cells: Vec<bool>,
}

impl PaddedGrid {
    fn new(mask: &BinaryMask) -> Self {
        let stride = mask.width as usize + 2;
        let mut cells = vec![false; stride * (mask.height as usize + 2)];
        for y in 0..mask.height as usize {
            for x in 0..mask.width as usize {
                cells[(y + 1) * stride + x + 1] = mask.foreground[y * mask.width as usize + x];
            }
        }
        PaddedGrid {
            width: mask.width,
            height: mask.height,
            stride,
            cells,
        }
    }

    fn foreground_cells(&self) -> Vec<usize> {
        (0..self.cells.len()).filter(|&c| self.cells[c]).collect()
    }

    /// P2..P9 clockwise starting north.
    fn ring(&self, c: usize) -> [bool; 8] {
        let s = self.stride;
        [
            self.cells[c - s],
            self.cells[c - s + 1],
            self.cells[c + 1],
            self.cells[c + s + 1],
            self.cells[c + s],
            self.cells[c + s - 1],
            self.cells[c - 1],
            self.cells[c - s - 1],
        ]
    }

    fn deletable(&self, c: usize, pass: SubIteration) -> bool {
        let n = self.ring(c);
        let b = n.iter().filter(|&&v| v).count();
        if !(2..=6).contains(&b) {
            return false;
        }
        let a = (0..8).filter(|&i| !n[i] && n[(i + 1) % 8]).count();
        if a != 1 {
            return false;
        }
        let [p2, _, p4, _, p6, _, p8, _] = n;
        match pass {
            SubIteration::First => !(p2 && p4 && p6) && !(p4 && p6 && p8),
            SubIteration::Second => !(p2 && p4 && p8) && !(p2 && p6 && p8),
        }
    }

    fn neighbor_cells(&self, c: usize) -> [usize; 8] {
        let s = self.stride;
        [
            c - s - 1,
            c - s,
            c - s + 1,
            c - 1,
            c + 1,
            c + s - 1,
            c + s,
            c + s + 1,
        ]
    }

    /// For each 8-connected cluster of flagged cells that has no unflagged
    /// foreground neighbour (the whole component would vanish), the smallest
    /// cell of the cluster.
    fn vanishing_component_anchors(&self, candidates: &[usize], flagged: &[bool]) -> Vec<usize> {
        let mut seen = std::collections::HashSet::new();
        let mut anchors = Vec::new();
        for &start in candidates {
            if !seen.insert(start) {
                continue;
            }
            let mut stack = vec![start];
            let mut smallest = start;
            let mut touches_survivor = false;
            while let Some(c) = stack.pop() {
                smallest = smallest.min(c);
                for nb in self.neighbor_cells(c) {
                    if !self.cells[nb] {
                        continue;
                    }
                    if !flagged[nb] {
                        touches_survivor = true;
                    } else if seen.insert(nb) {
                        stack.push(nb);
                    }
                }
            }
            if !touches_survivor {
                anchors.push(smallest);
            }
        }
        anchors
    }

    fn to_pixel_set(&self) -> PixelSet {
        let pixels = self.foreground_cells().into_iter().map(|c| {
            let y = c / self.stride - 1;
            let x = c % self.stride - 1;
            Pixel::new(x as u32, y as u32)
        });
        PixelSet::new(self.width, self.height, 0, pixels).expect("grid cells are in bounds")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask_from_rows(rows: &[&str]) -> BinaryMask {
        let h = rows.len() as u32;
        let w = rows[0].len() as u32;
        let fg = rows
            .iter()
            .flat_map(|r| r.chars().map(|c| c == '#'))
            .collect();
        BinaryMask::new(w, h, fg).unwrap()
    }

    #[test]
    fn binarize_trivial_frames() {
        let zeros = Frame::new(4, 4, vec![0; 16], 0).unwrap();
        assert_eq!(binarize(&zeros, 128, Polarity::Above).count(), 0);
        let full = Frame::new(4, 4, vec![255; 16], 0).unwrap();
        assert_eq!(binarize(&full, 128, Polarity::Above).count(), 16);
        assert_eq!(binarize(&full, 128, Polarity::Below).count(), 0);
    }

    #[test]
    fn binarize_checkerboard() {
        let values: Vec<u8> = (0..25)
            .map(|i| if (i % 5 + i / 5) % 2 == 0 { 255 } else { 0 })
            .collect();
        let frame = Frame::new(5, 5, values.clone(), 0).unwrap();
        let mask = binarize(&frame, 128, Polarity::Above);
        for (i, v) in values.iter().enumerate() {
            assert_eq!(mask.foreground()[i], *v == 255);
        }
    }

    #[test]
    fn frame_size_is_checked() {
        assert!(Frame::new(3, 3, vec![0; 8], 0).is_err());
    }

    #[test]
    fn thin_empty_and_single() {
        assert!(thin(&BinaryMask::empty(8, 8)).is_empty());
        let mut m = BinaryMask::empty(8, 8);
        m.set(3, 4, true);
        let s = thin(&m);
        assert_eq!(s.pixels(), &[Pixel::new(3, 4)]);
    }

    #[test]
    fn small_masks_pass_through() {
        let m = mask_from_rows(&["##", "##"]);
        assert_eq!(thin(&m).len(), 4);
    }

    #[test]
    fn isolated_square_keeps_one_pixel() {
        let m = mask_from_rows(&["....", ".##.", ".##.", "...."]);
        let s = thin(&m);
        assert_eq!(s.pixels(), &[Pixel::new(1, 1)]);
    }

    #[test]
    fn thick_bar_becomes_line() {
        let m = mask_from_rows(&[
            "............",
            ".##########.",
            ".##########.",
            ".##########.",
            "............",
        ]);
        let s = thin(&m);
        // the first subiteration erodes the south-east side, so the line is
        // shifted towards the west end
        let expected: Vec<Pixel> = (2..=8).map(|x| Pixel::new(x, 2)).collect();
        assert_eq!(s.pixels(), expected.as_slice());
    }

    #[test]
    fn thin_is_a_fixed_point() {
        let m = mask_from_rows(&[
            "..........",
            ".#####....",
            ".######...",
            ".########.",
            "...#####..",
            "..........",
        ]);
        let once = thin(&m);
        let twice = thin(&BinaryMask::from_pixels(&once));
        assert_eq!(once, twice);
    }
}

//! Plain-text skeleton coordinates.
//!
//! ```text
//! # 64 48
//! 3 4
//! 4 4
//! ```
//!
//! The header carries the frame width and height; each following line is one
//! pixel as `x y`. Lines are `\n`-terminated and written in `(y, x)` order.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::pixel::{Pixel, PixelSet};

pub fn to_string(pixels: &PixelSet) -> String {
    let mut out = String::with_capacity(16 + pixels.len() * 10);
    let _ = writeln!(out, "# {} {}", pixels.width(), pixels.height());
    for p in pixels.iter() {
        let _ = writeln!(out, "{} {}", p.x, p.y);
    }
    out
}

pub fn parse(text: &str, index: usize, path: &Path) -> Result<PixelSet> {
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    let (width, height) = loop {
        let Some((n, line)) = lines.next() else {
            return Err(err(1, "missing \"# width height\" header".into()));
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let rest = line
            .strip_prefix('#')
            .ok_or_else(|| err(n + 1, "missing \"# width height\" header".into()))?;
        let dims = parse_pair(rest).ok_or_else(|| err(n + 1, format!("bad header {line:?}")))?;
        break dims;
    };
    if width == 0 || height == 0 {
        return Err(err(1, format!("degenerate frame {width}x{height}")));
    }
    let mut pixels = Vec::new();
    for (n, line) in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (x, y) = parse_pair(line).ok_or_else(|| err(n + 1, format!("bad pixel {line:?}")))?;
        if x >= width || y >= height {
            return Err(err(
                n + 1,
                format!("pixel ({x}, {y}) outside {width}x{height} frame"),
            ));
        }
        pixels.push(Pixel::new(x, y));
    }
    PixelSet::new(width, height, index, pixels)
}

pub fn read(path: &Path, index: usize) -> Result<PixelSet> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse(&text, index, path)
}

pub fn write(path: &Path, pixels: &PixelSet) -> Result<()> {
    std::fs::write(path, to_string(pixels)).map_err(|e| Error::io(path, e))
}

fn parse_pair(s: &str) -> Option<(u32, u32)> {
    let mut it = s.split_whitespace();
    let a = it.next()?.parse().ok()?;
    let b = it.next()?.parse().ok()?;
    it.next().is_none().then_some((a, b))
}

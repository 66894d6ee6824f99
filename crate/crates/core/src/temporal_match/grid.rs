//! Uniform-grid nearest-neighbour index over integer pixels.

use crate::pixel::Pixel;

/// Target sets at or below this size are scanned linearly.
const SCAN_LIMIT: usize = 48;

pub const DEFAULT_CELL: u32 = 8;

/// Buckets points into `cell x cell` squares and answers nearest-neighbour
/// queries by searching square rings of cells outward from the query's
/// cell. Ties on distance resolve to the smallest point index; with points
/// sorted in `(y, x)` order that is the smallest `(y, x)`.
pub struct GridIndex<'a> {
    points: &'a [Pixel],
    cell: u32,
    cols: usize,
    rows: usize,
    /// CSR offsets into `items`, one slot per cell plus a sentinel.
    starts: Vec<u32>,
    items: Vec<u32>,
}

impl<'a> GridIndex<'a> {
    /// `width`/`height` must cover every point and every later query.
    pub fn new(points: &'a [Pixel], width: u32, height: u32, cell: u32) -> Self {
        let cell = cell.max(1);
        let cols = (width.max(1)).div_ceil(cell) as usize;
        let rows = (height.max(1)).div_ceil(cell) as usize;
        let mut counts = vec![0u32; cols * rows + 1];
        for p in points {
            counts[Self::slot(cell, cols, *p) + 1] += 1;
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let starts = counts.clone();
        let mut fill = counts;
        let mut items = vec![0u32; points.len()];
        // ascending point order keeps each bucket sorted by index
        for (i, p) in points.iter().enumerate() {
            let s = Self::slot(cell, cols, *p);
            items[fill[s] as usize] = i as u32;
            fill[s] += 1;
        }
        GridIndex {
            points,
            cell,
            cols,
            rows,
            starts,
            items,
        }
    }

    fn slot(cell: u32, cols: usize, p: Pixel) -> usize {
        (p.y / cell) as usize * cols + (p.x / cell) as usize
    }

    fn bucket(&self, cx: usize, cy: usize) -> &[u32] {
        let s = cy * self.cols + cx;
        &self.items[self.starts[s] as usize..self.starts[s + 1] as usize]
    }

    pub fn nearest(&self, q: Pixel) -> Option<u32> {
        if self.points.len() <= SCAN_LIMIT {
            return nearest_by_scan(self.points, q);
        }
        let cx = ((q.x / self.cell) as usize).min(self.cols - 1) as i64;
        let cy = ((q.y / self.cell) as usize).min(self.rows - 1) as i64;
        let max_ring = cx
            .max(self.cols as i64 - 1 - cx)
            .max(cy)
            .max(self.rows as i64 - 1 - cy);
        let mut best: Option<(u64, u32)> = None;
        for r in 0..=max_ring {
            if let (Some((d2, _)), true) = (best, r >= 1) {
                // every point in ring r is at least this far along one axis
                let bound = (r as u64 - 1) * self.cell as u64 + 1;
                if d2 < bound * bound {
                    break;
                }
            }
            self.visit_ring(cx, cy, r, |idx| {
                let d2 = q.dist2(self.points[idx as usize]);
                if best.is_none_or(|(bd, bi)| d2 < bd || (d2 == bd && idx < bi)) {
                    best = Some((d2, idx));
                }
            });
        }
        best.map(|(_, i)| i)
    }

    fn visit_ring(&self, cx: i64, cy: i64, r: i64, mut f: impl FnMut(u32)) {
        let in_bounds =
            |x: i64, y: i64| x >= 0 && y >= 0 && x < self.cols as i64 && y < self.rows as i64;
        let mut visit = |x: i64, y: i64| {
            if in_bounds(x, y) {
                for &i in self.bucket(x as usize, y as usize) {
                    f(i);
                }
            }
        };
        if r == 0 {
            visit(cx, cy);
            return;
        }
        for x in cx - r..=cx + r {
            visit(x, cy - r);
            visit(x, cy + r);
        }
        for y in cy - r + 1..cy + r {
            visit(cx - r, y);
            visit(cx + r, y);
        }
    }
}

/// Linear scan with the same tie rule as [`GridIndex::nearest`].
pub fn nearest_by_scan(points: &[Pixel], q: Pixel) -> Option<u32> {
    points
        .iter()
        .enumerate()
        .min_by_key(|&(i, p)| (q.dist2(*p), i))
        .map(|(i, _)| i as u32)
}

//! Per-class count images built from a [`Dataset`].
//!
//! The world rectangle is split into `resolution x resolution` square pixels.
//! Row 0 is the top of the image, i.e. the pixel band touching `ymax`.
//! Every class gets its own count plane; a separate plane holds the per-pixel
//! total over all classes so that radius probes only touch one array. That
//! plane uses one byte per pixel while no pixel holds more than 255 points,
//! which cuts the memory a probe streams through by four.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::dataset::{Dataset, WorldBounds};

mod render;

pub use render::{render, render_ppm, Overlay, BACKGROUND, CIRCLE_COLOR, MARK_COLOR, PALETTE};

#[derive(Debug, Error)]
pub enum RasterError {
    #[error("resolution must be at least 1, got {0}")]
    InvalidResolution(usize),
    #[error("unknown metric `{0}` (expected `l2` or `l1`)")]
    UnknownMetric(String),
}

/// Distance used both inside the pixel scan and by the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Metric {
    #[default]
    L2,
    L1,
}

impl Metric {
    /// Exact integer ranking key for a pixel offset: `dx^2 + dy^2` for L2,
    /// `|dx| + |dy|` for L1.
    #[inline]
    pub fn distance_key(self, dx: i64, dy: i64) -> u64 {
        let (ax, ay) = (dx.unsigned_abs(), dy.unsigned_abs());
        match self {
            Metric::L2 => ax * ax + ay * ay,
            Metric::L1 => ax + ay,
        }
    }

    /// Largest distance key still inside a circle of radius `r`.
    #[inline]
    pub fn radius_key(self, r: u64) -> u64 {
        match self {
            Metric::L2 => r * r,
            Metric::L1 => r,
        }
    }

    /// Converts a distance key back to a pixel distance.
    pub fn key_distance(self, key: u64) -> f64 {
        match self {
            Metric::L2 => (key as f64).sqrt(),
            Metric::L1 => key as f64,
        }
    }

    /// Half-width of the circle of radius `r` on the row `dy` away from the
    /// centre, or `None` if that row misses the circle.
    #[inline]
    pub fn half_width(self, r: u64, dy: u64) -> Option<u64> {
        if dy > r {
            return None;
        }
        Some(match self {
            Metric::L2 => (r * r - dy * dy).isqrt(),
            Metric::L1 => r - dy,
        })
    }

    pub fn world_distance(self, dx: f64, dy: f64) -> f64 {
        match self {
            Metric::L2 => dx.hypot(dy),
            Metric::L1 => dx.abs() + dy.abs(),
        }
    }

    /// Monotone stand-in for [`Metric::world_distance`] (skips the square root).
    #[inline]
    pub fn world_key(self, dx: f64, dy: f64) -> f64 {
        match self {
            Metric::L2 => dx * dx + dy * dy,
            Metric::L1 => dx.abs() + dy.abs(),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::L2 => "l2",
            Metric::L1 => "l1",
        })
    }
}

impl FromStr for Metric {
    type Err = RasterError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "l2" => Ok(Metric::L2),
            "l1" => Ok(Metric::L1),
            _ => Err(RasterError::UnknownMetric(s.to_string())),
        }
    }
}

/// A pixel address. Ordering is row-major: `row` first, then `col`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PixelCoord {
    pub col: usize,
    pub row: usize,
}

impl PixelCoord {
    pub fn new(col: usize, row: usize) -> Self {
        Self { col, row }
    }
}

impl Ord for PixelCoord {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.row, self.col).cmp(&(other.row, other.col))
    }
}

impl PartialOrd for PixelCoord {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PixelCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(col {}, row {})", self.col, self.row)
    }
}

/// Square image geometry plus the metric the grid is meant to be queried
/// with (used for overlays and as the CLI default).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    pub resolution: usize,
    pub bounds: WorldBounds,
    pub metric: Metric,
}

impl GridConfig {
    pub fn new(
        resolution: usize,
        bounds: WorldBounds,
        metric: Metric,
    ) -> Result<Self, RasterError> {
        if resolution == 0 {
            return Err(RasterError::InvalidResolution(resolution));
        }
        Ok(Self {
            resolution,
            bounds,
            metric,
        })
    }

    /// Pixel holding world point `(x, y)`. Points outside the bounds clamp
    /// to the nearest edge pixel.
    pub fn pixel_of(&self, x: f64, y: f64) -> PixelCoord {
        let b = &self.bounds;
        let col = self.cell_index((x - b.xmin) / b.width());
        let from_bottom = self.cell_index((y - b.ymin) / b.height());
        PixelCoord {
            col,
            row: self.resolution - 1 - from_bottom,
        }
    }

    fn cell_index(&self, fraction: f64) -> usize {
        let cell = (fraction * self.resolution as f64).floor();
        // NaN lands on 0 through the saturating cast.
        (cell.max(0.0) as usize).min(self.resolution - 1)
    }

    /// World coordinates of the centre of `pixel`.
    pub fn pixel_center(&self, pixel: PixelCoord) -> (f64, f64) {
        let b = &self.bounds;
        let res = self.resolution as f64;
        let x = b.xmin + (pixel.col as f64 + 0.5) / res * b.width();
        let y = b.ymin + ((self.resolution - 1 - pixel.row) as f64 + 0.5) / res * b.height();
        (x, y)
    }

    pub fn pixel_count(&self) -> usize {
        self.resolution * self.resolution
    }

    #[inline]
    pub(crate) fn linear(&self, pixel: PixelCoord) -> usize {
        pixel.row * self.resolution + pixel.col
    }
}

/// Point ids per pixel in compressed-row form; ids within a pixel keep
/// dataset order.
#[derive(Debug, Clone)]
struct PixelBuckets {
    offsets: Vec<u32>,
    ids: Vec<u32>,
    labels: Vec<u32>,
}

/// Per-pixel totals over all classes, row-major.
#[derive(Debug, Clone)]
pub enum TotalsPlane {
    Narrow(Vec<u8>),
    Wide(Vec<u32>),
}

impl TotalsPlane {
    fn from_wide(totals: Vec<u32>) -> Self {
        if totals.iter().all(|&t| t <= u8::MAX as u32) {
            TotalsPlane::Narrow(totals.into_iter().map(|t| t as u8).collect())
        } else {
            TotalsPlane::Wide(totals)
        }
    }

    #[inline]
    pub fn get(&self, cell: usize) -> u32 {
        match self {
            TotalsPlane::Narrow(v) => v[cell] as u32,
            TotalsPlane::Wide(v) => v[cell],
        }
    }

    pub fn len(&self) -> usize {
        match self {
            TotalsPlane::Narrow(v) => v.len(),
            TotalsPlane::Wide(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> Box<dyn Iterator<Item = u32> + '_> {
        match self {
            TotalsPlane::Narrow(v) => Box::new(v.iter().map(|&t| t as u32)),
            TotalsPlane::Wide(v) => Box::new(v.iter().copied()),
        }
    }
}

/// A pixel count cell that can be summed a row span at a time.
pub(crate) trait CountCell: Copy {
    /// Sum of a span. Callers guarantee the true sum fits in `u32`, which
    /// holds for any span because [`rasterize`] caps the point count.
    fn sum_span(span: &[Self]) -> usize;
    fn any_nonzero(span: &[Self]) -> bool;
    fn is_zero(self) -> bool;
}

impl CountCell for u32 {
    #[inline]
    fn sum_span(span: &[u32]) -> usize {
        let mut lanes = [0u32; 8];
        let chunks = span.chunks_exact(8);
        let tail = chunks.remainder();
        for chunk in chunks {
            for (lane, &c) in lanes.iter_mut().zip(chunk) {
                *lane = lane.wrapping_add(c);
            }
        }
        let head = lanes.iter().fold(0u32, |acc, &c| acc.wrapping_add(c));
        tail.iter().fold(head, |acc, &c| acc.wrapping_add(c)) as usize
    }

    #[inline]
    fn any_nonzero(span: &[u32]) -> bool {
        span.iter().fold(0, |acc, &c| acc | c) != 0
    }

    #[inline]
    fn is_zero(self) -> bool {
        self == 0
    }
}

impl CountCell for u8 {
    #[inline]
    fn sum_span(span: &[u8]) -> usize {
        // 16-bit lanes cannot overflow within 257 chunks of 255s.
        const LANES: usize = 32;
        const BLOCK: usize = LANES * 257;
        let mut total = 0usize;
        for block in span.chunks(BLOCK) {
            let mut lanes = [0u16; LANES];
            let chunks = block.chunks_exact(LANES);
            let tail = chunks.remainder();
            for chunk in chunks {
                for (lane, &c) in lanes.iter_mut().zip(chunk) {
                    *lane += c as u16;
                }
            }
            total += lanes.iter().map(|&l| l as usize).sum::<usize>();
            total += tail.iter().map(|&c| c as usize).sum::<usize>();
        }
        total
    }

    #[inline]
    fn any_nonzero(span: &[u8]) -> bool {
        span.iter().fold(0, |acc, &c| acc | c) != 0
    }

    #[inline]
    fn is_zero(self) -> bool {
        self == 0
    }
}

/// The rasterised dataset. Immutable once built.
#[derive(Debug, Clone)]
pub struct RasterGrid {
    config: GridConfig,
    num_classes: usize,
    /// `num_classes` planes, each `resolution^2` counts in row-major order.
    planes: Vec<u32>,
    totals: TotalsPlane,
    buckets: Option<PixelBuckets>,
    total_points: usize,
}

/// Quantises every point of `ds` onto `cfg`. With `keep_buckets` the grid
/// also remembers which point ids landed in each pixel.
///
/// # Panics
///
/// Panics if the dataset holds more than `u32::MAX` points, the range of a
/// pixel count.
pub fn rasterize(ds: &Dataset, cfg: &GridConfig, keep_buckets: bool) -> RasterGrid {
    assert!(
        ds.len() <= u32::MAX as usize,
        "too many points for u32 pixel counts"
    );
    let cells = cfg.pixel_count();
    let mut planes = vec![0u32; ds.num_classes() * cells];
    let mut totals = vec![0u32; cells];
    let mut linear = Vec::with_capacity(if keep_buckets { ds.len() } else { 0 });

    for p in ds.points() {
        let cell = cfg.linear(cfg.pixel_of(p.x, p.y));
        planes[p.label * cells + cell] += 1;
        totals[cell] += 1;
        if keep_buckets {
            linear.push(cell);
        }
    }

    let buckets = keep_buckets.then(|| {
        // Counting sort keyed on pixel; stable, so dataset order survives.
        let mut offsets = Vec::with_capacity(cells + 1);
        let mut acc = 0u32;
        offsets.push(0);
        for &t in &totals {
            acc += t;
            offsets.push(acc);
        }
        let mut cursor = offsets[..cells].to_vec();
        let mut ids = vec![0u32; ds.len()];
        for (id, &cell) in linear.iter().enumerate() {
            ids[cursor[cell] as usize] = id as u32;
            cursor[cell] += 1;
        }
        let labels = ds.labels().map(|l| l as u32).collect();
        PixelBuckets {
            offsets,
            ids,
            labels,
        }
    });

    RasterGrid {
        config: *cfg,
        num_classes: ds.num_classes(),
        planes,
        totals: TotalsPlane::from_wide(totals),
        buckets,
        total_points: ds.len(),
    }
}

impl RasterGrid {
    pub fn config(&self) -> &GridConfig {
        &self.config
    }

    pub fn resolution(&self) -> usize {
        self.config.resolution
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn total_points(&self) -> usize {
        self.total_points
    }

    pub fn has_buckets(&self) -> bool {
        self.buckets.is_some()
    }

    /// Row-major count plane of one class.
    pub fn class_plane(&self, class: usize) -> &[u32] {
        let cells = self.config.pixel_count();
        &self.planes[class * cells..(class + 1) * cells]
    }

    /// Per-pixel totals over all classes.
    pub fn totals(&self) -> &TotalsPlane {
        &self.totals
    }

    pub fn count(&self, class: usize, pixel: PixelCoord) -> u32 {
        self.class_plane(class)[self.config.linear(pixel)]
    }

    pub fn pixel_total(&self, pixel: PixelCoord) -> u32 {
        self.totals.get(self.config.linear(pixel))
    }

    /// Point ids stored in `pixel`, in dataset order. `None` without buckets.
    pub fn bucket(&self, pixel: PixelCoord) -> Option<&[u32]> {
        let b = self.buckets.as_ref()?;
        let cell = self.config.linear(pixel);
        Some(&b.ids[b.offsets[cell] as usize..b.offsets[cell + 1] as usize])
    }

    /// Class of point `id`, when buckets were kept.
    pub fn point_label(&self, id: usize) -> Option<usize> {
        self.buckets.as_ref().map(|b| b.labels[id] as usize)
    }

    pub fn class_totals(&self) -> Vec<usize> {
        (0..self.num_classes)
            .map(|c| self.class_plane(c).iter().map(|&n| n as usize).sum())
            .collect()
    }

    pub fn occupied_pixels(&self) -> usize {
        self.totals.iter().filter(|&n| n > 0).count()
    }

    /// True when no pixel holds more than one point.
    pub fn is_collision_free(&self) -> bool {
        self.totals.iter().all(|n| n <= 1)
    }
}

/// True when no two points of `ds` share a pixel under `cfg`, without
/// allocating a full grid.
pub fn is_collision_free(ds: &Dataset, cfg: &GridConfig) -> bool {
    let mut seen = HashSet::with_capacity(ds.len());
    ds.points()
        .iter()
        .all(|p| seen.insert(cfg.pixel_of(p.x, p.y)))
}

/// Visits the pixels of a circle one row at a time, top to bottom, calling
/// `visit(row, first_col, last_col)` for every non-empty span clipped to
/// the grid.
#[inline]
pub(crate) fn for_each_row_span(
    resolution: usize,
    center: PixelCoord,
    radius: u64,
    metric: Metric,
    mut visit: impl FnMut(usize, usize, usize),
) {
    let last = resolution as i64 - 1;
    let (cr, cc) = (center.row as i64, center.col as i64);
    // Rows further than this from the centre are off the grid on both sides.
    let r = radius.min(2 * resolution as u64) as i64;
    let top = (cr - r).max(0);
    let bottom = (cr + r).min(last);
    let reach = (cr - top).max(bottom - cr);

    // Half-width per row offset. L2 widths shrink as the offset grows, so
    // walk them down instead of taking an integer square root per row.
    let mut widths = Vec::with_capacity(reach as usize + 1);
    let mut hw = r;
    for dy in 0..=reach {
        match metric {
            Metric::L2 => {
                while hw * hw + dy * dy > r * r {
                    hw -= 1;
                }
            }
            Metric::L1 => hw = r - dy,
        }
        widths.push(hw);
    }

    for row in top..=bottom {
        let hw = widths[(row - cr).unsigned_abs() as usize];
        let first = (cc - hw).max(0);
        let end = (cc + hw).min(last);
        if first <= end {
            visit(row as usize, first as usize, end as usize);
        }
    }
}

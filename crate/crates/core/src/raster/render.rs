//! Binary PPM (P6) rendering of a [`RasterGrid`].

use std::fs;
use std::io;
use std::path::Path;

use super::{Metric, PixelCoord, RasterGrid};

pub const BACKGROUND: [u8; 3] = [255, 255, 255];
pub const CIRCLE_COLOR: [u8; 3] = [96, 96, 96];
pub const MARK_COLOR: [u8; 3] = [0, 0, 0];

/// Class colours, indexed by class id modulo the palette length.
pub const PALETTE: [[u8; 3]; 8] = [
    [228, 26, 28],
    [55, 126, 184],
    [77, 175, 74],
    [152, 78, 163],
    [255, 127, 0],
    [166, 86, 40],
    [247, 129, 191],
    [153, 153, 153],
];

/// Query marker and search circles drawn over the points.
#[derive(Debug, Clone, PartialEq)]
pub struct Overlay {
    pub center: PixelCoord,
    pub radii: Vec<u64>,
}

struct Canvas {
    size: usize,
    rgb: Vec<u8>,
}

impl Canvas {
    fn put(&mut self, col: i64, row: i64, color: [u8; 3]) {
        let n = self.size as i64;
        if (0..n).contains(&col) && (0..n).contains(&row) {
            let at = 3 * (row as usize * self.size + col as usize);
            self.rgb[at..at + 3].copy_from_slice(&color);
        }
    }

    fn circle(&mut self, cc: i64, cr: i64, r: i64, metric: Metric) {
        match metric {
            Metric::L2 => {
                // Midpoint circle, eight-way symmetric.
                let (mut x, mut y, mut err) = (r, 0i64, 1 - r);
                while x >= y {
                    for (dx, dy) in [
                        (x, y),
                        (y, x),
                        (-y, x),
                        (-x, y),
                        (-x, -y),
                        (-y, -x),
                        (y, -x),
                        (x, -y),
                    ] {
                        self.put(cc + dx, cr + dy, CIRCLE_COLOR);
                    }
                    y += 1;
                    if err < 0 {
                        err += 2 * y + 1;
                    } else {
                        x -= 1;
                        err += 2 * (y - x) + 1;
                    }
                }
            }
            Metric::L1 => {
                for t in 0..=r {
                    for (dx, dy) in [(t, r - t), (-t, r - t), (t, t - r), (-t, t - r)] {
                        self.put(cc + dx, cr + dy, CIRCLE_COLOR);
                    }
                }
            }
        }
    }

    fn plus(&mut self, cc: i64, cr: i64, arm: i64) {
        for d in -arm..=arm {
            self.put(cc + d, cr, MARK_COLOR);
            self.put(cc, cr + d, MARK_COLOR);
        }
    }
}

/// Encodes the grid as a P6 image, one image pixel per grid pixel.
///
/// An occupied pixel takes the colour of its most numerous class (lowest
/// class id on a tie). Overlay circles use the grid's configured metric;
/// the `+` marker arms are `max(2, resolution / 200)` pixels long.
pub fn render_ppm(grid: &RasterGrid, overlay: Option<&Overlay>) -> Vec<u8> {
    let size = grid.resolution();
    let mut canvas = Canvas {
        size,
        rgb: BACKGROUND.repeat(size * size),
    };

    for (cell, total) in grid.totals().iter().enumerate() {
        if total == 0 {
            continue;
        }
        let mut best = 0;
        let mut best_count = 0;
        for class in 0..grid.num_classes() {
            let c = grid.class_plane(class)[cell];
            if c > best_count {
                best = class;
                best_count = c;
            }
        }
        let color = PALETTE[best % PALETTE.len()];
        canvas.rgb[3 * cell..3 * cell + 3].copy_from_slice(&color);
    }

    if let Some(overlay) = overlay {
        let (cc, cr) = (overlay.center.col as i64, overlay.center.row as i64);
        for &r in &overlay.radii {
            canvas.circle(cc, cr, r.min(4 * size as u64) as i64, grid.config().metric);
        }
        canvas.plus(cc, cr, (size as i64 / 200).max(2));
    }

    let mut out = format!("P6\n{size} {size}\n255\n").into_bytes();
    out.extend_from_slice(&canvas.rgb);
    out
}

pub fn render(
    grid: &RasterGrid,
    path: impl AsRef<Path>,
    overlay: Option<&Overlay>,
) -> io::Result<()> {
    fs::write(path, render_ppm(grid, overlay))
}

//! Labelled 2-D points, the synthetic generator, bounds and CSV files.
//!
//! The file format is a UTF-8 CSV with the header `x,y,label`. Coordinates
//! are written in scientific notation with 17 significant digits, which is
//! enough for an exact `f64` round trip.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Fraction of each axis extent added on both sides by default.
pub const DEFAULT_MARGIN_FRACTION: f64 = 0.05;

/// Extent given to an axis on which every point has the same coordinate.
pub const MIN_EXTENT: f64 = 1.0;

const HEADER: [&str; 3] = ["x", "y", "label"];

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("a dataset needs at least one class")]
    NoClasses,
    #[error("cannot generate an empty dataset")]
    ZeroPoints,
    #[error("dataset is empty")]
    Empty,
    #[error("margin fraction must be finite and non-negative, got {0}")]
    InvalidMargin(f64),
    #[error("invalid bounds x [{xmin}, {xmax}], y [{ymin}, {ymax}]")]
    InvalidBounds {
        xmin: f64,
        xmax: f64,
        ymin: f64,
        ymax: f64,
    },
    #[error("point {index}: label {label} out of range for {num_classes} classes")]
    LabelOutOfRange {
        index: usize,
        label: usize,
        num_classes: usize,
    },
    #[error("point {index}: non-finite coordinate ({x}, {y})")]
    NonFinite { index: usize, x: f64, y: f64 },
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabeledPoint {
    pub x: f64,
    pub y: f64,
    pub label: usize,
}

impl LabeledPoint {
    pub fn new(x: f64, y: f64, label: usize) -> Self {
        Self { x, y, label }
    }
}

/// An ordered, validated point set. A point's position in the list is its
/// identity everywhere else in the crate.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    points: Vec<LabeledPoint>,
    num_classes: usize,
}

impl Dataset {
    pub fn new(points: Vec<LabeledPoint>, num_classes: usize) -> Result<Self, DatasetError> {
        if num_classes == 0 {
            return Err(DatasetError::NoClasses);
        }
        for (index, p) in points.iter().enumerate() {
            if !p.x.is_finite() || !p.y.is_finite() {
                return Err(DatasetError::NonFinite {
                    index,
                    x: p.x,
                    y: p.y,
                });
            }
            if p.label >= num_classes {
                return Err(DatasetError::LabelOutOfRange {
                    index,
                    label: p.label,
                    num_classes,
                });
            }
        }
        Ok(Self {
            points,
            num_classes,
        })
    }

    pub fn points(&self) -> &[LabeledPoint] {
        &self.points
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = usize> + '_ {
        self.points.iter().map(|p| p.label)
    }
}

/// Axis-aligned world rectangle with `xmin < xmax` and `ymin < ymax`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorldBounds {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl WorldBounds {
    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Result<Self, DatasetError> {
        let finite = [xmin, xmax, ymin, ymax].iter().all(|v| v.is_finite());
        if !finite || xmin >= xmax || ymin >= ymax {
            return Err(DatasetError::InvalidBounds {
                xmin,
                xmax,
                ymin,
                ymax,
            });
        }
        Ok(Self {
            xmin,
            xmax,
            ymin,
            ymax,
        })
    }

    /// The unit square `[0, 1] x [0, 1]`.
    pub fn unit() -> Self {
        Self {
            xmin: 0.0,
            xmax: 1.0,
            ymin: 0.0,
            ymax: 1.0,
        }
    }

    pub fn width(&self) -> f64 {
        self.xmax - self.xmin
    }

    pub fn height(&self) -> f64 {
        self.ymax - self.ymin
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.xmin && x <= self.xmax && y >= self.ymin && y <= self.ymax
    }
}

/// Draws `n` points uniformly from `[0, 1) x [0, 1)` with uniformly drawn
/// labels, using ChaCha8 seeded from `seed`.
///
/// Each point consumes `x`, then `y`, then the label from the stream, so the
/// output is a pure function of `(n, num_classes, seed)`.
pub fn generate(n: usize, num_classes: usize, seed: u64) -> Result<Dataset, DatasetError> {
    if n == 0 {
        return Err(DatasetError::ZeroPoints);
    }
    if num_classes == 0 {
        return Err(DatasetError::NoClasses);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..n)
        .map(|_| {
            let x: f64 = rng.gen();
            let y: f64 = rng.gen();
            let label = rng.gen_range(0..num_classes);
            LabeledPoint { x, y, label }
        })
        .collect();
    Ok(Dataset {
        points,
        num_classes,
    })
}

/// Bounding box of the points, padded by `margin_fraction` of each axis
/// extent on both sides. An axis with zero extent gets [`MIN_EXTENT`]
/// centred on the shared coordinate instead, with no further margin.
pub fn compute_bounds(ds: &Dataset, margin_fraction: f64) -> Result<WorldBounds, DatasetError> {
    if !margin_fraction.is_finite() || margin_fraction < 0.0 {
        return Err(DatasetError::InvalidMargin(margin_fraction));
    }
    let first = ds.points.first().ok_or(DatasetError::Empty)?;
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (first.x, first.x, first.y, first.y);
    for p in &ds.points[1..] {
        xmin = xmin.min(p.x);
        xmax = xmax.max(p.x);
        ymin = ymin.min(p.y);
        ymax = ymax.max(p.y);
    }
    let (xmin, xmax) = pad_axis(xmin, xmax, margin_fraction);
    let (ymin, ymax) = pad_axis(ymin, ymax, margin_fraction);
    WorldBounds::new(xmin, xmax, ymin, ymax)
}

fn pad_axis(lo: f64, hi: f64, margin_fraction: f64) -> (f64, f64) {
    let extent = hi - lo;
    if extent > 0.0 {
        (lo - margin_fraction * extent, hi + margin_fraction * extent)
    } else {
        (lo - MIN_EXTENT / 2.0, lo + MIN_EXTENT / 2.0)
    }
}

pub fn save(ds: &Dataset, path: impl AsRef<Path>) -> Result<(), DatasetError> {
    let mut out = BufWriter::new(File::create(path)?);
    write_csv(ds, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn write_csv<W: Write>(ds: &Dataset, mut out: W) -> Result<(), DatasetError> {
    writeln!(out, "{}", HEADER.join(","))?;
    for p in &ds.points {
        writeln!(out, "{:.16e},{:.16e},{}", p.x, p.y, p.label)?;
    }
    Ok(())
}

/// Reads a dataset file. With `num_classes = None` the class count is one
/// more than the largest label seen (1 for an empty file).
pub fn load(path: impl AsRef<Path>, num_classes: Option<usize>) -> Result<Dataset, DatasetError> {
    read_csv(File::open(path)?, num_classes)
}

pub fn read_csv<R: Read>(input: R, num_classes: Option<usize>) -> Result<Dataset, DatasetError> {
    if num_classes == Some(0) {
        return Err(DatasetError::NoClasses);
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(input);

    let header = reader.headers()?;
    if header.iter().ne(HEADER.iter().copied()) {
        return Err(DatasetError::Parse {
            line: 1,
            message: format!(
                "expected header `x,y,label`, found `{}`",
                header.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }

    let mut points = Vec::new();
    let mut record = csv::StringRecord::new();
    while reader.read_record(&mut record)? {
        let line = record.position().map_or(0, |p| p.line());
        let parse_err = |message: String| DatasetError::Parse { line, message };
        if record.len() != 3 {
            return Err(parse_err(format!(
                "expected 3 fields, found {}",
                record.len()
            )));
        }
        let coord = |i: usize, name: &str| -> Result<f64, DatasetError> {
            let field = record[i].trim();
            let value: f64 = field
                .parse()
                .map_err(|_| parse_err(format!("invalid {name} coordinate `{field}`")))?;
            if !value.is_finite() {
                return Err(parse_err(format!("non-finite {name} coordinate `{field}`")));
            }
            Ok(value)
        };
        let x = coord(0, "x")?;
        let y = coord(1, "y")?;
        let field = record[2].trim();
        let label: usize = field
            .parse()
            .map_err(|_| parse_err(format!("invalid label `{field}`")))?;
        if let Some(limit) = num_classes {
            if label >= limit {
                return Err(parse_err(format!(
                    "label {label} out of range for {limit} classes"
                )));
            }
        }
        points.push(LabeledPoint { x, y, label });
    }

    let num_classes =
        num_classes.unwrap_or_else(|| points.iter().map(|p| p.label + 1).max().unwrap_or(1));
    Dataset::new(points, num_classes)
}

//! Adaptive-radius kNN search over a [`RasterGrid`].
//!
//! A query is mapped to its pixel and a circle of radius `r0` is counted.
//! While the count `n` differs from `k` the radius is rescaled by
//! `sqrt(k / n)` (the count grows with the circle's area), rounded to whole
//! pixels. An empty circle doubles the radius instead.
//!
//! Rescaling alone need not settle: a ring of equidistant pixels or a
//! crowded pixel can make every integer radius miss `k`. The search
//! therefore tracks the tightest radii known to hold fewer than `k`
//! (`lo`) and at least `k` (`hi`) points. As soon as a rescaled radius
//! falls outside `(lo, hi)`, repeats the current radius or revisits an
//! earlier one, the search bisects that bracket instead and stops when
//! `hi = lo + 1`. The hits at the final radius are then sorted with the
//! shared [`ranking`](crate::ranking) rule and cut to exactly `k`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::ranking::{majority_vote, NeighborRank};
use crate::raster::{for_each_row_span, CountCell, Metric, PixelCoord, RasterGrid, TotalsPlane};

pub const DEFAULT_K: usize = 11;
pub const DEFAULT_R0: u64 = 100;
pub const DEFAULT_MAX_ITERS: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("k must be at least 1")]
    ZeroK,
    #[error("initial radius must be at least 1 pixel")]
    ZeroRadius,
    #[error("iteration cap must be at least 1")]
    ZeroIterations,
    #[error("k ({k}) exceeds the number of points ({total})")]
    TooFewPoints { k: usize, total: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchParams {
    pub k: usize,
    /// Initial radius in pixels.
    pub r0: u64,
    pub max_iters: usize,
    pub metric: Metric,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            k: DEFAULT_K,
            r0: DEFAULT_R0,
            max_iters: DEFAULT_MAX_ITERS,
            metric: Metric::L2,
        }
    }
}

impl SearchParams {
    pub fn new(k: usize, r0: u64, metric: Metric) -> Self {
        Self {
            k,
            r0,
            metric,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        if self.k == 0 {
            return Err(SearchError::ZeroK);
        }
        if self.r0 == 0 {
            return Err(SearchError::ZeroRadius);
        }
        if self.max_iters == 0 {
            return Err(SearchError::ZeroIterations);
        }
        Ok(())
    }
}

/// One probed radius and the number of points found inside it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchStep {
    pub radius: u64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// A probed circle held exactly `k` points.
    ExactK,
    /// The bracket closed to adjacent radii; the hit list was cut to `k`.
    Bracketed,
    /// `max_iters` probes ran out; the result comes from the tightest radius
    /// known to hold at least `k` points.
    IterationCap,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchTrace {
    pub steps: Vec<SearchStep>,
    pub terminated_by: Termination,
}

/// Points of one class sharing one pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct PixelHit {
    pub pixel: PixelCoord,
    pub class: usize,
    pub count: usize,
    /// Distance between pixel centres, in pixels.
    pub distance: f64,
    /// Exact integer form of `distance` (squared for L2).
    pub distance_key: u64,
    /// Point ids in dataset order, when the grid keeps buckets.
    pub point_ids: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryResult {
    pub query_pixel: PixelCoord,
    /// Neighbours nearest first; multiplicities sum to `k`.
    pub neighbors: Vec<PixelHit>,
    pub predicted_class: usize,
    /// Neighbour multiplicity per class.
    pub votes: Vec<usize>,
    /// Radius whose hits produced `neighbors`.
    pub radius: u64,
    pub trace: SearchTrace,
}

impl QueryResult {
    pub fn multiplicity(&self) -> usize {
        self.neighbors.iter().map(|h| h.count).sum()
    }

    /// All neighbour ids in ranking order, when the grid keeps buckets.
    pub fn point_ids(&self) -> Option<Vec<usize>> {
        let mut ids = Vec::with_capacity(self.multiplicity());
        for hit in &self.neighbors {
            ids.extend_from_slice(hit.point_ids.as_deref()?);
        }
        Some(ids)
    }
}

/// One radius update: `round(r * sqrt(k / n))`, halves rounded away from
/// zero, never below 1.
///
/// Computed in exact integer arithmetic: the result is the largest `m` with
/// `(2m - 1)^2 * n <= 4 * r^2 * k`.
///
/// # Panics
///
/// Panics if `n` is 0; an empty circle has no density to rescale by.
pub fn update_radius(r: u64, n: usize, k: usize) -> u64 {
    assert!(n > 0, "update_radius needs a non-empty circle");
    let scaled = 4 * (r as u128) * (r as u128) * (k as u128);
    let s = (scaled / n as u128).isqrt();
    let m = s.div_ceil(2);
    m.clamp(1, u64::MAX as u128) as u64
}

/// Per-class number of points within `r` pixels of `center`.
pub fn count_in_circle(
    grid: &RasterGrid,
    center: PixelCoord,
    r: u64,
    metric: Metric,
) -> Vec<usize> {
    (0..grid.num_classes())
        .map(|class| {
            count_plane(
                grid.class_plane(class),
                grid.resolution(),
                center,
                r,
                metric,
            )
        })
        .collect()
}

/// Number of points, over all classes, within `r` pixels of `center`.
pub fn count_total_in_circle(
    grid: &RasterGrid,
    center: PixelCoord,
    r: u64,
    metric: Metric,
) -> usize {
    match grid.totals() {
        TotalsPlane::Narrow(plane) => count_plane(plane, grid.resolution(), center, r, metric),
        TotalsPlane::Wide(plane) => count_plane(plane, grid.resolution(), center, r, metric),
    }
}

fn count_plane<T: CountCell>(
    plane: &[T],
    res: usize,
    center: PixelCoord,
    r: u64,
    metric: Metric,
) -> usize {
    let mut total = 0;
    for_each_row_span(res, center, r, metric, |row, c0, c1| {
        total += T::sum_span(&plane[row * res + c0..=row * res + c1]);
    });
    total
}

/// Every non-empty (pixel, class) within `r` pixels of `center`, sorted by
/// distance, then row-major pixel order, then class.
pub fn collect_in_circle(
    grid: &RasterGrid,
    center: PixelCoord,
    r: u64,
    metric: Metric,
) -> Vec<PixelHit> {
    let mut occupied = Vec::new();
    match grid.totals() {
        TotalsPlane::Narrow(plane) => {
            occupied_pixels(plane, grid.resolution(), center, r, metric, &mut occupied)
        }
        TotalsPlane::Wide(plane) => {
            occupied_pixels(plane, grid.resolution(), center, r, metric, &mut occupied)
        }
    }

    let mut hits = Vec::with_capacity(occupied.len());
    for pixel in occupied {
        let cell = pixel.row * grid.resolution() + pixel.col;
        let key = metric.distance_key(
            pixel.col as i64 - center.col as i64,
            pixel.row as i64 - center.row as i64,
        );
        let bucket = grid.bucket(pixel);
        for class in 0..grid.num_classes() {
            let count = grid.class_plane(class)[cell] as usize;
            if count == 0 {
                continue;
            }
            let point_ids = bucket.map(|ids| {
                ids.iter()
                    .map(|&id| id as usize)
                    .filter(|&id| grid.point_label(id) == Some(class))
                    .collect()
            });
            hits.push(PixelHit {
                pixel,
                class,
                count,
                distance: metric.key_distance(key),
                distance_key: key,
                point_ids,
            });
        }
    }
    hits.sort_by_key(|h| NeighborRank::new(h.distance_key, h.pixel, h.class));
    hits
}

const SKIP_CHUNK: usize = 32;

fn occupied_pixels<T: CountCell>(
    plane: &[T],
    res: usize,
    center: PixelCoord,
    r: u64,
    metric: Metric,
    out: &mut Vec<PixelCoord>,
) {
    for_each_row_span(res, center, r, metric, |row, c0, c1| {
        let base = row * res;
        // Sparse grids are mostly zeros; step over empty chunks whole.
        for (i, chunk) in plane[base + c0..=base + c1].chunks(SKIP_CHUNK).enumerate() {
            if !T::any_nonzero(chunk) {
                continue;
            }
            let first = c0 + i * SKIP_CHUNK;
            for (j, &cell) in chunk.iter().enumerate() {
                if !cell.is_zero() {
                    out.push(PixelCoord {
                        col: first + j,
                        row,
                    });
                }
            }
        }
    });
}

/// k nearest neighbours of the world point `query`.
pub fn active_knn(
    grid: &RasterGrid,
    query: (f64, f64),
    params: &SearchParams,
) -> Result<QueryResult, SearchError> {
    let pixel = grid.config().pixel_of(query.0, query.1);
    active_knn_at(grid, pixel, params)
}

/// k nearest neighbours of the centre of `center`.
pub fn active_knn_at(
    grid: &RasterGrid,
    center: PixelCoord,
    params: &SearchParams,
) -> Result<QueryResult, SearchError> {
    params.validate()?;
    let k = params.k;
    if k > grid.total_points() {
        return Err(SearchError::TooFewPoints {
            k,
            total: grid.total_points(),
        });
    }

    // A circle this large covers the whole grid from any centre, so it is a
    // valid upper bracket without ever being counted.
    let cap = 2 * grid.resolution() as u64;
    let mut lo: Option<u64> = None;
    let mut hi = cap;
    let mut steps: Vec<SearchStep> = Vec::new();
    let mut bisecting = false;
    let mut r = params.r0.clamp(1, cap);
    let mut outcome = (Termination::IterationCap, hi);

    for _ in 0..params.max_iters {
        let n = count_total_in_circle(grid, center, r, params.metric);
        steps.push(SearchStep {
            radius: r,
            count: n,
        });
        if n == k {
            outcome = (Termination::ExactK, r);
            break;
        }
        if n < k {
            lo = Some(lo.map_or(r, |l| l.max(r)));
        } else {
            hi = hi.min(r);
        }
        // lo is conceptually -1 until something is known to be too small.
        let lo_edge = lo.map_or(-1, |l| l as i64);
        if hi as i64 - lo_edge <= 1 {
            outcome = (Termination::Bracketed, hi);
            break;
        }
        let proposal = (!bisecting).then(|| {
            let next = if n == 0 {
                r.saturating_mul(2)
            } else {
                update_radius(r, n, k)
            };
            next.clamp(1, cap)
        });
        r = match proposal {
            Some(p) if (p as i64) > lo_edge && p < hi && !steps.iter().any(|s| s.radius == p) => p,
            _ => {
                bisecting = true;
                (lo_edge + (hi as i64 - lo_edge) / 2) as u64
            }
        };
    }

    let (terminated_by, radius) = match outcome {
        (Termination::IterationCap, _) => (Termination::IterationCap, hi),
        done => done,
    };
    let hits = collect_in_circle(grid, center, radius, params.metric);
    let neighbors = truncate_to_k(grid, hits, k);

    let mut votes = vec![0; grid.num_classes()];
    for hit in &neighbors {
        votes[hit.class] += hit.count;
    }
    Ok(QueryResult {
        query_pixel: center,
        neighbors,
        predicted_class: majority_vote(&votes),
        votes,
        radius,
        trace: SearchTrace {
            steps,
            terminated_by,
        },
    })
}

/// Keeps the first `k` points of a sorted hit list. A pixel straddling the
/// cut is split by point id when buckets exist, otherwise by class id.
fn truncate_to_k(grid: &RasterGrid, hits: Vec<PixelHit>, k: usize) -> Vec<PixelHit> {
    let mut kept = Vec::new();
    let mut taken = 0;
    let mut iter = hits.into_iter().peekable();
    while let Some(first) = iter.next() {
        if taken == k {
            break;
        }
        let mut group = vec![first];
        while let Some(next) = iter.next_if(|h| h.pixel == group[0].pixel) {
            group.push(next);
        }
        let group_total: usize = group.iter().map(|h| h.count).sum();
        let remaining = k - taken;
        if group_total <= remaining {
            taken += group_total;
            kept.extend(group);
            continue;
        }

        let template = &group[0];
        match grid.bucket(template.pixel) {
            Some(ids) => {
                let mut by_class: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
                for &id in &ids[..remaining] {
                    let id = id as usize;
                    let class = grid.point_label(id).expect("buckets carry labels");
                    by_class.entry(class).or_default().push(id);
                }
                for (class, ids) in by_class {
                    kept.push(PixelHit {
                        class,
                        count: ids.len(),
                        point_ids: Some(ids),
                        ..template.clone()
                    });
                }
            }
            None => {
                let mut left = remaining;
                for mut hit in group {
                    if left == 0 {
                        break;
                    }
                    hit.count = hit.count.min(left);
                    left -= hit.count;
                    kept.push(hit);
                }
            }
        }
        taken = k;
    }
    kept
}

/// Runs [`active_knn`] and returns its majority-vote class.
pub fn classify(
    grid: &RasterGrid,
    query: (f64, f64),
    params: &SearchParams,
) -> Result<(usize, QueryResult), SearchError> {
    let result = active_knn(grid, query, params)?;
    Ok((result.predicted_class, result))
}

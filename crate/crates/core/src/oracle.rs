//! Exhaustive kNN, used as ground truth for the grid search.
//!
//! [`OracleSpace::World`] ranks points by their true coordinates and is the
//! accuracy baseline. [`OracleSpace::PixelQuantized`] first snaps every point
//! and the query to pixel centres and ranks with the same rule as the grid
//! search, so on a grid without shared pixels both must agree exactly.

use thiserror::Error;

use crate::dataset::Dataset;
use crate::ranking::{k_smallest, majority_vote, NeighborRank, TotalF64};
use crate::raster::{GridConfig, Metric, PixelCoord};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("k must be at least 1")]
    ZeroK,
    #[error("k ({k}) exceeds the number of points ({n})")]
    TooFewPoints { k: usize, n: usize },
    #[error("prediction lists differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("prediction lists are empty")]
    EmptyPredictions,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleSpace {
    World,
    PixelQuantized(GridConfig),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleMode {
    pub space: OracleSpace,
    pub metric: Metric,
}

impl OracleMode {
    pub fn world(metric: Metric) -> Self {
        Self {
            space: OracleSpace::World,
            metric,
        }
    }

    pub fn pixel(cfg: GridConfig, metric: Metric) -> Self {
        Self {
            space: OracleSpace::PixelQuantized(cfg),
            metric,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleNeighbor {
    pub index: usize,
    /// World units, or pixels in quantised mode.
    pub distance: f64,
    pub label: usize,
    /// Set in quantised mode only.
    pub pixel: Option<PixelCoord>,
}

/// The `k` points nearest to `query`, nearest first.
///
/// World mode breaks distance ties by point index. Quantised mode uses the
/// grid ranking: distance, then row-major pixel, then point index.
pub fn brute_knn(
    ds: &Dataset,
    query: (f64, f64),
    k: usize,
    mode: OracleMode,
) -> Result<Vec<OracleNeighbor>, OracleError> {
    if k == 0 {
        return Err(OracleError::ZeroK);
    }
    if k > ds.len() {
        return Err(OracleError::TooFewPoints { k, n: ds.len() });
    }
    let points = ds.points();
    let metric = mode.metric;
    let neighbors = match mode.space {
        OracleSpace::World => {
            let keys = points
                .iter()
                .enumerate()
                .map(|(i, p)| (TotalF64(metric.world_key(p.x - query.0, p.y - query.1)), i));
            k_smallest(keys, k)
                .into_iter()
                .map(|(_, index)| {
                    let p = &points[index];
                    OracleNeighbor {
                        index,
                        distance: metric.world_distance(p.x - query.0, p.y - query.1),
                        label: p.label,
                        pixel: None,
                    }
                })
                .collect()
        }
        OracleSpace::PixelQuantized(cfg) => {
            let q = cfg.pixel_of(query.0, query.1);
            let ranks = points.iter().enumerate().map(|(i, p)| {
                let pixel = cfg.pixel_of(p.x, p.y);
                let key = metric.distance_key(
                    pixel.col as i64 - q.col as i64,
                    pixel.row as i64 - q.row as i64,
                );
                NeighborRank::new(key, pixel, i)
            });
            k_smallest(ranks, k)
                .into_iter()
                .map(|rank| OracleNeighbor {
                    index: rank.tiebreak,
                    distance: metric.key_distance(rank.distance_key),
                    label: points[rank.tiebreak].label,
                    pixel: Some(PixelCoord::new(rank.col, rank.row)),
                })
                .collect()
        }
    };
    Ok(neighbors)
}

/// Majority class among the `k` exhaustive neighbours; ties go to the
/// lowest class id.
pub fn brute_classify(
    ds: &Dataset,
    query: (f64, f64),
    k: usize,
    mode: OracleMode,
) -> Result<usize, OracleError> {
    let mut votes = vec![0; ds.num_classes()];
    for n in brute_knn(ds, query, k, mode)? {
        votes[n.label] += 1;
    }
    Ok(majority_vote(&votes))
}

/// Fraction of positions where the two prediction lists agree.
pub fn agreement(a: &[usize], b: &[usize]) -> Result<f64, OracleError> {
    if a.len() != b.len() {
        return Err(OracleError::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(OracleError::EmptyPredictions);
    }
    let same = a.iter().zip(b).filter(|(x, y)| x == y).count();
    Ok(same as f64 / a.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{generate, LabeledPoint, WorldBounds};

    #[test]
    fn k_equals_n_returns_everything_sorted() {
        let ds = generate(40, 2, 3).unwrap();
        let all = brute_knn(&ds, (0.4, 0.6), 40, OracleMode::world(Metric::L2)).unwrap();
        assert_eq!(all.len(), 40);
        assert!(all.windows(2).all(|w| w[0].distance <= w[1].distance));
        let mut ids: Vec<_> = all.iter().map(|n| n.index).collect();
        ids.sort();
        assert_eq!(ids, (0..40).collect::<Vec<_>>());
    }

    #[test]
    fn coincident_query_is_its_own_neighbour() {
        let ds = generate(100, 3, 8).unwrap();
        let p = ds.points()[37];
        let nn = brute_knn(&ds, (p.x, p.y), 1, OracleMode::world(Metric::L2)).unwrap();
        assert_eq!(nn[0].index, 37);
        assert_eq!(nn[0].distance, 0.0);
    }

    #[test]
    fn world_ties_break_by_index() {
        let pts = vec![
            LabeledPoint::new(1.0, 0.0, 0),
            LabeledPoint::new(0.0, 1.0, 1),
            LabeledPoint::new(-1.0, 0.0, 1),
        ];
        let ds = Dataset::new(pts, 2).unwrap();
        let nn = brute_knn(&ds, (0.0, 0.0), 2, OracleMode::world(Metric::L1)).unwrap();
        assert_eq!(nn.iter().map(|n| n.index).collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn pixel_mode_reports_pixel_distances() {
        let pts = vec![
            LabeledPoint::new(0.5, 9.5, 0),
            LabeledPoint::new(3.5, 5.5, 0),
        ];
        let ds = Dataset::new(pts, 1).unwrap();
        let cfg = GridConfig::new(
            10,
            WorldBounds::new(0.0, 10.0, 0.0, 10.0).unwrap(),
            Metric::L2,
        )
        .unwrap();
        let nn = brute_knn(&ds, (0.5, 9.5), 2, OracleMode::pixel(cfg, Metric::L2)).unwrap();
        assert_eq!(nn[0].pixel, Some(PixelCoord::new(0, 0)));
        assert_eq!(nn[1].pixel, Some(PixelCoord::new(3, 4)));
        assert_eq!(nn[1].distance, 5.0);
        let nn = brute_knn(&ds, (0.5, 9.5), 2, OracleMode::pixel(cfg, Metric::L1)).unwrap();
        assert_eq!(nn[1].distance, 7.0);
    }

    #[test]
    fn classify_degenerate_cases() {
        let single = Dataset::new(
            (0..20)
                .map(|i| LabeledPoint::new(i as f64, (i * i) as f64, 2))
                .collect(),
            3,
        )
        .unwrap();
        for q in [(0.0, 0.0), (5.5, -3.0), (100.0, 100.0)] {
            assert_eq!(
                brute_classify(&single, q, 7, OracleMode::world(Metric::L2)).unwrap(),
                2
            );
        }
        let ds = generate(200, 3, 1).unwrap();
        let q = (0.3, 0.3);
        let nearest = brute_knn(&ds, q, 1, OracleMode::world(Metric::L2)).unwrap()[0];
        assert_eq!(
            brute_classify(&ds, q, 1, OracleMode::world(Metric::L2)).unwrap(),
            nearest.label
        );
    }

    #[test]
    fn knn_errors() {
        let ds = generate(5, 1, 0).unwrap();
        let mode = OracleMode::world(Metric::L2);
        assert_eq!(
            brute_knn(&ds, (0.0, 0.0), 6, mode),
            Err(OracleError::TooFewPoints { k: 6, n: 5 })
        );
        assert_eq!(brute_knn(&ds, (0.0, 0.0), 0, mode), Err(OracleError::ZeroK));
    }

    #[test]
    fn agreement_values() {
        assert_eq!(agreement(&[0, 1, 2], &[0, 1, 2]).unwrap(), 1.0);
        assert_eq!(agreement(&[0, 0, 0], &[1, 2, 1]).unwrap(), 0.0);
        let a: Vec<usize> = (0..100).map(|i| i % 3).collect();
        let mut b = a.clone();
        b[10] = (b[10] + 1) % 3;
        b[90] = (b[90] + 2) % 3;
        assert_eq!(agreement(&a, &b).unwrap(), 0.98);
        assert_eq!(
            agreement(&[0], &[0, 1]),
            Err(OracleError::LengthMismatch(1, 2))
        );
        assert_eq!(agreement(&[], &[]), Err(OracleError::EmptyPredictions));
    }
}

//! Query-time benchmark: exhaustive kNN against the grid search over a
//! sweep of dataset sizes.
//!
//! For every `n` the harness generates a dataset and a separate set of
//! held-out query points, classifies every query with both methods, and
//! records the fastest of `repeats` timed passes. Grid construction is timed
//! on its own because it is linear in `n` while queries are not.
//!
//! Timings come from [`Instant`], which is monotonic. Everything else in a
//! [`BenchReport`] is a pure function of the [`BenchConfig`].

use std::fmt;
use std::hint::black_box;
use std::io::{self, Write};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::active_search::{classify, SearchError, SearchParams, DEFAULT_MAX_ITERS};
use crate::dataset::{compute_bounds, generate, DatasetError, DEFAULT_MARGIN_FRACTION};
use crate::oracle::{agreement, brute_classify, OracleError, OracleMode};
use crate::raster::{rasterize, GridConfig, Metric, RasterError};

pub const CSV_HEADER: &str = "n,method,build_ms,query_total_ms,query_mean_us,agreement";

pub const DEFAULT_N_VALUES: [usize; 7] =
    [1_000, 5_000, 10_000, 50_000, 100_000, 500_000, 1_000_000];

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid benchmark config: {0}")]
    Config(String),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Raster(#[from] RasterError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub n_values: Vec<usize>,
    pub num_classes: usize,
    pub k: usize,
    pub r0: u64,
    pub resolution: usize,
    pub metric: Metric,
    pub num_queries: usize,
    pub seed: u64,
    pub repeats: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            n_values: DEFAULT_N_VALUES.to_vec(),
            num_classes: 3,
            k: 11,
            r0: 100,
            resolution: 3000,
            metric: Metric::L2,
            num_queries: 100,
            seed: 1,
            repeats: 3,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        let fail = |msg: String| Err(BenchError::Config(msg));
        if self.n_values.is_empty() {
            return fail("no dataset sizes given".into());
        }
        if self.n_values.windows(2).any(|w| w[0] > w[1]) {
            return fail(format!(
                "dataset sizes must be ascending, got {:?}",
                self.n_values
            ));
        }
        for (name, value) in [
            ("classes", self.num_classes),
            ("k", self.k),
            ("resolution", self.resolution),
            ("queries", self.num_queries),
            ("repeats", self.repeats),
        ] {
            if value == 0 {
                return fail(format!("{name} must be at least 1"));
            }
        }
        if self.r0 == 0 {
            return fail("r0 must be at least 1".into());
        }
        if let Some(&n) = self.n_values.iter().find(|&&n| n < self.k) {
            return fail(format!("dataset size {n} is smaller than k ({})", self.k));
        }
        Ok(())
    }

    pub fn search_params(&self) -> SearchParams {
        SearchParams {
            k: self.k,
            r0: self.r0,
            max_iters: DEFAULT_MAX_ITERS,
            metric: self.metric,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    BruteForce,
    ActiveSearch,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::BruteForce => "brute_force",
            Method::ActiveSearch => "active_search",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub method: Method,
    pub build_ms: f64,
    pub query_total_ms: f64,
    pub query_mean_us: f64,
    /// Agreement with the exhaustive classifier; grid-search rows only.
    pub agreement: Option<f64>,
}

/// Per-query class predictions of both methods for one dataset size.
#[derive(Debug, Clone, PartialEq)]
pub struct Predictions {
    pub n: usize,
    pub brute_force: Vec<usize>,
    pub active_search: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub predictions: Vec<Predictions>,
}

/// SplitMix64 finaliser, used to derive independent seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the dataset generated for size `n`.
pub fn dataset_seed(seed: u64, n: usize) -> u64 {
    mix(mix(seed) ^ n as u64)
}

/// Seed of the held-out queries for size `n`.
pub fn query_seed(seed: u64, n: usize) -> u64 {
    mix(dataset_seed(seed, n))
}

/// `count` query points uniform in the unit square, the support of
/// [`generate`].
pub fn query_points(count: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| (rng.gen(), rng.gen())).collect()
}

fn fastest<T>(
    repeats: usize,
    mut pass: impl FnMut() -> Result<T, BenchError>,
) -> Result<(Duration, T), BenchError> {
    let mut best: Option<(Duration, T)> = None;
    for _ in 0..repeats {
        let start = Instant::now();
        let out = black_box(pass()?);
        let elapsed = start.elapsed();
        if best.as_ref().is_none_or(|(d, _)| elapsed < *d) {
            best = Some((elapsed, out));
        }
    }
    Ok(best.expect("repeats >= 1"))
}

pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport, BenchError> {
    run_bench_with_progress(cfg, |_| {})
}

/// Like [`run_bench`], calling `on_row` as soon as each row is measured.
pub fn run_bench_with_progress(
    cfg: &BenchConfig,
    mut on_row: impl FnMut(&BenchRow),
) -> Result<BenchReport, BenchError> {
    cfg.validate()?;
    let params = cfg.search_params();
    let num_queries = cfg.num_queries as f64;
    let mut rows = Vec::with_capacity(2 * cfg.n_values.len());
    let mut predictions = Vec::with_capacity(cfg.n_values.len());

    for &n in &cfg.n_values {
        let ds = generate(n, cfg.num_classes, dataset_seed(cfg.seed, n))?;
        let queries = query_points(cfg.num_queries, query_seed(cfg.seed, n));

        let oracle = OracleMode::world(cfg.metric);
        let (brute_time, brute) = fastest(cfg.repeats, || {
            queries
                .iter()
                .map(|&q| brute_classify(&ds, q, cfg.k, oracle).map_err(BenchError::from))
                .collect::<Result<Vec<_>, _>>()
        })?;

        let build_start = Instant::now();
        let bounds = compute_bounds(&ds, DEFAULT_MARGIN_FRACTION)?;
        let grid_cfg = GridConfig::new(cfg.resolution, bounds, cfg.metric)?;
        let grid = black_box(rasterize(&ds, &grid_cfg, false));
        let build_time = build_start.elapsed();

        let (active_time, active) = fastest(cfg.repeats, || {
            queries
                .iter()
                .map(|&q| {
                    classify(&grid, q, &params)
                        .map(|(class, _)| class)
                        .map_err(BenchError::from)
                })
                .collect::<Result<Vec<_>, _>>()
        })?;
        drop(grid);

        let score = agreement(&active, &brute)?;
        for (method, build, total, agreement) in [
            (Method::BruteForce, Duration::ZERO, brute_time, None),
            (Method::ActiveSearch, build_time, active_time, Some(score)),
        ] {
            let total_ms = total.as_secs_f64() * 1e3;
            let row = BenchRow {
                n,
                method,
                build_ms: build.as_secs_f64() * 1e3,
                query_total_ms: total_ms,
                query_mean_us: total_ms * 1e3 / num_queries,
                agreement,
            };
            on_row(&row);
            rows.push(row);
        }
        predictions.push(Predictions {
            n,
            brute_force: brute,
            active_search: active,
        });
    }
    Ok(BenchReport { rows, predictions })
}

/// Writes rows under [`CSV_HEADER`]. Brute-force rows leave `agreement`
/// empty.
pub fn write_csv<W: Write>(rows: &[BenchRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        let agreement = row.agreement.map(|a| format!("{a:.6}")).unwrap_or_default();
        writeln!(
            out,
            "{},{},{:.6},{:.6},{:.6},{}",
            row.n, row.method, row.build_ms, row.query_total_ms, row.query_mean_us, agreement
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> BenchConfig {
        BenchConfig {
            n_values: vec![1000],
            resolution: 400,
            num_queries: 20,
            repeats: 2,
            ..BenchConfig::default()
        }
    }

    #[test]
    fn one_size_gives_two_rows() {
        let report = run_bench(&small()).unwrap();
        assert_eq!(report.rows.len(), 2);
        assert_eq!(report.rows[0].method, Method::BruteForce);
        assert_eq!(report.rows[1].method, Method::ActiveSearch);
        assert!(report.rows[0].agreement.is_none());
        let a = report.rows[1].agreement.unwrap();
        assert!((0.0..=1.0).contains(&a));

        let p = &report.predictions[0];
        assert_eq!(agreement(&p.active_search, &p.brute_force).unwrap(), a);
        for row in &report.rows {
            let total = row.query_mean_us * 20.0 / 1000.0;
            assert!((total - row.query_total_ms).abs() <= 1e-9 * row.query_total_ms.max(1.0));
        }
    }

    #[test]
    fn csv_layout() {
        let rows = vec![
            BenchRow {
                n: 10,
                method: Method::BruteForce,
                build_ms: 0.0,
                query_total_ms: 1.5,
                query_mean_us: 15.0,
                agreement: None,
            },
            BenchRow {
                n: 10,
                method: Method::ActiveSearch,
                build_ms: 0.25,
                query_total_ms: 0.5,
                query_mean_us: 5.0,
                agreement: Some(0.98),
            },
        ];
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1], "10,brute_force,0.000000,1.500000,15.000000,");
        assert_eq!(
            lines[2],
            "10,active_search,0.250000,0.500000,5.000000,0.980000"
        );
    }

    #[test]
    fn config_validation() {
        let bad = [
            BenchConfig {
                n_values: vec![],
                ..small()
            },
            BenchConfig {
                n_values: vec![5000, 1000],
                ..small()
            },
            BenchConfig {
                n_values: vec![5],
                ..small()
            },
            BenchConfig {
                repeats: 0,
                ..small()
            },
            BenchConfig { r0: 0, ..small() },
            BenchConfig {
                num_queries: 0,
                ..small()
            },
        ];
        for cfg in bad {
            assert!(
                matches!(run_bench(&cfg), Err(BenchError::Config(_))),
                "{cfg:?}"
            );
        }
        BenchConfig::default().validate().unwrap();
    }

    #[test]
    fn seeds_differ_per_size_and_stream() {
        assert_ne!(dataset_seed(1, 1000), dataset_seed(1, 5000));
        assert_ne!(dataset_seed(1, 1000), query_seed(1, 1000));
        assert_eq!(query_points(5, 9), query_points(5, 9));
    }
}

//! k-nearest-neighbour search on a rasterised point set.
//!
//! Points are quantised onto square per-class count images. A query is
//! answered by placing it on the same image and scanning only the pixels
//! inside a circle around it, growing or shrinking the radius until the
//! circle holds exactly `k` points. The cost of a query therefore depends on
//! the local density and the image resolution, not on the number of points.
//!
//! ```
//! use pixel_knn::{compute_bounds, generate, rasterize, GridConfig, Metric, SearchParams};
//!
//! let data = generate(2_000, 3, 7).unwrap();
//! let bounds = compute_bounds(&data, 0.05).unwrap();
//! let grid = rasterize(&data, &GridConfig::new(600, bounds, Metric::L2).unwrap(), false);
//!
//! let result = pixel_knn::active_knn(&grid, (0.5, 0.5), &SearchParams::default()).unwrap();
//! assert_eq!(result.multiplicity(), 11);
//! ```
//!
//! Modules:
//!
//! - [`dataset`]: labelled points, the synthetic generator, bounds and CSV I/O.
//! - [`raster`]: the world-to-pixel map, count grids and PPM rendering.
//! - [`active_search`]: the adaptive-radius search and classifier.
//! - [`oracle`]: exhaustive kNN in world or pixel space, and agreement scoring.
//! - [`bench`]: the timing harness comparing both methods.

pub mod active_search;
pub mod bench;
pub mod dataset;
pub mod oracle;
pub mod ranking;
pub mod raster;

pub use active_search::{
    active_knn, active_knn_at, classify, collect_in_circle, count_in_circle, count_total_in_circle,
    update_radius, PixelHit, QueryResult, SearchError, SearchParams, SearchStep, SearchTrace,
    Termination,
};
pub use bench::{run_bench, write_csv, BenchConfig, BenchError, BenchReport, BenchRow, Method};
pub use dataset::{
    compute_bounds, generate, load, save, Dataset, DatasetError, LabeledPoint, WorldBounds,
};
pub use oracle::{
    agreement, brute_classify, brute_knn, OracleError, OracleMode, OracleNeighbor, OracleSpace,
};
pub use raster::{
    is_collision_free, rasterize, GridConfig, Metric, PixelCoord, RasterError, RasterGrid,
};

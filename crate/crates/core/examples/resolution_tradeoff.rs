//! Accuracy and speed of the grid search as the grid gets finer.
//!
//! Coarse grids merge nearby points into one pixel and lose accuracy; fine
//! grids cost more to build and store.

use std::error::Error;
use std::time::Instant;

use pixel_knn::bench::query_points;
use pixel_knn::dataset::DEFAULT_MARGIN_FRACTION;
use pixel_knn::{
    agreement, brute_classify, classify, compute_bounds, generate, rasterize, GridConfig, Metric,
    OracleMode, SearchParams,
};

fn main() -> Result<(), Box<dyn Error>> {
    let ds = generate(50_000, 3, 5)?;
    let bounds = compute_bounds(&ds, DEFAULT_MARGIN_FRACTION)?;
    let queries = query_points(200, 6);
    let exact: Vec<usize> = queries
        .iter()
        .map(|&q| brute_classify(&ds, q, 11, OracleMode::world(Metric::L2)))
        .collect::<Result<_, _>>()?;

    println!(
        "{:>10}  {:>10}  {:>12}  {:>9}",
        "resolution", "build (ms)", "query (us)", "agreement"
    );
    for resolution in [250, 500, 1000, 2000, 3000, 5000] {
        let start = Instant::now();
        let grid = rasterize(
            &ds,
            &GridConfig::new(resolution, bounds, Metric::L2)?,
            false,
        );
        let build = start.elapsed();

        // Scale r0 with the grid so the first circle covers the same area.
        let params = SearchParams::new(11, (100 * resolution as u64 / 3000).max(1), Metric::L2);
        let start = Instant::now();
        let labels: Vec<usize> = queries
            .iter()
            .map(|&q| classify(&grid, q, &params).map(|c| c.0))
            .collect::<Result<_, _>>()?;
        let per_query = start.elapsed().as_secs_f64() * 1e6 / queries.len() as f64;

        println!(
            "{resolution:>10}  {:>10.2}  {per_query:>12.2}  {:>9.3}",
            build.as_secs_f64() * 1e3,
            agreement(&labels, &exact)?
        );
    }
    Ok(())
}

//! Classify held-out points with the grid search and with exhaustive kNN,
//! then report how often they agree.

use std::error::Error;

use pixel_knn::bench::query_points;
use pixel_knn::dataset::DEFAULT_MARGIN_FRACTION;
use pixel_knn::{
    agreement, brute_classify, classify, compute_bounds, generate, rasterize, GridConfig, Metric,
    OracleMode, SearchParams,
};

fn main() -> Result<(), Box<dyn Error>> {
    let params = SearchParams::default();
    let queries = query_points(500, 99);

    for n in [1_000, 10_000, 100_000] {
        let ds = generate(n, 3, 1)?;
        let cfg = GridConfig::new(
            3000,
            compute_bounds(&ds, DEFAULT_MARGIN_FRACTION)?,
            Metric::L2,
        )?;
        let grid = rasterize(&ds, &cfg, false);

        let mut grid_labels = Vec::with_capacity(queries.len());
        let mut exact_labels = Vec::with_capacity(queries.len());
        for &q in &queries {
            grid_labels.push(classify(&grid, q, &params)?.0);
            exact_labels.push(brute_classify(
                &ds,
                q,
                params.k,
                OracleMode::world(Metric::L2),
            )?);
        }
        println!(
            "n={n:<7} agreement {:.3}",
            agreement(&grid_labels, &exact_labels)?
        );
    }
    Ok(())
}

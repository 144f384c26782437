//! One k-nearest-neighbour query, showing every radius the search probed.
//!
//! The grid keeps per-pixel point ids, so the result can be compared point
//! for point with the exhaustive search in true coordinates.

use std::error::Error;

use pixel_knn::dataset::DEFAULT_MARGIN_FRACTION;
use pixel_knn::{
    active_knn, brute_knn, compute_bounds, generate, rasterize, GridConfig, Metric, OracleMode,
    SearchParams,
};

fn main() -> Result<(), Box<dyn Error>> {
    let ds = generate(5_000, 3, 7)?;
    let query = (0.31, 0.62);

    for metric in [Metric::L2, Metric::L1] {
        let cfg = GridConfig::new(3000, compute_bounds(&ds, DEFAULT_MARGIN_FRACTION)?, metric)?;
        let grid = rasterize(&ds, &cfg, true);
        let res = active_knn(&grid, query, &SearchParams::new(11, 100, metric))?;

        println!("{metric}: query pixel {}", res.query_pixel);
        for (t, step) in res.trace.steps.iter().enumerate() {
            println!("  t={t} r={:<4} n={}", step.radius, step.count);
        }
        println!(
            "  stopped: {:?} at r={}",
            res.trace.terminated_by, res.radius
        );

        let mut grid_ids = res.point_ids().unwrap();
        let mut exact: Vec<usize> = brute_knn(&ds, query, 11, OracleMode::world(metric))?
            .iter()
            .map(|n| n.index)
            .collect();
        grid_ids.sort_unstable();
        exact.sort_unstable();
        let shared = grid_ids
            .iter()
            .filter(|i| exact.binary_search(i).is_ok())
            .count();
        println!(
            "  votes {:?} -> class {}; {shared}/11 neighbours match the exact search",
            res.votes, res.predicted_class
        );
    }
    Ok(())
}

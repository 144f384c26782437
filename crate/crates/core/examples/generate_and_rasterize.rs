//! Generate a labelled dataset, round-trip it through CSV and rasterise it.

use std::error::Error;

use pixel_knn::dataset::DEFAULT_MARGIN_FRACTION;
use pixel_knn::{compute_bounds, generate, load, rasterize, save, GridConfig, Metric};

fn main() -> Result<(), Box<dyn Error>> {
    let ds = generate(20_000, 3, 42)?;
    let path = std::env::temp_dir().join("pixel_knn_points.csv");
    save(&ds, &path)?;
    let ds = load(&path, Some(3))?;
    println!(
        "{} points written to and read back from {}",
        ds.len(),
        path.display()
    );

    let bounds = compute_bounds(&ds, DEFAULT_MARGIN_FRACTION)?;
    println!(
        "bounds x [{:.4}, {:.4}] y [{:.4}, {:.4}]",
        bounds.xmin, bounds.xmax, bounds.ymin, bounds.ymax
    );

    for resolution in [100, 500, 3000] {
        let grid = rasterize(
            &ds,
            &GridConfig::new(resolution, bounds, Metric::L2)?,
            false,
        );
        println!(
            "{resolution:>5}x{resolution:<5} occupied {:>6}  collisions {:>6}  per class {:?}",
            grid.occupied_pixels(),
            ds.len() - grid.occupied_pixels(),
            grid.class_totals()
        );
    }
    Ok(())
}

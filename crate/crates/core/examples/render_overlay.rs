//! Draw a dataset as a PPM image with one query's search circles on top.

use std::error::Error;

use pixel_knn::dataset::DEFAULT_MARGIN_FRACTION;
use pixel_knn::raster::{render, Overlay};
use pixel_knn::{
    active_knn, compute_bounds, generate, rasterize, GridConfig, Metric, SearchParams,
};

fn main() -> Result<(), Box<dyn Error>> {
    let ds = generate(3_000, 3, 11)?;
    let cfg = GridConfig::new(
        600,
        compute_bounds(&ds, DEFAULT_MARGIN_FRACTION)?,
        Metric::L2,
    )?;
    let grid = rasterize(&ds, &cfg, false);

    let res = active_knn(&grid, (0.5, 0.4), &SearchParams::new(11, 60, Metric::L2))?;
    let overlay = Overlay {
        center: res.query_pixel,
        radii: res.trace.steps.iter().map(|s| s.radius).collect(),
    };

    let path = std::env::temp_dir().join("pixel_knn_search.ppm");
    render(&grid, &path, Some(&overlay))?;
    println!(
        "radii {:?}, predicted class {}",
        overlay.radii, res.predicted_class
    );
    println!("wrote {}", path.display());
    Ok(())
}

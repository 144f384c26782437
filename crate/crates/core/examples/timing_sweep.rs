//! Query time of exhaustive kNN and the grid search as the dataset grows.
//!
//! Uses the default 3000x3000 grid, k = 11, r0 = 100 and 100 held-out
//! queries. Pass dataset sizes as arguments to override the default sweep:
//!
//! ```text
//! cargo run --release --example timing_sweep -- 1000 10000 100000
//! ```

use std::error::Error;

use pixel_knn::bench::{run_bench_with_progress, BenchConfig, Method};

fn main() -> Result<(), Box<dyn Error>> {
    let mut cfg = BenchConfig {
        repeats: 1,
        ..BenchConfig::default()
    };
    let sizes: Vec<usize> = std::env::args()
        .skip(1)
        .map(|a| a.parse())
        .collect::<Result<_, _>>()?;
    if !sizes.is_empty() {
        cfg.n_values = sizes;
    }

    println!(
        "{:>9}  {:>14}  {:>14}  {:>10}  {:>9}",
        "n", "brute (us/q)", "active (us/q)", "build (ms)", "agreement"
    );
    let mut brute_us = 0.0;
    run_bench_with_progress(&cfg, |row| match row.method {
        Method::BruteForce => brute_us = row.query_mean_us,
        Method::ActiveSearch => println!(
            "{:>9}  {:>14.2}  {:>14.2}  {:>10.2}  {:>9.2}",
            row.n,
            brute_us,
            row.query_mean_us,
            row.build_ms,
            row.agreement.unwrap_or(f64::NAN)
        ),
    })?;
    Ok(())
}

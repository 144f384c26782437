//! Command-line front end: `generate`, `rasterize`, `query`, `classify`,
//! `bench` and `render`.
//!
//! Exit status is 0 on success, 2 on a usage error and 1 on any other error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pixel_knn::bench::{run_bench_with_progress, BenchConfig, DEFAULT_N_VALUES};
use pixel_knn::dataset::DEFAULT_MARGIN_FRACTION;
use pixel_knn::oracle::{brute_classify, OracleMode};
use pixel_knn::raster::{render, Overlay};
use pixel_knn::{
    active_knn, compute_bounds, generate, load, rasterize, save, write_csv, Dataset, GridConfig,
    Metric, QueryResult, RasterGrid, SearchParams,
};

#[derive(Parser)]
#[command(
    name = "pixel-knn",
    version,
    about = "kNN search on rasterised 2-D point sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic uniform dataset as CSV.
    Generate {
        #[arg(long, default_value_t = 1000, value_parser = positive)]
        n: usize,
        #[arg(long, default_value_t = 3, value_parser = positive)]
        classes: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rasterise a dataset and print grid statistics.
    Rasterize {
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Find the k nearest neighbours of one point and print the search trace.
    Query {
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Classify one point with the grid search and the exhaustive baseline.
    Classify {
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Time both methods over a sweep of dataset sizes and write CSV.
    Bench {
        /// Comma-separated dataset sizes, ascending.
        #[arg(long, value_delimiter = ',', value_parser = positive)]
        n: Vec<usize>,
        #[arg(long, default_value_t = 3, value_parser = positive)]
        classes: usize,
        #[arg(long, default_value_t = 11, value_parser = positive)]
        k: usize,
        #[arg(long, default_value_t = 100, value_parser = positive_u64)]
        r0: u64,
        #[arg(long, default_value_t = 3000, value_parser = positive)]
        resolution: usize,
        #[arg(long, default_value = "l2", value_parser = parse_metric)]
        metric: Metric,
        #[arg(long, default_value_t = 100, value_parser = positive)]
        queries: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 3, value_parser = positive)]
        repeats: usize,
        #[arg(long, default_value = "bench.csv")]
        out: PathBuf,
    },
    /// Render the grid as a binary PPM, optionally with a query's search circles.
    Render {
        #[command(flatten)]
        grid: GridArgs,
        /// Draw the query marker and every probed radius.
        #[arg(long, requires_all = ["x", "y"])]
        overlay_trace: bool,
        #[arg(long, allow_negative_numbers = true)]
        x: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        y: Option<f64>,
        #[arg(long, default_value_t = 11, value_parser = positive)]
        k: usize,
        #[arg(long, default_value_t = 100, value_parser = positive_u64)]
        r0: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct GridArgs {
    /// Dataset CSV (`x,y,label`).
    #[arg(long)]
    data: PathBuf,
    /// Number of classes; inferred from the labels when omitted.
    #[arg(long, value_parser = positive)]
    classes: Option<usize>,
    #[arg(long, default_value_t = 3000, value_parser = positive)]
    resolution: usize,
    #[arg(long, default_value = "l2", value_parser = parse_metric)]
    metric: Metric,
    /// Keep per-pixel point ids so results name the original points.
    #[arg(long)]
    buckets: bool,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, allow_negative_numbers = true)]
    x: f64,
    #[arg(long, allow_negative_numbers = true)]
    y: f64,
    #[arg(long, default_value_t = 11, value_parser = positive)]
    k: usize,
    #[arg(long, default_value_t = 100, value_parser = positive_u64)]
    r0: u64,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn positive_u64(s: &str) -> Result<u64, String> {
    positive(s).map(|v| v as u64)
}

fn parse_metric(s: &str) -> Result<Metric, String> {
    s.parse().map_err(|e: pixel_knn::RasterError| e.to_string())
}

enum Failure {
    Usage(String),
    Runtime(Box<dyn std::error::Error>),
}

impl<E: std::error::Error + 'static> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Runtime(Box::new(e))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Generate {
            n,
            classes,
            seed,
            out,
        } => {
            let ds = generate(n, classes, seed)?;
            save(&ds, &out)?;
            println!("wrote {n} points ({classes} classes) to {}", out.display());
        }
        Command::Rasterize { grid } => {
            let (ds, grid) = build(&grid)?;
            print_grid_stats(&ds, &grid);
        }
        Command::Query { grid, search } => {
            let (_, grid) = build(&grid)?;
            let result = search_one(&grid, &search)?;
            print_result(&grid, &result);
        }
        Command::Classify {
            grid: grid_args,
            search,
        } => {
            let (ds, grid) = build(&grid_args)?;
            let result = search_one(&grid, &search)?;
            let baseline = brute_classify(
                &ds,
                (search.x, search.y),
                search.k,
                OracleMode::world(grid_args.metric),
            )?;
            println!("predicted class: {}", result.predicted_class);
            println!("votes: {:?}", result.votes);
            println!("exhaustive kNN class: {baseline}");
            println!("probes: {}", result.trace.steps.len());
        }
        Command::Bench {
            n,
            classes,
            k,
            r0,
            resolution,
            metric,
            queries,
            seed,
            repeats,
            out,
        } => {
            let cfg = BenchConfig {
                n_values: if n.is_empty() {
                    DEFAULT_N_VALUES.to_vec()
                } else {
                    n
                },
                num_classes: classes,
                k,
                r0,
                resolution,
                metric,
                num_queries: queries,
                seed,
                repeats,
            };
            cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
            let report = run_bench_with_progress(&cfg, |row| {
                eprintln!(
                    "n={:>8} {:<13} build {:>9.3} ms  query mean {:>10.3} us",
                    row.n,
                    row.method.to_string(),
                    row.build_ms,
                    row.query_mean_us
                );
            })?;
            let mut file = BufWriter::new(File::create(&out)?);
            write_csv(&report.rows, &mut file)?;
            file.flush()?;
            println!("wrote {}", out.display());
        }
        Command::Render {
            grid: grid_args,
            overlay_trace,
            x,
            y,
            k,
            r0,
            out,
        } => {
            let (_, grid) = build(&grid_args)?;
            let overlay = match (overlay_trace, x, y) {
                (true, Some(x), Some(y)) => {
                    let search = SearchArgs { x, y, k, r0 };
                    let result = search_one(&grid, &search)?;
                    Some(Overlay {
                        center: result.query_pixel,
                        radii: result.trace.steps.iter().map(|s| s.radius).collect(),
                    })
                }
                _ => None,
            };
            render(&grid, &out, overlay.as_ref())?;
            println!(
                "wrote {0}x{0} image to {1}",
                grid.resolution(),
                out.display()
            );
        }
    }
    Ok(())
}

fn build(args: &GridArgs) -> Result<(Dataset, RasterGrid), Failure> {
    let ds = load(&args.data, args.classes)?;
    let bounds = compute_bounds(&ds, DEFAULT_MARGIN_FRACTION)?;
    let cfg = GridConfig::new(args.resolution, bounds, args.metric)?;
    let grid = rasterize(&ds, &cfg, args.buckets);
    Ok((ds, grid))
}

fn search_one(grid: &RasterGrid, args: &SearchArgs) -> Result<QueryResult, Failure> {
    if !args.x.is_finite() || !args.y.is_finite() {
        return Err(Failure::Usage("query coordinates must be finite".into()));
    }
    if args.k > grid.total_points() {
        return Err(Failure::Usage(format!(
            "k ({}) exceeds the number of points ({})",
            args.k,
            grid.total_points()
        )));
    }
    let params = SearchParams::new(args.k, args.r0, grid.config().metric);
    Ok(active_knn(grid, (args.x, args.y), &params)?)
}

fn print_grid_stats(ds: &Dataset, grid: &RasterGrid) {
    let b = grid.config().bounds;
    println!("points: {}", ds.len());
    println!("classes: {}", grid.num_classes());
    println!("resolution: {0}x{0}", grid.resolution());
    println!(
        "bounds: x [{}, {}], y [{}, {}]",
        b.xmin, b.xmax, b.ymin, b.ymax
    );
    println!("per-class counts: {:?}", grid.class_totals());
    println!("occupied pixels: {}", grid.occupied_pixels());
    println!("collision-free: {}", grid.is_collision_free());
}

fn print_result(grid: &RasterGrid, result: &QueryResult) {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let _ = writeln!(out, "query pixel: {}", result.query_pixel);
    let _ = writeln!(out, "trace ({:?}):", result.trace.terminated_by);
    for (t, step) in result.trace.steps.iter().enumerate() {
        let _ = writeln!(out, "  t={t:<3} r={:<6} n={}", step.radius, step.count);
    }
    let _ = writeln!(out, "final radius: {}", result.radius);
    let _ = writeln!(out, "neighbors:");
    for hit in &result.neighbors {
        let (x, y) = grid.config().pixel_center(hit.pixel);
        let ids = hit
            .point_ids
            .as_ref()
            .map(|ids| format!(" ids {ids:?}"))
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "  {} ~({x:.6}, {y:.6}) class {} x{} dist {:.3}{ids}",
            hit.pixel, hit.class, hit.count, hit.distance
        );
    }
    let _ = writeln!(
        out,
        "predicted class: {} (votes {:?})",
        result.predicted_class, result.votes
    );
}

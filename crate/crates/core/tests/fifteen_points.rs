mod common;

use pixel_knn::{
    active_knn_at, brute_knn, compute_bounds, rasterize, GridConfig, Metric, OracleMode,
    PixelCoord, SearchParams, Termination,
};

fn grid_config(metric: Metric) -> GridConfig {
    let bounds = compute_bounds(&common::fifteen(), 0.05).unwrap();
    GridConfig::new(20, bounds, metric).unwrap()
}

#[test]
fn bounds_with_margin() {
    let b = compute_bounds(&common::fifteen(), 0.05).unwrap();
    assert!((b.xmin - 0.6).abs() < 1e-12);
    assert!((b.xmax - 9.4).abs() < 1e-12);
    assert!((b.ymin - 0.075).abs() < 1e-12);
    assert!((b.ymax - 9.425).abs() < 1e-12);
}

#[test]
fn pixels_are_distinct_at_twenty() {
    let cfg = grid_config(Metric::L2);
    let expected = [
        (0, 15),
        (3, 9),
        (5, 18),
        (5, 5),
        (7, 11),
        (10, 3),
        (10, 15),
        (12, 9),
        (14, 18),
        (14, 5),
        (16, 13),
        (16, 0),
        (19, 7),
        (3, 0),
        (19, 19),
    ];
    for (&(x, y), &(col, row)) in common::FIFTEEN.iter().zip(&expected) {
        assert_eq!(cfg.pixel_of(x, y), PixelCoord::new(col, row), "({x}, {y})");
    }
    let grid = rasterize(&common::fifteen(), &cfg, true);
    assert!(grid.is_collision_free());
    assert_eq!(grid.occupied_pixels(), 15);
}

#[test]
fn three_nearest_of_a_data_point() {
    for (metric, ids) in [(Metric::L2, vec![4, 1, 6]), (Metric::L1, vec![4, 1, 7])] {
        let cfg = grid_config(metric);
        let grid = rasterize(&common::fifteen(), &cfg, true);
        let params = SearchParams::new(3, 100, metric);
        let res = active_knn_at(&grid, PixelCoord::new(7, 11), &params).unwrap();
        assert_eq!(res.point_ids().unwrap(), ids, "{metric}");
        assert_eq!(res.predicted_class, 0);
        assert_eq!(res.multiplicity(), 3);
        assert_ne!(res.trace.terminated_by, Termination::IterationCap);

        let (x, y) = common::FIFTEEN[4];
        let oracle = brute_knn(
            &common::fifteen(),
            (x, y),
            3,
            OracleMode::pixel(cfg, metric),
        )
        .unwrap();
        assert_eq!(oracle.iter().map(|n| n.index).collect::<Vec<_>>(), ids);
    }
}

#[test]
fn l2_neighbour_distances() {
    let cfg = grid_config(Metric::L2);
    let grid = rasterize(&common::fifteen(), &cfg, true);
    let res = active_knn_at(
        &grid,
        PixelCoord::new(7, 11),
        &SearchParams::new(3, 100, Metric::L2),
    )
    .unwrap();
    let keys: Vec<u64> = res.neighbors.iter().map(|h| h.distance_key).collect();
    assert_eq!(keys, [0, 20, 25]);
}

#[test]
fn world_neighbours_off_grid() {
    let got = brute_knn(
        &common::fifteen(),
        (4.1, 4.2),
        3,
        OracleMode::world(Metric::L2),
    )
    .unwrap();
    assert_eq!(got.iter().map(|n| n.index).collect::<Vec<_>>(), [4, 7, 1]);
}

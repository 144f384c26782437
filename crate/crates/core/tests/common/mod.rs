#![allow(dead_code)]

use pixel_knn::{Dataset, LabeledPoint};

/// Fifteen scattered single-class points on a 10x10 field.
pub const FIFTEEN: [(f64, f64); 15] = [
    (1.0, 2.0),
    (2.0, 5.0),
    (3.0, 1.0),
    (3.0, 7.0),
    (4.0, 4.0),
    (5.0, 8.0),
    (5.0, 2.0),
    (6.0, 5.0),
    (7.0, 1.0),
    (7.0, 7.0),
    (8.0, 3.0),
    (8.0, 9.0),
    (9.0, 6.0),
    (2.0, 9.0),
    (9.0, 0.5),
];

pub fn fifteen() -> Dataset {
    let pts = FIFTEEN
        .iter()
        .map(|&(x, y)| LabeledPoint::new(x, y, 0))
        .collect();
    Dataset::new(pts, 1).unwrap()
}

pub fn fifteen_csv() -> String {
    let mut s = String::from("x,y,label\n");
    for (x, y) in FIFTEEN {
        s.push_str(&format!("{x},{y},0\n"));
    }
    s
}

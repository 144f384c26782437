mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use pixel_knn::bench::CSV_HEADER;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pixel-knn"))
        .args(args)
        .output()
        .unwrap()
}

fn write_fifteen(dir: &Path) -> String {
    let path = dir.join("fifteen.csv");
    fs::write(&path, common::fifteen_csv()).unwrap();
    path.to_str().unwrap().to_owned()
}

fn ppm_body(bytes: &[u8]) -> &[u8] {
    // Header is three newline-terminated lines.
    let mut seen = 0;
    let at = bytes
        .iter()
        .position(|&b| {
            seen += (b == b'\n') as usize;
            seen == 3
        })
        .unwrap();
    &bytes[at + 1..]
}

#[test]
fn bench_writes_csv_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b.csv");
    let o = run(&[
        "bench",
        "--n",
        "200,400",
        "--resolution",
        "300",
        "--queries",
        "5",
        "--repeats",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("200,brute_force,"));
    assert!(lines[4].starts_with("400,active_search,"));
}

#[test]
fn query_with_k_above_n_names_both() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_fifteen(dir.path());
    let o = run(&[
        "query", "--data", &data, "--x", "4", "--y", "4", "--k", "16",
    ]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("16") && err.contains("15"), "{err}");
}

#[test]
fn query_prints_trace() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_fifteen(dir.path());
    let o = run(&[
        "query",
        "--data",
        &data,
        "--resolution",
        "20",
        "--buckets",
        "--x",
        "4",
        "--y",
        "4",
        "--k",
        "3",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.contains("t=0"), "{out}");
    assert!(out.contains("r=40"), "{out}");
    let ids: Vec<&str> = out
        .lines()
        .filter_map(|l| l.split(" ids ").nth(1))
        .collect();
    assert_eq!(ids, ["[4]", "[1]", "[6]"], "{out}");
}

#[test]
fn render_colours_one_pixel_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_fifteen(dir.path());
    let out = dir.path().join("f.ppm");
    let o = run(&[
        "render",
        "--data",
        &data,
        "--resolution",
        "20",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let bytes = fs::read(out).unwrap();
    assert!(bytes.starts_with(b"P6\n20 20\n255\n"));
    let coloured = ppm_body(&bytes)
        .chunks(3)
        .filter(|p| *p != [255, 255, 255])
        .count();
    assert_eq!(coloured, 15);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_fifteen(dir.path());
    for args in [
        vec!["query", "--data", &data, "--x", "1", "--y", "1", "--k", "0"],
        vec!["bench", "--resolution", "-3"],
        vec!["generate", "--n", "abc", "--out", "x.csv"],
        vec![
            "render",
            "--data",
            &data,
            "--overlay-trace",
            "--out",
            "x.ppm",
        ],
        vec!["nonsense"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn missing_file_is_runtime_error() {
    let o = run(&["rasterize", "--data", "/nonexistent/data.csv"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn generate_then_classify() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("g.csv");
    let data = data.to_str().unwrap();
    assert!(
        run(&["generate", "--n", "500", "--seed", "7", "--out", data])
            .status
            .success()
    );
    let o = run(&[
        "classify",
        "--data",
        data,
        "--resolution",
        "500",
        "--x",
        "0.5",
        "--y",
        "0.5",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

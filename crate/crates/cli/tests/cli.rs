use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn skyline(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skyline"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = skyline(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_writes_header_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let summary = ok(&[
        "generate",
        "--gen",
        "uniform,100,2",
        "--seed",
        "3",
        "--out",
        path_str(&a),
    ]);
    assert!(summary.contains("N=100") && summary.contains("d=2") && summary.contains("seed=3"));
    ok(&[
        "generate",
        "--gen",
        "uniform,100,2",
        "--seed",
        "3",
        "--out",
        path_str(&b),
    ]);
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text.lines().count(), 101);
    assert_eq!(text.lines().next(), Some("d0,d1"));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let empty = ok(&["generate", "--gen", "anti,0,3"]);
    assert_eq!(empty, "d0,d1,d2\n");
}

#[test]
fn noseq_preset_reports_sliced_noseq() {
    let v = json(&["run", "--gen", "anti,20000,4", "--preset", "noseq", "--workers", "2"]);
    assert_eq!(v["merge"], "NOSEQ");
    assert_eq!(v["strategy"], "SLICED");
    assert_eq!(v["filter"], "NONE");
    assert_eq!(v["effective_p"], 120);
    assert_eq!(
        v["skyline"].as_array().unwrap().len() as u64,
        v["skyline_size"].as_u64().unwrap()
    );
}

#[test]
fn worker_count_does_not_change_the_skyline() {
    let base = ["run", "--gen", "uniform,5000,3", "--preset", "sliced+", "--seed", "9"];
    let one = json(&[&base[..], &["--workers", "1"]].concat());
    let eight = json(&[&base[..], &["--workers", "8"]].concat());
    assert_eq!(one["skyline"], eight["skyline"]);
    assert_eq!(one["union_size"], eight["union_size"]);

    let canon1 = ok(&[&base[..], &["--workers", "1", "--canonical"]].concat());
    let canon8 = ok(&[&base[..], &["--workers", "8", "--canonical"]].concat());
    assert_eq!(canon1, canon8);
}

#[test]
fn oracle_flag_reports_a_match() {
    for strategy in ["random", "grid", "angular", "sliced"] {
        let v = json(&[
            "run",
            "--gen",
            "anti,5000,3",
            "--strategy",
            strategy,
            "--merge",
            "noseq",
            "--oracle",
        ]);
        assert_eq!(v["oracle_match"], true, "{strategy}");
    }
    let v = json(&[
        "run",
        "--gen",
        "corr,3000,4",
        "--strategy",
        "grid",
        "--filter",
        "grid",
        "--oracle",
    ]);
    assert_eq!(v["oracle_match"], true);
    assert!(v["filtered"].as_u64().unwrap() > 0);
}

#[test]
fn flags_override_the_preset() {
    let v = json(&[
        "run",
        "--gen",
        "uniform,500,4",
        "--preset",
        "angular+",
        "--reps-q",
        "3",
        "--merge",
        "noseq",
    ]);
    assert_eq!(v["strategy"], "ANGULAR");
    assert_eq!(v["filter"], "REPRESENTATIVE");
    assert_eq!(v["selection"], "SORTED");
    assert_eq!(v["reps_q"], 3);
    assert_eq!(v["merge"], "NOSEQ");
    assert_eq!(v["effective_p"], 125);

    let v = json(&["run", "--gen", "uniform,500,2", "--strategy", "grid", "--slices", "3"]);
    assert_eq!(v["effective_p"], 9);
}

#[test]
fn csv_input_and_csv_output() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("hotels.csv");
    std::fs::write(&input, "name,price,rating\na,100,4\nb,80,3\nc,,5\nd,120,5\ne,90,2\n").unwrap();
    let v = json(&[
        "run",
        "--input",
        path_str(&input),
        "--columns",
        "price,rating:max",
        "--partitions",
        "2",
        "--oracle",
    ]);
    assert_eq!(v["n"], 4);
    assert_eq!(v["d"], 2);
    assert_eq!(v["oracle_match"], true);
    // rows a, b and d survive: b is cheapest, d best rated, a in between
    assert_eq!(v["skyline_ids"], serde_json::json!([0, 1, 2]));

    let text = ok(&[
        "run",
        "--input",
        path_str(&input),
        "--columns",
        "price,rating:max",
        "--format",
        "csv",
    ]);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("id,d0,d1"));
    assert_eq!(lines.count(), 3);
}

#[test]
fn exit_codes() {
    assert_eq!(skyline(&["--help"]).status.code(), Some(0));
    assert_eq!(
        skyline(&["run", "--gen", "anti,10,2", "--preset", "turbo"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(skyline(&["run"]).status.code(), Some(1));
    assert_eq!(skyline(&["run", "--gen", "anti,10"]).status.code(), Some(1));
    let grid_filter_on_sliced = skyline(&["run", "--gen", "anti,10,2", "--strategy", "sliced", "--filter", "grid"]);
    assert_eq!(grid_filter_on_sliced.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&grid_filter_on_sliced.stderr).contains("GRID"));
    assert_eq!(
        skyline(&["run", "--gen", "anti,10,2", "--workers", "0"]).status.code(),
        Some(1)
    );

    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.csv");
    assert_eq!(skyline(&["run", "--input", path_str(&missing)]).status.code(), Some(2));
    let header_only = dir.path().join("h.csv");
    std::fs::write(&header_only, "a,b\n").unwrap();
    let out = skyline(&["run", "--input", path_str(&header_only)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no row"));
}

fn bench_rows(args: &[&str]) -> Vec<csv::StringRecord> {
    let text = ok(&[&["bench"][..], args].concat());
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().unwrap().clone();
    assert_eq!(header.get(0), Some("dataset"));
    reader.records().map(Result::unwrap).collect()
}

fn column(header_args: &[&str], name: &str) -> Vec<String> {
    let text = ok(&[&["bench"][..], header_args].concat());
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let idx = reader.headers().unwrap().iter().position(|h| h == name).unwrap();
    reader.records().map(|r| r.unwrap()[idx].to_string()).collect()
}

#[test]
fn bench_row_count_and_snapping() {
    let rows = bench_rows(&[
        "--dist",
        "uniform",
        "--n",
        "2000",
        "--d",
        "3",
        "--partitions",
        "60,120,240",
        "--reps",
        "2",
    ]);
    assert_eq!(rows.len(), 6);

    let grid = column(
        &[
            "--dist",
            "uniform",
            "--n",
            "2000",
            "--d",
            "4",
            "--strategy",
            "grid",
            "--partitions",
            "120",
        ],
        "effective_p",
    );
    assert_eq!(grid, vec!["256"]);
    let angular = column(
        &[
            "--dist",
            "uniform",
            "--n",
            "2000",
            "--d",
            "4,3",
            "--strategy",
            "angular",
            "--partitions",
            "120",
        ],
        "effective_p",
    );
    assert_eq!(angular, vec!["125", "121"]);
}

#[test]
fn bench_sweeps_presets_and_skips_invalid_cells() {
    let args = [
        "--dist",
        "anti,corr",
        "--n",
        "1000",
        "--d",
        "2,3",
        "--preset",
        "random,grid,sliced+,noseq",
        "--workers",
        "1,2",
    ];
    let rows = bench_rows(&args);
    assert_eq!(rows.len(), 2 * 2 * 4 * 2);

    let out = skyline(&[
        "bench",
        "--n",
        "500",
        "--d",
        "2",
        "--strategy",
        "sliced,grid",
        "--filter",
        "none,grid",
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("skipped 1"));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 3);

    let none = skyline(&[
        "bench",
        "--n",
        "500",
        "--d",
        "2",
        "--strategy",
        "sliced",
        "--filter",
        "grid",
    ]);
    assert_eq!(none.status.code(), Some(1));
}

#[test]
fn canonical_bench_is_byte_reproducible() {
    let args = [
        "bench",
        "--dist",
        "anti",
        "--n",
        "3000",
        "--d",
        "4",
        "--strategy",
        "random,grid",
        "--merge",
        "seq,noseq",
        "--seed",
        "4",
        "--canonical",
    ];
    let first = ok(&[&args[..], &["--workers", "1"]].concat());
    let second = ok(&[&args[..], &["--workers", "1"]].concat());
    assert_eq!(first, second);
    let times = column(&args[1..], "total_ms");
    assert!(times.iter().all(String::is_empty));
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use slicedgw::cli::{rotation2, spiral};
use slicedgw::io::to_csv;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slicedgw")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn missing_file_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.csv", "0,0\n1,1\n");
    let out = run(&["compute", s(&a), s(&dir.path().join("nope.csv"))]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_off_header_exits_1_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.off", "# mesh\nCOFF\n3 0 0\n0 0 0\n1 0 0\n0 1 0\n");
    let out = run(&["compute", s(&bad), s(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2:"));

    let bad = write(dir.path(), "counts.off", "OFF\nthree 0 0\n");
    let out = run(&["compute", s(&bad), s(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2:"));
}

#[test]
fn contract_violations_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.csv", "0,0\n1,1\n2,0\n");
    let b = write(dir.path(), "b.csv", "0,0\n1,1\n");
    let c = write(dir.path(), "c.csv", "0\n1\n");
    // unequal sizes without subsampling
    assert_eq!(run(&["compute", s(&a), s(&b)]).status.code(), Some(2));
    // source dimension above target dimension
    assert_eq!(run(&["compute", s(&a), s(&c), "--subsample"]).status.code(), Some(2));
    assert_eq!(run(&["compute", s(&a), s(&a), "--L", "0"]).status.code(), Some(2));

    let lonely = tempfile::tempdir().unwrap();
    write(lonely.path(), "only.csv", "0,0\n1,1\n");
    assert_eq!(run(&["pairwise", s(lonely.path())]).status.code(), Some(2));
}

#[test]
fn same_file_is_zero_and_translated_copy_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cloud = spiral(120, 5);
    let a = write(dir.path(), "a.csv", &to_csv(&cloud));
    let b = write(dir.path(), "b.csv", &to_csv(&cloud.translated(&[3.5, -2.0]).unwrap()));
    assert_eq!(json(&run(&["compute", s(&a), s(&a)]))["value"], 0.0);
    let v = json(&run(&["compute", s(&a), s(&b)]))["value"].as_f64().unwrap();
    assert!(v.abs() < 1e-12, "{v}");
}

#[test]
fn json_report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.csv", &to_csv(&spiral(50, 1)));
    let b = write(dir.path(), "b.csv", &to_csv(&spiral(50, 2)));
    let out = run(&["compute", s(&a), s(&b), "--per-direction", "--L", "7", "--seed", "11"]);
    let report = json(&out);
    assert_eq!(report["L"], 7);
    assert_eq!(report["seed"], 11);
    let per: Vec<f64> = report["per_direction"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert_eq!(per.len(), 7);
    let mean = per.iter().sum::<f64>() / 7.0;
    assert!((mean - report["value"].as_f64().unwrap()).abs() <= 1e-15);
    // every emitted real parses to a value that prints back to the same token
    let text = String::from_utf8(out.stdout).unwrap();
    let reals: Vec<&str> = text
        .split(|c: char| c.is_whitespace() || c == ',' || c == '[' || c == ']')
        .filter(|t| t.contains('.') && t.parse::<f64>().is_ok())
        .collect();
    assert_eq!(reals.len(), 8);
    for tok in reals {
        assert_eq!(serde_json::to_string(&tok.parse::<f64>().unwrap()).unwrap(), tok);
    }
}

#[test]
fn risgw_at_most_sgw_on_rotated_copy() {
    let dir = tempfile::tempdir().unwrap();
    let cloud = spiral(150, 8);
    let a = write(dir.path(), "a.csv", &to_csv(&cloud));
    let b = write(dir.path(), "b.csv", &to_csv(&cloud.mapped(&rotation2(std::f64::consts::FRAC_PI_4)).unwrap()));
    let sgw = json(&run(&["compute", s(&a), s(&b)]))["value"].as_f64().unwrap();
    let report = json(&run(&["compute", s(&a), s(&b), "--metric", "risgw"]));
    let risgw = report["value"].as_f64().unwrap();
    assert!(risgw <= sgw, "{risgw} > {sgw}");
    assert!(risgw < 0.1 * sgw);
    assert!(report["iterations"].as_u64().unwrap() <= 30);
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("curve.csv");
    let out = run(&["spiral", "--n", "30", "--L", "4", "--trials", "2", "--angles", "0,1", "--output", s(&target)]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&target).unwrap();
    assert!(text.starts_with("angle,mean_sgw,mean_risgw,"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn pairwise_copies_give_zero_matrix_and_mds() {
    let dir = tempfile::tempdir().unwrap();
    let text = to_csv(&spiral(40, 3));
    for k in 0..3 {
        write(dir.path(), &format!("copy{k}.csv"), &text);
    }
    let mds = dir.path().join("mds.csv");
    let out = run(&["pairwise", s(dir.path()), "--mds", "--mds-output", s(&mds)]);
    assert!(out.status.success());
    let matrix = String::from_utf8(out.stdout).unwrap();
    let mut lines = matrix.lines();
    assert_eq!(lines.next().unwrap(), "name,copy0.csv,copy1.csv,copy2.csv");
    for line in lines {
        assert!(line.split(',').skip(1).all(|v| v.parse::<f64>().unwrap() == 0.0), "{line}");
    }
    let coords = std::fs::read_to_string(&mds).unwrap();
    assert_eq!(coords.lines().next().unwrap(), "name,x,y");
    assert_eq!(coords.lines().count(), 4);
}

#[test]
fn bench_reports_each_size() {
    let out = run(&["bench", "--sizes", "500,1000", "--repeats", "1", "--L", "5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "n,milliseconds,value");
    assert!(rows[1].starts_with("500,") && rows[2].starts_with("1000,"));
}

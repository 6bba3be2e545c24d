use std::path::Path;
use std::process::{Command, Output};

use qclone_core::closed_form::{fid_n_to_n_plus_1, CurveParam};

fn qclone(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qclone")).args(args).output().expect("binary runs")
}

fn rows(out: &Output) -> (Vec<String>, Vec<Vec<String>>) {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    parse(&String::from_utf8(out.stdout.clone()).unwrap(), b',')
}

fn parse(text: &str, delim: u8) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::ReaderBuilder::new().delimiter(delim).from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let body = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, body)
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

fn f(s: &str) -> f64 {
    s.parse().unwrap_or_else(|_| panic!("not a number: {s:?}"))
}

#[test]
fn tradeoff_1_1_1_follows_the_closed_form() {
    let (h, body) = rows(&qclone(&["tradeoff", "-N", "1", "-a", "1", "-b", "1"]));
    assert_eq!(body.len(), 101);
    let (ia, ib, isym) = (col(&h, "F_A"), col(&h, "F_B"), col(&h, "symmetric"));
    for row in &body {
        let fa = f(&row[ia]);
        let x = (1.5 * (1.0 - fa)).sqrt();
        let (_, fb) = fid_n_to_n_plus_1(1, CurveParam::from_x(x).unwrap()).unwrap();
        assert!((f(&row[ib]) - fb).abs() < 1e-6, "F_A={fa}: {} vs {fb}", row[ib]);
    }
    let flagged: Vec<_> = body.iter().filter(|r| r[isym] == "1").collect();
    assert_eq!(flagged.len(), 1);
    assert!((f(&flagged[0][ia]) - 5.0 / 6.0).abs() <= 0.005);
}

#[test]
fn empty_b_group_is_a_single_row() {
    let (h, body) = rows(&qclone(&["tradeoff", "-N", "1", "-a", "2", "-b", "0"]));
    assert_eq!(body.len(), 1);
    assert!((f(&body[0][col(&h, "F_A")]) - 5.0 / 6.0).abs() < 1e-9);
    assert_eq!(body[0][col(&h, "F_B")], "");
}

#[test]
fn optical_simulation_matches_formulas() {
    let (h, body) = rows(&qclone(&["optical", "-N", "1", "-a", "1", "-b", "2", "--t-grid", "0.1:1:10"]));
    assert_eq!(body.len(), 10);
    let d = col(&h, "max_abs_diff");
    for row in &body {
        assert!(f(&row[d]) < 1e-9, "{row:?}");
    }
}

#[test]
fn three_way_limit() {
    let (h, body) = rows(&qclone(&["optical", "--three-way", "--t1", "0.5", "--t2", "1.0"]));
    let row = &body[0];
    for (name, want) in [("F_A", 1.0), ("F_B", 0.5), ("F_C", 0.5)] {
        assert!((f(&row[col(&h, name)]) - want).abs() < 1e-9, "{name}");
    }
}

#[test]
fn cg_table_is_unitary() {
    let (h, body) = rows(&qclone(&["cg-table", "1/2", "1/2"]));
    let c = col(&h, "coefficient");
    let key = |r: &Vec<String>, a: &str, b: &str| (r[col(&h, a)].clone(), r[col(&h, b)].clone());
    let mut ins: Vec<_> = body.iter().map(|r| key(r, "m1", "m2")).collect();
    let mut outs: Vec<_> = body.iter().map(|r| key(r, "J", "M")).collect();
    ins.sort();
    ins.dedup();
    outs.sort();
    outs.dedup();
    assert_eq!((ins.len(), outs.len()), (4, 4));
    let mut u = [[0.0; 4]; 4];
    for r in &body {
        let i = ins.iter().position(|k| *k == key(r, "m1", "m2")).unwrap();
        let j = outs.iter().position(|k| *k == key(r, "J", "M")).unwrap();
        u[i][j] = f(&r[c]);
    }
    for a in 0..4 {
        for b in 0..4 {
            let dot: f64 = (0..4).map(|k| u[k][a] * u[k][b]).sum();
            assert!((dot - if a == b { 1.0 } else { 0.0 }).abs() < 1e-12);
        }
    }
}

#[test]
fn bad_problem_is_a_usage_error_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    let o = qclone(&["tradeoff", "-N", "0", "-a", "1", "-b", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
    assert_eq!(qclone(&["optical", "-N", "1", "-a", "1", "-b", "1", "--t", "1.5"]).status.code(), Some(2));
    assert_eq!(qclone(&["no-such-command"]).status.code(), Some(2));
}

fn write(path: &Path, extra: &[&str]) -> String {
    let mut args = vec![
        "tradeoff",
        "-N",
        "1",
        "-a",
        "1",
        "-b",
        "2",
        "--grid",
        "11",
        "--seed",
        "7",
        "--out",
        path.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    let o = qclone(&args);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn out_file_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("f.csv");
    let first = write(&p, &[]);
    let second = write(&p, &[]);
    assert_eq!(first, second);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    let (_, csv_rows) = parse(&first, b',');
    let tsv = write(&dir.path().join("f.tsv"), &["--format", "tsv"]);
    let (_, tsv_rows) = parse(&tsv, b'\t');
    assert_eq!(csv_rows, tsv_rows);
    assert_eq!(csv_rows.len(), 11);
}

#[test]
fn verify_cg_passes() {
    let o = qclone(&["verify", "cg"]);
    assert_eq!(o.status.code(), Some(0));
    let (h, body) = rows(&o);
    assert!(body.iter().all(|r| r[col(&h, "status")] == "pass"));
}

#[test]
fn verify_reference_values_passes() {
    let o = qclone(&["verify"]);
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(o.status.code(), Some(0), "{text}");
}

#[test]
fn closed_form_curves_end_at_their_limits() {
    let ends = |args: &[&str]| {
        let (h, body) = rows(&qclone(args));
        let pick = |r: &Vec<String>| (f(&r[col(&h, "F_A")]), f(&r[col(&h, "F_B")]));
        (pick(&body[0]), pick(body.last().unwrap()))
    };
    let close = |a: (f64, f64), b: (f64, f64)| (a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12;
    let (s, e) = ends(&["closed-form", "measurement-limit"]);
    assert!(close(s, (1.0, 0.5)) && close(e, (2.0 / 3.0, 2.0 / 3.0)));
    let (s, e) = ends(&["closed-form", "n-to-n+1", "--n", "3"]);
    assert!(close(s, (1.0, 0.5)) && close(e, (1.0 - 2.0 * (5.0 / 8.0) / 15.0, 1.0)), "{e:?}");
    let (s, e) = ends(&["closed-form", "1-to-1+n", "--n", "3"]);
    assert!(close(s, (1.0, 0.5)) && close(e, (7.0 / 12.0, 7.0 / 9.0)), "{e:?}");
    let (s, e) = ends(&["closed-form", "qudit-1to11", "--d", "5"]);
    assert!(close(s, (0.2, 1.0)) && close(e, (1.0, 0.2)), "{s:?} {e:?}");
}

use std::fs;
use std::process::{Command, Output};

use sphere_re::continuation::{trace_full_branch, Family, TraceOptions};
use sphere_re::{MassTriple, Shape};
use sphere_re_cli::output::{BranchFile, Format};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_sphere-re"));
    for var in ["FORMAT", "OUT", "TOL_NEWTON", "TOL_PLANE", "MAX_STEP", "GRID", "THREADS", "MASSES", "NU", "DNU", "SHAPE"] {
        c.env_remove(format!("SPHERE_RE_{var}"));
    }
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn solve_recovers_the_known_masses() {
    let o = run(&["solve", "--shape", "pi/4,3pi/4,5pi/6"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0][0], "unique-positive");
    let r3 = 3f64.sqrt();
    let nu1: f64 = rows[0][1].parse().unwrap();
    let nu2: f64 = rows[0][2].parse().unwrap();
    let det: f64 = rows[0][3].parse().unwrap();
    assert!((det - 0.25).abs() < 1e-12);
    assert!((nu1 - (2.0 + 3.0 * r3) / 2.0).abs() < 1e-12);
    assert!((nu2 - (-2.0 + 5.0 * r3) / 2.0).abs() < 1e-12);
}

#[test]
fn three_meridian_bifurcations_for_eleven_twelfths() {
    let o = run(&["count-bifurcations", "--nu", "11/12", "--dnu", "0.03"]);
    assert!(o.status.success());
    assert_eq!(csv_rows(&stdout(&o)).len(), 3);
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("3 meridian"));
    let j = run(&["count-bifurcations", "--nu", "11/12", "--dnu", "0.03", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&j.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 3);
    for r in v.as_array().unwrap() {
        let s = |k: &str| r[k].as_f64().unwrap();
        assert!((s("sigma1") + s("sigma2") - s("sigma3")).abs() < 1e-12);
    }
}

#[test]
fn residual_vanishes_at_the_equilateral_shape() {
    let o = run(&["residual", "--shape", "pi/2,pi/2,pi/2", "--masses", "1,1,1"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    for f in &rows[0][0..3] {
        assert!(f.parse::<f64>().unwrap().abs() < 1e-14);
    }
    assert_eq!(rows[0][6], "u-phys");
}

#[test]
fn embedding_reports_vertical_angular_momentum() {
    let o = run(&["embed", "--shape", "pi/2,pi/2,pi/2", "--masses", "1,1,1", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let r = &v[0];
    assert_eq!(r["kind"], "lagrange");
    assert!(r["cx"].as_f64().unwrap().abs() < 1e-12 && r["cy"].as_f64().unwrap().abs() < 1e-12);
    assert!(r["cz"].as_f64().unwrap() > 0.0);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| run(args).status.code().unwrap();
    // usage
    assert_eq!(code(&["frobnicate"]), 64);
    assert_eq!(code(&[]), 64);
    assert_eq!(code(&["solve", "--shape", "1,2"]), 64);
    assert_eq!(code(&["solve", "--shape", "1,2,x"]), 64);
    assert_eq!(code(&["solve", "--shape", "1,2,3", "--format", "xml"]), 64);
    assert_eq!(code(&["residual", "--shape", "1,1,1"]), 64);
    assert_eq!(code(&["residual", "--shape", "1,1,1", "--masses", "1,-1,1"]), 64);
    assert_eq!(code(&["residual", "--shape", "1,1,1", "--masses", "1,1,1", "--nu", "1", "--dnu", "0"]), 64);
    assert_eq!(code(&["count-bifurcations", "--nu", "1", "--dnu", "2"]), 64);
    assert_eq!(code(&["trace", "--shape", "1,1,1", "--masses", "1,2,4", "--family", "lre-bogus"]), 64);
    // domain
    assert_eq!(code(&["embed", "--shape", "0.3,0.4,0.5", "--masses", "1,1,1"]), 2);
    assert_eq!(code(&["solve", "--shape", "0,1,1"]), 2);
    assert_eq!(code(&["trace", "--shape", "1,1,1", "--masses", "1,2,4", "--family", "lre-equilateral"]), 2);
    // io
    assert_eq!(code(&["solve", "--shape", "1,1,1", "--out", "/nonexistent/dir/x.csv"]), 1);
    // help is not an error
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn verify_passes_every_check() {
    let o = run(&["verify"]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert_eq!(text.lines().filter(|l| l.contains(" PASS ")).count(), 13);
}

#[test]
fn environment_overrides_flags() {
    let o = bin()
        .args(["solve", "--shape", "pi/4,3pi/4,5pi/6"])
        .env("SPHERE_RE_FORMAT", "json")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["kind"], "unique-positive");
}

const TRACE: [&str; 9] = [
    "trace",
    "--shape",
    "0.9,0.95,1.4",
    "--masses",
    "1,2,4",
    "--family",
    "lre-generic",
    "--domain",
    "cube",
];

#[test]
fn branch_files_round_trip_without_loss() {
    let dir = tempfile::tempdir().unwrap();
    let m = MassTriple::new(1.0, 2.0, 4.0).unwrap();
    let opts = TraceOptions {
        domain: sphere_re::continuation::Domain::Cube,
        ..TraceOptions::default()
    };
    let b = trace_full_branch(&Shape::new(0.9, 0.95, 1.4), &m, Family::LreGeneric, &opts).unwrap();
    let want = BranchFile::from_branch(&b);
    assert!(!want.events.is_empty());
    for format in [Format::Csv, Format::Json] {
        let path = dir.path().join(format!("b.{}", format.extension()));
        let mut args = TRACE.to_vec();
        let p = path.to_str().unwrap();
        let f = format.extension();
        args.extend(["--out", p, "--format", f]);
        assert!(run(&args).status.success());
        let text = fs::read_to_string(&path).unwrap();
        assert!(!text.contains('\r'));
        let read = BranchFile::parse(&text, format).unwrap();
        assert_eq!(read.render(format), text);
        assert_eq!(read.rows, want.rows);
        if format == Format::Json {
            assert_eq!(read, want);
        } else {
            assert_eq!(read.events.len(), want.events.len());
            for (a, b) in read.events.iter().zip(&want.events) {
                assert_eq!((a.kind, a.arclength, a.sigma), (b.kind, b.arclength, b.sigma));
            }
        }
        assert_eq!(read.points().count(), b.points.len());
    }
}

#[test]
fn output_is_byte_identical_across_runs_and_thread_counts() {
    let mut trace = TRACE.to_vec();
    trace.extend(["--format", "json"]);
    let first = run(&trace).stdout;
    assert_eq!(run(&trace).stdout, first);
    let scan = |threads: &str| run(&["scan", "nu", "--grid", "60", "--threads", threads]).stdout;
    let one = scan("1");
    assert_eq!(scan("4"), one);
    assert_eq!(one.iter().filter(|&&c| c == b'\n').count(), 60 * 60 + 1);
    let atlas = |threads: &str| {
        let o = run(&["atlas", "--masses", "1,2,4", "--threads", threads]);
        assert!(o.status.success());
        o.stdout
    };
    let a1 = atlas("1");
    assert_eq!(atlas("4"), a1);
    assert_eq!(csv_rows(&String::from_utf8(a1).unwrap()).len(), 3);
}

#[test]
fn atlas_writes_one_file_per_branch() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("atlas");
    let o = run(&["atlas", "--masses", "1,2,12", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let mut names: Vec<String> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["branch-01.csv", "branch-02.csv", "summary.csv"]);
    for n in &names[..2] {
        let b = BranchFile::parse(&fs::read_to_string(out.join(n)).unwrap(), Format::Csv).unwrap();
        assert_eq!(b.family, Family::LreGeneric);
        assert!(b.points().count() > 10);
    }
}

#[test]
fn scans_stay_on_their_curves() {
    let o = run(&["scan", "h", "--grid", "50", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 100);
    for r in rows {
        let (a, b, c) = (
            r["sigma1"].as_f64().unwrap(),
            r["sigma2"].as_f64().unwrap(),
            r["sigma3"].as_f64().unwrap(),
        );
        let h = (3.0 * c).cos() - 3.0 * c.cos() + 2.0 * (2.0 * c).cos() * (a - b).cos();
        assert!(h.abs() < 1e-12 && (a + b - c).abs() < 1e-14);
    }
    let j = run(&["scan", "j", "--grid", "32"]);
    assert!(j.status.success());
    let rows = csv_rows(&stdout(&j));
    assert!(rows.len() > 20);
    assert!(rows.iter().all(|r| r[2] == r[3]));
}

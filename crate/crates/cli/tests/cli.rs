use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use cuttail::geometry2d::{symmetrized_hull, CanonicalTrajectory, Point2};
use cuttail_cli::job::{Command as Job, JobConfig, Report};
use cuttail_cli::{run, InputSource, Tolerances};

fn cuttail(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cuttail")).args(args).output().expect("run cuttail")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn reports(o: &Output) -> Vec<Report> {
    stdout(o).lines().map(|l| serde_json::from_str(l).expect("line re-parses as a report")).collect()
}

fn cut_tail_of(o: &Output) -> f64 {
    match &reports(o)[0] {
        Report::CutTail(r) => r.t_cut,
        other => panic!("unexpected report {other:?}"),
    }
}

#[test]
fn example_one_matrix_file() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "ex1.txt", "2\n-0.2 0\n0 -0.5\n");
    let o = cuttail(&["cut-tail", "--matrix", &m]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let Report::CutTail(r) = &reports(&o)[0] else { panic!() };
    assert!((3.85..=3.89).contains(&r.t_cut), "{}", r.t_cut);
    assert_eq!(r.dim_pa, 2);
    assert_eq!(r.input.matrix.as_ref().unwrap(), &vec![vec![-0.2, 0.0], vec![0.0, -0.5]]);
    assert!(r.bracket.0 <= r.t_cut && r.t_cut <= r.bracket.1);
    let cert = r.certificate.as_ref().unwrap();
    assert_eq!(cert.basis, vec!["exp(-0.2t)", "exp(-0.5t)"]);
    assert_eq!(cert.coeffs.len(), 2);
    assert!(!r.predicate_log.is_empty());
    assert!(r.wall_time_s.is_some());
    assert!(r.jordan.as_ref().unwrap().contains("minimal polynomial degree 2"));
    assert!((r.closed_form.unwrap() - 3.868743).abs() < 1e-4);
}

#[test]
fn identity_is_rejected_as_non_hurwitz() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "id.txt", "2\n1 0\n0 1\n");
    let o = cuttail(&["cut-tail", "--matrix", &m]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Hurwitz"));
}

#[test]
fn spectrum_and_matrix_paths_agree() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "ex2.json", r#"{"matrix": [[-0.1, -0.3], [0.3, -0.1]]}"#);
    let a = cut_tail_of(&cuttail(&["cut-tail", "--matrix", &m]));
    let b = cut_tail_of(&cuttail(&["cut-tail", "--spectrum", "-0.1+0.3i"]));
    assert!((a - b).abs() <= Tolerances::default().time_tol, "{a} vs {b}");
    assert!((5.97..=6.02).contains(&a));
}

#[test]
fn parse_errors_exit_one_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "bad.txt", "2\n-0.2 0\n0 nope\n");
    let o = cuttail(&["cut-tail", "--matrix", &m]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3, column 3"), "{err}");
    let o = cuttail(&["cut-tail", "--spectrum", "-0.1+"]);
    assert_eq!(o.status.code(), Some(1));
    let o = cuttail(&["cut-tail", "--example", "diagonal-pair", "--eps", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(cuttail(&["cut-tail"]).status.code(), Some(1));
    assert_eq!(cuttail(&["--help"]).status.code(), Some(0));
}

#[test]
fn every_report_round_trips() {
    let runs: [&[&str]; 5] = [
        &["cut-tail", "--example", "double-root"],
        &["extremal", "--spectrum", "-0.2, -0.5", "--t", "5"],
        &["verify2d", "--example", "diagonal-pair"],
        &["simulate", "--restarts", "5"],
        &["sweep", "--catalog", "--spectrum", "0.5"],
    ];
    for args in runs {
        let o = cuttail(args);
        assert!(o.status.code().is_some(), "{args:?}");
        let text = stdout(&o);
        assert!(!text.is_empty(), "{args:?}");
        for line in text.lines() {
            let r: Report = serde_json::from_str(line).unwrap();
            assert_eq!(serde_json::to_string(&r).unwrap(), line);
        }
    }
}

#[test]
fn no_timestamps_output_is_byte_identical() {
    for args in [
        &["cut-tail", "--example", "two-rotations", "--no-timestamps"][..],
        &["simulate", "--seed", "7", "--restarts", "4", "--no-timestamps"][..],
        &["sweep", "--catalog", "--no-timestamps", "--threads", "3"][..],
    ] {
        let a = cuttail(args);
        let b = cuttail(args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert!(!stdout(&a).contains("wall_time_s"));
    }
}

#[test]
fn csv_format_has_header_and_rows() {
    let o = cuttail(&["cut-tail", "--spectrum", "-0.3:2, -0.8+0.9i", "--format", "csv"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("command,input,spectrum,dim_pa,t_cut"));
    let row = lines.next().unwrap();
    assert!(row.starts_with("cut-tail,"), "{row}");
    assert!(row.contains("\"-0.3:2, -0.8+0.9i\""), "{row}");
}

#[test]
fn sweep_keeps_input_order_and_reports_failures() {
    let o = cuttail(&["sweep", "--catalog", "--spectrum", "0.2", "--no-timestamps"]);
    assert_eq!(o.status.code(), Some(2));
    let r = reports(&o);
    assert_eq!(r.len(), 6);
    assert!(matches!(&r[0], Report::Error(e) if e.exit_code == 2));
    let names: Vec<_> = r[1..]
        .iter()
        .map(|x| match x {
            Report::CutTail(c) => c.input.name.clone().unwrap(),
            _ => panic!(),
        })
        .collect();
    let expected: Vec<_> = cuttail::catalog::all().into_iter().map(|(n, _)| n.to_string()).collect();
    assert_eq!(names, expected);
}

fn read_csv(path: &Path) -> Vec<Vec<f64>> {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    rdr.records().map(|r| r.unwrap().iter().map(|v| v.parse().unwrap()).collect()).collect()
}

#[test]
fn example_one_marker_lies_on_hull_boundary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("plots");
    let o = cuttail(&["cut-tail", "--example", "diagonal-pair", "--plot", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let t_cut = cut_tail_of(&o);
    let rows = read_csv(&out.join("trajectory.csv"));
    assert_eq!(rows[0].len(), 3);
    let pts: Vec<Point2> = rows.iter().map(|r| [r[1], r[2]]).collect();
    let hull = symmetrized_hull(&pts).unwrap();
    let s = "-0.2, -0.5".parse().unwrap();
    let marker = CanonicalTrajectory::from_spectrum(&s).unwrap().at(t_cut);
    let gap = hull.distance_to(marker) / hull.diameter();
    assert!(gap < 1e-4, "marker is {gap} diameters from the boundary");
    let svg = fs::read_to_string(out.join("hull.svg")).unwrap();
    assert!(svg.contains("<polygon") && svg.contains("<circle") && svg.contains("<polyline"));
}

#[test]
fn example_two_spiral_plot() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p");
    let o = cuttail(&["cut-tail", "--example", "damped-rotation", "--plot", out.to_str().unwrap(), "--samples", "1500"]);
    assert_eq!(o.status.code(), Some(0));
    let t_cut = cut_tail_of(&o);
    assert!((5.97..=6.02).contains(&t_cut));
    let rows = read_csv(&out.join("trajectory.csv"));
    assert_eq!(rows.len(), 1500);
    // the spiral winds around the origin: the angle changes sign repeatedly
    let sign_changes = rows.windows(2).filter(|w| (w[0][2] > 0.0) != (w[1][2] > 0.0)).count();
    assert!(sign_changes >= 4);
    assert!(fs::read_to_string(out.join("hull.svg")).unwrap().contains(&format!("{t_cut:.6}")));
}

#[test]
fn example_three_norm_plot_and_hull_refusal() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("n");
    let o = cuttail(&["cut-tail", "--example", "four-real", "--plot", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let t_cut = cut_tail_of(&o);
    assert!(!out.join("hull.svg").exists());
    let rows = read_csv(&out.join("norm.csv"));
    assert_eq!(rows[0].len(), 2);
    assert!(rows.windows(2).all(|w| w[1][1] < w[0][1]), "sum of decaying real exponentials decreases");
    assert!(fs::read_to_string(out.join("norm.svg")).unwrap().contains(&format!("{t_cut:.5}")));

    let o = cuttail(&["cut-tail", "--example", "four-real", "--plot", out.to_str().unwrap(), "--plot-kind", "hull"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("refusing hull plot"));
}

#[test]
fn verify2d_agrees_on_both_planar_examples() {
    for name in ["diagonal-pair", "damped-rotation"] {
        let mut cfg = JobConfig::new(Job::Verify2d, vec![InputSource::Example(name.into())]);
        cfg.timestamps = false;
        let out = run(&cfg).unwrap();
        assert_eq!(out.exit_code, 0);
        let Report::Verify2d(v) = &out.reports[0] else { panic!() };
        assert!(v.exchange_agrees && v.geometric_agrees, "{v:?}");
    }
    let cfg = JobConfig::new(Job::Verify2d, vec![InputSource::Example("four-real".into())]);
    assert_eq!(run(&cfg).err().unwrap().exit_code(), 1);
}

#[test]
fn config_validation() {
    let mut cfg = JobConfig::new(Job::CutTail, vec![InputSource::Spectrum("-1, -2".into())]);
    assert!(cfg.validate().is_ok());
    cfg.tolerances.time_tol = -1.0;
    assert!(cfg.validate().is_err());
    let cfg = JobConfig::new(Job::CutTail, vec![]);
    assert!(cfg.validate().is_err());
    let cfg = JobConfig::new(Job::Extremal { t: 0.0 }, vec![InputSource::Spectrum("-1, -2".into())]);
    assert!(cfg.validate().is_err());
}

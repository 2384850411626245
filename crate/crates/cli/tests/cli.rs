use std::path::Path;
use std::process::Command as Process;

use bracket_bvp::model::{eval_on_grid, parse_problem_text, GridSpec};
use bracket_bvp::monotone::{iterate, Backend, Direction, IterationSettings};
use bracket_bvp::problems::catalog_entry;
use bracket_bvp_cli::{emit_trace_csv, main_with_args, parse_args, parse_trace_csv, summary_path, Command, OutputFormat};
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["bracket-bvp"];
    full.extend_from_slice(args);
    let code = main_with_args(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn binary() -> Process {
    Process::new(env!("CARGO_BIN_EXE_bracket-bvp"))
}

#[test]
fn lane_emden_solve_emits_passing_certificate() {
    let (code, out, _) = run(&["solve", "--problem", "5", "--nodes", "257"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["pass"], true);
    assert!(v["bracket_gap"].as_f64().unwrap() <= 1e-4);
    assert!(v["residual_sup"].as_f64().unwrap() <= 1e-6);
    assert_eq!(v["theorem"], "thm2");
    assert_eq!(v["nodes"].as_array().unwrap().len(), 257);
    assert_eq!(v["L_published"].as_f64().unwrap(), 1.58203125);
}

#[test]
fn eigen_prints_pi_squared() {
    let (code, out, _) = run(&["eigen", "--m", "2", "--n", "0", "--a1", "1", "--a2", "0", "--format", "table"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("lambda0 = 9.8696044"), "{out}");
    let (_, json, _) = run(&["eigen", "--m", "2", "--a1", "1"]);
    let v: Value = serde_json::from_str(&json).unwrap();
    assert!((v["lambda0"].as_f64().unwrap() - std::f64::consts::PI.powi(2)).abs() < 1e-8);
}

#[test]
fn eigen_reads_coefficients_from_catalog() {
    let (code, out, _) = run(&["eigen", "--problem", "6", "--format", "csv"]);
    assert_eq!(code, 0);
    let row: Vec<f64> = out.lines().nth(1).unwrap().split(',').map(|c| c.parse().unwrap()).collect();
    assert!((row[4] - 4.1158583).abs() < 1e-5);
}

#[test]
fn catalog_lists_six_entries_that_parse_back() {
    let (code, out, _) = run(&["catalog"]);
    assert_eq!(code, 0);
    let blocks: Vec<&str> = out.split("\n\n").collect();
    assert_eq!(blocks.len(), 6);
    for (i, b) in blocks.iter().enumerate() {
        let e = catalog_entry(i + 1).unwrap();
        assert!(b.starts_with(&format!("# [{}] {}\n# region: {}", i + 1, e.problem.label, e.region())));
        let def = parse_problem_text(b).unwrap();
        assert_eq!(def.problem.boundary, e.problem.boundary);
        assert_eq!(def.beta0_expr.as_deref(), Some(e.beta0_expr));
    }
    let (_, json, _) = run(&["catalog", "--format", "json"]);
    let v: Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 6);
    assert_eq!(v[2]["C"], 0.0);
}

#[test]
fn problem_file_reproduces_catalog_run() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p3.txt");
    let (_, text, _) = run(&["catalog", "--problem", "3"]);
    std::fs::write(&path, text).unwrap();
    let (c1, a, _) = run(&["solve", "--problem", "3", "--format", "csv"]);
    let (c2, b, _) = run(&["solve", "--problem", path.to_str().unwrap(), "--format", "csv"]);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
}

#[test]
fn output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut docs = Vec::new();
    for k in 0..2 {
        let prefix = dir.path().join(format!("run{k}"));
        let (code, out, _) = run(&["solve", "--problem", "1", "--trace", prefix.to_str().unwrap()]);
        assert_eq!(code, 0);
        let upper = std::fs::read(format!("{}.upper.csv", prefix.display())).unwrap();
        let summary = std::fs::read(format!("{}.lower.summary.csv", prefix.display())).unwrap();
        docs.push((out, upper, summary));
    }
    assert_eq!(docs[0], docs[1]);
}

#[test]
fn thread_cap_does_not_change_results() {
    let one = binary().args(["solve", "--problem", "6"]).env("BRACKET_BVP_THREADS", "1").output().unwrap();
    let four = binary().args(["solve", "--problem", "6"]).env("BRACKET_BVP_THREADS", "4").output().unwrap();
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
    let bad = binary().args(["solve", "--problem", "6"]).env("BRACKET_BVP_THREADS", "zero").output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn trace_csv_round_trips_exactly() {
    let e = catalog_entry(3).unwrap();
    let g = GridSpec::uniform(65);
    let tr = iterate(&e.problem, &e.alpha0_on(&g).unwrap(), &IterationSettings::new(0.25, g, Backend::Fdm), Direction::FromLower).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lower.csv");
    let sp = emit_trace_csv(&tr, &path).unwrap();
    assert_eq!(sp, dir.path().join("lower.summary.csv"));
    let rows = parse_trace_csv(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(rows.len(), tr.iterates.len() * 65);
    for (k, (i, x, v)) in rows.iter().enumerate() {
        assert_eq!(*i, k / 65);
        assert_eq!(*x, tr.iterates[*i].nodes[k % 65]);
        assert_eq!(*v, tr.iterates[*i].values[k % 65]);
    }
    let summary = std::fs::read_to_string(&sp).unwrap();
    let mut lines = summary.lines();
    assert_eq!(lines.next(), Some("iter,delta_sup,monotone_violation"));
    let deltas: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(deltas, tr.deltas);
    for w in deltas[1..].windows(2) {
        assert!(w[1] < w[0]);
    }
}

#[test]
fn stationary_trace_has_one_row_per_node() {
    let g = GridSpec::uniform(33);
    let s0 = eval_on_grid(&g, |x| 1.0 - x * x).unwrap();
    let tr = bracket_bvp::monotone::IterationTrace {
        direction: Direction::FromUpper,
        iterates: vec![s0],
        deltas: vec![],
        step_violations: vec![],
        monotone_violation: 0.0,
        converged: true,
    };
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    emit_trace_csv(&tr, &path).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 1 + 33);
    assert_eq!(summary_path(Path::new("a/b")), Path::new("a/b.summary.csv"));
}

#[test]
fn kernel_dump_has_full_tensor() {
    let (code, out, _) = run(&["green", "--problem", "5", "--nodes", "65", "--lambda", "1.58203125", "--dump-kernel"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("x,t,G"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 100 * 100);
    assert!(rows.iter().all(|r| r[2] <= 1e-10));
}

#[test]
fn kernel_sign_fails_past_eigenvalue() {
    let f = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(f.path(), "m = 2\na1 = 1\nf_expr = 0\n").unwrap();
    let lambda = format!("{}", 1.5 * std::f64::consts::PI.powi(2));
    let (code, out, _) = run(&["green", "--problem", f.path().to_str().unwrap(), "--lambda", &lambda, "--nodes", "65"]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["pass"], false);
}

#[test]
fn failing_certificate_exits_nonzero() {
    let (code, out, err) = run(&["solve", "--problem", "1", "--backend", "green"]);
    assert_eq!(code, 1);
    assert!(err.contains("check failed"));
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["pass"], false);

    let (code, out, _) = run(&["solve", "--problem", "5", "--lambda", "10"]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["failure"]["kind"], "NoAdmissibleShift");
}

#[test]
fn swapped_bracket_fails_verification() {
    let f = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(f.path(), "m = 1\nn = 1\na1 = 1\na2 = 1\nC = 1\nf_expr = 1 - 2*exp(s)\nalpha0 = 1\nbeta0 = -1\n").unwrap();
    let (code, out, _) = run(&["verify", "--problem", f.path().to_str().unwrap(), "--format", "csv"]);
    assert_eq!(code, 1);
    assert_eq!(out.lines().count(), 3);
    assert!(out.lines().skip(1).all(|l| l.ends_with(",false")));
    let (code, _, _) = run(&["verify", "--problem", "1"]);
    assert_eq!(code, 0);
}

#[test]
fn solver_errors_name_the_error_kind() {
    let (code, _, err) = run(&["green", "--problem", "5", "--lambda", "0"]);
    assert_eq!(code, 1);
    assert!(err.contains("ShiftZeroError"), "{err}");
    let (code, _, err) = run(&["solve", "--problem", "5", "--nodes", "10"]);
    assert_eq!(code, 1);
    assert!(err.contains("InvalidGrid"), "{err}");
}

#[test]
fn io_failures_report_the_path() {
    let (code, _, err) = run(&["solve", "--problem", "/no/such/problem.txt"]);
    assert_eq!(code, 1);
    assert!(err.contains("/no/such/problem.txt"));
    let (code, _, err) = run(&["eigen", "--m", "2", "--a1", "1", "--out", "/no/such/dir/out.json"]);
    assert_eq!(code, 1);
    assert!(err.contains("/no/such/dir/out.json"));
}

#[test]
fn bad_flags_exit_with_usage() {
    for args in [&["solve"][..], &["solve", "--problem", "7"], &["solve", "--problem", "1", "--format", "xml"], &["frobnicate"], &["eigen", "--n", "1"]] {
        let (code, _, err) = run(args);
        assert_eq!(code, 2, "{args:?}");
        assert!(!err.is_empty());
    }
    let out = binary().args(["solve", "--nodes", "x"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("Usage"));
}

#[test]
fn flags_resolve_into_config() {
    let cfg = parse_args(["bracket-bvp", "solve", "--problem", "2", "--nodes", "129", "--grading", "1.5", "--lambda", "-3", "--format", "table"]).unwrap();
    assert_eq!(cfg.grid, GridSpec::graded(129, 1.5));
    assert_eq!(cfg.lambda_override, Some(-3.0));
    assert_eq!(cfg.output_format, OutputFormat::Table);
    assert!(matches!(cfg.command, Command::Solve { trace_prefix: None }));
}

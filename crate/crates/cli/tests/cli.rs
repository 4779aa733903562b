use std::path::{Path, PathBuf};
use std::process::Command as Process;

use multires::commands::reparse;
use multires::{run, Command, Options, ProblemFile, TraceFile};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn load(name: &str) -> ProblemFile {
    ProblemFile::parse(&std::fs::read_to_string(data(name)).unwrap()).unwrap()
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap()
}

fn binary(args: &[&str]) -> std::process::Output {
    Process::new(env!("CARGO_BIN_EXE_multires")).args(args).output().unwrap()
}

#[test]
fn cusp_trace_matches_golden() {
    let out = run(Command::Resolve, &load("cusp.json"), &Options::default()).unwrap();
    assert!(out.error.is_none());
    assert_eq!(out.trace.steps.len(), 1);
    assert_eq!(out.trace.status.outcome, "resolved");
    assert_eq!(out.trace.to_json(), golden("cusp.trace.json"));
}

#[test]
fn x2_y5_trace_matches_golden() {
    let out = run(Command::Resolve, &load("x2_y5.json"), &Options::default()).unwrap();
    assert_eq!(out.trace.steps.len(), 2);
    assert_eq!(out.trace.to_json(), golden("x2_y5.trace.json"));
}

#[test]
fn golden_traces_parse_back() {
    for name in ["cusp.trace.json", "x2_y5.trace.json"] {
        let src = golden(name);
        let t = TraceFile::from_json(&src).unwrap();
        assert_eq!(t.to_json(), src);
    }
}

#[test]
fn recorded_polynomials_reparse() {
    for name in ["cusp.json", "x2_y5.json", "omega.json", "monomial_e.json", "blowup.json"] {
        let file = load(name);
        let command = if name == "blowup.json" { Command::Blowup } else { Command::Resolve };
        let t = run(command, &file, &Options::default()).unwrap().trace;
        for pair in &t.input {
            for g in &pair.gens {
                assert_eq!(&reparse(g, &t.vars, &t.ring).unwrap().to_string_with(&t.vars), g);
            }
        }
        for chart in &t.status.charts {
            for pair in &chart.pairs {
                for g in &pair.gens {
                    assert_eq!(&reparse(g, &chart.vars, &t.ring).unwrap().to_string_with(&chart.vars), g, "{name}");
                }
            }
        }
    }
}

#[test]
fn artinian_check_names_the_failing_pair() {
    let out = run(Command::ArtinianCheck, &load("line_problem.json"), &Options::default()).unwrap();
    assert!(out.report.contains("V(x) for the multi-ideal: not permissible: pair 2 has nu = 1 < 2"));
    assert!(out.report.contains("associated basic object: (x^6), 6"));
    assert!(out.report.contains("V(x) for the associated basic object: permissible"));
}

#[test]
fn artinian_check_reports_the_inductive_object() {
    let out = run(Command::ArtinianCheck, &load("direction_failure.json"), &Options::default()).unwrap();
    assert!(out.report.contains("inductive pair 1: nu = 2, fiber nu = 3, mark = 2"));
    assert!(out.report.contains("inductive pair 2: nu = 1, fiber nu = 2, mark = 1"));
    assert!(out.report.contains("V(x, z) for the inductive object: not permissible"));
}

#[test]
fn gamma_of_the_documented_form() {
    let file = ProblemFile::parse("pair b=4 exps=[2,3]").unwrap();
    let out = run(Command::Gamma, &file, &Options::default()).unwrap();
    assert_eq!(out.report, "(-2, 5/4, [1,2])\n");
    let bin = binary(&["gamma", data("monomial.txt").to_str().unwrap()]);
    assert!(bin.status.success());
    assert_eq!(String::from_utf8(bin.stdout).unwrap(), "(-2, 5/4, [1,2])\n");
}

#[test]
fn sing_marks_the_cusp_point() {
    let out = run(Command::Sing, &load("cusp.json"), &Options::default()).unwrap();
    assert_eq!(out.report, "(0, 0): singular\n(1, 1): not singular\n(1/4, 1/8): not singular\n");
}

#[test]
fn delta_restricts_to_the_adapted_hypersurface() {
    let out = run(Command::Delta, &load("delta.json"), &Options::default()).unwrap();
    assert_eq!(out.report, "delta^1 of pair 1 restricted to z=0: (x*y, x^3)\n");
}

#[test]
fn blowup_lists_the_charts() {
    let out = run(Command::Blowup, &load("blowup.json"), &Options::default()).unwrap();
    let labels: Vec<&str> = out.trace.status.charts.iter().map(|c| c.label.as_str()).collect();
    assert_eq!(labels, ["root.x", "root.y"]);
}

#[test]
fn spotcheck_agrees_on_equivalent_pairs() {
    let out = run(Command::EquivSpotcheck, &load("spotcheck.json"), &Options::default()).unwrap();
    assert_eq!(out.report, "agree at every sampled point\n");
}

#[test]
fn seed_changes_the_sample() {
    let file = load("sample.json");
    let a = run(Command::Sing, &file, &Options::default()).unwrap().report;
    let b = run(Command::Sing, &file, &Options { seed: 7, ..Options::default() }).unwrap().report;
    assert!(!a.is_empty());
    assert_ne!(a, b);
    assert_eq!(a, run(Command::Sing, &file, &Options::default()).unwrap().report);
}

#[test]
fn malformed_json_reports_line_and_column() {
    let err = ProblemFile::parse("{\n  \"vars\": [\"x\",\n}").unwrap_err();
    match &err {
        multires::CliError::Json { line, column, .. } => assert_eq!((*line, *column), (3, 1)),
        e => panic!("{e:?}"),
    }
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn unknown_fields_are_rejected() {
    assert!(ProblemFile::parse("{ \"varz\": [] }").is_err());
}

#[test]
fn exit_codes() {
    let dir = std::env::temp_dir().join(format!("multires-exit-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{ \"vars\": [\"x\"], \"pairs\": [{ \"gens\": [\"x^\"], \"mark\": 1 }] }").unwrap();
    let capped = dir.join("capped.json");
    std::fs::write(&capped, std::fs::read_to_string(data("omega.json")).unwrap()).unwrap();

    assert_eq!(binary(&["resolve", data("cusp.json").to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(binary(&["resolve", bad.to_str().unwrap()]).status.code(), Some(1));
    let out = binary(&["resolve", capped.to_str().unwrap(), "--step-cap", "3", "--emit", "trace"]);
    assert_eq!(out.status.code(), Some(2));
    let t = TraceFile::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(t.steps.len(), 3);
    assert_eq!(t.status.outcome, "failed");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn emit_both_prints_report_then_trace() {
    let out = binary(&["resolve", data("cusp.json").to_str().unwrap(), "--emit", "both"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let (report, trace) = text.split_once('{').unwrap();
    assert_eq!(report, "step 0 [t-sequence] level 1: h = [(1, 0); [(3/2, 0)]]; center root V(x, y)\nresolved after 1 step\n");
    assert_eq!(format!("{{{trace}"), golden("cusp.trace.json"));
}

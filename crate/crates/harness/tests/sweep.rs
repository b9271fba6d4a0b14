use std::fs;
use std::path::Path;

use anslab_harness::execute::run_directory;
use anslab_harness::{execute_with, parse_config, ExperimentPlan};

fn plan(out: &Path, kind: &str, values: &str) -> ExperimentPlan {
    parse_config(&format!(
        r#"
[solver]
sizes = [16, 16, 32]
t_end = 0.01
dt = 1e-3
snapshot_every = 5

[plan]
kind = "{kind}"
values = {values}
output = "{}"
"#,
        out.display()
    ))
    .unwrap()
}

fn summary(out: &Path, kind: &str) -> String {
    fs::read_to_string(out.join(format!("{kind}_summary.csv"))).unwrap()
}

#[test]
fn guard_trip_is_a_recorded_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let p = plan(dir.path(), "amplitude_sweep", "[1.0, 200.0]");
    let report = execute_with(&p, 1).unwrap();
    let verdicts: Vec<&str> = report.summary.iter().map(|r| r.verdict.as_str()).collect();
    assert_eq!(verdicts, ["completed", "bootstrap_guard_tripped"]);
    let csv = summary(dir.path(), "amplitude_sweep");
    assert!(csv.starts_with("sweep_value,Psi0,sup_Psi,sup_XY,theta_final,radius_final,largeness,verdict\n"));
    assert!(csv.lines().nth(2).unwrap().ends_with(",bootstrap_guard_tripped"));
}

#[test]
fn resume_reuses_and_quarantines() {
    let dir = tempfile::tempdir().unwrap();
    let p = plan(dir.path(), "eps_sweep", "[1.0, 0.5]");
    let first = execute_with(&p, 1).unwrap();
    assert_eq!((first.computed, first.reused), (2, 0));
    let before = summary(dir.path(), "eps_sweep");

    let again = execute_with(&p, 1).unwrap();
    assert_eq!((again.computed, again.reused), (0, 2));
    assert_eq!(summary(dir.path(), "eps_sweep"), before);

    let (_, spec) = &p.runs()[1];
    let run = run_directory(&p.output_dir(), spec);
    fs::write(run.join("record.json"), "{ truncated").unwrap();
    let healed = execute_with(&p, 1).unwrap();
    assert_eq!((healed.computed, healed.reused), (1, 1));
    assert_eq!(healed.quarantined.len(), 1);
    assert!(healed.quarantined[0].starts_with(dir.path().join("quarantine")));
    assert_eq!(summary(dir.path(), "eps_sweep"), before);
}

#[test]
fn worker_count_does_not_change_results() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    execute_with(&plan(a.path(), "lambda_sweep", "[10.0, 40.0]"), 1).unwrap();
    execute_with(&plan(b.path(), "lambda_sweep", "[10.0, 40.0]"), 2).unwrap();
    assert_eq!(summary(a.path(), "lambda_sweep"), summary(b.path(), "lambda_sweep"));
}

#[test]
fn run_directory_holds_the_documented_files() {
    let dir = tempfile::tempdir().unwrap();
    let p = plan(dir.path(), "single_run", "[]");
    execute_with(&p, 1).unwrap();
    let run = run_directory(&p.output_dir(), &p.base_run());
    let name = run.file_name().unwrap().to_str().unwrap();
    assert_eq!(name.len(), 16);
    assert!(name.chars().all(|c| c.is_ascii_hexdigit()));
    for f in ["config.toml", "trace.csv", "record.json"] {
        assert!(run.join(f).is_file(), "{f}");
    }
    let trace = fs::read_to_string(run.join("trace.csv")).unwrap();
    assert!(trace.starts_with("t,radius,theta,energy,div_residual,Bh_main,Bn_main,L1_accum,cross_accum,X,Y,Psi\n"));
    let snaps: Vec<_> = fs::read_dir(run.join("snapshots")).unwrap().collect();
    assert!(!snaps.is_empty());
    let echo = parse_config(&fs::read_to_string(run.join("config.toml")).unwrap());
    assert!(echo.is_ok());
}

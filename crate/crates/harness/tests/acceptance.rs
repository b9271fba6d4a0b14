//! The full acceptance suite. Prints one line per criterion; set
//! `ANSLAB_ACCEPT_DIR` to keep (and reuse) the artifacts.

use std::path::PathBuf;

use anslab_harness::acceptance::{run_acceptance, AcceptanceOptions};
use anslab_harness::Status;

#[test]
fn acceptance() {
    let keep = std::env::var_os("ANSLAB_ACCEPT_DIR").map(PathBuf::from);
    let tmp = tempfile::tempdir().unwrap();
    let dir = keep.unwrap_or_else(|| tmp.path().to_path_buf());
    let mut opts = AcceptanceOptions::new(&dir);
    opts.binary = Some(PathBuf::from(env!("CARGO_BIN_EXE_anslab")));
    opts.verbose = true;
    let report = run_acceptance(&opts).unwrap();
    for c in &report.criteria {
        println!("{}", c.line());
    }
    println!("overall: {}", report.overall.label());
    assert_eq!(report.overall, Status::Pass);
}

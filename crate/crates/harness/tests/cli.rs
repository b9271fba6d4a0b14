use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn anslab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anslab")).args(args).output().unwrap()
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("config.toml");
    fs::write(&path, body).unwrap();
    path
}

fn small(dir: &Path, extra: &str) -> String {
    format!(
        "[solver]\nsizes = [16, 16, 32]\nt_end = 0.005\ndt = 1e-3\nsnapshot_every = 5\n{extra}\n[plan]\noutput = \"{}\"\n",
        dir.join("out").display()
    )
}

fn first_snapshot(dir: &Path) -> PathBuf {
    let out = dir.join("out");
    let run = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.join("snapshots").is_dir())
        .unwrap();
    let mut snaps: Vec<_> = fs::read_dir(run.join("snapshots")).unwrap().map(|e| e.unwrap().path()).collect();
    snaps.sort();
    snaps.remove(0)
}

#[test]
fn config_errors_exit_two_with_a_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[solver]\nn = 3\nbogus = 1\n");
    let out = anslab(&["run", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let cfg = write_config(dir.path(), "[solver]\nn = 3\ns = 2.0\n");
    assert_eq!(anslab(&["run", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn run_exits_zero_then_three_on_a_halt() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &small(dir.path(), ""));
    let out = anslab(&["run", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("verdict=completed"));

    let big = tempfile::tempdir().unwrap();
    let cfg = write_config(big.path(), &small(big.path(), "eta = 0.5"));
    assert_eq!(anslab(&["run", cfg.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn snapshot_verbs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &small(dir.path(), ""));
    assert!(anslab(&["run", cfg.to_str().unwrap()]).status.success());
    let snap = first_snapshot(dir.path());
    assert_eq!(&fs::read(&snap).unwrap()[..8], b"ANSLAB1\n");

    let out = anslab(&["norms", snap.to_str().unwrap(), "--spec", "0.5,0.5,1,1"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for name in ["v_h", "v_n", "v "] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{text}");
    }
    // at t = 0 the radius is α = 1 > 0, so the weighted norm dominates
    for line in text.lines().skip(1) {
        let nums: Vec<f64> = line
            .split_whitespace()
            .skip(1)
            .map(|kv| kv.split('=').nth(1).unwrap().parse().unwrap())
            .collect();
        assert!(nums[1] >= nums[0] && nums[0] > 0.0, "{line}");
    }

    let out = anslab(&["largeness", snap.to_str().unwrap()]);
    assert!(out.status.success());
    let meter: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    assert!(meter > 0.0 && meter.is_finite());

    assert_eq!(anslab(&["norms", snap.to_str().unwrap(), "--spec", "1,2"]).status.code(), Some(2));
    let bad = dir.path().join("bad.bin");
    fs::write(&bad, b"NOTASNAP").unwrap();
    assert_eq!(anslab(&["largeness", bad.to_str().unwrap()]).status.code(), Some(1));
}

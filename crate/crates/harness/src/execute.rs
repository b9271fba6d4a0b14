//! Plan execution: one directory per run (named by config-hash prefix),
//! resume of completed runs, quarantine of corrupt ones, summary CSVs.

use std::path::{Path, PathBuf};

use anslab_core::dyadic::DyadicPartition;
use anslab_core::paraproduct::{product_law_ratio, weighted_product_law_ratio};
use anslab_core::random::Corpus;
use anslab_core::solver::{
    default_time_samples, dyadic_exponent, initial_data, largeness_meter, make_initial_family, Snapshot, Solver,
    System,
};
use anslab_core::spectral::{Grid, SpectralField};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentPlan, PlanKind, RunSpec};
use crate::error::{HarnessError, Result};
use crate::record::{fmt_float, write_summary, write_trace, RunRecord, SummaryRow};

/// Environment variable overriding the worker-pool size.
pub const WORKERS_ENV: &str = "ANSLAB_WORKERS";

/// Length of the config-hash prefix naming a run directory.
pub const DIR_HASH_LEN: usize = 16;

/// Radius at which the weighted product law is sampled.
pub const CORPUS_RADIUS: f64 = 0.1;

/// Pool size: `ANSLAB_WORKERS` if set to a positive integer, else the
/// available parallelism.
pub fn workers_from_env() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&w| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Maximum product-law ratios over the corpus on one grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusRow {
    pub grid: usize,
    pub n: usize,
    pub p: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub pairs: usize,
    pub seed: u64,
    pub max_ratio: f64,
    /// Maximum of the weighted ratio at radius 0.
    pub max_weighted_r0: f64,
    pub max_weighted: f64,
    pub weighted_radius: f64,
    /// Whether the radius-0 weighted ratio equalled the plain ratio bit for bit on every pair.
    pub radius0_exact: bool,
}

/// Everything produced by [`execute`].
#[derive(Clone, Debug, Default)]
pub struct ExecuteReport {
    pub records: Vec<RunRecord>,
    pub summary: Vec<SummaryRow>,
    pub corpus: Vec<CorpusRow>,
    /// Runs actually integrated (not resumed).
    pub computed: usize,
    pub reused: usize,
    pub quarantined: Vec<PathBuf>,
}

fn run_dir(out: &Path, spec: &RunSpec) -> PathBuf {
    out.join(&spec.hash()[..DIR_HASH_LEN])
}

fn snapshot_name(index: usize) -> String {
    format!("snapshots/{index:06}.bin")
}

/// A record that can be resumed: same hash, completed, all files readable.
fn resumable(dir: &Path, hash: &str) -> std::result::Result<Option<RunRecord>, String> {
    let record_path = dir.join("record.json");
    if !record_path.exists() {
        return Err("record.json missing".into());
    }
    let rec = RunRecord::read(&record_path).map_err(|e| format!("record.json unreadable: {e}"))?;
    if rec.config_hash != hash {
        return Err("config hash mismatch".into());
    }
    if !rec.completed() {
        return Ok(None);
    }
    crate::record::read_trace(&dir.join(&rec.trace)).map_err(|e| format!("trace unreadable: {e}"))?;
    for s in &rec.snapshots {
        Snapshot::<f64>::read_file(&dir.join(s)).map_err(|e| format!("{s}: {e}"))?;
    }
    Ok(Some(rec))
}

fn quarantine(out: &Path, dir: &Path) -> Result<PathBuf> {
    let qdir = out.join("quarantine");
    std::fs::create_dir_all(&qdir)?;
    let name = dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let mut target = qdir.join(&name);
    let mut k = 1;
    while target.exists() {
        target = qdir.join(format!("{name}-{k}"));
        k += 1;
    }
    std::fs::rename(dir, &target)?;
    Ok(target)
}

/// Largeness of the family member `u₀^ε` built from the run's initial data,
/// or `None` when `ε` is not an inverse power of two.
fn family_largeness(spec: &RunSpec, part: &DyadicPartition<f64>) -> Result<Option<f64>> {
    if spec.system() == System::Limiting || dyadic_exponent(spec.solver.eps).is_err() {
        return Ok(None);
    }
    let v0 = initial_data(&spec.solver_config(), part)?;
    let family = make_initial_family(&v0, spec.solver.eps)?;
    Ok(Some(largeness_meter(&family, &default_time_samples())?))
}

/// Integrates one run into `dir`, writing snapshots, trace and record.
pub fn run_point(spec: &RunSpec, sweep_value: Option<f64>, dir: &Path) -> Result<RunRecord> {
    std::fs::create_dir_all(dir.join("snapshots"))?;
    std::fs::write(dir.join("config.toml"), spec.echo())?;
    let cfg = spec.solver_config();
    let mut solver = Solver::new(cfg.clone())?;
    let largeness = family_largeness(spec, solver.partition())?;
    let mut snapshots = vec![];
    let outcome = solver.run(|snap| {
        let name = snapshot_name(snapshots.len());
        snap.write_file(&dir.join(&name))?;
        snapshots.push(name);
        Ok(())
    })?;
    let state = solver.into_state();
    let trace = &state.trace;
    write_trace(&dir.join("trace.csv"), trace)?;
    let first = trace.rows.first().expect("trace has the t = 0 row");
    let last = trace.last().expect("trace nonempty");
    let e0 = first.energy;
    let max_energy_increase = trace
        .rows
        .windows(2)
        .map(|w| if e0 > 0.0 { (w[1].energy - w[0].energy) / e0 } else { 0.0 })
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);
    let rec = RunRecord {
        config_hash: spec.hash(),
        sweep_value,
        verdict: outcome.verdict.name().to_string(),
        message: outcome.message,
        steps: outcome.steps,
        psi0: first.psi,
        sup_psi: trace.sup_psi(),
        xy0: first.x + first.y,
        sup_xy: trace.sup_xy(),
        theta_final: last.theta,
        radius_final: last.radius,
        alpha: spec.weight.alpha,
        lambda: spec.weight.lambda,
        eps: cfg.effective_eps(),
        eta: spec.solver.eta,
        n: spec.solver.n,
        largeness,
        max_div_residual: trace.rows.iter().map(|r| r.div_residual).fold(0.0, f64::max),
        max_energy_increase,
        zero_symbol_modes: outcome.zero_symbol_modes,
        divergence_warnings: outcome.divergence_warnings,
        trace: "trace.csv".into(),
        snapshots,
    };
    rec.write(&dir.join("record.json"))?;
    Ok(rec)
}

enum Job {
    Reuse(RunRecord),
    Compute,
}

fn corpus_row(plan: &ExperimentPlan, size: usize, pool: &rayon::ThreadPool) -> Result<CorpusRow> {
    let n = plan.solver.n;
    let p = plan.solver.p;
    let (s1, s2) = (plan.plan.sigma1, plan.plan.sigma2);
    let grid = Grid::<f64>::new(&vec![size; n])?;
    let part = DyadicPartition::new(&grid);
    let mut corpus = Corpus::new(&part, p, plan.plan.seed);
    let pairs: Vec<(SpectralField<f64>, SpectralField<f64>)> =
        (0..plan.plan.pairs).map(|_| (corpus.next_field(), corpus.next_field())).collect();
    let results: Vec<anslab_core::Result<(f64, f64, f64)>> = pool.install(|| {
        pairs
            .par_iter()
            .map(|(f, g)| {
                let plain = product_law_ratio(f, g, s1, s2, p, &part)?;
                let r0 = weighted_product_law_ratio(f, g, s1, s2, p, 0.0, &part)?;
                let rw = weighted_product_law_ratio(f, g, s1, s2, p, CORPUS_RADIUS, &part)?;
                Ok((plain, r0, rw))
            })
            .collect()
    });
    let mut row = CorpusRow {
        grid: size,
        n,
        p,
        sigma1: s1,
        sigma2: s2,
        pairs: plan.plan.pairs,
        seed: plan.plan.seed,
        max_ratio: 0.0,
        max_weighted_r0: 0.0,
        max_weighted: 0.0,
        weighted_radius: CORPUS_RADIUS,
        radius0_exact: true,
    };
    for r in results {
        let (plain, r0, rw) = r?;
        row.max_ratio = row.max_ratio.max(plain);
        row.max_weighted_r0 = row.max_weighted_r0.max(r0);
        row.max_weighted = row.max_weighted.max(rw);
        row.radius0_exact &= plain.to_bits() == r0.to_bits();
    }
    Ok(row)
}

fn write_corpus_csv(path: &Path, rows: &[CorpusRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "grid",
        "n",
        "p",
        "sigma1",
        "sigma2",
        "pairs",
        "seed",
        "max_ratio",
        "max_weighted_r0",
        "max_weighted",
        "weighted_radius",
        "radius0_exact",
    ])?;
    for r in rows {
        w.write_record([
            r.grid.to_string(),
            r.n.to_string(),
            fmt_float(r.p),
            fmt_float(r.sigma1),
            fmt_float(r.sigma2),
            r.pairs.to_string(),
            r.seed.to_string(),
            fmt_float(r.max_ratio),
            fmt_float(r.max_weighted_r0),
            fmt_float(r.max_weighted),
            fmt_float(r.weighted_radius),
            r.radius0_exact.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn execute_corpus(plan: &ExperimentPlan, out: &Path, pool: &rayon::ThreadPool) -> Result<ExecuteReport> {
    let cache = out.join(format!("product_law_corpus_{}.json", &plan.hash()[..DIR_HASH_LEN]));
    let mut report = ExecuteReport::default();
    if let Some(rows) = std::fs::read_to_string(&cache)
        .ok()
        .and_then(|t| serde_json::from_str::<Vec<CorpusRow>>(&t).ok())
    {
        report.reused = rows.len();
        report.corpus = rows;
    } else {
        for &v in &plan.plan.values {
            report.corpus.push(corpus_row(plan, v as usize, pool)?);
            report.computed += 1;
        }
        std::fs::write(&cache, serde_json::to_string_pretty(&report.corpus)? + "\n")?;
    }
    write_corpus_csv(&out.join("product_law_corpus.csv"), &report.corpus)?;
    Ok(report)
}

fn execute_largeness(plan: &ExperimentPlan) -> Result<ExecuteReport> {
    let base = plan.base_run();
    let grid = Grid::<f64>::new(&base.solver.sizes)?;
    let part = DyadicPartition::new(&grid);
    let mut report = ExecuteReport::default();
    for &eps in &plan.plan.values {
        let mut spec = base.clone();
        spec.solver.eps = eps;
        let value = family_largeness(&spec, &part)?.unwrap_or(f64::NAN);
        report.summary.push(SummaryRow {
            sweep_value: eps,
            psi0: f64::NAN,
            sup_psi: f64::NAN,
            sup_xy: f64::NAN,
            theta_final: f64::NAN,
            radius_final: f64::NAN,
            largeness: value,
            verdict: "not_run".into(),
        });
        report.computed += 1;
    }
    Ok(report)
}

/// Executes `plan` with the pool size from [`workers_from_env`].
pub fn execute(plan: &ExperimentPlan) -> Result<ExecuteReport> {
    execute_with(plan, workers_from_env())
}

/// Executes every point of `plan` under its output directory. Completed runs
/// with a matching config hash are reused; directories holding unreadable
/// records or snapshots are moved to `quarantine/` and recomputed. The
/// summary CSV `<kind>_summary.csv` is written once at the end.
pub fn execute_with(plan: &ExperimentPlan, workers: usize) -> Result<ExecuteReport> {
    let out = plan.output_dir();
    std::fs::create_dir_all(&out)?;
    std::fs::write(out.join(format!("{}_plan.toml", plan.plan.kind)), plan.echo())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| HarnessError::Other(e.to_string()))?;
    let mut report = match plan.plan.kind {
        PlanKind::ProductLawCorpus => return execute_corpus(plan, &out, &pool),
        PlanKind::LargenessSweep => execute_largeness(plan)?,
        _ => ExecuteReport::default(),
    };

    let points = plan.runs();
    let mut jobs = Vec::with_capacity(points.len());
    for (_, spec) in &points {
        let dir = run_dir(&out, spec);
        let job = if dir.exists() {
            match resumable(&dir, &spec.hash()) {
                Ok(Some(rec)) => Job::Reuse(rec),
                Ok(None) => {
                    std::fs::remove_dir_all(&dir)?;
                    Job::Compute
                }
                Err(_) => {
                    report.quarantined.push(quarantine(&out, &dir)?);
                    Job::Compute
                }
            }
        } else {
            Job::Compute
        };
        jobs.push(job);
    }
    let sweep = plan.plan.kind != PlanKind::SingleRun;
    let results: Vec<Result<(RunRecord, bool)>> = pool.install(|| {
        points
            .par_iter()
            .zip(jobs.into_par_iter())
            .map(|((value, spec), job)| match job {
                Job::Reuse(rec) => Ok((rec, false)),
                Job::Compute => {
                    let value = sweep.then_some(*value);
                    Ok((run_point(spec, value, &run_dir(&out, spec))?, true))
                }
            })
            .collect()
    });
    for r in results {
        let (rec, fresh) = r?;
        if fresh {
            report.computed += 1;
        } else {
            report.reused += 1;
        }
        report.summary.push(rec.summary());
        report.records.push(rec);
    }
    write_summary(&out.join(format!("{}_summary.csv", plan.plan.kind)), &report.summary)?;
    Ok(report)
}

/// Directory of the run described by `spec` under `out`.
pub fn run_directory(out: &Path, spec: &RunSpec) -> PathBuf {
    run_dir(out, spec)
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anslab_core::dyadic::{besov_norm_of, BesovSpec, DyadicPartition};
use anslab_core::solver::{default_time_samples, largeness_meter, Snapshot};
use anslab_core::spectral::SpectralField;
use anslab_core::weight::weight_table;
use anslab_harness::acceptance::{evaluate_dir, run_acceptance, AcceptanceOptions, REPORT_FILE};
use anslab_harness::{execute, read_config, HarnessError, PlanKind, Report};
use clap::{Parser, Subcommand};

const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_HALT: u8 = 3;

#[derive(Parser)]
#[command(name = "anslab", version, about = "Anisotropic spectral laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Integrate the base run of a config file.
    Run { config: PathBuf },
    /// Execute every point of the plan in a config file (resumable).
    Sweep {
        config: PathBuf,
        /// Override `[plan] seed`.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the acceptance suite into a directory and report per criterion.
    Accept {
        dir: PathBuf,
        /// Only evaluate the evidence already in the directory.
        #[arg(long)]
        evaluate_only: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated subset of criteria.
        #[arg(long, value_delimiter = ',')]
        criteria: Option<Vec<u8>>,
    },
    /// Besov norms of a snapshot, unweighted and at the stored radius.
    Norms {
        snapshot: PathBuf,
        /// `σ,s,p,r`
        #[arg(long)]
        spec: String,
    },
    /// Largeness meter of a snapshot's velocity.
    Largeness { snapshot: PathBuf },
}

fn fail(e: &HarnessError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if e.is_config() { EXIT_CONFIG } else { EXIT_FAIL })
}

fn cmd_run(config: &Path) -> Result<ExitCode, HarnessError> {
    let mut plan = read_config(config)?;
    plan.plan.kind = PlanKind::SingleRun;
    plan.plan.values.clear();
    let report = execute(&plan)?;
    let rec = &report.records[0];
    let dir = anslab_harness::execute::run_directory(&plan.output_dir(), &plan.base_run());
    println!(
        "verdict={} steps={} Psi0={:e} sup_Psi={:e} radius_final={:e} dir={}",
        rec.verdict,
        rec.steps,
        rec.psi0,
        rec.sup_psi,
        rec.radius_final,
        dir.display()
    );
    if let Some(m) = &rec.message {
        eprintln!("{m}");
    }
    Ok(if rec.completed() { ExitCode::SUCCESS } else { ExitCode::from(EXIT_HALT) })
}

fn cmd_sweep(config: &Path, seed: Option<u64>) -> Result<ExitCode, HarnessError> {
    let mut plan = read_config(config)?;
    if let Some(s) = seed {
        plan.plan.seed = s;
    }
    let report = execute(&plan)?;
    for row in &report.summary {
        println!("{:e} {} sup_Psi={:e}", row.sweep_value, row.verdict, row.sup_psi);
    }
    for row in &report.corpus {
        println!(
            "grid={} max_ratio={:e} max_weighted={:e} radius0_exact={}",
            row.grid, row.max_ratio, row.max_weighted, row.radius0_exact
        );
    }
    println!(
        "computed={} reused={} quarantined={} out={}",
        report.computed,
        report.reused,
        report.quarantined.len(),
        plan.output_dir().display()
    );
    Ok(ExitCode::SUCCESS)
}

fn print_report(report: &Report, dir: &Path) {
    for c in &report.criteria {
        println!("{}", c.line());
    }
    println!("overall: {} ({})", report.overall.label(), dir.join(REPORT_FILE).display());
}

fn cmd_accept(dir: &Path, evaluate_only: bool, seed: u64, criteria: Option<Vec<u8>>) -> Result<ExitCode, HarnessError> {
    let report = if evaluate_only {
        evaluate_dir(dir)?
    } else {
        let mut opts = AcceptanceOptions::new(dir);
        opts.seed = seed;
        opts.binary = std::env::current_exe().ok();
        opts.only = criteria;
        opts.verbose = true;
        run_acceptance(&opts)?
    };
    print_report(&report, dir);
    Ok(ExitCode::from(report.exit_code() as u8))
}

fn parse_spec(text: &str) -> Result<BesovSpec<f64>, HarnessError> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| HarnessError::config(None, format!("--spec {text:?}: {e}")))?;
    let [sigma, s, p, r] = parts[..] else {
        return Err(HarnessError::config(None, format!("--spec {text:?}: expected σ,s,p,r")));
    };
    Ok(BesovSpec::new(sigma, s, p, r))
}

fn cmd_norms(path: &Path, spec: &str) -> Result<ExitCode, HarnessError> {
    let spec = parse_spec(spec)?;
    let snap = Snapshot::<f64>::read_file(path)?;
    let part = DyadicPartition::new(snap.v.grid());
    let table = weight_table(snap.v.grid(), snap.radius)?;
    let horizontal: Vec<&SpectralField<f64>> = snap.v.horizontal().iter().collect();
    let vertical = [snap.v.vertical()];
    let all: Vec<&SpectralField<f64>> = snap.v.components().iter().collect();
    println!("t={:e} eps={:e} radius={:e}", snap.t, snap.eps, snap.radius);
    for (name, fields) in [("v_h", &horizontal[..]), ("v_n", &vertical[..]), ("v", &all[..])] {
        let plain = besov_norm_of(fields, &spec, &part, None)?;
        let weighted = besov_norm_of(fields, &spec, &part, Some(&table))?;
        println!("{name} norm={plain:e} weighted={weighted:e}");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_largeness(path: &Path) -> Result<ExitCode, HarnessError> {
    let snap = Snapshot::<f64>::read_file(path)?;
    println!("{:e}", largeness_meter(&snap.v, &default_time_samples())?);
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Verb::Run { config } => cmd_run(&config),
        Verb::Sweep { config, seed } => cmd_sweep(&config, seed),
        Verb::Accept {
            dir,
            evaluate_only,
            seed,
            criteria,
        } => cmd_accept(&dir, evaluate_only, seed, criteria),
        Verb::Norms { snapshot, spec } => cmd_norms(&snapshot, &spec),
        Verb::Largeness { snapshot } => cmd_largeness(&snapshot),
    };
    result.unwrap_or_else(|e| fail(&e))
}

//! The sectioned `key = value` experiment file (`[solver]`, `[weight]`,
//! `[plan]`), its defaults, validation, echo and hashing.

use std::fmt;
use std::path::PathBuf;

use anslab_core::solver::{check_admissible, Profile, SolverConfig, System, CALIBRATED_ETA, CALIBRATED_ETA1};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{HarnessError, Result};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    solver: Option<RawSolver>,
    weight: Option<RawWeight>,
    plan: Option<RawPlan>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    n: Option<usize>,
    sizes: Option<Vec<usize>>,
    s: Option<f64>,
    p: Option<f64>,
    eps: Option<f64>,
    dt: Option<f64>,
    t_end: Option<f64>,
    profile: Option<String>,
    eta: Option<f64>,
    eta1: Option<f64>,
    guard: Option<bool>,
    snapshot_every: Option<usize>,
    system: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWeight {
    alpha: Option<f64>,
    lambda: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlan {
    kind: Option<PlanKind>,
    values: Option<Vec<f64>>,
    output: Option<String>,
    seed: Option<u64>,
    sigma1: Option<f64>,
    sigma2: Option<f64>,
    pairs: Option<usize>,
}

/// What a plan sweeps over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanKind {
    SingleRun,
    EpsSweep,
    LambdaSweep,
    /// Values multiply the base `η`.
    AmplitudeSweep,
    /// Values are grid sizes `N` of cubic `Nⁿ` grids.
    ProductLawCorpus,
    /// Values are `ε`; only the largeness meter is evaluated.
    LargenessSweep,
}

impl PlanKind {
    pub fn name(self) -> &'static str {
        match self {
            PlanKind::SingleRun => "single_run",
            PlanKind::EpsSweep => "eps_sweep",
            PlanKind::LambdaSweep => "lambda_sweep",
            PlanKind::AmplitudeSweep => "amplitude_sweep",
            PlanKind::ProductLawCorpus => "product_law_corpus",
            PlanKind::LargenessSweep => "largeness_sweep",
        }
    }

    fn default_values(self) -> Vec<f64> {
        match self {
            PlanKind::SingleRun => vec![],
            PlanKind::EpsSweep => vec![1.0, 0.5, 0.25, 0.125, 0.0625],
            PlanKind::LambdaSweep => vec![10.0, 20.0, 40.0],
            PlanKind::AmplitudeSweep => vec![1.0, 2.0, 4.0, 8.0],
            PlanKind::ProductLawCorpus => vec![32.0, 64.0],
            PlanKind::LargenessSweep => vec![1.0, 0.5, 0.25, 0.125],
        }
    }
}

impl fmt::Display for PlanKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Effective `[solver]` section: every key present.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub n: usize,
    pub sizes: Vec<usize>,
    pub s: f64,
    pub p: f64,
    pub eps: f64,
    pub dt: f64,
    pub t_end: f64,
    pub profile: String,
    pub eta: f64,
    pub eta1: f64,
    /// Whether the bootstrap guard `Ψ, X + Y ≤ η₁` stops the run.
    pub guard: bool,
    pub snapshot_every: usize,
    pub system: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightSection {
    pub alpha: f64,
    pub lambda: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanSection {
    pub kind: PlanKind,
    pub values: Vec<f64>,
    pub output: String,
    pub seed: u64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub pairs: usize,
}

/// One solver run: the `[solver]` and `[weight]` sections.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub solver: SolverSection,
    pub weight: WeightSection,
}

/// A validated experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub solver: SolverSection,
    pub weight: WeightSection,
    pub plan: PlanSection,
}

/// Default grid for dimension `n`: `32²×64` for `n = 3`, `16^{n−1}×32` otherwise.
pub fn default_sizes(n: usize) -> Vec<usize> {
    if n == 3 {
        vec![32, 32, 64]
    } else {
        let mut v = vec![16; n.saturating_sub(1)];
        v.push(32);
        v
    }
}

/// Hex SHA-256 of the canonical JSON form (object keys sorted), so the hash
/// does not depend on the order keys appeared in the file.
pub fn canonical_hash<S: Serialize>(value: &S) -> String {
    let v = serde_json::to_value(value).expect("config serializes");
    let text = serde_json::to_string(&v).expect("value serializes");
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// 1-based line of `key = …` inside `[section]`, if present.
fn line_of(text: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = name.trim().to_string();
            continue;
        }
        if current == section {
            if let Some((k, _)) = line.split_once('=') {
                if k.trim() == key {
                    return Some(i + 1);
                }
            }
        }
    }
    None
}

fn toml_error(text: &str, e: &toml::de::Error) -> HarnessError {
    let line = e.span().map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
    HarnessError::config(line, e.message().trim().to_string())
}

impl RunSpec {
    pub fn hash(&self) -> String {
        canonical_hash(self)
    }

    /// Serialized as a config file holding only `[solver]` and `[weight]`.
    pub fn echo(&self) -> String {
        toml::to_string(self).expect("run spec serializes")
    }

    pub fn profile(&self) -> Profile {
        Profile::parse(&self.solver.profile).expect("validated profile")
    }

    pub fn system(&self) -> System {
        System::parse(&self.solver.system).expect("validated system")
    }

    pub fn solver_config(&self) -> SolverConfig<f64> {
        let s = &self.solver;
        SolverConfig {
            sizes: s.sizes.clone(),
            s: s.s,
            p: s.p,
            eps: s.eps,
            dt: s.dt,
            t_end: s.t_end,
            alpha: self.weight.alpha,
            lambda: self.weight.lambda,
            profile: self.profile(),
            eta: s.eta,
            eta1: s.guard.then_some(s.eta1),
            snapshot_every: s.snapshot_every,
            system: self.system(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.solver_config()
            .validate()
            .map_err(|e| HarnessError::config(None, e.to_string()))
    }
}

impl ExperimentPlan {
    pub fn base_run(&self) -> RunSpec {
        RunSpec {
            solver: self.solver.clone(),
            weight: self.weight.clone(),
        }
    }

    /// `(sweep value, run)` for every point that integrates the solver.
    pub fn runs(&self) -> Vec<(f64, RunSpec)> {
        let base = self.base_run();
        let point = |v: f64| {
            let mut r = base.clone();
            match self.plan.kind {
                PlanKind::EpsSweep => r.solver.eps = v,
                PlanKind::LambdaSweep => r.weight.lambda = v,
                PlanKind::AmplitudeSweep => r.solver.eta = base.solver.eta * v,
                _ => {}
            }
            (v, r)
        };
        match self.plan.kind {
            PlanKind::SingleRun => vec![(f64::NAN, base.clone())],
            PlanKind::EpsSweep | PlanKind::LambdaSweep | PlanKind::AmplitudeSweep => {
                self.plan.values.iter().map(|&v| point(v)).collect()
            }
            PlanKind::ProductLawCorpus | PlanKind::LargenessSweep => vec![],
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        PathBuf::from(&self.plan.output)
    }

    /// The effective configuration, re-parseable by [`parse_config`].
    pub fn echo(&self) -> String {
        toml::to_string(self).expect("plan serializes")
    }

    pub fn hash(&self) -> String {
        canonical_hash(self)
    }
}

/// Parses and validates a plan, filling every default.
pub fn parse_config(text: &str) -> Result<ExperimentPlan> {
    let raw: RawFile = toml::from_str(text).map_err(|e| toml_error(text, &e))?;
    let rs = raw.solver.unwrap_or_default();
    let rw = raw.weight.unwrap_or_default();
    let rp = raw.plan.unwrap_or_default();
    let at = |section: &str, key: &str| line_of(text, section, key);

    let n = match (rs.n, &rs.sizes) {
        (Some(n), Some(sz)) if sz.len() != n => {
            return Err(HarnessError::config(
                at("solver", "sizes"),
                format!("sizes has {} entries but n = {n}", sz.len()),
            ))
        }
        (_, Some(sz)) => sz.len(),
        (Some(n), None) => n,
        (None, None) => 3,
    };
    let sizes = rs.sizes.unwrap_or_else(|| default_sizes(n));
    if let Some(bad) = sizes.iter().find(|&&m| m < 8 || !m.is_power_of_two()) {
        return Err(HarnessError::config(
            at("solver", "sizes"),
            format!("grid size {bad} must be a power of two ≥ 8"),
        ));
    }
    let p = rs.p.unwrap_or(1.0);
    let s = rs.s.unwrap_or(1.5);
    let kind = rp.kind.unwrap_or(PlanKind::SingleRun);
    // the corpus never runs the solver; its p only has to satisfy the product law
    if kind != PlanKind::ProductLawCorpus {
        check_admissible(n, p, s).map_err(|e| {
            let line = at("solver", "s").or_else(|| at("solver", "p"));
            HarnessError::config(line, format!("{e} (required: 1 ≤ p < n−1 and 1 ≤ s < min(n−1, 2(n−1)/p))"))
        })?;
    }
    let profile = rs.profile.unwrap_or_else(|| "standard".into());
    if Profile::parse(&profile).is_none() {
        return Err(HarnessError::config(
            at("solver", "profile"),
            format!("unknown profile {profile:?} (expected \"standard\" or \"random:<seed>\")"),
        ));
    }
    let system = rs.system.unwrap_or_else(|| "rescaled".into());
    if System::parse(&system).is_none() {
        return Err(HarnessError::config(
            at("solver", "system"),
            format!("unknown system {system:?} (expected \"rescaled\" or \"limiting\")"),
        ));
    }
    let solver = SolverSection {
        n,
        sizes,
        s,
        p,
        eps: rs.eps.unwrap_or(0.25),
        dt: rs.dt.unwrap_or(1e-3),
        t_end: rs.t_end.unwrap_or(1.0),
        profile,
        eta: rs.eta.unwrap_or(CALIBRATED_ETA),
        eta1: rs.eta1.unwrap_or(CALIBRATED_ETA1),
        guard: rs.guard.unwrap_or(true),
        snapshot_every: rs.snapshot_every.unwrap_or(10),
        system,
    };
    let weight = WeightSection {
        alpha: rw.alpha.unwrap_or(1.0),
        lambda: rw.lambda.unwrap_or(20.0),
    };
    let plan = PlanSection {
        kind,
        values: rp.values.unwrap_or_else(|| kind.default_values()),
        output: rp.output.unwrap_or_else(|| "anslab-out".into()),
        seed: rp.seed.unwrap_or(0),
        sigma1: rp.sigma1.unwrap_or(1.0),
        sigma2: rp.sigma2.unwrap_or(1.0),
        pairs: rp.pairs.unwrap_or(200),
    };
    let out = ExperimentPlan { solver, weight, plan };

    let scalar_checks: [(&str, &str, f64, bool); 6] = [
        ("solver", "eps", out.solver.eps, out.solver.eps >= 0.0),
        ("solver", "eta", out.solver.eta, out.solver.eta >= 0.0),
        ("solver", "eta1", out.solver.eta1, out.solver.eta1 > 0.0),
        ("weight", "alpha", out.weight.alpha, out.weight.alpha > 0.0),
        ("weight", "lambda", out.weight.lambda, out.weight.lambda > 0.0),
        ("solver", "dt", out.solver.dt, out.solver.dt > 0.0),
    ];
    for (section, key, value, ok) in scalar_checks {
        if !ok || !value.is_finite() {
            return Err(HarnessError::config(at(section, key), format!("{key} = {value} is out of range")));
        }
    }
    let vline = at("plan", "values");
    match kind {
        PlanKind::EpsSweep | PlanKind::LargenessSweep => {
            if let Some(v) = out.plan.values.iter().find(|&&v| !(v > 0.0 && v <= 1.0)) {
                return Err(HarnessError::config(vline, format!("ε = {v} must lie in (0, 1]")));
            }
        }
        PlanKind::LambdaSweep | PlanKind::AmplitudeSweep => {
            if let Some(v) = out.plan.values.iter().find(|&&v| !(v > 0.0 && v.is_finite())) {
                return Err(HarnessError::config(vline, format!("sweep value {v} must be positive")));
            }
        }
        PlanKind::ProductLawCorpus => {
            if let Some(v) = out
                .plan
                .values
                .iter()
                .find(|&&v| v.fract() != 0.0 || v < 8.0 || !(v as usize).is_power_of_two())
            {
                return Err(HarnessError::config(vline, format!("corpus grid size {v} must be a power of two ≥ 8")));
            }
            anslab_core::paraproduct::product_law_admissible(n, out.plan.sigma1, out.plan.sigma2, p)
                .map_err(|e| HarnessError::config(at("plan", "sigma1"), e.to_string()))?;
        }
        PlanKind::SingleRun => {}
    }
    for (_, run) in out.runs() {
        run.validate()?;
    }
    Ok(out)
}

pub fn read_config(path: &std::path::Path) -> Result<ExperimentPlan> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| HarnessError::config(None, format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_solver_section_gives_defaults() {
        let plan = parse_config("[solver]\n").unwrap();
        assert_eq!(plan.solver.n, 3);
        assert_eq!(plan.solver.p, 1.0);
        assert_eq!(plan.solver.s, 1.5);
        assert_eq!(plan.solver.sizes, vec![32, 32, 64]);
        assert_eq!(plan.weight.alpha, 1.0);
        assert_eq!(plan.weight.lambda, 20.0);
        assert_eq!(plan.plan.kind, PlanKind::SingleRun);
    }

    #[test]
    fn s_two_in_three_dimensions_is_rejected() {
        let err = parse_config("[solver]\ns = 2\n").unwrap_err();
        let msg = err.to_string();
        assert!(err.is_config());
        assert!(msg.contains("s < min(n−1, 2(n−1)/p)"), "{msg}");
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn classical_case_in_four_dimensions_is_accepted() {
        let plan = parse_config("[solver]\nn = 4\ns = 2\np = 2\n").unwrap();
        assert_eq!(plan.solver.sizes, vec![16, 16, 16, 32]);
    }

    #[test]
    fn unknown_keys_are_rejected_with_line() {
        let err = parse_config("[solver]\ns = 1.5\nbogus = 3\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3") && msg.contains("bogus"), "{msg}");
        assert!(parse_config("[extra]\nx = 1\n").is_err());
    }

    #[test]
    fn malformed_value_reports_line() {
        let msg = parse_config("[weight]\nalpha = 1.0\nlambda = \"big\"\n").unwrap_err().to_string();
        assert!(msg.contains("line 3"), "{msg}");
        let msg = parse_config("[solver]\n\nprofile = \"wavy\"\n").unwrap_err().to_string();
        assert!(msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn echo_reparses_to_same_hash() {
        let plan = parse_config("[plan]\nkind = \"eps_sweep\"\n[weight]\nlambda = 10\n").unwrap();
        let again = parse_config(&plan.echo()).unwrap();
        assert_eq!(plan, again);
        assert_eq!(plan.hash(), again.hash());
        let run = plan.runs()[0].1.clone();
        let back: RunSpec = toml::from_str(&run.echo()).unwrap();
        assert_eq!(back.hash(), run.hash());
    }

    #[test]
    fn hash_ignores_key_order() {
        let a = parse_config("[solver]\ns = 1.25\np = 1\n[weight]\nalpha = 0.5\nlambda = 10\n").unwrap();
        let b = parse_config("[weight]\nlambda = 10\nalpha = 0.5\n[solver]\np = 1\ns = 1.25\n").unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_eq!(a.base_run().hash(), b.base_run().hash());
    }

    #[test]
    fn sweep_points() {
        let plan = parse_config("[plan]\nkind = \"amplitude_sweep\"\nvalues = [1, 2]\n[solver]\neta = 0.5\n").unwrap();
        let etas: Vec<f64> = plan.runs().iter().map(|(_, r)| r.solver.eta).collect();
        assert_eq!(etas, vec![0.5, 1.0]);
        assert!(parse_config("[plan]\nkind = \"eps_sweep\"\nvalues = [2.0]\n").is_err());
    }
}

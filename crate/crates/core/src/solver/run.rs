use std::fmt;

use super::config::SolverConfig;
use super::data::initial_data;
use super::diagnostics::{energy, Accumulators, DiagnosticTrace, Indices, Sample, TraceRow};
use super::snapshot::Snapshot;
use super::step::Integrator;
use crate::dyadic::DyadicPartition;
use crate::spectral::{ops::divergence_residual, Grid, VectorField};
use crate::weight::{theta_step, AnalyticityState};
use crate::{Error, Result, Scalar};

/// How a run ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Completed,
    BootstrapGuardTripped,
    RadiusGuardTripped,
    Blowup,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Completed => "completed",
            Verdict::BootstrapGuardTripped => "bootstrap_guard_tripped",
            Verdict::RadiusGuardTripped => "radius_guard_tripped",
            Verdict::Blowup => "blowup",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            Verdict::Completed,
            Verdict::BootstrapGuardTripped,
            Verdict::RadiusGuardTripped,
            Verdict::Blowup,
        ]
        .into_iter()
        .find(|v| v.name() == s)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Velocity, time, radius bookkeeping and diagnostics of a run.
#[derive(Clone, Debug)]
pub struct SolverState<T: Scalar> {
    pub v: VectorField<T>,
    pub step: usize,
    pub analyticity: AnalyticityState<T>,
    pub trace: DiagnosticTrace<T>,
    pub accumulators: Accumulators<T>,
}

impl<T: Scalar> SolverState<T> {
    pub fn t(&self) -> T {
        self.analyticity.t
    }
}

/// Final report of [`Solver::run`].
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub verdict: Verdict,
    pub message: Option<String>,
    pub steps: usize,
    /// Largest number of modes per step where `−Δ_ε` had no inverse.
    pub zero_symbol_modes: usize,
    /// Steps whose input exceeded the divergence warning level.
    pub divergence_warnings: usize,
}

/// A configured run: grid, partition, integrator and state.
pub struct Solver<T: Scalar> {
    cfg: SolverConfig<T>,
    part: DyadicPartition<T>,
    integrator: Integrator<T>,
    idx: Indices<T>,
    state: SolverState<T>,
}

impl<T: Scalar> Solver<T> {
    /// Validates `cfg` and builds the initial data from its profile and `η`.
    pub fn new(cfg: SolverConfig<T>) -> Result<Self> {
        cfg.validate()?;
        let grid = Grid::new(&cfg.sizes)?;
        let part = DyadicPartition::new(&grid);
        let v0 = initial_data(&cfg, &part)?;
        Self::assemble(cfg, part, v0)
    }

    /// Starts from explicit initial data instead of the configured profile.
    pub fn with_initial(cfg: SolverConfig<T>, v0: VectorField<T>) -> Result<Self> {
        cfg.validate()?;
        let grid = Grid::new(&cfg.sizes)?;
        if !v0.grid().same_as(&grid) {
            return Err(Error::GridMismatch);
        }
        let part = DyadicPartition::new(&grid);
        Self::assemble(cfg, part, v0)
    }

    fn assemble(cfg: SolverConfig<T>, part: DyadicPartition<T>, mut v0: VectorField<T>) -> Result<Self> {
        v0.dealias();
        crate::spectral::ops::leray_project_in_place(&mut v0);
        let eps = cfg.effective_eps();
        let integrator = Integrator::new(part.grid(), eps, cfg.s, cfg.dt);
        let idx = Indices::new(cfg.dim(), cfg.p, cfg.s);
        let state = SolverState {
            v: v0,
            step: 0,
            analyticity: AnalyticityState::new(cfg.alpha, cfg.lambda)?,
            trace: DiagnosticTrace::default(),
            accumulators: Accumulators::new(idx, eps),
        };
        Ok(Self {
            cfg,
            part,
            integrator,
            idx,
            state,
        })
    }

    pub fn config(&self) -> &SolverConfig<T> {
        &self.cfg
    }

    pub fn partition(&self) -> &DyadicPartition<T> {
        &self.part
    }

    pub fn state(&self) -> &SolverState<T> {
        &self.state
    }

    pub fn into_state(self) -> SolverState<T> {
        self.state
    }

    fn snapshot(&self) -> Snapshot<T> {
        Snapshot {
            t: self.state.t(),
            eps: self.cfg.effective_eps(),
            s: self.cfg.s,
            radius: self.state.analyticity.radius(),
            theta: self.state.analyticity.theta,
            v: self.state.v.clone(),
        }
    }

    /// Integrates to `t_end` or until a guard trips. `on_snapshot` receives
    /// the state every `snapshot_every` steps, starting at `t = 0`.
    pub fn run(&mut self, mut on_snapshot: impl FnMut(&Snapshot<T>) -> Result<()>) -> Result<RunOutcome> {
        let steps = self.cfg.steps();
        let eps = self.cfg.effective_eps();
        let dt = self.cfg.dt;
        let mut zero_modes = 0;
        let mut warnings = 0;
        let finish = |verdict, message: Option<String>, steps, zero_modes, warnings| RunOutcome {
            verdict,
            message,
            steps,
            zero_symbol_modes: zero_modes,
            divergence_warnings: warnings,
        };
        loop {
            let st = &mut self.state;
            let radius = st.analyticity.radius();
            let sample = Sample::measure(&st.v, radius, self.cfg.p, &self.part)?;
            let f = st.accumulators.observe(&sample);
            let row = TraceRow {
                t: st.analyticity.t,
                radius,
                theta: st.analyticity.theta,
                energy: energy(&st.v, eps),
                div_residual: divergence_residual(&st.v),
                bh_main: f.bh_main,
                bn_main: f.bn_main,
                l1_accum: f.l1_accum,
                cross_accum: f.cross_accum,
                x: f.x,
                y: f.y,
                psi: f.psi,
                theta_rate: f.theta_rate,
            };
            st.trace.rows.push(row);
            if st.step % self.cfg.snapshot_every == 0 {
                let snap = self.snapshot();
                on_snapshot(&snap)?;
            }
            let st = &mut self.state;
            if !row.is_finite() {
                let msg = format!("blowup at t = {}: non-finite diagnostics", row.t);
                return Ok(finish(super::Verdict::Blowup, Some(msg), st.step, zero_modes, warnings));
            }
            if let Some(eta1) = self.cfg.eta1 {
                if row.psi > eta1 || row.x + row.y > eta1 {
                    let msg = format!(
                        "bootstrap guard at t = {}: Ψ = {}, X + Y = {}, η₁ = {eta1}",
                        row.t,
                        row.psi,
                        row.x + row.y
                    );
                    return Ok(finish(Verdict::BootstrapGuardTripped, Some(msg), st.step, zero_modes, warnings));
                }
            }
            if st.step >= steps {
                return Ok(finish(Verdict::Completed, None, st.step, zero_modes, warnings));
            }

            st.accumulators.integrate(&sample, dt);
            let t = st.analyticity.t;
            st.analyticity = match theta_step(&st.analyticity, f.theta_rate, dt) {
                Ok(a) => a,
                Err(e @ Error::RadiusGuard { .. }) => {
                    return Ok(finish(Verdict::RadiusGuardTripped, Some(e.to_string()), st.step, zero_modes, warnings));
                }
                Err(e) => return Err(e),
            };
            match self.integrator.step(&st.v, t, None) {
                Ok(out) => {
                    zero_modes = zero_modes.max(out.zero_symbol_modes);
                    warnings += out.divergence_warning as usize;
                    st.v = out.v;
                    st.step += 1;
                }
                Err(e @ Error::Blowup { .. }) => {
                    return Ok(finish(Verdict::Blowup, Some(e.to_string()), st.step, zero_modes, warnings));
                }
                Err(e) => return Err(e),
            }
        }
    }

    /// `Ψ` and `X + Y` indices used by this run.
    pub fn indices(&self) -> Indices<T> {
        self.idx
    }
}

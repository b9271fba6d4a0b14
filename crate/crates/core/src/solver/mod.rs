//! Integrating-factor solver for the rescaled system, the slowly varying
//! data family, and the monitored functionals `Ψ`, `X`, `Y`, `θ`.

mod config;
mod data;
mod diagnostics;
mod run;
mod snapshot;
mod step;

pub use config::{check_admissible, Profile, SolverConfig, System};
pub use data::{
    default_time_samples, dyadic_exponent, initial_data, largeness_meter, log_times, make_initial_family,
    smallness, smallness_pair, standard_profile, unit_profile, SWIRL,
};
pub use diagnostics::{
    compute_psi, compute_xy, energy, Accumulators, DiagnosticTrace, Functionals, Indices, Sample, TraceRow,
};
pub use run::{RunOutcome, Solver, SolverState, Verdict};
pub use snapshot::{Snapshot, MAGIC};
pub use step::{dissipation_symbol, rhs, Forcing, Integrator, Rhs, StepOutput, CFL};

/// Default smallness `η` of the initial data (desk-scale calibration, not a
/// constant from the analysis).
pub const CALIBRATED_ETA: f64 = 1e-3;

/// Default bootstrap threshold `η₁` (desk-scale calibration).
pub const CALIBRATED_ETA1: f64 = 1e-1;

//! Grids, spectral fields, Fourier multipliers and spectral differential operators.

pub(crate) mod fft;
mod field;
mod grid;
mod multiplier;
pub mod ops;

pub use field::{SpectralField, VectorField, HERMITIAN_TOLERANCE};
pub use grid::Grid;
pub(crate) use grid::odometer;
pub use multiplier::{apply_multiplier, apply_multiplier_in_place, frac_power, MultiplierSymbol};
pub use ops::{divergence, gradient, leray_project, nonlinear_term, pressure_split, NonlinearTerm, PressureSplit};

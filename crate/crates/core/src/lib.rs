//! Anisotropic spectral laboratory.
//!
//! A pseudospectral toolkit on the periodic box for the anisotropic
//! Littlewood-Paley calculus (dyadic blocks `Δ_{k,j} = Δ_k^h Δ_j^v`,
//! Besov and Chemin-Lerner norms, the nine-term Bony decomposition) and an
//! integrating-factor solver for the ε-rescaled fractional Navier-Stokes
//! system
//!
//! ```text
//! ∂_t v^h + v·∇v^h + D_ε^s v^h + ∇_h q   = 0
//! ∂_t v^n + v·∇v^n + D_ε^s v^n + ε²∂_n q = 0,   div v = 0,
//! ```
//!
//! with `Δ_ε = Δ_h + ε²∂_n²` and `D_ε = √(−Δ_ε)`, together with the
//! analyticity-weighted diagnostics that track the radius `α − λθ(t)`.
//!
//! The whole-space problem is replaced by the torus `𝕋ⁿ`; the last axis is
//! the vertical direction `x_n`, all earlier axes are horizontal.
//!
//! All numerical code is generic over the scalar type ([`Scalar`]); the
//! aliases at the crate root fix `f64`, which is what the solver tolerances
//! assume.

pub mod dyadic;
pub mod error;
pub mod paraproduct;
pub mod random;
pub mod solver;
pub mod spectral;
pub mod weight;

pub use error::{Error, Result};

use num_traits::{Float, FloatConst};
use rustfft::FftNum;

/// Floating-point scalar usable by every numerical routine in the crate.
pub trait Scalar: FftNum + Float + FloatConst + Default + std::fmt::Display {
    /// Lossless-enough conversion from an `f64` literal.
    fn c(x: f64) -> Self {
        Self::from_f64(x).expect("representable constant")
    }

    fn to_f64_lossy(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

pub use num_complex::Complex;

pub type Grid = spectral::Grid<f64>;
pub type SpectralField = spectral::SpectralField<f64>;
pub type VectorField = spectral::VectorField<f64>;
pub type MultiplierSymbol = spectral::MultiplierSymbol<f64>;
pub type DyadicPartition = dyadic::DyadicPartition<f64>;
pub type BesovSpec = dyadic::BesovSpec<f64>;
pub type AnalyticityState = weight::AnalyticityState<f64>;
pub type SolverConfig = solver::SolverConfig<f64>;
pub type SolverState = solver::SolverState<f64>;
pub type DiagnosticTrace = solver::DiagnosticTrace<f64>;

pub type Grid32 = spectral::Grid<f32>;
pub type SpectralField32 = spectral::SpectralField<f32>;
pub type VectorField32 = spectral::VectorField<f32>;

use crate::spectral::ops::{advection_pressure, leray_project_in_place, DIVERGENCE_WARN_TOLERANCE};
use crate::spectral::{divergence, frac_power, Grid, VectorField};
use crate::{Error, Result, Scalar};

/// Advective CFL number allowed by [`Integrator::step`].
pub const CFL: f64 = 0.5;

/// Right-hand side without dissipation: `−v·∇v − (∇_h q, ε²∂_n q)`.
#[derive(Clone, Debug)]
pub struct Rhs<T: Scalar> {
    pub value: VectorField<T>,
    pub zero_symbol_modes: usize,
    pub max_speed: T,
    /// `‖div v‖ / (‖v‖·max|ξ|)` of the input.
    pub relative_divergence: T,
}

impl<T: Scalar> Rhs<T> {
    pub fn divergence_warning(&self) -> bool {
        self.relative_divergence > T::c(DIVERGENCE_WARN_TOLERANCE)
    }
}

/// Evaluates the right-hand side of the rescaled system; `ε = 0` gives the
/// limiting system, whose vertical equation carries no pressure.
///
/// The advection term is assembled in conservative form `div(v⊗v)` from the
/// same dealiased products that feed the pressure, and `q` solves
/// `−Δ_ε q = Σ∂_i∂_j(v^iv^j)` in one shot. For divergence-free `v` this is
/// the sum of the three pieces of [`crate::spectral::pressure_split`].
pub fn rhs<T: Scalar>(v: &VectorField<T>, eps: T) -> Rhs<T> {
    let ap = advection_pressure(v, eps);
    let scale = v.lattice_norm() * v.grid().max_kept_wavenumber();
    let relative_divergence = if scale == T::zero() {
        T::zero()
    } else {
        divergence(v).lattice_norm() / scale
    };
    Rhs {
        value: ap.rhs,
        zero_symbol_modes: ap.zero_symbol_modes,
        max_speed: ap.max_speed,
        relative_divergence,
    }
}

/// Symbol `m(ξ) = (|ξ_h|² + ε²ξ_n²)^{s/2}` of `D_ε^s` per flat index.
pub fn dissipation_symbol<T: Scalar>(grid: &Grid<T>, eps: T, s: T) -> Vec<T> {
    let n = grid.dim();
    let mut xi = vec![T::zero(); n];
    (0..grid.len())
        .map(|f| {
            grid.wavevector_into(f, &mut xi);
            let h = xi[..n - 1].iter().fold(T::zero(), |a, &k| a + k * k);
            frac_power((h + eps * eps * xi[n - 1] * xi[n - 1]).sqrt(), s)
        })
        .collect()
}

/// External forcing `F(t)` added to the right-hand side.
pub type Forcing<'a, T> = &'a dyn Fn(T) -> VectorField<T>;

/// Result of one step.
#[derive(Clone, Debug)]
pub struct StepOutput<T: Scalar> {
    pub v: VectorField<T>,
    pub zero_symbol_modes: usize,
    pub divergence_warning: bool,
    pub max_speed: T,
}

/// Integrating-factor RK2 (Heun on `w = e^{t·m}v`):
///
/// ```text
/// v*      = E (v + dt N(v))
/// v_{n+1} = E (v + dt/2 N(v)) + dt/2 N(v*),      E = e^{−dt·m}
/// ```
///
/// followed by the Leray projection. Dissipation is exact.
#[derive(Clone, Debug)]
pub struct Integrator<T: Scalar> {
    grid: Grid<T>,
    eps: T,
    dt: T,
    decay: Vec<T>,
    max_wavenumber: T,
}

impl<T: Scalar> Integrator<T> {
    pub fn new(grid: &Grid<T>, eps: T, s: T, dt: T) -> Self {
        let decay = dissipation_symbol(grid, eps, s)
            .into_iter()
            .map(|m| (-dt * m).exp())
            .collect();
        Self {
            grid: grid.clone(),
            eps,
            dt,
            decay,
            max_wavenumber: grid.max_kept_wavenumber(),
        }
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn eps(&self) -> T {
        self.eps
    }

    /// Largest admissible `dt` for a given `max|v|`: `CFL / (max|ξ|·max|v|)`.
    pub fn stable_dt(&self, max_speed: T) -> T {
        if max_speed == T::zero() {
            T::infinity()
        } else {
            T::c(CFL) / (self.max_wavenumber * max_speed)
        }
    }

    fn decay_in_place(&self, v: &mut VectorField<T>) {
        for comp in v.components_mut() {
            for (c, &e) in comp.coeffs_mut().iter_mut().zip(&self.decay) {
                *c = *c * e;
            }
        }
    }

    fn stage(&self, v: &VectorField<T>, t: T, forcing: Option<Forcing<'_, T>>) -> Rhs<T> {
        let mut r = rhs(v, self.eps);
        if let Some(f) = forcing {
            r.value.axpy(T::one(), &f(t));
        }
        leray_project_in_place(&mut r.value);
        r
    }

    pub fn step(&self, v: &VectorField<T>, t: T, forcing: Option<Forcing<'_, T>>) -> Result<StepOutput<T>> {
        if !v.grid().same_as(&self.grid) {
            return Err(Error::GridMismatch);
        }
        let dt = self.dt;
        let half = dt * T::c(0.5);
        let n0 = self.stage(v, t, forcing);
        if !(n0.max_speed.is_finite()) {
            return Err(Error::Blowup {
                t: t.to_f64_lossy(),
                reason: "non-finite velocity".into(),
            });
        }
        if dt > self.stable_dt(n0.max_speed) {
            return Err(Error::Blowup {
                t: t.to_f64_lossy(),
                reason: format!(
                    "advective CFL bound violated (max|v| = {}, dt = {dt}, allowed {})",
                    n0.max_speed,
                    self.stable_dt(n0.max_speed)
                ),
            });
        }

        let mut star = v.clone();
        star.axpy(dt, &n0.value);
        self.decay_in_place(&mut star);
        let n1 = self.stage(&star, t + dt, forcing);

        let mut next = v.clone();
        next.axpy(half, &n0.value);
        self.decay_in_place(&mut next);
        next.axpy(half, &n1.value);
        leray_project_in_place(&mut next);

        if !next.is_finite() {
            return Err(Error::Blowup {
                t: (t + dt).to_f64_lossy(),
                reason: "non-finite coefficients".into(),
            });
        }
        Ok(StepOutput {
            v: next,
            zero_symbol_modes: n0.zero_symbol_modes.max(n1.zero_symbol_modes),
            divergence_warning: n0.divergence_warning(),
            max_speed: n0.max_speed,
        })
    }
}

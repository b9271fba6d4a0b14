//! Analyticity weight `e^{Φ(t,D_n)}` with `Φ(t, ξ_n) = (α − λθ(t))|ξ_n|` and
//! the `θ` accumulator that shrinks the radius.

use crate::spectral::SpectralField;
use crate::{Error, Result, Scalar};

/// Largest admissible `|radius|·|ξ_n|` before the weight is refused.
pub const WEIGHT_EXPONENT_LIMIT: f64 = 40.0;

/// `e^{radius·|ξ_n|}` per vertical index, after the overflow guard.
pub fn weight_table<T: Scalar>(grid: &crate::spectral::Grid<T>, radius: T) -> Result<Vec<T>> {
    let limit = T::c(WEIGHT_EXPONENT_LIMIT);
    (0..grid.vertical_len())
        .map(|z| {
            let e = radius * grid.vertical_radius(z);
            if e.abs() > limit {
                Err(Error::WeightOverflow {
                    exponent: e.abs().to_f64_lossy(),
                    limit: WEIGHT_EXPONENT_LIMIT,
                    mode: grid.lattice(grid.dim() - 1, z),
                })
            } else {
                Ok(e.exp())
            }
        })
        .collect()
}

/// `f_Φ = F^{−1}(e^{radius·|ξ_n|} f̂)`.
///
/// The guard `|radius|·|ξ_n| ≤ 40` is checked on every mode that carries a
/// nonzero coefficient; the first offending vertical lattice index is reported.
pub fn apply_weight<T: Scalar>(f: &SpectralField<T>, radius: T) -> Result<SpectralField<T>> {
    let grid = f.grid();
    let nn = grid.vertical_len();
    let limit = T::c(WEIGHT_EXPONENT_LIMIT);
    let factors: Vec<T> = (0..nn).map(|z| (radius * grid.vertical_radius(z)).exp()).collect();
    let mut out = f.clone();
    for col in out.coeffs_mut().chunks_exact_mut(nn) {
        for (z, c) in col.iter_mut().enumerate() {
            if c.re == T::zero() && c.im == T::zero() {
                continue;
            }
            let e = (radius * grid.vertical_radius(z)).abs();
            if e > limit {
                return Err(Error::WeightOverflow {
                    exponent: e.to_f64_lossy(),
                    limit: WEIGHT_EXPONENT_LIMIT,
                    mode: grid.lattice(grid.dim() - 1, z),
                });
            }
            *c = *c * factors[z];
        }
    }
    Ok(out)
}

/// Radius bookkeeping `radius(t) = α − λθ(t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalyticityState<T> {
    pub alpha: T,
    pub lambda: T,
    pub theta: T,
    pub t: T,
}

impl<T: Scalar> AnalyticityState<T> {
    pub fn new(alpha: T, lambda: T) -> Result<Self> {
        if !(alpha > T::zero()) || !(lambda > T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "need α > 0 and λ > 0 (got α = {alpha}, λ = {lambda})"
            )));
        }
        Ok(Self {
            alpha,
            lambda,
            theta: T::zero(),
            t: T::zero(),
        })
    }

    pub fn radius(&self) -> T {
        self.alpha - self.lambda * self.theta
    }

    /// Smallest radius the continuation argument allows, `α/2`.
    pub fn radius_floor(&self) -> T {
        self.alpha / T::c(2.0)
    }

    pub fn guard_holds(&self) -> bool {
        self.radius() >= self.radius_floor()
    }
}

/// `θ += norm·dt`, `t += dt` (left rectangle: `norm` is `‖v^n_Φ‖` at the
/// start-of-step radius). Fails once the radius drops below `α/2`.
pub fn theta_step<T: Scalar>(state: &AnalyticityState<T>, vn_weighted_norm: T, dt: T) -> Result<AnalyticityState<T>> {
    if !(vn_weighted_norm >= T::zero()) || !(dt > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "need norm ≥ 0 and dt > 0 (got {vn_weighted_norm}, {dt})"
        )));
    }
    let next = AnalyticityState {
        theta: state.theta + vn_weighted_norm * dt,
        t: state.t + dt,
        ..*state
    };
    if next.guard_holds() {
        Ok(next)
    } else {
        Err(Error::RadiusGuard {
            t: next.t.to_f64_lossy(),
            radius: next.radius().to_f64_lossy(),
            floor: next.radius_floor().to_f64_lossy(),
        })
    }
}

/// Block-level decay factor
/// `e^{−(2^{ks} + ε^s 2^{js})·dt} · e^{−λ 2^j θ_inc}` (constant `c = 1`).
/// A diagnostic mirror only: the solver itself applies the exact symbol.
pub fn duhamel_weighted_step_factor<T: Scalar>(k: i32, j: i32, dt: T, s: T, eps: T, lambda: T, theta_increment: T) -> T {
    let two = T::c(2.0);
    let kf = T::c(k as f64);
    let jf = T::c(j as f64);
    let eps_s = if eps == T::zero() { T::zero() } else { eps.powf(s) };
    let dissipation = two.powf(kf * s) + eps_s * two.powf(jf * s);
    (-dissipation * dt).exp() * (-lambda * two.powf(jf) * theta_increment).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;
    use num_complex::Complex;

    #[test]
    fn single_mode_amplification() {
        let g = Grid::<f64>::new(&[8, 8, 16]).unwrap();
        let mut f = SpectralField::zeros(&g);
        f.set_mode(&[1, 0, 3], Complex::new(1.0, 0.0));
        let out = apply_weight(&f, 0.5).unwrap();
        assert!((out.mode(&[1, 0, 3]).re - 1.5f64.exp()).abs() < 1e-14);
        assert!((out.mode(&[1, 0, 3]).re - 4.4817).abs() < 1e-4);
    }

    #[test]
    fn guard_reports_mode() {
        let g = Grid::<f64>::new(&[8, 8, 16]).unwrap();
        let mut f = SpectralField::zeros(&g);
        f.set_mode(&[1, 0, 7], Complex::new(1.0, 0.0));
        match apply_weight(&f, 6.0) {
            Err(Error::WeightOverflow { mode, .. }) => assert_eq!(mode.abs(), 7),
            other => panic!("expected overflow, got {other:?}"),
        }
        assert!(apply_weight(&f, 5.0).is_ok());
    }

    #[test]
    fn step_factor_by_hand() {
        let f = duhamel_weighted_step_factor(2, 1, 0.1, 2.0, 0.5, 10.0, 0.01);
        let expect = (-1.7f64).exp() * (-0.2f64).exp();
        assert!((f - expect).abs() < 1e-15);
        assert_eq!(duhamel_weighted_step_factor(3, 2, 0.0, 1.5, 0.3, 20.0, 0.0), 1.0);
        let no_vertical = duhamel_weighted_step_factor(1, 5, 0.2, 1.5, 0.0, 0.0, 0.0);
        assert!((no_vertical - (-(2f64.powf(1.5)) * 0.2).exp()).abs() < 1e-15);
    }

    #[test]
    fn theta_accumulates_and_trips() {
        let mut st = AnalyticityState::<f64>::new(1.0, 20.0).unwrap();
        for _ in 0..10 {
            st = theta_step(&st, 0.1, 0.01).unwrap();
        }
        assert!((st.theta - 0.01).abs() < 1e-15);
        assert!((st.radius() - 0.8).abs() < 1e-14);
        assert!(matches!(theta_step(&st, 100.0, 0.01), Err(Error::RadiusGuard { .. })));
    }
}

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use super::field::SpectralField;
use crate::Scalar;

type Rule<T> = Arc<dyn Fn(&[T]) -> Complex<T> + Send + Sync>;

/// Fourier multiplier `ξ ↦ m(ξ)` with a human-readable tag.
///
/// Fractional powers follow the convention `|0|^s = 0` for every `s ≥ 0`.
#[derive(Clone)]
pub struct MultiplierSymbol<T: Scalar> {
    tag: String,
    rule: Rule<T>,
}

impl<T: Scalar> fmt::Debug for MultiplierSymbol<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("MultiplierSymbol").field(&self.tag).finish()
    }
}

/// `r^s` with `0^s := 0`.
pub fn frac_power<T: Scalar>(r: T, s: T) -> T {
    if r == T::zero() {
        T::zero()
    } else {
        r.powf(s)
    }
}

fn horizontal_sq<T: Scalar>(xi: &[T]) -> T {
    xi[..xi.len() - 1].iter().fold(T::zero(), |a, &k| a + k * k)
}

impl<T: Scalar> MultiplierSymbol<T> {
    pub fn new(tag: impl Into<String>, rule: impl Fn(&[T]) -> Complex<T> + Send + Sync + 'static) -> Self {
        Self {
            tag: tag.into(),
            rule: Arc::new(rule),
        }
    }

    pub fn real(tag: impl Into<String>, rule: impl Fn(&[T]) -> T + Send + Sync + 'static) -> Self {
        Self::new(tag, move |xi| Complex::new(rule(xi), T::zero()))
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn eval(&self, xi: &[T]) -> Complex<T> {
        (self.rule)(xi)
    }

    /// `|ξ|^s`, i.e. `D^s` with `D = √(−Δ)`.
    pub fn fractional_laplacian(s: T) -> Self {
        Self::real(format!("|xi|^{s}"), move |xi| {
            let r2 = xi.iter().fold(T::zero(), |a, &k| a + k * k);
            frac_power(r2.sqrt(), s)
        })
    }

    /// `|ξ_h|^s`, i.e. `D_h^s`.
    pub fn horizontal_fractional(s: T) -> Self {
        Self::real(format!("|xi_h|^{s}"), move |xi| frac_power(horizontal_sq(xi).sqrt(), s))
    }

    /// `(|ξ_h|² + ε²ξ_n²)^{s/2}`, i.e. `D_ε^s`. At `ε = 0` this is `D_h^s`.
    pub fn anisotropic(s: T, eps: T) -> Self {
        Self::real(format!("(|xi_h|^2+{eps}^2 xi_n^2)^({s}/2)"), move |xi| {
            let kn = xi[xi.len() - 1];
            let r2 = horizontal_sq(xi) + eps * eps * kn * kn;
            frac_power(r2.sqrt(), s)
        })
    }

    /// `e^{radius·|ξ_n|}`, the analytic weight in the vertical variable.
    pub fn vertical_exponential(radius: T) -> Self {
        Self::real(format!("exp({radius}|xi_n|)"), move |xi| (radius * xi[xi.len() - 1].abs()).exp())
    }

    /// Heat semigroup `e^{−t|ξ|²}`.
    pub fn heat(t: T) -> Self {
        Self::real(format!("exp(-{t}|xi|^2)"), move |xi| {
            let r2 = xi.iter().fold(T::zero(), |a, &k| a + k * k);
            (-t * r2).exp()
        })
    }

    /// `e^{−t·m(ξ)}` for a real symbol `m`.
    pub fn semigroup(m: &Self, t: T) -> Self {
        let inner = m.clone();
        Self::real(format!("exp(-{t}*{})", m.tag), move |xi| (-t * inner.eval(xi).re).exp())
    }

    /// Pointwise product `m₁(ξ)·m₂(ξ)`.
    pub fn then(&self, other: &Self) -> Self {
        let (a, b) = (self.clone(), other.clone());
        Self::new(format!("{}*{}", self.tag, other.tag), move |xi| a.eval(xi) * b.eval(xi))
    }
}

/// `f̂(ξ) ↦ m(ξ)·f̂(ξ)`.
pub fn apply_multiplier<T: Scalar>(f: &SpectralField<T>, m: &MultiplierSymbol<T>) -> SpectralField<T> {
    let mut out = f.clone();
    apply_multiplier_in_place(&mut out, m);
    out
}

pub fn apply_multiplier_in_place<T: Scalar>(f: &mut SpectralField<T>, m: &MultiplierSymbol<T>) {
    let grid = f.grid().clone();
    let mut xi = vec![T::zero(); grid.dim()];
    for (flat, c) in f.coeffs_mut().iter_mut().enumerate() {
        if c.re == T::zero() && c.im == T::zero() {
            continue;
        }
        grid.wavevector_into(flat, &mut xi);
        *c = *c * m.eval(&xi);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    fn cos_x1(g: &Grid<f64>) -> SpectralField<f64> {
        SpectralField::from_fn(g, |x| x[0].cos())
    }

    #[test]
    fn laplacian_eigenvalue_one_on_unit_mode() {
        let g = Grid::<f64>::new(&[8, 8, 8]).unwrap();
        let f = cos_x1(&g);
        let out = apply_multiplier(&f, &MultiplierSymbol::fractional_laplacian(2.0));
        assert!(out.relative_distance(&f) < 1e-14);
    }

    #[test]
    fn anisotropic_symbol_at_zero_eps_kills_vertical_modes() {
        let g = Grid::<f64>::new(&[8, 8, 8]).unwrap();
        let f = SpectralField::from_fn(&g, |x| x[2].cos());
        let out = apply_multiplier(&f, &MultiplierSymbol::anisotropic(1.5, 0.0));
        assert!(out.max_abs() == 0.0);
    }

    #[test]
    fn horizontal_symbol_by_hand() {
        let g = Grid::<f64>::new(&[8, 8, 16]).unwrap();
        let mut f = SpectralField::zeros(&g);
        f.set_mode(&[2, 0, 5], Complex::new(1.0, 0.0));
        let out = apply_multiplier(&f, &MultiplierSymbol::horizontal_fractional(1.5));
        let factor = out.mode(&[2, 0, 5]).re;
        assert!((factor - 2.0_f64.powf(1.5)).abs() < 1e-14);
        assert!((factor - 2.8284271247461903).abs() < 1e-12);
    }

    #[test]
    fn zero_mode_power_is_zero_even_for_s_zero() {
        assert_eq!(frac_power(0.0_f64, 0.0), 0.0);
        assert_eq!(frac_power(3.0_f64, 0.0), 1.0);
    }
}

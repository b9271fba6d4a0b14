use num_complex::Complex;

use super::config::{Profile, SolverConfig};
use crate::dyadic::{besov_norm_of, BesovSpec, DyadicPartition};
use crate::random::{rng, random_solenoidal};
use crate::spectral::{Grid, SpectralField, VectorField};
use crate::weight::weight_table;
use crate::{Error, Result, Scalar};

/// Relative weight of the horizontal swirl in [`standard_profile`].
pub const SWIRL: f64 = 0.3;

/// Unit-amplitude standard profile:
///
/// ```text
/// v¹  = ½ sin 2x₁ sin x_n + β cos x₂ sin x_n
/// v²  = β sin x₁ cos x_n                      (n ≥ 3)
/// vⁿ  = cos 2x₁ cos x_n
/// ```
///
/// with `β = SWIRL`; divergence-free and zero on the planes `ξ_h = 0`, `ξ_n = 0`.
pub fn standard_profile<T: Scalar>(grid: &Grid<T>) -> VectorField<T> {
    let n = grid.dim();
    let b = T::c(SWIRL);
    let half = T::c(0.5);
    let two = T::c(2.0);
    let mut comps = Vec::with_capacity(n);
    for c in 0..n {
        let f = SpectralField::from_fn(grid, |x| {
            let (x1, xn) = (x[0], x[n - 1]);
            let swirl = n >= 3;
            if c == 0 {
                let mut v = half * (two * x1).sin() * xn.sin();
                if swirl {
                    v = v + b * x[1].cos() * xn.sin();
                }
                v
            } else if c == n - 1 {
                (two * x1).cos() * xn.cos()
            } else if c == 1 {
                b * x1.sin() * xn.cos()
            } else {
                T::zero()
            }
        });
        comps.push(f);
    }
    let mut v = VectorField::new(comps).expect("shared grid");
    // from_fn leaves rounding-level dust on other modes
    for comp in v.components_mut() {
        for c in comp.coeffs_mut() {
            if c.norm() < T::c(1e-13) {
                *c = Complex::default();
            }
        }
    }
    v
}

/// Unit-amplitude profile of the given kind on `grid`.
pub fn unit_profile<T: Scalar>(grid: &Grid<T>, profile: Profile) -> VectorField<T> {
    match profile {
        Profile::Standard => standard_profile(grid),
        Profile::Random { seed } => random_solenoidal(grid, &mut rng(seed)),
    }
}

/// `(‖e^{αD_n}v‖_{Ḃ^{(n−1)/p−s,1/2}_{p,1}}, ‖e^{αD_n}v‖_{Ḃ^{(n−1)/p+1−s,1/2}_{p,1}})`.
pub fn smallness_pair<T: Scalar>(v: &VectorField<T>, alpha: T, p: T, s: T, part: &DyadicPartition<T>) -> Result<(T, T)> {
    let n = v.grid().dim();
    let crit = T::c((n - 1) as f64) / p;
    let w = weight_table(v.grid(), alpha)?;
    let refs: Vec<&SpectralField<T>> = v.components().iter().collect();
    let half = T::c(0.5);
    let low = besov_norm_of(&refs, &BesovSpec::new(crit - s, half, p, T::one()), part, Some(&w))?;
    let high = besov_norm_of(&refs, &BesovSpec::new(crit + T::one() - s, half, p, T::one()), part, Some(&w))?;
    Ok((low, high))
}

/// The smallness scalar: the larger of the two norms in [`smallness_pair`].
pub fn smallness<T: Scalar>(v: &VectorField<T>, alpha: T, p: T, s: T, part: &DyadicPartition<T>) -> Result<T> {
    let (a, b) = smallness_pair(v, alpha, p, s, part)?;
    Ok(a.max(b))
}

/// Initial data of a run: the profile scaled so that its smallness scalar is `η`.
pub fn initial_data<T: Scalar>(cfg: &SolverConfig<T>, part: &DyadicPartition<T>) -> Result<VectorField<T>> {
    let v = unit_profile(part.grid(), cfg.profile);
    if cfg.eta == T::zero() {
        return Ok(VectorField::zeros(part.grid()));
    }
    let unit = smallness(&v, cfg.alpha, cfg.p, cfg.s, part)?;
    if !(unit > T::zero()) {
        return Err(Error::InvalidArgument("profile has zero smallness norm".into()));
    }
    Ok(v.scaled(cfg.eta / unit))
}

/// `m` with `ε = 2^{−m}`, or an error.
pub fn dyadic_exponent<T: Scalar>(eps: T) -> Result<u32> {
    let e = eps.to_f64_lossy();
    if !(e > 0.0 && e <= 1.0) {
        return Err(Error::InvalidArgument(format!("ε = {e} must lie in (0, 1]")));
    }
    let m = (-e.log2()).round();
    if (2f64.powf(-m) - e).abs() > 1e-15 * e || m > 30.0 {
        return Err(Error::InvalidArgument(format!("ε = {e} is not an inverse power of two")));
    }
    Ok(m as u32)
}

/// The slowly varying data `u₀^ε(x) = (v₀^h(x_h, εx_n), ε^{−1}v₀^n(x_h, εx_n))`.
///
/// With `ε = 2^{−m}` the squeeze is exact: the output lives on a box
/// stretched by `1/ε` vertically with `N_n/ε` points, and every coefficient
/// keeps its lattice index (the physical wavenumber becomes `εξ_n`). A
/// vertical Nyquist coefficient is split evenly between `±N_n/2`.
pub fn make_initial_family<T: Scalar>(profile: &VectorField<T>, eps: T) -> Result<VectorField<T>> {
    let m = dyadic_exponent(eps)?;
    let factor = 1usize << m;
    let grid = profile.grid();
    let n = grid.dim();
    if m == 0 {
        return Ok(profile.clone());
    }
    let mut sizes = grid.sizes().to_vec();
    let mut lengths = grid.lengths().to_vec();
    sizes[n - 1] *= factor;
    lengths[n - 1] = lengths[n - 1] * T::c(factor as f64);
    let big = Grid::with_lengths(&sizes, &lengths)?;
    let nyq = (grid.vertical_len() / 2) as i64;
    let inv_eps = T::c(factor as f64);
    let mut comps = Vec::with_capacity(n);
    let mut lattice = vec![0i64; n];
    for (c, comp) in profile.components().iter().enumerate() {
        let scale = if c == n - 1 { inv_eps } else { T::one() };
        let mut out = SpectralField::zeros(&big);
        for (flat, &coef) in comp.coeffs().iter().enumerate() {
            if coef.re == T::zero() && coef.im == T::zero() {
                continue;
            }
            for (a, l) in lattice.iter_mut().enumerate() {
                *l = grid.lattice(a, grid.axis_index(flat, a));
            }
            let value = coef * scale;
            if lattice[n - 1] == nyq {
                let half = value * T::c(0.5);
                let up = big.flat_of(&lattice);
                lattice[n - 1] = -nyq;
                let down = big.flat_of(&lattice);
                out.coeffs_mut()[up] = out.coeffs_mut()[up] + half;
                out.coeffs_mut()[down] = out.coeffs_mut()[down] + half;
            } else {
                let f = big.flat_of(&lattice);
                out.coeffs_mut()[f] = value;
            }
        }
        comps.push(out);
    }
    VectorField::new(comps)
}

/// `count` log-spaced times from `t_min` to `t_max`.
pub fn log_times(t_min: f64, t_max: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![t_min];
    }
    let (a, b) = (t_min.ln(), t_max.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Default sampling for [`largeness_meter`]: 64 log-spaced times in `[10⁻³, 10²]`.
pub fn default_time_samples() -> Vec<f64> {
    log_times(1e-3, 1e2, 64)
}

/// `max_t t^{1/2}·sup_x |e^{tΔ}u₀(x)|` over the given times, with `|·|` the
/// Euclidean magnitude of the vector.
pub fn largeness_meter<T: Scalar>(u0: &VectorField<T>, t_samples: &[f64]) -> Result<T> {
    if t_samples.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::InvalidArgument("time samples must be positive".into()));
    }
    let grid = u0.grid();
    let r2: Vec<T> = (0..grid.len())
        .map(|f| grid.wavevector(f).iter().fold(T::zero(), |a, &k| a + k * k))
        .collect();
    let mut best = T::zero();
    let mut mag = vec![T::zero(); grid.len()];
    for &t in t_samples {
        let tt = T::c(t);
        mag.iter_mut().for_each(|m| *m = T::zero());
        for comp in u0.components() {
            if comp.is_zero() {
                continue;
            }
            let coeffs: Vec<Complex<T>> = comp
                .coeffs()
                .iter()
                .zip(&r2)
                .map(|(&c, &k2)| c * (-tt * k2).exp())
                .collect();
            let evolved = SpectralField::from_coeffs(grid, coeffs)?;
            for (m, x) in mag.iter_mut().zip(evolved.to_physical_unchecked()) {
                *m = *m + x * x;
            }
        }
        let sup = mag.iter().fold(T::zero(), |a, &x| a.max(x)).sqrt();
        best = best.max(tt.sqrt() * sup);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::divergence;

    #[test]
    fn standard_profile_is_admissible() {
        let g = Grid::<f64>::new(&[16, 16, 16]).unwrap();
        let v = standard_profile(&g);
        assert!(divergence(&v).lattice_norm() < 1e-14);
        let mut w = v.clone();
        w.remove_excluded_planes();
        w.dealias();
        assert!(w.relative_distance(&v) == 0.0);
    }

    #[test]
    fn dyadic_exponents() {
        assert_eq!(dyadic_exponent(1.0).unwrap(), 0);
        assert_eq!(dyadic_exponent(0.125).unwrap(), 3);
        assert!(dyadic_exponent(0.3).is_err());
        assert!(dyadic_exponent(0.0).is_err());
    }

    #[test]
    fn single_mode_largeness() {
        let g = Grid::<f64>::new(&[8, 8, 8]).unwrap();
        let mut comps = vec![SpectralField::zeros(&g), SpectralField::zeros(&g), SpectralField::zeros(&g)];
        comps[1] = SpectralField::from_fn(&g, |x| 2.0 * x[0].cos());
        let u = VectorField::new(comps).unwrap();
        let fine = log_times(0.3, 0.7, 4001);
        let m = largeness_meter(&u, &fine).unwrap();
        let expect = 2.0 * 0.5f64.sqrt() * (-0.5f64).exp();
        assert!((m - expect).abs() < 1e-6, "{m} vs {expect}");
    }
}

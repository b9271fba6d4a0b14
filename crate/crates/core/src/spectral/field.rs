use num_complex::Complex;

use super::fft;
use super::grid::Grid;
use crate::{Error, Result, Scalar};

/// Relative tolerance on `c(−ξ) − conj(c(ξ))` accepted by [`SpectralField::to_physical`].
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

/// Fourier coefficients of a real scalar field on the periodic box.
///
/// With the forward transform carrying `1/N_total`, the coefficients are
/// Fourier-series coefficients: `f(x) = Σ_ξ c_ξ e^{iξ·x}`.
#[derive(Clone, Debug)]
pub struct SpectralField<T: Scalar> {
    grid: Grid<T>,
    coeffs: Vec<Complex<T>>,
}

impl<T: Scalar> SpectralField<T> {
    pub fn zeros(grid: &Grid<T>) -> Self {
        Self {
            grid: grid.clone(),
            coeffs: vec![Complex::default(); grid.len()],
        }
    }

    pub fn from_coeffs(grid: &Grid<T>, coeffs: Vec<Complex<T>>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "{} coefficients for a grid of {} points",
                coeffs.len(),
                grid.len()
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            coeffs,
        })
    }

    /// Forward transform of real grid samples (row-major, last axis fastest).
    pub fn from_physical(grid: &Grid<T>, values: &[T]) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "{} samples for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        let mut coeffs: Vec<Complex<T>> = values.iter().map(|&v| Complex::new(v, T::zero())).collect();
        fft::transform(&mut coeffs, grid.sizes(), grid.forward_plans());
        let scale = T::one() / T::c(grid.len() as f64);
        for c in &mut coeffs {
            *c = *c * scale;
        }
        let mut f = Self {
            grid: grid.clone(),
            coeffs,
        };
        f.symmetrize();
        Ok(f)
    }

    /// Samples `f(x)` at every grid point and transforms.
    pub fn from_fn(grid: &Grid<T>, f: impl Fn(&[T]) -> T) -> Self {
        let dim = grid.dim();
        let mut x = vec![T::zero(); dim];
        let mut values = Vec::with_capacity(grid.len());
        for flat in 0..grid.len() {
            for (a, xa) in x.iter_mut().enumerate() {
                *xa = grid.coordinate(a, grid.axis_index(flat, a));
            }
            values.push(f(&x));
        }
        Self::from_physical(grid, &values).expect("sizes match")
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex<T>> {
        self.coeffs
    }

    /// Coefficient at a signed lattice point.
    pub fn mode(&self, lattice: &[i64]) -> Complex<T> {
        self.coeffs[self.grid.flat_of(lattice)]
    }

    /// Sets `c(ξ) = value` and `c(−ξ) = conj(value)`.
    pub fn set_mode(&mut self, lattice: &[i64], value: Complex<T>) {
        let f = self.grid.flat_of(lattice);
        let m = self.grid.mirror(f);
        if f == m {
            self.coeffs[f] = Complex::new(value.re, T::zero());
        } else {
            self.coeffs[f] = value;
            self.coeffs[m] = value.conj();
        }
    }

    /// `max_ξ |c(−ξ) − conj(c(ξ))| / max_ξ |c(ξ)|` (zero for the zero field).
    pub fn hermitian_residual(&self) -> T {
        let scale = self.max_abs();
        if scale == T::zero() {
            return T::zero();
        }
        let mut worst = T::zero();
        for (f, c) in self.coeffs.iter().enumerate() {
            let m = self.grid.mirror(f);
            let r = (*c - self.coeffs[m].conj()).norm();
            if r > worst {
                worst = r;
            }
        }
        worst / scale
    }

    /// Replaces the coefficients by their Hermitian part `(c(ξ) + conj c(−ξ))/2`.
    pub fn symmetrize(&mut self) {
        let half = T::c(0.5);
        for f in 0..self.coeffs.len() {
            let m = self.grid.mirror(f);
            if m < f {
                continue;
            }
            if m == f {
                self.coeffs[f].im = T::zero();
            } else {
                let a = self.coeffs[f];
                let b = self.coeffs[m];
                let s = (a + b.conj()) * half;
                self.coeffs[f] = s;
                self.coeffs[m] = s.conj();
            }
        }
    }

    /// Inverse transform to grid samples; rejects non-Hermitian coefficients.
    pub fn to_physical(&self) -> Result<Vec<T>> {
        let residual = self.hermitian_residual();
        if residual > T::c(HERMITIAN_TOLERANCE) {
            return Err(Error::NotHermitian {
                residual: residual.to_f64_lossy(),
                tolerance: HERMITIAN_TOLERANCE,
            });
        }
        Ok(self.to_physical_unchecked())
    }

    /// Inverse transforms of two Hermitian fields through one complex FFT:
    /// `a` lands in the real part, `b` in the imaginary part.
    pub(crate) fn to_physical_pair(a: &Self, b: &Self) -> (Vec<T>, Vec<T>) {
        let mut work: Vec<Complex<T>> = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(x, y)| Complex::new(x.re - y.im, x.im + y.re))
            .collect();
        fft::transform(&mut work, a.grid.sizes(), a.grid.inverse_plans());
        work.into_iter().map(|c| (c.re, c.im)).unzip()
    }

    /// Forward transforms of two real sample arrays through one complex FFT.
    /// The results are exactly Hermitian.
    pub(crate) fn from_physical_pair(grid: &Grid<T>, x: &[T], y: &[T]) -> (Self, Self) {
        debug_assert!(x.len() == grid.len() && y.len() == grid.len());
        let mut z: Vec<Complex<T>> = x.iter().zip(y).map(|(&a, &b)| Complex::new(a, b)).collect();
        fft::transform(&mut z, grid.sizes(), grid.forward_plans());
        let scale = T::c(0.5) / T::c(grid.len() as f64);
        let mut fx = vec![Complex::default(); z.len()];
        let mut fy = vec![Complex::default(); z.len()];
        for f in 0..z.len() {
            let m = grid.mirror(f);
            let (p, q) = (z[f], z[m].conj());
            fx[f] = (p + q) * scale;
            let d = (p - q) * scale;
            fy[f] = Complex::new(d.im, -d.re);
        }
        (
            Self {
                grid: grid.clone(),
                coeffs: fx,
            },
            Self {
                grid: grid.clone(),
                coeffs: fy,
            },
        )
    }

    /// Inverse transform without the symmetry check; returns the real part.
    pub fn to_physical_unchecked(&self) -> Vec<T> {
        let mut work = self.coeffs.clone();
        fft::transform(&mut work, self.grid.sizes(), self.grid.inverse_plans());
        work.into_iter().map(|c| c.re).collect()
    }

    pub fn max_abs(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, c| m.max(c.norm()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == T::zero() && c.im == T::zero())
    }

    /// Lattice ℓ² norm `(Σ|c_ξ|²)^{1/2}`.
    pub fn lattice_norm(&self) -> T {
        sum_sq(&self.coeffs).sqrt()
    }

    /// Physical `L²` norm from Parseval: `‖f‖² = |box| Σ|c_ξ|²`.
    pub fn l2_norm(&self) -> T {
        (self.grid.box_volume() * sum_sq(&self.coeffs)).sqrt()
    }

    /// Physical `L²` inner product `∫ f g`.
    pub fn inner(&self, other: &Self) -> T {
        let mut acc = T::zero();
        for (a, b) in self.coeffs.iter().zip(&other.coeffs) {
            acc = acc + (a * b.conj()).re;
        }
        acc * self.grid.box_volume()
    }

    pub fn scale(&mut self, s: T) {
        for c in &mut self.coeffs {
            *c = *c * s;
        }
    }

    pub fn scaled(&self, s: T) -> Self {
        let mut out = self.clone();
        out.scale(s);
        out
    }

    /// `self += a · other`
    pub fn axpy(&mut self, a: T, other: &Self) {
        debug_assert!(self.grid.same_as(&other.grid));
        for (c, o) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *c = *c + *o * a;
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(T::one(), other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(-T::one(), other);
        out
    }

    /// Zeroes every mode with some `|m_i| > N_i/3`.
    pub fn dealias(&mut self) {
        for f in 0..self.coeffs.len() {
            if !self.grid.keeps(f) {
                self.coeffs[f] = Complex::default();
            }
        }
    }

    pub fn is_dealiased(&self) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(f, c)| self.grid.keeps(f) || (c.re == T::zero() && c.im == T::zero()))
    }

    /// Zeroes the planes `ξ_h = 0` and `ξ_n = 0`, which the homogeneous
    /// dyadic decomposition does not see.
    pub fn remove_excluded_planes(&mut self) {
        let nz = self.grid.vertical_len();
        for f in 0..self.coeffs.len() {
            let (h, z) = (f / nz, f % nz);
            if h == 0 || z == 0 {
                self.coeffs[f] = Complex::default();
            }
        }
    }

    /// Maximum relative difference of coefficients, scaled by the larger field.
    pub fn relative_distance(&self, other: &Self) -> T {
        let diff = self.sub(other).lattice_norm();
        let scale = self.lattice_norm().max(other.lattice_norm());
        if scale == T::zero() {
            diff
        } else {
            diff / scale
        }
    }
}

pub(crate) fn sum_sq<T: Scalar>(c: &[Complex<T>]) -> T {
    c.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
}

/// Velocity `v = (v^h, v^n)`: `n` scalar fields on one grid, the last being vertical.
#[derive(Clone, Debug)]
pub struct VectorField<T: Scalar> {
    components: Vec<SpectralField<T>>,
}

impl<T: Scalar> VectorField<T> {
    pub fn new(components: Vec<SpectralField<T>>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidArgument("vector field needs components".into()))?;
        if components.len() != first.grid().dim() {
            return Err(Error::InvalidArgument(format!(
                "{} components on a {}-dimensional grid",
                components.len(),
                first.grid().dim()
            )));
        }
        if components.iter().any(|c| !c.grid().same_as(first.grid())) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { components })
    }

    pub fn zeros(grid: &Grid<T>) -> Self {
        Self {
            components: (0..grid.dim()).map(|_| SpectralField::zeros(grid)).collect(),
        }
    }

    pub fn grid(&self) -> &Grid<T> {
        self.components[0].grid()
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[SpectralField<T>] {
        &self.components
    }

    pub fn components_mut(&mut self) -> &mut [SpectralField<T>] {
        &mut self.components
    }

    pub fn component(&self, i: usize) -> &SpectralField<T> {
        &self.components[i]
    }

    pub fn into_components(self) -> Vec<SpectralField<T>> {
        self.components
    }

    /// `v^h = (v¹, …, v^{n−1})`
    pub fn horizontal(&self) -> &[SpectralField<T>] {
        &self.components[..self.dim() - 1]
    }

    /// `v^n`
    pub fn vertical(&self) -> &SpectralField<T> {
        &self.components[self.dim() - 1]
    }

    pub fn l2_norm(&self) -> T {
        self.components
            .iter()
            .fold(T::zero(), |acc, c| acc + c.l2_norm().powi(2))
            .sqrt()
    }

    pub fn lattice_norm(&self) -> T {
        self.components
            .iter()
            .fold(T::zero(), |acc, c| acc + c.lattice_norm().powi(2))
            .sqrt()
    }

    pub fn inner(&self, other: &Self) -> T {
        self.components
            .iter()
            .zip(&other.components)
            .fold(T::zero(), |acc, (a, b)| acc + a.inner(b))
    }

    pub fn axpy(&mut self, a: T, other: &Self) {
        for (c, o) in self.components.iter_mut().zip(&other.components) {
            c.axpy(a, o);
        }
    }

    pub fn scale(&mut self, s: T) {
        for c in &mut self.components {
            c.scale(s);
        }
    }

    pub fn scaled(&self, s: T) -> Self {
        let mut out = self.clone();
        out.scale(s);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(-T::one(), other);
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(T::one(), other);
        out
    }

    pub fn dealias(&mut self) {
        for c in &mut self.components {
            c.dealias();
        }
    }

    pub fn remove_excluded_planes(&mut self) {
        for c in &mut self.components {
            c.remove_excluded_planes();
        }
    }

    pub fn max_abs(&self) -> T {
        self.components.iter().fold(T::zero(), |m, c| m.max(c.max_abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.components
            .iter()
            .all(|c| c.coeffs().iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }

    pub fn relative_distance(&self, other: &Self) -> T {
        let diff = self.sub(other).lattice_norm();
        let scale = self.lattice_norm().max(other.lattice_norm());
        if scale == T::zero() {
            diff
        } else {
            diff / scale
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn dc_mode_is_constant() {
        let g = Grid::<f64>::new(&[8, 8, 8]).unwrap();
        let mut f = SpectralField::zeros(&g);
        f.set_mode(&[0, 0, 0], Complex::new(1.0, 0.0));
        let x = f.to_physical().unwrap();
        assert!(x.iter().all(|&v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn cosine_mode_samples_cosine() {
        let g = Grid::<f64>::new(&[16, 8, 8]).unwrap();
        let mut f = SpectralField::zeros(&g);
        f.set_mode(&[1, 0, 0], Complex::new(0.5, 0.0));
        let x = f.to_physical().unwrap();
        for (flat, v) in x.iter().enumerate() {
            let x1 = g.coordinate(0, g.axis_index(flat, 0));
            assert!((v - x1.cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let g = Grid::<f64>::new(&[8, 8]).unwrap();
        let mut f = SpectralField::zeros(&g);
        f.coeffs_mut()[g.flat_of(&[1, 0])] = Complex::new(1.0, 0.0);
        assert!(matches!(f.to_physical(), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn from_fn_recovers_single_mode() {
        let g = Grid::<f64>::new(&[8, 8, 16]).unwrap();
        let f = SpectralField::from_fn(&g, |x| (2.0 * x[1] - 3.0 * x[2]).sin());
        let c = f.mode(&[0, 2, -3]);
        assert!((c - Complex::new(0.0, -0.5)).norm() < 1e-14);
        assert!((f.l2_norm() - (4.0 * PI * PI * PI).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn single_precision_round_trip() {
        let g = Grid::<f32>::new(&[8, 8, 8]).unwrap();
        let f = SpectralField::from_fn(&g, |x| x[0].cos() * x[2].sin());
        let back = SpectralField::from_physical(&g, &f.to_physical().unwrap()).unwrap();
        assert!(back.relative_distance(&f) < 1e-6);
    }
}

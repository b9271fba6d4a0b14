//! Differential operators, the Leray projector, dealiased products, the
//! advection term and the anisotropic pressure.
//!
//! Odd derivatives use the symbol `iξ` with the Nyquist wavenumber set to
//! zero on each axis, so that derivatives of real fields stay real. The
//! projector and the pressure use the same wavenumbers, which makes
//! `div ∘ leray_project` vanish to rounding on the full lattice.

use num_complex::Complex;

use super::field::{SpectralField, VectorField};
use super::grid::Grid;
use crate::{Error, Result, Scalar};

/// Relative divergence level above which [`nonlinear_term`] raises its warning flag.
pub const DIVERGENCE_WARN_TOLERANCE: f64 = 1e-8;

fn deriv_vector<T: Scalar>(grid: &Grid<T>, flat: usize, out: &mut [T]) {
    for (a, o) in out.iter_mut().enumerate() {
        *o = grid.deriv_wavenumbers(a)[grid.axis_index(flat, a)];
    }
}

fn i_times<T: Scalar>(k: T, c: Complex<T>) -> Complex<T> {
    Complex::new(-k * c.im, k * c.re)
}

/// `∂_axis f`
pub fn derivative<T: Scalar>(f: &SpectralField<T>, axis: usize) -> SpectralField<T> {
    let grid = f.grid().clone();
    let mut out = f.clone();
    let ks = grid.deriv_wavenumbers(axis);
    for (flat, c) in out.coeffs_mut().iter_mut().enumerate() {
        *c = i_times(ks[grid.axis_index(flat, axis)], *c);
    }
    out
}

/// `∇f`
pub fn gradient<T: Scalar>(f: &SpectralField<T>) -> VectorField<T> {
    let comps = (0..f.grid().dim()).map(|a| derivative(f, a)).collect();
    VectorField::new(comps).expect("one component per axis")
}

/// `Σ_i ∂_i v^i`
pub fn divergence<T: Scalar>(v: &VectorField<T>) -> SpectralField<T> {
    let grid = v.grid().clone();
    let mut out = SpectralField::zeros(&grid);
    for (a, comp) in v.components().iter().enumerate() {
        let ks = grid.deriv_wavenumbers(a);
        for (flat, (o, c)) in out.coeffs_mut().iter_mut().zip(comp.coeffs()).enumerate() {
            *o = *o + i_times(ks[grid.axis_index(flat, a)], *c);
        }
    }
    out
}

/// `div_h v^h = Σ_{i<n} ∂_i v^i`
pub fn horizontal_divergence<T: Scalar>(v: &VectorField<T>) -> SpectralField<T> {
    let grid = v.grid().clone();
    let mut out = SpectralField::zeros(&grid);
    for (a, comp) in v.horizontal().iter().enumerate() {
        let ks = grid.deriv_wavenumbers(a);
        for (flat, (o, c)) in out.coeffs_mut().iter_mut().zip(comp.coeffs()).enumerate() {
            *o = *o + i_times(ks[grid.axis_index(flat, a)], *c);
        }
    }
    out
}

/// Lattice ℓ² norm of `div v`.
pub fn divergence_residual<T: Scalar>(v: &VectorField<T>) -> T {
    divergence(v).lattice_norm()
}

/// `v − ∇Δ^{−1} div v`; the mean mode is left untouched.
pub fn leray_project<T: Scalar>(v: &VectorField<T>) -> VectorField<T> {
    let mut out = v.clone();
    leray_project_in_place(&mut out);
    out
}

pub fn leray_project_in_place<T: Scalar>(v: &mut VectorField<T>) {
    let grid = v.grid().clone();
    let dim = grid.dim();
    let mut k = vec![T::zero(); dim];
    let mut vals = vec![Complex::<T>::default(); dim];
    for flat in 0..grid.len() {
        deriv_vector(&grid, flat, &mut k);
        let k2 = k.iter().fold(T::zero(), |a, &x| a + x * x);
        if k2 == T::zero() {
            continue;
        }
        let mut dot = Complex::<T>::default();
        for a in 0..dim {
            vals[a] = v.components()[a].coeffs()[flat];
            dot = dot + vals[a] * k[a];
        }
        let dot = dot / k2;
        for a in 0..dim {
            v.components_mut()[a].coeffs_mut()[flat] = vals[a] - dot * k[a];
        }
    }
}

fn physical<T: Scalar>(v: &VectorField<T>) -> Vec<Vec<T>> {
    let comps = v.components();
    let mut out = Vec::with_capacity(comps.len());
    for pair in comps.chunks(2) {
        match pair {
            [a, b] => {
                let (x, y) = SpectralField::to_physical_pair(a, b);
                out.push(x);
                out.push(y);
            }
            [a] => out.push(a.to_physical_unchecked()),
            _ => unreachable!(),
        }
    }
    out
}

fn from_product<T: Scalar>(grid: &Grid<T>, a: &[T], b: &[T]) -> SpectralField<T> {
    let prod: Vec<T> = a.iter().zip(b).map(|(&x, &y)| x * y).collect();
    let mut f = SpectralField::from_physical(grid, &prod).expect("sizes match");
    f.dealias();
    f
}

/// Pointwise product `fg` evaluated on the grid, then truncated by the 2/3 rule.
pub fn product<T: Scalar>(f: &SpectralField<T>, g: &SpectralField<T>) -> Result<SpectralField<T>> {
    if !f.grid().same_as(g.grid()) {
        return Err(Error::GridMismatch);
    }
    let a = f.to_physical_unchecked();
    let b = g.to_physical_unchecked();
    Ok(from_product(f.grid(), &a, &b))
}

/// Advection term together with the divergence level of its input.
#[derive(Clone, Debug)]
pub struct NonlinearTerm<T: Scalar> {
    pub value: VectorField<T>,
    /// `‖div v‖_ℓ² / (‖v‖_ℓ² · max|ξ|)`
    pub relative_divergence: T,
    pub divergence_warning: bool,
}

fn relative_divergence<T: Scalar>(v: &VectorField<T>) -> T {
    let scale = v.lattice_norm() * v.grid().max_kept_wavenumber();
    if scale == T::zero() {
        T::zero()
    } else {
        divergence_residual(v) / scale
    }
}

/// `v·∇v` in advective form: `(v·∇v)^i = Σ_j v^j ∂_j v^i`, products taken
/// in physical space and truncated by the 2/3 rule.
pub fn nonlinear_term<T: Scalar>(v: &VectorField<T>) -> NonlinearTerm<T> {
    let grid = v.grid().clone();
    let dim = grid.dim();
    let rel = relative_divergence(v);
    let vel = physical(v);
    let mut comps = Vec::with_capacity(dim);
    for i in 0..dim {
        let mut acc = vec![T::zero(); grid.len()];
        for (j, vj) in vel.iter().enumerate() {
            let d = derivative(&v.components()[i], j).to_physical_unchecked();
            for ((a, &x), &y) in acc.iter_mut().zip(vj).zip(&d) {
                *a = *a + x * y;
            }
        }
        let mut f = SpectralField::from_physical(&grid, &acc).expect("sizes match");
        f.dealias();
        comps.push(f);
    }
    NonlinearTerm {
        value: VectorField::new(comps).expect("grid shared"),
        relative_divergence: rel,
        divergence_warning: rel > T::c(DIVERGENCE_WARN_TOLERANCE),
    }
}

/// Three-part anisotropic pressure and the count of modes where `−Δ_ε` has no inverse.
#[derive(Clone, Debug)]
pub struct PressureSplit<T: Scalar> {
    pub q1: SpectralField<T>,
    pub q2: SpectralField<T>,
    pub q3: SpectralField<T>,
    pub zero_symbol_modes: usize,
}

impl<T: Scalar> PressureSplit<T> {
    pub fn total(&self) -> SpectralField<T> {
        self.q1.add(&self.q2).add(&self.q3)
    }
}

/// Symbol of `−Δ_ε`: `|ξ_h|² + ε²ξ_n²` (odd-derivative wavenumbers).
fn anisotropic_laplacian_symbol<T: Scalar>(k: &[T], eps: T) -> T {
    let n = k.len();
    let h = k[..n - 1].iter().fold(T::zero(), |a, &x| a + x * x);
    h + eps * eps * k[n - 1] * k[n - 1]
}

/// Applies `(−Δ_ε)^{−1}` in place; zero-symbol modes are set to zero and counted.
pub fn invert_anisotropic_laplacian<T: Scalar>(f: &mut SpectralField<T>, eps: T) -> usize {
    let grid = f.grid().clone();
    let mut k = vec![T::zero(); grid.dim()];
    let mut zeros = 0;
    for (flat, c) in f.coeffs_mut().iter_mut().enumerate() {
        deriv_vector(&grid, flat, &mut k);
        let m = anisotropic_laplacian_symbol(&k, eps);
        if m == T::zero() {
            *c = Complex::default();
            zeros += 1;
        } else {
            *c = *c / m;
        }
    }
    zeros
}

/// Dealiased products `v^i v^j` for `i ≤ j`, packed as in [`triangle`].
fn pair_products<T: Scalar>(v: &VectorField<T>, vel: &[Vec<T>]) -> Vec<SpectralField<T>> {
    let grid = v.grid();
    let dim = grid.dim();
    let products: Vec<Vec<T>> = (0..dim)
        .flat_map(|i| (i..dim).map(move |j| (i, j)))
        .map(|(i, j)| vel[i].iter().zip(&vel[j]).map(|(&a, &b)| a * b).collect())
        .collect();
    let mut out = Vec::with_capacity(products.len());
    for pair in products.chunks(2) {
        match pair {
            [x, y] => {
                let (mut a, mut b) = SpectralField::from_physical_pair(grid, x, y);
                a.dealias();
                b.dealias();
                out.push(a);
                out.push(b);
            }
            [x] => {
                let mut a = SpectralField::from_physical(grid, x).expect("sizes match");
                a.dealias();
                out.push(a);
            }
            _ => unreachable!(),
        }
    }
    out
}

fn second_derivative_sum<T: Scalar>(
    grid: &Grid<T>,
    pairs: &[SpectralField<T>],
    select: impl Fn(usize, usize) -> Option<T>,
) -> SpectralField<T> {
    let dim = grid.dim();
    let mut out = SpectralField::zeros(grid);
    let mut k = vec![T::zero(); dim];
    for flat in 0..grid.len() {
        deriv_vector(grid, flat, &mut k);
        let mut acc = Complex::<T>::default();
        for i in 0..dim {
            for j in 0..dim {
                if let Some(w) = select(i, j) {
                    // ∂_i∂_j ↦ −k_i k_j
                    acc = acc - pairs[triangle(dim, i, j)].coeffs()[flat] * (w * k[i] * k[j]);
                }
            }
        }
        out.coeffs_mut()[flat] = acc;
    }
    out
}

/// Position of `(i, j)` in the packed upper triangle of a `dim × dim` matrix.
fn triangle(dim: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * dim - i * i.saturating_sub(1) / 2 + (j - i)
}

/// `(q¹, q², q³)` with
/// `q¹ = (−Δ_ε)^{−1} Σ_{i,j<n} ∂_i∂_j(v^iv^j)`,
/// `q² = 2(−Δ_ε)^{−1} Σ_{i<n} ∂_i∂_n(v^iv^n)`,
/// `q³ = −2(−Δ_ε)^{−1} ∂_n(v^n div_h v^h)`.
///
/// At `ε = 0` the inverse is `(−Δ_h)^{−1}` and every `ξ_h = 0` mode is dropped.
pub fn pressure_split<T: Scalar>(v: &VectorField<T>, eps: T) -> Result<PressureSplit<T>> {
    if eps < T::zero() {
        return Err(Error::InvalidArgument("ε must be nonnegative".into()));
    }
    let grid = v.grid().clone();
    let dim = grid.dim();
    let n = dim - 1;
    let vel = physical(v);
    let pairs = pair_products(v, &vel);

    let mut q1 = second_derivative_sum(&grid, &pairs, |i, j| (i < n && j < n).then_some(T::one()));
    let mut q2 = second_derivative_sum(&grid, &pairs, |i, j| {
        (i < n && j == n).then_some(T::c(2.0))
    });

    let div_h = horizontal_divergence(v).to_physical_unchecked();
    let g = from_product(&grid, &vel[n], &div_h);
    let mut q3 = derivative(&g, n);
    q3.scale(T::c(-2.0));

    let zero_symbol_modes = invert_anisotropic_laplacian(&mut q1, eps);
    invert_anisotropic_laplacian(&mut q2, eps);
    invert_anisotropic_laplacian(&mut q3, eps);
    Ok(PressureSplit {
        q1,
        q2,
        q3,
        zero_symbol_modes,
    })
}

/// Monolithic solve of `−Δ_ε q = Σ_{i,j} ∂_i∂_j(v^iv^j)`.
pub fn pressure<T: Scalar>(v: &VectorField<T>, eps: T) -> (SpectralField<T>, usize) {
    let grid = v.grid().clone();
    let vel = physical(v);
    let pairs = pair_products(v, &vel);
    let mut q = second_derivative_sum(&grid, &pairs, |_, _| Some(T::one()));
    let zeros = invert_anisotropic_laplacian(&mut q, eps);
    (q, zeros)
}

/// Right-hand side assembled from the products `v^iv^j` only:
/// `−div(v⊗v) − (∇_h q, ε²∂_n q)`.
///
/// For divergence-free band-limited `v` the conservative form equals the
/// advective form `v·∇v` after truncation.
#[derive(Clone, Debug)]
pub struct AdvectionPressure<T: Scalar> {
    pub rhs: VectorField<T>,
    /// `max_x |v(x)|` on the grid.
    pub max_speed: T,
    pub pressure: SpectralField<T>,
    pub zero_symbol_modes: usize,
}

pub fn advection_pressure<T: Scalar>(v: &VectorField<T>, eps: T) -> AdvectionPressure<T> {
    let grid = v.grid().clone();
    let dim = grid.dim();
    let n = dim - 1;
    let vel = physical(v);
    let max_speed = (0..grid.len())
        .map(|x| vel.iter().fold(T::zero(), |a, c| a + c[x] * c[x]))
        .fold(T::zero(), T::max)
        .sqrt();
    let pairs = pair_products(v, &vel);

    let mut rhs = VectorField::zeros(&grid);
    let mut q = SpectralField::zeros(&grid);
    let mut k = vec![T::zero(); dim];
    let mut zeros = 0;
    let eps2 = eps * eps;
    for flat in 0..grid.len() {
        deriv_vector(&grid, flat, &mut k);
        let sym = anisotropic_laplacian_symbol(&k, eps);
        let mut p = Complex::<T>::default();
        for i in 0..dim {
            let mut div_row = Complex::<T>::default();
            for j in 0..dim {
                let c = pairs[triangle(dim, i, j)].coeffs()[flat];
                div_row = div_row + i_times(k[j], c);
                p = p - c * (k[i] * k[j]);
            }
            rhs.components_mut()[i].coeffs_mut()[flat] = -div_row;
        }
        let qhat = if sym == T::zero() {
            zeros += 1;
            Complex::default()
        } else {
            p / sym
        };
        q.coeffs_mut()[flat] = qhat;
        for i in 0..dim {
            let w = if i == n { eps2 } else { T::one() };
            let c = &mut rhs.components_mut()[i].coeffs_mut()[flat];
            *c = *c - i_times(k[i], qhat) * w;
        }
    }
    AdvectionPressure {
        rhs,
        max_speed,
        pressure: q,
        zero_symbol_modes: zeros,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_indexing_is_dense() {
        for dim in 2..6 {
            let mut seen = vec![];
            for i in 0..dim {
                for j in i..dim {
                    seen.push(triangle(dim, i, j));
                    assert_eq!(triangle(dim, i, j), triangle(dim, j, i));
                }
            }
            let expect: Vec<usize> = (0..dim * (dim + 1) / 2).collect();
            assert_eq!(seen, expect);
        }
    }
}

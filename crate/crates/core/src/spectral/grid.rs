use std::fmt;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::{Error, Result, Scalar};

/// Periodic box `∏ [0, L_i)` sampled on `N_i` points per axis.
///
/// The last axis is vertical (`x_n`); the others are horizontal. Axis `i`
/// carries the frequency lattice `{−N_i/2+1, …, N_i/2}` scaled by `2π/L_i`.
/// Coefficient arrays are stored row-major in FFT order (index `m mod N`),
/// the last axis fastest.
#[derive(Clone)]
pub struct Grid<T: Scalar> {
    inner: Arc<GridInner<T>>,
}

struct GridInner<T: Scalar> {
    sizes: Vec<usize>,
    lengths: Vec<T>,
    strides: Vec<usize>,
    /// per axis: physical wavenumber of each FFT index
    wavenumbers: Vec<Vec<T>>,
    /// per axis: wavenumber used by odd derivatives (Nyquist set to zero)
    deriv_wavenumbers: Vec<Vec<T>>,
    /// |ξ_h| per horizontal flat index
    horizontal_radius: Vec<T>,
    mirror: Vec<usize>,
    keep_mask: Vec<bool>,
    forward: Vec<Arc<dyn Fft<T>>>,
    inverse: Vec<Arc<dyn Fft<T>>>,
}

impl<T: Scalar> Grid<T> {
    /// Box of side `2π` on every axis, so wavenumbers are integers.
    pub fn new(sizes: &[usize]) -> Result<Self> {
        let lengths = vec![T::c(2.0) * T::PI(); sizes.len()];
        Self::with_lengths(sizes, &lengths)
    }

    pub fn with_lengths(sizes: &[usize], lengths: &[T]) -> Result<Self> {
        if sizes.len() < 2 {
            return Err(Error::InvalidGrid(format!(
                "dimension must be at least 2, got {}",
                sizes.len()
            )));
        }
        if lengths.len() != sizes.len() {
            return Err(Error::InvalidGrid("one box length per axis required".into()));
        }
        for (axis, &n) in sizes.iter().enumerate() {
            if n < 8 || !n.is_power_of_two() {
                return Err(Error::InvalidGrid(format!(
                    "axis {axis}: {n} points (need a power of two ≥ 8)"
                )));
            }
        }
        if lengths.iter().any(|&l| !(l > T::zero()) || !l.is_finite()) {
            return Err(Error::InvalidGrid("box lengths must be positive".into()));
        }

        let dim = sizes.len();
        let mut strides = vec![1usize; dim];
        for a in (0..dim - 1).rev() {
            strides[a] = strides[a + 1] * sizes[a + 1];
        }

        let two_pi = T::c(2.0) * T::PI();
        let mut wavenumbers = Vec::with_capacity(dim);
        let mut deriv_wavenumbers = Vec::with_capacity(dim);
        let mut keep = Vec::with_capacity(dim);
        for a in 0..dim {
            let n = sizes[a];
            let scale = two_pi / lengths[a];
            let ks: Vec<T> = (0..n).map(|i| T::c(lattice_of(n, i) as f64) * scale).collect();
            let dks: Vec<T> = (0..n)
                .map(|i| if i == n / 2 { T::zero() } else { ks[i] })
                .collect();
            // 2/3 rule: drop any |m| > N/3
            let kp: Vec<bool> = (0..n).map(|i| 3 * lattice_of(n, i).unsigned_abs() as usize <= n).collect();
            wavenumbers.push(ks);
            deriv_wavenumbers.push(dks);
            keep.push(kp);
        }

        let h_sizes = &sizes[..dim - 1];
        let h_len: usize = h_sizes.iter().product();
        let mut horizontal_radius = Vec::with_capacity(h_len);
        let mut idx = vec![0usize; dim - 1];
        for _ in 0..h_len {
            let mut r2 = T::zero();
            for (a, &i) in idx.iter().enumerate() {
                let k = wavenumbers[a][i];
                r2 = r2 + k * k;
            }
            horizontal_radius.push(r2.sqrt());
            odometer(&mut idx, h_sizes);
        }

        let total: usize = sizes.iter().product();
        let mut mirror = Vec::with_capacity(total);
        let mut keep_mask = Vec::with_capacity(total);
        let mut idx = vec![0usize; dim];
        for _ in 0..total {
            let mut m = 0;
            let mut kept = true;
            for a in 0..dim {
                m += ((sizes[a] - idx[a]) % sizes[a]) * strides[a];
                kept &= keep[a][idx[a]];
            }
            mirror.push(m);
            keep_mask.push(kept);
            odometer(&mut idx, sizes);
        }

        let mut planner = FftPlanner::<T>::new();
        let forward = sizes.iter().map(|&n| planner.plan_fft_forward(n)).collect();
        let inverse = sizes.iter().map(|&n| planner.plan_fft_inverse(n)).collect();

        Ok(Self {
            inner: Arc::new(GridInner {
                sizes: sizes.to_vec(),
                lengths: lengths.to_vec(),
                strides,
                wavenumbers,
                deriv_wavenumbers,
                horizontal_radius,
                mirror,
                keep_mask,
                forward,
                inverse,
            }),
        })
    }

    pub fn dim(&self) -> usize {
        self.inner.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.inner.sizes
    }

    pub fn lengths(&self) -> &[T] {
        &self.inner.lengths
    }

    /// Total number of lattice points.
    pub fn len(&self) -> usize {
        self.inner.sizes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn vertical_axis(&self) -> usize {
        self.dim() - 1
    }

    /// Points per vertical line.
    pub fn vertical_len(&self) -> usize {
        self.inner.sizes[self.dim() - 1]
    }

    /// Number of horizontal points (equivalently horizontal modes).
    pub fn horizontal_len(&self) -> usize {
        self.len() / self.vertical_len()
    }

    pub fn horizontal_sizes(&self) -> &[usize] {
        &self.inner.sizes[..self.dim() - 1]
    }

    pub fn box_volume(&self) -> T {
        self.inner.lengths.iter().fold(T::one(), |acc, &l| acc * l)
    }

    pub fn cell_volume(&self) -> T {
        self.box_volume() / T::c(self.len() as f64)
    }

    pub fn vertical_length(&self) -> T {
        self.inner.lengths[self.dim() - 1]
    }

    pub fn horizontal_area(&self) -> T {
        self.box_volume() / self.vertical_length()
    }

    pub fn axis_index(&self, flat: usize, axis: usize) -> usize {
        (flat / self.inner.strides[axis]) % self.inner.sizes[axis]
    }

    pub fn strides(&self) -> &[usize] {
        &self.inner.strides
    }

    /// Signed lattice integer `m` of FFT index `i` on `axis`.
    pub fn lattice(&self, axis: usize, i: usize) -> i64 {
        lattice_of(self.inner.sizes[axis], i)
    }

    /// FFT index of lattice integer `m` (taken modulo `N`).
    pub fn index_of(&self, axis: usize, m: i64) -> usize {
        let n = self.inner.sizes[axis] as i64;
        m.rem_euclid(n) as usize
    }

    /// Flat index of a lattice point given one signed integer per axis.
    pub fn flat_of(&self, lattice: &[i64]) -> usize {
        lattice
            .iter()
            .enumerate()
            .map(|(a, &m)| self.index_of(a, m) * self.inner.strides[a])
            .sum()
    }

    /// Flat index of the mode `−ξ`.
    pub fn mirror(&self, flat: usize) -> usize {
        self.inner.mirror[flat]
    }

    pub fn wavenumbers(&self, axis: usize) -> &[T] {
        &self.inner.wavenumbers[axis]
    }

    pub fn deriv_wavenumbers(&self, axis: usize) -> &[T] {
        &self.inner.deriv_wavenumbers[axis]
    }

    /// Physical wavevector of the mode at `flat`, written into `out`.
    pub fn wavevector_into(&self, flat: usize, out: &mut [T]) {
        for (a, o) in out.iter_mut().enumerate().take(self.dim()) {
            *o = self.inner.wavenumbers[a][self.axis_index(flat, a)];
        }
    }

    pub fn wavevector(&self, flat: usize) -> Vec<T> {
        let mut v = vec![T::zero(); self.dim()];
        self.wavevector_into(flat, &mut v);
        v
    }

    /// `|ξ_h|` for a horizontal flat index (flat / N_n).
    pub fn horizontal_radius(&self) -> &[T] {
        &self.inner.horizontal_radius
    }

    /// `|ξ_n|` for each vertical index.
    pub fn vertical_radius(&self, z: usize) -> T {
        self.inner.wavenumbers[self.dim() - 1][z].abs()
    }

    /// Whether the 2/3 rule keeps the mode at `flat`.
    pub fn keeps(&self, flat: usize) -> bool {
        self.inner.keep_mask[flat]
    }

    pub fn keep_mask(&self) -> &[bool] {
        &self.inner.keep_mask
    }

    /// Largest `|ξ|` among modes kept by the 2/3 rule.
    pub fn max_kept_wavenumber(&self) -> T {
        let mut r2 = T::zero();
        for a in 0..self.dim() {
            let m = self.inner.sizes[a] / 3;
            let k = T::c(m as f64) * T::c(2.0) * T::PI() / self.inner.lengths[a];
            r2 = r2 + k * k;
        }
        r2.sqrt()
    }

    /// Physical coordinate of grid point `i` on `axis`.
    pub fn coordinate(&self, axis: usize, i: usize) -> T {
        T::c(i as f64) * self.inner.lengths[axis] / T::c(self.inner.sizes[axis] as f64)
    }

    pub(crate) fn forward_plans(&self) -> &[Arc<dyn Fft<T>>] {
        &self.inner.forward
    }

    pub(crate) fn inverse_plans(&self) -> &[Arc<dyn Fft<T>>] {
        &self.inner.inverse
    }

    /// Same sizes and box lengths.
    pub fn same_as(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.sizes == other.inner.sizes && self.inner.lengths == other.inner.lengths)
    }
}

impl<T: Scalar> PartialEq for Grid<T> {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl<T: Scalar> fmt::Debug for Grid<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("sizes", &self.inner.sizes)
            .field("lengths", &self.inner.lengths)
            .finish()
    }
}

pub(crate) fn lattice_of(n: usize, i: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Row-major increment of a multi-index, last axis fastest.
pub(crate) fn odometer(idx: &mut [usize], sizes: &[usize]) {
    for a in (0..idx.len()).rev() {
        idx[a] += 1;
        if idx[a] < sizes[a] {
            return;
        }
        idx[a] = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::<f64>::new(&[8]).is_err());
        assert!(Grid::<f64>::new(&[8, 12]).is_err());
        assert!(Grid::<f64>::new(&[4, 8]).is_err());
        assert!(Grid::<f64>::new(&[8, 8, 16]).is_ok());
    }

    #[test]
    fn lattice_runs_from_minus_half_plus_one_to_half() {
        let g = Grid::<f64>::new(&[8, 8]).unwrap();
        let ms: Vec<i64> = (0..8).map(|i| g.lattice(0, i)).collect();
        assert_eq!(ms, vec![0, 1, 2, 3, 4, -3, -2, -1]);
        assert_eq!(g.wavenumbers(0)[4], 4.0);
        assert_eq!(g.deriv_wavenumbers(0)[4], 0.0);
    }

    #[test]
    fn mirror_and_flat_agree() {
        let g = Grid::<f64>::new(&[8, 16, 8]).unwrap();
        let f = g.flat_of(&[1, -3, 2]);
        assert_eq!(g.mirror(f), g.flat_of(&[-1, 3, -2]));
        assert_eq!(g.wavevector(f), vec![1.0, -3.0, 2.0]);
    }

    #[test]
    fn stretched_vertical_box_scales_wavenumbers() {
        let two_pi = 2.0 * std::f64::consts::PI;
        let g = Grid::<f64>::with_lengths(&[8, 8, 32], &[two_pi, two_pi, 4.0 * two_pi]).unwrap();
        assert!((g.wavenumbers(2)[1] - 0.25).abs() < 1e-15);
    }
}

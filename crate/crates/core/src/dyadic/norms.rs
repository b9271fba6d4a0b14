use num_complex::Complex;

use super::partition::{DyadicPartition, Direction};
use crate::spectral::fft::transform;
use crate::spectral::{ops::derivative, SpectralField};
use crate::{Error, Result, Scalar};

/// Signature `(σ, s, p, r)` of `Ḃ^{σ,s}_{p,r}`, with an optional time exponent `ρ`
/// for `L̃^ρ_T(Ḃ^{σ,s}_{p,r})`. Infinite exponents are `T::infinity()`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesovSpec<T> {
    pub sigma: T,
    pub s: T,
    pub p: T,
    pub r: T,
    pub rho: Option<T>,
}

impl<T: Scalar> BesovSpec<T> {
    pub fn new(sigma: T, s: T, p: T, r: T) -> Self {
        Self {
            sigma,
            s,
            p,
            r,
            rho: None,
        }
    }

    pub fn with_rho(mut self, rho: T) -> Self {
        self.rho = Some(rho);
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.p >= T::one()) || !(self.r >= T::one()) {
            return Err(Error::InvalidArgument(format!(
                "need p, r ≥ 1 (got p = {}, r = {})",
                self.p, self.r
            )));
        }
        if let Some(rho) = self.rho {
            if !(rho >= T::one()) {
                return Err(Error::InvalidArgument(format!("need ρ ≥ 1 (got {rho})")));
            }
        }
        Ok(())
    }
}

/// Discrete `L^p` norm of nonnegative samples with cell weight `w`.
fn lp<T: Scalar>(values: impl Iterator<Item = T>, p: T, w: T) -> T {
    if p.is_infinite() {
        values.fold(T::zero(), T::max)
    } else if p == T::one() {
        values.fold(T::zero(), |a, x| a + x) * w
    } else if p == T::c(2.0) {
        (values.fold(T::zero(), |a, x| a + x * x) * w).sqrt()
    } else {
        (values.fold(T::zero(), |a, x| a + x.powf(p)) * w).powf(p.recip())
    }
}

/// `ℓ^r` norm of nonnegative terms.
fn lr<T: Scalar>(values: impl Iterator<Item = T>, r: T) -> T {
    lp(values, r, T::one())
}

/// `‖f‖_{L^p_h(L²_v)}` evaluated on the physical grid: a cell-weighted `L²`
/// norm along every vertical line, then a cell-weighted `L^p` norm over the
/// horizontal points.
pub fn mixed_norm<T: Scalar>(f: &SpectralField<T>, p: T) -> T {
    mixed_norm_of(&[f], p)
}

/// Mixed norm of a vector `(f_1, …, f_m)` with the pointwise Euclidean magnitude.
pub fn mixed_norm_of<T: Scalar>(fields: &[&SpectralField<T>], p: T) -> T {
    let grid = fields[0].grid();
    let nn = grid.vertical_len();
    let nh = grid.horizontal_len();
    let dz = grid.vertical_length() / T::c(nn as f64);
    let da = grid.horizontal_area() / T::c(nh as f64);
    let mut line = vec![T::zero(); nh];
    for f in fields {
        let values = f.to_physical_unchecked();
        for (acc, col) in line.iter_mut().zip(values.chunks_exact(nn)) {
            *acc = *acc + col.iter().fold(T::zero(), |a, &x| a + x * x);
        }
    }
    lp(line.into_iter().map(|s| (s * dz).sqrt()), p, da)
}

/// Table of `‖Δ_{k,j} f‖_{L^p_h(L²_v)}` over the resolvable indices.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockNorms<T> {
    k_min: i32,
    j_min: i32,
    nk: usize,
    nj: usize,
    values: Vec<T>,
}

impl<T: Scalar> BlockNorms<T> {
    pub fn zeros(k_range: (i32, i32), j_range: (i32, i32)) -> Self {
        let nk = (k_range.1 - k_range.0 + 1).max(0) as usize;
        let nj = (j_range.1 - j_range.0 + 1).max(0) as usize;
        Self {
            k_min: k_range.0,
            j_min: j_range.0,
            nk,
            nj,
            values: vec![T::zero(); nk * nj],
        }
    }

    pub fn k_range(&self) -> (i32, i32) {
        (self.k_min, self.k_min + self.nk as i32 - 1)
    }

    pub fn j_range(&self) -> (i32, i32) {
        (self.j_min, self.j_min + self.nj as i32 - 1)
    }

    pub fn get(&self, k: i32, j: i32) -> T {
        let (kk, jj) = (k - self.k_min, j - self.j_min);
        if kk < 0 || jj < 0 || kk as usize >= self.nk || jj as usize >= self.nj {
            return T::zero();
        }
        self.values[kk as usize * self.nj + jj as usize]
    }

    fn set(&mut self, k: i32, j: i32, v: T) {
        let i = (k - self.k_min) as usize * self.nj + (j - self.j_min) as usize;
        self.values[i] = v;
    }

    /// `(k, j, value)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (i32, i32, T)> + '_ {
        self.values.iter().enumerate().map(move |(i, &v)| {
            (
                self.k_min + (i / self.nj.max(1)) as i32,
                self.j_min + (i % self.nj.max(1)) as i32,
                v,
            )
        })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.k_min == other.k_min && self.j_min == other.j_min && self.nk == other.nk && self.nj == other.nj
    }

    /// `‖(2^{kσ}2^{js} b_{k,j})‖_{ℓ^r}`
    pub fn weighted_sum(&self, sigma: T, s: T, r: T) -> T {
        let two = T::c(2.0);
        lr(
            self.iter().map(|(k, j, v)| {
                if v == T::zero() {
                    T::zero()
                } else {
                    two.powf(sigma * T::c(k as f64) + s * T::c(j as f64)) * v
                }
            }),
            r,
        )
    }

    /// Entry-wise update `self = op(self, other)`.
    pub fn combine(&mut self, other: &Self, op: impl Fn(T, T) -> T) {
        assert!(self.same_shape(other), "block tables of different shape");
        for (a, &b) in self.values.iter_mut().zip(&other.values) {
            *a = op(*a, b);
        }
    }
}

/// Block norms of the vector `(M f_1, …, M f_m)` where `M` multiplies the
/// vertical frequency at index `z` by `vertical_factor[z]` (identity when
/// `None`).
///
/// The `L²_v` norm of each block is read off by Parseval along `x_n` from
/// horizontal-only inverse transforms, so no vertical transform is done.
pub fn block_norms<T: Scalar>(
    fields: &[&SpectralField<T>],
    part: &DyadicPartition<T>,
    p: T,
    vertical_factor: Option<&[T]>,
) -> Result<BlockNorms<T>> {
    let all: Vec<usize> = (0..fields.len()).collect();
    Ok(block_norm_groups(fields, &[all], part, p, vertical_factor)?.remove(0))
}

/// [`block_norms`] for several sub-vectors of `fields` at once; `groups[g]`
/// lists the members of group `g`. Each field is transformed once.
pub fn block_norm_groups<T: Scalar>(
    fields: &[&SpectralField<T>],
    groups: &[Vec<usize>],
    part: &DyadicPartition<T>,
    p: T,
    vertical_factor: Option<&[T]>,
) -> Result<Vec<BlockNorms<T>>> {
    let grid = part.grid();
    if fields.iter().any(|f| !f.grid().same_as(grid)) {
        return Err(Error::GridMismatch);
    }
    if groups.iter().flatten().any(|&i| i >= fields.len()) {
        return Err(Error::InvalidArgument("group member out of range".into()));
    }
    let dim = grid.dim();
    let nn = grid.vertical_len();
    let nh = grid.horizontal_len();
    if let Some(v) = vertical_factor {
        if v.len() != nn {
            return Err(Error::InvalidArgument("vertical factor needs one entry per vertical index".into()));
        }
    }
    let hsizes = grid.horizontal_sizes();
    let plans = &grid.inverse_plans()[..dim - 1];
    let ln = grid.vertical_length();
    let da = grid.horizontal_area() / T::c(nh as f64);

    let (j_min, j_max) = part.j_range();
    let nj = (j_max - j_min + 1).max(0) as usize;
    // per vertical index: (ring slot, L_n·φ_j(ξ_n)²·M(ξ_n)²)
    let mut columns: Vec<Vec<(usize, T)>> = vec![vec![]; nn];
    for j in j_min..=j_max {
        let (w, supp) = part.ring(Direction::Vertical, j).expect("in range");
        for &z in supp {
            let m = vertical_factor.map_or(T::one(), |v| v[z]);
            let c = w[z] * m;
            if c != T::zero() {
                columns[z].push(((j - j_min) as usize, ln * c * c));
            }
        }
    }

    let nf = fields.len();
    let mut out = vec![BlockNorms::zeros(part.k_range(), part.j_range()); groups.len()];
    // acc[(field·nj + slot)·nh + x]
    let mut acc = vec![T::zero(); nf * nj * nh];
    let mut touched = vec![false; nf * nj];
    let mut sum = vec![T::zero(); nh];
    let mut buf = vec![Complex::<T>::default(); nh];
    let (k_min, k_max) = part.k_range();
    for k in k_min..=k_max {
        let (hw, hsupp) = part.ring(Direction::Horizontal, k).expect("in range");
        acc.iter_mut().for_each(|a| *a = T::zero());
        touched.iter_mut().for_each(|t| *t = false);
        for (z, targets) in columns.iter().enumerate() {
            if targets.is_empty() {
                continue;
            }
            for (fi, f) in fields.iter().enumerate() {
                let coeffs = f.coeffs();
                buf.iter_mut().for_each(|b| *b = Complex::default());
                let mut any = false;
                for &h in hsupp {
                    let c = coeffs[h * nn + z];
                    if c.re != T::zero() || c.im != T::zero() {
                        buf[h] = c * hw[h];
                        any = true;
                    }
                }
                if !any {
                    continue;
                }
                transform(&mut buf, hsizes, plans);
                for &(jj, w) in targets {
                    let slot = fi * nj + jj;
                    touched[slot] = true;
                    let row = &mut acc[slot * nh..(slot + 1) * nh];
                    for (a, b) in row.iter_mut().zip(&buf) {
                        *a = *a + w * b.norm_sqr();
                    }
                }
            }
        }
        for (g, members) in groups.iter().enumerate() {
            for jj in 0..nj {
                if !members.iter().any(|&fi| touched[fi * nj + jj]) {
                    continue;
                }
                sum.iter_mut().for_each(|s| *s = T::zero());
                for &fi in members {
                    let slot = fi * nj + jj;
                    if touched[slot] {
                        for (s, &a) in sum.iter_mut().zip(&acc[slot * nh..(slot + 1) * nh]) {
                            *s = *s + a;
                        }
                    }
                }
                out[g].set(k, j_min + jj as i32, lp(sum.iter().map(|s| s.sqrt()), p, da));
            }
        }
    }
    Ok(out)
}

/// Reference path for [`block_norms`]: extract every block and take its
/// mixed norm in physical space.
pub fn block_norms_physical<T: Scalar>(
    fields: &[&SpectralField<T>],
    part: &DyadicPartition<T>,
    p: T,
) -> BlockNorms<T> {
    let mut out = BlockNorms::zeros(part.k_range(), part.j_range());
    let (k_min, k_max) = part.k_range();
    let (j_min, j_max) = part.j_range();
    for k in k_min..=k_max {
        for j in j_min..=j_max {
            let blocks: Vec<SpectralField<T>> = fields.iter().map(|f| part.block(f, k, j)).collect();
            let refs: Vec<&SpectralField<T>> = blocks.iter().collect();
            out.set(k, j, mixed_norm_of(&refs, p));
        }
    }
    out
}

/// `‖f‖_{Ḃ^{σ,s}_{p,r}}`; the planes `ξ_h = 0` and `ξ_n = 0` are invisible to it.
pub fn besov_norm<T: Scalar>(f: &SpectralField<T>, spec: &BesovSpec<T>, part: &DyadicPartition<T>) -> Result<T> {
    besov_norm_of(&[f], spec, part, None)
}

/// Besov norm of a vector of fields (pointwise Euclidean magnitude), with an
/// optional vertical multiplier as in [`block_norms`].
pub fn besov_norm_of<T: Scalar>(
    fields: &[&SpectralField<T>],
    spec: &BesovSpec<T>,
    part: &DyadicPartition<T>,
    vertical_factor: Option<&[T]>,
) -> Result<T> {
    spec.validate()?;
    Ok(block_norms(fields, part, spec.p, vertical_factor)?.weighted_sum(spec.sigma, spec.s, spec.r))
}

/// `‖u‖_{L̃^ρ_T(Ḃ^{σ,s}_{p,r})}` from per-sample block tables taken `dt` apart.
///
/// Finite `ρ` uses the left rectangle rule: sample `i` stands for
/// `[t_i, t_i + dt)`, and the final sample only closes the interval.
/// `ρ = ∞` takes the maximum over every sample.
pub fn chemin_lerner_from_blocks<T: Scalar>(tables: &[BlockNorms<T>], dt: T, spec: &BesovSpec<T>) -> Result<T> {
    spec.validate()?;
    let rho = spec.rho.unwrap_or_else(T::infinity);
    let Some(first) = tables.first() else {
        return Err(Error::InvalidArgument("no samples".into()));
    };
    if tables.iter().any(|t| !t.same_shape(first)) {
        return Err(Error::GridMismatch);
    }
    let mut combined = BlockNorms::zeros(first.k_range(), first.j_range());
    if rho.is_infinite() {
        for t in tables {
            combined.combine(t, T::max);
        }
    } else {
        if tables.len() < 2 {
            return Err(Error::InvalidArgument(
                "a finite time exponent needs at least two samples".into(),
            ));
        }
        if !(dt > T::zero()) {
            return Err(Error::InvalidArgument("dt must be positive".into()));
        }
        let quad = &tables[..tables.len() - 1];
        for (i, v) in combined.values.iter_mut().enumerate() {
            *v = lp(quad.iter().map(|t| t.values[i]), rho, dt);
        }
    }
    Ok(combined.weighted_sum(spec.sigma, spec.s, spec.r))
}

/// `‖u‖_{L̃^ρ_T(Ḃ^{σ,s}_{p,r})}` for samples `u(t_0), u(t_0+dt), …`.
pub fn chemin_lerner_norm<T: Scalar>(
    samples: &[SpectralField<T>],
    dt: T,
    spec: &BesovSpec<T>,
    part: &DyadicPartition<T>,
) -> Result<T> {
    let tables = samples
        .iter()
        .map(|f| block_norms(&[f], part, spec.p, None))
        .collect::<Result<Vec<_>>>()?;
    chemin_lerner_from_blocks(&tables, dt, spec)
}

/// All multi-indices `β ∈ ℕ^d` with `|β| = order`.
fn multi_indices(d: usize, order: usize) -> Vec<Vec<usize>> {
    if d == 1 {
        return vec![vec![order]];
    }
    let mut out = vec![];
    for first in 0..=order {
        for mut rest in multi_indices(d - 1, order - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Derivative-lifted norm for indices above the realization thresholds:
/// with `(n−1)/p + a < σ ≤ (n−1)/p + a + 1` and `1/2 + b < s ≤ 1/2 + b + 1`
/// (`a, b ≥ 0`), returns `Σ_{|β| = a} ‖∂_h^β ∂_n^b f‖_{Ḃ^{σ−a, s−b}_{p,r}}`.
/// Below the thresholds it is the plain [`besov_norm`].
pub fn lifted_besov_norm<T: Scalar>(f: &SpectralField<T>, spec: &BesovSpec<T>, part: &DyadicPartition<T>) -> Result<T> {
    let grid = f.grid();
    let n = grid.dim();
    let crit = T::c((n - 1) as f64) / spec.p;
    let lift = |excess: T| -> usize {
        if excess > T::zero() {
            (excess.ceil() - T::one()).to_f64_lossy().max(0.0) as usize
        } else {
            0
        }
    };
    let a = lift(spec.sigma - crit);
    let b = lift(spec.s - T::c(0.5));
    if a == 0 && b == 0 {
        return besov_norm(f, spec, part);
    }
    let mut vert = f.clone();
    for _ in 0..b {
        vert = derivative(&vert, n - 1);
    }
    let lowered = BesovSpec {
        sigma: spec.sigma - T::c(a as f64),
        s: spec.s - T::c(b as f64),
        ..*spec
    };
    let mut total = T::zero();
    for beta in multi_indices(n - 1, a) {
        let mut g = vert.clone();
        for (axis, &times) in beta.iter().enumerate() {
            for _ in 0..times {
                g = derivative(&g, axis);
            }
        }
        total = total + besov_norm(&g, &lowered, part)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;
    use std::f64::consts::PI;

    #[test]
    fn constant_field_mixed_norm() {
        let g = Grid::<f64>::new(&[8, 8, 8]).unwrap();
        let f = SpectralField::from_fn(&g, |_| 1.0);
        let l2v = (2.0 * PI).sqrt();
        assert!((mixed_norm(&f, f64::INFINITY) - l2v).abs() < 1e-13);
        for p in [1.0, 2.0, 4.0] {
            let expect = (2.0 * PI * 2.0 * PI).powf(1.0 / p) * l2v;
            assert!((mixed_norm(&f, p) - expect).abs() < 1e-12 * expect, "p = {p}");
        }
    }

    #[test]
    fn vertical_cosine_mixed_norm() {
        let g = Grid::<f64>::new(&[8, 8, 16]).unwrap();
        let f = SpectralField::from_fn(&g, |x| x[2].cos());
        assert!((mixed_norm(&f, f64::INFINITY) - PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn multi_indices_count() {
        assert_eq!(multi_indices(2, 2).len(), 3);
        assert_eq!(multi_indices(3, 2).len(), 6);
        assert!(multi_indices(3, 2).iter().all(|b| b.iter().sum::<usize>() == 2));
    }
}

use num_complex::Complex;

use super::cutoff::phi;
use crate::spectral::{Grid, SpectralField};
use crate::Scalar;

/// Direction of a one-dimensional Littlewood-Paley decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Horizontal,
    Vertical,
}

/// Ring weights of one direction: `weights[i][x] = φ(2^{−(min+i)} r_x)`.
#[derive(Clone, Debug)]
struct Rings<T> {
    min: i32,
    weights: Vec<Vec<T>>,
    support: Vec<Vec<usize>>,
}

impl<T: Scalar> Rings<T> {
    fn build(radii: &[T]) -> Self {
        let radii: Vec<f64> = radii.iter().map(|r| r.to_f64_lossy()).collect();
        let nonzero = radii.iter().copied().filter(|&r| r > 0.0);
        let r_min = nonzero.clone().fold(f64::INFINITY, f64::min);
        let r_max = nonzero.fold(0.0, f64::max);
        if r_max == 0.0 {
            return Self {
                min: 0,
                weights: vec![],
                support: vec![],
            };
        }
        // φ(2^{−k} r) ≠ 0  ⇔  2^k < r < (8/3)·2^k
        let lo = (0.75 * r_min).log2().floor() as i32 - 1;
        let hi = r_max.log2().ceil() as i32;
        let mut min = None;
        let mut weights = vec![];
        let mut support = vec![];
        for k in lo..=hi {
            let scale = 2f64.powi(-k);
            let w: Vec<f64> = radii.iter().map(|&r| if r > 0.0 { phi(r * scale) } else { 0.0 }).collect();
            let supp: Vec<usize> = (0..w.len()).filter(|&x| w[x] != 0.0).collect();
            if supp.is_empty() {
                if min.is_some() {
                    break;
                }
                continue;
            }
            min.get_or_insert(k);
            weights.push(w.into_iter().map(T::c).collect());
            support.push(supp);
        }
        Self {
            min: min.unwrap_or(0),
            weights,
            support,
        }
    }

    fn max(&self) -> i32 {
        self.min + self.weights.len() as i32 - 1
    }

    fn get(&self, k: i32) -> Option<(&[T], &[usize])> {
        if k < self.min || k > self.max() {
            return None;
        }
        let i = (k - self.min) as usize;
        Some((&self.weights[i], &self.support[i]))
    }

    /// `Σ_{k' ≤ l−1} φ(2^{−k'} r)` per point.
    fn low_pass(&self, l: i32, len: usize) -> Vec<T> {
        let mut out = vec![T::zero(); len];
        for k in self.min..l.min(self.max() + 1) {
            let (w, supp) = self.get(k).expect("in range");
            for &x in supp {
                out[x] = out[x] + w[x];
            }
        }
        out
    }

    /// `Σ_{k'=k−1}^{k+1} φ(2^{−k'} r)` per point.
    fn widened(&self, k: i32, len: usize) -> Vec<T> {
        let mut out = vec![T::zero(); len];
        for kk in k - 1..=k + 1 {
            if let Some((w, supp)) = self.get(kk) {
                for &x in supp {
                    out[x] = out[x] + w[x];
                }
            }
        }
        out
    }
}

/// Precomputed anisotropic Littlewood-Paley tables on a grid.
///
/// `Δ_k^h` multiplies by `φ(2^{−k}|ξ_h|)`, `Δ_j^v` by `φ(2^{−j}|ξ_n|)`.
/// The planes `ξ_h = 0` and `ξ_n = 0` belong to no block. Index ranges are
/// the smallest ones that cover every other lattice mode, so the blocks
/// resum to the field minus those planes.
#[derive(Clone, Debug)]
pub struct DyadicPartition<T: Scalar> {
    grid: Grid<T>,
    horizontal: Rings<T>,
    vertical: Rings<T>,
}

impl<T: Scalar> DyadicPartition<T> {
    pub fn new(grid: &Grid<T>) -> Self {
        let vr: Vec<T> = (0..grid.vertical_len()).map(|z| grid.vertical_radius(z)).collect();
        Self {
            grid: grid.clone(),
            horizontal: Rings::build(grid.horizontal_radius()),
            vertical: Rings::build(&vr),
        }
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    /// Resolvable horizontal indices `[k_min, k_max]`.
    pub fn k_range(&self) -> (i32, i32) {
        (self.horizontal.min, self.horizontal.max())
    }

    /// Resolvable vertical indices `[j_min, j_max]`.
    pub fn j_range(&self) -> (i32, i32) {
        (self.vertical.min, self.vertical.max())
    }

    pub fn range(&self, dir: Direction) -> (i32, i32) {
        match dir {
            Direction::Horizontal => self.k_range(),
            Direction::Vertical => self.j_range(),
        }
    }

    fn rings(&self, dir: Direction) -> &Rings<T> {
        match dir {
            Direction::Horizontal => &self.horizontal,
            Direction::Vertical => &self.vertical,
        }
    }

    fn len(&self, dir: Direction) -> usize {
        match dir {
            Direction::Horizontal => self.grid.horizontal_len(),
            Direction::Vertical => self.grid.vertical_len(),
        }
    }

    /// `φ(2^{−k} r)` per horizontal (or vertical) index, with its support; `None` outside the range.
    pub fn ring(&self, dir: Direction, k: i32) -> Option<(&[T], &[usize])> {
        self.rings(dir).get(k)
    }

    /// Symbol of `S_l`: `Σ_{l' ≤ l−1} φ(2^{−l'} r)` per index.
    pub fn low_pass_weights(&self, dir: Direction, l: i32) -> Vec<T> {
        self.rings(dir).low_pass(l, self.len(dir))
    }

    /// Symbol of `Δ̃_k = Δ_{k−1} + Δ_k + Δ_{k+1}`.
    pub fn widened_weights(&self, dir: Direction, k: i32) -> Vec<T> {
        self.rings(dir).widened(k, self.len(dir))
    }

    /// Symbol of a single ring as a dense table (zeros outside the range).
    pub fn ring_weights(&self, dir: Direction, k: i32) -> Vec<T> {
        match self.ring(dir, k) {
            Some((w, _)) => w.to_vec(),
            None => vec![T::zero(); self.len(dir)],
        }
    }

    /// `Δ_{k,j} f`
    pub fn block(&self, f: &SpectralField<T>, k: i32, j: i32) -> SpectralField<T> {
        match (self.ring(Direction::Horizontal, k), self.ring(Direction::Vertical, j)) {
            (Some((hw, _)), Some((vw, _))) => apply_separable(f, hw, vw),
            _ => SpectralField::zeros(f.grid()),
        }
    }

    /// `Δ_k^h f` or `Δ_j^v f`.
    pub fn block_1d(&self, f: &SpectralField<T>, dir: Direction, k: i32) -> SpectralField<T> {
        let w = self.ring_weights(dir, k);
        self.apply_1d(f, dir, &w)
    }

    /// `S_l f` in the given direction.
    pub fn low_pass(&self, f: &SpectralField<T>, l: i32, dir: Direction) -> SpectralField<T> {
        let w = self.low_pass_weights(dir, l);
        self.apply_1d(f, dir, &w)
    }

    pub(crate) fn apply_1d(&self, f: &SpectralField<T>, dir: Direction, w: &[T]) -> SpectralField<T> {
        let ones_h;
        let ones_v;
        match dir {
            Direction::Horizontal => {
                ones_v = vec![T::one(); self.grid.vertical_len()];
                apply_separable(f, w, &ones_v)
            }
            Direction::Vertical => {
                ones_h = vec![T::one(); self.grid.horizontal_len()];
                apply_separable(f, &ones_h, w)
            }
        }
    }
}

/// Multiplies the coefficient at horizontal index `h`, vertical index `z` by `hw[h]·vw[z]`.
pub fn apply_separable<T: Scalar>(f: &SpectralField<T>, hw: &[T], vw: &[T]) -> SpectralField<T> {
    let nn = vw.len();
    let mut out = f.clone();
    for (h, col) in out.coeffs_mut().chunks_exact_mut(nn).enumerate() {
        let a = hw[h];
        if a == T::zero() {
            col.fill(Complex::default());
            continue;
        }
        for (c, &b) in col.iter_mut().zip(vw) {
            *c = *c * (a * b);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_cover_the_lattice() {
        let g = Grid::<f64>::new(&[32, 32, 64]).unwrap();
        let part = DyadicPartition::new(&g);
        assert_eq!(part.k_range(), (-1, 4));
        assert_eq!(part.j_range(), (-1, 4));
        let g = Grid::<f64>::new(&[16, 16, 16]).unwrap();
        let part = DyadicPartition::new(&g);
        assert_eq!(part.k_range(), (-1, 3));
        assert_eq!(part.j_range(), (-1, 2));
    }

    #[test]
    fn unit_mode_sits_in_ring_minus_one_only() {
        let g = Grid::<f64>::new(&[16, 16, 16]).unwrap();
        let part = DyadicPartition::new(&g);
        for k in -3..6 {
            let w = part.ring_weights(Direction::Vertical, k);
            let expect = if k == -1 { 1.0 } else { 0.0 };
            assert_eq!(w[1], expect, "k = {k}");
        }
    }

    #[test]
    fn stretched_box_has_fractional_rings() {
        let two_pi = 2.0 * std::f64::consts::PI;
        let g = Grid::<f64>::with_lengths(&[8, 8, 32], &[two_pi, two_pi, 4.0 * two_pi]).unwrap();
        let part = DyadicPartition::new(&g);
        assert_eq!(part.j_range().0, -3);
    }
}

//! Seeded random fields: generic Hermitian data, divergence-free data and
//! the dyadically localized corpus used by the product-law sweeps.

use num_complex::Complex;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dyadic::{mixed_norm, DyadicPartition, Direction};
use crate::spectral::{ops::leray_project_in_place, Grid, SpectralField, VectorField};
use crate::Scalar;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn fill_hermitian<T: Scalar, R: Rng>(
    grid: &Grid<T>,
    rng: &mut R,
    mut amplitude: impl FnMut(usize) -> T,
) -> SpectralField<T> {
    let mut f = SpectralField::zeros(grid);
    for flat in 0..grid.len() {
        let m = grid.mirror(flat);
        if m < flat {
            continue;
        }
        let a = amplitude(flat);
        if a == T::zero() {
            continue;
        }
        let phase = T::c(rng.gen_range(0.0..std::f64::consts::TAU));
        let c = Complex::from_polar(a, phase);
        let coeffs = f.coeffs_mut();
        if m == flat {
            coeffs[flat] = Complex::new(c.re, T::zero());
        } else {
            coeffs[flat] = c;
            coeffs[m] = c.conj();
        }
    }
    f
}

/// Hermitian field with uniform `[−1, 1]` real and imaginary parts on every mode.
pub fn random_field<T: Scalar, R: Rng>(grid: &Grid<T>, rng: &mut R) -> SpectralField<T> {
    let mut f = SpectralField::zeros(grid);
    for flat in 0..grid.len() {
        let m = grid.mirror(flat);
        if m < flat {
            continue;
        }
        let c = Complex::new(T::c(rng.gen_range(-1.0..1.0)), T::c(rng.gen_range(-1.0..1.0)));
        let coeffs = f.coeffs_mut();
        if m == flat {
            coeffs[flat] = Complex::new(c.re, T::zero());
        } else {
            coeffs[flat] = c;
            coeffs[m] = c.conj();
        }
    }
    f
}

/// Random vector field (no structure).
pub fn random_vector<T: Scalar, R: Rng>(grid: &Grid<T>, rng: &mut R) -> VectorField<T> {
    VectorField::new((0..grid.dim()).map(|_| random_field(grid, rng)).collect()).expect("shared grid")
}

/// Random dealiased divergence-free field with spectrum `∝ e^{−|ξ|²/8}`,
/// zero on the excluded planes.
pub fn random_solenoidal<T: Scalar, R: Rng>(grid: &Grid<T>, rng: &mut R) -> VectorField<T> {
    let comps = (0..grid.dim())
        .map(|_| {
            fill_hermitian(grid, rng, |flat| {
                let k = grid.wavevector(flat);
                let r2 = k.iter().fold(T::zero(), |a, &x| a + x * x);
                (-r2 / T::c(8.0)).exp()
            })
        })
        .collect();
    let mut v = VectorField::new(comps).expect("shared grid");
    v.dealias();
    v.remove_excluded_planes();
    leray_project_in_place(&mut v);
    v
}

/// Random-phase field supported on the single block `(k, j)`, amplitude
/// `φ(2^{−k}|ξ_h|)·φ(2^{−j}|ξ_n|)`. Zero when the block is unresolvable.
pub fn localized_bump<T: Scalar, R: Rng>(part: &DyadicPartition<T>, k: i32, j: i32, rng: &mut R) -> SpectralField<T> {
    let grid = part.grid();
    let nn = grid.vertical_len();
    let hw = part.ring_weights(Direction::Horizontal, k);
    let vw = part.ring_weights(Direction::Vertical, j);
    fill_hermitian(grid, rng, |flat| hw[flat / nn] * vw[flat % nn])
}

/// Largest ring index whose support stays strictly inside radius `limit`.
fn max_ring_below<T: Scalar>(part: &DyadicPartition<T>, dir: Direction, limit: f64) -> i32 {
    let (lo, hi) = part.range(dir);
    let mut best = lo;
    for k in lo..=hi {
        // supp φ(2^{−k}·) = [2^k, (8/3)·2^k]
        if 2f64.powi(k) * 8.0 / 3.0 < limit {
            best = k;
        }
    }
    best
}

/// Generator of the product-law corpus: sums of 1–8 localized bumps at
/// random rings, each with random phases and unit `L^p_h(L²_v)` norm.
///
/// Rings are restricted to frequencies below a quarter of the grid size on
/// every axis, so the grid product of two corpus fields is alias-free.
pub struct Corpus<'a, T: Scalar> {
    part: &'a DyadicPartition<T>,
    p: T,
    k_hi: i32,
    j_hi: i32,
    rng: SeededRng,
}

impl<'a, T: Scalar> Corpus<'a, T> {
    pub fn new(part: &'a DyadicPartition<T>, p: T, seed: u64) -> Self {
        let grid = part.grid();
        let sizes = grid.sizes();
        let n = grid.dim();
        let two_pi = std::f64::consts::TAU;
        let quarter = |a: usize| sizes[a] as f64 / 4.0 * two_pi / grid.lengths()[a].to_f64_lossy();
        let h_limit = (0..n - 1).map(quarter).fold(f64::INFINITY, f64::min);
        let v_limit = quarter(n - 1);
        Self {
            part,
            p,
            k_hi: max_ring_below(part, Direction::Horizontal, h_limit),
            j_hi: max_ring_below(part, Direction::Vertical, v_limit),
            rng: rng(seed),
        }
    }

    /// Highest horizontal and vertical ring the corpus draws from.
    pub fn ring_limits(&self) -> (i32, i32) {
        (self.k_hi, self.j_hi)
    }

    /// A single normalized bump at block `(k, j)`.
    pub fn bump(&mut self, k: i32, j: i32) -> SpectralField<T> {
        let mut b = localized_bump(self.part, k, j, &mut self.rng);
        let norm = mixed_norm(&b, self.p);
        if norm > T::zero() {
            b.scale(norm.recip());
        }
        b
    }

    pub fn next_field(&mut self) -> SpectralField<T> {
        let (k_lo, _) = self.part.k_range();
        let (j_lo, _) = self.part.j_range();
        let count = self.rng.gen_range(1..=8);
        let mut f = SpectralField::zeros(self.part.grid());
        for _ in 0..count {
            let k = self.rng.gen_range(k_lo..=self.k_hi);
            let j = self.rng.gen_range(j_lo..=self.j_hi);
            let b = self.bump(k, j);
            f.axpy(T::one(), &b);
        }
        f
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::divergence;

    #[test]
    fn solenoidal_is_divergence_free_and_real() {
        let g = Grid::<f64>::new(&[8, 8, 8]).unwrap();
        let v = random_solenoidal(&g, &mut rng(1));
        assert!(divergence(&v).lattice_norm() < 1e-14);
        assert!(v.components().iter().all(|c| c.hermitian_residual() < 1e-15));
    }

    #[test]
    fn corpus_is_reproducible_and_band_limited() {
        let g = Grid::<f64>::new(&[32, 32, 32]).unwrap();
        let part = DyadicPartition::new(&g);
        let mut a = Corpus::new(&part, 2.0, 7);
        let mut b = Corpus::new(&part, 2.0, 7);
        assert_eq!(a.ring_limits(), (1, 1));
        for _ in 0..3 {
            let (fa, fb) = (a.next_field(), b.next_field());
            assert_eq!(fa.coeffs(), fb.coeffs());
            for (flat, c) in fa.coeffs().iter().enumerate() {
                if c.norm() > 0.0 {
                    assert!(g.wavevector(flat).iter().all(|x| x.abs() < 8.0));
                }
            }
        }
    }
}

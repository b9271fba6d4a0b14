//! Bony paraproduct decomposition, in one direction and the nine-term
//! anisotropic version, plus the empirical constants of the product laws.
//!
//! With `S_{k−1} = Σ_{l ≤ k−2} Δ_l` and `Δ̃_k = Δ_{k−1} + Δ_k + Δ_{k+1}`:
//!
//! ```text
//! T(f,g) = Σ_k S_{k−1}f Δ_k g,   T̃(f,g) = Σ_k Δ_k f S_{k−1}g,   R(f,g) = Σ_k Δ_k f Δ̃_k g.
//! ```
//!
//! Each pair `(Δ_l f, Δ_k g)` lands in exactly one of the three sums, so the
//! split reproduces the product of the parts of `f` and `g` that the
//! decomposition sees. Products are formed on the grid and truncated by the
//! 2/3 rule.

use crate::dyadic::{apply_separable, besov_norm_of, BesovSpec, Direction, DyadicPartition};
use crate::spectral::SpectralField;
use crate::weight::weight_table;
use crate::{Error, Result, Scalar};

/// One of the three Bony pieces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Piece {
    /// `T`: low frequencies of `f` against the block of `g`.
    Para,
    /// `T̃`: the block of `f` against low frequencies of `g`.
    ParaSwapped,
    /// `R`: comparable frequencies.
    Remainder,
}

impl Piece {
    pub const ALL: [Piece; 3] = [Piece::Para, Piece::ParaSwapped, Piece::Remainder];

    fn index(self) -> usize {
        match self {
            Piece::Para => 0,
            Piece::ParaSwapped => 1,
            Piece::Remainder => 2,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Piece::Para => "T",
            Piece::ParaSwapped => "T~",
            Piece::Remainder => "R",
        }
    }

    /// Filters applied to `(f, g)` at index `k`.
    fn filters<T: Scalar>(self, part: &DyadicPartition<T>, dir: Direction, k: i32) -> (Vec<T>, Vec<T>) {
        match self {
            Piece::Para => (part.low_pass_weights(dir, k - 1), part.ring_weights(dir, k)),
            Piece::ParaSwapped => (part.ring_weights(dir, k), part.low_pass_weights(dir, k - 1)),
            Piece::Remainder => (part.ring_weights(dir, k), part.widened_weights(dir, k)),
        }
    }
}

fn ones<T: Scalar>(n: usize) -> Vec<T> {
    vec![T::one(); n]
}

fn accumulate<T: Scalar>(acc: &mut [T], f: &SpectralField<T>, g: &SpectralField<T>) {
    if f.is_zero() || g.is_zero() {
        return;
    }
    let a = f.to_physical_unchecked();
    let b = g.to_physical_unchecked();
    for ((o, x), y) in acc.iter_mut().zip(a).zip(b) {
        *o = *o + x * y;
    }
}

fn finish<T: Scalar>(f: &SpectralField<T>, acc: &[T]) -> SpectralField<T> {
    let mut out = SpectralField::from_physical(f.grid(), acc).expect("sizes match");
    out.dealias();
    out
}

/// `(T, T̃, R)` of the product `fg` in one direction.
pub fn bony_split_axis<T: Scalar>(
    f: &SpectralField<T>,
    g: &SpectralField<T>,
    dir: Direction,
    part: &DyadicPartition<T>,
) -> Result<[SpectralField<T>; 3]> {
    let grid = part.grid();
    if !f.grid().same_as(grid) || !g.grid().same_as(grid) {
        return Err(Error::GridMismatch);
    }
    let (lo, hi) = part.range(dir);
    let mut accs = vec![vec![T::zero(); grid.len()]; 3];
    for piece in Piece::ALL {
        for k in lo..=hi {
            let (wf, wg) = piece.filters(part, dir, k);
            let (fk, gk) = match dir {
                Direction::Horizontal => {
                    let o = ones(grid.vertical_len());
                    (apply_separable(f, &wf, &o), apply_separable(g, &wg, &o))
                }
                Direction::Vertical => {
                    let o = ones(grid.horizontal_len());
                    (apply_separable(f, &o, &wf), apply_separable(g, &o, &wg))
                }
            };
            accumulate(&mut accs[piece.index()], &fk, &gk);
        }
    }
    Ok([finish(f, &accs[0]), finish(f, &accs[1]), finish(f, &accs[2])])
}

/// The nine terms `X^h Y^v(f, g)` of the anisotropic decomposition.
#[derive(Clone, Debug)]
pub struct BonyTerms<T: Scalar> {
    terms: Vec<SpectralField<T>>,
}

impl<T: Scalar> BonyTerms<T> {
    pub fn get(&self, horizontal: Piece, vertical: Piece) -> &SpectralField<T> {
        &self.terms[3 * horizontal.index() + vertical.index()]
    }

    /// `(name, term)` pairs in the order `T^hT^v, T^hT̃^v, T^hR^v, T̃^hT^v, …, R^hR^v`.
    pub fn iter(&self) -> impl Iterator<Item = (String, &SpectralField<T>)> {
        Piece::ALL.into_iter().flat_map(move |h| {
            Piece::ALL
                .into_iter()
                .map(move |v| (format!("{}h{}v", h.symbol(), v.symbol()), self.get(h, v)))
        })
    }

    pub fn sum(&self) -> SpectralField<T> {
        let mut out = SpectralField::zeros(self.terms[0].grid());
        for t in &self.terms {
            out.axpy(T::one(), t);
        }
        out
    }
}

/// Nine-term split `fg = Σ_{X,Y ∈ {T, T̃, R}} X^h Y^v(f, g)`, e.g.
/// `T^hT^v(f,g) = Σ_{k,j} S^h_{k−1}S^v_{j−1}f Δ_{k,j}g`.
pub fn bony_split_2d<T: Scalar>(
    f: &SpectralField<T>,
    g: &SpectralField<T>,
    part: &DyadicPartition<T>,
) -> Result<BonyTerms<T>> {
    let grid = part.grid();
    if !f.grid().same_as(grid) || !g.grid().same_as(grid) {
        return Err(Error::GridMismatch);
    }
    let (k_lo, k_hi) = part.k_range();
    let (j_lo, j_hi) = part.j_range();
    let mut terms = Vec::with_capacity(9);
    for hp in Piece::ALL {
        let hfilters: Vec<_> = (k_lo..=k_hi).map(|k| hp.filters(part, Direction::Horizontal, k)).collect();
        for vp in Piece::ALL {
            let mut acc = vec![T::zero(); grid.len()];
            for (hf, hg) in &hfilters {
                for j in j_lo..=j_hi {
                    let (vf, vg) = vp.filters(part, Direction::Vertical, j);
                    let fk = apply_separable(f, hf, &vf);
                    if fk.is_zero() {
                        continue;
                    }
                    let gk = apply_separable(g, hg, &vg);
                    accumulate(&mut acc, &fk, &gk);
                }
            }
            terms.push(finish(f, &acc));
        }
    }
    Ok(BonyTerms { terms })
}

/// Grid product without truncation; exact when both factors live below a
/// quarter of the grid on every axis.
pub fn grid_product<T: Scalar>(f: &SpectralField<T>, g: &SpectralField<T>) -> Result<SpectralField<T>> {
    if !f.grid().same_as(g.grid()) {
        return Err(Error::GridMismatch);
    }
    let a = f.to_physical_unchecked();
    let b = g.to_physical_unchecked();
    let prod: Vec<T> = a.iter().zip(&b).map(|(&x, &y)| x * y).collect();
    SpectralField::from_physical(f.grid(), &prod)
}

/// Checks `σ₁, σ₂ ≤ (n−1)/p` and `σ₁ + σ₂ > (n−1)·max(0, 2/p − 1)`.
pub fn product_law_admissible<T: Scalar>(n: usize, sigma1: T, sigma2: T, p: T) -> Result<()> {
    let d = T::c((n - 1) as f64);
    let crit = d / p;
    let floor = d * (T::c(2.0) / p - T::one()).max(T::zero());
    if sigma1 > crit || sigma2 > crit {
        return Err(Error::Inadmissible(format!(
            "product law needs σ1, σ2 ≤ (n−1)/p = {crit} (got {sigma1}, {sigma2})"
        )));
    }
    if !(sigma1 + sigma2 > floor) {
        return Err(Error::Inadmissible(format!(
            "product law needs σ1 + σ2 > (n−1)·max(0, 2/p − 1) = {floor} (got {})",
            sigma1 + sigma2
        )));
    }
    Ok(())
}

fn ratio_with<T: Scalar>(
    f: &SpectralField<T>,
    g: &SpectralField<T>,
    sigma1: T,
    sigma2: T,
    p: T,
    part: &DyadicPartition<T>,
    factor: Option<&[T]>,
) -> Result<T> {
    let n = part.grid().dim();
    let half = T::c(0.5);
    let one = T::one();
    let fg = grid_product(f, g)?;
    let crit = T::c((n - 1) as f64) / p;
    let num = besov_norm_of(&[&fg], &BesovSpec::new(sigma1 + sigma2 - crit, half, p, one), part, factor)?;
    let nf = besov_norm_of(&[f], &BesovSpec::new(sigma1, half, p, one), part, factor)?;
    let ng = besov_norm_of(&[g], &BesovSpec::new(sigma2, half, p, one), part, factor)?;
    let den = nf * ng;
    if !(den >= T::c(1e-14)) {
        return Err(Error::DegenerateRatio(den.to_f64_lossy()));
    }
    Ok(num / den)
}

/// `‖fg‖_{Ḃ^{σ₁+σ₂−(n−1)/p, 1/2}_{p,1}} / (‖f‖_{Ḃ^{σ₁,1/2}_{p,1}} ‖g‖_{Ḃ^{σ₂,1/2}_{p,1}})`,
/// the empirical constant of the product law. The product is the exact grid
/// product (see [`grid_product`]).
pub fn product_law_ratio<T: Scalar>(
    f: &SpectralField<T>,
    g: &SpectralField<T>,
    sigma1: T,
    sigma2: T,
    p: T,
    part: &DyadicPartition<T>,
) -> Result<T> {
    product_law_admissible(part.grid().dim(), sigma1, sigma2, p)?;
    ratio_with(f, g, sigma1, sigma2, p, part, None)
}

/// [`product_law_ratio`] with every norm taken after the weight `e^{radius|ξ_n|}`.
pub fn weighted_product_law_ratio<T: Scalar>(
    f: &SpectralField<T>,
    g: &SpectralField<T>,
    sigma1: T,
    sigma2: T,
    p: T,
    radius: T,
    part: &DyadicPartition<T>,
) -> Result<T> {
    if radius < T::zero() {
        return Err(Error::InvalidArgument("radius must be nonnegative".into()));
    }
    product_law_admissible(part.grid().dim(), sigma1, sigma2, p)?;
    let table = weight_table(part.grid(), radius)?;
    ratio_with(f, g, sigma1, sigma2, p, part, Some(&table))
}

/// Ratios for `f = g` a normalized bump at horizontal ring `k` (vertical ring
/// 0), for every `k` from `k_min` to `k_max`. No admissibility check: this is
/// the demonstration that the law fails when `σ₁ + σ₂` is too small.
pub fn adversarial_ratios<T: Scalar>(
    part: &DyadicPartition<T>,
    sigma1: T,
    sigma2: T,
    p: T,
    k_max: i32,
    seed: u64,
) -> Result<Vec<(i32, T)>> {
    let mut corpus = crate::random::Corpus::new(part, p, seed);
    let (k_lo, _) = part.k_range();
    let mut out = vec![];
    for k in k_lo..=k_max {
        let f = corpus.bump(k, 0);
        out.push((k, ratio_with(&f, &f, sigma1, sigma2, p, part, None)?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn admissibility() {
        assert!(product_law_admissible(3, 1.5, 1.5, 1.0).is_ok());
        assert!(product_law_admissible(3, 1.0, 1.0, 2.0).is_ok());
        assert!(product_law_admissible(3, 1.0, 1.0, 1.0).is_err());
        assert!(product_law_admissible(3, 2.5, 1.0, 1.0).is_err());
        assert!(product_law_admissible(3, -0.5, 0.2, 2.0).is_err());
    }

    #[test]
    fn piece_names() {
        let names: Vec<String> = Piece::ALL
            .iter()
            .flat_map(|h| Piece::ALL.iter().map(move |v| format!("{}h{}v", h.symbol(), v.symbol())))
            .collect();
        assert_eq!(names[0], "ThTv");
        assert_eq!(names[8], "RhRv");
    }
}

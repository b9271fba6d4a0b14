//! The Littlewood-Paley profile pair `(χ, φ)`.
//!
//! `χ = 1` on `[0, 1]`, `χ = 0` on `[4/3, ∞)`, and in between it falls as
//! the normalized running integral of the bump `exp(1 − 1/(1−t²))` centred
//! at `7/6`. The ring profile `φ(r) = χ(r/2) − χ(r)` is supported in
//! `[1, 8/3]` and the family `φ(2^{−j}·)` telescopes to `1` on `r > 0`.

use std::sync::OnceLock;

const LOWER: f64 = 1.0;
const UPPER: f64 = 4.0 / 3.0;
const CELLS: usize = 1024;

fn bump(u: f64) -> f64 {
    let t = (u - 7.0 / 6.0) * 6.0;
    if t.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - t * t)).exp()
    }
}

/// Five-point Gauss-Legendre rule for `∫_a^b bump`; exact to rounding on
/// one table cell.
fn gauss(a: f64, b: f64) -> f64 {
    let r = (10.0f64 / 7.0).sqrt();
    let (x1, x2) = ((5.0 - 2.0 * r).sqrt() / 3.0, (5.0 + 2.0 * r).sqrt() / 3.0);
    let s70 = 70.0f64.sqrt();
    let (w1, w2) = ((322.0 + 13.0 * s70) / 900.0, (322.0 - 13.0 * s70) / 900.0);
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    let f = |x: f64| bump(m + h * x);
    h * (128.0 / 225.0 * f(0.0) + w1 * (f(x1) + f(-x1)) + w2 * (f(x2) + f(-x2)))
}

/// Running integral of the bump at the cell nodes of `[LOWER, UPPER]`.
fn table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let h = (UPPER - LOWER) / CELLS as f64;
        let mut acc = vec![0.0; CELLS + 1];
        for i in 0..CELLS {
            let a = LOWER + h * i as f64;
            acc[i + 1] = acc[i] + gauss(a, a + h);
        }
        acc
    })
}

/// Low-frequency cutoff `χ(r)`.
pub fn chi(r: f64) -> f64 {
    let r = r.abs();
    if r <= LOWER {
        1.0
    } else if r >= UPPER {
        0.0
    } else {
        let acc = table();
        let h = (UPPER - LOWER) / CELLS as f64;
        let i = (((r - LOWER) / h) as usize).min(CELLS - 1);
        let node = LOWER + h * i as f64;
        let partial = acc[i] + gauss(node, r);
        (1.0 - partial / acc[CELLS]).clamp(0.0, 1.0)
    }
}

/// Ring profile `φ(r) = χ(r/2) − χ(r)`.
pub fn phi(r: f64) -> f64 {
    chi(r / 2.0) - chi(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_plateaus() {
        assert_eq!(chi(0.0), 1.0);
        assert_eq!(chi(1.0), 1.0);
        assert_eq!(chi(4.0 / 3.0), 0.0);
        assert_eq!(chi(7.0), 0.0);
        assert!((chi(7.0 / 6.0) - 0.5).abs() < 1e-8, "symmetric bump gives χ(7/6) = 1/2");
    }

    #[test]
    fn chi_is_monotone() {
        let mut prev = 1.0;
        for i in 0..=1000 {
            let r = 0.9 + 0.5 * i as f64 / 1000.0;
            let c = chi(r);
            assert!(c <= prev + 1e-15);
            prev = c;
        }
    }

    #[test]
    fn phi_support() {
        for i in 0..=4000 {
            let r = 4.0 * i as f64 / 4000.0;
            if r <= 1.0 || r >= 8.0 / 3.0 {
                assert_eq!(phi(r), 0.0, "r = {r}");
            } else if r > 1.01 && r < 8.0 / 3.0 - 0.02 {
                assert!(phi(r) > 0.0, "r = {r}");
            }
        }
        assert_eq!(phi(1.5), 1.0);
    }

    #[test]
    fn telescoping_sum() {
        for &r in &[1e-3, 0.37, 1.0, 1.2, 3.0, 5.5, 17.0, 1234.5] {
            let s: f64 = (-20..=20).map(|j| phi(r * 2f64.powi(-j))).sum();
            assert!((s - 1.0).abs() < 1e-14, "r = {r}: {s}");
        }
    }
}

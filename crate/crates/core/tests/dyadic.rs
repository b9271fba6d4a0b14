use anslab_core::dyadic::{besov_norm, BesovSpec, Direction, DyadicPartition};
use anslab_core::paraproduct::{
    adversarial_ratios, bony_split_2d, bony_split_axis, product_law_ratio, weighted_product_law_ratio,
};
use anslab_core::random::{random_field, rng, Corpus};
use anslab_core::spectral::ops::product;
use anslab_core::spectral::{Grid, SpectralField};
use proptest::prelude::*;

fn setup() -> (Grid<f64>, DyadicPartition<f64>) {
    let g = Grid::new(&[16, 16, 16]).unwrap();
    let p = DyadicPartition::new(&g);
    (g, p)
}

fn planeless(g: &Grid<f64>, seed: u64) -> SpectralField<f64> {
    let mut f = random_field(g, &mut rng(seed));
    f.remove_excluded_planes();
    f
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn blocks_resum_to_the_field(seed in any::<u64>()) {
        let (g, part) = setup();
        let f = planeless(&g, seed);
        let (klo, khi) = part.k_range();
        let (jlo, jhi) = part.j_range();
        let mut sum = SpectralField::zeros(&g);
        for k in klo..=khi {
            for j in jlo..=jhi {
                sum.axpy(1.0, &part.block(&f, k, j));
            }
        }
        prop_assert!(sum.relative_distance(&f) < 1e-13);
    }

    #[test]
    fn distant_blocks_are_orthogonal(seed in any::<u64>(), k in -1i32..4, l in -1i32..4) {
        prop_assume!((k - l).abs() >= 2);
        let (g, part) = setup();
        let f = random_field(&g, &mut rng(seed));
        for dir in [Direction::Horizontal, Direction::Vertical] {
            prop_assert!(part.block_1d(&part.block_1d(&f, dir, k), dir, l).is_zero());
        }
    }

    #[test]
    fn bony_pieces_reconstruct_the_product(seed in any::<u64>()) {
        let (g, part) = setup();
        let f = planeless(&g, seed);
        let h = planeless(&g, seed ^ 7);
        let fg = product(&f, &h).unwrap();
        prop_assert!(bony_split_2d(&f, &h, &part).unwrap().sum().relative_distance(&fg) < 1e-10);
        for dir in [Direction::Horizontal, Direction::Vertical] {
            let [t, ts, r] = bony_split_axis(&f, &h, dir, &part).unwrap();
            prop_assert!(t.add(&ts).add(&r).relative_distance(&fg) < 1e-10);
        }
    }

    #[test]
    fn besov_norm_is_homogeneous(seed in any::<u64>(), c in 0.1f64..10.0) {
        let (g, part) = setup();
        let f = planeless(&g, seed);
        let spec = BesovSpec::new(0.5, 0.5, 2.0, 1.0);
        let a = besov_norm(&f, &spec, &part).unwrap();
        let b = besov_norm(&f.scaled(c), &spec, &part).unwrap();
        prop_assert!((b - c * a).abs() < 1e-12 * b);
    }
}

#[test]
fn weighted_ratio_at_radius_zero_is_the_plain_ratio() {
    let (_, part) = setup();
    let mut corpus = Corpus::new(&part, 2.0, 11);
    for _ in 0..4 {
        let (f, h) = (corpus.next_field(), corpus.next_field());
        let plain = product_law_ratio(&f, &h, 1.0, 1.0, 2.0, &part).unwrap();
        let weighted = weighted_product_law_ratio(&f, &h, 1.0, 1.0, 2.0, 0.0, &part).unwrap();
        assert_eq!(plain.to_bits(), weighted.to_bits());
        let r = weighted_product_law_ratio(&f, &h, 1.0, 1.0, 2.0, 0.1, &part).unwrap();
        assert!(r.is_finite() && r > 0.0);
    }
}

#[test]
fn inadmissible_indices_are_rejected() {
    let (_, part) = setup();
    let mut corpus = Corpus::new(&part, 2.0, 1);
    let f = corpus.next_field();
    assert!(product_law_ratio(&f, &f, -0.5, -0.5, 2.0, &part).is_err());
}

/// Below the product-law threshold the constant is not uniform in the ring
/// index. Demonstration only: the ratios are printed, not bounded.
#[test]
fn adversarial_ratios_are_reported() {
    let g = Grid::new(&[64, 64, 16]).unwrap();
    let part = DyadicPartition::new(&g);
    let ratios = adversarial_ratios::<f64>(&part, -0.75, -0.75, 2.0, 4, 5).unwrap();
    assert!(!ratios.is_empty());
    for (k, r) in &ratios {
        println!("k = {k}: ratio {r:.4e}");
        assert!(r.is_finite());
    }
}

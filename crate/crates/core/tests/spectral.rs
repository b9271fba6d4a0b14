use anslab_core::random::{random_field, random_solenoidal, random_vector, rng};
use anslab_core::solver::rhs;
use anslab_core::spectral::ops::{divergence_residual, pressure};
use anslab_core::spectral::{divergence, gradient, leray_project, nonlinear_term, pressure_split, Grid, SpectralField, VectorField};
use proptest::prelude::*;

fn grid() -> Grid<f64> {
    Grid::new(&[8, 8, 16]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn leray_is_an_idempotent_solenoidal_projector(seed in any::<u64>()) {
        let g = grid();
        let v = random_vector(&g, &mut rng(seed));
        let pv = leray_project(&v);
        prop_assert!(leray_project(&pv).relative_distance(&pv) < 1e-13);
        prop_assert!(divergence_residual(&pv) < 1e-12 * pv.lattice_norm());
        let phi = random_field(&g, &mut rng(seed ^ 1));
        let grad = gradient(&phi);
        prop_assert!(leray_project(&grad).lattice_norm() < 1e-13 * grad.lattice_norm());
    }

    #[test]
    fn parseval(seed in any::<u64>()) {
        let g = grid();
        let f = random_field(&g, &mut rng(seed));
        let x = f.to_physical().unwrap();
        let physical = x.iter().map(|v| v * v).sum::<f64>() / g.len() as f64;
        let spectral: f64 = f.coeffs().iter().map(|c| c.norm_sqr()).sum();
        prop_assert!((physical - spectral).abs() < 1e-12 * spectral);
    }

    #[test]
    fn pressure_split_matches_monolithic(seed in any::<u64>(), eps in prop::sample::select(vec![1.0, 0.5, 0.25, 1e-3])) {
        let g = grid();
        let v = random_solenoidal(&g, &mut rng(seed));
        let split = pressure_split(&v, eps).unwrap().total();
        let (q, _) = pressure(&v, eps);
        prop_assert!(split.relative_distance(&q) < 1e-10);
    }

    #[test]
    fn rhs_produces_no_divergence(seed in any::<u64>(), eps in prop::sample::select(vec![1.0, 0.25, 1e-3])) {
        let g = grid();
        let mut v = random_solenoidal(&g, &mut rng(seed));
        v.dealias();
        v.scale(1e-2);
        let r = rhs(&v, eps);
        prop_assert!(divergence(&r.value).lattice_norm() < 1e-10);
    }

    #[test]
    fn advection_is_energy_neutral(seed in any::<u64>()) {
        let g = grid();
        let mut v = random_solenoidal(&g, &mut rng(seed));
        v.dealias();
        let nl = nonlinear_term(&v).value;
        let scale = v.lattice_norm().powi(3) * g.max_kept_wavenumber();
        prop_assert!(nl.inner(&v).abs() < 1e-10 * scale);
    }
}

#[test]
fn shear_is_steady_for_the_inviscid_part() {
    let g = grid();
    let shear = SpectralField::from_fn(&g, |x: &[f64]| x[1].sin());
    let v = VectorField::new(vec![shear, SpectralField::zeros(&g), SpectralField::zeros(&g)]).unwrap();
    for eps in [1.0, 0.25, 0.0] {
        assert!(rhs(&v, eps).value.lattice_norm() < 1e-15);
    }
}

#[test]
fn limiting_vertical_equation_has_no_pressure() {
    let g = grid();
    let mut v = random_solenoidal(&g, &mut rng(3));
    v.dealias();
    let r = rhs(&v, 0.0);
    let advective = nonlinear_term(&v).value;
    let expect = advective.vertical().scaled(-1.0);
    assert!(r.value.vertical().relative_distance(&expect) < 1e-12);
}

use anslab_core::solver::{
    compute_psi, compute_xy, largeness_meter, log_times, make_initial_family, Snapshot, Solver, SolverConfig, Verdict,
};
use anslab_core::spectral::ops::divergence_residual;
use anslab_core::spectral::{Grid, SpectralField, VectorField};

fn small(t_end: f64) -> SolverConfig<f64> {
    SolverConfig {
        sizes: vec![16, 16, 32],
        t_end,
        dt: 1e-3,
        snapshot_every: 1,
        ..SolverConfig::default()
    }
}

fn run(cfg: SolverConfig<f64>, v0: Option<VectorField<f64>>) -> (Solver<f64>, Vec<Snapshot<f64>>, Verdict) {
    let mut solver = match v0 {
        Some(v) => Solver::with_initial(cfg, v).unwrap(),
        None => Solver::new(cfg).unwrap(),
    };
    let mut snaps = vec![];
    let out = solver
        .run(|s| {
            snaps.push(s.clone());
            Ok(())
        })
        .unwrap();
    (solver, snaps, out.verdict)
}

#[test]
fn offline_functionals_match_the_online_accumulators() {
    let (solver, snaps, verdict) = run(small(0.02), None);
    assert_eq!(verdict, Verdict::Completed);
    let part = solver.partition();
    let last = solver.state().trace.last().unwrap();
    let psi = compute_psi(&snaps, 1.0, part).unwrap();
    assert!((psi - last.psi).abs() < 1e-10 * last.psi, "{psi} vs {}", last.psi);
    let (x, y) = compute_xy(&snaps, 1.0, part).unwrap();
    assert!((x - last.x).abs() < 1e-10 * last.x);
    assert!((y - last.y).abs() < 1e-10 * last.y);
}

#[test]
fn theta_is_the_integral_of_the_logged_rates() {
    let (solver, _, _) = run(small(0.02), None);
    let trace = &solver.state().trace;
    for (row, theta) in trace.rows.iter().zip(trace.theta_from_rates()) {
        assert!((row.theta - theta).abs() <= 1e-12 * theta.max(1e-300));
        assert!((row.radius - (1.0 - 20.0 * row.theta)).abs() < 1e-12);
    }
}

#[test]
fn zero_data_stays_zero() {
    let g = Grid::new(&[16, 16, 32]).unwrap();
    let (solver, _, verdict) = run(small(0.005), Some(VectorField::zeros(&g)));
    assert_eq!(verdict, Verdict::Completed);
    for row in &solver.state().trace.rows {
        assert_eq!((row.psi, row.x, row.y, row.energy, row.theta), (0.0, 0.0, 0.0, 0.0, 0.0));
    }
}

#[test]
fn horizontal_only_flow_has_no_cross_term() {
    let g = Grid::new(&[16, 16, 32]).unwrap();
    let u = SpectralField::from_fn(&g, |x: &[f64]| 1e-3 * (x[1] + x[2]).sin());
    let v0 = VectorField::new(vec![u, SpectralField::zeros(&g), SpectralField::zeros(&g)]).unwrap();
    let (solver, _, _) = run(small(0.01), Some(v0));
    for row in &solver.state().trace.rows {
        // v^n stays zero up to round-off in the pressure solve
        assert!(row.cross_accum <= 1e-20 * row.psi);
        assert!(row.y <= 1e-15 * row.psi);
        assert!(row.theta <= 1e-15 * row.psi);
    }
}

#[test]
fn largeness_of_a_single_mode() {
    let g = Grid::new(&[16, 16, 16]).unwrap();
    let a = 0.3;
    let u = SpectralField::from_fn(&g, |x: &[f64]| a * x[0].cos());
    let v = VectorField::new(vec![SpectralField::zeros(&g), u, SpectralField::zeros(&g)]).unwrap();
    let meter = largeness_meter(&v, &log_times(1e-2, 1e1, 2001)).unwrap();
    let exact = a * 0.5f64.sqrt() * (-0.5f64).exp();
    assert!((meter - exact).abs() < 1e-5 * exact, "{meter} vs {exact}");
    assert_eq!(largeness_meter(&VectorField::zeros(&g), &log_times(1e-2, 1e1, 10)).unwrap(), 0.0);
}

fn two_mode_profile(g: &Grid<f64>) -> VectorField<f64> {
    // (cos(x₂ + x₃), 0, sin(x₁ + x₂)): each component is constant along its own axis.
    let u = SpectralField::from_fn(g, |x: &[f64]| (x[1] + x[2]).cos());
    let w = SpectralField::from_fn(g, |x: &[f64]| (x[0] + x[1]).sin());
    VectorField::new(vec![u, SpectralField::zeros(g), w]).unwrap()
}

#[test]
fn initial_family_examples() {
    let g = Grid::new(&[8, 8, 16]).unwrap();
    let v = two_mode_profile(&g);
    assert!(divergence_residual(&v) < 1e-14);
    assert_eq!(make_initial_family(&v, 1.0).unwrap().relative_distance(&v), 0.0);

    let half = make_initial_family(&v, 0.5).unwrap();
    assert_eq!(half.grid().sizes(), &[8, 8, 32]);
    assert!(divergence_residual(&half) < 1e-12);
    let sup = |f: &SpectralField<f64>| f.to_physical().unwrap().iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let ratio = sup(half.vertical()) / sup(v.vertical());
    assert!((ratio - 2.0).abs() < 1e-12);
    assert!((sup(&half.components()[0]) - sup(&v.components()[0])).abs() < 1e-12);

    let flat = VectorField::new(vec![v.components()[0].clone(), SpectralField::zeros(&g), SpectralField::zeros(&g)]).unwrap();
    let fam = make_initial_family(&flat, 0.25).unwrap();
    assert!(fam.vertical().is_zero());
    assert!(make_initial_family(&v, 0.3).is_err());
}

#[test]
fn large_amplitude_is_recorded_not_hidden() {
    let cfg = SolverConfig { eta: 1.0, ..small(0.005) };
    let (_, _, verdict) = run(cfg, None);
    assert_ne!(verdict, Verdict::Completed);
}

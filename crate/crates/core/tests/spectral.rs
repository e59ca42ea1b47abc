mod common;

use std::f64::consts::PI;

use num_complex::Complex64;
use vlasov_qmc::model::{InitialCondition, PhaseSpaceDomain, Species};
use vlasov_qmc::spectral::{run_spectral, SpectralRunConfig, SpectralSolver, SpectralState};

#[test]
fn dispersion_oracle_reproduces_known_root() {
    let w = common::landau_root(0.5, Complex64::new(1.4, -0.15));
    assert!((w.re - 1.4156).abs() < 1e-3, "{w}");
    assert!((w.im + 0.1533).abs() < 1e-3, "{w}");
}

#[test]
fn split_step_is_third_order() {
    let dts = [0.2, 0.1, 0.05];
    let errors = common::split_step_errors(&dts);
    let slope = common::loglog_slope(&dts, &errors);
    assert!((slope - 3.0).abs() <= 0.2, "slope {slope}, errors {errors:?}");
}

#[test]
fn linear_landau_conserves_energy() {
    let cfg = SpectralRunConfig::new(InitialCondition::linear_landau(), 6.5, 64, 64, 0.05, 50.0);
    let run = run_spectral(&cfg).unwrap();
    let e0 = run.records[0].total_energy;
    let drift = run
        .records
        .iter()
        .map(|r| ((r.total_energy - e0) / e0).abs())
        .fold(0.0, f64::max);
    assert!(drift <= 1e-5, "relative energy drift {drift}");
    let m0 = run.records[0].total_mass;
    assert!(run.records.iter().all(|r| (r.total_mass - m0).abs() <= 1e-12 * m0));
}

#[test]
fn equilibrium_run_stays_field_free() {
    let mut ic = InitialCondition::landau();
    ic.epsilon = 0.0;
    let mut cfg = SpectralRunConfig::new(ic, 6.5, 32, 64, 0.1, 10.0);
    cfg.output_stride = 10;
    let run = run_spectral(&cfg).unwrap();
    assert!(run.records.iter().all(|r| r.field_energy <= 1e-12));
}

#[test]
fn single_mode_variation_matches_analytic_value() {
    // f = 2 + cos(3x) on [0, 2pi) x [-1, 1): V = 2 * int |3 sin 3x| dx = 24.
    let d = PhaseSpaceDomain::new(0.0, 2.0 * PI, -1.0, 1.0).unwrap();
    let s = SpectralState::from_fn(d, 64, 16, |x, _| 2.0 + (3.0 * x).cos()).unwrap();
    let solver = SpectralSolver::for_state(&s, Species::ELECTRON).unwrap();
    let v = solver.hk_variation(&s);
    assert!((v - 24.0).abs() <= 0.24, "{v}");
}

mod common;

use std::f64::consts::PI;

use vlasov_qmc::lowdisc::{generate_pairs, SequenceKind};
use vlasov_qmc::model::{InitialCondition, ParticleEnsemble, PhaseSpaceDomain, Species};
use vlasov_qmc::pic::{
    flow_jacobian_det, kinetic_energy, momentum, push, push_frozen, total_mass, FnField, IntegratorKind,
    SplinePoissonSolver,
};
use vlasov_qmc::sampling::its_tensor_product;

#[test]
fn fem_field_converges() {
    let errs: Vec<(f64, f64)> = [8, 16, 32].iter().map(|&n| common::fem_errors(n)).collect();
    for w in errs.windows(2) {
        let knot_order = (w[0].0 / w[1].0).log2();
        let sup_order = (w[0].1 / w[1].1).log2();
        eprintln!("knot order {knot_order:.3}, sup order {sup_order:.3}");
        assert!(knot_order >= 3.8, "{errs:?}");
        assert!(sup_order >= 2.8, "{errs:?}");
    }
}

fn frozen_ensemble() -> ParticleEnsemble {
    let x = vec![0.3, 1.7, 4.0, 5.9];
    let v = vec![-1.0, 0.5, 2.0, 0.0];
    ParticleEnsemble::new(x, v, vec![0.2, 0.3, 0.4, 0.5], vec![0.1, 0.3, 0.2, 0.25]).unwrap()
}

#[test]
fn zero_field_is_free_streaming() {
    let field = FnField { e: |_: f64| 0.0, de_dx: |_: f64| 0.0 };
    for kind in IntegratorKind::ALL {
        let mut e = frozen_ensemble();
        let before = e.clone();
        push_frozen(kind, &mut e, &field, -1.0, 0.1).unwrap();
        for k in 0..e.len() {
            assert!((e.x[k] - (before.x[k] + 0.1 * before.v[k])).abs() < 1e-14, "{kind}");
            assert_eq!(e.v[k], before.v[k], "{kind}");
            assert_eq!(e.w[k], before.w[k], "{kind}");
        }
    }
}

fn harmonic_energy_growth(kind: IntegratorKind) -> (f64, bool) {
    let field = FnField { e: |x: f64| -x, de_dx: |_: f64| -1.0 };
    let mut e = ParticleEnsemble::new(vec![1.0], vec![0.0], vec![1.0], vec![1.0]).unwrap();
    let energy = |e: &ParticleEnsemble| 0.5 * (e.x[0] * e.x[0] + e.v[0] * e.v[0]);
    let e0 = energy(&e);
    let mut worst: f64 = 0.0;
    let mut monotone = true;
    let mut prev = e0;
    for _ in 0..10_000 {
        push_frozen(kind, &mut e, &field, 1.0, 0.01).unwrap();
        let en = energy(&e);
        worst = worst.max(((en - e0) / e0).abs());
        monotone &= en > prev;
        prev = en;
    }
    (worst, monotone)
}

#[test]
fn harmonic_oscillator_energy_behaviour() {
    for kind in [IntegratorKind::SymplecticEuler, IntegratorKind::Ruth3, IntegratorKind::ImplicitMidpoint] {
        let (err, _) = harmonic_energy_growth(kind);
        assert!(err < 1e-2, "{kind}: {err}");
    }
    let (err, monotone) = harmonic_energy_growth(IntegratorKind::ExplicitEuler);
    assert!(monotone);
    // (1 + dt^2)^n with dt = 0.01, n = 1e4
    assert!((err - (1.0001f64.powi(10_000) - 1.0)).abs() < 1e-9, "{err}");
}

#[test]
fn explicit_euler_rescales_sampling_likelihood() {
    let c = 0.7;
    let field = FnField { e: move |x: f64| c * x, de_dx: move |_: f64| c };
    let dt = 0.1;
    let qm = -1.0;
    let det = 1.0 - dt * dt * qm * c;
    let mut e = frozen_ensemble();
    let before = e.clone();
    push_frozen(IntegratorKind::ExplicitEuler, &mut e, &field, qm, dt).unwrap();
    for k in 0..e.len() {
        assert_eq!(e.g_like[k], before.g_like[k] / det);
        assert_eq!(e.f_like[k], before.f_like[k]);
    }
    let mut e2 = before.clone();
    push_frozen(IntegratorKind::ExplicitEuler2, &mut e2, &field, qm, dt).unwrap();
    for k in 0..e2.len() {
        assert_eq!(e2.f_like[k], before.f_like[k] / det);
        assert_eq!(e2.w[k], before.w[k]);
    }
}

#[test]
fn jacobian_determinants_in_frozen_field() {
    let field = FnField { e: |x: f64| 0.8 * (0.5 * x).sin(), de_dx: |x: f64| 0.4 * (0.5 * x).cos() };
    let qm = -1.0;
    let dt = 0.2;
    for &(x, v) in &[(0.4, 1.0), (3.0, -2.0), (7.5, 0.3)] {
        for kind in [
            IntegratorKind::SymplecticEuler,
            IntegratorKind::ImplicitMidpoint,
            IntegratorKind::Ruth3,
        ] {
            let d = flow_jacobian_det(kind, x, v, dt, &field, qm).unwrap();
            assert!((d - 1.0).abs() < 1e-6, "{kind}: {d}");
        }
        let d = flow_jacobian_det(IntegratorKind::ExplicitEuler, x, v, dt, &field, qm).unwrap();
        let expect = 1.0 - dt * dt * qm * 0.4 * (0.5 * x).cos();
        assert!((d - expect).abs() < 1e-6);
    }
}

fn landau_ensemble(n: usize) -> (ParticleEnsemble, PhaseSpaceDomain) {
    let ic = InitialCondition::landau();
    let domain = ic.domain(6.5);
    let pairs = generate_pairs(SequenceKind::Sobol { skip: 1 }, n).unwrap();
    (its_tensor_product(&ic, &pairs, &domain).unwrap(), domain)
}

#[test]
fn volume_preserving_kinds_keep_weights() {
    let (ens, domain) = landau_ensemble(4096);
    let solver = SplinePoissonSolver::new(domain, 16, Species::ELECTRON).unwrap();
    for kind in [
        IntegratorKind::SymplecticEuler,
        IntegratorKind::Ruth3,
        IntegratorKind::ImplicitMidpoint,
        IntegratorKind::CrankNicolson,
    ] {
        let mut e = ens.clone();
        let m0 = total_mass(&e);
        for _ in 0..20 {
            push(kind, &mut e, &solver, 0.1).unwrap();
        }
        assert_eq!(e.w, ens.w, "{kind}");
        assert_eq!(total_mass(&e), m0, "{kind}");
    }
}

#[test]
fn symplectic_euler_momentum_balance() {
    // The Galerkin force is not the exact adjoint of the deposit, so momentum
    // changes by dt (q/m) (1/n) sum w_k E(x_k) after the drift.
    let (ens, domain) = landau_ensemble(4096);
    let solver = SplinePoissonSolver::new(domain, 16, Species::ELECTRON).unwrap();
    let mut e = ens.clone();
    let dt = 0.1;
    for _ in 0..5 {
        let p0 = momentum(&e);
        let mut drifted = e.clone();
        for k in 0..drifted.len() {
            drifted.x[k] += dt * drifted.v[k];
        }
        drifted.wrap_positions(&domain);
        let field = solver.field(&drifted, 0.0);
        let force: f64 = (0..e.len()).map(|k| e.w[k] * field.eval_e(drifted.x[k])).sum::<f64>() / e.len() as f64;
        push(IntegratorKind::SymplecticEuler, &mut e, &solver, dt).unwrap();
        let expect = p0 + dt * Species::ELECTRON.q_over_m() * force;
        assert!((momentum(&e) - expect).abs() < 1e-12);
        assert!((momentum(&e) - p0).abs() < 1e-3);
    }
}

#[test]
fn explicit_euler_drifts_mass() {
    let (ens, domain) = landau_ensemble(4096);
    let solver = SplinePoissonSolver::new(domain, 16, Species::ELECTRON).unwrap();
    let mut e = ens.clone();
    for _ in 0..20 {
        push(IntegratorKind::ExplicitEuler, &mut e, &solver, 0.1).unwrap();
    }
    assert!((total_mass(&e) - total_mass(&ens)).abs() > 1e-8);
    let mut e2 = ens.clone();
    for _ in 0..20 {
        push(IntegratorKind::ExplicitEuler2, &mut e2, &solver, 0.1).unwrap();
    }
    assert_eq!(e2.w, ens.w);
    assert_ne!(e2.f_like, ens.f_like);
}

#[test]
fn maxwellian_kinetic_energy() {
    let mut ic = InitialCondition::landau();
    ic.epsilon = 0.0;
    let domain = ic.domain(10.0);
    let n = 1 << 14;
    let pairs = generate_pairs(SequenceKind::PseudoRandom { seed: 7 }, n).unwrap();
    let e = its_tensor_product(&ic, &pairs, &domain).unwrap();
    let h = kinetic_energy(&e);
    let samples: Vec<f64> = (0..n).map(|k| 0.5 * e.v[k] * e.v[k] * e.w[k]).collect();
    let mean = samples.iter().sum::<f64>() / n as f64;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let sigma = (var / n as f64).sqrt();
    assert!((h - 2.0 * PI).abs() <= 3.0 * sigma, "{h} sigma {sigma}");
}

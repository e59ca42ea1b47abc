use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use vlasov_qmc::densest::{osde_linear, LinearSplineBasis2D};
use vlasov_qmc::lowdisc::{generate_pairs, SequenceKind};
use vlasov_qmc::model::{InitialCondition, Species};
use vlasov_qmc::par;
use vlasov_qmc::pic::{push, IntegratorKind, SplinePoissonSolver};
use vlasov_qmc::sampling::its_tensor_product;
use vlasov_qmc::spectral::{SpectralSolver, SpectralState};

fn thread_counts() -> Vec<usize> {
    let all = std::thread::available_parallelism().map_or(1, |n| n.get());
    if all > 1 {
        vec![1, all]
    } else {
        vec![1]
    }
}

fn spectral_step(c: &mut Criterion) {
    let ic = InitialCondition::landau();
    let state = SpectralState::from_initial(&ic, ic.domain(6.5), 128, 128).unwrap();
    let solver = SpectralSolver::for_state(&state, Species::ELECTRON).unwrap();
    let mut group = c.benchmark_group("spectral_step_128x128");
    for threads in thread_counts() {
        group.bench_with_input(BenchmarkId::from_parameter(threads), &threads, |b, &t| {
            par::with_threads(t, || {
                let mut s = state.clone();
                b.iter(|| solver.step(&mut s, 0.05));
            })
        });
    }
    group.finish();
}

fn pic_push(c: &mut Criterion) {
    let ic = InitialCondition::landau();
    let domain = ic.domain(6.5);
    let pairs = generate_pairs(SequenceKind::Sobol { skip: 1 }, 100_000).unwrap();
    let ens = its_tensor_product(&ic, &pairs, &domain).unwrap();
    let solver = SplinePoissonSolver::new(domain, 32, Species::ELECTRON).unwrap();
    let mut group = c.benchmark_group("pic_ruth3_push_1e5");
    group.sample_size(20);
    for threads in thread_counts() {
        group.bench_with_input(BenchmarkId::from_parameter(threads), &threads, |b, &t| {
            par::with_threads(t, || {
                let mut e = ens.clone();
                b.iter(|| push(IntegratorKind::Ruth3, &mut e, &solver, 0.01).unwrap());
            })
        });
    }
    group.finish();
}

fn osde(c: &mut Criterion) {
    let ic = InitialCondition::landau();
    let domain = ic.domain(6.5);
    let pairs = generate_pairs(SequenceKind::Sobol { skip: 1 }, 100_000).unwrap();
    let ens = its_tensor_product(&ic, &pairs, &domain).unwrap();
    let basis = LinearSplineBasis2D::new(domain, 64, 65).unwrap();
    let mut group = c.benchmark_group("osde_1e5_on_64x65");
    group.sample_size(20);
    for threads in thread_counts() {
        group.bench_with_input(BenchmarkId::from_parameter(threads), &threads, |b, &t| {
            par::with_threads(t, || b.iter(|| osde_linear(&ens, &basis, true).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, spectral_step, pic_push, osde);
criterion_main!(benches);

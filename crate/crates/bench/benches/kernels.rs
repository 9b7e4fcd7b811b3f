//! Benchmarks for the hot kernels: the fiber transform, weighted fiberwise
//! operators, ancilla branch circuits, and dense materialization.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use modvar::{
    apply_gamma, apply_rotation, compile, execute, make_envelope, make_weight, materialize,
    parse_circuit, zak_forward, zak_inverse, Axis, Backend, BranchState, CvState, EnvelopeFamily,
    GammaOperator, GridSpec, Representation, WeightFamily,
};

fn random_state(grid: GridSpec, seed: u64) -> CvState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps: Vec<Complex64> = (0..grid.dim())
        .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    let state = CvState::new(grid, Representation::Position, amps).unwrap();
    let n = state.norm();
    state.scaled(Complex64::new(1.0 / n, 0.0))
}

fn bench_zak_round_trip(c: &mut Criterion) {
    let mut group = c.benchmark_group("zak_round_trip");
    for (ns, nn) in [(32usize, 16usize), (64, 32), (64, 64)] {
        let grid = GridSpec::new(ns, nn).unwrap();
        let psi = random_state(grid, 11);
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{ns}x{nn}")),
            &psi,
            |b, psi| {
                b.iter(|| {
                    let field = zak_forward(psi).unwrap();
                    zak_inverse(&field).unwrap()
                })
            },
        );
    }
    group.finish();
}

fn bench_weighted_flip(c: &mut Criterion) {
    let mut group = c.benchmark_group("weighted_flip");
    for (ns, nn) in [(32usize, 16usize), (64, 64)] {
        let grid = GridSpec::new(ns, nn).unwrap();
        let psi = random_state(grid, 13);
        let weight = make_weight(grid, WeightFamily::CosTheta).unwrap();
        let gx = GammaOperator::new(grid, Axis::X, weight.clone()).unwrap();
        group.bench_with_input(
            BenchmarkId::new("gamma", format!("{ns}x{nn}")),
            &psi,
            |b, psi| b.iter(|| apply_gamma(psi, &gx).unwrap()),
        );
        group.bench_with_input(
            BenchmarkId::new("rotation", format!("{ns}x{nn}")),
            &psi,
            |b, psi| b.iter(|| apply_rotation(psi, Axis::X, 0.4, &weight).unwrap()),
        );
    }
    group.finish();
}

fn bench_compiled_circuits(c: &mut Criterion) {
    let mut group = c.benchmark_group("compiled_circuits");
    let grid = GridSpec::new(16, 8).unwrap();
    let env = make_envelope(grid, EnvelopeFamily::default_gaussian()).unwrap();
    let weight = make_weight(grid, WeightFamily::Constant(1.0)).unwrap();
    let zero = modvar::encode_logical(0.0, 0.0, &env).unwrap();
    let single = BranchState::Single(zero.clone());
    let joint = BranchState::Two(modvar::TwoModeState::product(&zero, &zero));

    let rotation = parse_circuit("qubits 1\nRX(0.7853981633974483) 0\n").unwrap();
    let bell = parse_circuit("qubits 2\nH 0\nCNOT 0 1\n").unwrap();

    for backend in [Backend::Exact, Backend::Ancilla] {
        let name = match backend {
            Backend::Exact => "exact",
            Backend::Ancilla => "ancilla",
        };
        let schedule = compile(&rotation, backend, &weight).unwrap();
        group.bench_with_input(
            BenchmarkId::new("rotation", name),
            &schedule,
            |b, schedule| b.iter(|| execute(schedule, &single).unwrap()),
        );
        let schedule = compile(&bell, backend, &weight).unwrap();
        group.bench_with_input(BenchmarkId::new("bell", name), &schedule, |b, schedule| {
            b.iter(|| execute(schedule, &joint).unwrap())
        });
    }
    group.finish();
}

fn bench_dense_materialize(c: &mut Criterion) {
    let mut group = c.benchmark_group("dense_materialize");
    group.sample_size(20);
    for (ns, nn) in [(16usize, 8usize), (32, 16)] {
        let grid = GridSpec::new(ns, nn).unwrap();
        let weight = make_weight(grid, WeightFamily::CosTheta).unwrap();
        let gz = GammaOperator::new(grid, Axis::Z, weight).unwrap();
        group.bench_function(BenchmarkId::from_parameter(format!("{ns}x{nn}")), |b| {
            b.iter(|| materialize(grid, |psi| Ok(apply_gamma(psi, &gz)?.0)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(
    kernels,
    bench_zak_round_trip,
    bench_weighted_flip,
    bench_compiled_circuits,
    bench_dense_materialize
);
criterion_main!(kernels);

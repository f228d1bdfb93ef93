use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use ilw_bench::gaussian;
use ilw_core::dynamics::Solver;
use ilw_core::spectral::Transformer;
use ilw_core::{DepthParameter, EquationKind, SolverConfig};

fn transforms(c: &mut Criterion) {
    let mut g = c.benchmark_group("transform_round_trip");
    for n in [256, 1024, 4096] {
        let f = gaussian(n);
        let mut tr = Transformer::new(*f.grid());
        let mut samples = vec![0.0; n];
        let mut coeffs = f.coeffs().to_vec();
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| {
                tr.inverse_into(black_box(&coeffs), &mut samples);
                tr.forward_into(&samples, &mut coeffs);
            })
        });
    }
    g.finish();
}

fn steps(c: &mut Criterion) {
    let mut g = c.benchmark_group("if_rk4_step");
    for kind in [EquationKind::ScaledIlw, EquationKind::LowFrequency, EquationKind::CoupledLowResidual] {
        let phi = gaussian(1024);
        let cfg = SolverConfig::new(*phi.grid(), DepthParameter::new(0.25).unwrap(), 5e-3, 1.0).unwrap();
        let mut solver = Solver::new(kind, cfg).unwrap();
        let state = solver.initial_state(&phi);
        g.bench_function(kind.as_str(), |b| b.iter(|| solver.step(black_box(&state), 0.0).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, transforms, steps);
criterion_main!(benches);

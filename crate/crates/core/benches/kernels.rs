use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use hydrolimit::kinetic::{step, Boundary, ReducedKineticState, VelocityGrid};
use hydrolimit::numerics::UniformGrid;
use hydrolimit::par::Execution;
use hydrolimit::profiles::{CompositeOptions, CompositeProfile};
use hydrolimit::riemann::solve_riemann;
use hydrolimit::GasState;

const POLICIES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn tube(n: usize, exec: Execution) -> ReducedKineticState {
    let grid = UniformGrid::new(-1.0, 1.0, n).unwrap();
    let states: Vec<GasState> = (0..n)
        .map(|i| {
            let s = if grid.x(i) < 0.0 { 1.0 } else { 0.0 };
            GasState::new(1.0 + 0.5 * (1.0 - s), 0.0, 1.0 - 0.2 * (1.0 - s)).unwrap()
        })
        .collect();
    let vg = VelocityGrid::covering(&states, 128).unwrap();
    let mut st = ReducedKineticState::from_states(grid, vg, &states, 1e-3, Boundary::Outflow).unwrap();
    st.exec = exec;
    st
}

fn kinetic_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("kinetic_step");
    for n in [500, 2000] {
        for (name, exec) in POLICIES {
            let mut st = tube(n, exec);
            let dt = st.max_dt(0.9);
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| b.iter(|| step(black_box(&mut st), dt).unwrap()));
        }
    }
    group.finish();
}

fn composite_field(c: &mut Criterion) {
    let p = solve_riemann(&GasState::new(0.8, 0.0, 1.025).unwrap(), &GasState::new(1.0, 0.0, 1.0).unwrap()).unwrap();
    let grid = UniformGrid::new(-3.0, 3.0, 4001).unwrap();
    let mut group = c.benchmark_group("composite_field");
    group.sample_size(20);
    for (name, exec) in POLICIES {
        let mut opts = CompositeOptions::new(0.01, 0.1, 0.5);
        opts.wave_i = false;
        opts.wave_ii = false;
        opts.exec = exec;
        let prof = CompositeProfile::build(&p, &opts).unwrap();
        group.bench_function(name, |b| b.iter(|| prof.field(black_box(0.5), &grid, exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, kinetic_step, composite_field);
criterion_main!(benches);

//! Core workloads under the current build mode.
//!
//! `cargo bench` measures the rayon path; `cargo bench --no-default-features`
//! measures the sequential fallback under the same names with a
//! `sequential` suffix, so criterion's report lists them side by side.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use graphon_hawkes::experiments::{convergence_sweep, ExperimentPlan, FigureId, Setup};
use graphon_hawkes::graphon::{norm_inf_inf, sample_graph, sample_positions, GraphonKernel, PositionScheme, Quadrature};
use graphon_hawkes::hawkes_sim::{simulate, spatial_profile, SimOptions};
use graphon_hawkes::limit_solver::SolverOptions;
use graphon_hawkes::par;

fn mode() -> &'static str {
    if cfg!(feature = "parallel") {
        "rayon"
    } else {
        "sequential"
    }
}

fn id(name: &str, size: usize) -> BenchmarkId {
    BenchmarkId::new(format!("{name}/{}x{}", mode(), par::current_threads()), size)
}

fn graphs(c: &mut Criterion) {
    let setup = Setup::figure(FigureId::Fig2).unwrap();
    let mut group = c.benchmark_group("sample_graph");
    for n in [500, 2000] {
        let xs = sample_positions(&PositionScheme::RegularGrid, n, 0).unwrap();
        group.bench_function(id("er", n), |b| {
            b.iter(|| sample_graph(&setup.kernel, black_box(&xs), &setup.dilution, 1).unwrap())
        });
    }
    group.finish();

    let quad = Quadrature::uniform(800).unwrap();
    let k = GraphonKernel::p_nearest(0.1).unwrap();
    c.bench_function(&format!("norm_inf_inf/{}", mode()), |b| b.iter(|| norm_inf_inf(black_box(&k), &quad)));
}

fn limit(c: &mut Criterion) {
    let setup = Setup::figure(FigureId::Fig4).unwrap();
    let mut group = c.benchmark_group("solve_lambda");
    group.sample_size(10);
    for cells in [100, 400] {
        let opts = SolverOptions {
            cells,
            dt: 1e-2,
            ..SolverOptions::default()
        };
        group.bench_function(id("product", cells), |b| b.iter(|| setup.solve(10.0, &opts).unwrap()));
    }
    group.finish();
}

fn simulation(c: &mut Criterion) {
    let setup = Setup::figure(FigureId::Fig2).unwrap();
    let graph = setup.sample(1000, 3).unwrap();
    let mut group = c.benchmark_group("simulation");
    group.sample_size(10);
    group.bench_function(id("simulate", 1000), |b| {
        b.iter(|| simulate(&graph, &setup.model, 5.0, 4, &SimOptions::default()).unwrap())
    });
    let rec = simulate(&graph, &setup.model, 5.0, 4, &SimOptions::default()).unwrap();
    let times: Vec<f64> = (0..=500).map(|k| k as f64 * 0.01).collect();
    group.bench_function(id("spatial_profile", 1000), |b| {
        b.iter(|| spatial_profile(&rec, &graph, &setup.model, &times).unwrap())
    });
    let plan = ExperimentPlan::new(setup.clone(), vec![50, 100, 200], 4, 2.0, 5);
    group.bench_function(id("convergence_sweep", 3 * 4), |b| b.iter(|| convergence_sweep(&plan).unwrap()));
    group.finish();
}

criterion_group!(benches, graphs, limit, simulation);
criterion_main!(benches);

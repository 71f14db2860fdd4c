use well_echo_bench::{black_box, criterion_group, criterion_main, Criterion, Throughput};
use well_echo::*;

fn bench_series_evaluation(c: &mut Criterion) {
    let model = make_model(1.5).unwrap();
    let grid = SpatialGrid::uniform(&model, 512);
    let tau = reduce_time(1, 4).unwrap();
    let mut group = c.benchmark_group("series_density");
    for n_max in [10_000usize, 100_000, 1_000_000] {
        let set = SpectralSet::with_n_max(&model, n_max);
        group.throughput(Throughput::Elements((n_max * grid.len()) as u64));
        group.bench_function(format!("n_max_{n_max}"), |b| {
            b.iter(|| {
                let field = evaluate_wavefunction(&set, &grid, tau).unwrap();
                black_box(density(&field));
            })
        });
    }
    group.finish();
}

fn bench_current(c: &mut Criterion) {
    let model = make_model(1.5).unwrap();
    let grid = SpatialGrid::uniform(&model, 512);
    let tau = reduce_time(1, 4).unwrap();
    let set = SpectralSet::with_n_max(&model, 100_000);
    c.bench_function("current_n_max_1e5", |b| {
        b.iter(|| black_box(current(&set, &grid, tau, Smoothing::None).unwrap()))
    });
}

fn bench_spectral_build(c: &mut Criterion) {
    let model = make_model(2.5).unwrap();
    c.bench_function("build_spectral_set_eps_1e-5", |b| {
        b.iter(|| black_box(build_spectral_set(&model, 1e-5).unwrap()))
    });
}

fn bench_closed_forms(c: &mut Criterion) {
    let model = make_model(1.5).unwrap();
    let dens = density_eighth(&model);
    c.bench_function("density_eighth_eval_4096", |b| {
        b.iter(|| {
            let mut acc = 0.0;
            for i in 0..4096 {
                acc += dens.eval(1.5 * i as f64 / 4096.0);
            }
            black_box(acc)
        })
    });
    c.bench_function("norm_and_energy_via_g", |b| {
        b.iter(|| black_box(norm_and_energy_via_g(black_box(2.7)).unwrap()))
    });
}

criterion_group!(
    benches,
    bench_series_evaluation,
    bench_current,
    bench_spectral_build,
    bench_closed_forms
);
criterion_main!(benches);

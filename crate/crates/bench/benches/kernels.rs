use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use specfid::verify::run_suite;
use specfid::{
    eig, frac_power, geometric_mean, replay_paper_counterexample, search_dpi_violation, spectral_fidelity,
    uhlmann_fidelity, ChannelFamily,
};
use specfid_bench::{pd_pair, state_pair, DIMS};

fn linalg(c: &mut Criterion) {
    let mut g = c.benchmark_group("linalg");
    for d in DIMS {
        let (a, b) = pd_pair(d, 1);
        g.bench_with_input(BenchmarkId::new("eig", d), &a, |bench, a| bench.iter(|| eig(a).unwrap()));
        g.bench_with_input(BenchmarkId::new("frac_power", d), &a, |bench, a| {
            bench.iter(|| frac_power(a, 0.37, false).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("geometric_mean", d), &(a, b), |bench, (a, b)| {
            bench.iter(|| geometric_mean(a, b).unwrap())
        });
    }
    g.finish();
}

fn fidelities(c: &mut Criterion) {
    let mut g = c.benchmark_group("fidelity");
    for d in DIMS {
        let pair = state_pair(d, 2);
        g.bench_with_input(BenchmarkId::new("spectral", d), &pair, |bench, (r, s)| {
            bench.iter(|| spectral_fidelity(r, s, 0.3).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("uhlmann", d), &pair, |bench, (r, s)| {
            bench.iter(|| uhlmann_fidelity(r, s).unwrap())
        });
    }
    g.finish();
}

fn harness(c: &mut Criterion) {
    let mut g = c.benchmark_group("harness");
    g.sample_size(10);
    g.bench_function("replay_counterexample", |b| b.iter(|| replay_paper_counterexample().unwrap()));
    g.bench_function("midpoint_suite_100x5", |b| {
        b.iter(|| run_suite("midpoint_uhlmann", &[2, 3, 4, 5, 6], 100, 42).unwrap())
    });
    g.bench_function("dpi_search_t0.25", |b| {
        b.iter(|| search_dpi_violation(0.25, 2, 10_000, 42, ChannelFamily::Pinching).unwrap())
    });
    g.finish();
}

criterion_group!(benches, linalg, fidelities, harness);
criterion_main!(benches);

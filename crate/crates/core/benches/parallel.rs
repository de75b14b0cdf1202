//! Sequential versus rayon-parallel execution of the two data-parallel kernels.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use kolmogorov::par::Execution;
use kolmogorov::portrait::{phase_portrait, PortraitSpec};
use kolmogorov::report::sweep;
use kolmogorov::{presets, ParamPoint, Rect, Tolerances};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn bench_sweep(c: &mut Criterion) {
    let m = presets::ma();
    let tols = Tolerances::default();
    let window = Rect::centered(0.02);
    let mut g = c.benchmark_group("sweep");
    g.sample_size(10);
    for res in [32usize, 96] {
        for (name, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(name, res), &res, |b, &res| {
                b.iter(|| sweep(&m, black_box(&window), res, &tols, exec).unwrap())
            });
        }
    }
    g.finish();
}

fn bench_portrait(c: &mut Criterion) {
    let m = presets::ma();
    let tols = Tolerances::default();
    let mut spec = PortraitSpec::new(Rect::new(0.0, 0.06, 0.0, 0.03));
    spec.seeds_per_side = 8;
    spec.t_max = 5e3;
    let mu = ParamPoint::new(0.0004, 0.02);
    let mut g = c.benchmark_group("portrait");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(name, |b| b.iter(|| phase_portrait(&m, black_box(mu), &spec, &tols, exec).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, bench_sweep, bench_portrait);
criterion_main!(benches);

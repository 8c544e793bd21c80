use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hyperfrob::geometry::{build_basis, parse_and_lift, HypersurfaceSpec, ProblemFile};
use hyperfrob::par::with_workers;
use hyperfrob::pipeline::{compute_matrix, plan_for};
use hyperfrob::zeta::{count_points, DEFAULT_COUNT_CAP};

fn spec(p: u64, n: usize, poly: &str) -> HypersurfaceSpec {
    parse_and_lift(&ProblemFile {
        p,
        n,
        polynomial: poly.into(),
        ..Default::default()
    })
    .unwrap()
}

fn workers() -> [(&'static str, usize); 2] {
    [("sequential", 1), ("parallel", 0)]
}

fn matrix(c: &mut Criterion) {
    let s = spec(5, 3, "x0^3 + x1^3 + x2^3 + x3^3 + x0*x1*x2 + 2*x1*x2*x3");
    let (basis, _) = build_basis(&s).unwrap();
    let plan = plan_for(2, 3, 5, None).unwrap();
    let mut group = c.benchmark_group("matrix_cubic_surface_f5_r2");
    group.sample_size(10).measurement_time(Duration::from_secs(10));
    for (label, w) in workers() {
        group.bench_with_input(BenchmarkId::from_parameter(label), &w, |b, &w| {
            b.iter(|| with_workers(w, || black_box(compute_matrix(&s, &basis, &plan, None).unwrap())))
        });
    }
    group.finish();
}

fn counting(c: &mut Criterion) {
    let s = spec(3, 3, "x0^4 - x0*x1^3 + x0*x1^2*x3 + x0*x1*x2*x3 + x0*x1*x3^2 - x0*x2*x3^2 + x1^4 + x1^3*x3 - x1^2*x2*x3 + x2^4 + x3^4");
    let mut group = c.benchmark_group("count_f3_quartic_i3");
    group.sample_size(10);
    for (label, w) in workers() {
        group.bench_with_input(BenchmarkId::from_parameter(label), &w, |b, &w| {
            b.iter(|| with_workers(w, || black_box(count_points(&s, 3, DEFAULT_COUNT_CAP).unwrap())))
        });
    }
    group.finish();
}

criterion_group!(benches, matrix, counting);
criterion_main!(benches);

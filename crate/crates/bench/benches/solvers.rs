use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use fbgain::{
    find_peak, solve_lambda_massive, solve_lambda_star, sweep_curve, SolverSettings, Users,
};
use fbgain_bench::{figure_users, FINITE_CASES, MASSIVE_CASES};

fn bench_finite(c: &mut Criterion) {
    let settings = SolverSettings::default();
    let mut group = c.benchmark_group("solve_lambda_star");
    for (k, p) in FINITE_CASES {
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("K{k}_P{p}")),
            &(k, p),
            |b, &(k, p)| {
                b.iter(|| solve_lambda_star(black_box(k), black_box(p), &settings).unwrap())
            },
        );
    }
    group.finish();
}

fn bench_massive(c: &mut Criterion) {
    let settings = SolverSettings::default();
    let mut group = c.benchmark_group("solve_lambda_massive");
    for pi in MASSIVE_CASES {
        group.bench_with_input(BenchmarkId::from_parameter(pi), &pi, |b, &pi| {
            b.iter(|| solve_lambda_massive(black_box(pi), &settings).unwrap())
        });
    }
    group.finish();
}

fn bench_curves(c: &mut Criterion) {
    let settings = SolverSettings::default();
    c.bench_function("sweep_massive_0.1db", |b| {
        b.iter(|| sweep_curve(Users::Massive, -10.0, 30.0, 0.1, &settings).unwrap())
    });
    let mut group = c.benchmark_group("find_peak");
    group.sample_size(20);
    for users in figure_users() {
        // non-numeric ids: a parameter of "inf" breaks criterion's line-chart axes
        let id = match users {
            Users::Finite(k) => format!("K{k}"),
            Users::Massive => "massive".to_string(),
        };
        group.bench_with_input(BenchmarkId::from_parameter(id), &users, |b, &users| {
            b.iter(|| find_peak(users, -10.0, 30.0, &settings).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_finite, bench_massive, bench_curves);
criterion_main!(benches);

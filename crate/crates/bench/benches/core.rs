use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use sbo_core::singular::{build, verify_annihilated};
use sbo_core::{family, op_equal, run_suite, Config, FamilySpec, Presentation};

fn families(c: &mut Criterion) {
    let mut g = c.benchmark_group("family");
    for m in [2u32, 4, 6] {
        g.bench_with_input(BenchmarkId::new("first-type-n5", m), &m, |b, &m| {
            b.iter(|| family(&FamilySpec::new(1, 5, 2, black_box(m), Presentation::Normal)).unwrap())
        });
    }
    g.finish();
}

fn equality(c: &mut Criterion) {
    let mut g = c.benchmark_group("op_equal");
    for m in [2u32, 4] {
        let a = family(&FamilySpec::new(1, 5, 2, m, Presentation::Normal)).unwrap();
        let b = family(&FamilySpec::new(1, 5, 2, m, Presentation::Geometric)).unwrap();
        g.bench_with_input(BenchmarkId::new("presentations-n5", m), &m, |bench, _| {
            bench.iter(|| op_equal(black_box(&a), black_box(&b)).unwrap())
        });
    }
    g.finish();
}

fn singular(c: &mut Criterion) {
    let v = build(1, 4, 1, 3).unwrap();
    c.bench_function("verify_annihilated/first-type-n4-N3", |b| b.iter(|| verify_annihilated(black_box(&v)).unwrap()));
}

fn suites(c: &mut Criterion) {
    let mut g = c.benchmark_group("suite");
    g.sample_size(10);
    let cfg = Config { n_max: 4, order_max: 3 };
    for name in ["coeffs", "hodge", "main-fact", "singular"] {
        g.bench_with_input(BenchmarkId::from_parameter(name), &name, |b, name| b.iter(|| run_suite(name, &cfg).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, families, equality, singular, suites);
criterion_main!(benches);

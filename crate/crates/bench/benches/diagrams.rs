use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mmlag_core::coupling::CouplingTable;
use mmlag_core::diagram::{automorphism_count, correlator, enumerate_diagrams, symmetry_factor};

fn enumeration(c: &mut Criterion) {
    let mut g = c.benchmark_group("enumerate");
    g.sample_size(10);
    for (k, h) in [(0, 3), (2, 2), (6, 0), (3, 2)] {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{k},{h}")), &(k, h), |b, &(k, h)| {
            b.iter(|| enumerate_diagrams(k, h).unwrap().len())
        });
    }
    g.finish();
}

fn symmetry(c: &mut Criterion) {
    let ds = enumerate_diagrams(0, 3).unwrap();
    c.bench_function("wick factors (0,3)", |b| {
        b.iter(|| ds.iter().map(|d| symmetry_factor(d).value).collect::<Vec<_>>())
    });
    c.bench_function("automorphisms (0,3)", |b| b.iter(|| ds.iter().map(automorphism_count).sum::<u64>()));
}

fn assembly(c: &mut Criterion) {
    let t = CouplingTable::new();
    t.extend_to(2).unwrap();
    let mut g = c.benchmark_group("correlator");
    g.sample_size(10);
    g.bench_function("W_1^(2) s=1", |b| b.iter(|| correlator(1, 2, 1, &t).unwrap().len()));
    g.bench_function("W_1^(2) s=2", |b| b.iter(|| correlator(1, 2, 2, &t).unwrap().len()));
    g.finish();
}

criterion_group!(benches, enumeration, symmetry, assembly);
criterion_main!(benches);

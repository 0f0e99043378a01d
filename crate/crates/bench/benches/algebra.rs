use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mmlag_core::coupling::CouplingTable;

fn lambda_orders(c: &mut Criterion) {
    let mut g = c.benchmark_group("lambda");
    g.sample_size(10);
    for h in [4, 5, 6] {
        // fresh table each iteration so every lower order is recomputed
        g.bench_with_input(BenchmarkId::from_parameter(h), &h, |b, &h| {
            b.iter(|| {
                let t = CouplingTable::new();
                t.extend_to(h).unwrap();
                t.lambda(h).unwrap().len()
            })
        });
    }
    g.finish();
}

fn products(c: &mut Criterion) {
    let t = CouplingTable::new();
    t.extend_to(4).unwrap();
    let (a, b) = (t.lambda(3).unwrap(), t.lambda(4).unwrap());
    c.bench_function("multiply orders 3 and 4", |bench| bench.iter(|| (&*a * &*b).len()));
}

criterion_group!(benches, lambda_orders, products);
criterion_main!(benches);

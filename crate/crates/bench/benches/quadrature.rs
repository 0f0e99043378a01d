use std::collections::HashMap;

use criterion::{criterion_group, criterion_main, Criterion};
use mmlag_core::coupling::CouplingTable;
use mmlag_core::curve::{eval_expression, moment, prop_ext, prop_int, solve_endpoints, Potential, QuadratureSpec};
use mmlag_core::diagram::correlator;
use num_complex::Complex64;

fn curve_numerics(c: &mut Criterion) {
    let pot = Potential::new(vec![0.1, 0.5, 0.05, 0.08]);
    c.bench_function("solve endpoints (quartic)", |b| b.iter(|| solve_endpoints(&pot).unwrap().a2));
    let curve = solve_endpoints(&pot).unwrap();
    let q = QuadratureSpec::for_curve(&curve);
    let p = Complex64::new(curve.a2 + 1.0, 0.5);
    c.bench_function("moment f=3", |b| b.iter(|| moment(&curve, 3, 2, &q).unwrap()));
    c.bench_function("external propagator", |b| b.iter(|| prop_ext(&curve, 1, 1, p, &q).unwrap()));
    c.bench_function("internal propagator", |b| b.iter(|| prop_int(&curve, 1, 2, 1, 0, &q).unwrap()));

    let t = CouplingTable::new();
    t.extend_to(2).unwrap();
    let f2 = correlator(0, 2, 1, &t).unwrap();
    let mut g = c.benchmark_group("evaluate");
    g.sample_size(10);
    g.bench_function("F^(2)", |b| b.iter(|| eval_expression(&curve, &f2, &HashMap::new(), &q).unwrap()));
    g.finish();
}

criterion_group!(benches, curve_numerics);
criterion_main!(benches);

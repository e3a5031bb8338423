use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use rauzy_core::geometry::{enumerate_saddle_connections, trace_horizontal, TraceStart};
use rauzy_core::numeric::{parse_rational, SymbolicReal};
use rauzy_core::samples;

fn bound(text: &str) -> SymbolicReal {
    SymbolicReal::from_rational(parse_rational(text).unwrap())
}

/// A long surviving ray: 33 side crossings before the budget runs out.
fn bench_trace(c: &mut Criterion) {
    let s = samples::reversed4_sqrt2_last();
    let budget = bound("100");
    c.bench_function("trace_origin_ray_budget_100", |b| {
        b.iter(|| trace_horizontal(black_box(&s), TraceStart::Origin, &budget).unwrap())
    });
}

/// Full separatrix sweep over every corner of the polygon.
fn bench_enumerate(c: &mut Criterion) {
    let s = samples::reversed4_sqrt2_first();
    let budget = bound("10");
    c.bench_function("enumerate_connections_bound_10", |b| {
        b.iter(|| enumerate_saddle_connections(black_box(&s), &budget).unwrap())
    });
}

criterion_group!(benches, bench_trace, bench_enumerate);
criterion_main!(benches);

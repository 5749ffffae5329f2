use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use ftd_bench::covered_graph;
use ftd_core::gadgets::{bowtie_balance, bowtie_counts, pinwheel_counts, PinwheelOperator};
use ftd_core::weighting::uniform_weighting;
use ftd_core::{decide_ftd, Graph, TriangleIndex};

fn gadgets(c: &mut Criterion) {
    let (g, ti) = covered_graph(40, 8.0);
    let phi = uniform_weighting(&g, &ti).unwrap();

    c.bench_function("triangle_index/n40", |b| {
        b.iter(|| TriangleIndex::build(&g))
    });
    c.bench_function("bowtie_counts/n40", |b| b.iter(|| bowtie_counts(&g)));
    c.bench_function("bowtie_balance/n40", |b| {
        b.iter(|| bowtie_balance(&g, &ti, &phi).unwrap())
    });

    let mut slow = c.benchmark_group("pinwheel");
    slow.sample_size(10);
    slow.bench_function("counts/n40", |b| b.iter(|| pinwheel_counts(&g, 4).unwrap()));
    let op = PinwheelOperator::build(&g, &ti, 4).unwrap();
    let sigma = bowtie_balance(&g, &ti, &phi).unwrap();
    slow.bench_function("apply/n40", |b| {
        b.iter_batched(
            || sigma.clone(),
            |s| op.apply(&ti, &s).unwrap(),
            BatchSize::SmallInput,
        )
    });
    slow.finish();

    let k12 = Graph::complete(12);
    let t12 = TriangleIndex::build(&k12);
    c.bench_function("oracle/K12", |b| b.iter(|| decide_ftd(&k12, &t12)));
    c.bench_function("oracle/n40", |b| b.iter(|| decide_ftd(&g, &ti)));
}

criterion_group!(benches, gadgets);
criterion_main!(benches);

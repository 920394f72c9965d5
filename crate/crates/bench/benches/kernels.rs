use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use symx_bench::family;
use symx_core::local_analysis::{Analysis, AnalysisOptions};
use symx_core::{Perm, PermGroup};

fn bench_chain_build(c: &mut Criterion) {
    let mut group = c.benchmark_group("chain build");
    let small = family(2, false, 3);
    let gens_small: Vec<Perm> = small.h.generators().to_vec();
    group.bench_function("H at (C2,C2,3)", |b| {
        b.iter(|| black_box(PermGroup::new(13, gens_small.clone()).unwrap()))
    });
    let big = family(3, true, 3);
    let gens_big: Vec<Perm> = big.h.generators().to_vec();
    group.bench_function("H at (S3,C2,3)", |b| {
        b.iter(|| black_box(PermGroup::new(20, gens_big.clone()).unwrap()))
    });
    let sym13 = PermGroup::symmetric(13);
    let gens_sym: Vec<Perm> = sym13.generators().to_vec();
    group.bench_function("Sym(13)", |b| {
        b.iter(|| black_box(PermGroup::new(13, gens_sym.clone()).unwrap()))
    });
    group.finish();
}

fn bench_canonical_reps(c: &mut Criterion) {
    let out = family(3, true, 3);
    let h = &out.h;
    let a = &out.a;
    let probe = a.compose(h.generators().first().unwrap()).compose(a);
    c.bench_function("minimal coset rep at (S3,C2,3)", |b| {
        b.iter(|| black_box(h.minimal_coset_rep(black_box(&probe))))
    });
}

fn bench_ball_bfs(c: &mut Criterion) {
    let out = family(3, true, 3);
    c.bench_function("radius-3 ball at (S3,C2,3)", |b| {
        b.iter(|| black_box(out.spec.ball(3, 100_000).unwrap().len()))
    });
}

fn bench_kernels(c: &mut Criterion) {
    let out = family(2, false, 5);
    c.bench_function("radius-1 kernel at (C2,C2,5)", |b| {
        b.iter_batched(
            || out.spec.ball(1, 1000).unwrap(),
            |ball| {
                let act = out.spec.action_on_ball(&out.h, &ball).unwrap();
                black_box(out.h.kernel_on_aux(&act).unwrap())
            },
            BatchSize::SmallInput,
        )
    });
}

fn bench_full_analysis(c: &mut Criterion) {
    let out = family(2, false, 3);
    c.bench_function("full analysis at (C2,C2,3)", |b| {
        b.iter(|| {
            let analysis = Analysis::of_coset(&out.spec, AnalysisOptions::default()).unwrap();
            black_box(analysis.full_verdict())
        })
    });
}

criterion_group!(
    benches,
    bench_chain_build,
    bench_canonical_reps,
    bench_ball_bfs,
    bench_kernels,
    bench_full_analysis
);
criterion_main!(benches);

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use sistab_bench::{example1, example2};
use sistab_core::certify::{build_f_thm1, build_k, build_phi, char_poly_k, routh_table};
use sistab_core::oracle::freq_sample_abscissa;
use sistab_core::{analyze, AnalyzeOptions};

fn symbolic(c: &mut Criterion) {
    let m1 = example1();
    let m2 = example2();
    c.bench_function("build_f_thm1/example1", |b| b.iter(|| build_f_thm1(black_box(&m1)).unwrap()));
    c.bench_function("routh_table/example2", |b| {
        b.iter(|| {
            let phi = build_phi(&char_poly_k(&build_k(black_box(&m2)).unwrap()).unwrap());
            routh_table(&phi).unwrap()
        })
    });
}

fn certify(c: &mut Criterion) {
    let m1 = example1();
    let m2 = example2();
    let mut g = c.benchmark_group("analyze");
    g.sample_size(10);
    g.bench_function("example1", |b| {
        b.iter(|| analyze(black_box(&m1), &AnalyzeOptions::with_slack(vec![0, 0])).unwrap())
    });
    g.bench_function("example2", |b| {
        b.iter(|| analyze(black_box(&m2), &AnalyzeOptions::with_slack(vec![0, 0])).unwrap())
    });
    g.finish();
}

fn oracle(c: &mut Criterion) {
    let m1 = example1();
    c.bench_function("freq_sample/example1/64x64", |b| {
        b.iter(|| freq_sample_abscissa(black_box(&m1), &[64, 64]).unwrap())
    });
}

criterion_group!(benches, symbolic, certify, oracle);
criterion_main!(benches);

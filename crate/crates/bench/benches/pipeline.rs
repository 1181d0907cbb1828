use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use shadowcalc::alexander::alexander_poly;
use shadowcalc::banded::{collapse_bound, gen_twist_spun, shadow_of};
use shadowcalc::grid::{verify_case_grid, GridBounds};
use shadowcalc::homology::{abelianize, snf};
use shadowcalc::knot_shadow::{classify, knot_group, shadow_kn};
use shadowcalc::van_kampen::pi1_tree;
use shadowcalc_bench::matrices;

fn homology(c: &mut Criterion) {
    let mut group = c.benchmark_group("snf");
    for dim in [3, 5, 8] {
        let ms = matrices(32, dim, 11);
        group.bench_with_input(BenchmarkId::from_parameter(dim), &ms, |b, ms| {
            b.iter(|| ms.iter().map(|m| snf(black_box(m))).count())
        });
    }
    group.finish();
}

fn knot_groups(c: &mut Criterion) {
    let ks = shadow_kn(3).unwrap();
    c.bench_function("pi1_abelianize_k3", |b| {
        b.iter(|| abelianize(&pi1_tree(black_box(&ks.xprime)).unwrap().presentation))
    });
    c.bench_function("classify_k3", |b| b.iter(|| classify(black_box(&ks)).unwrap()));
    let p = knot_group(&ks).unwrap();
    c.bench_function("alexander_k3", |b| b.iter(|| alexander_poly(black_box(&p)).unwrap()));
}

fn grid(c: &mut Criterion) {
    let mut group = c.benchmark_group("grid");
    group.sample_size(10);
    for id in ["X3-i", "X8-i", "X11-i"] {
        group.bench_function(id, |b| b.iter(|| verify_case_grid(id, GridBounds { max: 2, max_g: 2 }).unwrap()));
    }
    group.finish();
}

fn banded(c: &mut Criterion) {
    let mut group = c.benchmark_group("twist_spun");
    for n in [1, 3, 5] {
        let d = gen_twist_spun(n, 2).unwrap();
        group.bench_with_input(BenchmarkId::new("shadow", n), &d, |b, d| b.iter(|| shadow_of(d).unwrap()));
        group.bench_with_input(BenchmarkId::new("bound", n), &d, |b, d| b.iter(|| collapse_bound(d).unwrap()));
    }
    group.bench_function("generate_5_5", |b| b.iter(|| gen_twist_spun(black_box(5), 5).unwrap()));
    group.finish();
}

criterion_group!(benches, homology, knot_groups, grid, banded);
criterion_main!(benches);

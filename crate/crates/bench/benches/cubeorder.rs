use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use cubeorder::oracle::{brute_force_min, OracleConfig};
use cubeorder::{initial_segment, rank, rearrange_to_segment, sigma_profile, sigma_segment, unrank, ProfileKind};
use cubeorder_bench::{cube_side, scattered};

fn order(c: &mut Criterion) {
    c.bench_function("unrank_rank_n4_10k", |b| {
        b.iter(|| {
            for m in 0..10_000u64 {
                let p = unrank(4, black_box(m)).unwrap();
                black_box(rank(&p).unwrap());
            }
        })
    });
    c.bench_function("initial_segment_n3_20k", |b| b.iter(|| initial_segment(3, black_box(20_000)).unwrap()));
}

fn projections(c: &mut Criterion) {
    c.bench_function("sigma_segment_n5_10k", |b| {
        b.iter(|| (0..10_000u64).map(|m| sigma_segment(5, black_box(m)).unwrap()).sum::<u64>())
    });
    let seg = initial_segment(3, 5000).unwrap();
    c.bench_function("sigma_profile_n3_5k", |b| b.iter(|| sigma_profile(black_box(&seg))));
}

fn rearrange(c: &mut Criterion) {
    let mut group = c.benchmark_group("rearrange");
    for (n, m, side) in [(2, 40, 16), (3, 40, 16), (4, 40, 16), (3, 1000, 16)] {
        let a = scattered(n, m, side, 1);
        group.bench_with_input(BenchmarkId::from_parameter(format!("n{n}_m{m}")), &a, |b, a| {
            b.iter(|| rearrange_to_segment(a).unwrap())
        });
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("brute_force_min");
    group.sample_size(10);
    for (n, m) in [(2, 8), (3, 5), (3, 8)] {
        let side = cube_side(n, m).max(3);
        let sides = vec![side; n];
        group.bench_function(format!("n{n}_m{m}_side{side}"), |b| {
            b.iter(|| brute_force_min(ProfileKind::Hyperplane, n, m, &sides, &OracleConfig::default()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, order, projections, rearrange, oracle);
criterion_main!(benches);

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use hooptrack_bench::{demo_game, scripted_session};
use hooptrack_core::calibrate::{sweep_grid, GridSpec};
use hooptrack_core::court::{convex_hull_area, CourtSpec};
use hooptrack_core::filter::{reduce_to_active, FilterParams};
use hooptrack_core::ingest::merge_timeline;
use hooptrack_core::segment::{assign_actions, label_phases, SideConfig};
use hooptrack_core::stats::compute_frame_metrics;

fn bench_filter(c: &mut Criterion) {
    let timeline = scripted_session(12);
    let court = CourtSpec::default();
    let params = FilterParams::default();
    c.bench_function("reduce_to_active 12min/40Hz", |b| {
        b.iter(|| reduce_to_active(black_box(&timeline), &court, &params))
    });
}

fn bench_segment(c: &mut Criterion) {
    let timeline = scripted_session(12);
    let court = CourtSpec::default();
    let (reduced, _) = reduce_to_active(&timeline, &court, &FilterParams::default());
    let sides = SideConfig::default();
    c.bench_function("label+assign 12min", |b| {
        b.iter(|| {
            let labels = label_phases(black_box(&reduced), &court, &sides);
            assign_actions(&reduced, &labels, &court).unwrap()
        })
    });
    let labels = label_phases(&reduced, &court, &sides);
    c.bench_function("frame metrics 12min", |b| {
        b.iter(|| compute_frame_metrics(black_box(&reduced), &labels))
    });
}

fn bench_sweep(c: &mut Criterion) {
    let timeline = scripted_session(12);
    let court = CourtSpec::default();
    let base = FilterParams::default();
    let grid = GridSpec::default();
    let mut group = c.benchmark_group("calibration");
    group.sample_size(20);
    group.bench_function("sweep 16x13 grid 12min", |b| {
        b.iter(|| sweep_grid(black_box(&timeline), &court, &base, &grid).unwrap())
    });
    group.finish();
}

fn bench_merge(c: &mut Criterion) {
    let game = demo_game();
    c.bench_function("merge_timeline 2min demo", |b| {
        b.iter(|| merge_timeline(black_box(&game.records), Default::default()).unwrap())
    });
}

fn bench_hull(c: &mut Criterion) {
    let sets: Vec<[[f64; 2]; 5]> = (0..1000)
        .map(|i| {
            std::array::from_fn(|j| {
                let k = (i * 5 + j) as f64;
                [
                    (k * 0.61803).fract() * 28.0 - 14.0,
                    (k * 0.41421).fract() * 15.0 - 7.5,
                ]
            })
        })
        .collect();
    c.bench_function("convex_hull_area x1000", |b| {
        b.iter(|| {
            sets.iter()
                .map(|s| convex_hull_area(black_box(s)).m2)
                .sum::<f64>()
        })
    });
}

criterion_group!(
    benches,
    bench_filter,
    bench_segment,
    bench_sweep,
    bench_merge,
    bench_hull
);
criterion_main!(benches);

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use dasc_core::characterize::characterize;
use dasc_core::display_model::CaptureParams;
use dasc_core::dof_render::render_all_with;
use dasc_core::{Execution, LightField, View};

fn synthetic(cols: usize, rows: usize, w: usize, h: usize) -> LightField {
    let capture = CaptureParams {
        grid_cols: cols,
        grid_rows: rows,
        ..CaptureParams::default()
    };
    let views = (0..cols * rows)
        .map(|i| {
            let (s, t) = (i % cols, i / cols);
            View::from_fn(w, h, move |u, v| {
                let x = ((u + s) * 7 + (v + t) * 13) % 31;
                [x as f64 / 31.0, ((u * v) % 17) as f64 / 17.0, 0.5]
            })
        })
        .collect();
    LightField::from_views(capture, views).unwrap()
}

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn bench_render(c: &mut Criterion) {
    let lf = synthetic(9, 9, 64, 64);
    let mut group = c.benchmark_group("render_all");
    for r in [1u32, 4] {
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, r), &r, |b, &r| {
                b.iter(|| render_all_with(black_box(&lf), r, exec))
            });
        }
    }
    group.finish();
}

fn bench_characterize(c: &mut Criterion) {
    let lf = synthetic(7, 7, 96, 96);
    let mut group = c.benchmark_group("characterize");
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| characterize(black_box(&lf), "bench", exec)));
    }
    group.finish();
}

criterion_group!(benches, bench_render, bench_characterize);
criterion_main!(benches);

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dasc_core::display_model::CaptureParams;
use dasc_core::dof_render::{circular_mask, filter_view, render_all, render_all_with};
use dasc_core::{Execution, LightField, View};

fn capture(cols: usize, rows: usize) -> CaptureParams {
    CaptureParams {
        grid_cols: cols,
        grid_rows: rows,
        ..CaptureParams::default()
    }
}

fn random_field(rng: &mut ChaCha8Rng, cols: usize, rows: usize, w: usize, h: usize) -> LightField {
    let views = (0..cols * rows)
        .map(|_| View::from_raw(w, h, (0..w * h * 3).map(|_| rng.random::<f64>()).collect()))
        .collect();
    LightField::from_views(capture(cols, rows), views).unwrap()
}

fn combine(a: &LightField, b: &LightField, x: f64, y: f64) -> LightField {
    let views = a
        .views()
        .iter()
        .zip(b.views())
        .map(|(va, vb)| {
            View::from_raw(
                va.width(),
                va.height(),
                va.data().iter().zip(vb.data()).map(|(p, q)| x * p + y * q).collect(),
            )
        })
        .collect();
    LightField::from_views(*a.capture(), views).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn filter_is_linear(seed in any::<u64>(), r in 0u32..4, x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_field(&mut rng, 4, 3, 5, 4);
        let b = random_field(&mut rng, 4, 3, 5, 4);
        let lhs = render_all(&combine(&a, &b, x, y), r);
        let rhs = combine(&render_all(&a, r), &render_all(&b, r), x, y);
        for (p, q) in lhs.views().iter().zip(rhs.views()) {
            for (u, v) in p.data().iter().zip(q.data()) {
                prop_assert!((u - v).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn output_is_convex_combination_of_mask(seed in any::<u64>(), r in 0u32..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lf = random_field(&mut rng, 5, 4, 3, 3);
        let out = render_all(&lf, r);
        for t in 0..4 {
            for s in 0..5 {
                let mask = circular_mask(r, (s, t), (5, 4)).unwrap();
                let view = out.view(s, t).unwrap();
                for k in 0..view.data().len() {
                    let vals = mask.members().iter().map(|&(ms, mt)| lf.view(ms, mt).unwrap().data()[k]);
                    let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), x| (l.min(x), h.max(x)));
                    let got = view.data()[k];
                    prop_assert!(got >= lo - 1e-15 && got <= hi + 1e-15);
                }
            }
        }
    }
}

#[test]
fn strategies_are_bit_identical() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let lf = random_field(&mut rng, 6, 5, 8, 8);
    for r in [0, 1, 2, 5] {
        let a = render_all_with(&lf, r, Execution::Sequential);
        let b = render_all_with(&lf, r, Execution::Parallel);
        assert_eq!(a.views(), b.views());
    }
}

/// Sum of squared horizontal luminance differences.
fn high_frequency_energy(view: &View) -> f64 {
    let l = view.luminance();
    let mut e = 0.0;
    for v in 0..view.height() {
        for u in 0..view.width() - 1 {
            let d = l.get(u + 1, v) - l.get(u, v);
            e += d * d;
        }
    }
    e
}

#[test]
fn blur_energy_non_increasing_with_radius() {
    // One random texture seen with one pixel of disparity per view step.
    let (n, w, h) = (31, 48, 12);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let texture: Vec<f64> = (0..(w + 2 * n) * h).map(|_| rng.random()).collect();
    let tw = w + 2 * n;
    let views = (0..n * n)
        .map(|i| {
            let (s, t) = (i % n, i / n);
            View::from_fn(w, h, |u, v| [texture[v * tw + u + s + t]; 3])
        })
        .collect();
    let lf = LightField::from_views(capture(n, n), views).unwrap();
    let center = (n / 2, n / 2);
    let energies: Vec<f64> = [0u32, 3, 6, 9, 12, 15]
        .iter()
        .map(|&r| high_frequency_energy(&filter_view(&lf, r, center).unwrap()))
        .collect();
    for pair in energies.windows(2) {
        assert!(pair[1] <= pair[0], "{energies:?}");
    }
    assert!(energies[5] < 0.2 * energies[0]);
}

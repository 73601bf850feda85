#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dasc_core::io::{write_pfm, write_rgb, SampleDepth};
use dasc_core::{Plane, View};

pub fn dasc() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dasc"))
}

pub fn run_ok(args: &[&str]) -> Output {
    let out = dasc().args(args).output().expect("spawn dasc");
    assert!(
        out.status.success(),
        "dasc {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

/// Vote counts for one scene as `(radius_i, radius_j, wins_i, wins_j)`.
pub type PairCounts = [(u32, u32, u64, u64)];

/// Vessels-like tallies: peaks at 0 and 9, with 24 vs 12 votes on (0, 9).
pub const VESSELS: &PairCounts = &[
    (0, 3, 22, 14),
    (0, 6, 25, 11),
    (0, 9, 24, 12),
    (3, 6, 20, 16),
    (3, 12, 21, 15),
    (6, 9, 10, 26),
    (9, 12, 25, 11),
    (9, 15, 27, 9),
    (12, 15, 19, 17),
];

/// Zoo-like tallies: same peaks, but (0, 9) split 16 vs 24.
pub const ZOO: &PairCounts = &[
    (0, 3, 22, 14),
    (0, 6, 25, 11),
    (0, 9, 16, 24),
    (3, 6, 20, 16),
    (3, 12, 21, 15),
    (6, 9, 10, 26),
    (9, 12, 25, 11),
    (9, 15, 27, 9),
    (12, 15, 19, 17),
];

pub fn votes_csv(scenes: &[(&str, &PairCounts)]) -> String {
    let mut out = String::from("participant,scene,radius_a,radius_b,choice\n");
    let mut k = 0;
    for (scene, pairs) in scenes {
        for &(ri, rj, wi, wj) in pairs.iter() {
            for (n, choice) in [(wi, "a"), (wj, "b")] {
                for _ in 0..n {
                    out.push_str(&format!("p{:02},{scene},{ri},{rj},{choice}\n", k % 27));
                    k += 1;
                }
            }
        }
    }
    out
}

pub fn texture(w: usize, h: usize, s: usize, t: usize) -> View {
    View::from_fn(w, h, |u, v| {
        let x = u + s + t;
        let a = ((x * 37 + v * 11) % 23) as f64 / 22.0;
        let b = ((x * 5 + v * 29) % 17) as f64 / 16.0;
        [a, b, 0.5 * (a + b)]
    })
}

/// A 3×3-view scene with two objects, one inside the DoF and one behind it.
pub fn write_scene(dir: &Path) -> PathBuf {
    let (w, h) = (20, 12);
    for t in 0..3 {
        for s in 0..3 {
            write_rgb(
                &dir.join(format!("v_{s:02}_{t:02}.png")),
                &texture(w, h, s, t),
                SampleDepth::Eight,
            )
            .unwrap();
        }
    }
    let labels = image::RgbImage::from_fn(w as u32, h as u32, |u, _| match u {
        0..=7 => image::Rgb([220, 40, 40]),
        10..=19 => image::Rgb([40, 40, 220]),
        _ => image::Rgb([0, 0, 0]),
    });
    labels.save(dir.join("labels.png")).unwrap();
    let depth = Plane::from_fn(w, h, |u, v| match u {
        0..=7 => -0.04 + 0.005 * u as f64 + 0.0003 * (v * v) as f64,
        10..=19 => 0.2 + 0.01 * (u - 10) as f64,
        _ => 0.0,
    });
    write_pfm(&dir.join("depth.pfm"), &depth).unwrap();
    let manifest = dir.join("manifest.json");
    std::fs::write(
        &manifest,
        r#"{
  "scene": "fixture",
  "grid": {"rows": 3, "cols": 3},
  "view_pattern": "v_{s:02}_{t:02}.png",
  "view_spacing_m": 0.00377,
  "viewer_distance_m": 3.0,
  "depth": {"path": "depth.pfm", "format": "pfm"},
  "segmentation": {"path": "labels.png", "background": [0, 0, 0]}
}"#,
    )
    .unwrap();
    manifest
}

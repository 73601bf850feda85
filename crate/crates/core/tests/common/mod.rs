#![allow(dead_code)]

use std::path::{Path, PathBuf};

use dasc_core::io::{write_pfm, write_rgb, SampleDepth};
use dasc_core::{Plane, View};

/// Writes an 8-bit RGB view grid as `view_{s}_{t}.png` under `dir`.
pub fn write_grid(dir: &Path, cols: usize, rows: usize, view: impl Fn(usize, usize) -> View) {
    for t in 0..rows {
        for s in 0..cols {
            write_rgb(&dir.join(format!("view_{s}_{t}.png")), &view(s, t), SampleDepth::Eight).unwrap();
        }
    }
}

pub fn write_labels(path: &Path, w: usize, h: usize, label: impl Fn(usize, usize) -> [u8; 3]) {
    let img = image::RgbImage::from_fn(w as u32, h as u32, |u, v| image::Rgb(label(u as usize, v as usize)));
    img.save(path).unwrap();
}

pub fn write_depth(path: &Path, w: usize, h: usize, z: impl Fn(usize, usize) -> f64) {
    write_pfm(path, &Plane::from_fn(w, h, z)).unwrap();
}

/// Manifest for a `cols × rows` grid with optional depth and segmentation.
pub fn write_manifest(dir: &Path, cols: usize, rows: usize, with_maps: bool) -> PathBuf {
    let maps = if with_maps {
        r#","depth": {"path": "depth.pfm", "format": "pfm"},
  "segmentation": {"path": "labels.png", "background": [0, 0, 0]}"#
    } else {
        ""
    };
    let text = format!(
        r#"{{
  "scene": "fixture",
  "grid": {{"rows": {rows}, "cols": {cols}}},
  "view_pattern": "view_{{s}}_{{t}}.png",
  "view_spacing_m": 0.00377,
  "viewer_distance_m": 3.0{maps}
}}"#
    );
    let path = dir.join("manifest.json");
    std::fs::write(&path, text).unwrap();
    path
}

/// Deterministic texture with a per-view horizontal shift of `disparity * s`.
pub fn shifted_texture(w: usize, h: usize, s: usize, t: usize, disparity: usize) -> View {
    View::from_fn(w, h, |u, v| {
        let x = u + disparity * s + disparity * t;
        let a = ((x * 37 + v * 11) % 23) as f64 / 22.0;
        let b = ((x * 5 + v * 29) % 17) as f64 / 16.0;
        [a, b, 0.5 * (a + b)]
    })
}

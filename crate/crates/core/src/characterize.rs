//! Dataset heterogeneity features: spatial information (SI), angular
//! "temporal" information (TI), colorfulness (CF) and RMS contrast.
//!
//! - SI: std of the Sobel magnitude of luminance over interior pixels (the
//!   3×3 stencil stays inside the view; views narrower than 3 px give 0).
//! - TI: std of the per-pixel luminance difference between horizontal
//!   angular neighbors `(s, t)` and `(s + 1, t)`.
//! - CF: Hasler–Süsstrunk, `sqrt(var_rg + var_yb) + 0.3 * sqrt(mu_rg^2 + mu_yb^2)`
//!   with `rg = R - G`, `yb = (R + G) / 2 - B`.
//! - Contrast: std of luminance.
//!
//! All values are in `[0, 1]` intensity units.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::lightfield::LightField;
use crate::raster::{mean_std, View};

pub fn spatial_information(view: &View) -> f64 {
    let (w, h) = (view.width(), view.height());
    if w < 3 || h < 3 {
        return 0.0;
    }
    let luma = view.luminance();
    let mags = (1..h - 1).flat_map(|v| {
        let luma = &luma;
        (1..w - 1).map(move |u| {
            let (gx, gy) = luma.sobel(u, v);
            gx.hypot(gy)
        })
    });
    mean_std(mags).1
}

pub fn temporal_information(a: &View, b: &View) -> Result<f64> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(Error::DimensionMismatch {
            what: "second view",
            got_w: b.width(),
            got_h: b.height(),
            want_w: a.width(),
            want_h: a.height(),
        });
    }
    let (la, lb) = (a.luminance(), b.luminance());
    Ok(mean_std(la.data().iter().zip(lb.data()).map(|(x, y)| y - x)).1)
}

pub fn colorfulness(view: &View) -> f64 {
    let px = view.data().chunks_exact(3);
    let (mu_rg, sd_rg) = mean_std(px.clone().map(|p| p[0] - p[1]));
    let (mu_yb, sd_yb) = mean_std(px.map(|p| 0.5 * (p[0] + p[1]) - p[2]));
    (sd_rg * sd_rg + sd_yb * sd_yb).sqrt() + 0.3 * (mu_rg * mu_rg + mu_yb * mu_yb).sqrt()
}

pub fn contrast(view: &View) -> f64 {
    mean_std(view.luminance().data().iter().copied()).1
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesStats {
    pub max: f64,
    pub mean: f64,
}

impl SeriesStats {
    fn of(xs: &[f64]) -> Self {
        SeriesStats {
            max: xs.iter().copied().fold(0.0, f64::max),
            mean: if xs.is_empty() {
                0.0
            } else {
                xs.iter().sum::<f64>() / xs.len() as f64
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CharacterizationReport {
    pub scene: String,
    /// `((s, t), SI)` for every view, row-major.
    pub si: Vec<((usize, usize), f64)>,
    /// `((s, t), TI)` for the pair `(s, t)`–`(s + 1, t)`.
    pub ti: Vec<((usize, usize), f64)>,
    pub si_stats: SeriesStats,
    pub ti_stats: SeriesStats,
    /// Mean colorfulness over all views.
    pub colorfulness: f64,
    /// Mean RMS contrast over all views.
    pub contrast: f64,
}

pub fn characterize(lf: &LightField, scene: &str, exec: Execution) -> CharacterizationReport {
    let (cols, rows) = (lf.cols(), lf.rows());
    let views = lf.views();
    let n = cols * rows;

    let per_view = exec.map(n, |i| {
        let v = &views[i];
        (spatial_information(v), colorfulness(v), contrast(v))
    });
    let pairs: Vec<(usize, usize)> = (0..rows)
        .flat_map(|t| (0..cols.saturating_sub(1)).map(move |s| (s, t)))
        .collect();
    let ti_values = exec.map(pairs.len(), |k| {
        let (s, t) = pairs[k];
        temporal_information(&views[t * cols + s], &views[t * cols + s + 1]).expect("views share dimensions")
    });

    let si: Vec<_> = per_view
        .iter()
        .enumerate()
        .map(|(i, p)| ((i % cols, i / cols), p.0))
        .collect();
    let si_values: Vec<f64> = si.iter().map(|x| x.1).collect();
    CharacterizationReport {
        scene: scene.to_string(),
        si_stats: SeriesStats::of(&si_values),
        ti_stats: SeriesStats::of(&ti_values),
        si,
        ti: pairs.into_iter().zip(ti_values).collect(),
        colorfulness: per_view.iter().map(|p| p.1).sum::<f64>() / n as f64,
        contrast: per_view.iter().map(|p| p.2).sum::<f64>() / n as f64,
    }
}

impl CharacterizationReport {
    /// CSV with columns `scene,metric,s,t,value`; aggregate rows leave `s,t` empty.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let wrap = |e: csv::Error| Error::Csv {
            path: "<report>".into(),
            source: e,
        };
        w.write_record(["scene", "metric", "s", "t", "value"]).map_err(wrap)?;
        let scene = self.scene.as_str();
        for &((s, t), x) in &self.si {
            w.write_record([scene, "si", &s.to_string(), &t.to_string(), &x.to_string()])
                .map_err(wrap)?;
        }
        for &((s, t), x) in &self.ti {
            w.write_record([scene, "ti", &s.to_string(), &t.to_string(), &x.to_string()])
                .map_err(wrap)?;
        }
        for (name, x) in [
            ("si_max", self.si_stats.max),
            ("si_mean", self.si_stats.mean),
            ("ti_max", self.ti_stats.max),
            ("ti_mean", self.ti_stats.mean),
            ("colorfulness", self.colorfulness),
            ("contrast", self.contrast),
        ] {
            w.write_record([scene, name, "", "", &x.to_string()]).map_err(wrap)?;
        }
        w.flush().map_err(|e| Error::io("<report>", e))
    }
}

//! Full-parallax light field `L(s, t, u, v)` held as a grid of RGB views.

use std::path::Path;

use crate::display_model::CaptureParams;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::io::{self, SampleDepth};
use crate::manifest::{expand_pattern, Manifest};
use crate::raster::View;

/// Views are stored row-major in `(t, s)`: index `t * cols + s`.
#[derive(Debug, Clone, PartialEq)]
pub struct LightField {
    capture: CaptureParams,
    width: usize,
    height: usize,
    views: Vec<View>,
    sample_depth: SampleDepth,
}

impl LightField {
    /// Builds a light field from row-major views. Grid size comes from
    /// `capture.grid_cols` × `capture.grid_rows`.
    pub fn from_views(capture: CaptureParams, views: Vec<View>) -> Result<Self> {
        let (cols, rows) = (capture.grid_cols, capture.grid_rows);
        if views.len() != cols * rows {
            return Err(Error::param(
                "views",
                format!("{} views for a {cols}x{rows} grid", views.len()),
            ));
        }
        let (width, height) = (views[0].width(), views[0].height());
        for (i, v) in views.iter().enumerate() {
            if v.width() != width || v.height() != height {
                return Err(Error::ViewDimensions {
                    s: i % cols,
                    t: i / cols,
                    got_w: v.width(),
                    got_h: v.height(),
                    want_w: width,
                    want_h: height,
                });
            }
        }
        Ok(LightField {
            capture,
            width,
            height,
            views,
            sample_depth: SampleDepth::Eight,
        })
    }

    pub fn with_sample_depth(mut self, depth: SampleDepth) -> Self {
        self.sample_depth = depth;
        self
    }

    pub fn capture(&self) -> &CaptureParams {
        &self.capture
    }

    /// Number of views along `s`.
    pub fn cols(&self) -> usize {
        self.capture.grid_cols
    }

    /// Number of views along `t`.
    pub fn rows(&self) -> usize {
        self.capture.grid_rows
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn sample_depth(&self) -> SampleDepth {
        self.sample_depth
    }

    pub fn sample_count(&self) -> usize {
        self.views.len() * self.width * self.height * 3
    }

    pub fn views(&self) -> &[View] {
        &self.views
    }

    pub fn view(&self, s: usize, t: usize) -> Result<&View> {
        if s >= self.cols() || t >= self.rows() {
            return Err(Error::ViewIndex {
                s,
                t,
                cols: self.cols(),
                rows: self.rows(),
            });
        }
        Ok(&self.views[t * self.cols() + s])
    }

    /// Writes every view as PNG into `dir` using `pattern` (see
    /// [`expand_pattern`]) at the field's sample depth.
    pub fn write_views(&self, dir: &Path, pattern: &str) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for t in 0..self.rows() {
            for s in 0..self.cols() {
                let name = expand_pattern(pattern, s, t).map_err(|r| Error::param("pattern", r))?;
                let path = dir.join(name);
                if let Some(parent) = path.parent() {
                    std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
                }
                io::write_rgb(&path, &self.views[t * self.cols() + s], self.sample_depth)?;
            }
        }
        Ok(())
    }
}

pub fn load_light_field(manifest_path: &Path) -> Result<LightField> {
    let manifest = Manifest::load(manifest_path)?;
    load_from_manifest(&manifest, Execution::default())
}

pub fn load_from_manifest(manifest: &Manifest, exec: Execution) -> Result<LightField> {
    let (cols, rows) = (manifest.grid.cols, manifest.grid.rows);

    // Report the first absent file in row-major order before decoding anything.
    for t in 0..rows {
        for s in 0..cols {
            let path = manifest.view_path(s, t);
            if !path.is_file() {
                return Err(Error::MissingView { s, t, path });
            }
        }
    }

    let decoded = exec.try_map(cols * rows, |i| io::read_rgb(&manifest.view_path(i % cols, i / cols)))?;
    let sample_depth = decoded[0].1;
    let views: Vec<View> = decoded.into_iter().map(|(v, _)| v).collect();
    let capture = manifest.capture_params(views[0].width() as u32)?;
    Ok(LightField::from_views(capture, views)?.with_sample_depth(sample_depth))
}

/// Returns the `(s, t)` view without modification.
pub fn get_view(lf: &LightField, s: usize, t: usize) -> Result<&View> {
    lf.view(s, t)
}

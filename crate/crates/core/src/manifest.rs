//! JSON manifest describing a light field scene on disk.
//!
//! ```json
//! {
//!   "scene": "vessels",
//!   "grid": { "rows": 3, "cols": 3 },
//!   "view_pattern": "views/view_{t:02}_{s:02}.png",
//!   "view_spacing_m": 0.00377,
//!   "viewer_distance_m": 3.0,
//!   "depth": { "path": "depth.pfm", "format": "pfm" },
//!   "segmentation": { "path": "seg.png", "background": [0, 0, 0] },
//!   "display": { "dof_range_m": 0.2 }
//! }
//! ```
//!
//! Relative paths resolve against the manifest's directory.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::display_model::{CaptureParams, DisplayParams};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    pub rows: usize,
    pub cols: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "format", rename_all = "snake_case")]
pub enum DepthEncoding {
    /// Single-channel float32 PFM.
    Pfm,
    /// 16-bit grayscale PNG, `value = sample * scale + offset`.
    Png16 { scale: f64, offset: f64 },
}

/// What the stored depth values measure.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DepthConvention {
    /// Signed meters from the screen plane, negative in front.
    #[default]
    ScreenSigned,
    /// Distance from the camera plane; the screen sits at `screen_distance_m`.
    CameraDistance { screen_distance_m: f64 },
}

impl DepthConvention {
    pub fn to_screen_signed(self, stored: f64) -> f64 {
        match self {
            DepthConvention::ScreenSigned => stored,
            DepthConvention::CameraDistance { screen_distance_m } => stored - screen_distance_m,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthSource {
    pub path: PathBuf,
    #[serde(flatten)]
    pub encoding: DepthEncoding,
    #[serde(default)]
    pub convention: DepthConvention,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentationSource {
    pub path: PathBuf,
    #[serde(default)]
    pub background: Option<[u8; 3]>,
    #[serde(default)]
    pub exclude: Vec<[u8; 3]>,
}

/// Optional per-scene overrides of [`DisplayParams::default`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisplayOverrides {
    pub angular_resolution_deg: Option<f64>,
    pub pixel_size_m: Option<f64>,
    pub viewer_distance_m: Option<f64>,
    pub fov_deg: Option<f64>,
    pub spatial_resolution_px: Option<u32>,
    pub dof_range_m: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    #[serde(default)]
    pub scene: Option<String>,
    pub grid: Grid,
    /// Must contain `{s}` and `{t}`, optionally zero padded as `{t:02}`.
    pub view_pattern: String,
    pub view_spacing_m: f64,
    pub viewer_distance_m: f64,
    /// Defaults to `(max(rows, cols) - 1) * view_spacing_m`, at least one spacing.
    #[serde(default)]
    pub baseline_m: Option<f64>,
    /// `[s, t]` of the view used for scene features; defaults to the grid center.
    #[serde(default)]
    pub central_view: Option<[usize; 2]>,
    #[serde(default)]
    pub depth: Option<DepthSource>,
    #[serde(default)]
    pub segmentation: Option<SegmentationSource>,
    #[serde(default)]
    pub display: DisplayOverrides,

    #[serde(skip)]
    base_dir: PathBuf,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut m: Manifest = serde_json::from_str(&text).map_err(|e| Error::Manifest {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        m.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        m.validate().map_err(|reason| Error::Manifest {
            path: path.to_path_buf(),
            reason,
        })?;
        Ok(m)
    }

    /// Parses manifest text, resolving relative paths against `base_dir`.
    pub fn from_json(text: &str, base_dir: &Path) -> Result<Self> {
        let mut m: Manifest = serde_json::from_str(text)?;
        m.base_dir = base_dir.to_path_buf();
        m.validate().map_err(|reason| Error::Manifest {
            path: base_dir.to_path_buf(),
            reason,
        })?;
        Ok(m)
    }

    fn validate(&self) -> std::result::Result<(), String> {
        if self.grid.rows == 0 || self.grid.cols == 0 {
            return Err("grid.rows and grid.cols must be at least 1".into());
        }
        parse_pattern(&self.view_pattern)?;
        let mut names: Vec<String> = (0..self.grid.rows)
            .flat_map(|t| (0..self.grid.cols).map(move |s| (s, t)))
            .map(|(s, t)| expand_pattern(&self.view_pattern, s, t))
            .collect::<std::result::Result<_, _>>()?;
        names.sort();
        names.dedup();
        if names.len() != self.grid.rows * self.grid.cols {
            return Err(format!(
                "view_pattern `{}` does not produce {} distinct file names",
                self.view_pattern,
                self.grid.rows * self.grid.cols
            ));
        }
        if let Some([s, t]) = self.central_view {
            if s >= self.grid.cols || t >= self.grid.rows {
                return Err(format!("central_view [{s}, {t}] outside grid"));
            }
        }
        Ok(())
    }

    pub fn base_dir(&self) -> &Path {
        &self.base_dir
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn view_path(&self, s: usize, t: usize) -> PathBuf {
        let name = expand_pattern(&self.view_pattern, s, t).expect("pattern validated at load");
        self.resolve(Path::new(&name))
    }

    pub fn central_view(&self) -> (usize, usize) {
        match self.central_view {
            Some([s, t]) => (s, t),
            None => (self.grid.cols / 2, self.grid.rows / 2),
        }
    }

    pub fn display_params(&self) -> Result<DisplayParams> {
        let d = DisplayParams::default();
        let o = &self.display;
        let p = DisplayParams {
            angular_resolution_deg: o.angular_resolution_deg.unwrap_or(d.angular_resolution_deg),
            pixel_size_m: o.pixel_size_m.unwrap_or(d.pixel_size_m),
            viewer_distance_m: o.viewer_distance_m.unwrap_or(d.viewer_distance_m),
            fov_deg: o.fov_deg.unwrap_or(d.fov_deg),
            spatial_resolution_px: o.spatial_resolution_px.unwrap_or(d.spatial_resolution_px),
            dof_range_m: o.dof_range_m.unwrap_or(d.dof_range_m),
        };
        p.validate()?;
        Ok(p)
    }

    /// Capture geometry; `view_resolution_px` is filled in from the decoded
    /// views by the loader.
    pub fn capture_params(&self, view_resolution_px: u32) -> Result<CaptureParams> {
        let span = (self.grid.rows.max(self.grid.cols) - 1).max(1) as f64;
        let c = CaptureParams {
            view_spacing_m: self.view_spacing_m,
            viewer_distance_m: self.viewer_distance_m,
            baseline_m: self.baseline_m.unwrap_or(span * self.view_spacing_m),
            view_resolution_px,
            grid_rows: self.grid.rows,
            grid_cols: self.grid.cols,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn scene_name(&self) -> String {
        self.scene.clone().unwrap_or_else(|| {
            self.base_dir
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| "scene".to_string())
        })
    }
}

enum Piece<'a> {
    Lit(&'a str),
    Field { s_axis: bool, width: usize },
}

fn parse_pattern(pattern: &str) -> std::result::Result<Vec<Piece<'_>>, String> {
    let mut pieces = Vec::new();
    let mut rest = pattern;
    let (mut has_s, mut has_t) = (false, false);
    while let Some(open) = rest.find('{') {
        if open > 0 {
            pieces.push(Piece::Lit(&rest[..open]));
        }
        let close = rest[open..]
            .find('}')
            .ok_or_else(|| format!("unclosed `{{` in view_pattern `{pattern}`"))?
            + open;
        let field = &rest[open + 1..close];
        let (name, width) = match field.split_once(':') {
            Some((n, w)) => {
                let w = w
                    .parse::<usize>()
                    .map_err(|_| format!("bad width `{w}` in view_pattern `{pattern}`"))?;
                (n, w)
            }
            None => (field, 0),
        };
        let s_axis = match name {
            "s" => {
                has_s = true;
                true
            }
            "t" => {
                has_t = true;
                false
            }
            other => return Err(format!("unknown field `{{{other}}}` in view_pattern `{pattern}`")),
        };
        pieces.push(Piece::Field { s_axis, width });
        rest = &rest[close + 1..];
    }
    if !rest.is_empty() {
        pieces.push(Piece::Lit(rest));
    }
    if !(has_s && has_t) {
        return Err(format!("view_pattern `{pattern}` must contain both {{s}} and {{t}}"));
    }
    Ok(pieces)
}

/// Expands `{s}`/`{t}` (optionally `{s:03}`) in a view file-name pattern.
pub fn expand_pattern(pattern: &str, s: usize, t: usize) -> std::result::Result<String, String> {
    let mut out = String::new();
    for piece in parse_pattern(pattern)? {
        match piece {
            Piece::Lit(l) => out.push_str(l),
            Piece::Field { s_axis, width } => {
                let x = if s_axis { s } else { t };
                out.push_str(&format!("{x:0width$}"));
            }
        }
    }
    Ok(out)
}

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: &'static str, reason: String },

    #[error("invalid capture geometry: angular resolution must be positive (got {0}°)")]
    InvalidCaptureGeometry(f64),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot decode image {path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("malformed manifest {path}: {reason}")]
    Manifest { path: PathBuf, reason: String },

    #[error("missing view file for (s={s}, t={t}): {path}")]
    MissingView { s: usize, t: usize, path: PathBuf },

    #[error("view (s={s}, t={t}) is {got_w}x{got_h}, expected {want_w}x{want_h}")]
    ViewDimensions {
        s: usize,
        t: usize,
        got_w: usize,
        got_h: usize,
        want_w: usize,
        want_h: usize,
    },

    #[error("dimension mismatch: {what} is {got_w}x{got_h}, expected {want_w}x{want_h}")]
    DimensionMismatch {
        what: &'static str,
        got_w: usize,
        got_h: usize,
        want_w: usize,
        want_h: usize,
    },

    #[error("view index (s={s}, t={t}) outside {cols}x{rows} grid")]
    ViewIndex {
        s: usize,
        t: usize,
        cols: usize,
        rows: usize,
    },

    #[error("malformed PFM {path}: {reason}")]
    Pfm { path: PathBuf, reason: String },

    #[error("segmentation map contains no objects after background exclusion")]
    NoObjects,

    #[error("empty region")]
    EmptyRegion,

    #[error("region {label} has no pixel with a complete second-difference stencil")]
    RegionTooSmall { label: String },

    #[error("stimulus {index} (radius {radius}) has zero wins or no comparisons; enable smoothing to regularize")]
    DegenerateStimulus { index: usize, radius: u32 },

    #[error("no comparisons between the two stimuli")]
    NoComparisons,

    #[error("votes {path}, line {line}: {reason}")]
    Votes { path: PathBuf, line: u64, reason: String },

    #[error("no usable comparison between radii {r1} and {r2}")]
    MissingPair { r1: u32, r2: u32 },

    #[error("null hypothesis accepted but no peak radius exceeds the optimal radius {r_hat}")]
    NoPeakAboveOptimal { r_hat: u32 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("fit did not converge after {iterations} iterations (best residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("csv error on {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            name,
            reason: reason.into(),
        }
    }
}

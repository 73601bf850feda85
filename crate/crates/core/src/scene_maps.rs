//! Depth and segmentation maps, and per-object pixel regions.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::io;
use crate::manifest::{DepthEncoding, Manifest};
use crate::raster::Plane;

/// Signed depth in meters from the screen plane; negative is in front.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthMap(Plane);

impl DepthMap {
    pub fn new(plane: Plane) -> Result<Self> {
        if let Some(i) = plane.data().iter().position(|z| !z.is_finite()) {
            return Err(Error::param(
                "depth",
                format!("non-finite depth at (u={}, v={})", i % plane.width(), i / plane.width()),
            ));
        }
        Ok(DepthMap(plane))
    }

    pub fn from_fn(width: usize, height: usize, f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        DepthMap::new(Plane::from_fn(width, height, f))
    }

    pub fn plane(&self) -> &Plane {
        &self.0
    }

    pub fn width(&self) -> usize {
        self.0.width()
    }

    pub fn height(&self) -> usize {
        self.0.height()
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.0.get(u, v)
    }

    #[inline]
    pub(crate) fn at_index(&self, i: usize) -> f64 {
        self.0.data()[i]
    }
}

/// Object label: the RGB color of the object's area in the segmentation map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(pub [u8; 3]);

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [r, g, b] = self.0;
        write!(f, "#{r:02x}{g:02x}{b:02x}")
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentationMap {
    width: usize,
    height: usize,
    labels: Vec<Label>,
    background: Option<Label>,
    excluded: Vec<Label>,
}

impl SegmentationMap {
    pub fn new(width: usize, height: usize, labels: Vec<Label>) -> Self {
        assert_eq!(labels.len(), width * height, "label buffer size");
        SegmentationMap {
            width,
            height,
            labels,
            background: None,
            excluded: Vec::new(),
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> Label) -> Self {
        let mut labels = Vec::with_capacity(width * height);
        for v in 0..height {
            for u in 0..width {
                labels.push(f(u, v));
            }
        }
        SegmentationMap::new(width, height, labels)
    }

    pub fn with_background(mut self, background: Option<Label>) -> Self {
        self.background = background;
        self
    }

    pub fn with_excluded(mut self, excluded: Vec<Label>) -> Self {
        self.excluded = excluded;
        self
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn label(&self, u: usize, v: usize) -> Label {
        self.labels[v * self.width + u]
    }

    pub fn is_object(&self, label: Label) -> bool {
        self.background != Some(label) && !self.excluded.contains(&label)
    }
}

/// Pixels of one object plus their depth extremes.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectRegion {
    label: Label,
    image_width: usize,
    /// Row-major linear indices, ascending.
    pixels: Vec<usize>,
    z_min: f64,
    z_max: f64,
}

impl ObjectRegion {
    pub fn label(&self) -> Label {
        self.label
    }

    pub fn area(&self) -> usize {
        self.pixels.len()
    }

    pub fn z_min(&self) -> f64 {
        self.z_min
    }

    pub fn z_max(&self) -> f64 {
        self.z_max
    }

    pub fn linear_indices(&self) -> &[usize] {
        &self.pixels
    }

    /// `(u, v)` coordinates in row-major order.
    pub fn pixels(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.image_width;
        self.pixels.iter().map(move |&i| (i % w, i / w))
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        u < self.image_width && self.pixels.binary_search(&(v * self.image_width + u)).is_ok()
    }

    /// Signed-coordinate membership test; anything off-image is outside.
    pub(crate) fn contains_signed(&self, u: isize, v: isize) -> bool {
        u >= 0 && v >= 0 && self.contains(u as usize, v as usize)
    }
}

/// One region per object label, sorted by label.
pub fn extract_objects(seg: &SegmentationMap, depth: &DepthMap) -> Result<Vec<ObjectRegion>> {
    if seg.width != depth.width() || seg.height != depth.height() {
        return Err(Error::DimensionMismatch {
            what: "segmentation map",
            got_w: seg.width,
            got_h: seg.height,
            want_w: depth.width(),
            want_h: depth.height(),
        });
    }
    let mut groups: BTreeMap<Label, Vec<usize>> = BTreeMap::new();
    for (i, &label) in seg.labels.iter().enumerate() {
        if seg.is_object(label) {
            groups.entry(label).or_default().push(i);
        }
    }
    if groups.is_empty() {
        return Err(Error::NoObjects);
    }
    Ok(groups
        .into_iter()
        .map(|(label, pixels)| {
            let (z_min, z_max) = pixels.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                let z = depth.at_index(i);
                (lo.min(z), hi.max(z))
            });
            ObjectRegion {
                label,
                image_width: seg.width,
                pixels,
                z_min,
                z_max,
            }
        })
        .collect())
}

/// Loads the manifest's depth map, converted to signed screen-relative meters.
pub fn load_depth(manifest: &Manifest) -> Result<DepthMap> {
    let src = manifest.depth.as_ref().ok_or_else(|| Error::Manifest {
        path: manifest.base_dir().to_path_buf(),
        reason: "missing `depth` entry".into(),
    })?;
    let path = manifest.resolve(&src.path);
    let raw = match src.encoding {
        DepthEncoding::Pfm => io::read_pfm(&path)?,
        DepthEncoding::Png16 { scale, offset } => io::read_png16_depth(&path, scale, offset)?,
    };
    let conv = src.convention;
    let plane = Plane::from_fn(raw.width(), raw.height(), |u, v| conv.to_screen_signed(raw.get(u, v)));
    DepthMap::new(plane)
}

pub fn load_segmentation(manifest: &Manifest) -> Result<SegmentationMap> {
    let src = manifest.segmentation.as_ref().ok_or_else(|| Error::Manifest {
        path: manifest.base_dir().to_path_buf(),
        reason: "missing `segmentation` entry".into(),
    })?;
    let (w, h, raw) = io::read_labels(&manifest.resolve(&src.path))?;
    Ok(SegmentationMap::new(w, h, raw.into_iter().map(Label).collect())
        .with_background(src.background.map(Label))
        .with_excluded(src.exclude.iter().copied().map(Label).collect()))
}

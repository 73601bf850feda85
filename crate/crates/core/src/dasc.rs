//! Scene score `f`: the mean over objects of `(1 - omega) * nu * psi`, where
//! `nu` averages the normalized geometric factors and `psi` weights by how
//! the object's depth extremes sit relative to the DoF slab.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometric_factors::{
    edge_threshold, geometric_factors, normalize_factors, GeometricFactors, NormalizedGeometricFactors,
};
use crate::io;
use crate::manifest::Manifest;
use crate::position_factors::{in_slab, position_factors, PositionFactors};
use crate::raster::View;
use crate::scene_maps::{extract_objects, load_depth, load_segmentation, DepthMap, Label, SegmentationMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PsiCase {
    /// Both extremes inside the slab.
    Inside,
    /// Both extremes outside.
    BothOut,
    /// Only the back extreme (`z_max`) is outside.
    BackOut,
    /// Only the front extreme (`z_min`) is outside.
    FrontOut,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Psi {
    pub case: PsiCase,
    /// `None` for an `Inside` object fully in the slab (`omega = 1`), where
    /// `-l / (1 - omega)` is undefined; its contribution is still `-nu * l`.
    pub value: Option<f64>,
}

pub fn nu(f: &NormalizedGeometricFactors) -> f64 {
    (f.curvature_norm + f.edge_norm + f.entropy_norm) / 3.0
}

pub fn psi_case(z_min: f64, z_max: f64, pos: &PositionFactors, d_phi: f64) -> Psi {
    let front_out = !in_slab(z_min, d_phi);
    let back_out = !in_slab(z_max, d_phi);
    match (front_out, back_out) {
        (false, false) => {
            let rest = 1.0 - pos.dof_overlap;
            Psi {
                case: PsiCase::Inside,
                value: (rest > 0.0).then(|| -pos.span_l / rest),
            }
        }
        (true, true) => Psi {
            case: PsiCase::BothOut,
            value: Some(pos.d_min + pos.d_max),
        },
        (false, true) => Psi {
            case: PsiCase::BackOut,
            value: Some(pos.d_max),
        },
        (true, false) => Psi {
            case: PsiCase::FrontOut,
            value: Some(pos.d_min),
        },
    }
}

/// Per-object term of the score. `Inside` uses the cancelled form `-nu * l`.
pub fn contribution(nu: f64, psi: &Psi, pos: &PositionFactors) -> f64 {
    match psi.case {
        PsiCase::Inside => -nu * pos.span_l,
        _ => (1.0 - pos.dof_overlap) * nu * psi.value.expect("outside cases always carry psi"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectInput {
    pub label: Label,
    pub nu: f64,
    pub psi: Psi,
    pub position: PositionFactors,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObjectTerm {
    pub label: Label,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub area: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factors: Option<GeometricFactors>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalized: Option<NormalizedGeometricFactors>,
    pub position: PositionFactors,
    pub nu: f64,
    pub case: PsiCase,
    pub psi: Option<f64>,
    pub contribution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DascResult {
    pub scene: String,
    pub f: f64,
    pub m: usize,
    pub d_phi: Option<f64>,
    pub edge_threshold: f64,
    pub per_object: Vec<ObjectTerm>,
}

/// Sum in ascending value order so the result does not depend on object order.
fn order_free_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v.into_iter().sum()
}

pub fn aggregate(objects: &[ObjectInput]) -> Result<DascResult> {
    if objects.is_empty() {
        return Err(Error::NoObjects);
    }
    let per_object: Vec<ObjectTerm> = objects
        .iter()
        .map(|o| ObjectTerm {
            label: o.label,
            area: None,
            z_min: None,
            z_max: None,
            factors: None,
            normalized: None,
            position: o.position,
            nu: o.nu,
            case: o.psi.case,
            psi: o.psi.value,
            contribution: contribution(o.nu, &o.psi, &o.position),
        })
        .collect();
    let m = per_object.len();
    let f = order_free_sum(per_object.iter().map(|t| t.contribution)) / m as f64;
    Ok(DascResult {
        scene: String::new(),
        f,
        m,
        d_phi: None,
        edge_threshold: edge_threshold(),
        per_object,
    })
}

/// Full pipeline on in-memory maps: regions, factors, normalization, score.
pub fn compute_scene(
    scene: &str,
    image: &View,
    depth: &DepthMap,
    seg: &SegmentationMap,
    d_phi: f64,
    exec: Execution,
) -> Result<DascResult> {
    if !(d_phi.is_finite() && d_phi > 0.0) {
        return Err(Error::param("d_phi", format!("must be > 0, got {d_phi}")));
    }
    if image.width() != depth.width() || image.height() != depth.height() {
        return Err(Error::DimensionMismatch {
            what: "central view",
            got_w: image.width(),
            got_h: image.height(),
            want_w: depth.width(),
            want_h: depth.height(),
        });
    }
    let regions = extract_objects(seg, depth)?;
    let luma = image.luminance();
    let raw: Vec<GeometricFactors> =
        exec.try_map(regions.len(), |i| geometric_factors(image, &luma, depth, &regions[i]))?;
    let normalized = normalize_factors(&raw);

    let inputs: Vec<ObjectInput> = regions
        .iter()
        .zip(&normalized)
        .map(|(r, n)| {
            let position = position_factors(r, depth, d_phi);
            ObjectInput {
                label: r.label(),
                nu: nu(n),
                psi: psi_case(r.z_min(), r.z_max(), &position, d_phi),
                position,
            }
        })
        .collect();

    let mut result = aggregate(&inputs)?;
    for (((term, r), g), n) in result.per_object.iter_mut().zip(&regions).zip(&raw).zip(&normalized) {
        term.area = Some(r.area());
        term.z_min = Some(r.z_min());
        term.z_max = Some(r.z_max());
        term.factors = Some(*g);
        term.normalized = Some(*n);
    }
    result.scene = scene.to_string();
    result.d_phi = Some(d_phi);
    Ok(result)
}

/// Runs the pipeline on the manifest's central view, depth and segmentation,
/// with the DoF range from the manifest's display parameters.
pub fn compute_dasc(manifest_path: &Path) -> Result<DascResult> {
    let manifest = Manifest::load(manifest_path)?;
    compute_dasc_from_manifest(&manifest, Execution::default())
}

pub fn compute_dasc_from_manifest(manifest: &Manifest, exec: Execution) -> Result<DascResult> {
    let display = manifest.display_params()?;
    let (s, t) = manifest.central_view();
    let path = manifest.view_path(s, t);
    if !path.is_file() {
        return Err(Error::MissingView { s, t, path });
    }
    let (image, _) = io::read_rgb(&path)?;
    let depth = load_depth(manifest)?;
    let seg = load_segmentation(manifest)?;
    compute_scene(&manifest.scene_name(), &image, &depth, &seg, display.dof_range_m, exec)
}

impl DascResult {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One row per object: raw and normalized geometric factors plus position factors.
    pub fn write_factors_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let wrap = |e: csv::Error| Error::Csv {
            path: "<factors>".into(),
            source: e,
        };
        w.write_record([
            "scene",
            "label",
            "entropy_bits",
            "edge_density",
            "curvature_std",
            "entropy_norm",
            "edge_norm",
            "curvature_norm",
            "dof_overlap",
            "d_min",
            "d_max",
            "span_l",
        ])
        .map_err(wrap)?;
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        for t in &self.per_object {
            w.write_record([
                self.scene.clone(),
                t.label.to_string(),
                opt(t.factors.map(|f| f.entropy_bits)),
                opt(t.factors.map(|f| f.edge_density)),
                opt(t.factors.map(|f| f.curvature_std)),
                opt(t.normalized.map(|f| f.entropy_norm)),
                opt(t.normalized.map(|f| f.edge_norm)),
                opt(t.normalized.map(|f| f.curvature_norm)),
                t.position.dof_overlap.to_string(),
                t.position.d_min.to_string(),
                t.position.d_max.to_string(),
                t.position.span_l.to_string(),
            ])
            .map_err(wrap)?;
        }
        w.flush().map_err(|e| Error::io("<factors>", e))
    }
}

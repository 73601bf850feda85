//! Object position relative to the display's DoF slab `|z| <= d_phi / 2`.
//! Distances are expressed in units of the DoF range `d_phi`.

use serde::Serialize;

use crate::scene_maps::{DepthMap, ObjectRegion};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PositionFactors {
    /// Fraction of the object's pixels inside the slab.
    pub dof_overlap: f64,
    pub d_min: f64,
    pub d_max: f64,
    pub span_l: f64,
}

#[inline]
pub fn in_slab(z: f64, d_phi: f64) -> bool {
    z.abs() <= 0.5 * d_phi
}

pub fn dof_overlap(region: &ObjectRegion, depth: &DepthMap, d_phi: f64) -> f64 {
    if region.area() == 0 {
        return 0.0;
    }
    let inside = region
        .pixels()
        .filter(|&(u, v)| in_slab(depth.get(u, v), d_phi))
        .count();
    inside as f64 / region.area() as f64
}

/// Distance from `extreme_z` to the nearer slab boundary, in DoF units.
pub fn dof_distance(extreme_z: f64, d_phi: f64) -> f64 {
    let half = 0.5 * d_phi;
    (extreme_z - half).abs().min((extreme_z + half).abs()) / d_phi
}

pub fn object_span(region: &ObjectRegion, d_phi: f64) -> f64 {
    (region.z_max() - region.z_min()).abs() / d_phi
}

pub fn position_factors(region: &ObjectRegion, depth: &DepthMap, d_phi: f64) -> PositionFactors {
    PositionFactors {
        dof_overlap: dof_overlap(region, depth, d_phi),
        d_min: dof_distance(region.z_min(), d_phi),
        d_max: dof_distance(region.z_max(), d_phi),
        span_l: object_span(region, d_phi),
    }
}

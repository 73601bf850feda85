//! Display and capture geometry, and the display's depth-of-field model.
//!
//! Angles are degrees in every public field and argument and are converted
//! to radians once, inside the functions that need trigonometry.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Light field display parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisplayParams {
    pub angular_resolution_deg: f64,
    pub pixel_size_m: f64,
    pub viewer_distance_m: f64,
    pub fov_deg: f64,
    pub spatial_resolution_px: u32,
    /// Operational DoF range. Kept independent of [`dof_half_depth`]: the
    /// reference display quotes 0.2 m while the feature-size model gives
    /// about 0.145 m for the same pixel size and angular rate.
    pub dof_range_m: f64,
}

impl Default for DisplayParams {
    /// Holovizio 722RC class display used for the reference dataset.
    fn default() -> Self {
        DisplayParams {
            angular_resolution_deg: 0.95,
            pixel_size_m: 1.2e-3,
            viewer_distance_m: 3.0,
            fov_deg: 70.0,
            spatial_resolution_px: 1280,
            dof_range_m: 0.2,
        }
    }
}

impl DisplayParams {
    pub fn validate(&self) -> Result<()> {
        positive("angular_resolution_deg", self.angular_resolution_deg)?;
        positive("pixel_size_m", self.pixel_size_m)?;
        positive("viewer_distance_m", self.viewer_distance_m)?;
        positive("fov_deg", self.fov_deg)?;
        positive("dof_range_m", self.dof_range_m)?;
        if self.spatial_resolution_px == 0 {
            return Err(Error::param("spatial_resolution_px", "must be positive"));
        }
        if self.angular_resolution_deg >= self.fov_deg {
            return Err(Error::param(
                "angular_resolution_deg",
                format!(
                    "{} must be smaller than fov_deg {}",
                    self.angular_resolution_deg, self.fov_deg
                ),
            ));
        }
        Ok(())
    }

    /// DoF range implied by the feature-size model (`2 * dof_half_depth`).
    /// Diagnostic only; the metric uses `dof_range_m`.
    pub fn derived_dof_range_m(&self) -> f64 {
        2.0 * dof_half_depth(self)
    }
}

/// Capture geometry of a densely sampled light field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaptureParams {
    pub view_spacing_m: f64,
    pub viewer_distance_m: f64,
    pub baseline_m: f64,
    pub view_resolution_px: u32,
    pub grid_rows: usize,
    pub grid_cols: usize,
}

impl Default for CaptureParams {
    /// Reference rendering setup: 3.77 mm spacing over a 2.64 m baseline,
    /// which gives 701 views per axis.
    fn default() -> Self {
        let view_spacing_m: f64 = 3.77e-3;
        let baseline_m = 2.64;
        let views = (baseline_m / view_spacing_m).round() as usize + 1;
        CaptureParams {
            view_spacing_m,
            viewer_distance_m: 3.0,
            baseline_m,
            view_resolution_px: 1280,
            grid_rows: views,
            grid_cols: views,
        }
    }
}

impl CaptureParams {
    pub fn validate(&self) -> Result<()> {
        positive("view_spacing_m", self.view_spacing_m)?;
        positive("viewer_distance_m", self.viewer_distance_m)?;
        if self.grid_rows == 0 {
            return Err(Error::param("grid_rows", "must be at least 1"));
        }
        if self.grid_cols == 0 {
            return Err(Error::param("grid_cols", "must be at least 1"));
        }
        if self.baseline_m < self.view_spacing_m {
            return Err(Error::param(
                "baseline_m",
                format!(
                    "{} is smaller than view_spacing_m {}",
                    self.baseline_m, self.view_spacing_m
                ),
            ));
        }
        Ok(())
    }
}

fn positive(name: &'static str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be finite and > 0, got {x}")))
    }
}

/// Smallest feature the display reproduces at signed distance `z` from the
/// screen: `p0 + |z| tan(alpha_s)`.
pub fn feature_size(display: &DisplayParams, z: f64) -> f64 {
    display.pixel_size_m + z.abs() * display.angular_resolution_deg.to_radians().tan()
}

/// Largest `|z|` for which the feature size stays within twice the pixel size.
pub fn dof_half_depth(display: &DisplayParams) -> f64 {
    display.pixel_size_m / display.angular_resolution_deg.to_radians().tan()
}

/// Angular sampling rate of the captured light field, in degrees.
pub fn capture_angular_resolution(capture: &CaptureParams) -> f64 {
    (capture.view_spacing_m / capture.viewer_distance_m).atan().to_degrees()
}

/// Display-optimal circular filter radius in views: half the floored rate
/// ratio, rounded half up (a ratio of 13 gives 7).
pub fn optimal_radius(alpha_s_deg: f64, alpha_c_deg: f64) -> Result<u32> {
    if !(alpha_c_deg.is_finite() && alpha_c_deg > 0.0) {
        return Err(Error::InvalidCaptureGeometry(alpha_c_deg));
    }
    positive("alpha_s", alpha_s_deg)?;
    let ratio = alpha_s_deg.to_radians() / alpha_c_deg.to_radians();
    // Absorb rounding so that exact multiples (4 * a / a) floor to the multiple.
    let floored = (ratio * (1.0 + 1e-12)).floor() as u32;
    Ok(floored.div_ceil(2))
}

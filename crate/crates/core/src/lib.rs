//! Depth-of-field aware scene complexity (DASC) for light field displays.
//!
//! The crate covers three workflows:
//!
//! - **Rendering**: circular angular filtering of a densely sampled light
//!   field ([`dof_render`]) to suppress aliasing outside the display's DoF.
//! - **Scene scoring**: per-object geometric ([`geometric_factors`]) and
//!   position ([`position_factors`]) factors aggregated into a scene score
//!   ([`dasc`]), plus dataset characterization ([`characterize`]).
//! - **Study analysis**: Bradley-Terry scores and likelihood-ratio tests on
//!   pairwise votes ([`study_analysis`]), and the sigmoid predictor that maps
//!   a scene score to a blur radius ([`predictor`]).
//!
//! Data-parallel loops go through [`Execution`]; the `parallel` feature
//! (default) backs it with rayon.

pub mod characterize;
pub mod dasc;
pub mod display_model;
pub mod dof_render;
pub mod error;
pub mod exec;
pub mod geometric_factors;
pub mod io;
pub mod lightfield;
pub mod manifest;
pub mod position_factors;
pub mod predictor;
pub mod raster;
pub mod scene_maps;
pub mod study_analysis;

pub use error::{Error, Result};
pub use exec::Execution;
pub use lightfield::LightField;
pub use manifest::Manifest;
pub use raster::{Plane, View};

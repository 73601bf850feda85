//! Depth-of-field anti-aliasing by circular filtering in the angular domain.
//!
//! Each output view `(s0, t0)` is the unweighted mean of every input view
//! whose grid offset lies within Euclidean distance `r` of `(s0, t0)`. Masks
//! are clipped at the grid border and the divisor shrinks with them.

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::lightfield::LightField;
use crate::raster::View;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircularMask {
    radius: u32,
    center: (usize, usize),
    /// `(s, t)` members in row-major order (t outer, s inner).
    members: Vec<(usize, usize)>,
}

impl CircularMask {
    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn center(&self) -> (usize, usize) {
        self.center
    }

    pub fn members(&self) -> &[(usize, usize)] {
        &self.members
    }

    /// Number of contributing views.
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, s: usize, t: usize) -> bool {
        self.members.binary_search_by_key(&(t, s), |&(ms, mt)| (mt, ms)).is_ok()
    }
}

/// Builds the mask of radius `r` around `center = (s0, t0)` on a
/// `grid = (cols, rows)` view grid.
pub fn circular_mask(r: u32, center: (usize, usize), grid: (usize, usize)) -> Result<CircularMask> {
    let (s0, t0) = center;
    let (cols, rows) = grid;
    if s0 >= cols || t0 >= rows {
        return Err(Error::ViewIndex {
            s: s0,
            t: t0,
            cols,
            rows,
        });
    }
    let r = r as i64;
    let r2 = r * r;
    let (s0i, t0i) = (s0 as i64, t0 as i64);
    let t_lo = (t0i - r).max(0);
    let t_hi = (t0i + r).min(rows as i64 - 1);
    let s_lo = (s0i - r).max(0);
    let s_hi = (s0i + r).min(cols as i64 - 1);

    let mut members = Vec::new();
    for t in t_lo..=t_hi {
        let dt = t - t0i;
        for s in s_lo..=s_hi {
            let ds = s - s0i;
            if ds * ds + dt * dt <= r2 {
                members.push((s as usize, t as usize));
            }
        }
    }
    Ok(CircularMask {
        radius: r as u32,
        center,
        members,
    })
}

fn filter_with_mask(lf: &LightField, mask: &CircularMask) -> View {
    let cols = lf.cols();
    let views = lf.views();
    let mut acc = vec![0.0f64; lf.width() * lf.height() * 3];
    for &(s, t) in mask.members() {
        for (a, &x) in acc.iter_mut().zip(views[t * cols + s].data()) {
            *a += x;
        }
    }
    let m = mask.len() as f64;
    for a in &mut acc {
        *a /= m;
    }
    View::from_raw(lf.width(), lf.height(), acc)
}

/// Filtered view at `center = (s0, t0)`.
pub fn filter_view(lf: &LightField, r: u32, center: (usize, usize)) -> Result<View> {
    let mask = circular_mask(r, center, (lf.cols(), lf.rows()))?;
    Ok(filter_with_mask(lf, &mask))
}

/// Filters every view at its own center. The input is not modified.
pub fn render_all(lf: &LightField, r: u32) -> LightField {
    render_all_with(lf, r, Execution::default())
}

pub fn render_all_with(lf: &LightField, r: u32, exec: Execution) -> LightField {
    let (cols, rows) = (lf.cols(), lf.rows());
    let views = exec.map(cols * rows, |i| {
        let mask = circular_mask(r, (i % cols, i / cols), (cols, rows)).expect("center inside grid");
        filter_with_mask(lf, &mask)
    });
    LightField::from_views(*lf.capture(), views)
        .expect("filtered views share the input geometry")
        .with_sample_depth(lf.sample_depth())
}

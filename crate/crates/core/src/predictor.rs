//! Sigmoid model from scene score `f` to a blur radius:
//! `r(f) = kappa / (1 + exp(beta * (f - gamma)))`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmoidModel {
    pub kappa: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl SigmoidModel {
    /// Coefficients fitted on the reference correlation study.
    pub const REFERENCE: SigmoidModel = SigmoidModel {
        kappa: 21.9,
        beta: 4.5,
        gamma: 9.0,
    };

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "reference" => Some(Self::REFERENCE),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa.is_finite() && self.kappa > 0.0) {
            return Err(Error::param("kappa", format!("must be > 0, got {}", self.kappa)));
        }
        if !self.beta.is_finite() || !self.gamma.is_finite() {
            return Err(Error::param("beta/gamma", "must be finite"));
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let m: SigmoidModel = serde_json::from_str(&text)?;
        m.validate()?;
        Ok(m)
    }
}

/// Logistic `1 / (1 + e^x)` without overflow for large `|x|`.
fn logistic_neg(x: f64) -> f64 {
    if x > 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    }
}

pub fn sigmoid_eval(model: &SigmoidModel, f: f64) -> f64 {
    model.kappa * logistic_neg(model.beta * (f - model.gamma))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitReport {
    pub model: SigmoidModel,
    /// Sum of squared residuals at the initial guess and at the end.
    pub initial_sse: f64,
    pub sse: f64,
    pub iterations: usize,
}

const FIT_MAX_ITER: usize = 500;
const FIT_MAX_HALVINGS: usize = 30;
const FIT_SSE_TOL: f64 = 1e-10;

fn sse(p: &[f64; 3], samples: &[(f64, f64)]) -> f64 {
    let m = SigmoidModel {
        kappa: p[0],
        beta: p[1],
        gamma: p[2],
    };
    samples
        .iter()
        .map(|&(f, y)| {
            let r = sigmoid_eval(&m, f) - y;
            r * r
        })
        .sum()
}

/// Solves a 3×3 system by Gaussian elimination with partial pivoting.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    let scale = a.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return None;
    }
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= scale * 1e-14 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let pivot_row = a[col];
        for row in col + 1..3 {
            let k = a[row][col] / pivot_row[col];
            for (x, p) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= k * p;
            }
            b[row] -= k * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Some(x)
}

/// Least-squares fit by damped Gauss-Newton with the analytic Jacobian.
/// Starts from `kappa = max radius`, `gamma = median f`, `beta = 1`; each
/// step is halved (up to 30 times) until the residual drops. Stops when the
/// residual changes by less than 1e-10 or no step improves it.
pub fn fit_sigmoid(samples: &[(f64, f64)]) -> Result<FitReport> {
    if samples.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "need at least 3 samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|(f, r)| !f.is_finite() || !r.is_finite()) {
        return Err(Error::DegenerateFit("non-finite sample".into()));
    }
    let r0 = samples[0].1;
    if samples.iter().all(|s| s.1 == r0) {
        return Err(Error::DegenerateFit("all radii equal; slope is unidentifiable".into()));
    }
    let mut fs: Vec<f64> = samples.iter().map(|s| s.0).collect();
    fs.sort_by(f64::total_cmp);
    fs.dedup();
    if fs.len() < 3 {
        return Err(Error::DegenerateFit("need at least 3 distinct f values".into()));
    }
    let median = {
        let mut all: Vec<f64> = samples.iter().map(|s| s.0).collect();
        all.sort_by(f64::total_cmp);
        let n = all.len();
        if n % 2 == 1 {
            all[n / 2]
        } else {
            0.5 * (all[n / 2 - 1] + all[n / 2])
        }
    };
    let kappa0 = samples.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    if kappa0 <= 0.0 {
        return Err(Error::DegenerateFit("radii must include a positive value".into()));
    }

    let mut p = [kappa0, 1.0, median];
    let initial_sse = sse(&p, samples);
    let mut cur = initial_sse;

    for it in 1..=FIT_MAX_ITER {
        let (kappa, beta, gamma) = (p[0], p[1], p[2]);
        let mut jtj = [[0.0; 3]; 3];
        let mut jtr = [0.0; 3];
        for &(f, y) in samples {
            let s = logistic_neg(beta * (f - gamma));
            let ds = s * (1.0 - s);
            let j = [s, -kappa * ds * (f - gamma), kappa * ds * beta];
            let r = kappa * s - y;
            for a in 0..3 {
                jtr[a] += j[a] * r;
                for b in 0..3 {
                    jtj[a][b] += j[a] * j[b];
                }
            }
        }
        let rhs = [-jtr[0], -jtr[1], -jtr[2]];
        // Saturated samples can make J^T J singular; a small ridge keeps a
        // descent direction available.
        let delta = solve3(jtj, rhs).or_else(|| {
            let ridge = 1e-9 * (1.0 + (0..3).map(|k| jtj[k][k]).fold(0.0, f64::max));
            let mut a = jtj;
            for (k, row) in a.iter_mut().enumerate() {
                row[k] += ridge;
            }
            solve3(a, rhs)
        });
        let Some(delta) = delta else {
            return finish(p, initial_sse, cur, it);
        };

        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..=FIT_MAX_HALVINGS {
            let cand = [p[0] + step * delta[0], p[1] + step * delta[1], p[2] + step * delta[2]];
            let e = sse(&cand, samples);
            if cand[0] > 0.0 && e < cur {
                accepted = Some((cand, e));
                break;
            }
            step *= 0.5;
        }
        let Some((next, e)) = accepted else {
            // Stationary: no damped step reduces the residual.
            return finish(p, initial_sse, cur, it);
        };
        let change = cur - e;
        p = next;
        cur = e;
        if change < FIT_SSE_TOL {
            return finish(p, initial_sse, cur, it);
        }
    }
    Err(Error::NoConvergence {
        iterations: FIT_MAX_ITER,
        residual: cur,
    })
}

fn to_model(p: [f64; 3]) -> SigmoidModel {
    SigmoidModel {
        kappa: p[0],
        beta: p[1],
        gamma: p[2],
    }
}

fn finish(p: [f64; 3], initial_sse: f64, sse: f64, iterations: usize) -> Result<FitReport> {
    let model = to_model(p);
    model.validate()?;
    Ok(FitReport {
        model,
        initial_sse,
        sse,
        iterations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prediction {
    pub f: f64,
    pub raw_radius: f64,
    pub radius: u32,
}

/// Nearest available radius to `raw`; exact ties go to the larger radius.
pub fn snap_radius(raw: f64, available: &[u32]) -> Option<u32> {
    available.iter().copied().min_by(|&a, &b| {
        let (da, db) = ((raw - a as f64).abs(), (raw - b as f64).abs());
        da.total_cmp(&db).then(b.cmp(&a))
    })
}

pub fn predict_radius(model: &SigmoidModel, f: f64, available: &[u32]) -> Result<Prediction> {
    let raw = sigmoid_eval(model, f);
    let radius = snap_radius(raw, available).ok_or_else(|| Error::param("available", "radius set is empty"))?;
    Ok(Prediction {
        f,
        raw_radius: raw,
        radius,
    })
}

/// Reads `f,radius` rows.
pub fn read_points(path: &Path) -> Result<Vec<(f64, f64)>> {
    #[derive(Deserialize)]
    struct Row {
        f: f64,
        radius: f64,
    }
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })?;
    reader
        .deserialize::<Row>()
        .map(|r| {
            r.map(|row| (row.f, row.radius)).map_err(|source| Error::Csv {
                path: path.to_path_buf(),
                source,
            })
        })
        .collect()
}

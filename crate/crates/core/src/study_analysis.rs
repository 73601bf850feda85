//! Pairwise-comparison analysis of blur-radius preference studies.
//!
//! Bradley-Terry scores are fitted with the MM (minorize-maximize) update
//! followed by geometric-mean normalization each iteration. Pairs are then
//! tested for equal preference with a binomial likelihood-ratio test against
//! the df = 1 chi-square critical value, and the preferred radius is picked
//! from the two score peaks.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Chi-square critical value for df = 1 at alpha = 0.05, used as is
/// (not the more precise 3.8415).
pub const CHI2_CRITICAL_DF1: f64 = 3.84;

/// The radii set of the reference study.
pub const STUDY_RADII: [u32; 6] = [0, 3, 6, 9, 12, 15];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonMatrix {
    pub scene: String,
    /// Stimuli, ascending.
    pub radii: Vec<u32>,
    /// `wins[i][j]`: times radius `i` was preferred over radius `j`.
    pub wins: Vec<Vec<u64>>,
}

impl ComparisonMatrix {
    pub fn new(scene: impl Into<String>, radii: Vec<u32>, wins: Vec<Vec<u64>>) -> Result<Self> {
        let n = radii.len();
        if n < 2 {
            return Err(Error::param("radii", "need at least two stimuli"));
        }
        if wins.len() != n || wins.iter().any(|row| row.len() != n) {
            return Err(Error::param("wins", format!("must be {n}x{n}")));
        }
        if (0..n).any(|i| wins[i][i] != 0) {
            return Err(Error::param("wins", "diagonal must be zero"));
        }
        if radii.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param("radii", "must be strictly ascending"));
        }
        Ok(ComparisonMatrix {
            scene: scene.into(),
            radii,
            wins,
        })
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn index_of(&self, radius: u32) -> Option<usize> {
        self.radii.binary_search(&radius).ok()
    }

    pub fn total_votes(&self) -> u64 {
        self.wins.iter().flatten().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BtConfig {
    pub max_iter: usize,
    /// Stop once the largest relative score change drops below this.
    pub tol: f64,
    /// Pseudo-wins added to every directed pair; `None` rejects zero-win stimuli.
    pub smoothing: Option<f64>,
}

impl Default for BtConfig {
    fn default() -> Self {
        BtConfig {
            max_iter: 10_000,
            tol: 1e-9,
            smoothing: None,
        }
    }
}

impl BtConfig {
    /// Default settings with 0.5 pseudo-wins per directed pair.
    pub fn smoothed() -> Self {
        BtConfig {
            smoothing: Some(0.5),
            ..BtConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BtScores {
    pub radii: Vec<u32>,
    /// Positive scores with unit geometric mean.
    pub q: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl BtScores {
    pub fn score_of(&self, radius: u32) -> Option<f64> {
        self.radii.iter().position(|&r| r == radius).map(|i| self.q[i])
    }
}

fn effective_wins(m: &ComparisonMatrix, smoothing: Option<f64>) -> Vec<Vec<f64>> {
    let eps = smoothing.unwrap_or(0.0);
    let n = m.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { 0.0 } else { m.wins[i][j] as f64 + eps })
                .collect()
        })
        .collect()
}

/// Bradley-Terry log-likelihood `sum_ij w_ij ln(q_i / (q_i + q_j))`.
pub fn bt_log_likelihood(m: &ComparisonMatrix, q: &[f64]) -> f64 {
    let mut ll = 0.0;
    for i in 0..m.len() {
        for j in 0..m.len() {
            if i != j && m.wins[i][j] > 0 {
                ll += m.wins[i][j] as f64 * (q[i] / (q[i] + q[j])).ln();
            }
        }
    }
    ll
}

fn mm_update(w: &[Vec<f64>], q: &[f64]) -> Vec<f64> {
    let n = q.len();
    let mut next: Vec<f64> = (0..n)
        .map(|i| {
            let wins: f64 = w[i].iter().sum();
            let denom: f64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| (w[i][j] + w[j][i]) / (q[i] + q[j]))
                .sum();
            wins / denom
        })
        .collect();
    let log_gm = next.iter().map(|x| x.ln()).sum::<f64>() / n as f64;
    let gm = log_gm.exp();
    for x in &mut next {
        *x /= gm;
    }
    next
}

/// One MM update plus normalization, starting from `q`. Exposed so callers
/// can trace the iteration.
pub fn bt_step(m: &ComparisonMatrix, q: &[f64], smoothing: Option<f64>) -> Vec<f64> {
    mm_update(&effective_wins(m, smoothing), q)
}

pub fn bt_fit(m: &ComparisonMatrix, cfg: &BtConfig) -> Result<BtScores> {
    let w = effective_wins(m, cfg.smoothing);
    let n = m.len();
    for (i, row) in w.iter().enumerate() {
        let wins: f64 = row.iter().sum();
        let games: f64 = (0..n).map(|j| row[j] + w[j][i]).sum();
        if wins <= 0.0 || games <= 0.0 {
            return Err(Error::DegenerateStimulus {
                index: i,
                radius: m.radii[i],
            });
        }
    }

    let mut q = vec![1.0; n];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iter {
        let next = mm_update(&w, &q);
        iterations += 1;
        let change = q
            .iter()
            .zip(&next)
            .map(|(a, b)| ((b - a) / a).abs())
            .fold(0.0, f64::max);
        q = next;
        if change < cfg.tol {
            converged = true;
            break;
        }
    }
    Ok(BtScores {
        radii: m.radii.clone(),
        q,
        iterations,
        converged,
    })
}

/// Probability that stimulus `i` is preferred over `j`.
pub fn bt_preference(scores: &BtScores, i: usize, j: usize) -> f64 {
    scores.q[i] / (scores.q[i] + scores.q[j])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LrtResult {
    pub lambda: f64,
    pub threshold: f64,
    pub reject_null: bool,
}

impl LrtResult {
    /// Applies the decision rule to an already computed statistic.
    pub fn from_lambda(lambda: f64) -> Self {
        LrtResult {
            lambda,
            threshold: CHI2_CRITICAL_DF1,
            reject_null: lambda >= CHI2_CRITICAL_DF1,
        }
    }
}

fn xlnx_ratio(k: f64, p: f64) -> f64 {
    if k == 0.0 {
        0.0
    } else {
        k * p.ln()
    }
}

/// Binomial likelihood-ratio test of equal preference (`p = 0.5`) against
/// the observed rate.
pub fn lrt(w_ij: u64, w_ji: u64) -> Result<LrtResult> {
    let n = w_ij + w_ji;
    if n == 0 {
        return Err(Error::NoComparisons);
    }
    let (a, b, n) = (w_ij as f64, w_ji as f64, n as f64);
    let p = a / n;
    let ll_null = n * 0.5f64.ln();
    let ll_alt = xlnx_ratio(a, p) + xlnx_ratio(b, 1.0 - p);
    // ll_alt >= ll_null; clamp rounding noise at p = 0.5.
    Ok(LrtResult::from_lambda((-2.0 * (ll_null - ll_alt)).max(0.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub radius: u32,
    pub score: f64,
}

/// If the two peaks differ significantly, the higher-scored one wins;
/// otherwise the peak just above the display-optimal radius `r_hat` is taken.
pub fn preferred_radius(peaks: (Peak, Peak), lrt: &LrtResult, r_hat: u32) -> Result<u32> {
    let (a, b) = peaks;
    if a.radius == b.radius {
        return Err(Error::param("peaks", "peak radii must differ"));
    }
    if lrt.reject_null {
        return Ok(if a.score >= b.score { a.radius } else { b.radius });
    }
    [a, b]
        .into_iter()
        .filter(|p| p.radius > r_hat)
        .min_by_key(|p| p.radius)
        .map(|p| p.radius)
        .ok_or(Error::NoPeakAboveOptimal { r_hat })
}

/// Pairwise LRT results keyed by unordered radius pair.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LrtTable(BTreeMap<(u32, u32), LrtResult>);

impl LrtTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, a: u32, b: u32, r: LrtResult) {
        self.0.insert((a.min(b), a.max(b)), r);
    }

    pub fn get(&self, a: u32, b: u32) -> Option<&LrtResult> {
        self.0.get(&(a.min(b), a.max(b)))
    }

    pub fn radii(&self) -> BTreeSet<u32> {
        self.0.keys().flat_map(|&(a, b)| [a, b]).collect()
    }

    pub fn from_matrix(m: &ComparisonMatrix) -> Self {
        let mut t = LrtTable::new();
        for i in 0..m.len() {
            for j in i + 1..m.len() {
                if let Ok(r) = lrt(m.wins[i][j], m.wins[j][i]) {
                    t.insert(m.radii[i], m.radii[j], r);
                }
            }
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decision {
    pub radius: u32,
    /// Radius tested in place of a peak that had no direct comparison.
    pub substitute: Option<Substitution>,
    pub lrt: LrtResult,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Substitution {
    pub replaced: u32,
    pub by: u32,
}

/// [`preferred_radius`] with the fallback used when the two peaks were never
/// compared directly: a radius `r3` found equally preferred to one peak
/// stands in for it in the test against the other peak.
pub fn resolve_preferred_radius(
    peaks: (Peak, Peak),
    table: &LrtTable,
    score_of: impl Fn(u32) -> Option<f64>,
    r_hat: u32,
) -> Result<Decision> {
    let (a, b) = peaks;
    if let Some(l) = table.get(a.radius, b.radius) {
        return Ok(Decision {
            radius: preferred_radius(peaks, l, r_hat)?,
            substitute: None,
            lrt: *l,
        });
    }
    for (keep, replace) in [(b, a), (a, b)] {
        for r3 in table.radii() {
            if r3 == keep.radius || r3 == replace.radius {
                continue;
            }
            let Some(similar) = table.get(r3, replace.radius) else {
                continue;
            };
            let Some(test) = table.get(r3, keep.radius) else {
                continue;
            };
            if similar.reject_null {
                continue;
            }
            let stand_in = Peak {
                radius: r3,
                score: score_of(r3).unwrap_or(replace.score),
            };
            return Ok(Decision {
                radius: preferred_radius((stand_in, keep), test, r_hat)?,
                substitute: Some(Substitution {
                    replaced: replace.radius,
                    by: r3,
                }),
                lrt: *test,
            });
        }
    }
    Err(Error::MissingPair {
        r1: a.radius,
        r2: b.radius,
    })
}

/// Local maxima of the score curve over ascending radii, best two returned
/// in ascending radius order. A single maximum is returned alone.
pub fn find_peaks(scores: &BtScores) -> Vec<Peak> {
    let q = &scores.q;
    let n = q.len();
    let mut peaks: Vec<Peak> = (0..n)
        .filter(|&i| (i == 0 || q[i] > q[i - 1]) && (i + 1 == n || q[i] >= q[i + 1]))
        .map(|i| Peak {
            radius: scores.radii[i],
            score: q[i],
        })
        .collect();
    peaks.sort_by(|x, y| y.score.total_cmp(&x.score).then(x.radius.cmp(&y.radius)));
    peaks.truncate(2);
    peaks.sort_by_key(|p| p.radius);
    peaks
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LrtRow {
    pub r_i: u32,
    pub r_j: u32,
    pub w_ij: u64,
    pub w_ji: u64,
    #[serde(flatten)]
    pub result: LrtResult,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SceneAnalysis {
    pub scene: String,
    pub radii: Vec<u32>,
    pub q: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub lrt: Vec<LrtRow>,
    pub peaks: Vec<Peak>,
    pub r_hat: u32,
    pub preferred_radius: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub substitute: Option<Substitution>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Fits scores, tests every compared pair and applies the preferred-radius
/// rule to the two score peaks. An undecidable rule leaves
/// `preferred_radius` empty with the reason in `note`.
pub fn analyze_scene(m: &ComparisonMatrix, cfg: &BtConfig, r_hat: u32) -> Result<SceneAnalysis> {
    let scores = bt_fit(m, cfg)?;
    let table = LrtTable::from_matrix(m);
    let mut rows = Vec::new();
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            if let Some(r) = table.get(m.radii[i], m.radii[j]) {
                rows.push(LrtRow {
                    r_i: m.radii[i],
                    r_j: m.radii[j],
                    w_ij: m.wins[i][j],
                    w_ji: m.wins[j][i],
                    result: *r,
                });
            }
        }
    }
    let peaks = find_peaks(&scores);
    let (preferred, substitute, note) = match peaks.as_slice() {
        [only] => (Some(only.radius), None, Some("single score peak".to_string())),
        [a, b] => match resolve_preferred_radius((*a, *b), &table, |r| scores.score_of(r), r_hat) {
            Ok(d) => (Some(d.radius), d.substitute, None),
            Err(e) => (None, None, Some(e.to_string())),
        },
        _ => (None, None, Some("no score peak".to_string())),
    };
    Ok(SceneAnalysis {
        scene: m.scene.clone(),
        radii: scores.radii,
        q: scores.q,
        iterations: scores.iterations,
        converged: scores.converged,
        lrt: rows,
        peaks,
        r_hat,
        preferred_radius: preferred,
        substitute,
        note,
    })
}

#[derive(Debug, Deserialize)]
struct VoteRow {
    #[allow(dead_code)]
    participant: String,
    scene: String,
    radius_a: u32,
    radius_b: u32,
    choice: String,
}

/// Reads `participant,scene,radius_a,radius_b,choice` rows (choice `a` or
/// `b`) into one matrix per scene, scenes sorted by name. Each matrix holds
/// the radii that occur for that scene.
pub fn ingest_votes(path: &Path, allowed: &[u32]) -> Result<Vec<ComparisonMatrix>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    ingest_votes_from(file, path, allowed)
}

pub fn ingest_votes_from<R: std::io::Read>(input: R, path: &Path, allowed: &[u32]) -> Result<Vec<ComparisonMatrix>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let err = |line: u64, reason: String| Error::Votes {
        path: path.to_path_buf(),
        line,
        reason,
    };

    // scene -> (winner, loser) -> count
    let mut tallies: BTreeMap<String, BTreeMap<(u32, u32), u64>> = BTreeMap::new();
    let headers = reader.headers().map_err(|e| err(1, e.to_string()))?.clone();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            err(line, e.to_string())
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let row: VoteRow = rec.deserialize(Some(&headers)).map_err(|e| err(line, e.to_string()))?;
        for r in [row.radius_a, row.radius_b] {
            if !allowed.contains(&r) {
                return Err(err(line, format!("unknown radius {r}")));
            }
        }
        if row.radius_a == row.radius_b {
            return Err(err(line, format!("radius {} compared with itself", row.radius_a)));
        }
        let (winner, loser) = match row.choice.as_str() {
            "a" | "A" => (row.radius_a, row.radius_b),
            "b" | "B" => (row.radius_b, row.radius_a),
            other => return Err(err(line, format!("choice must be `a` or `b`, got `{other}`"))),
        };
        *tallies
            .entry(row.scene)
            .or_default()
            .entry((winner, loser))
            .or_default() += 1;
    }

    tallies
        .into_iter()
        .map(|(scene, counts)| {
            let radii: Vec<u32> = counts
                .keys()
                .flat_map(|&(a, b)| [a, b])
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            let idx = |r: u32| radii.binary_search(&r).expect("radius collected above");
            let mut wins = vec![vec![0u64; radii.len()]; radii.len()];
            for (&(w, l), &c) in &counts {
                wins[idx(w)][idx(l)] += c;
            }
            ComparisonMatrix::new(scene, radii, wins)
        })
        .collect()
}

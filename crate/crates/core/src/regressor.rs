//! Bayesian ridge regression fitted by evidence maximisation.
//!
//! Features are standardised per dimension and targets centred before
//! fitting. The weight prior is `N(0, alpha^-1 I)` and the noise precision is
//! `beta`. Both are re-estimated with the MacKay fixed-point updates
//!
//! ```text
//! S     = (alpha I + beta ZᵀZ)⁻¹
//! w     = beta S Zᵀy
//! gamma = Σ beta λᵢ / (alpha + beta λᵢ)
//! alpha = gamma / ‖w‖²
//! beta  = (N − gamma) / ‖y − Zw‖²
//! ```
//!
//! where `λᵢ` are the eigenvalues of `ZᵀZ`, computed once. The bias is the
//! target mean; it carries a flat prior, so its posterior variance is
//! `1 / (beta N)` and it is uncorrelated with the standardised weights.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::features::FeatureTable;
use crate::tsv::{self, Columns, Row};
use crate::{Error, Result};

/// Precisions are kept inside this range so noiseless or constant targets do
/// not drive them to infinity.
pub const PRECISION_RANGE: (f64, f64) = (1e-12, 1e12);

#[derive(Debug, Clone)]
pub struct TrainingSet {
    features: DMatrix<f64>,
    scores: Vec<f64>,
    source_ids: Vec<String>,
}

impl TrainingSet {
    /// Builds a training set from `f32` feature rows.
    pub fn new(rows: &[Vec<f32>], scores: Vec<f64>, source_ids: Vec<String>) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        let mut m = DMatrix::zeros(rows.len(), d);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != d {
                return Err(Error::Dimension {
                    expected_what: "training set",
                    expected: d,
                    found_what: "row",
                    found: r.len(),
                });
            }
            for (j, &v) in r.iter().enumerate() {
                m[(i, j)] = f64::from(v);
            }
        }
        Self::from_matrix(m, scores, source_ids)
    }

    pub fn from_matrix(features: DMatrix<f64>, scores: Vec<f64>, source_ids: Vec<String>) -> Result<Self> {
        if features.nrows() == 0 {
            return Err(Error::EmptyInput("training set"));
        }
        if features.ncols() == 0 {
            return Err(Error::InvalidParameter("training features need at least one dimension".into()));
        }
        if scores.len() != features.nrows() {
            return Err(Error::Cardinality {
                left_what: "feature rows",
                left: features.nrows(),
                right_what: "scores",
                right: scores.len(),
            });
        }
        if !source_ids.is_empty() && source_ids.len() != scores.len() {
            return Err(Error::Cardinality {
                left_what: "scores",
                left: scores.len(),
                right_what: "source ids",
                right: source_ids.len(),
            });
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("training features"));
        }
        if scores.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("training scores"));
        }
        if let Some(bad) = scores.iter().find(|&&y| !(0.0..=1.0).contains(&y)) {
            return Err(Error::Validation(format!("training score {bad} outside [0, 1]")));
        }
        Ok(Self {
            features,
            scores,
            source_ids,
        })
    }

    /// One training row per frame, each paired with its video's score.
    pub fn from_feature_tables<'a>(videos: impl IntoIterator<Item = (&'a str, f64, &'a FeatureTable)>) -> Result<Self> {
        let mut rows = Vec::new();
        let mut scores = Vec::new();
        let mut ids = Vec::new();
        let mut dim = None;
        for (id, score, table) in videos {
            match dim {
                None => dim = Some(table.dim()),
                Some(d) if d != table.dim() => {
                    return Err(Error::Dimension {
                        expected_what: "training set",
                        expected: d,
                        found_what: "feature table",
                        found: table.dim(),
                    })
                }
                _ => {}
            }
            for f in table.frames() {
                rows.push(f.vector.clone());
                scores.push(score);
                ids.push(id.to_string());
            }
        }
        Self::new(&rows, scores, ids)
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn features(&self) -> &DMatrix<f64> {
        &self.features
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn source_ids(&self) -> &[String] {
        &self.source_ids
    }
}

const SCORE_LIST_FILE: &str = "training scores";

/// Parses a `video_id\tscore` table.
pub fn parse_score_list(text: &str) -> Result<Vec<(String, f64)>> {
    let mut rdr = tsv::reader(text);
    let cols = Columns::new(SCORE_LIST_FILE, &mut rdr)?;
    let id = cols.require("video_id")?;
    let score = cols.require("score")?;
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let row = Row {
            file: SCORE_LIST_FILE,
            line: tsv::line_of(&record),
            record: &record,
        };
        out.push((row.get(id, "video_id")?.trim().to_string(), row.parse(score, "score")?));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iter: 300,
            tol: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BrrModel {
    feature_mean: Vec<f64>,
    feature_scale: Vec<f64>,
    /// Standardised-space weights with the bias as the last entry.
    weights: DVector<f64>,
    alpha: f64,
    beta: f64,
    /// Posterior covariance over `weights`.
    covariance: DMatrix<f64>,
    n_samples: usize,
    iterations: usize,
    converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub mean: f64,
    pub variance: f64,
}

fn clamp_precision(v: f64) -> f64 {
    if v.is_nan() {
        PRECISION_RANGE.1
    } else {
        v.clamp(PRECISION_RANGE.0, PRECISION_RANGE.1)
    }
}

pub fn fit(train: &TrainingSet, opts: &FitOptions) -> Result<BrrModel> {
    if opts.max_iter == 0 || opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::InvalidParameter("max_iter must be >= 1 and tol > 0".into()));
    }
    let x = &train.features;
    let (n, d) = x.shape();
    let nf = n as f64;

    let feature_mean: Vec<f64> = (0..d).map(|j| x.column(j).sum() / nf).collect();
    let feature_scale: Vec<f64> = (0..d)
        .map(|j| {
            let m = feature_mean[j];
            let var = x.column(j).iter().map(|v| (v - m).powi(2)).sum::<f64>() / nf;
            let sd = var.sqrt();
            if sd > 1e-12 * (1.0 + m.abs()) {
                sd
            } else {
                1.0
            }
        })
        .collect();
    let z = DMatrix::from_fn(n, d, |i, j| (x[(i, j)] - feature_mean[j]) / feature_scale[j]);

    let y_mean = train.scores.iter().sum::<f64>() / nf;
    let yc = DVector::from_iterator(n, train.scores.iter().map(|y| y - y_mean));
    let y_var = yc.norm_squared() / nf;
    if !y_var.is_finite() {
        return Err(Error::DegenerateFit("target variance is not finite".into()));
    }

    if y_var <= f64::EPSILON * f64::EPSILON * (1.0 + y_mean * y_mean) {
        // Constant targets: the evidence optimum puts all mass on the bias.
        let (alpha, beta) = (PRECISION_RANGE.1, PRECISION_RANGE.1);
        return Ok(assemble(
            feature_mean,
            feature_scale,
            DVector::zeros(d),
            DMatrix::identity(d, d) / alpha,
            y_mean,
            alpha,
            beta,
            n,
            0,
            true,
        ));
    }

    let gram = z.transpose() * &z;
    let zty = z.transpose() * &yc;
    let eig = SymmetricEigen::new(gram);
    let lambdas: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
    let vecs = eig.eigenvectors;
    let proj = vecs.transpose() * &zty;

    let weights_at = |alpha: f64, beta: f64| -> DVector<f64> {
        let coef = DVector::from_iterator(
            d,
            (0..d).map(|k| beta * proj[k] / (alpha + beta * lambdas[k])),
        );
        &vecs * coef
    };

    let mut alpha = 1.0;
    let mut beta = clamp_precision(1.0 / y_var);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        iterations += 1;
        let w = weights_at(alpha, beta);
        let gamma: f64 = lambdas.iter().map(|&l| beta * l / (alpha + beta * l)).sum();
        let resid = (&yc - &z * &w).norm_squared();
        let new_alpha = clamp_precision(gamma / w.norm_squared());
        let new_beta = clamp_precision((nf - gamma) / resid);
        let change = ((new_alpha - alpha) / alpha).abs().max(((new_beta - beta) / beta).abs());
        alpha = new_alpha;
        beta = new_beta;
        if change < opts.tol {
            converged = true;
            break;
        }
    }

    let w = weights_at(alpha, beta);
    let inv = DVector::from_iterator(d, lambdas.iter().map(|&l| 1.0 / (alpha + beta * l)));
    let s = &vecs * DMatrix::from_diagonal(&inv) * vecs.transpose();
    let s = (&s + s.transpose()) * 0.5;
    Ok(assemble(
        feature_mean,
        feature_scale,
        w,
        s,
        y_mean,
        alpha,
        beta,
        n,
        iterations,
        converged,
    ))
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    feature_mean: Vec<f64>,
    feature_scale: Vec<f64>,
    w: DVector<f64>,
    s: DMatrix<f64>,
    bias: f64,
    alpha: f64,
    beta: f64,
    n: usize,
    iterations: usize,
    converged: bool,
) -> BrrModel {
    let d = w.len();
    let mut weights = DVector::zeros(d + 1);
    weights.rows_mut(0, d).copy_from(&w);
    weights[d] = bias;
    let mut covariance = DMatrix::zeros(d + 1, d + 1);
    covariance.view_mut((0, 0), (d, d)).copy_from(&s);
    covariance[(d, d)] = 1.0 / (beta * n as f64);
    BrrModel {
        feature_mean,
        feature_scale,
        weights,
        alpha,
        beta,
        covariance,
        n_samples: n,
        iterations,
        converged,
    }
}

impl BrrModel {
    pub fn dim(&self) -> usize {
        self.feature_mean.len()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Weights in standardised feature space, bias last.
    pub fn weights(&self) -> &DVector<f64> {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.weights[self.dim()]
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    pub fn feature_mean(&self) -> &[f64] {
        &self.feature_mean
    }

    pub fn feature_scale(&self) -> &[f64] {
        &self.feature_scale
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    /// Slope per raw feature unit, i.e. the standardised weight divided by
    /// its scale.
    pub fn raw_coefficients(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|j| self.weights[j] / self.feature_scale[j])
            .collect()
    }

    fn design_row(&self, x: &[f64]) -> Result<DVector<f64>> {
        if x.len() != self.dim() {
            return Err(Error::Dimension {
                expected_what: "model",
                expected: self.dim(),
                found_what: "feature",
                found: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("prediction input"));
        }
        let d = self.dim();
        Ok(DVector::from_fn(d + 1, |j, _| {
            if j == d {
                1.0
            } else {
                (x[j] - self.feature_mean[j]) / self.feature_scale[j]
            }
        }))
    }

    pub fn predict_f64(&self, x: &[f64]) -> Result<Prediction> {
        let phi = self.design_row(x)?;
        let mean = self.weights.dot(&phi);
        let variance = 1.0 / self.beta + phi.dot(&(&self.covariance * &phi)).max(0.0);
        Ok(Prediction { mean, variance })
    }

    pub fn predict(&self, x: &[f32]) -> Result<Prediction> {
        let x: Vec<f64> = x.iter().map(|&v| f64::from(v)).collect();
        self.predict_f64(&x)
    }
}

/// Memorability score of one shot from its representative frames.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShotScore {
    pub shot_index: usize,
    pub score: f64,
    pub variance: f64,
    pub n_frames: usize,
}

/// Averages per-frame predictions; the variance is the mean frame variance
/// divided by the frame count.
pub fn score_shot(model: &BrrModel, shot_index: usize, frames: &[&[f32]]) -> Result<ShotScore> {
    if frames.is_empty() {
        return Err(Error::EmptyInput("shot has no frames to score"));
    }
    let preds = frames
        .iter()
        .map(|f| model.predict(f))
        .collect::<Result<Vec<_>>>()?;
    let n = preds.len() as f64;
    let score = preds.iter().map(|p| p.mean).sum::<f64>() / n;
    let variance = preds.iter().map(|p| p.variance).sum::<f64>() / n / n;
    Ok(ShotScore {
        shot_index,
        score,
        variance,
        n_frames: preds.len(),
    })
}

const MODEL_FILE: &str = "MEMBRR";

fn join(values: impl IntoIterator<Item = f64>) -> String {
    let mut s = String::new();
    for (i, v) in values.into_iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        write!(s, "{v}").unwrap();
    }
    s
}

/// `MEMBRR v1` text form. Every float is written in shortest round-trip
/// form, so a read model predicts bit-identically.
pub fn write_model(model: &BrrModel) -> String {
    let d = model.dim();
    let mut out = format!("MEMBRR\tv1\tdim={d}\n");
    writeln!(out, "n_samples\t{}", model.n_samples).unwrap();
    writeln!(out, "iterations\t{}", model.iterations).unwrap();
    writeln!(out, "converged\t{}", model.converged).unwrap();
    writeln!(out, "alpha\t{}", model.alpha).unwrap();
    writeln!(out, "beta\t{}", model.beta).unwrap();
    writeln!(out, "feature_mean\t{}", join(model.feature_mean.iter().copied())).unwrap();
    writeln!(out, "feature_scale\t{}", join(model.feature_scale.iter().copied())).unwrap();
    writeln!(out, "weights\t{}", join(model.weights.iter().copied())).unwrap();
    for r in 0..=d {
        writeln!(out, "covariance\t{}", join(model.covariance.row(r).iter().copied())).unwrap();
    }
    out
}

pub fn read_model(text: &str) -> Result<BrrModel> {
    let err = |line, message: String| Error::Format {
        file: MODEL_FILE,
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| err(1, "missing header".into()))?;
    let d: usize = header
        .strip_prefix("MEMBRR\tv1\tdim=")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| err(1, format!("bad header {header:?}")))?;

    let mut field = |name: &str| -> Result<(usize, String)> {
        let (i, line) = lines.next().ok_or_else(|| err(0, format!("missing {name}")))?;
        let value = line
            .strip_prefix(name)
            .and_then(|r| r.strip_prefix('\t'))
            .ok_or_else(|| err(i + 1, format!("expected {name}")))?;
        Ok((i + 1, value.to_string()))
    };
    let scalar = |(line, v): (usize, String)| -> Result<f64> {
        v.parse().map_err(|_| err(line, format!("bad number {v:?}")))
    };
    let vector = |(line, v): (usize, String), len: usize| -> Result<Vec<f64>> {
        let out = v
            .split(',')
            .map(|x| x.parse::<f64>().map_err(|_| err(line, format!("bad number {x:?}"))))
            .collect::<Result<Vec<_>>>()?;
        if out.len() != len {
            return Err(err(line, format!("expected {len} values, found {}", out.len())));
        }
        Ok(out)
    };

    let (l, n) = field("n_samples")?;
    let n_samples = n.parse().map_err(|_| err(l, "bad n_samples".into()))?;
    let (l, it) = field("iterations")?;
    let iterations = it.parse().map_err(|_| err(l, "bad iterations".into()))?;
    let (l, c) = field("converged")?;
    let converged = c.parse().map_err(|_| err(l, "bad converged flag".into()))?;
    let alpha = scalar(field("alpha")?)?;
    let beta = scalar(field("beta")?)?;
    let feature_mean = vector(field("feature_mean")?, d)?;
    let feature_scale = vector(field("feature_scale")?, d)?;
    let weights = DVector::from_vec(vector(field("weights")?, d + 1)?);
    let mut covariance = DMatrix::zeros(d + 1, d + 1);
    for r in 0..=d {
        let row = vector(field("covariance")?, d + 1)?;
        for (c, v) in row.into_iter().enumerate() {
            covariance[(r, c)] = v;
        }
    }
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(err(0, "precisions must be positive".into()));
    }
    Ok(BrrModel {
        feature_mean,
        feature_scale,
        weights,
        alpha,
        beta,
        covariance,
        n_samples,
        iterations,
        converged,
    })
}

const SCORES_FILE: &str = "shot scores";
const SCORES_HEADER: [&str; 4] = ["shot_index", "score", "variance", "n_frames"];

pub fn write_scores(scores: &[ShotScore]) -> String {
    let mut w = tsv::writer();
    w.write_record(SCORES_HEADER).unwrap();
    for s in scores {
        w.write_record([
            s.shot_index.to_string(),
            tsv::fmt_f64(s.score),
            tsv::fmt_f64(s.variance),
            s.n_frames.to_string(),
        ])
        .unwrap();
    }
    tsv::finish(w)
}

pub fn read_scores(text: &str) -> Result<Vec<ShotScore>> {
    let mut rdr = tsv::reader(text);
    let cols = Columns::new(SCORES_FILE, &mut rdr)?;
    let idx: Vec<usize> = SCORES_HEADER.iter().map(|c| cols.require(c)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let row = Row {
            file: SCORES_FILE,
            line: tsv::line_of(&record),
            record: &record,
        };
        out.push(ShotScore {
            shot_index: row.parse(idx[0], "shot_index")?,
            score: row.parse(idx[1], "score")?,
            variance: row.parse(idx[2], "variance")?,
            n_frames: row.parse(idx[3], "n_frames")?,
        });
    }
    Ok(out)
}

//! Signals to feature vectors: per-segment rational fits (model M1) or
//! sine-modulated fits (model M2), a stratified train/test split, CSV
//! export, and a nearest-centroid sanity classifier.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::basis::BasisSpec;
use crate::grid::{uniform_nodes, GridError};
use crate::minimax::{solve_minimax, ApproximationProblem, BisectionConfig, MinimaxError};
use crate::sine_model::{fit_sine_model, SineError, SineSearchSpace};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: cannot parse {content:?} as a sample")]
    Parse { path: PathBuf, line: usize, content: String },
    #[error("{0}: no segment files")]
    EmptyDirectory(PathBuf),
    #[error("{0}: segment has no samples")]
    EmptySegment(PathBuf),
    #[error("segment {segment_id} of class {label}: {message}")]
    Segment { label: String, segment_id: usize, message: String },
    #[error("train fraction must lie in (0, 1), got {0}")]
    InvalidFraction(f64),
    #[error("no feature vectors")]
    NoVectors,
    #[error("feature vectors have {found} features, expected {expected}")]
    FeatureCount { expected: usize, found: usize },
    #[error("training set has {0} class(es); need at least 2")]
    TooFewClasses(usize),
    #[error("every feature is constant on the training set")]
    NoInformativeFeatures,
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: row {row}: {message}")]
    CsvFormat { path: PathBuf, row: usize, message: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io { path: path.to_path_buf(), source }
}

/// Segments of one class, in filename order.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentSet {
    pub label: String,
    pub segments: Vec<Vec<f64>>,
    /// Source file names, parallel to `segments`.
    pub names: Vec<String>,
    pub sample_rate: Option<f64>,
}

impl SegmentSet {
    pub fn new(label: impl Into<String>, segments: Vec<Vec<f64>>) -> Self {
        let names = (0..segments.len()).map(|i| format!("{i}")).collect();
        Self { label: label.into(), segments, names, sample_rate: None }
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.segments.iter().map(Vec::len).collect()
    }
}

/// Parses one sample per line; blank lines are skipped.
pub fn parse_samples(path: &Path, text: &str) -> Result<Vec<f64>, PipelineError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        match line.parse::<f64>() {
            Ok(v) if v.is_finite() => out.push(v),
            _ => return Err(PipelineError::Parse { path: path.to_path_buf(), line: i + 1, content: line.to_string() }),
        }
    }
    if out.is_empty() {
        return Err(PipelineError::EmptySegment(path.to_path_buf()));
    }
    Ok(out)
}

pub fn read_segment(path: &Path) -> Result<Vec<f64>, PipelineError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_samples(path, &text)
}

/// Reads every regular file in `dir` as one segment.
pub fn load_segments(dir: &Path, label: &str) -> Result<SegmentSet, PipelineError> {
    let mut files: Vec<PathBuf> = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let path = entry.map_err(io_err(dir))?.path();
        if path.is_file() {
            files.push(path);
        }
    }
    if files.is_empty() {
        return Err(PipelineError::EmptyDirectory(dir.to_path_buf()));
    }
    files.sort();
    let segments = files.iter().map(|p| read_segment(p)).collect::<Result<Vec<_>, _>>()?;
    let names =
        files.iter().map(|p| p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()).collect();
    Ok(SegmentSet { label: label.to_string(), segments, names, sample_rate: None })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Model {
    /// Rational fit: features `a_0..a_n, b_1..b_m`.
    M1,
    /// Rational amplitude times a sine: the M1 features followed by `ω`.
    M2,
}

impl Model {
    pub fn feature_count(self, n: usize, m: usize) -> usize {
        let base = (n + 1) + (m + 1) - 1;
        match self {
            Model::M1 => base,
            Model::M2 => base + 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub label: String,
    pub segment_id: usize,
    /// Unknown for vectors read back from CSV.
    pub model: Option<Model>,
    pub features: Vec<f64>,
}

/// Rescales so that `b_0 = 1` and drops it.
fn coefficient_features(a: &[f64], b: &[f64]) -> Vec<f64> {
    let s = b[0];
    a.iter().chain(&b[1..]).map(|v| v / s).collect()
}

/// Sample `k` of a segment sits at abscissa `k`; the fit sees it mapped to
/// `[-1, 1]`.
fn segment_problem(samples: &[f64], n: usize, m: usize) -> Result<ApproximationProblem, String> {
    let grid = match samples.len() {
        1 => Err(GridError::TooFewNodes { min: 2, found: 1 }),
        len => uniform_nodes(0.0, (len - 1) as f64, len),
    }
    .map_err(|e| e.to_string())?;
    ApproximationProblem::new(grid, samples.to_vec(), BasisSpec::monomial(n, m)).map_err(|e| e.to_string())
}

fn segment_features(
    samples: &[f64],
    model: Model,
    n: usize,
    m: usize,
    config: &BisectionConfig,
    space: &SineSearchSpace,
) -> Result<Vec<f64>, String> {
    let problem = segment_problem(samples, n, m)?;
    match model {
        Model::M1 => {
            let r = solve_minimax(&problem, config).map_err(|e: MinimaxError| e.to_string())?;
            Ok(coefficient_features(&r.numerator, &r.denominator))
        }
        Model::M2 => {
            let r = fit_sine_model(&problem, space, config).map_err(|e: SineError| e.to_string())?;
            let mut f = coefficient_features(&r.best.numerator, &r.best.denominator);
            f.push(r.omega);
            Ok(f)
        }
    }
}

/// One vector per segment, in segment order. The first failing segment
/// (by index) aborts the run.
pub fn extract_features(
    set: &SegmentSet,
    model: Model,
    n: usize,
    m: usize,
    config: &BisectionConfig,
    space: &SineSearchSpace,
) -> Result<Vec<FeatureVector>, PipelineError> {
    let results: Vec<Result<Vec<f64>, String>> =
        set.segments.par_iter().map(|s| segment_features(s, model, n, m, config, space)).collect();
    results
        .into_iter()
        .enumerate()
        .map(|(segment_id, r)| match r {
            Ok(features) => Ok(FeatureVector { label: set.label.clone(), segment_id, model: Some(model), features }),
            Err(message) => Err(PipelineError::Segment { label: set.label.clone(), segment_id, message }),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
    /// Shuffle within each class before cutting; otherwise input order.
    pub shuffle: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self { train_fraction: 0.75, seed: 0, shuffle: true }
    }
}

/// Per-class split: `⌊fraction·count⌋` vectors of each class go to train.
/// Both halves list classes in label order and keep input order within a
/// class.
pub fn split(
    vectors: &[FeatureVector],
    spec: &SplitSpec,
) -> Result<(Vec<FeatureVector>, Vec<FeatureVector>), PipelineError> {
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(PipelineError::InvalidFraction(spec.train_fraction));
    }
    if vectors.is_empty() {
        return Err(PipelineError::NoVectors);
    }
    let mut by_class: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, v) in vectors.iter().enumerate() {
        by_class.entry(v.label.as_str()).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for members in by_class.values() {
        let cut = (spec.train_fraction * members.len() as f64).floor() as usize;
        let mut order = members.clone();
        if spec.shuffle {
            order.shuffle(&mut rng);
        }
        let (mut tr, mut te) = (order[..cut].to_vec(), order[cut..].to_vec());
        tr.sort_unstable();
        te.sort_unstable();
        train.extend(tr.into_iter().map(|i| vectors[i].clone()));
        test.extend(te.into_iter().map(|i| vectors[i].clone()));
    }
    Ok((train, test))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmokeReport {
    pub accuracy: f64,
    pub test_count: usize,
    /// Class labels in order.
    pub classes: Vec<String>,
    /// Feature indices (0-based) that were constant on train.
    pub dropped_features: Vec<usize>,
    /// Per-feature mean and standard deviation on train, for kept features.
    pub standardization: Vec<(f64, f64)>,
    /// Class centroids in standardized space, parallel to `classes`.
    pub centroids: Vec<Vec<f64>>,
}

fn common_width(vectors: &[FeatureVector], expected: Option<usize>) -> Result<usize, PipelineError> {
    let k = expected.or_else(|| vectors.first().map(|v| v.features.len())).ok_or(PipelineError::NoVectors)?;
    match vectors.iter().find(|v| v.features.len() != k) {
        Some(v) => Err(PipelineError::FeatureCount { expected: k, found: v.features.len() }),
        None => Ok(k),
    }
}

/// Nearest class centroid after standardizing with train statistics only.
/// Distance ties go to the first class in label order.
pub fn separability_smoke_check(train: &[FeatureVector], test: &[FeatureVector]) -> Result<SmokeReport, PipelineError> {
    let k = common_width(train, None)?;
    if test.is_empty() {
        return Err(PipelineError::NoVectors);
    }
    common_width(test, Some(k))?;

    let mut grouped: BTreeMap<&str, Vec<&FeatureVector>> = BTreeMap::new();
    for v in train {
        grouped.entry(v.label.as_str()).or_default().push(v);
    }
    if grouped.len() < 2 {
        return Err(PipelineError::TooFewClasses(grouped.len()));
    }

    let count = train.len() as f64;
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    let mut standardization = Vec::new();
    for j in 0..k {
        let mean = train.iter().map(|v| v.features[j]).sum::<f64>() / count;
        let var = train.iter().map(|v| (v.features[j] - mean).powi(2)).sum::<f64>() / count;
        let sd = var.sqrt();
        if sd > 1e-12 * mean.abs().max(1e-300) && sd > 0.0 {
            kept.push(j);
            standardization.push((mean, sd));
        } else {
            log::warn!("feature f{} is constant on the training set; dropped", j + 1);
            dropped.push(j);
        }
    }
    if kept.is_empty() {
        return Err(PipelineError::NoInformativeFeatures);
    }
    let project = |v: &FeatureVector| -> Vec<f64> {
        kept.iter().zip(&standardization).map(|(&j, &(mu, sd))| (v.features[j] - mu) / sd).collect()
    };

    let classes: Vec<String> = grouped.keys().map(|s| s.to_string()).collect();
    let centroids: Vec<Vec<f64>> = grouped
        .values()
        .map(|members| {
            let mut c = vec![0.0; kept.len()];
            for v in members {
                for (acc, x) in c.iter_mut().zip(project(v)) {
                    *acc += x;
                }
            }
            c.iter_mut().for_each(|x| *x /= members.len() as f64);
            c
        })
        .collect();

    let correct = test
        .iter()
        .filter(|v| {
            let x = project(v);
            let mut best = (0, f64::INFINITY);
            for (ci, c) in centroids.iter().enumerate() {
                let d: f64 = c.iter().zip(&x).map(|(a, b)| (a - b).powi(2)).sum();
                if d < best.1 {
                    best = (ci, d);
                }
            }
            classes[best.0] == v.label
        })
        .count();
    Ok(SmokeReport {
        accuracy: correct as f64 / test.len() as f64,
        test_count: test.len(),
        classes,
        dropped_features: dropped,
        standardization,
        centroids,
    })
}

/// Writes `label,segment_id,f1,…,fk`. All vectors must have the same width.
pub fn write_features_csv(path: &Path, vectors: &[FeatureVector]) -> Result<(), PipelineError> {
    let k = if vectors.is_empty() { 0 } else { common_width(vectors, None)? };
    let csv_err = |source| PipelineError::Csv { path: path.to_path_buf(), source };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    let mut header = vec!["label".to_string(), "segment_id".to_string()];
    header.extend((1..=k).map(|j| format!("f{j}")));
    w.write_record(&header).map_err(csv_err)?;
    for v in vectors {
        let mut rec = vec![v.label.clone(), v.segment_id.to_string()];
        rec.extend(v.features.iter().map(|x| format!("{x:?}")));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

pub fn read_features_csv(path: &Path) -> Result<Vec<FeatureVector>, PipelineError> {
    let csv_err = |source| PipelineError::Csv { path: path.to_path_buf(), source };
    let bad = |row: usize, message: String| PipelineError::CsvFormat { path: path.to_path_buf(), row, message };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let header = r.headers().map_err(csv_err)?.clone();
    if header.len() < 2 || &header[0] != "label" || &header[1] != "segment_id" {
        return Err(bad(1, "header must start with label,segment_id".into()));
    }
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(csv_err)?;
        let segment_id = rec[1].parse().map_err(|_| bad(row, format!("bad segment_id {:?}", &rec[1])))?;
        let features = rec
            .iter()
            .skip(2)
            .map(|s| s.parse::<f64>().map_err(|_| bad(row, format!("bad feature {s:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        out.push(FeatureVector { label: rec[0].to_string(), segment_id, model: None, features });
    }
    Ok(out)
}

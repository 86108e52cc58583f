//! Frame feature tables and representative-frame selection.
//!
//! Tables travel as `MEMFEAT v1` text: a header line
//! `MEMFEAT\tv1\tdim=<D>` (optionally followed by further `key=value`
//! fields such as an encoder id) and one `<timestamp_ms>\t<v0>,<v1>,...`
//! row per frame. Values use the shortest decimal form that parses back to the
//! same `f32`.

use std::fmt::Write as _;

use crate::shots::Shot;
use crate::{Error, Millis, Result};

/// Frames further than this from a shot's interval are never selected.
pub const SELECTION_SLACK_MS: Millis = 2000;
pub const DEFAULT_FPS: f64 = 3.0;
pub const DEFAULT_K_FRAMES: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct FrameFeature {
    pub timestamp_ms: Millis,
    pub vector: Vec<f32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub episode_id: String,
    dim: usize,
    frames: Vec<FrameFeature>,
    /// Extra header fields, kept in file order.
    pub attrs: Vec<(String, String)>,
}

impl FeatureTable {
    pub fn new(episode_id: impl Into<String>, dim: usize, frames: Vec<FrameFeature>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("feature dim must be at least 1".into()));
        }
        for (i, f) in frames.iter().enumerate() {
            if f.vector.len() != dim {
                return Err(Error::Dimension {
                    expected_what: "table",
                    expected: dim,
                    found_what: "frame",
                    found: f.vector.len(),
                });
            }
            if f.vector.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("frame feature"));
            }
            if i > 0 && frames[i - 1].timestamp_ms >= f.timestamp_ms {
                return Err(Error::Validation(format!(
                    "frame timestamps not strictly increasing at {} ms",
                    f.timestamp_ms
                )));
            }
        }
        Ok(Self {
            episode_id: episode_id.into(),
            dim,
            frames,
            attrs: Vec::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn frames(&self) -> &[FrameFeature] {
        &self.frames
    }

    pub fn attr(&self, key: &str) -> Option<&str> {
        self.attrs.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

/// Sampling grid `floor(k * 1000 / rate)` for every k whose time falls inside
/// the duration.
pub fn sample_times(duration_ms: Millis, rate_per_s: f64) -> Vec<Millis> {
    assert!(rate_per_s > 0.0, "sampling rate must be positive");
    let count = (duration_ms as f64 * rate_per_s / 1000.0).ceil() as u64;
    (0..count)
        .map(|k| (k as f64 * 1000.0 / rate_per_s).floor() as Millis)
        .filter(|&t| t < duration_ms)
        .collect()
}

const FEATURE_FILE: &str = "MEMFEAT";

pub fn write_feature_table(table: &FeatureTable) -> String {
    let mut out = format!("MEMFEAT\tv1\tdim={}", table.dim);
    for (k, v) in &table.attrs {
        write!(out, "\t{k}={v}").unwrap();
    }
    out.push('\n');
    for f in &table.frames {
        write!(out, "{}\t", f.timestamp_ms).unwrap();
        for (i, v) in f.vector.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write!(out, "{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn read_feature_table(episode_id: &str, text: &str) -> Result<FeatureTable> {
    let err = |line, message: String| Error::Format {
        file: FEATURE_FILE,
        line,
        message,
    };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| err(1, "missing header".into()))?;
    let mut fields = header.split('\t');
    if fields.next() != Some("MEMFEAT") || fields.next() != Some("v1") {
        return Err(err(1, format!("bad header {header:?}")));
    }
    let mut dim = None;
    let mut attrs = Vec::new();
    for f in fields {
        let (k, v) = f
            .split_once('=')
            .ok_or_else(|| err(1, format!("bad header field {f:?}")))?;
        if k == "dim" {
            dim = Some(v.parse::<usize>().map_err(|_| err(1, format!("bad dim {v:?}")))?);
        } else {
            attrs.push((k.to_string(), v.to_string()));
        }
    }
    let dim = dim.ok_or_else(|| err(1, "header does not declare dim".into()))?;
    if dim == 0 {
        return Err(err(1, "dim must be at least 1".into()));
    }

    let mut frames: Vec<FrameFeature> = Vec::new();
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        if line.is_empty() {
            continue;
        }
        let (ts, values) = line
            .split_once('\t')
            .ok_or_else(|| err(line_no, "expected <timestamp_ms>\\t<values>".into()))?;
        let timestamp_ms: Millis = ts
            .parse()
            .map_err(|_| err(line_no, format!("bad timestamp {ts:?}")))?;
        let vector = values
            .split(',')
            .map(|v| {
                let x: f32 = v.parse().map_err(|_| err(line_no, format!("bad value {v:?}")))?;
                if x.is_finite() {
                    Ok(x)
                } else {
                    Err(err(line_no, format!("non-finite value {v:?}")))
                }
            })
            .collect::<Result<Vec<f32>>>()?;
        if vector.len() != dim {
            return Err(err(line_no, format!("expected {dim} values, found {}", vector.len())));
        }
        if let Some(prev) = frames.last() {
            if prev.timestamp_ms >= timestamp_ms {
                return Err(err(line_no, format!("timestamp {timestamp_ms} does not increase")));
            }
        }
        frames.push(FrameFeature { timestamp_ms, vector });
    }
    let mut table = FeatureTable::new(episode_id, dim, frames)?;
    table.attrs = attrs;
    Ok(table)
}

/// Picks up to `k` frames for a shot: anchors at fractions `(i + 0.5) / k` of
/// the shot interval, each mapped to the nearest frame (ties go to the
/// earlier frame), with repeats collapsed.
pub fn select_representative<'t>(shot: &Shot, table: &'t FeatureTable, k: usize) -> Result<Vec<&'t FrameFeature>> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let frames = table.frames();
    let lo = shot.start_ms.saturating_sub(SELECTION_SLACK_MS);
    let hi = shot.end_ms.saturating_add(SELECTION_SLACK_MS);
    let first = frames.partition_point(|f| f.timestamp_ms < lo);
    let last = frames.partition_point(|f| f.timestamp_ms <= hi);
    let window = &frames[first..last];
    if window.is_empty() {
        return Err(Error::EmptySelection {
            shot_index: shot.shot_index,
        });
    }

    let span = (shot.end_ms - shot.start_ms) as f64;
    let mut picked: Vec<usize> = Vec::with_capacity(k);
    for i in 0..k {
        let target = shot.start_ms as f64 + span * (i as f64 + 0.5) / k as f64;
        let after = window.partition_point(|f| (f.timestamp_ms as f64) < target);
        let best = match (after.checked_sub(1), window.get(after)) {
            (Some(b), Some(a)) => {
                let db = target - window[b].timestamp_ms as f64;
                let da = a.timestamp_ms as f64 - target;
                if da < db {
                    after
                } else {
                    b
                }
            }
            (Some(b), None) => b,
            (None, _) => after,
        };
        if picked.last() != Some(&best) {
            picked.push(best);
        }
    }
    Ok(picked.into_iter().map(|i| &window[i]).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShotFrames<'t> {
    pub shot_index: usize,
    pub frames: Vec<&'t FrameFeature>,
}

/// Representative frames for every shot, in shot order.
pub fn shot_frame_matrix<'t>(shots: &[Shot], table: &'t FeatureTable, k: usize) -> Result<Vec<ShotFrames<'t>>> {
    shots
        .iter()
        .map(|shot| {
            Ok(ShotFrames {
                shot_index: shot.shot_index,
                frames: select_representative(shot, table, k)?,
            })
        })
        .collect()
}

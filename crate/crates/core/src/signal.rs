//! Chronological memorability signals and moving-average smoothing.

use std::collections::BTreeMap;

use crate::regressor::ShotScore;
use crate::shots::Shot;
use crate::tsv::{self, Columns, Row};
use crate::{Error, Millis, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalPoint {
    pub shot_index: usize,
    pub start_ms: Millis,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MemSignal {
    pub episode_id: String,
    pub points: Vec<SignalPoint>,
}

impl MemSignal {
    pub fn scores(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.score).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn with_scores(&self, scores: Vec<f64>) -> MemSignal {
        MemSignal {
            episode_id: self.episode_id.clone(),
            points: self
                .points
                .iter()
                .zip(scores)
                .map(|(p, score)| SignalPoint { score, ..*p })
                .collect(),
        }
    }
}

/// Edge handling for windows that run past either end of the signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgeRule {
    /// Average only the samples that exist.
    #[default]
    Shrink,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmoothingConfig {
    pub window: usize,
    pub edge_rule: EdgeRule,
}

impl SmoothingConfig {
    pub fn new(window: usize) -> Self {
        Self {
            window,
            edge_rule: EdgeRule::Shrink,
        }
    }
}

/// Pairs every shot with its score and orders the points by start time.
pub fn build_signal(shots: &[Shot], scores: &[ShotScore]) -> Result<MemSignal> {
    if shots.len() != scores.len() {
        return Err(Error::Cardinality {
            left_what: "shots",
            left: shots.len(),
            right_what: "scores",
            right: scores.len(),
        });
    }
    let mut by_index = BTreeMap::new();
    for s in scores {
        if !s.score.is_finite() {
            return Err(Error::NonFinite("shot score"));
        }
        if by_index.insert(s.shot_index, s.score).is_some() {
            return Err(Error::DuplicateKey(format!("score for shot {}", s.shot_index)));
        }
    }
    let mut points = shots
        .iter()
        .map(|shot| {
            let score = by_index.get(&shot.shot_index).copied().ok_or_else(|| {
                Error::Validation(format!("no score for shot {}", shot.shot_index))
            })?;
            Ok(SignalPoint {
                shot_index: shot.shot_index,
                start_ms: shot.start_ms,
                score,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    points.sort_by_key(|p| (p.start_ms, p.shot_index));
    Ok(MemSignal {
        episode_id: shots.first().map(|s| s.episode_id.clone()).unwrap_or_default(),
        points,
    })
}

/// Centered moving average over raw values: output `i` is the mean of
/// `values[i - N/2 ..= i + N/2]` clipped to the signal.
pub fn moving_average(values: &[f64], window: usize) -> Vec<f64> {
    assert!(window >= 1, "window must be at least 1");
    if window == 1 {
        return values.to_vec();
    }
    let half = window / 2;
    let n = values.len();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(n - 1);
            let slice = &values[lo..=hi];
            slice.iter().sum::<f64>() / slice.len() as f64
        })
        .collect()
}

pub fn smooth(signal: &MemSignal, cfg: &SmoothingConfig) -> MemSignal {
    match cfg.edge_rule {
        EdgeRule::Shrink => signal.with_scores(moving_average(&signal.scores(), cfg.window)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepRange {
    pub n_min: usize,
    pub n_max: usize,
    pub step: usize,
}

impl Default for SweepRange {
    fn default() -> Self {
        Self {
            n_min: 15,
            n_max: 305,
            step: 10,
        }
    }
}

impl SweepRange {
    /// Window sizes `n_min, n_min + step, ...`, always ending with `n_max`.
    pub fn windows(&self) -> Result<Vec<usize>> {
        if self.n_min == 0 || self.step == 0 || self.n_min > self.n_max {
            return Err(Error::InvalidParameter(format!(
                "bad sweep {}:{}:{}",
                self.n_min, self.n_max, self.step
            )));
        }
        let mut out: Vec<usize> = (self.n_min..=self.n_max).step_by(self.step).collect();
        if out.last() != Some(&self.n_max) {
            out.push(self.n_max);
        }
        Ok(out)
    }
}

impl std::str::FromStr for SweepRange {
    type Err = Error;

    /// `min:max:step` or `min:max` (step 10).
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |p: &str| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidParameter(format!("bad sweep {s:?}")))
        };
        let range = match parts.as_slice() {
            [a, b] => SweepRange { n_min: num(a)?, n_max: num(b)?, step: 10 },
            [a, b, c] => SweepRange { n_min: num(a)?, n_max: num(b)?, step: num(c)? },
            _ => return Err(Error::InvalidParameter(format!("bad sweep {s:?}"))),
        };
        range.windows()?;
        Ok(range)
    }
}

pub fn sweep_windows(signal: &MemSignal, range: &SweepRange) -> Result<BTreeMap<usize, MemSignal>> {
    Ok(range
        .windows()?
        .into_iter()
        .map(|n| (n, smooth(signal, &SmoothingConfig::new(n))))
        .collect())
}

pub fn total_variation(values: &[f64]) -> f64 {
    values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

const SIGNAL_FILE: &str = "signal table";

/// Tab-separated `shot_index, start_ms, raw, smoothed_<N>...`.
pub fn write_signal_table(raw: &MemSignal, smoothed: &BTreeMap<usize, MemSignal>) -> String {
    let mut w = tsv::writer();
    let mut header = vec!["shot_index".to_string(), "start_ms".into(), "raw".into()];
    header.extend(smoothed.keys().map(|n| format!("smoothed_{n}")));
    w.write_record(&header).unwrap();
    for (i, p) in raw.points.iter().enumerate() {
        let mut rec = vec![p.shot_index.to_string(), p.start_ms.to_string(), tsv::fmt_f64(p.score)];
        rec.extend(smoothed.values().map(|s| tsv::fmt_f64(s.points[i].score)));
        w.write_record(&rec).unwrap();
    }
    tsv::finish(w)
}

pub fn read_signal_table(episode_id: &str, text: &str) -> Result<(MemSignal, BTreeMap<usize, MemSignal>)> {
    let mut rdr = tsv::reader(text);
    let cols = Columns::new(SIGNAL_FILE, &mut rdr)?;
    let idx = cols.require("shot_index")?;
    let start = cols.require("start_ms")?;
    let raw_col = cols.require("raw")?;
    let windows: Vec<(usize, usize)> = rdr
        .headers()?
        .iter()
        .enumerate()
        .filter_map(|(c, h)| h.strip_prefix("smoothed_").and_then(|n| n.parse().ok()).map(|n| (n, c)))
        .collect();
    let mut raw = MemSignal {
        episode_id: episode_id.to_string(),
        points: Vec::new(),
    };
    let mut smoothed: BTreeMap<usize, Vec<f64>> = windows.iter().map(|&(n, _)| (n, Vec::new())).collect();
    for record in rdr.records() {
        let record = record?;
        let row = Row {
            file: SIGNAL_FILE,
            line: tsv::line_of(&record),
            record: &record,
        };
        raw.points.push(SignalPoint {
            shot_index: row.parse(idx, "shot_index")?,
            start_ms: row.parse(start, "start_ms")?,
            score: row.parse(raw_col, "raw")?,
        });
        for &(n, c) in &windows {
            smoothed.get_mut(&n).unwrap().push(row.parse(c, &format!("smoothed_{n}"))?);
        }
    }
    let smoothed = smoothed.into_iter().map(|(n, v)| (n, raw.with_scores(v))).collect();
    Ok((raw, smoothed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn signal(scores: &[f64]) -> MemSignal {
        MemSignal {
            episode_id: "e".into(),
            points: scores
                .iter()
                .enumerate()
                .map(|(i, &score)| SignalPoint {
                    shot_index: i,
                    start_ms: i as Millis * 1000,
                    score,
                })
                .collect(),
        }
    }

    fn shot(i: usize, a: Millis, b: Millis) -> Shot {
        Shot {
            episode_id: "e".into(),
            shot_index: i,
            start_ms: a,
            end_ms: b,
        }
    }

    fn score(i: usize, s: f64) -> ShotScore {
        ShotScore {
            shot_index: i,
            score: s,
            variance: 0.0,
            n_frames: 1,
        }
    }

    #[test]
    fn builds_in_time_order() {
        let shots = [shot(0, 0, 1000), shot(1, 1000, 2000), shot(2, 2000, 3000)];
        let s = build_signal(&shots, &[score(0, 0.7), score(1, 0.8), score(2, 0.9)]).unwrap();
        assert_eq!(s.scores(), vec![0.7, 0.8, 0.9]);
        let shuffled = build_signal(&shots, &[score(2, 0.9), score(0, 0.7), score(1, 0.8)]).unwrap();
        assert_eq!(shuffled, s);
        assert!(build_signal(&[], &[]).unwrap().is_empty());
    }

    #[test]
    fn count_mismatch() {
        let err = build_signal(&[shot(0, 0, 1000)], &[]).unwrap_err();
        assert!(matches!(err, Error::Cardinality { left: 1, right: 0, .. }));
        let err = build_signal(&[shot(0, 0, 1000)], &[score(3, 0.5)]).unwrap_err();
        assert!(err.to_string().contains("shot 0"));
    }

    #[test]
    fn shrink_window_by_hand() {
        let out = smooth(&signal(&[0.7, 0.8, 0.9]), &SmoothingConfig::new(3)).scores();
        let want = [0.75, 0.8, 0.85];
        for (a, b) in out.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_and_identity() {
        let c = signal(&[0.8; 40]);
        for v in smooth(&c, &SmoothingConfig::new(15)).scores() {
            assert!((v - 0.8).abs() < 1e-12);
        }
        let raw = signal(&[0.1, 0.9, 0.3]);
        assert_eq!(smooth(&raw, &SmoothingConfig::new(1)), raw);
    }

    #[test]
    fn default_sweep() {
        let w = SweepRange::default().windows().unwrap();
        assert_eq!(w.len(), 30);
        assert_eq!((w[0], w[1], *w.last().unwrap()), (15, 25, 305));
        let single = SweepRange { n_min: 15, n_max: 15, step: 10 };
        assert_eq!(sweep_windows(&signal(&[0.5; 5]), &single).unwrap().len(), 1);
        assert!(SweepRange { n_min: 20, n_max: 15, step: 10 }.windows().is_err());
        assert_eq!("15:40:10".parse::<SweepRange>().unwrap().windows().unwrap(), vec![15, 25, 35, 40]);
    }

    #[test]
    fn sweep_of_constant_stays_constant() {
        let c = signal(&[0.82; 50]);
        for (_, s) in sweep_windows(&c, &SweepRange::default()).unwrap() {
            assert!(s.scores().iter().all(|v| (v - 0.82).abs() < 1e-12));
        }
    }

    #[test]
    fn signal_table_round_trip() {
        let raw = signal(&[0.7, 0.8, 0.95, 0.71]);
        let range = SweepRange { n_min: 1, n_max: 3, step: 2 };
        let sweep = sweep_windows(&raw, &range).unwrap();
        let text = write_signal_table(&raw, &sweep);
        assert!(text.starts_with("shot_index\tstart_ms\traw\tsmoothed_1\tsmoothed_3\n"));
        let (raw2, sweep2) = read_signal_table("e", &text).unwrap();
        assert_eq!(raw2, raw);
        assert_eq!(sweep2, sweep);
    }
}

//! Shot segmentation: the shot-list interchange format and a classical
//! histogram-difference detector used when no neural detector output is
//! available.

use std::fmt::Write as _;

use crate::tsv::{self, Columns, Row};
use crate::{Error, Millis, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shot {
    pub episode_id: String,
    pub shot_index: usize,
    pub start_ms: Millis,
    pub end_ms: Millis,
}

impl Shot {
    pub fn duration_ms(&self) -> Millis {
        self.end_ms - self.start_ms
    }

    /// True when the half-open intervals share more than 0 ms.
    pub fn overlaps(&self, start_ms: Millis, end_ms: Millis) -> bool {
        self.start_ms.max(start_ms) < self.end_ms.min(end_ms)
    }
}

/// How [`parse_shot_list`] treats rows that are not in start order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShotListMode {
    /// Rows must already be ordered with consecutive indices from 0.
    #[default]
    Strict,
    /// Rows are sorted by start time and re-indexed.
    Lenient,
}

pub const SHOT_LIST_HEADER: [&str; 4] = ["episode_id", "shot_index", "start_ms", "end_ms"];
const SHOT_FILE: &str = "shot list";

pub fn parse_shot_list(text: &str, mode: ShotListMode) -> Result<Vec<Shot>> {
    let mut rdr = tsv::reader(text);
    let cols = Columns::new(SHOT_FILE, &mut rdr)?;
    let idx: Vec<usize> = SHOT_LIST_HEADER
        .iter()
        .map(|c| cols.require(c))
        .collect::<Result<_>>()?;
    let mut shots = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let row = Row {
            file: SHOT_FILE,
            line: tsv::line_of(&record),
            record: &record,
        };
        let shot = Shot {
            episode_id: row.get(idx[0], "episode_id")?.trim().to_string(),
            shot_index: row.parse(idx[1], "shot_index")?,
            start_ms: row.parse(idx[2], "start_ms")?,
            end_ms: row.parse(idx[3], "end_ms")?,
        };
        if shot.start_ms >= shot.end_ms {
            return Err(row.error("end_ms", format!("shot {} has start >= end", shot.shot_index)));
        }
        if let Some(first) = shots.first() {
            let first: &Shot = first;
            if first.episode_id != shot.episode_id {
                return Err(row.error(
                    "episode_id",
                    format!("mixed episodes {:?} and {:?}", first.episode_id, shot.episode_id),
                ));
            }
        }
        shots.push(shot);
    }

    if mode == ShotListMode::Lenient {
        shots.sort_by_key(|s| (s.start_ms, s.end_ms));
        for (i, s) in shots.iter_mut().enumerate() {
            s.shot_index = i;
        }
    }
    check_ordered(&shots)?;
    Ok(shots)
}

/// Checks ordering, non-overlap and consecutive indexing.
pub fn check_ordered(shots: &[Shot]) -> Result<()> {
    for (i, s) in shots.iter().enumerate() {
        if s.shot_index != i {
            return Err(Error::Validation(format!(
                "shot at position {i} has index {}, expected {i}",
                s.shot_index
            )));
        }
        if s.start_ms >= s.end_ms {
            return Err(Error::Validation(format!("shot {i} has start >= end")));
        }
    }
    for pair in shots.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if b.start_ms < a.start_ms {
            return Err(Error::Validation(format!(
                "shots {} and {} are out of order",
                a.shot_index, b.shot_index
            )));
        }
        if b.start_ms < a.end_ms {
            return Err(Error::Validation(format!(
                "shots {} and {} overlap",
                a.shot_index, b.shot_index
            )));
        }
    }
    Ok(())
}

pub fn write_shot_list(shots: &[Shot]) -> String {
    let mut w = tsv::writer();
    w.write_record(SHOT_LIST_HEADER).unwrap();
    for s in shots {
        w.write_record([
            s.episode_id.clone(),
            s.shot_index.to_string(),
            s.start_ms.to_string(),
            s.end_ms.to_string(),
        ])
        .unwrap();
    }
    tsv::finish(w)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    /// Uncovered `[start, end)` spans inside `[0, duration)`.
    pub gaps: Vec<(Millis, Millis)>,
    /// Index pairs of overlapping neighbours.
    pub overlaps: Vec<(usize, usize)>,
    /// Shots ending past the episode duration.
    pub out_of_range: Vec<usize>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.gaps.is_empty() && self.overlaps.is_empty() && self.out_of_range.is_empty()
    }
}

pub fn validate_shot_list(shots: &[Shot], episode_duration_ms: Millis) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut sorted: Vec<&Shot> = shots.iter().collect();
    sorted.sort_by_key(|s| (s.start_ms, s.end_ms));
    let mut covered_to = 0;
    for (i, s) in sorted.iter().enumerate() {
        if s.start_ms > covered_to {
            report.gaps.push((covered_to, s.start_ms.min(episode_duration_ms)));
        }
        if i > 0 && s.start_ms < sorted[i - 1].end_ms {
            report.overlaps.push((sorted[i - 1].shot_index, s.shot_index));
        }
        if s.end_ms > episode_duration_ms {
            report.out_of_range.push(s.shot_index);
        }
        covered_to = covered_to.max(s.end_ms);
    }
    if covered_to < episode_duration_ms {
        report.gaps.push((covered_to, episode_duration_ms));
    }
    report.gaps.retain(|(a, b)| a < b);
    report
}

/// 4×4×4 RGB bins.
pub const HISTOGRAM_BINS: usize = 64;
pub type Histogram = [f64; HISTOGRAM_BINS];

pub const DEFAULT_THRESHOLD: f64 = 0.5;
pub const DEFAULT_MIN_SHOT_MS: Millis = 400;

/// Normalised 64-bin colour histogram of a frame.
pub fn rgb_histogram(pixels: &[[u8; 3]]) -> Histogram {
    let mut h = [0.0; HISTOGRAM_BINS];
    if pixels.is_empty() {
        return h;
    }
    for [r, g, b] in pixels {
        h[usize::from(r >> 6) * 16 + usize::from(g >> 6) * 4 + usize::from(b >> 6)] += 1.0;
    }
    let n = pixels.len() as f64;
    h.iter_mut().for_each(|v| *v /= n);
    h
}

pub fn l1_distance(a: &Histogram, b: &Histogram) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Uniformly spaced frame histograms.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameHistogramSequence {
    frame_interval_ms: Millis,
    histograms: Vec<Histogram>,
}

impl FrameHistogramSequence {
    pub fn new(frame_interval_ms: Millis, histograms: Vec<Histogram>) -> Result<Self> {
        if frame_interval_ms == 0 {
            return Err(Error::InvalidParameter("frame interval must be positive".into()));
        }
        for (i, h) in histograms.iter().enumerate() {
            let sum: f64 = h.iter().sum();
            if h.iter().any(|v| !v.is_finite() || *v < 0.0) || (sum - 1.0).abs() > 1e-6 {
                return Err(Error::Validation(format!(
                    "histogram {i} is not normalised (sum {sum})"
                )));
            }
        }
        Ok(Self {
            frame_interval_ms,
            histograms,
        })
    }

    pub fn frame_interval_ms(&self) -> Millis {
        self.frame_interval_ms
    }

    pub fn histograms(&self) -> &[Histogram] {
        &self.histograms
    }

    pub fn len(&self) -> usize {
        self.histograms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.histograms.is_empty()
    }

    pub fn duration_ms(&self) -> Millis {
        self.histograms.len() as Millis * self.frame_interval_ms
    }
}

const HIST_FILE: &str = "histogram sequence";

/// Writes the `MEMHIST v1` text form: a header
/// `MEMHIST\tv1\tinterval_ms=<I>\tbins=64` followed by one comma-separated
/// histogram per line.
pub fn write_histograms(seq: &FrameHistogramSequence) -> String {
    let mut out = format!("MEMHIST\tv1\tinterval_ms={}\tbins={HISTOGRAM_BINS}\n", seq.frame_interval_ms);
    for h in &seq.histograms {
        for (i, v) in h.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write!(out, "{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn read_histograms(text: &str) -> Result<FrameHistogramSequence> {
    let err = |line, message: String| Error::Format {
        file: HIST_FILE,
        line,
        message,
    };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| err(1, "missing header".into()))?;
    let fields: Vec<&str> = header.split('\t').collect();
    if fields.len() < 4 || fields[0] != "MEMHIST" || fields[1] != "v1" {
        return Err(err(1, format!("bad header {header:?}")));
    }
    let mut interval = None;
    for f in &fields[2..] {
        match f.split_once('=') {
            Some(("interval_ms", v)) => interval = v.parse().ok(),
            Some(("bins", v)) if v != HISTOGRAM_BINS.to_string() => {
                return Err(err(1, format!("unsupported bin count {v}")));
            }
            _ => {}
        }
    }
    let interval = interval.ok_or_else(|| err(1, "missing interval_ms".into()))?;
    let mut histograms = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut h = [0.0; HISTOGRAM_BINS];
        let mut n = 0;
        for v in line.split(',') {
            if n == HISTOGRAM_BINS {
                return Err(err(i + 2, "too many bins".into()));
            }
            h[n] = v.trim().parse().map_err(|_| err(i + 2, format!("bad value {v:?}")))?;
            n += 1;
        }
        if n != HISTOGRAM_BINS {
            return Err(err(i + 2, format!("expected {HISTOGRAM_BINS} bins, found {n}")));
        }
        histograms.push(h);
    }
    FrameHistogramSequence::new(interval, histograms)
}

/// Declares a boundary between frames `i` and `i + 1` when the L1 distance of
/// their histograms exceeds `threshold`, dropping boundaries closer than
/// `min_shot_ms` to the previously accepted one. The returned shots tile
/// `[0, n * frame_interval_ms)`.
pub fn detect_shots_histogram(
    episode_id: &str,
    seq: &FrameHistogramSequence,
    threshold: f64,
    min_shot_ms: Millis,
) -> Result<Vec<Shot>> {
    if !(threshold > 0.0 && threshold <= 2.0) {
        return Err(Error::InvalidParameter(format!("threshold {threshold} outside (0, 2]")));
    }
    if min_shot_ms == 0 {
        return Err(Error::InvalidParameter("min_shot_ms must be positive".into()));
    }
    let end = seq.duration_ms();
    if seq.is_empty() {
        return Ok(Vec::new());
    }
    let mut cuts = vec![0];
    for (i, pair) in seq.histograms.windows(2).enumerate() {
        if l1_distance(&pair[0], &pair[1]) > threshold {
            let t = (i as Millis + 1) * seq.frame_interval_ms;
            if t - cuts.last().unwrap() >= min_shot_ms {
                cuts.push(t);
            }
        }
    }
    cuts.push(end);
    Ok(cuts
        .windows(2)
        .enumerate()
        .map(|(i, w)| Shot {
            episode_id: episode_id.to_string(),
            shot_index: i,
            start_ms: w[0],
            end_ms: w[1],
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_hot(bin: usize) -> Histogram {
        let mut h = [0.0; HISTOGRAM_BINS];
        h[bin] = 1.0;
        h
    }

    fn seq_with_cuts(n: usize, cuts: &[usize], interval: Millis) -> FrameHistogramSequence {
        let mut bin = 0;
        let hs = (0..n)
            .map(|i| {
                if cuts.contains(&i) {
                    bin += 1;
                }
                one_hot(bin)
            })
            .collect();
        FrameHistogramSequence::new(interval, hs).unwrap()
    }

    const HEADER: &str = "episode_id\tshot_index\tstart_ms\tend_ms\n";

    #[test]
    fn two_rows() {
        let text = format!("{HEADER}s01e01\t0\t0\t5000\ns01e01\t1\t5000\t9000\n");
        let shots = parse_shot_list(&text, ShotListMode::Strict).unwrap();
        assert_eq!(shots.len(), 2);
        assert_eq!(shots[1].start_ms, 5000);
    }

    #[test]
    fn disorder_rejected_in_strict_mode() {
        let text = format!("{HEADER}e\t0\t5000\t9000\ne\t1\t0\t5000\ne\t2\t9000\t9500\n");
        assert!(parse_shot_list(&text, ShotListMode::Strict).is_err());
        let shots = parse_shot_list(&text, ShotListMode::Lenient).unwrap();
        assert_eq!(shots.iter().map(|s| s.shot_index).collect::<Vec<_>>(), vec![0, 1, 2]);
        assert_eq!(shots.iter().map(|s| s.start_ms).collect::<Vec<_>>(), vec![0, 5000, 9000]);
    }

    #[test]
    fn overlap_names_indices() {
        let text = format!("{HEADER}e\t0\t0\t5000\ne\t1\t4000\t9000\n");
        let err = parse_shot_list(&text, ShotListMode::Lenient).unwrap_err();
        assert!(err.to_string().contains("shots 0 and 1 overlap"), "{err}");
    }

    #[test]
    fn shot_list_round_trip() {
        let text = format!("{HEADER}e\t0\t0\t5000\ne\t1\t5200\t9000\n");
        let shots = parse_shot_list(&text, ShotListMode::Strict).unwrap();
        assert_eq!(write_shot_list(&shots), text);
    }

    #[test]
    fn constant_sequence_is_one_shot() {
        let seq = seq_with_cuts(50, &[], 40);
        let shots = detect_shots_histogram("e", &seq, 0.5, 400).unwrap();
        assert_eq!(shots.len(), 1);
        assert_eq!((shots[0].start_ms, shots[0].end_ms), (0, 2000));
    }

    #[test]
    fn abrupt_change_at_frame_100() {
        let seq = seq_with_cuts(200, &[100], 40);
        let shots = detect_shots_histogram("e", &seq, 0.5, 400).unwrap();
        assert_eq!(shots.len(), 2);
        assert_eq!(shots[0].end_ms, 4000);
        assert_eq!(shots[1].start_ms, 4000);
    }

    #[test]
    fn close_second_cut_suppressed() {
        // Cuts at frames 100 and 105: 200 ms apart at 40 ms spacing.
        let seq = seq_with_cuts(200, &[100, 105], 40);
        let shots = detect_shots_histogram("e", &seq, 0.5, 500).unwrap();
        assert_eq!(shots.iter().map(|s| s.start_ms).collect::<Vec<_>>(), vec![0, 4000]);
        let shots = detect_shots_histogram("e", &seq, 0.5, 100).unwrap();
        assert_eq!(shots.len(), 3);
    }

    #[test]
    fn short_sequences() {
        assert!(detect_shots_histogram("e", &seq_with_cuts(0, &[], 40), 0.5, 400).unwrap().is_empty());
        let one = detect_shots_histogram("e", &seq_with_cuts(1, &[], 40), 0.5, 400).unwrap();
        assert_eq!((one[0].start_ms, one[0].end_ms), (0, 40));
    }

    #[test]
    fn bad_parameters() {
        let seq = seq_with_cuts(3, &[], 40);
        assert!(detect_shots_histogram("e", &seq, 0.0, 400).is_err());
        assert!(detect_shots_histogram("e", &seq, 2.5, 400).is_err());
        assert!(detect_shots_histogram("e", &seq, 0.5, 0).is_err());
    }

    #[test]
    fn unnormalised_histogram_rejected() {
        assert!(FrameHistogramSequence::new(40, vec![[0.5; HISTOGRAM_BINS]]).is_err());
    }

    #[test]
    fn validation_report() {
        let shot = |i, a, b| Shot {
            episode_id: "e".into(),
            shot_index: i,
            start_ms: a,
            end_ms: b,
        };
        assert!(validate_shot_list(&[shot(0, 0, 5000), shot(1, 5000, 9000)], 9000).is_empty());
        let r = validate_shot_list(&[shot(0, 0, 5000), shot(1, 5200, 9000)], 9000);
        assert_eq!(r.gaps, vec![(5000, 5200)]);
        assert!(r.overlaps.is_empty() && r.out_of_range.is_empty());
        let r = validate_shot_list(&[shot(0, 0, 5000), shot(1, 5000, 9500)], 9000);
        assert_eq!(r.out_of_range, vec![1]);
        assert!(r.gaps.is_empty());
        let r = validate_shot_list(&[shot(0, 0, 5000), shot(1, 4000, 9000)], 9000);
        assert_eq!(r.overlaps, vec![(0, 1)]);
    }

    #[test]
    fn histogram_file_round_trip() {
        let mut h = [0.0; HISTOGRAM_BINS];
        h[3] = 0.1;
        h[7] = 0.9;
        let seq = FrameHistogramSequence::new(40, vec![one_hot(0), h]).unwrap();
        let text = write_histograms(&seq);
        assert!(text.starts_with("MEMHIST\tv1\tinterval_ms=40\tbins=64\n"));
        assert_eq!(read_histograms(&text).unwrap(), seq);
    }

    #[test]
    fn rgb_quantisation() {
        let h = rgb_histogram(&[[0, 0, 0], [255, 255, 255], [255, 255, 255], [70, 0, 200]]);
        assert_eq!(h[0], 0.25);
        assert_eq!(h[63], 0.5);
        assert_eq!(h[16 + 3], 0.25);
    }
}

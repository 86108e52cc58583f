//! Memorability distributions per character and per aspect, and rank
//! comparisons against speaking time.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::alignment::ShotContext;
use crate::corpus::Aspect;
use crate::regressor::ShotScore;
use crate::tsv::{self, Columns, Row};
use crate::{Error, Result};

/// Season number from ids such as `s01e08` (case-insensitive).
pub fn season_of(episode_id: &str) -> Option<u32> {
    let lower = episode_id.to_ascii_lowercase();
    let rest = lower.strip_prefix('s')?;
    let digits: String = rest.chars().take_while(char::is_ascii_digit).collect();
    if digits.is_empty() || !rest[digits.len()..].starts_with('e') {
        return None;
    }
    digits.parse().ok()
}

/// Aligned contexts and scores of one episode.
#[derive(Debug, Clone)]
pub struct EpisodeScores {
    pub episode_id: String,
    pub season: Option<u32>,
    pub contexts: Vec<ShotContext>,
    pub scores: Vec<ShotScore>,
}

impl EpisodeScores {
    pub fn new(episode_id: impl Into<String>, contexts: Vec<ShotContext>, scores: Vec<ShotScore>) -> Self {
        let episode_id = episode_id.into();
        Self {
            season: season_of(&episode_id),
            episode_id,
            contexts,
            scores,
        }
    }

    fn joined(&self) -> Result<Vec<(&ShotContext, f64)>> {
        let by_index: HashMap<usize, f64> = self.scores.iter().map(|s| (s.shot_index, s.score)).collect();
        if by_index.len() != self.contexts.len() {
            return Err(Error::Cardinality {
                left_what: "shot contexts",
                left: self.contexts.len(),
                right_what: "shot scores",
                right: by_index.len(),
            });
        }
        self.contexts
            .iter()
            .map(|c| {
                by_index
                    .get(&c.shot_index)
                    .map(|&s| (c, s))
                    .ok_or_else(|| Error::Validation(format!("{}: no score for shot {}", self.episode_id, c.shot_index)))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupKind {
    Character,
    Aspect,
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupKind::Character => "character",
            GroupKind::Aspect => "aspect",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SeasonKey {
    Season(u32),
    All,
}

impl fmt::Display for SeasonKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeasonKey::Season(s) => write!(f, "{s}"),
            SeasonKey::All => f.write_str("all"),
        }
    }
}

/// Tukey letter values of a sample: median, fourths, eighths, sixteenths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LetterValues {
    pub mean: f64,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub eighths: (f64, f64),
    pub sixteenths: (f64, f64),
}

impl LetterValues {
    pub fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        // Depths are in half-steps: d_median = (n + 1) / 2, d_next = (floor(d) + 1) / 2.
        let at_depth = |d: f64| -> (f64, f64) {
            let lo_i = d.floor() as usize;
            let frac = d - d.floor();
            let lower = if frac > 0.0 {
                (sorted[lo_i - 1] + sorted[lo_i]) / 2.0
            } else {
                sorted[lo_i - 1]
            };
            let upper = if frac > 0.0 {
                (sorted[n - lo_i] + sorted[n - lo_i - 1]) / 2.0
            } else {
                sorted[n - lo_i]
            };
            (lower, upper)
        };
        let d_median = (n as f64 + 1.0) / 2.0;
        let d_fourth = (d_median.floor() + 1.0) / 2.0;
        let d_eighth = (d_fourth.floor() + 1.0) / 2.0;
        let d_sixteenth = (d_eighth.floor() + 1.0) / 2.0;
        let (q1, q3) = at_depth(d_fourth);
        Some(Self {
            mean: sorted.iter().sum::<f64>() / n as f64,
            median: at_depth(d_median).0,
            q1,
            q3,
            eighths: at_depth(d_eighth),
            sixteenths: at_depth(d_sixteenth),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionSummary {
    pub kind: GroupKind,
    pub group: String,
    pub season: SeasonKey,
    pub n: usize,
    /// `None` when the group is empty.
    pub stats: Option<LetterValues>,
}

fn summarize<F>(
    episodes: &[EpisodeScores],
    seasons: Option<&BTreeSet<u32>>,
    kind: GroupKind,
    groups: &[String],
    keys_of: F,
) -> Result<Vec<DistributionSummary>>
where
    F: Fn(&ShotContext) -> Vec<String>,
{
    let selected: Vec<&EpisodeScores> = episodes
        .iter()
        .filter(|e| match (seasons, e.season) {
            (None, _) => true,
            (Some(set), Some(s)) => set.contains(&s),
            (Some(_), None) => false,
        })
        .collect();
    let season_keys: BTreeSet<SeasonKey> = selected
        .iter()
        .filter_map(|e| e.season.map(SeasonKey::Season))
        .chain([SeasonKey::All])
        .collect();

    let mut buckets: BTreeMap<(&str, SeasonKey), Vec<f64>> = BTreeMap::new();
    let wanted: BTreeSet<&str> = groups.iter().map(String::as_str).collect();
    for ep in &selected {
        for (ctx, score) in ep.joined()? {
            for key in keys_of(ctx) {
                let Some(&group) = wanted.get(key.as_str()) else { continue };
                if let Some(s) = ep.season {
                    buckets.entry((group, SeasonKey::Season(s))).or_default().push(score);
                }
                buckets.entry((group, SeasonKey::All)).or_default().push(score);
            }
        }
    }

    let mut out = Vec::new();
    for group in groups {
        for &season in &season_keys {
            let values = buckets.get(&(group.as_str(), season)).map_or(&[][..], Vec::as_slice);
            out.push(DistributionSummary {
                kind,
                group: group.clone(),
                season,
                n: values.len(),
                stats: LetterValues::from_values(values),
            });
        }
    }
    Ok(out)
}

/// A shot's score counts towards every main-cast member speaking in it.
pub fn memorability_by_character(
    episodes: &[EpisodeScores],
    cast: &[String],
    seasons: Option<&BTreeSet<u32>>,
) -> Result<Vec<DistributionSummary>> {
    summarize(episodes, seasons, GroupKind::Character, cast, |ctx| ctx.speakers.iter().cloned().collect())
}

/// A shot's score counts towards every aspect in its context.
pub fn memorability_by_aspect(
    episodes: &[EpisodeScores],
    seasons: Option<&BTreeSet<u32>>,
) -> Result<Vec<DistributionSummary>> {
    let groups: Vec<String> = Aspect::ALL.iter().map(|a| a.label().to_string()).collect();
    summarize(episodes, seasons, GroupKind::Aspect, &groups, |ctx| {
        ctx.aspects.iter().map(|a| a.label().to_string()).collect()
    })
}

/// Groups of the given kind over all seasons, ordered by descending median
/// (ties by name). Empty groups are left out.
pub fn rank_by_median(summaries: &[DistributionSummary], kind: GroupKind) -> Vec<String> {
    let mut ranked: Vec<(&str, f64)> = summaries
        .iter()
        .filter(|s| s.kind == kind && s.season == SeasonKey::All)
        .filter_map(|s| s.stats.map(|st| (s.group.as_str(), st.median)))
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked.into_iter().map(|(g, _)| g.to_string()).collect()
}

/// Ranks starting at 1, ties sharing their average rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::DegenerateFit("rank correlation of a constant sequence".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman's rho: Pearson correlation of average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Cardinality {
            left_what: "x values",
            left: x.len(),
            right_what: "y values",
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::InvalidParameter("rank correlation needs at least 2 elements".into()));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("rank correlation input"));
    }
    pearson(&average_ranks(x), &average_ranks(y))
}

/// Spearman's rho between two orderings of the same elements.
pub fn rank_correlation<T: Ord + fmt::Debug>(order_a: &[T], order_b: &[T]) -> Result<f64> {
    let pos_b: BTreeMap<&T, usize> = order_b.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let set_a: BTreeSet<&T> = order_a.iter().collect();
    if set_a.len() != order_a.len() || pos_b.len() != order_b.len() {
        return Err(Error::Validation("ordering contains duplicate elements".into()));
    }
    if set_a != pos_b.keys().copied().collect() {
        return Err(Error::Validation(format!(
            "orderings have different elements: {order_a:?} vs {order_b:?}"
        )));
    }
    let a: Vec<f64> = (0..order_a.len()).map(|i| i as f64).collect();
    let b: Vec<f64> = order_a.iter().map(|t| pos_b[t] as f64).collect();
    spearman(&a, &b)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScreenTimeRow {
    pub character: String,
    pub speaking_minutes: f64,
    pub median_memorability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScreenTimeComparison {
    pub rows: Vec<ScreenTimeRow>,
    pub rho: f64,
}

/// Pairs each character's speaking minutes with their all-season median
/// memorability and correlates the two.
pub fn screen_time_vs_memorability(
    summaries: &[DistributionSummary],
    speaking_minutes: &BTreeMap<String, f64>,
) -> Result<ScreenTimeComparison> {
    let rows: Vec<ScreenTimeRow> = summaries
        .iter()
        .filter(|s| s.kind == GroupKind::Character && s.season == SeasonKey::All)
        .filter_map(|s| {
            let minutes = *speaking_minutes.get(&s.group)?;
            Some(ScreenTimeRow {
                character: s.group.clone(),
                speaking_minutes: minutes,
                median_memorability: s.stats?.median,
            })
        })
        .collect();
    if rows.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 characters with both speaking time and scores, found {}",
            rows.len()
        )));
    }
    let x: Vec<f64> = rows.iter().map(|r| r.speaking_minutes).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.median_memorability).collect();
    Ok(ScreenTimeComparison {
        rho: spearman(&x, &y)?,
        rows,
    })
}

/// Share of scores at or above `threshold`.
pub fn fraction_at_least(scores: &[f64], threshold: f64) -> f64 {
    if scores.is_empty() {
        return 0.0;
    }
    scores.iter().filter(|&&s| s >= threshold).count() as f64 / scores.len() as f64
}

const SUMMARY_FILE: &str = "distribution summary";
const SUMMARY_HEADER: [&str; 12] = [
    "kind", "group", "season", "n", "mean", "median", "q1", "q3", "e_lo", "e_hi", "d_lo", "d_hi",
];
const UNDEFINED: &str = "NA";

pub fn write_summaries(summaries: &[DistributionSummary]) -> String {
    let mut w = tsv::writer();
    w.write_record(SUMMARY_HEADER).unwrap();
    for s in summaries {
        let mut rec = vec![s.kind.to_string(), s.group.clone(), s.season.to_string(), s.n.to_string()];
        match s.stats {
            Some(v) => rec.extend(
                [v.mean, v.median, v.q1, v.q3, v.eighths.0, v.eighths.1, v.sixteenths.0, v.sixteenths.1]
                    .map(tsv::fmt_f64),
            ),
            None => rec.extend(std::iter::repeat_n(UNDEFINED.to_string(), 8)),
        }
        w.write_record(&rec).unwrap();
    }
    tsv::finish(w)
}

pub fn read_summaries(text: &str) -> Result<Vec<DistributionSummary>> {
    let mut rdr = tsv::reader(text);
    let cols = Columns::new(SUMMARY_FILE, &mut rdr)?;
    let idx: Vec<usize> = SUMMARY_HEADER.iter().map(|c| cols.require(c)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let row = Row {
            file: SUMMARY_FILE,
            line: tsv::line_of(&record),
            record: &record,
        };
        let kind = match row.get(idx[0], "kind")? {
            "character" => GroupKind::Character,
            "aspect" => GroupKind::Aspect,
            other => return Err(row.error("kind", format!("unknown kind {other:?}"))),
        };
        let season = match row.get(idx[2], "season")? {
            "all" => SeasonKey::All,
            _ => SeasonKey::Season(row.parse(idx[2], "season")?),
        };
        let stats = if row.get(idx[4], "mean")? == UNDEFINED {
            None
        } else {
            let v = |i: usize| row.parse::<f64>(idx[i], SUMMARY_HEADER[i]);
            Some(LetterValues {
                mean: v(4)?,
                median: v(5)?,
                q1: v(6)?,
                q3: v(7)?,
                eighths: (v(8)?, v(9)?),
                sixteenths: (v(10)?, v(11)?),
            })
        };
        out.push(DistributionSummary {
            kind,
            group: row.get(idx[1], "group")?.to_string(),
            season,
            n: row.parse(idx[3], "n")?,
            stats,
        });
    }
    Ok(out)
}

pub fn write_screen_time(cmp: &ScreenTimeComparison) -> String {
    let mut w = tsv::writer();
    w.write_record(["character", "speaking_minutes", "median_memorability"]).unwrap();
    for r in &cmp.rows {
        w.write_record([r.character.clone(), tsv::fmt_f64(r.speaking_minutes), tsv::fmt_f64(r.median_memorability)])
            .unwrap();
    }
    w.write_record(["#spearman_rho", &tsv::fmt_f64(cmp.rho), ""]).unwrap();
    tsv::finish(w)
}

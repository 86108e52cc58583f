//! Joins shots with the sentence-level annotation by time overlap.

use std::collections::{BTreeMap, BTreeSet};

use crate::corpus::{Aspect, AspectSet, EpisodeAnnotation};
use crate::shots::Shot;
use crate::tsv::{self, Columns, Row};
use crate::Result;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ShotContext {
    pub shot_index: usize,
    /// `(case_id, sent_id)` of every sentence overlapping the shot.
    pub sentence_ids: Vec<(u32, u32)>,
    /// Named speakers of those sentences; stage directions are not included.
    pub speakers: BTreeSet<String>,
    pub aspects: AspectSet,
    pub scene_ids: BTreeSet<u32>,
}

/// Attributes every sentence to every shot it overlaps by more than 0 ms.
pub fn align_shots(shots: &[Shot], ann: &EpisodeAnnotation) -> Vec<ShotContext> {
    // Rows are ordered by start time, so only a prefix can overlap a shot.
    let rows = &ann.rows;
    shots
        .iter()
        .map(|shot| {
            let mut ctx = ShotContext {
                shot_index: shot.shot_index,
                ..Default::default()
            };
            let candidates = rows.partition_point(|r| r.sentence.start_ms < shot.end_ms);
            for r in &rows[..candidates] {
                let s = &r.sentence;
                if !shot.overlaps(s.start_ms, s.end_ms) {
                    continue;
                }
                ctx.sentence_ids.push(s.key());
                if let Some(name) = &s.speaker {
                    ctx.speakers.insert(name.clone());
                }
                ctx.aspects.extend(&s.aspects);
                ctx.scene_ids.insert(r.scene_id);
            }
            ctx
        })
        .collect()
}

/// Minutes spoken by `character`, summed over sentence bounds.
pub fn speaking_time(ann: &EpisodeAnnotation, character: &str) -> f64 {
    let ms: u64 = ann
        .sentences()
        .filter(|s| s.speaker.as_deref() == Some(character))
        .map(|s| s.duration_ms())
        .sum();
    ms as f64 / 60_000.0
}

/// Speaking minutes of every named speaker across episodes.
pub fn speaking_times<'a>(anns: impl IntoIterator<Item = &'a EpisodeAnnotation>) -> BTreeMap<String, f64> {
    let mut ms: BTreeMap<String, u64> = BTreeMap::new();
    for ann in anns {
        for s in ann.sentences() {
            if let Some(name) = &s.speaker {
                *ms.entry(name.clone()).or_default() += s.duration_ms();
            }
        }
    }
    ms.into_iter().map(|(k, v)| (k, v as f64 / 60_000.0)).collect()
}

/// Number of scenes carrying each aspect; a scene counts once per aspect.
pub fn aspect_scene_counts(ann: &EpisodeAnnotation) -> BTreeMap<Aspect, usize> {
    let mut counts = BTreeMap::new();
    for indices in ann.scenes().into_values() {
        let mut aspects = AspectSet::new();
        for i in indices {
            aspects.extend(&ann.rows[i].sentence.aspects);
        }
        for a in aspects.iter() {
            *counts.entry(a).or_default() += 1;
        }
    }
    counts
}

pub fn aspect_scene_counts_all<'a>(anns: impl IntoIterator<Item = &'a EpisodeAnnotation>) -> BTreeMap<Aspect, usize> {
    let mut total = BTreeMap::new();
    for ann in anns {
        for (a, c) in aspect_scene_counts(ann) {
            *total.entry(a).or_default() += c;
        }
    }
    total
}

/// The `top_k` speakers by total speaking time, ties broken by name.
pub fn main_cast<'a>(anns: impl IntoIterator<Item = &'a EpisodeAnnotation>, top_k: usize) -> Vec<String> {
    let mut ranked: Vec<(String, f64)> = speaking_times(anns).into_iter().collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.into_iter().take(top_k).map(|(name, _)| name).collect()
}

const CONTEXT_FILE: &str = "shot contexts";
const CONTEXT_HEADER: [&str; 4] = ["shot_index", "speakers", "aspects", "scene_ids"];

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|t| t.to_string()).collect::<Vec<_>>().join(";")
}

pub fn write_contexts(contexts: &[ShotContext]) -> String {
    let mut w = tsv::writer();
    w.write_record(CONTEXT_HEADER).unwrap();
    for c in contexts {
        w.write_record([
            c.shot_index.to_string(),
            join(&c.speakers),
            c.aspects.to_string(),
            join(&c.scene_ids),
        ])
        .unwrap();
    }
    tsv::finish(w)
}

/// Reads the export back. Sentence ids are not part of the file and come back
/// empty.
pub fn read_contexts(text: &str) -> Result<Vec<ShotContext>> {
    let mut rdr = tsv::reader(text);
    let cols = Columns::new(CONTEXT_FILE, &mut rdr)?;
    let idx: Vec<usize> = CONTEXT_HEADER.iter().map(|c| cols.require(c)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let row = Row {
            file: CONTEXT_FILE,
            line: tsv::line_of(&record),
            record: &record,
        };
        let scene_ids = tsv::split_set(row.get(idx[3], "scene_ids")?)
            .map(|s| s.parse().map_err(|_| row.error("scene_ids", format!("bad scene id {s:?}"))))
            .collect::<Result<_>>()?;
        out.push(ShotContext {
            shot_index: row.parse(idx[0], "shot_index")?,
            sentence_ids: Vec::new(),
            speakers: tsv::split_set(row.get(idx[1], "speakers")?).map(String::from).collect(),
            aspects: AspectSet::parse_list(row.get(idx[2], "aspects")?, false)
                .map_err(|e| row.error("aspects", e.to_string()))?,
            scene_ids,
        });
    }
    Ok(out)
}

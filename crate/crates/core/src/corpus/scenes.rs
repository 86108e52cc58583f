use std::collections::BTreeMap;

use super::{AspectSet, Sentence};
use crate::tsv::{self, Columns, Row};
use crate::{Error, Result};

/// Separates sentence lines inside a scene's screenplay field.
pub const SCREENPLAY_SEPARATOR: char = '|';

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scene {
    pub scene_id: u32,
    /// Screenplay lines, one per sentence, in episode order.
    pub screenplay: Vec<String>,
    pub aspects: AspectSet,
}

/// Scene membership of one sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SceneMembership {
    pub case_id: u32,
    pub sent_id: u32,
    pub scene_id: u32,
    pub aspects: AspectSet,
}

const SCENE_FILE: &str = "scene corpus";

/// Parses the scene-level corpus and returns scenes sorted by id.
pub fn parse_scene_corpus(text: &str) -> Result<Vec<Scene>> {
    let mut rdr = tsv::reader(text);
    let cols = Columns::new(SCENE_FILE, &mut rdr)?;
    let id = cols.require("sceneID")?;
    let screenplay = cols.require("screenplay")?;
    let aspect = cols.require("aspect")?;

    let mut scenes = BTreeMap::new();
    for record in rdr.records() {
        let record = record?;
        let row = Row {
            file: SCENE_FILE,
            line: tsv::line_of(&record),
            record: &record,
        };
        let scene_id: u32 = row.parse(id, "sceneID")?;
        let aspects = AspectSet::parse_list(row.get(aspect, "aspect")?, true)?;
        let aspects = if aspects.is_empty() { AspectSet::none() } else { aspects };
        let lines = row
            .get(screenplay, "screenplay")?
            .split(SCREENPLAY_SEPARATOR)
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(String::from)
            .collect();
        let scene = Scene {
            scene_id,
            screenplay: lines,
            aspects,
        };
        if scenes.insert(scene_id, scene).is_some() {
            return Err(Error::DuplicateKey(format!("scene {scene_id}")));
        }
    }
    Ok(scenes.into_values().collect())
}

fn normalized(text: &str) -> String {
    text.chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(char::to_lowercase)
        .collect()
}

/// Expands scenes to one membership row per sentence.
///
/// Matching is positional: the scenes' screenplay lines, concatenated in
/// `scene_id` order, line up one-to-one with `sentences`. Text equality (ignoring
/// case, whitespace and punctuation) is checked on every pair.
pub fn disaggregate_scenes(scenes: &[Scene], sentences: &[Sentence]) -> Result<Vec<SceneMembership>> {
    let slots: usize = scenes.iter().map(|s| s.screenplay.len()).sum();
    if slots > sentences.len() {
        return Err(Error::Cardinality {
            left_what: "screenplay lines",
            left: slots,
            right_what: "sentences",
            right: sentences.len(),
        });
    }
    if let Some(uncovered) = sentences.get(slots) {
        return Err(Error::UncoveredSentence {
            case_id: uncovered.case_id,
            sent_id: uncovered.sent_id,
        });
    }

    let mut ordered: Vec<&Scene> = scenes.iter().collect();
    ordered.sort_by_key(|s| s.scene_id);
    let mut out = Vec::with_capacity(slots);
    let mut sentences = sentences.iter();
    for scene in ordered {
        for line in &scene.screenplay {
            let s = sentences.next().expect("slot count checked above");
            if normalized(line) != normalized(&s.text) {
                return Err(Error::SceneTextMismatch {
                    scene_id: scene.scene_id,
                    case_id: s.case_id,
                    sent_id: s.sent_id,
                    expected: line.clone(),
                    found: s.text.clone(),
                });
            }
            out.push(SceneMembership {
                case_id: s.case_id,
                sent_id: s.sent_id,
                scene_id: scene.scene_id,
                aspects: scene.aspects.clone(),
            });
        }
    }
    Ok(out)
}

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use log::warn;

use super::{
    aggregate_to_sentences, disaggregate_scenes, parse_scene_corpus, parse_speaker, parse_word_corpus, speaker_label,
    Aspect, AspectSet, SceneMembership, Sentence, TypeMentioned,
};
use crate::tsv::{self, Columns, Row};
use crate::{Error, Result};

/// Narrative role of a speaking character within one episode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Perpetrator,
    Suspect,
    Other,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Perpetrator => "perpetrator",
            Role::Suspect => "suspect",
            Role::Other => "other",
        })
    }
}

impl FromStr for Role {
    type Err = Error;

    fn from_str(s: &str) -> Result<Role> {
        match s.trim().to_ascii_lowercase().as_str() {
            "perpetrator" | "killer" => Ok(Role::Perpetrator),
            "suspect" => Ok(Role::Suspect),
            "other" => Ok(Role::Other),
            _ => Err(Error::InvalidParameter(format!("unknown cast role {s:?}"))),
        }
    }
}

pub type CastRoles = BTreeMap<String, Role>;

/// Parses `<character>\t<role>` lines. Blank lines and `#` comments are
/// skipped.
pub fn parse_cast_roles(text: &str) -> Result<CastRoles> {
    let mut roles = CastRoles::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let (name, role) = line.split_once('\t').ok_or_else(|| Error::Format {
            file: "cast roles",
            line: i + 1,
            message: "expected <character>\\t<role>".into(),
        })?;
        let role = role.parse().map_err(|e: Error| Error::Format {
            file: "cast roles",
            line: i + 1,
            message: e.to_string(),
        })?;
        roles.insert(name.trim().to_string(), role);
    }
    Ok(roles)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedSentence {
    pub sentence: Sentence,
    pub scene_id: u32,
}

/// Merged sentence-level annotation for one episode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpisodeAnnotation {
    pub episode_id: String,
    /// Sentences in episode order, each tagged with its scene.
    pub rows: Vec<AnnotatedSentence>,
    /// Speaking-character roles used by [`augment_aspects`].
    pub cast_roles: Option<CastRoles>,
}

impl EpisodeAnnotation {
    pub fn empty(episode_id: impl Into<String>) -> Self {
        Self {
            episode_id: episode_id.into(),
            rows: Vec::new(),
            cast_roles: None,
        }
    }

    pub fn with_cast_roles(mut self, roles: CastRoles) -> Self {
        self.cast_roles = Some(roles);
        self
    }

    pub fn sentences(&self) -> impl Iterator<Item = &Sentence> {
        self.rows.iter().map(|r| &r.sentence)
    }

    /// Row indices grouped by scene id.
    pub fn scenes(&self) -> BTreeMap<u32, Vec<usize>> {
        let mut scenes: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (i, r) in self.rows.iter().enumerate() {
            scenes.entry(r.scene_id).or_default().push(i);
        }
        scenes
    }

    fn check_order(&self) -> Result<()> {
        for pair in self.rows.windows(2) {
            let (a, b) = (&pair[0].sentence, &pair[1].sentence);
            if b.start_ms < a.start_ms {
                return Err(Error::Validation(format!(
                    "{}: sentence {}/{} starts before its predecessor {}/{}",
                    self.episode_id, b.case_id, b.sent_id, a.case_id, a.sent_id
                )));
            }
        }
        Ok(())
    }
}

/// Joins sentences with their scene membership rows by sentence key.
pub fn merge_corpora(
    episode_id: &str,
    sentences: Vec<Sentence>,
    membership: &[SceneMembership],
) -> Result<EpisodeAnnotation> {
    if sentences.len() != membership.len() {
        return Err(Error::Cardinality {
            left_what: "sentences",
            left: sentences.len(),
            right_what: "scene membership rows",
            right: membership.len(),
        });
    }
    let mut by_key: HashMap<(u32, u32), &SceneMembership> = HashMap::with_capacity(membership.len());
    for m in membership {
        if by_key.insert((m.case_id, m.sent_id), m).is_some() {
            return Err(Error::DuplicateKey(format!("scene membership for {}/{}", m.case_id, m.sent_id)));
        }
    }
    let mut rows = Vec::with_capacity(sentences.len());
    for mut sentence in sentences {
        let m = by_key
            .remove(&sentence.key())
            .ok_or(Error::UncoveredSentence {
                case_id: sentence.case_id,
                sent_id: sentence.sent_id,
            })?;
        sentence.aspects = m.aspects.clone();
        rows.push(AnnotatedSentence {
            sentence,
            scene_id: m.scene_id,
        });
    }
    let ann = EpisodeAnnotation {
        episode_id: episode_id.to_string(),
        rows,
        cast_roles: None,
    };
    ann.check_order()?;
    Ok(ann)
}

/// Adds `Perpetrator` (resp. `Suspect`) to every sentence of a scene in
/// which a character with that role speaks.
pub fn augment_aspects(mut ann: EpisodeAnnotation) -> EpisodeAnnotation {
    let Some(roles) = ann.cast_roles.as_ref() else {
        warn!("{}: no cast roles supplied, aspects left unchanged", ann.episode_id);
        return ann;
    };
    let mut additions: Vec<(Vec<usize>, AspectSet)> = Vec::new();
    for indices in ann.scenes().into_values() {
        let mut add = AspectSet::new();
        for &i in &indices {
            let speaker = ann.rows[i].sentence.speaker.as_deref();
            match speaker.and_then(|s| roles.get(s)) {
                Some(Role::Perpetrator) => add.insert(Aspect::Perpetrator),
                Some(Role::Suspect) => add.insert(Aspect::Suspect),
                _ => {}
            }
        }
        if !add.is_empty() {
            additions.push((indices, add));
        }
    }
    for (indices, add) in additions {
        for i in indices {
            ann.rows[i].sentence.aspects.extend(&add);
        }
    }
    ann
}

/// Runs the whole ETL for one episode: words to sentences, scenes to
/// sentence membership, merge, then augmentation when roles are given.
pub fn build_annotation(
    episode_id: &str,
    word_corpus: &str,
    scene_corpus: &str,
    cast_roles: Option<CastRoles>,
) -> Result<EpisodeAnnotation> {
    let sentences = aggregate_to_sentences(&parse_word_corpus(word_corpus)?)?;
    let membership = disaggregate_scenes(&parse_scene_corpus(scene_corpus)?, &sentences)?;
    let ann = merge_corpora(episode_id, sentences, &membership)?;
    Ok(match cast_roles {
        Some(roles) => augment_aspects(ann.with_cast_roles(roles)),
        None => ann,
    })
}

const ANNOTATION_FILE: &str = "annotation";
const ANNOTATION_HEADER: [&str; 9] = [
    "caseID",
    "sentID",
    "speaker",
    "type_mentioned",
    "start_ms",
    "end_ms",
    "sentence",
    "aspects",
    "scene_id",
];

pub fn write_annotation(ann: &EpisodeAnnotation) -> String {
    let mut w = tsv::writer();
    w.write_record(ANNOTATION_HEADER).unwrap();
    for r in &ann.rows {
        let s = &r.sentence;
        w.write_record([
            s.case_id.to_string(),
            s.sent_id.to_string(),
            speaker_label(&s.speaker).to_string(),
            s.type_mentioned.to_string(),
            s.start_ms.to_string(),
            s.end_ms.to_string(),
            s.text.clone(),
            s.aspects.to_string(),
            r.scene_id.to_string(),
        ])
        .unwrap();
    }
    tsv::finish(w)
}

pub fn read_annotation(episode_id: &str, text: &str) -> Result<EpisodeAnnotation> {
    let mut rdr = tsv::reader(text);
    let cols = Columns::new(ANNOTATION_FILE, &mut rdr)?;
    let idx: Vec<usize> = ANNOTATION_HEADER
        .iter()
        .map(|c| cols.require(c))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let row = Row {
            file: ANNOTATION_FILE,
            line: tsv::line_of(&record),
            record: &record,
        };
        let type_mentioned: TypeMentioned = row.parse(idx[3], "type_mentioned")?;
        let aspects = AspectSet::parse_list(row.get(idx[7], "aspects")?, false)
            .map_err(|e| row.error("aspects", e.to_string()))?;
        let sentence = Sentence {
            case_id: row.parse(idx[0], "caseID")?,
            sent_id: row.parse(idx[1], "sentID")?,
            speaker: parse_speaker(row.get(idx[2], "speaker")?),
            type_mentioned,
            start_ms: row.parse(idx[4], "start_ms")?,
            end_ms: row.parse(idx[5], "end_ms")?,
            text: row.get(idx[6], "sentence")?.to_string(),
            aspects,
        };
        if sentence.end_ms < sentence.start_ms {
            return Err(row.error("end_ms", "end precedes start"));
        }
        rows.push(AnnotatedSentence {
            sentence,
            scene_id: row.parse(idx[8], "scene_id")?,
        });
    }
    let ann = EpisodeAnnotation {
        episode_id: episode_id.to_string(),
        rows,
        cast_roles: None,
    };
    ann.check_order()?;
    Ok(ann)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(sent_id: u32, scene_id: u32, speaker: Option<&str>, aspects: &str) -> AnnotatedSentence {
        AnnotatedSentence {
            sentence: Sentence {
                case_id: 1,
                sent_id,
                speaker: speaker.map(String::from),
                type_mentioned: TypeMentioned::None,
                start_ms: u64::from(sent_id) * 5000,
                end_ms: u64::from(sent_id) * 5000 + 5000,
                text: format!("line {sent_id}"),
                aspects: AspectSet::parse_list(aspects, false).unwrap(),
            },
            scene_id,
        }
    }

    fn episode(rows: Vec<AnnotatedSentence>, roles: &[(&str, Role)]) -> EpisodeAnnotation {
        EpisodeAnnotation {
            episode_id: "s01e01".into(),
            rows,
            cast_roles: Some(roles.iter().map(|(n, r)| (n.to_string(), *r)).collect()),
        }
    }

    fn membership(sent_id: u32, scene_id: u32, aspects: &str) -> SceneMembership {
        SceneMembership {
            case_id: 1,
            sent_id,
            scene_id,
            aspects: AspectSet::parse_list(aspects, true).unwrap(),
        }
    }

    #[test]
    fn cast_roles_file() {
        let roles = parse_cast_roles("# episode roles\nPaul Millander\tperpetrator\n\nJane\tsuspect\nGrissom\tother\n").unwrap();
        assert_eq!(roles["Paul Millander"], Role::Perpetrator);
        assert_eq!(roles["Jane"], Role::Suspect);
        assert!(parse_cast_roles("Jane suspect\n").is_err());
        assert!(parse_cast_roles("Jane\tvillain\n").is_err());
    }

    #[test]
    fn perpetrator_speaking_marks_whole_scene() {
        let ann = episode(
            vec![
                row(1, 1, Some("Grissom"), "Evidence"),
                row(2, 1, Some("Vance"), "Evidence"),
                row(3, 1, None, "Evidence"),
                row(4, 2, Some("Grissom"), "None"),
            ],
            &[("Vance", Role::Perpetrator)],
        );
        let out = augment_aspects(ann);
        for r in &out.rows[..3] {
            assert!(r.sentence.aspects.contains(Aspect::Perpetrator));
            assert!(r.sentence.aspects.contains(Aspect::Evidence));
        }
        assert_eq!(out.rows[3].sentence.aspects, AspectSet::none());
    }

    #[test]
    fn none_dropped_only_when_something_is_added() {
        let ann = episode(vec![row(1, 1, Some("Jane"), "None"), row(2, 2, Some("Nick"), "None")], &[("Jane", Role::Suspect)]);
        let out = augment_aspects(ann);
        assert_eq!(out.rows[0].sentence.aspects.to_string(), "Suspect");
        assert_eq!(out.rows[1].sentence.aspects, AspectSet::none());
    }

    #[test]
    fn all_other_roles_is_identity() {
        let ann = episode(
            vec![row(1, 1, Some("Grissom"), "Victim"), row(2, 1, Some("Nick"), "Victim")],
            &[("Grissom", Role::Other), ("Nick", Role::Other)],
        );
        assert_eq!(augment_aspects(ann.clone()), ann);
    }

    #[test]
    fn missing_roles_is_identity() {
        let mut ann = episode(vec![row(1, 1, Some("Vance"), "Victim")], &[]);
        ann.cast_roles = None;
        assert_eq!(augment_aspects(ann.clone()), ann);
    }

    #[test]
    fn two_speaker_role_combinations() {
        // Brute force over both speakers' roles in a two-speaker scene.
        let all = [Role::Perpetrator, Role::Suspect, Role::Other];
        for a in all {
            for b in all {
                let ann = episode(
                    vec![row(1, 1, Some("A"), "Motive"), row(2, 1, Some("B"), "Motive"), row(3, 1, None, "Motive")],
                    &[("A", a), ("B", b)],
                );
                let out = augment_aspects(ann);
                let roles = [a, b];
                for r in &out.rows {
                    let s = &r.sentence.aspects;
                    assert_eq!(s.contains(Aspect::Perpetrator), roles.contains(&Role::Perpetrator));
                    assert_eq!(s.contains(Aspect::Suspect), roles.contains(&Role::Suspect));
                    assert!(s.contains(Aspect::Motive));
                }
            }
        }
    }

    #[test]
    fn merge_is_order_insensitive_for_membership() {
        let sentences: Vec<Sentence> = (1..=4).map(|i| row(i, 1, None, "").sentence).collect();
        let members = vec![
            membership(1, 1, "Victim"),
            membership(2, 1, "Victim"),
            membership(3, 2, "Crime scene"),
            membership(4, 2, "Crime scene"),
        ];
        let a = merge_corpora("s01e08", sentences.clone(), &members).unwrap();
        let mut shuffled = members.clone();
        shuffled.reverse();
        shuffled.swap(0, 2);
        let b = merge_corpora("s01e08", sentences, &shuffled).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rows.len(), 4);
        assert_eq!(a.scenes().len(), 2);
    }

    #[test]
    fn merge_cardinality_mismatch_reports_counts() {
        let sentences: Vec<Sentence> = (1..=3).map(|i| row(i, 1, None, "").sentence).collect();
        let err = merge_corpora("x", sentences, &[membership(1, 1, "None")]).unwrap_err();
        assert!(matches!(err, Error::Cardinality { left: 3, right: 1, .. }));
        assert!(err.to_string().contains('3') && err.to_string().contains('1'));
    }

    #[test]
    fn merge_empty() {
        let ann = merge_corpora("x", vec![], &[]).unwrap();
        assert!(ann.rows.is_empty());
    }

    #[test]
    fn annotation_table_round_trip() {
        let ann = episode(
            vec![row(1, 1, Some("Grissom"), "Victim;Evidence"), row(2, 2, None, "Suspect")],
            &[],
        );
        let text = write_annotation(&ann);
        let back = read_annotation("s01e01", &text).unwrap();
        assert_eq!(back.rows, ann.rows);
        assert_eq!(write_annotation(&back), text);
    }
}

//! Screenplay corpus ETL.
//!
//! Two source tables feed each episode: a word-level table (one row per
//! uttered or scripted word, with mention flags) and a scene-level table (one
//! row per scene, with its screenplay lines and aspect labels). Words are
//! aggregated to sentences, scenes are expanded to sentences, and the two are
//! merged into an [`EpisodeAnnotation`].

mod annotation;
mod aspect;
mod scenes;
mod timestamp;
mod words;

pub use annotation::{
    augment_aspects, build_annotation, merge_corpora, parse_cast_roles, read_annotation, write_annotation,
    AnnotatedSentence, CastRoles, EpisodeAnnotation, Role,
};
pub use aspect::{Aspect, AspectSet};
pub use scenes::{disaggregate_scenes, parse_scene_corpus, Scene, SceneMembership, SCREENPLAY_SEPARATOR};
pub use timestamp::{format_timestamp, parse_timestamp};
pub use words::{aggregate_to_sentences, parse_word_corpus, Sentence, TypeMentioned, WordToken};

/// Speaker label used by the corpora for stage directions.
pub const NO_SPEAKER: &str = "None";

pub(crate) fn parse_speaker(raw: &str) -> Option<String> {
    let s = raw.trim();
    if s.is_empty() || s.eq_ignore_ascii_case(NO_SPEAKER) {
        None
    } else {
        Some(s.to_string())
    }
}

pub(crate) fn speaker_label(speaker: &Option<String>) -> &str {
    speaker.as_deref().unwrap_or(NO_SPEAKER)
}

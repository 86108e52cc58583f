use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use super::{parse_speaker, parse_timestamp, AspectSet};
use crate::tsv::{self, Columns, Row};
use crate::{Error, Millis, Result};

/// One row of the word-level corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordToken {
    pub case_id: u32,
    pub sent_id: u32,
    pub speaker: Option<String>,
    pub start_ms: Millis,
    pub end_ms: Millis,
    pub word: String,
    pub killer_gold: bool,
    pub suspect_gold: bool,
    pub other_gold: bool,
}

/// Who a sentence mentions, collapsed from the per-word gold flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TypeMentioned {
    Killer,
    Suspect,
    Other,
    None,
}

impl TypeMentioned {
    /// Priority is killer > suspect > other > none.
    pub fn from_flags(killer: bool, suspect: bool, other: bool) -> Self {
        if killer {
            TypeMentioned::Killer
        } else if suspect {
            TypeMentioned::Suspect
        } else if other {
            TypeMentioned::Other
        } else {
            TypeMentioned::None
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            TypeMentioned::Killer => "killer",
            TypeMentioned::Suspect => "suspect",
            TypeMentioned::Other => "other",
            TypeMentioned::None => "none",
        }
    }
}

impl fmt::Display for TypeMentioned {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for TypeMentioned {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "killer" => Ok(TypeMentioned::Killer),
            "suspect" => Ok(TypeMentioned::Suspect),
            "other" => Ok(TypeMentioned::Other),
            "none" | "" => Ok(TypeMentioned::None),
            _ => Err(format!("unknown type_mentioned {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub case_id: u32,
    pub sent_id: u32,
    pub speaker: Option<String>,
    pub type_mentioned: TypeMentioned,
    pub start_ms: Millis,
    pub end_ms: Millis,
    pub text: String,
    pub aspects: AspectSet,
}

impl Sentence {
    pub fn key(&self) -> (u32, u32) {
        (self.case_id, self.sent_id)
    }

    pub fn duration_ms(&self) -> Millis {
        self.end_ms - self.start_ms
    }
}

fn parse_flag(row: &Row<'_>, idx: usize, column: &str) -> Result<bool> {
    match row.get(idx, column)?.trim() {
        "1" | "true" | "True" | "TRUE" => Ok(true),
        "0" | "false" | "False" | "FALSE" | "" => Ok(false),
        other => Err(row.error(column, format!("not a boolean: {other:?}"))),
    }
}

const WORD_FILE: &str = "word corpus";

/// Parses the tab-separated word-level corpus.
pub fn parse_word_corpus(text: &str) -> Result<Vec<WordToken>> {
    let mut rdr = tsv::reader(text);
    let cols = Columns::new(WORD_FILE, &mut rdr)?;
    let case = cols.require("caseID")?;
    let sent = cols.require("sentID")?;
    let speaker = cols.require("speaker")?;
    let word = cols.require("word")?;
    let start = cols.require("start")?;
    let end = cols.require("end")?;
    let killer = cols.require("killer_gold")?;
    let suspect = cols.require("suspect_gold")?;
    let other = cols.require("other_gold")?;

    let mut tokens = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let row = Row {
            file: WORD_FILE,
            line: tsv::line_of(&record),
            record: &record,
        };
        let time = |idx, column| {
            parse_timestamp(row.get(idx, column)?).map_err(|e| row.error(column, e.to_string()))
        };
        let token = WordToken {
            case_id: row.parse(case, "caseID")?,
            sent_id: row.parse(sent, "sentID")?,
            speaker: parse_speaker(row.get(speaker, "speaker")?),
            start_ms: time(start, "start")?,
            end_ms: time(end, "end")?,
            word: row.get(word, "word")?.trim().to_string(),
            killer_gold: parse_flag(&row, killer, "killer_gold")?,
            suspect_gold: parse_flag(&row, suspect, "suspect_gold")?,
            other_gold: parse_flag(&row, other, "other_gold")?,
        };
        if token.word.is_empty() {
            return Err(row.error("word", "empty word"));
        }
        if token.start_ms > token.end_ms {
            return Err(row.error("end", "end precedes start"));
        }
        tokens.push(token);
    }
    Ok(tokens)
}

/// Collapses word tokens into one sentence per `(case_id, sent_id)`, in
/// order of first appearance.
pub fn aggregate_to_sentences(tokens: &[WordToken]) -> Result<Vec<Sentence>> {
    struct Group<'a> {
        words: Vec<&'a WordToken>,
    }
    let mut order: Vec<(u32, u32)> = Vec::new();
    let mut groups: HashMap<(u32, u32), Group<'_>> = HashMap::new();
    for t in tokens {
        let key = (t.case_id, t.sent_id);
        groups
            .entry(key)
            .or_insert_with(|| {
                order.push(key);
                Group { words: Vec::new() }
            })
            .words
            .push(t);
    }

    order
        .into_iter()
        .map(|key| {
            let words = &groups[&key].words;
            let speaker = &words[0].speaker;
            if words.iter().any(|w| &w.speaker != speaker) {
                let mut speakers: Vec<String> = words
                    .iter()
                    .map(|w| super::speaker_label(&w.speaker).to_string())
                    .collect();
                speakers.sort();
                speakers.dedup();
                return Err(Error::ConflictingSpeakers {
                    case_id: key.0,
                    sent_id: key.1,
                    speakers,
                });
            }
            let killer = words.iter().any(|w| w.killer_gold);
            let suspect = words.iter().any(|w| w.suspect_gold);
            let other = words.iter().any(|w| w.other_gold);
            let type_mentioned = if speaker.is_none() {
                TypeMentioned::None
            } else {
                TypeMentioned::from_flags(killer, suspect, other)
            };
            Ok(Sentence {
                case_id: key.0,
                sent_id: key.1,
                speaker: speaker.clone(),
                type_mentioned,
                start_ms: words.iter().map(|w| w.start_ms).min().unwrap(),
                end_ms: words.iter().map(|w| w.end_ms).max().unwrap(),
                text: words.iter().map(|w| w.word.as_str()).collect::<Vec<_>>().join(" "),
                aspects: AspectSet::new(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "caseID\tsentID\tspeaker\tword\tstart\tend\tkiller_gold\tsuspect_gold\tother_gold\n";

    fn token(sent_id: u32, word: &str, flags: (bool, bool, bool)) -> WordToken {
        WordToken {
            case_id: 1,
            sent_id,
            speaker: Some("Grissom".into()),
            start_ms: 36_500,
            end_ms: 41_500,
            word: word.into(),
            killer_gold: flags.0,
            suspect_gold: flags.1,
            other_gold: flags.2,
        }
    }

    #[test]
    fn empty_body() {
        assert!(parse_word_corpus(HEADER).unwrap().is_empty());
    }

    #[test]
    fn three_rows_two_sentences() {
        let text = format!(
            "{HEADER}1\t6\tGrissom\twhere's\t00:36.5\t00:41.5\t0\t0\t1\n\
             1\t6\tGrissom\tthe\t00:36.5\t00:41.5\t0\t0\t0\n\
             1\t7\tOfficer\tshe's\t00:41.5\t00:46.6\t1\t0\t0\n"
        );
        let tokens = parse_word_corpus(&text).unwrap();
        assert_eq!(tokens.len(), 3);
        let mut ids: Vec<u32> = tokens.iter().map(|t| t.sent_id).collect();
        ids.dedup();
        assert_eq!(ids, vec![6, 7]);
        assert!(tokens[2].killer_gold);
        assert!(!tokens[0].killer_gold);
        assert_eq!(aggregate_to_sentences(&tokens).unwrap().len(), 2);
    }

    #[test]
    fn missing_column_is_schema_error() {
        let text = "caseID\tsentID\tspeaker\tword\tstart\tend\tkiller_gold\tsuspect_gold\n";
        assert!(matches!(
            parse_word_corpus(text),
            Err(Error::MissingColumn { column, .. }) if column == "other_gold"
        ));
    }

    #[test]
    fn bad_values_report_line() {
        let text = format!("{HEADER}1\t6\tGrissom\tx\t00:36.5\t00:41.5\tmaybe\t0\t0\n");
        match parse_word_corpus(&text) {
            Err(Error::Row { line, column, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(column, "killer_gold");
            }
            other => panic!("unexpected {other:?}"),
        }
        let text = format!("{HEADER}one\t6\tGrissom\tx\t00:36.5\t00:41.5\t0\t0\t0\n");
        assert!(matches!(parse_word_corpus(&text), Err(Error::Row { column, .. }) if column == "caseID"));
        let text = format!("{HEADER}1\t6\tGrissom\tx\t0036.5\t00:41.5\t0\t0\t0\n");
        assert!(matches!(parse_word_corpus(&text), Err(Error::Row { column, .. }) if column == "start"));
    }

    #[test]
    fn sentence_from_words() {
        let tokens = vec![
            token(6, "where's", (false, false, true)),
            token(6, "the", (false, false, false)),
            token(6, "girl?", (false, false, true)),
        ];
        let s = aggregate_to_sentences(&tokens).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].text, "where's the girl?");
        assert_eq!(s[0].speaker.as_deref(), Some("Grissom"));
        assert_eq!(s[0].type_mentioned, TypeMentioned::Other);
        assert_eq!((s[0].start_ms, s[0].end_ms), (36_500, 41_500));
    }

    #[test]
    fn singleton_group() {
        let s = aggregate_to_sentences(&[token(3, "yes", (false, false, false))]).unwrap();
        assert_eq!(s[0].text, "yes");
        assert_eq!(s[0].type_mentioned, TypeMentioned::None);
    }

    #[test]
    fn killer_dominates() {
        let tokens = vec![
            token(6, "a", (true, false, false)),
            token(6, "b", (false, false, true)),
            token(6, "c", (false, false, true)),
            token(6, "d", (false, false, true)),
        ];
        assert_eq!(aggregate_to_sentences(&tokens).unwrap()[0].type_mentioned, TypeMentioned::Killer);
    }

    #[test]
    fn priority_over_all_flag_combinations() {
        // Reference table over 2^3 flag combinations, written out by hand.
        let expected = [
            ((false, false, false), TypeMentioned::None),
            ((false, false, true), TypeMentioned::Other),
            ((false, true, false), TypeMentioned::Suspect),
            ((false, true, true), TypeMentioned::Suspect),
            ((true, false, false), TypeMentioned::Killer),
            ((true, false, true), TypeMentioned::Killer),
            ((true, true, false), TypeMentioned::Killer),
            ((true, true, true), TypeMentioned::Killer),
        ];
        for (flags, want) in expected {
            // Spread the flags over separate words of one sentence.
            let tokens = vec![
                token(1, "k", (flags.0, false, false)),
                token(1, "s", (false, flags.1, false)),
                token(1, "o", (false, false, flags.2)),
            ];
            assert_eq!(aggregate_to_sentences(&tokens).unwrap()[0].type_mentioned, want, "{flags:?}");
        }
    }

    #[test]
    fn conflicting_speakers() {
        let mut b = token(9, "b", (false, false, false));
        b.speaker = Some("Nick".into());
        let err = aggregate_to_sentences(&[token(9, "a", (false, false, false)), b]).unwrap_err();
        assert!(matches!(err, Error::ConflictingSpeakers { sent_id: 9, .. }));
    }

    #[test]
    fn stage_directions_mention_nobody() {
        let mut t = token(8, "Grissom", (false, false, true));
        t.speaker = None;
        let s = aggregate_to_sentences(&[t]).unwrap();
        assert_eq!(s[0].type_mentioned, TypeMentioned::None);
        assert_eq!(s[0].speaker, None);
    }
}

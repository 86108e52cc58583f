use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;

use proptest::prelude::*;
use shotmem_core::corpus::{
    aggregate_to_sentences, augment_aspects, build_annotation, disaggregate_scenes, merge_corpora,
    parse_cast_roles, parse_timestamp, format_timestamp, write_annotation, AnnotatedSentence, Aspect, AspectSet,
    CastRoles, EpisodeAnnotation, Role, Scene, Sentence, TypeMentioned, WordToken,
};

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", "s01e08", name].iter().collect();
    fs::read_to_string(p).unwrap()
}

#[test]
fn sample_episode_matches_golden_file() {
    let roles = parse_cast_roles(&fixture("cast_roles.tsv")).unwrap();
    let ann = build_annotation("s01e08", &fixture("words.tsv"), &fixture("scenes.tsv"), Some(roles)).unwrap();
    assert_eq!(write_annotation(&ann), fixture("annotation.tsv"));

    let first = &ann.rows[0].sentence;
    assert_eq!(first.text, "where's the girl?");
    assert_eq!(first.speaker.as_deref(), Some("Grissom"));
    assert_eq!((first.start_ms, first.end_ms), (36_500, 41_500));
    let aspects: Vec<String> = ann.sentences().map(|s| s.aspects.to_string()).collect();
    assert_eq!(aspects, ["Victim", "Victim", "Crime scene", "Crime scene"]);
}

#[test]
fn perpetrator_scene_is_augmented_once() {
    let roles = parse_cast_roles("Officer\tperpetrator\n").unwrap();
    let ann = build_annotation("s01e08", &fixture("words.tsv"), &fixture("scenes.tsv"), Some(roles)).unwrap();
    for r in &ann.rows {
        let has = r.sentence.aspects.contains(Aspect::Perpetrator);
        assert_eq!(has, r.scene_id == 1, "sentence {}", r.sentence.sent_id);
    }
    assert_eq!(augment_aspects(ann.clone()), ann);
}

#[test]
fn missing_roles_leave_aspects_alone() {
    let plain = build_annotation("s01e08", &fixture("words.tsv"), &fixture("scenes.tsv"), None).unwrap();
    assert_eq!(augment_aspects(plain.clone()), plain);
}

// Generators for whole episodes: scenes of 1..4 sentences, speakers from a
// small pool, aspects from the source vocabulary.

const SPEAKERS: [&str; 4] = ["Grissom", "Nick", "Sara", "Hank"];
const SOURCE_ASPECTS: [Aspect; 7] = [
    Aspect::CrimeScene,
    Aspect::Victim,
    Aspect::DeathCause,
    Aspect::Evidence,
    Aspect::Perpetrator,
    Aspect::Motive,
    Aspect::None,
];

fn aspect_set() -> impl Strategy<Value = AspectSet> {
    proptest::sample::subsequence(SOURCE_ASPECTS[..6].to_vec(), 0..3).prop_map(|v| {
        let mut s = AspectSet::new();
        for a in v {
            s.insert(a);
        }
        if s.is_empty() {
            s.insert(Aspect::None);
        }
        s
    })
}

fn episode() -> impl Strategy<Value = EpisodeAnnotation> {
    let scene = (prop::collection::vec(prop::option::of(0..SPEAKERS.len()), 1..5), aspect_set());
    prop::collection::vec(scene, 0..6).prop_map(|scenes| {
        let mut rows = Vec::new();
        let mut t = 0;
        for (scene_id, (speakers, aspects)) in scenes.into_iter().enumerate() {
            for sp in speakers {
                let sent_id = rows.len() as u32;
                rows.push(AnnotatedSentence {
                    sentence: Sentence {
                        case_id: 1,
                        sent_id,
                        speaker: sp.map(|i| SPEAKERS[i].to_string()),
                        type_mentioned: TypeMentioned::None,
                        start_ms: t,
                        end_ms: t + 1000,
                        text: format!("line {sent_id}"),
                        aspects: aspects.clone(),
                    },
                    scene_id: scene_id as u32,
                });
                t += 1000;
            }
        }
        EpisodeAnnotation { episode_id: "s01e01".into(), rows, cast_roles: None }
    })
}

fn roles() -> impl Strategy<Value = CastRoles> {
    prop::collection::vec(0..3usize, SPEAKERS.len()).prop_map(|r| {
        SPEAKERS
            .iter()
            .zip(r)
            .map(|(s, k)| (s.to_string(), [Role::Perpetrator, Role::Suspect, Role::Other][k]))
            .collect()
    })
}

fn minus_none(s: &AspectSet) -> BTreeSet<Aspect> {
    s.iter().filter(|&a| a != Aspect::None).collect()
}

proptest! {
    #[test]
    fn augmentation_is_monotone_and_idempotent(ann in episode(), roles in roles()) {
        let ann = ann.with_cast_roles(roles.clone());
        let once = augment_aspects(ann.clone());
        let twice = augment_aspects(once.clone());
        prop_assert_eq!(&once, &twice);
        for (before, after) in ann.rows.iter().zip(&once.rows) {
            let b = minus_none(&before.sentence.aspects);
            let a: BTreeSet<Aspect> = after.sentence.aspects.iter().collect();
            prop_assert!(b.is_subset(&a));
            prop_assert!(!(a.contains(&Aspect::None) && a.len() > 1));
        }
        // Brute force: a scene gains a role aspect iff some speaker of it has that role.
        for (scene, idx) in ann.scenes() {
            let speaks = |role: Role| idx.iter().any(|&i| {
                ann.rows[i].sentence.speaker.as_ref().and_then(|s| roles.get(s)) == Some(&role)
            });
            for &i in &idx {
                let got = &once.rows[i].sentence.aspects;
                prop_assert_eq!(got.contains(Aspect::Perpetrator),
                    speaks(Role::Perpetrator) || ann.rows[i].sentence.aspects.contains(Aspect::Perpetrator),
                    "scene {}", scene);
                prop_assert_eq!(got.contains(Aspect::Suspect), speaks(Role::Suspect), "scene {}", scene);
            }
        }
    }

    #[test]
    fn aggregation_counts_distinct_keys(groups in prop::collection::vec((1..4u32, 1..5usize), 0..20)) {
        let mut tokens = Vec::new();
        let mut t = 0;
        for (sent, (case_id, n_words)) in groups.iter().enumerate() {
            for w in 0..*n_words {
                tokens.push(WordToken {
                    case_id: *case_id,
                    sent_id: sent as u32,
                    speaker: Some("Nick".into()),
                    start_ms: t,
                    end_ms: t + 100,
                    word: format!("w{w}"),
                    killer_gold: false,
                    suspect_gold: false,
                    other_gold: w == 0,
                });
                t += 100;
            }
        }
        let distinct: BTreeSet<(u32, u32)> = tokens.iter().map(|t| (t.case_id, t.sent_id)).collect();
        let sentences = aggregate_to_sentences(&tokens).unwrap();
        prop_assert_eq!(sentences.len(), distinct.len());
    }

    #[test]
    fn merge_preserves_sentence_count(ann in episode(), seed in any::<u64>()) {
        let sentences: Vec<Sentence> = ann.sentences().cloned().collect();
        let mut scenes: Vec<Scene> = ann.scenes().into_iter().map(|(id, idx)| Scene {
            scene_id: id,
            screenplay: idx.iter().map(|&i| ann.rows[i].sentence.text.clone()).collect(),
            aspects: ann.rows[idx[0]].sentence.aspects.clone(),
        }).collect();
        let membership = disaggregate_scenes(&scenes, &sentences).unwrap();
        let merged = merge_corpora("s01e01", sentences.clone(), &membership).unwrap();
        prop_assert_eq!(merged.rows.len(), sentences.len());
        prop_assert_eq!(&merged.rows, &ann.rows);

        // Scene rows in any order give the same merge.
        let n = scenes.len().max(1);
        scenes.rotate_left((seed as usize) % n);
        let shuffled = disaggregate_scenes(&scenes, &sentences).unwrap();
        prop_assert_eq!(merge_corpora("s01e01", sentences, &shuffled).unwrap(), merged);
    }

    #[test]
    fn timestamps_round_trip(tenths in 0u64..864_000) {
        let ms = tenths * 100;
        prop_assert_eq!(parse_timestamp(&format_timestamp(ms)).unwrap(), ms);
    }
}

#[test]
fn two_scene_partition() {
    let ann = build_annotation(
        "s01e01",
        "caseID\tsentID\tspeaker\tword\tstart\tend\tkiller_gold\tsuspect_gold\tother_gold\n\
         1\t1\tNick\ta\t00:01.0\t00:02.0\t0\t0\t0\n\
         1\t2\tNick\tb\t00:02.0\t00:03.0\t0\t0\t0\n\
         1\t3\tSara\tc\t00:03.0\t00:04.0\t0\t0\t0\n\
         1\t4\tSara\td\t00:04.0\t00:05.0\t1\t0\t0\n\
         1\t5\tNone\te\t00:05.0\t00:06.0\t0\t0\t0\n",
        "sceneID\tscreenplay\taspect\n2\td|e\tMotive\n1\ta|b|c\tVictim;Evidence\n",
        None,
    )
    .unwrap();
    let sizes: Vec<usize> = ann.scenes().values().map(Vec::len).collect();
    assert_eq!(sizes, [3, 2]);
    assert_eq!(ann.rows[0].sentence.aspects.to_string(), "Victim;Evidence");
    assert_eq!(ann.rows[3].sentence.type_mentioned, TypeMentioned::Killer);
}

//! Synthetic workspaces with known structure, for end-to-end checks.
//!
//! Each episode is a shuffled screenplay in which main-cast members speak a
//! fixed, decreasing number of lines. Every frame feature is an affine image
//! of a latent memorability value plus noise; the latent is raised for shots
//! inside Motive scenes and for characters higher in the speaking order. The
//! training set uses the same feature map, so a linear regressor can recover
//! the latent.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use shotmem_core::corpus::{format_timestamp, SCREENPLAY_SEPARATOR};
use shotmem_core::features::{sample_times, write_feature_table};
use shotmem_core::shots::{write_histograms, write_shot_list, FrameHistogramSequence, HISTOGRAM_BINS};
use shotmem_core::{Aspect, FeatureTable, FrameFeature, Millis, Shot};

use crate::error::{CliError, CliResult};
use crate::workspace::{self, write_file, EPISODES, TRAIN_FEATURES, TRAIN_SCORES};

/// Main cast in planted speaking order, most lines first.
pub const MAIN_CAST: [&str; 6] = ["Grissom", "Catherine", "Nick", "Warrick", "Sara", "Brass"];
const EXTRAS: [&str; 2] = ["Officer", "Doc Robbins"];
const VOCAB: [&str; 16] = [
    "the", "body", "was", "found", "near", "lab", "we", "need", "prints", "from", "car", "she", "said", "blood",
    "tape", "night",
];

const HIST_INTERVAL_MS: Millis = 200;
const BASE: f64 = 0.78;
const MOTIVE_BOOST: f64 = 0.08;
const CAST_STEP: f64 = 0.01;

#[derive(Debug, Clone)]
pub struct SynthOptions {
    pub seed: u64,
    pub seasons: u32,
    pub episodes_per_season: u32,
    pub dim: usize,
    pub fps: f64,
    pub train_videos: usize,
}

impl Default for SynthOptions {
    fn default() -> Self {
        Self { seed: 7, seasons: 3, episodes_per_season: 2, dim: 16, fps: 3.0, train_videos: 200 }
    }
}

/// What the generator planted.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthTruth {
    pub episodes: Vec<String>,
    /// Main cast by speaking time, which is also their memorability order.
    pub cast_order: Vec<String>,
    pub top_aspect: Aspect,
}

struct FeatureMap {
    offset: Vec<f64>,
    gain: Vec<f64>,
    noise: f64,
}

impl FeatureMap {
    fn new(rng: &mut ChaCha8Rng, dim: usize) -> Self {
        Self {
            offset: (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect(),
            gain: (0..dim)
                .map(|_| rng.random_range(0.5..1.5) * if rng.random_bool(0.5) { 1.0 } else { -1.0 })
                .collect(),
            noise: 0.02,
        }
    }

    fn frame(&self, rng: &mut ChaCha8Rng, latent: f64) -> Vec<f32> {
        let n = Normal::new(0.0, self.noise).unwrap();
        self.offset
            .iter()
            .zip(&self.gain)
            .map(|(o, g)| (o + g * latent + n.sample(rng)) as f32)
            .collect()
    }
}

struct Line {
    speaker: Option<&'static str>,
    words: Vec<&'static str>,
    start: Millis,
    end: Millis,
}

fn cast_bonus(speaker: Option<&str>) -> f64 {
    match speaker.and_then(|s| MAIN_CAST.iter().position(|&c| c == s)) {
        Some(k) => CAST_STEP * (MAIN_CAST.len() - 1 - k) as f64,
        None => 0.0,
    }
}

fn pick_aspects(rng: &mut ChaCha8Rng) -> Vec<Aspect> {
    const POOL: [Aspect; 7] = [
        Aspect::CrimeScene,
        Aspect::Victim,
        Aspect::DeathCause,
        Aspect::Evidence,
        Aspect::Perpetrator,
        Aspect::Motive,
        Aspect::None,
    ];
    let first = POOL[rng.random_range(0..POOL.len())];
    if first == Aspect::None || rng.random_bool(0.7) {
        return vec![first];
    }
    let second = POOL[rng.random_range(0..POOL.len() - 1)];
    if second == first {
        vec![first]
    } else {
        vec![first, second]
    }
}

fn write(root: &Path, rel: &str, content: &str) -> CliResult<()> {
    write_file(&root.join(rel), content)
}

fn one_hot(bin: usize) -> [f64; HISTOGRAM_BINS] {
    let mut h = [0.0; HISTOGRAM_BINS];
    h[bin] = 1.0;
    h
}

fn episode(root: &Path, rng: &mut ChaCha8Rng, opts: &SynthOptions, map: &FeatureMap, ep: &str, index: usize) -> CliResult<()> {
    let guest_perp: &'static str = "Guest Killer";
    let guest_susp: &'static str = "Guest Suspect";
    let mut speakers: Vec<Option<&'static str>> = Vec::new();
    for (k, name) in MAIN_CAST.iter().enumerate() {
        speakers.extend(std::iter::repeat_n(Some(*name), 30 - 4 * k));
    }
    for name in EXTRAS {
        speakers.extend(std::iter::repeat_n(Some(name), 3));
    }
    speakers.extend(std::iter::repeat_n(Some(guest_perp), 4));
    speakers.extend(std::iter::repeat_n(Some(guest_susp), 4));
    speakers.extend(std::iter::repeat_n(None, 12));
    speakers.shuffle(rng);

    let mut t: Millis = 1000;
    let lines: Vec<Line> = speakers
        .into_iter()
        .map(|speaker| {
            let n_words = rng.random_range(3..7);
            let words = (0..n_words).map(|_| VOCAB[rng.random_range(0..VOCAB.len())]).collect();
            let start = t;
            t += 100 * rng.random_range(20..60);
            Line { speaker, words, start, end: t }
        })
        .collect();

    // Scenes of 4..=9 consecutive lines.
    let mut scenes: Vec<(usize, usize, Vec<Aspect>)> = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        let len = rng.random_range(4..10).min(lines.len() - i);
        scenes.push((i, i + len, pick_aspects(rng)));
        i += len;
    }

    let mut words_tsv = String::from("caseID\tsentID\tspeaker\tword\tstart\tend\tkiller_gold\tsuspect_gold\tother_gold\n");
    for (sent_id, line) in lines.iter().enumerate() {
        let step = (line.end - line.start) / 100 / line.words.len() as Millis * 100;
        for (w, word) in line.words.iter().enumerate() {
            let ws = line.start + step * w as Millis;
            let we = if w + 1 == line.words.len() { line.end } else { ws + step };
            let flag = |p: f64, rng: &mut ChaCha8Rng| u8::from(rng.random_bool(p));
            let (k, s, o) = (flag(0.02, rng), flag(0.03, rng), flag(0.1, rng));
            words_tsv.push_str(&format!(
                "1\t{sent_id}\t{}\t{word}\t{}\t{}\t{k}\t{s}\t{o}\n",
                line.speaker.unwrap_or("None"),
                format_timestamp(ws),
                format_timestamp(we)
            ));
        }
    }
    let mut scenes_tsv = String::from("sceneID\tscreenplay\taspect\n");
    for (id, (a, b, aspects)) in scenes.iter().enumerate() {
        let play: Vec<String> = lines[*a..*b].iter().map(|l| l.words.join(" ")).collect();
        let labels: Vec<&str> = aspects.iter().map(|a| a.label()).collect();
        scenes_tsv.push_str(&format!(
            "{}\t{}\t{}\n",
            id + 1,
            play.join(&SCREENPLAY_SEPARATOR.to_string()),
            labels.join(";")
        ));
    }
    let mut roles = String::from("# synthetic roles\n");
    for name in MAIN_CAST.iter().chain(&EXTRAS) {
        roles.push_str(&format!("{name}\tother\n"));
    }
    roles.push_str(&format!("{guest_perp}\tperpetrator\n{guest_susp}\tsuspect\n"));

    // Shots tile [0, duration) on the histogram frame grid.
    let duration = t.div_ceil(HIST_INTERVAL_MS) * HIST_INTERVAL_MS;
    let mut bounds: Vec<Millis> = vec![0];
    loop {
        let next = bounds.last().unwrap() + HIST_INTERVAL_MS * rng.random_range(5..20);
        if next + 1000 >= duration {
            bounds.push(duration);
            break;
        }
        bounds.push(next);
    }
    let shots: Vec<Shot> = bounds
        .windows(2)
        .enumerate()
        .map(|(i, w)| Shot { episode_id: ep.to_string(), shot_index: i, start_ms: w[0], end_ms: w[1] })
        .collect();

    // Latent memorability per shot, from the line and scene at its midpoint.
    let scene_of = |line: usize| scenes.iter().find(|(a, b, _)| line >= *a && line < *b).map(|s| &s.2);
    let jitter = Normal::new(0.0, 0.005).unwrap();
    let latents: Vec<f64> = shots
        .iter()
        .map(|s| {
            let mid = (s.start_ms + s.end_ms) / 2;
            let mut v = BASE + jitter.sample(rng);
            if let Some(li) = lines.iter().position(|l| l.start <= mid && mid < l.end) {
                v += cast_bonus(lines[li].speaker);
                if scene_of(li).is_some_and(|a| a.contains(&Aspect::Motive)) {
                    v += MOTIVE_BOOST;
                }
            }
            v
        })
        .collect();

    let frames = sample_times(duration, opts.fps)
        .into_iter()
        .map(|ts| {
            let shot = shots.iter().position(|s| ts < s.end_ms).unwrap_or(shots.len() - 1);
            FrameFeature { timestamp_ms: ts, vector: map.frame(rng, latents[shot]) }
        })
        .collect();
    let mut table = FeatureTable::new(ep, opts.dim, frames).map_err(|e| CliError::Data { context: ep.into(), source: e })?;
    table.attrs.push(("encoder".into(), "synthetic".into()));

    let dir = |f: &str| workspace::episode_file(ep, f);
    write(root, &dir(workspace::WORDS), &words_tsv)?;
    write(root, &dir(workspace::SCENES), &scenes_tsv)?;
    write(root, &dir(workspace::CAST_ROLES), &roles)?;
    write(root, &dir(workspace::FEATURES), &write_feature_table(&table))?;
    if index.is_multiple_of(2) {
        let mut bin = 0;
        let mut hists = Vec::new();
        for s in &shots {
            bin = (bin + 1 + rng.random_range(0..HISTOGRAM_BINS - 1)) % HISTOGRAM_BINS;
            hists.extend(std::iter::repeat_n(one_hot(bin), (s.duration_ms() / HIST_INTERVAL_MS) as usize));
        }
        let seq = FrameHistogramSequence::new(HIST_INTERVAL_MS, hists).map_err(|e| CliError::Data { context: ep.into(), source: e })?;
        write(root, &dir(workspace::FRAMES), &write_histograms(&seq))?;
    } else {
        write(root, &dir(workspace::SBD_SHOTS), &write_shot_list(&shots))?;
    }
    Ok(())
}

/// Writes a complete input workspace under `root`.
pub fn generate(root: &Path, opts: &SynthOptions) -> CliResult<SynthTruth> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let map = FeatureMap::new(&mut rng, opts.dim);

    let mut scores = String::from("video_id\tscore\n");
    for v in 0..opts.train_videos {
        let id = format!("video{v:04}");
        let s: f64 = rng.random_range(0.6..1.0);
        let s = (s * 1e4).round() / 1e4;
        let frames = (0..3).map(|k| FrameFeature { timestamp_ms: 333 * k, vector: map.frame(&mut rng, s) }).collect();
        let table = FeatureTable::new(id.as_str(), opts.dim, frames).map_err(|e| CliError::Data { context: id.clone(), source: e })?;
        write(root, &format!("{TRAIN_FEATURES}/{id}.memfeat"), &write_feature_table(&table))?;
        scores.push_str(&format!("{id}\t{s}\n"));
    }
    write(root, TRAIN_SCORES, &scores)?;

    let mut episodes = Vec::new();
    for season in 1..=opts.seasons {
        for e in 1..=opts.episodes_per_season {
            let ep = format!("s{season:02}e{e:02}");
            episode(root, &mut rng, opts, &map, &ep, episodes.len())?;
            episodes.push(ep);
        }
    }
    std::fs::create_dir_all(root.join(EPISODES)).map_err(|e| CliError::io(root.join(EPISODES), e))?;
    Ok(SynthTruth {
        episodes,
        cast_order: MAIN_CAST.iter().map(|s| s.to_string()).collect(),
        top_aspect: Aspect::Motive,
    })
}

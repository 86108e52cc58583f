//! Seeded inputs shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use shotmem_core::corpus::{AnnotatedSentence, TypeMentioned};
use shotmem_core::shots::{FrameHistogramSequence, Histogram, HISTOGRAM_BINS};
use shotmem_core::{AspectSet, EpisodeAnnotation, Sentence, Shot, TrainingSet};

pub fn training_set(n: usize, dim: usize, seed: u64) -> TrainingSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 0.02).unwrap();
    let w: Vec<f64> = (0..dim).map(|_| rng.random_range(-0.2..0.2) / dim as f64).collect();
    let mut rows = Vec::with_capacity(n);
    let mut scores = Vec::with_capacity(n);
    for _ in 0..n {
        let x: Vec<f32> = (0..dim).map(|_| rng.random_range(-1.0f32..1.0)).collect();
        let y = 0.75 + x.iter().zip(&w).map(|(a, b)| *a as f64 * b).sum::<f64>() + noise.sample(&mut rng);
        let y = y.clamp(0.0, 1.0);
        rows.push(x);
        scores.push(y);
    }
    let ids = (0..n).map(|i| format!("v{i}")).collect();
    TrainingSet::new(&rows, scores, ids).unwrap()
}

pub fn signal_values(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(0.5..1.0)).collect()
}

/// One-hot histograms that switch bin every `shot_frames` frames.
pub fn histogram_sequence(frames: usize, shot_frames: usize) -> FrameHistogramSequence {
    let hists = (0..frames)
        .map(|i| {
            let mut h: Histogram = [0.0; HISTOGRAM_BINS];
            h[(i / shot_frames) % HISTOGRAM_BINS] = 1.0;
            h
        })
        .collect();
    FrameHistogramSequence::new(40, hists).unwrap()
}

pub fn shots(n: usize, len_ms: u64) -> Vec<Shot> {
    (0..n)
        .map(|i| Shot {
            episode_id: "bench".into(),
            shot_index: i,
            start_ms: i as u64 * len_ms,
            end_ms: (i as u64 + 1) * len_ms,
        })
        .collect()
}

/// Back-to-back sentences of `len_ms` each, ten to a scene.
pub fn annotation(n: usize, len_ms: u64) -> EpisodeAnnotation {
    let mut ann = EpisodeAnnotation::empty("bench");
    ann.rows = (0..n)
        .map(|i| AnnotatedSentence {
            sentence: Sentence {
                case_id: 1,
                sent_id: i as u32,
                speaker: Some(format!("c{}", i % 6)),
                type_mentioned: TypeMentioned::None,
                start_ms: i as u64 * len_ms,
                end_ms: (i as u64 + 1) * len_ms,
                text: String::new(),
                aspects: AspectSet::none(),
            },
            scene_id: (i / 10) as u32,
        })
        .collect();
    ann
}

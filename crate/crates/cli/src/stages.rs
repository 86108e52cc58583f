//! Pipeline stages. Each stage reads its inputs, computes every output in
//! memory (episodes in parallel), then commits them through the workspace.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use log::{info, warn};
use rayon::prelude::*;
use shotmem_core::alignment::{aspect_scene_counts_all, main_cast, read_contexts, speaking_times, write_contexts};
use shotmem_core::analytics::{
    fraction_at_least, memorability_by_aspect, memorability_by_character, rank_by_median, read_summaries,
    screen_time_vs_memorability, write_screen_time, write_summaries, DistributionSummary, EpisodeScores, GroupKind,
    SeasonKey,
};
use shotmem_core::corpus::{build_annotation, parse_cast_roles, read_annotation, write_annotation};
use shotmem_core::features::{read_feature_table, sample_times, shot_frame_matrix};
use shotmem_core::regressor::{
    fit, parse_score_list, read_model, read_scores, score_shot, write_model, write_scores, TrainingSet,
};
use shotmem_core::shots::{
    detect_shots_histogram, parse_shot_list, read_histograms, validate_shot_list, write_shot_list, ShotListMode,
};
use shotmem_core::signal::{build_signal, read_signal_table, smooth, write_signal_table, SmoothingConfig};
use shotmem_core::{align_shots, Aspect, Error, EpisodeAnnotation, ShotContext};

use crate::config::Config;
use crate::error::{CliError, CliResult, Context};
use crate::plot::{bar_chart, letter_value_chart, signal_chart, Band, Series, SeriesKind};
use crate::workspace::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Etl,
    Shots,
    Train,
    Score,
    Smooth,
    Align,
    Analyze,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 8] = [
        Stage::Etl,
        Stage::Shots,
        Stage::Train,
        Stage::Score,
        Stage::Smooth,
        Stage::Align,
        Stage::Analyze,
        Stage::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Etl => "etl",
            Stage::Shots => "shots",
            Stage::Train => "train",
            Stage::Score => "score",
            Stage::Smooth => "smooth",
            Stage::Align => "align",
            Stage::Analyze => "analyze",
            Stage::Report => "report",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| format!("unknown stage {s:?}"))
    }
}

/// Which episodes a per-episode stage touches, and whether it may overwrite.
#[derive(Debug, Clone, Default)]
pub struct Selection {
    pub episodes: Vec<String>,
    pub force: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StageSummary {
    pub stage: Stage,
    pub written: usize,
    pub unchanged: usize,
}

pub const ANALYSIS_FILES: [&str; 6] = [
    "reports/speaking_time.tsv",
    "reports/aspect_scene_counts.tsv",
    "reports/memorability_by_character.tsv",
    "reports/memorability_by_aspect.tsv",
    "reports/screen_time_vs_memorability.tsv",
    "reports/summary.tsv",
];

pub fn run_stage(ws: &mut Workspace, stage: Stage, cfg: &Config, sel: &Selection) -> CliResult<StageSummary> {
    cfg.validate()?;
    let plans = match stage {
        Stage::Train => vec![train(ws, cfg)?],
        Stage::Analyze => vec![analyze(ws, cfg)?],
        Stage::Report => report(ws, cfg)?,
        per_episode => {
            let episodes = selected_episodes(ws, sel)?;
            let step = match per_episode {
                Stage::Etl => etl,
                Stage::Shots => shots,
                Stage::Score => score,
                Stage::Smooth => smooth_stage,
                Stage::Align => align,
                _ => unreachable!(),
            };
            let ws_ref: &Workspace = ws;
            episodes
                .par_iter()
                .map(|ep| step(ws_ref, cfg, ep))
                .collect::<CliResult<Vec<Plan>>>()?
        }
    };
    let stats = ws.commit(stage.name(), &plans, sel.force)?;
    info!("{stage}: {} written, {} unchanged", stats.written, stats.unchanged);
    Ok(StageSummary { stage, written: stats.written, unchanged: stats.unchanged })
}

/// Runs every stage in order. `train` is skipped when no training data is
/// present but a model already exists.
pub fn run_all(ws: &mut Workspace, cfg: &Config, sel: &Selection) -> CliResult<Vec<StageSummary>> {
    let mut out = Vec::new();
    for stage in Stage::ALL {
        if stage == Stage::Train && !ws.exists(TRAIN_SCORES) && ws.exists(MODEL) {
            info!("train: no {TRAIN_SCORES}, keeping existing {MODEL}");
            continue;
        }
        out.push(run_stage(ws, stage, cfg, sel)?);
    }
    Ok(out)
}

fn selected_episodes(ws: &Workspace, sel: &Selection) -> CliResult<Vec<String>> {
    let all = ws.episodes()?;
    if sel.episodes.is_empty() {
        return Ok(all);
    }
    for ep in &sel.episodes {
        if !all.contains(ep) {
            return Err(CliError::MissingInput {
                path: ws.path(&format!("{EPISODES}/{ep}")),
                hint: "no such episode".into(),
            });
        }
    }
    Ok(sel.episodes.clone())
}

fn etl(ws: &Workspace, _cfg: &Config, ep: &str) -> CliResult<Plan> {
    let words_rel = episode_file(ep, WORDS);
    let scenes_rel = episode_file(ep, SCENES);
    let roles_rel = episode_file(ep, CAST_ROLES);
    let words = ws.read(&words_rel)?;
    let scenes = ws.read(&scenes_rel)?;
    let mut plan = Plan::new().input(&words_rel).input(&scenes_rel);
    let roles = if ws.exists(&roles_rel) {
        plan = plan.input(&roles_rel);
        Some(parse_cast_roles(&ws.read(&roles_rel)?).context(|| roles_rel.clone())?)
    } else {
        warn!("{ep}: no {CAST_ROLES}; aspects are not augmented");
        None
    };
    let ann = build_annotation(ep, &words, &scenes, roles).context(|| format!("etl {ep}"))?;
    Ok(plan.output(episode_file(ep, ANNOTATION), write_annotation(&ann)))
}

fn shots(ws: &Workspace, cfg: &Config, ep: &str) -> CliResult<Plan> {
    let sbd_rel = episode_file(ep, SBD_SHOTS);
    let frames_rel = episode_file(ep, FRAMES);
    let (shots, plan) = if ws.exists(&sbd_rel) {
        let shots = parse_shot_list(&ws.read(&sbd_rel)?, ShotListMode::Strict).context(|| sbd_rel.clone())?;
        if let Some(other) = shots.iter().find(|s| s.episode_id != ep) {
            return Err(CliError::Data {
                context: sbd_rel,
                source: Error::Validation(format!("shot list is for episode {:?}, expected {ep:?}", other.episode_id)),
            });
        }
        (shots, Plan::new().input(&sbd_rel).param("source", "sbd"))
    } else if ws.exists(&frames_rel) {
        let seq = read_histograms(&ws.read(&frames_rel)?).context(|| frames_rel.clone())?;
        let shots =
            detect_shots_histogram(ep, &seq, cfg.threshold, cfg.min_shot_ms).context(|| format!("shots {ep}"))?;
        let plan = Plan::new()
            .input(&frames_rel)
            .param("source", "histogram")
            .param("threshold", cfg.threshold)
            .param("min_shot_ms", cfg.min_shot_ms);
        (shots, plan)
    } else {
        return Err(CliError::MissingInput {
            path: ws.path(&sbd_rel),
            hint: format!("need {SBD_SHOTS} (external detector) or {FRAMES} (fallback detector)"),
        });
    };
    if let Some(last) = shots.last() {
        let report = validate_shot_list(&shots, last.end_ms);
        if !report.is_empty() {
            warn!("{ep}: shot list has {} gaps, {} overlaps", report.gaps.len(), report.overlaps.len());
        }
    }
    Ok(plan.output(episode_file(ep, SHOTS), write_shot_list(&shots)))
}

fn train(ws: &Workspace, cfg: &Config) -> CliResult<Plan> {
    let list = parse_score_list(&ws.read(TRAIN_SCORES)?).context(|| TRAIN_SCORES.into())?;
    if list.is_empty() {
        return Err(CliError::Data {
            context: TRAIN_SCORES.into(),
            source: Error::EmptyInput("training score list"),
        });
    }
    let mut plan = Plan::new().input(TRAIN_SCORES);
    let tables = list
        .par_iter()
        .map(|(id, _)| {
            let rel = format!("{TRAIN_FEATURES}/{id}.memfeat");
            let table = read_feature_table(id, &ws.read(&rel)?).context(|| rel.clone())?;
            Ok((rel, table))
        })
        .collect::<CliResult<Vec<_>>>()?;
    for (rel, _) in &tables {
        plan = plan.input(rel);
    }
    let set = TrainingSet::from_feature_tables(list.iter().zip(&tables).map(|((id, s), (_, t))| (id.as_str(), *s, t)))
        .context(|| "training set".into())?;
    let model = fit(&set, &cfg.fit_options()).context(|| "train".into())?;
    if !model.converged() {
        warn!("train: not converged after {} iterations", model.iterations());
    }
    info!(
        "train: {} rows, dim {}, alpha {:.4e}, beta {:.4e}, {} iterations",
        set.len(),
        set.dim(),
        model.alpha(),
        model.beta(),
        model.iterations()
    );
    Ok(plan
        .param("max_iter", cfg.max_iter)
        .param("tol", cfg.tol)
        .output(MODEL, write_model(&model)))
}

fn score(ws: &Workspace, cfg: &Config, ep: &str) -> CliResult<Plan> {
    let shots_rel = episode_file(ep, SHOTS);
    let feat_rel = episode_file(ep, FEATURES);
    let model = read_model(&ws.read_stage(MODEL, "score", "train")?).context(|| MODEL.into())?;
    let shots = parse_shot_list(&ws.read_stage(&shots_rel, "score", "shots")?, ShotListMode::Strict)
        .context(|| shots_rel.clone())?;
    let table = read_feature_table(ep, &ws.read(&feat_rel)?).context(|| feat_rel.clone())?;
    if table.dim() != model.dim() {
        return Err(CliError::Data {
            context: format!("score {ep}"),
            source: Error::Dimension {
                expected_what: "model",
                expected: model.dim(),
                found_what: "feature table",
                found: table.dim(),
            },
        });
    }
    if let Some(last) = shots.last() {
        let expected = sample_times(last.end_ms, cfg.fps).len();
        if expected != table.frames().len() {
            warn!("{ep}: {} feature rows, expected {expected} at {} fps", table.frames().len(), cfg.fps);
        }
    }
    let frames = shot_frame_matrix(&shots, &table, cfg.k_frames).context(|| format!("score {ep}"))?;
    let scores = frames
        .iter()
        .map(|sf| {
            let vecs: Vec<&[f32]> = sf.frames.iter().map(|f| f.vector.as_slice()).collect();
            score_shot(&model, sf.shot_index, &vecs)
        })
        .collect::<shotmem_core::Result<Vec<_>>>()
        .context(|| format!("score {ep}"))?;
    Ok(Plan::new()
        .input(MODEL)
        .input(&shots_rel)
        .input(&feat_rel)
        .param("k_frames", cfg.k_frames)
        .output(episode_file(ep, SCORES), write_scores(&scores)))
}

fn windows(cfg: &Config) -> CliResult<Vec<usize>> {
    let mut w: BTreeSet<usize> = cfg.sweep.windows().map_err(|e| CliError::Config(e.to_string()))?.into_iter().collect();
    w.extend(&cfg.windows);
    Ok(w.into_iter().collect())
}

fn smooth_stage(ws: &Workspace, cfg: &Config, ep: &str) -> CliResult<Plan> {
    let shots_rel = episode_file(ep, SHOTS);
    let scores_rel = episode_file(ep, SCORES);
    let shots = parse_shot_list(&ws.read_stage(&shots_rel, "smooth", "shots")?, ShotListMode::Strict)
        .context(|| shots_rel.clone())?;
    let scores = read_scores(&ws.read_stage(&scores_rel, "smooth", "score")?).context(|| scores_rel.clone())?;
    let raw = build_signal(&shots, &scores).context(|| format!("smooth {ep}"))?;
    let windows = windows(cfg)?;
    let smoothed: BTreeMap<usize, _> = windows.iter().map(|&n| (n, smooth(&raw, &SmoothingConfig::new(n)))).collect();
    let list: Vec<String> = windows.iter().map(usize::to_string).collect();
    Ok(Plan::new()
        .input(&shots_rel)
        .input(&scores_rel)
        .param("windows", list.join(","))
        .output(episode_file(ep, SIGNAL), write_signal_table(&raw, &smoothed)))
}

fn align(ws: &Workspace, _cfg: &Config, ep: &str) -> CliResult<Plan> {
    let shots_rel = episode_file(ep, SHOTS);
    let ann_rel = episode_file(ep, ANNOTATION);
    let shots = parse_shot_list(&ws.read_stage(&shots_rel, "align", "shots")?, ShotListMode::Strict)
        .context(|| shots_rel.clone())?;
    let ann = read_annotation(ep, &ws.read_stage(&ann_rel, "align", "etl")?).context(|| ann_rel.clone())?;
    let contexts = align_shots(&shots, &ann);
    Ok(Plan::new()
        .input(&shots_rel)
        .input(&ann_rel)
        .output(episode_file(ep, CONTEXTS), write_contexts(&contexts)))
}

struct EpisodeData {
    annotation: EpisodeAnnotation,
    scores: EpisodeScores,
}

fn load_episode(ws: &Workspace, ep: &str, stage: &'static str) -> CliResult<EpisodeData> {
    let ann_rel = episode_file(ep, ANNOTATION);
    let ctx_rel = episode_file(ep, CONTEXTS);
    let scores_rel = episode_file(ep, SCORES);
    let annotation = read_annotation(ep, &ws.read_stage(&ann_rel, stage, "etl")?).context(|| ann_rel.clone())?;
    let contexts: Vec<ShotContext> = read_contexts(&ws.read_stage(&ctx_rel, stage, "align")?).context(|| ctx_rel.clone())?;
    let scores = read_scores(&ws.read_stage(&scores_rel, stage, "score")?).context(|| scores_rel.clone())?;
    Ok(EpisodeData { annotation, scores: EpisodeScores::new(ep, contexts, scores) })
}

fn simple_table(header: [&str; 2], rows: impl IntoIterator<Item = (String, String)>) -> String {
    let mut out = format!("{}\t{}\n", header[0], header[1]);
    for (k, v) in rows {
        out.push_str(&format!("{k}\t{v}\n"));
    }
    out
}

fn analyze(ws: &Workspace, cfg: &Config) -> CliResult<Plan> {
    let episodes = ws.episodes()?;
    let data = episodes
        .par_iter()
        .map(|ep| load_episode(ws, ep, "analyze"))
        .collect::<CliResult<Vec<_>>>()?;
    let season_filter: Option<BTreeSet<u32>> = cfg.seasons.as_ref().map(|s| s.iter().copied().collect());
    let data: Vec<EpisodeData> = data
        .into_iter()
        .filter(|d| match (&season_filter, d.scores.season) {
            (None, _) => true,
            (Some(set), Some(s)) => set.contains(&s),
            (Some(_), None) => false,
        })
        .collect();
    let anns: Vec<&EpisodeAnnotation> = data.iter().map(|d| &d.annotation).collect();
    let eps: Vec<EpisodeScores> = data.iter().map(|d| d.scores.clone()).collect();

    let times = speaking_times(anns.iter().copied());
    let mut time_rows: Vec<(&String, &f64)> = times.iter().collect();
    time_rows.sort_by(|a, b| b.1.total_cmp(a.1).then_with(|| a.0.cmp(b.0)));
    let counts = aspect_scene_counts_all(anns.iter().copied());
    let cast = main_cast(anns.iter().copied(), cfg.top_k_cast);
    let by_char = memorability_by_character(&eps, &cast, None).context(|| "analyze".into())?;
    let by_aspect = memorability_by_aspect(&eps, None).context(|| "analyze".into())?;
    let cast_times: BTreeMap<String, f64> = cast.iter().map(|c| (c.clone(), times[c])).collect();

    let all_scores: Vec<f64> = eps.iter().flat_map(|e| e.scores.iter().map(|s| s.score)).collect();
    let mut summary = vec![
        ("episodes".to_string(), eps.len().to_string()),
        ("shots".to_string(), all_scores.len().to_string()),
        ("main_cast".to_string(), cast.join(";")),
        ("aspect_rank_by_median".to_string(), rank_by_median(&by_aspect, GroupKind::Aspect).join(";")),
        ("character_rank_by_median".to_string(), rank_by_median(&by_char, GroupKind::Character).join(";")),
        ("fraction_at_least_0.7".to_string(), format!("{}", fraction_at_least(&all_scores, 0.7))),
    ];
    let screen = match screen_time_vs_memorability(&by_char, &cast_times) {
        Ok(cmp) => {
            summary.push(("screen_time_spearman_rho".into(), format!("{}", cmp.rho)));
            write_screen_time(&cmp)
        }
        Err(e) => {
            warn!("analyze: screen time comparison skipped: {e}");
            summary.push(("screen_time_spearman_rho".into(), "NA".into()));
            "character\tspeaking_minutes\tmedian_memorability\n".to_string()
        }
    };

    let mut plan = Plan::new();
    for ep in &episodes {
        for f in [ANNOTATION, CONTEXTS, SCORES] {
            plan = plan.input(episode_file(ep, f));
        }
    }
    let seasons = cfg.seasons.as_ref().map_or("all".to_string(), |s| {
        s.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
    });
    let [times_f, counts_f, char_f, aspect_f, screen_f, summary_f] = ANALYSIS_FILES;
    Ok(plan
        .param("top_k_cast", cfg.top_k_cast)
        .param("seasons", seasons)
        .output(times_f, simple_table(["character", "minutes"], time_rows.into_iter().map(|(k, v)| (k.clone(), format!("{v}")))))
        .output(counts_f, simple_table(["aspect", "scenes"], counts.iter().map(|(a, n)| (a.label().to_string(), n.to_string()))))
        .output(char_f, write_summaries(&by_char))
        .output(aspect_f, write_summaries(&by_aspect))
        .output(screen_f, screen)
        .output(summary_f, simple_table(["key", "value"], summary)))
}

fn read_pairs(ws: &Workspace, rel: &str) -> CliResult<Vec<(String, String)>> {
    let text = ws.read_stage(rel, "report", "analyze")?;
    Ok(text
        .lines()
        .skip(1)
        .filter_map(|l| l.split_once('\t'))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect())
}

fn parse_number(rel: &str, v: &str) -> CliResult<f64> {
    v.parse().map_err(|_| CliError::Data {
        context: rel.to_string(),
        source: Error::Validation(format!("not a number: {v:?}")),
    })
}

/// Merges consecutive shots sharing the same dominant aspect into bands.
fn aspect_bands(contexts: &[ShotContext], starts: &BTreeMap<usize, (f64, f64)>) -> Vec<Band> {
    let mut bands: Vec<Band> = Vec::new();
    for c in contexts {
        let Some(aspect) = c.aspects.iter().find(|&a| a != Aspect::None) else { continue };
        let Some(&(x0, x1)) = starts.get(&c.shot_index) else { continue };
        match bands.last_mut() {
            Some(b) if b.aspect == aspect && (b.x1 - x0).abs() < 1e-9 => b.x1 = x1,
            _ => bands.push(Band { x0, x1, aspect }),
        }
    }
    bands
}

fn report(ws: &Workspace, cfg: &Config) -> CliResult<Vec<Plan>> {
    let episodes = ws.episodes()?;
    let mut plans = episodes
        .par_iter()
        .map(|ep| {
            let sig_rel = episode_file(ep, SIGNAL);
            let ctx_rel = episode_file(ep, CONTEXTS);
            let shots_rel = episode_file(ep, SHOTS);
            let (raw, smoothed) =
                read_signal_table(ep, &ws.read_stage(&sig_rel, "report", "smooth")?).context(|| sig_rel.clone())?;
            let contexts = read_contexts(&ws.read_stage(&ctx_rel, "report", "align")?).context(|| ctx_rel.clone())?;
            if raw.is_empty() {
                return Err(CliError::Data { context: format!("report {ep}"), source: Error::EmptyInput("signal") });
            }
            let shots = parse_shot_list(&ws.read_stage(&shots_rel, "report", "shots")?, ShotListMode::Strict)
                .context(|| shots_rel.clone())?;
            let minutes = |ms: u64| ms as f64 / 60_000.0;
            let spans: BTreeMap<usize, (f64, f64)> =
                shots.iter().map(|s| (s.shot_index, (minutes(s.start_ms), minutes(s.end_ms)))).collect();
            let to_points = |sig: &shotmem_core::MemSignal| -> Vec<(f64, f64)> {
                sig.points.iter().map(|p| (minutes(p.start_ms), p.score)).collect()
            };
            let mut series = vec![Series { kind: SeriesKind::Raw, points: to_points(&raw) }];
            for &n in &cfg.windows {
                let sig = smoothed.get(&n).ok_or_else(|| {
                    CliError::Config(format!("window {n} is not in {sig_rel}; rerun smooth with it"))
                })?;
                series.push(Series { kind: SeriesKind::Smoothed(n), points: to_points(sig) });
            }
            let svg = signal_chart(&format!("{ep} memorability"), &series, &aspect_bands(&contexts, &spans));
            Ok(Plan::new()
                .input(&sig_rel)
                .input(&ctx_rel)
                .input(&shots_rel)
                .param("windows", cfg.windows.iter().map(usize::to_string).collect::<Vec<_>>().join(","))
                .output(format!("{REPORTS}/plots/{ep}_signal.svg"), svg))
        })
        .collect::<CliResult<Vec<Plan>>>()?;

    let [times_f, counts_f, char_f, aspect_f, screen_f, summary_f] = ANALYSIS_FILES;
    let bars = |rel: &str| -> CliResult<Vec<(String, f64)>> {
        read_pairs(ws, rel)?.into_iter().map(|(k, v)| Ok((k, parse_number(rel, &v)?))).collect()
    };
    let summaries = |rel: &str| -> CliResult<Vec<DistributionSummary>> {
        read_summaries(&ws.read_stage(rel, "report", "analyze")?).context(|| rel.to_string())
    };
    let all_seasons = |s: Vec<DistributionSummary>| -> Vec<(String, usize, Option<_>)> {
        s.into_iter().filter(|d| d.season == SeasonKey::All).map(|d| (d.group, d.n, d.stats)).collect()
    };
    let times = bars(times_f)?;
    let counts = bars(counts_f)?;
    let by_char = summaries(char_f)?;
    let by_aspect = summaries(aspect_f)?;
    let summary = read_pairs(ws, summary_f)?;
    let screen = ws.read_stage(screen_f, "report", "analyze")?;

    let mut md = String::from("# Memorability report\n\n| key | value |\n|---|---|\n");
    for (k, v) in &summary {
        md.push_str(&format!("| {k} | {v} |\n"));
    }
    md.push_str("\n## Screen time vs memorability\n\n| character | speaking minutes | median memorability |\n|---|---|---|\n");
    for line in screen.lines().skip(1).filter(|l| !l.starts_with('#')) {
        md.push_str(&format!("| {} |\n", line.split('\t').collect::<Vec<_>>().join(" | ")));
    }
    md.push_str("\n## Plots\n\n");
    for name in ["speaking_time", "aspect_scene_counts", "memorability_by_character", "memorability_by_aspect"] {
        md.push_str(&format!("- plots/{name}.svg\n"));
    }
    for ep in &episodes {
        md.push_str(&format!("- plots/{ep}_signal.svg\n"));
    }

    let mut summary_plan = Plan::new();
    for f in ANALYSIS_FILES {
        summary_plan = summary_plan.input(f);
    }
    plans.push(
        summary_plan
            .output("reports/plots/speaking_time.svg", bar_chart("Speaking time (min)", &times))
            .output("reports/plots/aspect_scene_counts.svg", bar_chart("Scenes per aspect", &counts))
            .output(
                "reports/plots/memorability_by_character.svg",
                letter_value_chart("Memorability by character", &all_seasons(by_char)),
            )
            .output(
                "reports/plots/memorability_by_aspect.svg",
                letter_value_chart("Memorability by aspect", &all_seasons(by_aspect)),
            )
            .output("reports/report.md", md),
    );
    Ok(plans)
}

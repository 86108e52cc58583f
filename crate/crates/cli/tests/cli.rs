use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use regex::Regex;
use shotmem_cli::synth::{generate, SynthOptions};
use shotmem_core::features::{write_feature_table, read_feature_table};
use shotmem_core::FeatureTable;

fn shotmem(ws: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shotmem"))
        .arg("--workspace")
        .arg(ws)
        .args(args)
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn small_synth(dir: &Path) {
    let opts = SynthOptions { seasons: 1, episodes_per_season: 2, train_videos: 60, ..SynthOptions::default() };
    generate(dir, &opts).unwrap();
}

fn copy_fixture(ws: &Path) {
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/s01e08");
    let dst = ws.join("episodes/s01e08");
    fs::create_dir_all(&dst).unwrap();
    for f in ["words.tsv", "scenes.tsv", "cast_roles.tsv"] {
        fs::copy(src.join(f), dst.join(f)).unwrap();
    }
}

#[test]
fn etl_reproduces_golden_annotation() {
    let dir = tempfile::tempdir().unwrap();
    copy_fixture(dir.path());
    let out = shotmem(dir.path(), &["etl"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/s01e08/annotation.tsv");
    assert_eq!(
        fs::read_to_string(dir.path().join("episodes/s01e08/annotation.tsv")).unwrap(),
        fs::read_to_string(golden).unwrap()
    );
    let manifest = fs::read_to_string(dir.path().join("manifest.tsv")).unwrap();
    assert!(manifest.lines().any(|l| l.starts_with("episodes/s01e08/annotation.tsv\t") && l.contains("\tetl\t")));
}

#[test]
fn score_before_train_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    small_synth(dir.path());
    assert_eq!(code(&shotmem(dir.path(), &["shots"])), 0);
    let out = shotmem(dir.path(), &["score"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("needs train"), "{}", stderr(&out));
    assert!(!dir.path().join("episodes/s01e01/scores.tsv").exists());
}

#[test]
fn dimension_mismatch_exits_three_naming_both() {
    let dir = tempfile::tempdir().unwrap();
    small_synth(dir.path());
    for stage in ["shots", "train"] {
        assert_eq!(code(&shotmem(dir.path(), &[stage])), 0);
    }
    let path = dir.path().join("episodes/s01e01/features.memfeat");
    let table = read_feature_table("s01e01", &fs::read_to_string(&path).unwrap()).unwrap();
    let frames = table
        .frames()
        .iter()
        .map(|f| shotmem_core::FrameFeature { timestamp_ms: f.timestamp_ms, vector: f.vector[..8].to_vec() })
        .collect();
    fs::write(&path, write_feature_table(&FeatureTable::new("s01e01", 8, frames).unwrap())).unwrap();
    let out = shotmem(dir.path(), &["score", "--episode", "s01e01"]);
    assert_eq!(code(&out), 3);
    let msg = stderr(&out);
    assert!(msg.contains("16") && msg.contains('8'), "{msg}");
}

#[test]
fn missing_input_and_bad_flags_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    fs::create_dir_all(dir.path().join("episodes/s01e01")).unwrap();
    let out = shotmem(dir.path(), &["etl"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("words.tsv"));
    assert_eq!(code(&shotmem(dir.path(), &["shots", "--threshold", "3"])), 2);
    assert_eq!(code(&shotmem(dir.path(), &["etl", "--episode", "s09e09"])), 2);
    assert_eq!(code(&shotmem(&dir.path().join("nope"), &["etl"])), 2);
}

#[test]
fn malformed_corpus_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    copy_fixture(dir.path());
    let words = dir.path().join("episodes/s01e08/words.tsv");
    let text = fs::read_to_string(&words).unwrap().replacen("00:36.5", "0036.5", 1);
    fs::write(&words, text).unwrap();
    let out = shotmem(dir.path(), &["etl"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
}

#[test]
fn reruns_are_byte_identical_and_overwrites_need_force() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    small_synth(a.path());
    small_synth(b.path());
    assert_eq!(code(&shotmem(a.path(), &["run"])), 0);
    assert_eq!(code(&shotmem(b.path(), &["run"])), 0);
    for f in ["episodes/s01e02/signal.tsv", "model.membrr", "reports/memorability_by_aspect.tsv", "reports/plots/s01e01_signal.svg"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let again = shotmem(a.path(), &["run"]);
    assert_eq!(code(&again), 0);
    assert!(String::from_utf8_lossy(&again.stdout).contains("smooth\twritten=0"));

    let out = shotmem(a.path(), &["shots", "--threshold", "1.99", "--min-shot-ms", "5000"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("--force"));
    assert_eq!(code(&shotmem(a.path(), &["shots", "--threshold", "1.99", "--min-shot-ms", "5000", "--force"])), 0);
}

#[test]
fn plot_has_one_polyline_per_selected_window() {
    let dir = tempfile::tempdir().unwrap();
    small_synth(dir.path());
    let out = shotmem(dir.path(), &["run", "--window", "25", "--window", "75"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let svg = fs::read_to_string(dir.path().join("reports/plots/s01e01_signal.svg")).unwrap();
    let re = Regex::new(r#"<polyline class="(\w+)"(?: data-window="(\d+)")?[^>]* points="([^"]*)""#).unwrap();
    let lines: Vec<(String, Option<String>, usize)> = re
        .captures_iter(&svg)
        .map(|c| (c[1].to_string(), c.get(2).map(|m| m.as_str().to_string()), c[3].split_whitespace().count()))
        .collect();
    let shots = fs::read_to_string(dir.path().join("episodes/s01e01/shots.tsv")).unwrap().lines().count() - 1;
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0].0, "raw");
    let windows: Vec<&str> = lines[1..].iter().map(|l| l.1.as_deref().unwrap()).collect();
    assert_eq!(windows, ["25", "75"]);
    assert!(lines.iter().all(|l| l.2 == shots));
}

#[test]
fn empty_episode_report_fails_without_writing() {
    let dir = tempfile::tempdir().unwrap();
    small_synth(dir.path());
    assert_eq!(code(&shotmem(dir.path(), &["run"])), 0);
    let ep = dir.path().join("episodes/s01e02");
    fs::write(ep.join("signal.tsv"), "shot_index\tstart_ms\traw\tsmoothed_15\tsmoothed_105\n").unwrap();
    fs::remove_dir_all(dir.path().join("reports/plots")).unwrap();
    let out = shotmem(dir.path(), &["report", "--force"]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    assert!(!dir.path().join("reports/plots").exists());
}

#[test]
fn config_file_is_read_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    small_synth(dir.path());
    fs::write(dir.path().join("shotmem.toml"), "sweep = \"15:35:10\"\nwindow = [35]\n").unwrap();
    assert_eq!(code(&shotmem(dir.path(), &["shots"])), 0);
    assert_eq!(code(&shotmem(dir.path(), &["train"])), 0);
    assert_eq!(code(&shotmem(dir.path(), &["score"])), 0);
    assert_eq!(code(&shotmem(dir.path(), &["smooth", "--window", "5"])), 0);
    let header = fs::read_to_string(dir.path().join("episodes/s01e01/signal.tsv")).unwrap();
    let header = header.lines().next().unwrap();
    assert_eq!(header, "shot_index\tstart_ms\traw\tsmoothed_5\tsmoothed_15\tsmoothed_25\tsmoothed_35");
    fs::write(dir.path().join("shotmem.toml"), "bogus = 1\n").unwrap();
    assert_eq!(code(&shotmem(dir.path(), &["smooth"])), 2);
}

#[test]
fn sample_times_prints_the_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = shotmem(dir.path(), &["sample-times", "--duration-ms", "10000"]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 30);
}

//! Pipeline parameters: defaults, then `shotmem.toml`, then flags.

use std::fs;
use std::path::Path;

use serde::Deserialize;
use shotmem_core::features::{DEFAULT_FPS, DEFAULT_K_FRAMES};
use shotmem_core::regressor::FitOptions;
use shotmem_core::shots::{DEFAULT_MIN_SHOT_MS, DEFAULT_THRESHOLD};
use shotmem_core::signal::SweepRange;

use crate::error::{CliError, CliResult};

pub const CONFIG_FILE: &str = "shotmem.toml";

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    /// Smoothing windows drawn in plots; always computed alongside the sweep.
    pub windows: Vec<usize>,
    pub sweep: SweepRange,
    pub k_frames: usize,
    pub fps: f64,
    pub threshold: f64,
    pub min_shot_ms: u64,
    pub top_k_cast: usize,
    pub max_iter: usize,
    pub tol: f64,
    /// Restricts analytics to these seasons when set.
    pub seasons: Option<Vec<u32>>,
}

impl Default for Config {
    fn default() -> Self {
        let fit = FitOptions::default();
        Self {
            windows: vec![15, 105],
            sweep: SweepRange::default(),
            k_frames: DEFAULT_K_FRAMES,
            fps: DEFAULT_FPS,
            threshold: DEFAULT_THRESHOLD,
            min_shot_ms: DEFAULT_MIN_SHOT_MS,
            top_k_cast: 6,
            max_iter: fit.max_iter,
            tol: fit.tol,
            seasons: None,
        }
    }
}

/// On-disk shape; every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct FileConfig {
    window: Option<Vec<usize>>,
    sweep: Option<String>,
    k_frames: Option<usize>,
    fps: Option<f64>,
    threshold: Option<f64>,
    min_shot_ms: Option<u64>,
    top_k_cast: Option<usize>,
    max_iter: Option<usize>,
    tol: Option<f64>,
    seasons: Option<Vec<u32>>,
}

/// Flag values that override the file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub windows: Vec<usize>,
    pub sweep: Option<SweepRange>,
    pub k_frames: Option<usize>,
    pub fps: Option<f64>,
    pub threshold: Option<f64>,
    pub min_shot_ms: Option<u64>,
    pub top_k_cast: Option<usize>,
}

impl Config {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        let file: FileConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        let mut cfg = Config::default();
        if let Some(w) = file.window {
            cfg.windows = w;
        }
        if let Some(s) = file.sweep {
            cfg.sweep = s.parse().map_err(|e: shotmem_core::Error| CliError::Config(e.to_string()))?;
        }
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(v) = file.$f { cfg.$f = v; } )* };
        }
        take!(k_frames, fps, threshold, min_shot_ms, top_k_cast, max_iter, tol);
        cfg.seasons = file.seasons;
        Ok(cfg)
    }

    /// Reads `path` if it exists, otherwise starts from defaults.
    pub fn load(path: &Path) -> CliResult<Self> {
        match fs::read_to_string(path) {
            Ok(text) => Self::from_toml(&text),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Self::default()),
            Err(e) => Err(CliError::io(path, e)),
        }
    }

    pub fn apply(&mut self, o: &Overrides) {
        if !o.windows.is_empty() {
            self.windows = o.windows.clone();
        }
        if let Some(s) = o.sweep {
            self.sweep = s;
        }
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(v) = o.$f { self.$f = v; } )* };
        }
        take!(k_frames, fps, threshold, min_shot_ms, top_k_cast);
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.windows.contains(&0) {
            return bad("smoothing windows must be >= 1".into());
        }
        if self.k_frames == 0 {
            return bad("k-frames must be >= 1".into());
        }
        if !(self.fps > 0.0 && self.fps.is_finite()) {
            return bad(format!("fps must be positive, got {}", self.fps));
        }
        if !(self.threshold > 0.0 && self.threshold <= 2.0) {
            return bad(format!("threshold must be in (0, 2], got {}", self.threshold));
        }
        if self.min_shot_ms == 0 {
            return bad("min-shot-ms must be positive".into());
        }
        if self.top_k_cast == 0 {
            return bad("top-k-cast must be >= 1".into());
        }
        self.sweep.windows().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(())
    }

    pub fn fit_options(&self) -> FitOptions {
        FitOptions { max_iter: self.max_iter, tol: self.tol }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use shotmem_cli::config::{Config, Overrides, CONFIG_FILE};
use shotmem_cli::stages::{run_all, run_stage, Selection, Stage, StageSummary};
use shotmem_cli::synth::{generate, SynthOptions};
use shotmem_cli::workspace::Workspace;
use shotmem_cli::CliResult;
use shotmem_core::features::sample_times;
use shotmem_core::signal::SweepRange;

#[derive(Parser)]
#[command(name = "shotmem", version, about = "Shot-level memorability pipeline over a flat-file workspace")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Workspace root directory
    #[arg(long, short = 'w', global = true, default_value = ".")]
    workspace: PathBuf,
    /// Config file (default: <workspace>/shotmem.toml)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Restrict per-episode stages to this episode (repeatable)
    #[arg(long, global = true)]
    episode: Vec<String>,
    /// Smoothing window to plot (repeatable)
    #[arg(long, global = true)]
    window: Vec<usize>,
    /// Smoothing sweep as min:max[:step]
    #[arg(long, global = true)]
    sweep: Option<SweepRange>,
    /// Representative frames per shot
    #[arg(long, global = true)]
    k_frames: Option<usize>,
    /// Frame sampling rate of the feature tables
    #[arg(long, global = true)]
    fps: Option<f64>,
    /// Histogram distance threshold for the fallback detector
    #[arg(long, global = true)]
    threshold: Option<f64>,
    /// Minimum shot length for the fallback detector
    #[arg(long, global = true)]
    min_shot_ms: Option<u64>,
    /// Main-cast size by speaking time
    #[arg(long, global = true)]
    top_k_cast: Option<usize>,
    /// Overwrite outputs that differ from the recomputed ones
    #[arg(long, global = true)]
    force: bool,
    /// More log output (repeatable)
    #[arg(long, short, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand)]
enum Command {
    /// Merge word and scene corpora into annotation.tsv
    Etl,
    /// Normalise external shot lists or run the fallback detector
    Shots,
    /// Fit the regressor on train/
    Train,
    /// Score every shot with the trained model
    Score,
    /// Smooth the per-episode signal over the window sweep
    Smooth,
    /// Attach speakers and aspects to shots
    Align,
    /// Per-character and per-aspect statistics
    Analyze,
    /// SVG plots and report.md
    Report,
    /// All stages in order
    Run,
    /// Write a synthetic input workspace
    Synth {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        seasons: u32,
        #[arg(long, default_value_t = 2)]
        episodes: u32,
        #[arg(long, default_value_t = 16)]
        dim: usize,
        #[arg(long, default_value_t = 200)]
        train_videos: usize,
    },
    /// Print the frame timestamps a feature extractor must emit
    SampleTimes {
        #[arg(long)]
        duration_ms: u64,
    },
}

fn config(g: &Global) -> CliResult<Config> {
    let path = g.config.clone().unwrap_or_else(|| g.workspace.join(CONFIG_FILE));
    let mut cfg = Config::load(&path)?;
    cfg.apply(&Overrides {
        windows: g.window.clone(),
        sweep: g.sweep,
        k_frames: g.k_frames,
        fps: g.fps,
        threshold: g.threshold,
        min_shot_ms: g.min_shot_ms,
        top_k_cast: g.top_k_cast,
    });
    cfg.validate()?;
    Ok(cfg)
}

fn print(summaries: &[StageSummary]) {
    for s in summaries {
        println!("{}\twritten={}\tunchanged={}", s.stage, s.written, s.unchanged);
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let g = &cli.global;
    let stage = match cli.command {
        Command::Synth { seed, seasons, episodes, dim, train_videos } => {
            let fps = config(g)?.fps;
            let opts = SynthOptions { seed, seasons, episodes_per_season: episodes, dim, fps, train_videos };
            let truth = generate(&g.workspace, &opts)?;
            println!("episodes\t{}", truth.episodes.join(","));
            println!("cast_order\t{}", truth.cast_order.join(","));
            println!("top_aspect\t{}", truth.top_aspect);
            return Ok(());
        }
        Command::SampleTimes { duration_ms } => {
            for t in sample_times(duration_ms, config(g)?.fps) {
                println!("{t}");
            }
            return Ok(());
        }
        Command::Run => None,
        Command::Etl => Some(Stage::Etl),
        Command::Shots => Some(Stage::Shots),
        Command::Train => Some(Stage::Train),
        Command::Score => Some(Stage::Score),
        Command::Smooth => Some(Stage::Smooth),
        Command::Align => Some(Stage::Align),
        Command::Analyze => Some(Stage::Analyze),
        Command::Report => Some(Stage::Report),
    };
    let cfg = config(g)?;
    let mut ws = Workspace::open(&g.workspace)?;
    let sel = Selection { episodes: g.episode.clone(), force: g.force };
    match stage {
        Some(stage) => print(&[run_stage(&mut ws, stage, &cfg, &sel)?]),
        None => print(&run_all(&mut ws, &cfg, &sel)?),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.global.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

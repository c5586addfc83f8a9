use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use nuctrack::config::{ChannelName, ConnectivityName, ElementName, RunConfig};
use nuctrack::ingest::{ingest_sequence, list_frames};
use nuctrack::report::write_sweep_csv;
use nuctrack::runner::{analyze, sweep};
use nuctrack::synth_io::write_sequence;
use nuctrack_core::synth::{generate, random_layout, BlobLayout, SpeckleNoise, SynthParams};

#[derive(Parser)]
#[command(
    name = "nuctrack",
    version,
    about = "Nucleus tracking and signal quantification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect, track and measure; write one CSV row per track and frame.
    Analyze(AnalyzeArgs),
    /// Count tracks reaching the last frame for every opening/closing pair.
    Sweep(SweepArgs),
    /// Generate a synthetic two-channel sequence with ground truth.
    Synth(SynthArgs),
}

/// Settings shared by `analyze` and `sweep`. Each flag overrides the config file.
#[derive(Args)]
struct Common {
    #[arg(long)]
    red: Option<PathBuf>,
    #[arg(long)]
    green: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON config; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    min_area: Option<usize>,
    /// Fixed binarization threshold instead of the automatic scan.
    #[arg(long)]
    threshold: Option<u8>,
    /// Scan only the first frame and reuse its threshold.
    #[arg(long)]
    freeze_threshold: bool,
    #[arg(long)]
    jump_factor: Option<f64>,
    #[arg(long)]
    min_jump: Option<usize>,
    #[arg(long, value_enum)]
    connectivity: Option<ConnectivityArg>,
    #[arg(long, value_enum)]
    element: Option<ElementArg>,
    #[arg(long, value_enum)]
    red_channel: Option<ChannelArg>,
    #[arg(long, value_enum)]
    green_channel: Option<ChannelArg>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ConnectivityArg {
    Four,
    Eight,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ElementArg {
    Square,
    Cross,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ChannelArg {
    Red,
    Green,
    Blue,
    Luminance,
}

impl From<ChannelArg> for ChannelName {
    fn from(c: ChannelArg) -> Self {
        match c {
            ChannelArg::Red => ChannelName::Red,
            ChannelArg::Green => ChannelName::Green,
            ChannelArg::Blue => ChannelName::Blue,
            ChannelArg::Luminance => ChannelName::Luminance,
        }
    }
}

impl Common {
    fn config(&self) -> anyhow::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_json_file(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = &self.red {
            cfg.red_dir = Some(v.clone());
        }
        if let Some(v) = &self.green {
            cfg.green_dir = Some(v.clone());
        }
        if let Some(v) = &self.out {
            cfg.out = Some(v.clone());
        }
        if let Some(v) = self.min_area {
            cfg.min_area = v;
        }
        if let Some(v) = self.threshold {
            cfg.threshold = Some(v);
        }
        if self.freeze_threshold {
            cfg.freeze_threshold = true;
        }
        if let Some(v) = self.jump_factor {
            cfg.jump_factor = v;
        }
        if let Some(v) = self.min_jump {
            cfg.min_jump = v;
        }
        if let Some(v) = self.connectivity {
            cfg.connectivity = match v {
                ConnectivityArg::Four => ConnectivityName::Four,
                ConnectivityArg::Eight => ConnectivityName::Eight,
            };
        }
        if let Some(v) = self.element {
            cfg.element = match v {
                ElementArg::Square => ElementName::Square,
                ElementArg::Cross => ElementName::Cross,
            };
        }
        if let Some(v) = self.red_channel {
            cfg.red_channel = v.into();
        }
        if let Some(v) = self.green_channel {
            cfg.green_channel = v.into();
        }
        if let Some(v) = self.jobs {
            cfg.jobs = Some(v);
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    opening: Option<usize>,
    #[arg(long)]
    closing: Option<usize>,
    /// Dilation steps that grow the nucleus into its cytoplasm ring.
    #[arg(long)]
    dilation: Option<usize>,
    /// Write one annotated PNG per frame here.
    #[arg(long)]
    overlay_dir: Option<PathBuf>,
    /// Write one threshold-scan CSV per frame here.
    #[arg(long)]
    scan_dir: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 5)]
    max_opening: usize,
    #[arg(long, default_value_t = 5)]
    max_closing: usize,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1920)]
    width: usize,
    #[arg(long, default_value_t = 1080)]
    height: usize,
    #[arg(long, default_value_t = 24)]
    frames: usize,
    #[arg(long, default_value_t = 20)]
    blobs: usize,
    #[arg(long, default_value_t = 6.0)]
    radius_min: f64,
    #[arg(long, default_value_t = 10.0)]
    radius_max: f64,
    /// Upper bound on per-frame displacement.
    #[arg(long, default_value_t = 3.0)]
    max_step: f64,
    /// Minimum edge-to-edge distance between unrelated blobs.
    #[arg(long, default_value_t = 20.0)]
    min_gap: f64,
    /// Blob pairs placed a few pixels apart.
    #[arg(long, default_value_t = 0)]
    close_pairs: usize,
    #[arg(long, default_value_t = 3.0)]
    pair_gap_min: f64,
    #[arg(long, default_value_t = 10.0)]
    pair_gap_max: f64,
    /// Fraction of red pixels hit by speckle.
    #[arg(long, default_value_t = 0.002)]
    speckle_density: f64,
    #[arg(long, default_value_t = 100)]
    speckle_amplitude: u8,
    #[arg(long, default_value_t = 30)]
    background: u8,
    #[arg(long, default_value_t = 180)]
    nucleus: u8,
    #[arg(long, default_value_t = 0)]
    green_background: u8,
    #[arg(long, default_value_t = 200)]
    green_nucleus: u8,
    #[arg(long, default_value_t = 50)]
    green_cytoplasm: u8,
    #[arg(long, default_value_t = 10.0)]
    cytoplasm_width: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn run_analyze(args: AnalyzeArgs) -> anyhow::Result<()> {
    let mut cfg = args.common.config()?;
    if let Some(v) = args.opening {
        cfg.opening = v;
    }
    if let Some(v) = args.closing {
        cfg.closing = v;
    }
    if let Some(v) = args.dilation {
        cfg.dilation = v;
    }
    if let Some(v) = args.overlay_dir {
        cfg.overlay_dir = Some(v);
    }
    if let Some(v) = args.scan_dir {
        cfg.scan_dir = Some(v);
    }
    let summary = analyze(&cfg)?;
    let out = &summary.output;
    log::info!(
        "{} frames, {} tracks, {} tracked to final frame, {} records",
        summary.frames,
        out.tracks.len(),
        out.tracked_to_final(),
        out.records.len()
    );
    Ok(())
}

fn run_sweep(args: SweepArgs) -> anyhow::Result<()> {
    let cfg = args.common.config()?;
    let (red_dir, green_dir) = cfg.require_inputs()?;
    let Some(out) = cfg.out.as_deref() else {
        bail!("--out is required");
    };
    let params = cfg.pipeline_params()?;
    let red = ingest_sequence(red_dir, cfg.red_channel.into())?;
    let green_frames = list_frames(green_dir)?.len();
    if green_frames != red.len() {
        bail!(
            "red sequence has {} frames but green has {green_frames}",
            red.len()
        );
    }
    let start = Instant::now();
    let result = sweep(&red, &params, args.max_opening, args.max_closing, cfg.jobs)?;
    log::info!("sweep finished in {:.1} s", start.elapsed().as_secs_f64());
    write_sweep_csv(out, &result)?;
    Ok(())
}

fn run_synth(args: SynthArgs) -> anyhow::Result<()> {
    let layout = BlobLayout {
        width: args.width,
        height: args.height,
        frames: args.frames,
        count: args.blobs,
        radius_min: args.radius_min,
        radius_max: args.radius_max,
        max_step: args.max_step,
        min_gap: args.min_gap,
        close_pairs: args.close_pairs,
        pair_gap_min: args.pair_gap_min,
        pair_gap_max: args.pair_gap_max,
        nucleus_intensity: args.nucleus,
        green_nucleus_level: args.green_nucleus,
        green_cytoplasm_level: args.green_cytoplasm,
        cytoplasm_width: args.cytoplasm_width,
    };
    let specs = random_layout(&layout, args.seed).context("placing blobs")?;
    let seq = generate(
        &specs,
        &SynthParams {
            width: args.width,
            height: args.height,
            frames: args.frames,
            red_background: args.background,
            green_background: args.green_background,
            noise: SpeckleNoise {
                density: args.speckle_density,
                amplitude: args.speckle_amplitude,
            },
            seed: args.seed,
        },
    )?;
    write_sequence(&args.out, &seq)?;
    log::info!(
        "wrote {} frames with {} blobs to {}",
        args.frames,
        specs.len(),
        args.out.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let result = match Cli::parse().command {
        Command::Analyze(a) => run_analyze(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Synth(a) => run_synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e:#}");
            ExitCode::FAILURE
        }
    }
}

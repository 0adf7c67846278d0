//! Argument parsing and dispatch for the `sparse-hdc` binary.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use sparse_hdc::{HvConfig, Variant};

use crate::commands::{self, InferRequest};
use crate::config::ExperimentConfig;
use crate::error::{usage, CliError, Result};
use crate::synth::SynthParams;

#[derive(Debug, Parser)]
#[command(
    name = "sparse-hdc",
    version,
    about = "Sparse hyperdimensional seizure detection experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate the item memory and its compressed form.
    GenIm(GenImArgs),
    /// Write a synthetic annotated recording.
    Synth(SynthArgs),
    /// Convert a CSV export plus JSON sidecar into a recording file.
    ImportCsv(ImportCsvArgs),
    /// Train an associative memory from one annotated seizure.
    Train(TrainArgs),
    /// Classify a recording and score the detections.
    Infer(InferArgs),
    /// Sweep the temporal threshold across recordings.
    Sweep(SweepArgs),
    /// Toggle and area breakdown per variant.
    Cost(CostArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Experiment config (JSON); flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Item-memory seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_parser = parse_variant)]
    pub variant: Option<Variant>,
    /// Compressed item memory file; generated from the seed when absent.
    #[arg(long)]
    pub im: Option<PathBuf>,
}

impl Common {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::load(self.config.as_deref())?;
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(v) = self.variant {
            cfg.variant = v;
        }
        if let Some(im) = &self.im {
            cfg.im = Some(im.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_variant(s: &str) -> std::result::Result<Variant, String> {
    Variant::from_name(s).ok_or_else(|| {
        format!("unknown variant '{s}' (expected sparse-baseline, sparse-optimized or dense)")
    })
}

#[derive(Debug, Args)]
pub struct GenImArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub channels: Option<usize>,
    /// Output directory for im.bin, compim.bin and compim.json.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Generator parameters (JSON); flags override them.
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub channels: Option<usize>,
    /// Seconds.
    #[arg(long)]
    pub duration: Option<f64>,
    #[arg(long)]
    pub seizures: Option<usize>,
    /// Seconds per seizure.
    #[arg(long)]
    pub seizure_duration: Option<f64>,
    #[arg(long)]
    pub sampling_rate: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ImportCsvArgs {
    #[arg(long)]
    pub csv: PathBuf,
    /// JSON with sampling_rate, has_header, scale and annotations.
    #[arg(long)]
    pub sidecar: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub recording: PathBuf,
    /// Which annotated seizure to train on, counting from 0.
    #[arg(long)]
    pub seizure_index: Option<usize>,
    #[arg(long)]
    pub temporal_threshold: Option<u32>,
    #[arg(long)]
    pub out_am: PathBuf,
}

#[derive(Debug, Args)]
pub struct InferArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub recording: PathBuf,
    #[arg(long)]
    pub am: PathBuf,
    #[arg(long)]
    pub im: Option<PathBuf>,
    /// Run a sparse AM under the other sparse variant.
    #[arg(long, value_parser = parse_variant)]
    pub variant: Option<Variant>,
    #[arg(long)]
    pub temporal_threshold: Option<u32>,
    /// Seconds after onset within which a detection counts.
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Seizure index left out of scoring; repeatable.
    #[arg(long)]
    pub exclude_seizure: Vec<usize>,
    /// JSON report path; a CSV is written next to it.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    pub recordings: Vec<PathBuf>,
    /// Comma-separated temporal thresholds.
    #[arg(long, value_delimiter = ',')]
    pub thresholds: Vec<u32>,
    #[arg(long)]
    pub seizure_index: Option<usize>,
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CostArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub recording: PathBuf,
    /// Comma-separated variant names.
    #[arg(long, default_value = "sparse-baseline,sparse-optimized,dense")]
    pub variants: String,
    #[arg(long)]
    pub seizure_index: Option<usize>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

fn fmt_opt(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{v:.digits$}"))
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenIm(a) => {
            let cfg = ExperimentConfig::load(a.config.as_deref())?;
            let hv = HvConfig::new(cfg.dimension, cfg.segments, cfg.segment_length)
                .map_err(|e| usage(e.to_string()))?;
            let out = commands::gen_im(
                a.seed.unwrap_or(cfg.seed),
                a.channels.unwrap_or(cfg.num_channels),
                hv,
                &a.out,
            )?;
            println!(
                "wrote {}, {}, {}",
                out.im.display(),
                out.compressed.display(),
                out.dump.display()
            );
        }
        Command::Synth(a) => {
            let mut p = match &a.params {
                None => SynthParams::default(),
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
                    serde_json::from_str(&text)
                        .map_err(|e| usage(format!("{}: {e}", path.display())))?
                }
            };
            p.seed = a.seed.unwrap_or(p.seed);
            p.channels = a.channels.unwrap_or(p.channels);
            p.duration_s = a.duration.unwrap_or(p.duration_s);
            p.seizures = a.seizures.unwrap_or(p.seizures);
            p.seizure_duration_s = a.seizure_duration.unwrap_or(p.seizure_duration_s);
            p.sampling_rate = a.sampling_rate.unwrap_or(p.sampling_rate);
            let rec = commands::synth(&p, &a.out)?;
            println!(
                "wrote {}: {} channels, {} samples, {} seizures",
                a.out.display(),
                rec.num_channels(),
                rec.num_samples(),
                rec.seizure_count()
            );
        }
        Command::ImportCsv(a) => {
            let out = commands::import_csv(&a.csv, &a.sidecar, &a.out)?;
            println!(
                "wrote {}: {} channels, {} samples, {} values clipped",
                a.out.display(),
                out.recording.num_channels(),
                out.recording.num_samples(),
                out.clipped
            );
        }
        Command::Train(a) => {
            let mut cfg = a.common.resolve()?;
            if let Some(i) = a.seizure_index {
                cfg.seizure_index = i;
            }
            if let Some(t) = a.temporal_threshold {
                cfg.temporal_threshold = Some(t);
            }
            cfg.validate()?;
            let file = commands::train(&cfg, &a.recording, &a.out_am)?;
            println!(
                "trained {} on seizure {} at threshold {}; wrote {}",
                file.pipeline.variant,
                file.training_seizure,
                file.pipeline.temporal_threshold,
                a.out_am.display()
            );
        }
        Command::Infer(a) => {
            let cfg = a
                .config
                .as_deref()
                .map(|p| ExperimentConfig::load(Some(p)))
                .transpose()?;
            let report = commands::infer(
                cfg.as_ref(),
                &InferRequest {
                    recording: &a.recording,
                    am: &a.am,
                    im: a.im.as_deref(),
                    variant: a.variant,
                    temporal_threshold: a.temporal_threshold,
                    horizon_s: a.horizon,
                    exclude: a.exclude_seizure,
                    report: a.report.as_deref(),
                },
            )?;
            println!(
                "{} frames, {} seizures scored, accuracy {}, median delay {} s, {} false-positive frames",
                report.frame_count,
                report.seizures.len(),
                fmt_opt(report.accuracy, 3),
                fmt_opt(report.median_delay_s, 3),
                report.false_positive_frames
            );
        }
        Command::Sweep(a) => {
            let mut cfg = a.common.resolve()?;
            if let Some(i) = a.seizure_index {
                cfg.seizure_index = i;
            }
            if a.horizon.is_some() {
                cfg.horizon_s = a.horizon;
            }
            if a.report.is_some() {
                cfg.report = a.report;
            }
            let recordings = if a.recordings.is_empty() {
                cfg.recordings.clone()
            } else {
                a.recordings
            };
            let thresholds = if a.thresholds.is_empty() {
                cfg.thresholds.clone()
            } else {
                a.thresholds
            };
            let rows = commands::sweep(&cfg, &recordings, &thresholds)?;
            println!("patient\tthreshold\taccuracy\tmedian_delay_s\tdensity\tbest");
            for r in &rows {
                println!(
                    "{}\t{}\t{}\t{}\t{:.4}\t{}",
                    r.patient.as_deref().unwrap_or("all"),
                    r.threshold,
                    fmt_opt(r.accuracy, 3),
                    fmt_opt(r.median_delay_s, 3),
                    r.mean_density,
                    if r.best { "*" } else { "" }
                );
            }
        }
        Command::Cost(a) => {
            let mut cfg = a.common.resolve()?;
            if let Some(i) = a.seizure_index {
                cfg.seizure_index = i;
            }
            if a.report.is_some() {
                cfg.report = a.report;
            }
            let variants = commands::parse_variants(&a.variants)?;
            let report = commands::cost(&cfg, &a.recording, &variants)?;
            for b in &report.breakdowns {
                println!("{} ({} cycles)", b.variant, b.cycles);
                for r in &b.rows {
                    println!(
                        "  {:<20} energy {:>6.2}%  area {:>6.2}%",
                        r.module, r.energy_share_pct, r.area_share_pct
                    );
                }
                println!(
                    "  total toggles {}  area {:.0} GE",
                    b.total_toggles, b.total_area_ge
                );
            }
            for r in &report.ratios {
                println!(
                    "sparse-optimized vs {}: energy {:.2}x, area {:.2}x",
                    r.variant, r.energy_ratio, r.area_ratio
                );
            }
        }
    }
    Ok(())
}

/// Usage errors from clap exit with 2 on their own; everything that got
/// past parsing maps through [`CliError::exit_code`].
pub fn main_with_args(args: impl IntoIterator<Item = std::ffi::OsString>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

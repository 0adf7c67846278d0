//! Command implementations. Each returns a summary the binary prints; all
//! randomness comes from explicit seeds.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use sparse_hdc::cost::{report_breakdown, ActivityMonitor, Breakdown, GateModel, NoProbe};
use sparse_hdc::pipeline::{
    aggregate_rows, encode_recording, run_inference, select_training_frames, sweep_patient,
    train_from_frame_hvs, DetectionReport, Encoder, EvaluationOptions, Patient, SweepRow,
    TrainingProtocol, VariantMemory,
};
use sparse_hdc::{
    AssociativeMemory, CompressedItemMemory, HvConfig, PipelineConfig, Recording, Variant,
};

use crate::am_file::AmFile;
use crate::config::ExperimentConfig;
use crate::error::{data, usage, CliError, Result};
use crate::report::{self, CostRatio, CostReport};
use crate::synth::{synthesize, SynthParams};
use crate::{csv_import, im_file, recording_file};

/// Item memory for `cfg`: loaded from `im` when given, else drawn from `seed`.
pub fn build_encoder(cfg: &PipelineConfig, im: Option<&Path>, seed: u64) -> Result<Encoder> {
    let memory = match (im, cfg.variant) {
        (Some(_), Variant::Dense) => {
            return Err(usage(
                "the dense variant draws its item memory from the seed, not a file",
            ))
        }
        (Some(path), variant) => {
            let cim = im_file::read_compressed(path)?;
            VariantMemory::from_compressed(variant, &cim)?
        }
        (None, variant) => VariantMemory::generate(variant, seed, cfg)?,
    };
    Encoder::new(*cfg, memory)
        .map_err(|e| data(format!("item memory does not fit the config: {e}")))
}

pub struct GenImOutput {
    pub im: PathBuf,
    pub compressed: PathBuf,
    pub dump: PathBuf,
}

pub fn gen_im(seed: u64, channels: usize, hv: HvConfig, out_dir: &Path) -> Result<GenImOutput> {
    if channels == 0 {
        return Err(usage("--channels must be at least 1"));
    }
    let cim = CompressedItemMemory::generate(seed, channels, hv)?;
    let im = cim.expand()?;
    std::fs::create_dir_all(out_dir).map_err(CliError::io(out_dir))?;
    let out = GenImOutput {
        im: out_dir.join("im.bin"),
        compressed: out_dir.join("compim.bin"),
        dump: out_dir.join("compim.json"),
    };
    std::fs::write(&out.im, im_file::encode_full(&im)).map_err(CliError::io(&out.im))?;
    std::fs::write(&out.compressed, im_file::encode_compressed(&cim))
        .map_err(CliError::io(&out.compressed))?;
    std::fs::write(&out.dump, im_file::json_dump(&cim)).map_err(CliError::io(&out.dump))?;
    Ok(out)
}

pub fn synth(params: &SynthParams, out: &Path) -> Result<Recording> {
    let rec = synthesize(params)?;
    recording_file::write(out, &rec)?;
    Ok(rec)
}

pub fn import_csv(csv: &Path, sidecar: &Path, out: &Path) -> Result<csv_import::Imported> {
    let imported = csv_import::import(csv, sidecar)?;
    recording_file::write(out, &imported.recording)?;
    Ok(imported)
}

fn check_channels(cfg: &PipelineConfig, rec: &Recording) -> Result<()> {
    if rec.num_channels() != cfg.num_channels {
        return Err(data(format!(
            "recording has {} channels, config expects {}",
            rec.num_channels(),
            cfg.num_channels
        )));
    }
    Ok(())
}

/// Trains on one annotated seizure and its surrounding non-seizure frames.
pub fn train_recording(
    encoder: &Encoder,
    rec: &Recording,
    protocol: &TrainingProtocol,
) -> Result<AssociativeMemory> {
    let cfg = encoder.cfg();
    check_channels(cfg, rec)?;
    let selection = select_training_frames(rec, cfg.frame_length, protocol)?;
    let frames = encode_recording(encoder, rec, &mut NoProbe)?;
    let hvs = selection
        .iter()
        .map(|&(f, label)| Ok((frames[f].accumulator.thin(cfg.temporal_threshold)?, label)))
        .collect::<Result<Vec<_>>>()?;
    Ok(train_from_frame_hvs(
        hvs.iter().map(|(hv, l)| (hv, *l)),
        cfg.hv.dimension,
        cfg.training_density_target,
    )?)
}

pub fn train(cfg: &ExperimentConfig, recording: &Path, out_am: &Path) -> Result<AmFile> {
    let pipeline = cfg.pipeline(None)?;
    let encoder = build_encoder(&pipeline, cfg.im.as_deref(), cfg.seed)?;
    let rec = recording_file::read(recording)?;
    let am = train_recording(&encoder, &rec, &cfg.protocol())?;
    let file = AmFile::new(pipeline, encoder.memory().seed(), cfg.seizure_index, &am);
    file.write(out_am)?;
    Ok(file)
}

pub struct InferRequest<'a> {
    pub recording: &'a Path,
    pub am: &'a Path,
    pub im: Option<&'a Path>,
    /// Runs a sparse AM under the other sparse variant.
    pub variant: Option<Variant>,
    /// Overrides the threshold the AM was trained at.
    pub temporal_threshold: Option<u32>,
    pub horizon_s: Option<f64>,
    pub exclude: Vec<usize>,
    pub report: Option<&'a Path>,
}

/// Inference with the settings stored in the AM file. When a config is
/// given its geometry must agree with the AM.
pub fn infer(cfg: Option<&ExperimentConfig>, req: &InferRequest<'_>) -> Result<DetectionReport> {
    let am_file = AmFile::read(req.am)?;
    let mut pipeline = am_file.pipeline;
    if let Some(v) = req.variant {
        if (v == Variant::Dense) != (pipeline.variant == Variant::Dense) {
            return Err(usage(
                "cannot switch between dense and sparse variants at inference",
            ));
        }
        pipeline = pipeline.with_variant(v);
    }
    if let Some(t) = req.temporal_threshold {
        pipeline.temporal_threshold = t;
        pipeline.validate().map_err(|e| usage(e.to_string()))?;
    }
    if let Some(c) = cfg {
        let want = c.pipeline(Some(pipeline.variant))?;
        if want.hv != pipeline.hv
            || want.num_channels != pipeline.num_channels
            || want.frame_length != pipeline.frame_length
        {
            return Err(data("config geometry does not match the AM file"));
        }
    }
    let encoder = build_encoder(&pipeline, req.im, am_file.im_seed)?;
    if encoder.memory().seed() != am_file.im_seed {
        return Err(data(format!(
            "item memory seed {} differs from the AM's {}",
            encoder.memory().seed(),
            am_file.im_seed
        )));
    }
    let rec = recording_file::read(req.recording)?;
    check_channels(&pipeline, &rec)?;
    let opts = EvaluationOptions {
        horizon_s: req.horizon_s,
        excluded_seizures: req.exclude.clone(),
    };
    let report = run_inference(&rec, &am_file.memory()?, &encoder, &opts, &mut NoProbe)?;
    if let Some(path) = req.report {
        report::write_detection(path, &report)?;
    }
    Ok(report)
}

/// Per-patient sweeps in parallel, then pooled rows.
pub fn sweep(
    cfg: &ExperimentConfig,
    recordings: &[PathBuf],
    thresholds: &[u32],
) -> Result<Vec<SweepRow>> {
    if thresholds.is_empty() {
        return Err(usage("threshold list is empty"));
    }
    if recordings.is_empty() {
        return Err(usage("no recordings to sweep"));
    }
    let pipeline = cfg.pipeline(None)?;
    for &t in thresholds {
        PipelineConfig {
            temporal_threshold: t,
            ..pipeline
        }
        .validate()
        .map_err(|e| usage(format!("threshold {t}: {e}")))?;
    }
    let encoder = build_encoder(&pipeline, cfg.im.as_deref(), cfg.seed)?;
    let recs = recordings
        .iter()
        .map(|p| recording_file::read(p))
        .collect::<Result<Vec<_>>>()?;
    let per_patient: Vec<Vec<SweepRow>> = recordings
        .par_iter()
        .zip(&recs)
        .map(|(path, rec)| {
            check_channels(&pipeline, rec)?;
            let patient = Patient {
                name: path.file_stem().map_or_else(
                    || path.display().to_string(),
                    |s| s.to_string_lossy().into(),
                ),
                recording: rec,
                protocol: cfg.protocol(),
            };
            Ok(sweep_patient(
                &patient,
                &encoder,
                thresholds,
                cfg.horizon_s,
            )?)
        })
        .collect::<Result<_>>()?;
    let mut rows: Vec<SweepRow> = per_patient.into_iter().flatten().collect();
    let pooled = aggregate_rows(&rows, thresholds);
    rows.extend(pooled);
    if let Some(path) = &cfg.report {
        report::write_sweep(path, &rows)?;
    }
    Ok(rows)
}

/// Threshold flagged best in the pooled rows.
pub fn best_threshold(rows: &[SweepRow]) -> Option<u32> {
    rows.iter()
        .find(|r| r.patient.is_none() && r.best)
        .map(|r| r.threshold)
}

pub fn parse_variants(list: &str) -> Result<Vec<Variant>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| Variant::from_name(s).ok_or_else(|| usage(format!("unknown variant '{s}'"))))
        .collect()
}

/// Trains each variant on the recording, then replays it with an activity
/// monitor attached.
pub fn cost_breakdown(
    cfg: &ExperimentConfig,
    rec: &Recording,
    variant: Variant,
    gates: &GateModel,
) -> Result<Breakdown> {
    let pipeline = cfg.pipeline(Some(variant))?;
    let im = if variant == Variant::Dense {
        None
    } else {
        cfg.im.as_deref()
    };
    let encoder = build_encoder(&pipeline, im, cfg.seed)?;
    let am = train_recording(&encoder, rec, &cfg.protocol())?;
    let mut monitor = ActivityMonitor::new();
    run_inference(
        rec,
        &am,
        &encoder,
        &EvaluationOptions::default(),
        &mut monitor,
    )?;
    Ok(report_breakdown(&monitor.ledger(&pipeline, gates), gates)?)
}

pub fn cost(cfg: &ExperimentConfig, recording: &Path, variants: &[Variant]) -> Result<CostReport> {
    if variants.is_empty() {
        return Err(usage("no variants given"));
    }
    let rec = recording_file::read(recording)?;
    let breakdowns = variants
        .par_iter()
        .map(|&v| cost_breakdown(cfg, &rec, v, &cfg.gate_model))
        .collect::<Result<Vec<_>>>()?;
    let ratios = match breakdowns
        .iter()
        .find(|b| b.variant == Variant::SparseOptimized)
    {
        Some(opt) => breakdowns
            .iter()
            .map(|b| {
                let (energy_ratio, area_ratio) = opt.gain_over(b);
                CostRatio {
                    variant: b.variant.name().into(),
                    energy_ratio,
                    area_ratio,
                }
            })
            .collect(),
        None => Vec::new(),
    };
    let report = CostReport { breakdowns, ratios };
    if let Some(path) = &cfg.report {
        report::write_cost(path, &report)?;
    }
    Ok(report)
}

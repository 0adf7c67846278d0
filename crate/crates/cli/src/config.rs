//! JSON experiment configuration. Every field is optional in the file;
//! command-line flags override file values.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sparse_hdc::cost::GateModel;
use sparse_hdc::pipeline::TrainingProtocol;
use sparse_hdc::{HvConfig, PipelineConfig, Variant};

use crate::error::{usage, CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub variant: Variant,
    pub num_channels: usize,
    pub frame_length: usize,
    /// Baseline only; defaults to 1.
    pub spatial_threshold: Option<u32>,
    /// Defaults to 130 for the sparse variants and 128 for dense.
    pub temporal_threshold: Option<u32>,
    pub training_density_target: f64,
    pub dimension: usize,
    pub segments: usize,
    pub segment_length: usize,
    /// Item-memory seed.
    pub seed: u64,
    pub seizure_index: usize,
    /// Seconds of non-seizure context on each side of the training seizure.
    pub context_s: f64,
    pub horizon_s: Option<f64>,
    pub thresholds: Vec<u32>,
    pub recordings: Vec<PathBuf>,
    /// Compressed IM file; generated from `seed` when absent.
    pub im: Option<PathBuf>,
    pub am: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub gate_model: GateModel,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let p = PipelineConfig::sparse_optimized();
        let t = TrainingProtocol::default();
        Self {
            variant: p.variant,
            num_channels: p.num_channels,
            frame_length: p.frame_length,
            spatial_threshold: None,
            temporal_threshold: None,
            training_density_target: p.training_density_target,
            dimension: p.hv.dimension,
            segments: p.hv.segments,
            segment_length: p.hv.segment_length,
            seed: 42,
            seizure_index: t.seizure_index,
            context_s: t.context_s,
            horizon_s: None,
            thresholds: vec![80, 90, 100, 110, 120, 130, 140, 160, 180, 200],
            recordings: Vec::new(),
            im: None,
            am: None,
            report: None,
            gate_model: GateModel::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| usage(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => Self::from_json(&std::fs::read_to_string(p).map_err(CliError::io(p))?),
        }
    }

    /// Pipeline settings for `variant`, which defaults to the configured one.
    pub fn pipeline(&self, variant: Option<Variant>) -> Result<PipelineConfig> {
        let variant = variant.unwrap_or(self.variant);
        let default_t = match variant {
            Variant::Dense => PipelineConfig::DENSE_TEMPORAL_THRESHOLD,
            _ => PipelineConfig::DEFAULT_TEMPORAL_THRESHOLD,
        };
        let cfg = PipelineConfig {
            variant,
            num_channels: self.num_channels,
            frame_length: self.frame_length,
            spatial_threshold: match variant {
                Variant::SparseBaseline => Some(self.spatial_threshold.unwrap_or(1)),
                _ => None,
            },
            temporal_threshold: self.temporal_threshold.unwrap_or(default_t),
            training_density_target: self.training_density_target,
            hv: HvConfig::new(self.dimension, self.segments, self.segment_length)
                .map_err(|e| usage(format!("config: {e}")))?,
        };
        cfg.validate().map_err(|e| usage(format!("config: {e}")))?;
        Ok(cfg)
    }

    pub fn protocol(&self) -> TrainingProtocol {
        TrainingProtocol {
            seizure_index: self.seizure_index,
            context_s: self.context_s,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.pipeline(None)?;
        self.gate_model
            .validate()
            .map_err(|e| usage(format!("config: {e}")))?;
        if !(self.context_s.is_finite() && self.context_s >= 0.0) {
            return Err(usage("config: context_s must be non-negative"));
        }
        if let Some(h) = self.horizon_s {
            if !(h.is_finite() && h > 0.0) {
                return Err(usage("config: horizon_s must be positive"));
            }
        }
        Ok(())
    }
}

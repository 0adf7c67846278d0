//! The classifier: spatial encoder (bind + bundle), temporal encoder
//! (accumulate + thin per frame), associative memory, one-shot training,
//! streaming inference with detection metrics, and the density sweep.

use crate::error::{check_dims, invalid, Result};
use crate::hv::{overlap_similarity, BinaryHv, HvConfig};

mod encoder;
mod inference;
mod recording;
mod sweep;
mod train;

pub use encoder::{
    encode_recording, spatial_encode, temporal_encode, Encoder, FrameRecord, VariantMemory,
};
pub use inference::{
    classify_frames, evaluate, run_inference, DetectionReport, EvaluationOptions, SeizureOutcome,
    DEFAULT_HORIZON_S,
};
pub use recording::{Annotation, Recording};
pub use sweep::{aggregate_rows, select_best, sweep_max_density, sweep_patient, Patient, SweepRow};
pub use train::{
    select_training_frames, train_from_frame_hvs, train_one_shot, LabeledFrame, TrainingProtocol,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Variant {
    /// IM -> one-hot decode -> barrel shift -> adder tree with thinning.
    SparseBaseline,
    /// CompIM -> position arithmetic -> OR tree.
    SparseOptimized,
    /// 50%-density HVs, XOR binding, majority bundling.
    Dense,
}

impl Variant {
    pub const ALL: [Variant; 3] = [
        Variant::SparseBaseline,
        Variant::SparseOptimized,
        Variant::Dense,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::SparseBaseline => "sparse-baseline",
            Variant::SparseOptimized => "sparse-optimized",
            Variant::Dense => "dense",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.name() == name)
    }
}

impl core::fmt::Display for Variant {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Label {
    NonSeizure = 0,
    Seizure = 1,
}

impl Label {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Label::NonSeizure => "non-seizure",
            Label::Seizure => "seizure",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PipelineConfig {
    pub variant: Variant,
    pub num_channels: usize,
    /// Cycles (= samples) per temporal frame.
    pub frame_length: usize,
    /// Adder-tree threshold of the baseline spatial bundling.
    pub spatial_threshold: Option<u32>,
    pub temporal_threshold: u32,
    pub training_density_target: f64,
    pub hv: HvConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self::sparse_optimized()
    }
}

impl PipelineConfig {
    pub const DEFAULT_TEMPORAL_THRESHOLD: u32 = 130;
    /// Dense temporal bundling thins at half the frame.
    pub const DENSE_TEMPORAL_THRESHOLD: u32 = 128;

    pub fn sparse_optimized() -> Self {
        Self {
            variant: Variant::SparseOptimized,
            num_channels: 64,
            frame_length: 256,
            spatial_threshold: None,
            temporal_threshold: Self::DEFAULT_TEMPORAL_THRESHOLD,
            training_density_target: 0.5,
            hv: HvConfig::default(),
        }
    }

    pub fn sparse_baseline(spatial_threshold: u32) -> Self {
        Self {
            variant: Variant::SparseBaseline,
            spatial_threshold: Some(spatial_threshold),
            ..Self::sparse_optimized()
        }
    }

    pub fn dense() -> Self {
        Self {
            variant: Variant::Dense,
            temporal_threshold: Self::DENSE_TEMPORAL_THRESHOLD,
            ..Self::sparse_optimized()
        }
    }

    /// Same settings under another variant; the spatial threshold is kept
    /// (or defaulted to 1) only for the baseline.
    pub fn with_variant(&self, variant: Variant) -> Self {
        let spatial_threshold = match variant {
            Variant::SparseBaseline => Some(self.spatial_threshold.unwrap_or(1)),
            _ => None,
        };
        Self {
            variant,
            spatial_threshold,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.hv.validate()?;
        if self.num_channels == 0 {
            return Err(invalid("at least one channel required"));
        }
        if self.frame_length == 0 || self.frame_length > 256 {
            // 8-bit accumulator counters
            return Err(invalid("frame length must be in [1, 256]"));
        }
        if self.temporal_threshold == 0 || self.temporal_threshold as usize > self.frame_length {
            return Err(invalid("temporal threshold must be in [1, frame length]"));
        }
        match (self.variant, self.spatial_threshold) {
            (Variant::SparseBaseline, Some(t)) if t >= 1 => {}
            (Variant::SparseBaseline, _) => {
                return Err(invalid("baseline variant needs a spatial threshold >= 1"))
            }
            (_, Some(_)) => {
                return Err(invalid(
                    "spatial threshold applies to the baseline variant only",
                ))
            }
            _ => {}
        }
        if !(self.training_density_target > 0.0 && self.training_density_target <= 1.0) {
            return Err(invalid("training density target must be in (0, 1]"));
        }
        Ok(())
    }

    pub fn frame_duration_s(&self, sampling_rate: f64) -> f64 {
        self.frame_length as f64 / sampling_rate
    }
}

/// One class HV per label.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AssociativeMemory {
    non_seizure: BinaryHv,
    seizure: BinaryHv,
}

impl AssociativeMemory {
    pub fn new(non_seizure: BinaryHv, seizure: BinaryHv) -> Result<Self> {
        check_dims(non_seizure.len(), seizure.len())?;
        Ok(Self {
            non_seizure,
            seizure,
        })
    }

    pub fn dimension(&self) -> usize {
        self.seizure.len()
    }

    pub fn class_hv(&self, label: Label) -> &BinaryHv {
        match label {
            Label::NonSeizure => &self.non_seizure,
            Label::Seizure => &self.seizure,
        }
    }
}

/// Similarities of one frame HV against both classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Classification {
    /// Indexed by [`Label::index`].
    pub similarities: [u32; 2],
    pub label: Label,
    /// Both similarities equal; resolved to non-seizure.
    pub tie: bool,
}

impl Classification {
    pub fn from_similarities(similarities: [u32; 2]) -> Self {
        let label = if similarities[1] > similarities[0] {
            Label::Seizure
        } else {
            Label::NonSeizure
        };
        Self {
            similarities,
            label,
            tie: similarities[0] == similarities[1],
        }
    }
}

/// Overlap-similarity lookup; the highest score wins, ties go to non-seizure.
pub fn classify(frame_hv: &BinaryHv, am: &AssociativeMemory) -> Result<Classification> {
    Ok(Classification::from_similarities([
        overlap_similarity(frame_hv, am.class_hv(Label::NonSeizure))?,
        overlap_similarity(frame_hv, am.class_hv(Label::Seizure))?,
    ]))
}

/// Prediction for one temporal frame.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FramePrediction {
    pub frame_index: usize,
    /// First sample whose code entered the frame.
    pub start_sample: u64,
    /// One past the last sample of the frame; the prediction is available here.
    pub end_sample: u64,
    pub similarities: [u32; 2],
    pub label: Label,
    pub tie: bool,
    /// Density of the frame HV after temporal thinning.
    pub density: f64,
}

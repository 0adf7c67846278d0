use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_dims, invalid, HdcError, Result};
use crate::hv::{AccumulatorHv, BinaryHv};
use crate::pipeline::{AssociativeMemory, Encoder, Label, Recording};
use crate::preprocess::WARMUP;

/// LBP codes of one frame, cycle-major (`frame_length` rows of
/// `num_channels` codes), with its class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledFrame {
    pub codes: Vec<u8>,
    pub label: Label,
}

/// Bundles the frame HVs of each class and thins every class to the smallest
/// threshold whose density does not exceed `density_target`.
pub fn train_from_frame_hvs<'a>(
    frames: impl IntoIterator<Item = (&'a BinaryHv, Label)>,
    dimension: usize,
    density_target: f64,
) -> Result<AssociativeMemory> {
    let mut counts = [vec![0u32; dimension], vec![0u32; dimension]];
    let mut seen = [0u32; 2];
    for (hv, label) in frames {
        check_dims(dimension, hv.len())?;
        seen[label.index()] += 1;
        for i in hv.iter_ones() {
            counts[label.index()][i] += 1;
        }
    }
    for label in [Label::NonSeizure, Label::Seizure] {
        if seen[label.index()] == 0 {
            return Err(HdcError::TrainingData(format!(
                "no {} frames to train on",
                label.name()
            )));
        }
    }
    let [non, seiz] = counts;
    AssociativeMemory::new(
        thin_to_density(&non, seen[0], density_target).0,
        thin_to_density(&seiz, seen[1], density_target).0,
    )
}

/// Smallest `t >= 1` with `#{i : counts[i] >= t} <= target * D`, and the
/// thinned HV. `t = frames + 1` always qualifies.
pub(crate) fn thin_to_density(counts: &[u32], frames: u32, target: f64) -> (BinaryHv, u32) {
    let mut histogram = vec![0usize; frames as usize + 2];
    for &c in counts {
        histogram[c as usize] += 1;
    }
    let budget = target * counts.len() as f64;
    let mut at_least = 0usize;
    let mut threshold = frames + 1;
    for t in (1..=frames).rev() {
        at_least += histogram[t as usize];
        if at_least as f64 <= budget {
            threshold = t;
        } else {
            break;
        }
    }
    let mut hv = BinaryHv::zeros(counts.len());
    for (i, &c) in counts.iter().enumerate() {
        if c >= threshold {
            hv.set(i, true);
        }
    }
    (hv, threshold)
}

/// One-shot training from raw frame codes through the full encoder.
pub fn train_one_shot(frames: &[LabeledFrame], encoder: &Encoder) -> Result<AssociativeMemory> {
    let cfg = encoder.cfg();
    let mut hvs = Vec::with_capacity(frames.len());
    for frame in frames {
        if frame.codes.len() != cfg.frame_length * cfg.num_channels {
            return Err(invalid("frame codes must be frame_length x num_channels"));
        }
        let mut acc = AccumulatorHv::new(cfg.hv.dimension);
        for cycle in frame.codes.chunks_exact(cfg.num_channels) {
            acc.accumulate(&encoder.spatial_encode(cycle)?)?;
        }
        hvs.push((acc.thin(cfg.temporal_threshold)?, frame.label));
    }
    train_from_frame_hvs(
        hvs.iter().map(|(hv, l)| (hv, *l)),
        cfg.hv.dimension,
        cfg.training_density_target,
    )
}

/// Which frames of a recording train the associative memory.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainingProtocol {
    /// Index among the recording's seizure annotations.
    pub seizure_index: usize,
    /// Non-seizure frames are taken from this many seconds before the onset
    /// and after the offset of the training seizure.
    pub context_s: f64,
}

impl Default for TrainingProtocol {
    fn default() -> Self {
        Self {
            seizure_index: 0,
            context_s: 60.0,
        }
    }
}

/// Frames lying fully inside the training seizure are labelled seizure;
/// frames within the context window that touch no seizure annotation are
/// labelled non-seizure. Frames straddling a boundary are skipped.
pub fn select_training_frames(
    recording: &Recording,
    frame_length: usize,
    protocol: &TrainingProtocol,
) -> Result<Vec<(usize, Label)>> {
    let seizures: Vec<_> = recording.seizures().collect();
    let target = seizures.get(protocol.seizure_index).ok_or_else(|| {
        HdcError::TrainingData(format!(
            "seizure index {} out of range ({} annotated)",
            protocol.seizure_index,
            seizures.len()
        ))
    })?;
    let fs = recording.sampling_rate();
    let onset = target.onset_sample;
    let offset = target
        .offset_sample
        .unwrap_or(onset + (crate::pipeline::DEFAULT_HORIZON_S * fs) as u64);
    let context = (protocol.context_s * fs) as u64;
    let lo = onset.saturating_sub(context);
    let hi = offset.saturating_add(context);
    let mut selected = Vec::new();
    for f in 0..recording.frame_count(frame_length) {
        let start = (WARMUP + f * frame_length) as u64;
        let end = start + frame_length as u64;
        if start >= onset && end <= offset {
            selected.push((f, Label::Seizure));
        } else if start >= lo && end <= hi {
            let touches = seizures.iter().any(|s| {
                let s_end = s.offset_sample.unwrap_or(s.onset_sample + 1);
                start < s_end && s.onset_sample < end
            });
            if !touches {
                selected.push((f, Label::NonSeizure));
            }
        }
    }
    Ok(selected)
}

use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::pipeline::Label;
use crate::preprocess::WARMUP;

/// An annotated interval in sample units. `offset_sample` is exclusive;
/// `None` marks an onset without an annotated end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Annotation {
    pub onset_sample: u64,
    pub offset_sample: Option<u64>,
    pub label: Label,
}

/// Multi-channel int16 recording, stored channel-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Recording {
    num_channels: usize,
    sampling_rate: f64,
    num_samples: usize,
    samples: Vec<i16>,
    annotations: Vec<Annotation>,
}

impl Recording {
    pub fn new(
        num_channels: usize,
        sampling_rate: f64,
        samples: Vec<i16>,
        annotations: Vec<Annotation>,
    ) -> Result<Self> {
        if num_channels == 0 {
            return Err(invalid("recording needs at least one channel"));
        }
        if !(sampling_rate.is_finite() && sampling_rate > 0.0) {
            return Err(invalid("sampling rate must be positive"));
        }
        if samples.len() % num_channels != 0 {
            return Err(invalid("sample payload is not a whole number of channels"));
        }
        let num_samples = samples.len() / num_channels;
        for a in &annotations {
            if a.onset_sample >= num_samples as u64 {
                return Err(invalid("annotation onset beyond the end of the recording"));
            }
            if let Some(off) = a.offset_sample {
                if off <= a.onset_sample || off > num_samples as u64 {
                    return Err(invalid(
                        "annotation offset must lie in (onset, num_samples]",
                    ));
                }
            }
        }
        if annotations
            .windows(2)
            .any(|w| w[1].onset_sample < w[0].onset_sample)
        {
            return Err(invalid("annotations must be sorted by onset"));
        }
        for label in [Label::NonSeizure, Label::Seizure] {
            let mut last_end = 0u64;
            for a in annotations.iter().filter(|a| a.label == label) {
                if a.onset_sample < last_end {
                    return Err(invalid("annotations with the same label overlap"));
                }
                last_end = a.offset_sample.unwrap_or(a.onset_sample + 1);
            }
        }
        Ok(Self {
            num_channels,
            sampling_rate,
            num_samples,
            samples,
            annotations,
        })
    }

    pub fn num_channels(&self) -> usize {
        self.num_channels
    }

    pub fn sampling_rate(&self) -> f64 {
        self.sampling_rate
    }

    pub fn num_samples(&self) -> usize {
        self.num_samples
    }

    pub fn duration_s(&self) -> f64 {
        self.num_samples as f64 / self.sampling_rate
    }

    /// Channel-major payload.
    pub fn samples(&self) -> &[i16] {
        &self.samples
    }

    pub fn channel(&self, channel: usize) -> &[i16] {
        &self.samples[channel * self.num_samples..(channel + 1) * self.num_samples]
    }

    /// Writes sample `t` of every channel into `out`.
    pub fn samples_at(&self, t: usize, out: &mut [i16]) {
        for (ch, slot) in out.iter_mut().enumerate() {
            *slot = self.samples[ch * self.num_samples + t];
        }
    }

    pub fn annotations(&self) -> &[Annotation] {
        &self.annotations
    }

    /// Seizure annotations in onset order.
    pub fn seizures(&self) -> impl Iterator<Item = &Annotation> {
        self.annotations
            .iter()
            .filter(|a| a.label == Label::Seizure)
    }

    pub fn seizure_count(&self) -> usize {
        self.seizures().count()
    }

    /// Number of complete frames once the LBP window is warm.
    pub fn frame_count(&self, frame_length: usize) -> usize {
        self.num_samples.saturating_sub(WARMUP) / frame_length
    }
}

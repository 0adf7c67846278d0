use alloc::vec::Vec;

use crate::cost::{Probe, ProbePoint};
use crate::dense::dense_classify;
use crate::error::{check_dims, Result};
use crate::pipeline::{
    classify, encode_recording, AssociativeMemory, Encoder, FramePrediction, FrameRecord, Label,
    PipelineConfig, Recording, Variant,
};

/// Detection horizon for seizures without an annotated offset.
pub const DEFAULT_HORIZON_S: f64 = 60.0;

#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvaluationOptions {
    /// A seizure counts as detected if a seizure frame is predicted within
    /// this many seconds of its onset. Defaults to the annotated duration,
    /// or [`DEFAULT_HORIZON_S`] without an offset.
    pub horizon_s: Option<f64>,
    /// Seizure indices left out of scoring (e.g. the training seizure).
    pub excluded_seizures: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SeizureOutcome {
    pub seizure_index: usize,
    pub onset_sample: u64,
    pub offset_sample: Option<u64>,
    pub detected: bool,
    /// Onset to the end of the first seizure frame after onset, if any.
    pub first_alarm_delay_s: Option<f64>,
    /// Same delay in frames; set only when detected.
    pub delay_frames: Option<f64>,
    pub delay_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DetectionReport {
    pub variant: Variant,
    pub sampling_rate: f64,
    pub frame_length: usize,
    pub temporal_threshold: u32,
    pub frame_count: usize,
    pub seizures: Vec<SeizureOutcome>,
    /// Detected / scored seizures; `None` when nothing was scored.
    pub accuracy: Option<f64>,
    pub mean_delay_s: Option<f64>,
    pub median_delay_s: Option<f64>,
    /// Seizure predictions outside every annotated seizure interval.
    pub false_positive_frames: usize,
    pub mean_density: f64,
    pub predictions: Vec<FramePrediction>,
}

/// Thins every frame at the temporal threshold and looks it up in the AM.
pub fn classify_frames<P: Probe>(
    frames: &[FrameRecord],
    am: &AssociativeMemory,
    cfg: &PipelineConfig,
    probe: &mut P,
) -> Result<Vec<FramePrediction>> {
    check_dims(cfg.hv.dimension, am.dimension())?;
    frames
        .iter()
        .map(|frame| {
            let hv = frame.accumulator.thin(cfg.temporal_threshold)?;
            let c = match cfg.variant {
                Variant::Dense => dense_classify(&hv, am)?,
                _ => classify(&hv, am)?,
            };
            if P::ENABLED {
                probe.observe(ProbePoint::FrameHv, 0, hv.words());
                for label in [Label::NonSeizure, Label::Seizure] {
                    let product = match cfg.variant {
                        Variant::Dense => hv.xor(am.class_hv(label))?,
                        _ => hv.and(am.class_hv(label))?,
                    };
                    probe.observe(ProbePoint::AmProduct, 0, product.words());
                }
                let scores = u64::from(c.similarities[0]) | (u64::from(c.similarities[1]) << 32);
                probe.observe(ProbePoint::Scores, 0, &[scores]);
            }
            Ok(FramePrediction {
                frame_index: frame.index,
                start_sample: frame.start_sample,
                end_sample: frame.end_sample,
                similarities: c.similarities,
                label: c.label,
                tie: c.tie,
                density: hv.density(),
            })
        })
        .collect()
}

fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite delays"));
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    })
}

/// Scores predictions against the recording's seizure annotations.
pub fn evaluate(
    predictions: Vec<FramePrediction>,
    recording: &Recording,
    cfg: &PipelineConfig,
    opts: &EvaluationOptions,
) -> DetectionReport {
    let fs = recording.sampling_rate();
    let frame_s = cfg.frame_duration_s(fs);
    let seizures: Vec<_> = recording.seizures().copied().collect();
    let horizon_end = |s: &crate::pipeline::Annotation| -> f64 {
        let h = opts.horizon_s.unwrap_or_else(|| match s.offset_sample {
            Some(off) => (off - s.onset_sample) as f64 / fs,
            None => DEFAULT_HORIZON_S,
        });
        s.onset_sample as f64 + h * fs
    };

    let mut outcomes = Vec::new();
    for (i, s) in seizures.iter().enumerate() {
        if opts.excluded_seizures.contains(&i) {
            continue;
        }
        let first = predictions
            .iter()
            .find(|p| p.label == Label::Seizure && p.end_sample > s.onset_sample);
        let first_delay = first.map(|p| (p.end_sample - s.onset_sample) as f64 / fs);
        let detected = first.is_some_and(|p| p.end_sample as f64 <= horizon_end(s));
        let delay_s = if detected { first_delay } else { None };
        outcomes.push(SeizureOutcome {
            seizure_index: i,
            onset_sample: s.onset_sample,
            offset_sample: s.offset_sample,
            detected,
            first_alarm_delay_s: first_delay,
            delay_frames: delay_s.map(|d| d / frame_s),
            delay_s,
        });
    }

    let false_positive_frames = predictions
        .iter()
        .filter(|p| p.label == Label::Seizure)
        .filter(|p| {
            !seizures.iter().any(|s| {
                (p.start_sample as f64) < horizon_end(s).max(s.onset_sample as f64 + 1.0)
                    && s.onset_sample < p.end_sample
            })
        })
        .count();

    let scored = outcomes.len();
    let mut delays: Vec<f64> = outcomes.iter().filter_map(|o| o.delay_s).collect();
    let accuracy = (scored > 0).then(|| delays.len() as f64 / scored as f64);
    let mean_delay_s =
        (!delays.is_empty()).then(|| delays.iter().sum::<f64>() / delays.len() as f64);
    let median_delay_s = median(&mut delays);
    let mean_density = if predictions.is_empty() {
        0.0
    } else {
        predictions.iter().map(|p| p.density).sum::<f64>() / predictions.len() as f64
    };

    DetectionReport {
        variant: cfg.variant,
        sampling_rate: fs,
        frame_length: cfg.frame_length,
        temporal_threshold: cfg.temporal_threshold,
        frame_count: predictions.len(),
        seizures: outcomes,
        accuracy,
        mean_delay_s,
        median_delay_s,
        false_positive_frames,
        mean_density,
        predictions,
    }
}

/// Streams a recording through the classifier and scores the predictions.
pub fn run_inference<P: Probe>(
    recording: &Recording,
    am: &AssociativeMemory,
    encoder: &Encoder,
    opts: &EvaluationOptions,
    probe: &mut P,
) -> Result<DetectionReport> {
    let frames = encode_recording(encoder, recording, probe)?;
    let predictions = classify_frames(&frames, am, encoder.cfg(), probe)?;
    Ok(evaluate(predictions, recording, encoder.cfg(), opts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::Annotation;
    use alloc::vec;

    fn pred(i: usize, label: Label) -> FramePrediction {
        FramePrediction {
            frame_index: i,
            start_sample: (6 + i * 256) as u64,
            end_sample: (6 + (i + 1) * 256) as u64,
            similarities: [0, 0],
            label,
            tie: false,
            density: 0.25,
        }
    }

    fn rec(anns: Vec<Annotation>) -> Recording {
        Recording::new(1, 256.0, vec![0; 6 + 40 * 256], anns).unwrap()
    }

    #[test]
    fn delay_counts_to_end_of_first_alarm_frame() {
        let s = Annotation {
            onset_sample: 6 + 10 * 256,
            offset_sample: Some(6 + 20 * 256),
            label: Label::Seizure,
        };
        let mut ps: Vec<_> = (0..40).map(|i| pred(i, Label::NonSeizure)).collect();
        ps[11].label = Label::Seizure;
        let r = evaluate(
            ps,
            &rec(vec![s]),
            &PipelineConfig::default(),
            &Default::default(),
        );
        assert_eq!(r.accuracy, Some(1.0));
        assert_eq!(r.seizures[0].delay_frames, Some(2.0));
        assert_eq!(r.seizures[0].delay_s, Some(2.0));
        assert_eq!(r.false_positive_frames, 0);
    }

    #[test]
    fn horizon_and_false_positives() {
        let s = Annotation {
            onset_sample: 6 + 10 * 256,
            offset_sample: Some(6 + 12 * 256),
            label: Label::Seizure,
        };
        let mut ps: Vec<_> = (0..40).map(|i| pred(i, Label::NonSeizure)).collect();
        ps[3].label = Label::Seizure;
        ps[15].label = Label::Seizure;
        let r = evaluate(
            ps,
            &rec(vec![s]),
            &PipelineConfig::default(),
            &Default::default(),
        );
        assert_eq!(r.accuracy, Some(0.0));
        assert!(!r.seizures[0].detected);
        assert_eq!(r.seizures[0].first_alarm_delay_s, Some(6.0));
        assert_eq!(r.false_positive_frames, 2);
        assert_eq!(r.mean_delay_s, None);
    }

    #[test]
    fn no_seizures_gives_no_accuracy() {
        let ps: Vec<_> = (0..40).map(|i| pred(i, Label::NonSeizure)).collect();
        let r = evaluate(
            ps,
            &rec(vec![]),
            &PipelineConfig::default(),
            &Default::default(),
        );
        assert_eq!(r.accuracy, None);
        assert_eq!(r.false_positive_frames, 0);
        assert_eq!(r.frame_count, 40);
    }

    #[test]
    fn excluded_seizures_are_not_scored() {
        let s = |k: usize| Annotation {
            onset_sample: (6 + k * 256) as u64,
            offset_sample: Some((6 + (k + 2) * 256) as u64),
            label: Label::Seizure,
        };
        let mut ps: Vec<_> = (0..40).map(|i| pred(i, Label::NonSeizure)).collect();
        ps[20].label = Label::Seizure;
        let opts = EvaluationOptions {
            horizon_s: None,
            excluded_seizures: vec![0],
        };
        let r = evaluate(
            ps,
            &rec(vec![s(5), s(20)]),
            &PipelineConfig::default(),
            &opts,
        );
        assert_eq!(r.seizures.len(), 1);
        assert_eq!(r.seizures[0].seizure_index, 1);
        assert_eq!(r.median_delay_s, Some(1.0));
    }
}

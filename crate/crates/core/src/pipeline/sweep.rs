use alloc::string::String;
use alloc::vec::Vec;

use crate::cost::NoProbe;
use crate::error::{invalid, Result};
use crate::pipeline::{
    classify_frames, encode_recording, evaluate, select_training_frames, train_from_frame_hvs,
    Encoder, EvaluationOptions, Recording, TrainingProtocol,
};

/// One recording with its training protocol.
#[derive(Debug, Clone)]
pub struct Patient<'a> {
    pub name: String,
    pub recording: &'a Recording,
    pub protocol: TrainingProtocol,
}

/// One point of the temporal-threshold sweep.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepRow {
    /// `None` for rows aggregated over all patients.
    pub patient: Option<String>,
    pub threshold: u32,
    pub mean_delay_s: Option<f64>,
    pub median_delay_s: Option<f64>,
    pub accuracy: Option<f64>,
    pub mean_density: f64,
    pub detected: usize,
    pub scored: usize,
    pub false_positive_frames: usize,
    pub delays_s: Vec<f64>,
    /// Best row of its patient (or of the aggregate).
    pub best: bool,
}

fn median(values: &[f64]) -> Option<f64> {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite delays"));
    let n = v.len();
    match n {
        0 => None,
        _ if n % 2 == 1 => Some(v[n / 2]),
        _ => Some((v[n / 2 - 1] + v[n / 2]) / 2.0),
    }
}

/// Retrains and re-evaluates one patient at every threshold. Spatial encoding
/// and the per-frame accumulators do not depend on the temporal threshold,
/// so the recording is streamed once and only thinning is repeated.
pub fn sweep_patient(
    patient: &Patient<'_>,
    encoder: &Encoder,
    thresholds: &[u32],
    horizon_s: Option<f64>,
) -> Result<Vec<SweepRow>> {
    if thresholds.is_empty() {
        return Err(invalid("threshold list is empty"));
    }
    let base = *encoder.cfg();
    let frames = encode_recording(encoder, patient.recording, &mut NoProbe)?;
    let selection =
        select_training_frames(patient.recording, base.frame_length, &patient.protocol)?;
    let opts = EvaluationOptions {
        horizon_s,
        excluded_seizures: alloc::vec![patient.protocol.seizure_index],
    };
    let mut rows = Vec::with_capacity(thresholds.len());
    for &threshold in thresholds {
        let mut cfg = base;
        cfg.temporal_threshold = threshold;
        cfg.validate()?;
        let hvs: Vec<_> = selection
            .iter()
            .map(|&(f, label)| Ok((frames[f].accumulator.thin(threshold)?, label)))
            .collect::<Result<_>>()?;
        let am = train_from_frame_hvs(
            hvs.iter().map(|(hv, l)| (hv, *l)),
            cfg.hv.dimension,
            cfg.training_density_target,
        )?;
        let predictions = classify_frames(&frames, &am, &cfg, &mut NoProbe)?;
        let report = evaluate(predictions, patient.recording, &cfg, &opts);
        let delays_s: Vec<f64> = report.seizures.iter().filter_map(|s| s.delay_s).collect();
        rows.push(SweepRow {
            patient: Some(patient.name.clone()),
            threshold,
            mean_delay_s: report.mean_delay_s,
            median_delay_s: report.median_delay_s,
            accuracy: report.accuracy,
            mean_density: report.mean_density,
            detected: delays_s.len(),
            scored: report.seizures.len(),
            false_positive_frames: report.false_positive_frames,
            delays_s,
            best: false,
        });
    }
    select_best(&mut rows);
    Ok(rows)
}

/// Flags the row with the highest accuracy, breaking ties by the lowest mean
/// delay and then by list order.
pub fn select_best(rows: &mut [SweepRow]) {
    let key = |r: &SweepRow| {
        (
            r.accuracy.unwrap_or(-1.0),
            -r.mean_delay_s.unwrap_or(f64::INFINITY),
        )
    };
    let mut best: Option<usize> = None;
    for (i, r) in rows.iter().enumerate() {
        let better = match best {
            None => true,
            Some(b) => {
                let (a, d) = key(r);
                let (ba, bd) = key(&rows[b]);
                a > ba || (a == ba && d > bd)
            }
        };
        if better {
            best = Some(i);
        }
    }
    for (i, r) in rows.iter_mut().enumerate() {
        r.best = Some(i) == best;
    }
}

/// Pools per-patient rows into one row per threshold.
pub fn aggregate_rows(per_patient: &[SweepRow], thresholds: &[u32]) -> Vec<SweepRow> {
    let mut rows: Vec<SweepRow> = thresholds
        .iter()
        .map(|&threshold| {
            let group: Vec<&SweepRow> = per_patient
                .iter()
                .filter(|r| r.threshold == threshold)
                .collect();
            let detected: usize = group.iter().map(|r| r.detected).sum();
            let scored: usize = group.iter().map(|r| r.scored).sum();
            let delays_s: Vec<f64> = group
                .iter()
                .flat_map(|r| r.delays_s.iter().copied())
                .collect();
            let mean_density = if group.is_empty() {
                0.0
            } else {
                group.iter().map(|r| r.mean_density).sum::<f64>() / group.len() as f64
            };
            SweepRow {
                patient: None,
                threshold,
                mean_delay_s: (!delays_s.is_empty())
                    .then(|| delays_s.iter().sum::<f64>() / delays_s.len() as f64),
                median_delay_s: median(&delays_s),
                accuracy: (scored > 0).then(|| detected as f64 / scored as f64),
                mean_density,
                detected,
                scored,
                false_positive_frames: group.iter().map(|r| r.false_positive_frames).sum(),
                delays_s,
                best: false,
            }
        })
        .collect();
    select_best(&mut rows);
    rows
}

/// Full sweep: per-patient rows followed by the pooled rows.
pub fn sweep_max_density(
    patients: &[Patient<'_>],
    encoder: &Encoder,
    thresholds: &[u32],
    horizon_s: Option<f64>,
) -> Result<Vec<SweepRow>> {
    if thresholds.is_empty() {
        return Err(invalid("threshold list is empty"));
    }
    let mut rows = Vec::new();
    for p in patients {
        rows.extend(sweep_patient(p, encoder, thresholds, horizon_s)?);
    }
    let pooled = aggregate_rows(&rows, thresholds);
    rows.extend(pooled);
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(threshold: u32, accuracy: Option<f64>, delay: Option<f64>) -> SweepRow {
        SweepRow {
            patient: Some("p".into()),
            threshold,
            mean_delay_s: delay,
            median_delay_s: delay,
            accuracy,
            mean_density: 0.0,
            detected: 0,
            scored: 0,
            false_positive_frames: 0,
            delays_s: Vec::new(),
            best: false,
        }
    }

    #[test]
    fn best_prefers_accuracy_then_delay() {
        let mut rows = alloc::vec![
            row(1, Some(0.5), Some(1.0)),
            row(2, Some(1.0), Some(3.0)),
            row(3, Some(1.0), Some(2.0)),
            row(4, None, None),
        ];
        select_best(&mut rows);
        let flags: Vec<bool> = rows.iter().map(|r| r.best).collect();
        assert_eq!(flags, [false, false, true, false]);
    }

    #[test]
    fn aggregate_pools_counts() {
        let mut a = row(5, Some(1.0), Some(1.0));
        a.detected = 1;
        a.scored = 1;
        a.delays_s = alloc::vec![1.0];
        let mut b = row(5, Some(0.5), Some(3.0));
        b.detected = 1;
        b.scored = 2;
        b.delays_s = alloc::vec![3.0];
        let agg = aggregate_rows(&[a, b], &[5]);
        assert_eq!(agg.len(), 1);
        assert_eq!(agg[0].accuracy, Some(2.0 / 3.0));
        assert_eq!(agg[0].mean_delay_s, Some(2.0));
        assert!(agg[0].best);
    }
}

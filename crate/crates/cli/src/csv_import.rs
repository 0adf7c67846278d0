//! CSV ingestion: one row per sample, one column per channel, plus a JSON
//! sidecar carrying the sampling rate and annotations.

use std::path::Path;

use serde::Deserialize;
use sparse_hdc::pipeline::Annotation;
use sparse_hdc::Recording;

use crate::error::{data, CliError, Result};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    pub sampling_rate: f64,
    /// Whether the first CSV row names the channels.
    #[serde(default)]
    pub has_header: bool,
    /// Multiplier applied before rounding to int16.
    #[serde(default = "unit_scale")]
    pub scale: f64,
    #[serde(default)]
    pub annotations: Vec<Annotation>,
}

fn unit_scale() -> f64 {
    1.0
}

#[derive(Debug)]
pub struct Imported {
    pub recording: Recording,
    /// Values saturated at the int16 range.
    pub clipped: usize,
}

pub fn parse(csv_text: &[u8], sidecar: &Sidecar) -> Result<Imported> {
    if !(sidecar.scale.is_finite() && sidecar.scale > 0.0) {
        return Err(data("sidecar scale must be positive"));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(sidecar.has_header)
        .trim(csv::Trim::All)
        .from_reader(csv_text);
    let mut rows: Vec<Vec<i16>> = Vec::new();
    let mut clipped = 0usize;
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| data(format!("CSV row {}: {e}", r + 1)))?;
        let row = record
            .iter()
            .map(|field| {
                let v: f64 = field
                    .parse()
                    .map_err(|_| data(format!("CSV row {}: '{field}' is not a number", r + 1)))?;
                if !v.is_finite() {
                    return Err(data(format!("CSV row {}: non-finite value", r + 1)));
                }
                let scaled = (v * sidecar.scale).round();
                if scaled < f64::from(i16::MIN) || scaled > f64::from(i16::MAX) {
                    clipped += 1;
                }
                Ok(scaled.clamp(f64::from(i16::MIN), f64::from(i16::MAX)) as i16)
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let channels = rows.first().map_or(0, Vec::len);
    if channels == 0 {
        return Err(data("CSV holds no samples"));
    }
    let n = rows.len();
    let mut samples = vec![0i16; channels * n];
    for (t, row) in rows.iter().enumerate() {
        for (ch, &v) in row.iter().enumerate() {
            samples[ch * n + t] = v;
        }
    }
    let recording = Recording::new(
        channels,
        sidecar.sampling_rate,
        samples,
        sidecar.annotations.clone(),
    )
    .map_err(|e| data(format!("invalid recording: {e}")))?;
    Ok(Imported { recording, clipped })
}

pub fn import(csv_path: &Path, sidecar_path: &Path) -> Result<Imported> {
    let text = std::fs::read_to_string(sidecar_path).map_err(CliError::io(sidecar_path))?;
    let sidecar: Sidecar = serde_json::from_str(&text)
        .map_err(|e| data(format!("{}: {e}", sidecar_path.display())))?;
    parse(
        &std::fs::read(csv_path).map_err(CliError::io(csv_path))?,
        &sidecar,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sidecar(json: &str) -> Sidecar {
        serde_json::from_str(json).unwrap()
    }

    #[test]
    fn transposes_rows_to_channels() {
        let sc = sidecar(
            r#"{"sampling_rate": 256, "has_header": true,
                "annotations": [{"onset_sample": 1, "offset_sample": 3, "label": "seizure"}]}"#,
        );
        let out = parse(b"a,b\n1,10\n2,20\n3,40000\n", &sc).unwrap();
        assert_eq!(out.recording.num_channels(), 2);
        assert_eq!(out.recording.channel(1), &[10, 20, i16::MAX]);
        assert_eq!(out.clipped, 1);
        assert_eq!(out.recording.seizure_count(), 1);
    }

    #[test]
    fn rejects_ragged_or_bad_values() {
        let sc = sidecar(r#"{"sampling_rate": 256}"#);
        assert!(parse(b"1,2\n3\n", &sc).is_err());
        assert!(parse(b"1,x\n", &sc).is_err());
        assert!(parse(b"", &sc).is_err());
    }
}

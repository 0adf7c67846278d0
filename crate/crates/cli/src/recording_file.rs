//! Binary recording files.
//!
//! Layout, little-endian, 36-byte header:
//!
//! | offset | size | field |
//! |---|---|---|
//! | 0 | 4 | magic `SHRC` |
//! | 4 | 2 | version (1) |
//! | 6 | 2 | sample format: 1 = int16 |
//! | 8 | 4 | channels |
//! | 12 | 8 | sampling rate in Hz, f64 |
//! | 20 | 8 | samples per channel |
//! | 28 | 4 | annotation count |
//! | 32 | 4 | reserved, 0 |
//!
//! Then `channels * samples` int16 values, channel-major, followed by one
//! 24-byte record per annotation: onset sample (u64), exclusive offset
//! sample (u64, `u64::MAX` when absent), label (u32: 0 non-seizure,
//! 1 seizure), reserved u32.

use std::path::Path;

use sparse_hdc::pipeline::Annotation;
use sparse_hdc::{Label, Recording};

use crate::error::{data, CliError, Result};

pub const MAGIC: [u8; 4] = *b"SHRC";
pub const VERSION: u16 = 1;
pub const SAMPLE_FORMAT_I16: u16 = 1;
pub const HEADER_LEN: usize = 36;
pub const ANNOTATION_LEN: usize = 24;
const NO_OFFSET: u64 = u64::MAX;

pub fn encode(rec: &Recording) -> Vec<u8> {
    let payload = rec.samples().len() * 2;
    let mut out =
        Vec::with_capacity(HEADER_LEN + payload + rec.annotations().len() * ANNOTATION_LEN);
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&SAMPLE_FORMAT_I16.to_le_bytes());
    out.extend_from_slice(&(rec.num_channels() as u32).to_le_bytes());
    out.extend_from_slice(&rec.sampling_rate().to_le_bytes());
    out.extend_from_slice(&(rec.num_samples() as u64).to_le_bytes());
    out.extend_from_slice(&(rec.annotations().len() as u32).to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());
    for s in rec.samples() {
        out.extend_from_slice(&s.to_le_bytes());
    }
    for a in rec.annotations() {
        out.extend_from_slice(&a.onset_sample.to_le_bytes());
        out.extend_from_slice(&a.offset_sample.unwrap_or(NO_OFFSET).to_le_bytes());
        out.extend_from_slice(&(a.label.index() as u32).to_le_bytes());
        out.extend_from_slice(&0u32.to_le_bytes());
    }
    out
}

fn u32_at(b: &[u8], o: usize) -> u32 {
    u32::from_le_bytes(b[o..o + 4].try_into().unwrap())
}

fn u64_at(b: &[u8], o: usize) -> u64 {
    u64::from_le_bytes(b[o..o + 8].try_into().unwrap())
}

pub fn decode(bytes: &[u8]) -> Result<Recording> {
    if bytes.len() < HEADER_LEN {
        return Err(data("recording file shorter than its header"));
    }
    if bytes[0..4] != MAGIC {
        return Err(data("not a recording file (bad magic)"));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != VERSION {
        return Err(data(format!("unsupported recording version {version}")));
    }
    let format = u16::from_le_bytes([bytes[6], bytes[7]]);
    if format != SAMPLE_FORMAT_I16 {
        return Err(data(format!("unsupported sample format {format}")));
    }
    let channels = u32_at(bytes, 8) as usize;
    let fs = f64::from_le_bytes(bytes[12..20].try_into().unwrap());
    let samples = usize::try_from(u64_at(bytes, 20)).map_err(|_| data("sample count too large"))?;
    let annotations = u32_at(bytes, 28) as usize;
    if u32_at(bytes, 32) != 0 {
        return Err(data("reserved header field is not zero"));
    }
    let payload = channels
        .checked_mul(samples)
        .and_then(|n| n.checked_mul(2))
        .ok_or_else(|| data("sample payload size overflows"))?;
    let expected = HEADER_LEN + payload + annotations * ANNOTATION_LEN;
    if bytes.len() != expected {
        return Err(data(format!(
            "recording file is {} bytes, header implies {expected}",
            bytes.len()
        )));
    }
    let body = &bytes[HEADER_LEN..HEADER_LEN + payload];
    let values = body
        .chunks_exact(2)
        .map(|c| i16::from_le_bytes([c[0], c[1]]))
        .collect();
    let anns = bytes[HEADER_LEN + payload..]
        .chunks_exact(ANNOTATION_LEN)
        .map(|r| {
            let label = match u32_at(r, 16) {
                0 => Label::NonSeizure,
                1 => Label::Seizure,
                l => return Err(data(format!("unknown annotation label {l}"))),
            };
            if u32_at(r, 20) != 0 {
                return Err(data("reserved annotation field is not zero"));
            }
            let offset = u64_at(r, 8);
            Ok(Annotation {
                onset_sample: u64_at(r, 0),
                offset_sample: (offset != NO_OFFSET).then_some(offset),
                label,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Recording::new(channels, fs, values, anns).map_err(|e| data(format!("invalid recording: {e}")))
}

pub fn read(path: &Path) -> Result<Recording> {
    decode(&std::fs::read(path).map_err(CliError::io(path))?)
}

pub fn write(path: &Path, rec: &Recording) -> Result<()> {
    std::fs::write(path, encode(rec)).map_err(CliError::io(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Recording {
        let ann = Annotation {
            onset_sample: 2,
            offset_sample: None,
            label: Label::Seizure,
        };
        Recording::new(2, 512.0, vec![1, -2, 3, 4, i16::MIN, i16::MAX], vec![ann]).unwrap()
    }

    #[test]
    fn layout() {
        let bytes = encode(&sample());
        assert_eq!(bytes.len(), 36 + 12 + 24);
        assert_eq!(&bytes[36..38], &1i16.to_le_bytes());
        assert_eq!(&bytes[56..64], &u64::MAX.to_le_bytes());
        assert_eq!(decode(&bytes).unwrap(), sample());
    }

    #[test]
    fn rejects_bad_files() {
        let good = encode(&sample());
        assert!(decode(&good[..good.len() - 1]).is_err());
        let mut bad = good.clone();
        bad[6] = 2;
        assert!(decode(&bad).is_err());
        let mut bad = good.clone();
        bad[36 + 12 + 16] = 7;
        assert!(decode(&bad).is_err());
        let mut bad = good;
        // onset beyond the end
        bad[36 + 12] = 200;
        assert!(decode(&bad).is_err());
    }
}

//! Trained associative memories as JSON.
//!
//! Class HVs are hex strings: 16 digits per 64-bit word, lowest word first,
//! each word big-endian in its digits. Together with the pipeline settings
//! and the item-memory seed the file pins everything inference needs.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sparse_hdc::{AssociativeMemory, BinaryHv, Label, PipelineConfig};

use crate::error::{data, CliError, Result};

pub const FORMAT: &str = "sparse-hdc-am";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmFile {
    pub format: String,
    pub version: u32,
    pub pipeline: PipelineConfig,
    pub im_seed: u64,
    pub training_seizure: usize,
    pub non_seizure: String,
    pub seizure: String,
}

pub fn hv_to_hex(hv: &BinaryHv) -> String {
    let mut s = String::with_capacity(hv.words().len() * 16);
    for w in hv.words() {
        write!(s, "{w:016x}").expect("writing to a String");
    }
    s
}

pub fn hv_from_hex(len: usize, hex: &str) -> Result<BinaryHv> {
    if hex.len() != len.div_ceil(64) * 16 || !hex.bytes().all(|b| b.is_ascii_hexdigit()) {
        return Err(data(format!(
            "class HV must be {} hex digits",
            len.div_ceil(64) * 16
        )));
    }
    let words = (0..hex.len())
        .step_by(16)
        .map(|i| u64::from_str_radix(&hex[i..i + 16], 16).expect("validated hex"))
        .collect();
    BinaryHv::from_words(len, words).map_err(|_| data("class HV has bits beyond its dimension"))
}

impl AmFile {
    pub fn new(
        pipeline: PipelineConfig,
        im_seed: u64,
        training_seizure: usize,
        am: &AssociativeMemory,
    ) -> Self {
        Self {
            format: FORMAT.into(),
            version: VERSION,
            pipeline,
            im_seed,
            training_seizure,
            non_seizure: hv_to_hex(am.class_hv(Label::NonSeizure)),
            seizure: hv_to_hex(am.class_hv(Label::Seizure)),
        }
    }

    pub fn memory(&self) -> Result<AssociativeMemory> {
        let d = self.pipeline.hv.dimension;
        Ok(AssociativeMemory::new(
            hv_from_hex(d, &self.non_seizure)?,
            hv_from_hex(d, &self.seizure)?,
        )?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("AM file serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: AmFile = serde_json::from_str(text).map_err(|e| data(format!("AM file: {e}")))?;
        if file.format != FORMAT || file.version != VERSION {
            return Err(data(format!("not a {FORMAT} v{VERSION} file")));
        }
        file.pipeline
            .validate()
            .map_err(|e| data(format!("AM file: {e}")))?;
        file.memory()?;
        Ok(file)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path).map_err(CliError::io(path))?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(CliError::io(path))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_round_trip() {
        let hv = BinaryHv::from_indices(100, &[0, 63, 64, 99]).unwrap();
        let hex = hv_to_hex(&hv);
        assert_eq!(hex.len(), 32);
        assert_eq!(&hex[..16], "8000000000000001");
        assert_eq!(hv_from_hex(100, &hex).unwrap(), hv);
        assert!(hv_from_hex(99, &hex).is_err());
        assert!(hv_from_hex(100, &hex[1..]).is_err());
    }
}

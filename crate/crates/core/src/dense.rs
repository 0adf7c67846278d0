//! Dense HDC reference: i.i.d. fair-coin HVs, XOR binding, majority bundling
//! and a Hamming-similarity associative memory.
//!
//! Only used as the comparison point for switching activity and area.

use alloc::vec::Vec;

use rand_core::RngCore;

use crate::error::{check_dims, invalid, Result};
use crate::hv::{bundle_counts, hamming_distance, BinaryHv};
use crate::item_memory::LBP_CODES;
use crate::pipeline::{AssociativeMemory, Classification, Label};
use crate::rng::design_rng;

/// Dense item memory. Entries are drawn first (channel-major, code-minor),
/// then the electrode HVs, each from consecutive `next_u64` words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseItemMemory {
    dimension: usize,
    seed: u64,
    num_channels: usize,
    entries: Vec<BinaryHv>,
    electrodes: Vec<BinaryHv>,
}

impl DenseItemMemory {
    pub fn generate(seed: u64, num_channels: usize, dimension: usize) -> Result<Self> {
        if num_channels == 0 || dimension == 0 {
            return Err(invalid("dense item memory needs channels and a dimension"));
        }
        let mut rng = design_rng(seed);
        let mut one = || {
            let mut words: Vec<u64> = (0..dimension.div_ceil(64))
                .map(|_| rng.next_u64())
                .collect();
            let rem = dimension % 64;
            if rem != 0 {
                *words.last_mut().unwrap() &= (1u64 << rem) - 1;
            }
            BinaryHv::from_words(dimension, words).expect("tail cleared")
        };
        let entries = (0..num_channels * LBP_CODES).map(|_| one()).collect();
        let electrodes = (0..num_channels).map(|_| one()).collect();
        Ok(Self {
            dimension,
            seed,
            num_channels,
            entries,
            electrodes,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn num_channels(&self) -> usize {
        self.num_channels
    }

    pub fn lookup(&self, channel: usize, code: usize) -> Result<&BinaryHv> {
        if channel >= self.num_channels || code >= LBP_CODES {
            return Err(invalid("dense item memory index out of range"));
        }
        Ok(&self.entries[channel * LBP_CODES + code])
    }

    pub fn electrode(&self, channel: usize) -> Result<&BinaryHv> {
        self.electrodes
            .get(channel)
            .ok_or_else(|| invalid("channel index out of range"))
    }
}

pub fn xor_bind(a: &BinaryHv, b: &BinaryHv) -> Result<BinaryHv> {
    a.xor(b)
}

/// Majority of `k` inputs: bit set iff at least `floor(k / 2) + 1` inputs set it,
/// so even-count ties resolve to 0.
pub fn majority_bundle(hvs: &[BinaryHv]) -> Result<BinaryHv> {
    let counts = bundle_counts(hvs)?;
    Ok(counts.at_least((hvs.len() / 2 + 1) as u32))
}

/// Hamming-similarity lookup: similarity is `D - hamming`, ties go to
/// non-seizure.
pub fn dense_classify(frame_hv: &BinaryHv, am: &AssociativeMemory) -> Result<Classification> {
    let d = frame_hv.len() as u32;
    check_dims(am.dimension(), frame_hv.len())?;
    let sim = |label| Ok::<_, crate::HdcError>(d - hamming_distance(frame_hv, am.class_hv(label))?);
    Ok(Classification::from_similarities([
        sim(Label::NonSeizure)?,
        sim(Label::Seizure)?,
    ]))
}

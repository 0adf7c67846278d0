//! Item memories: per-channel lookup tables from 6-bit LBP codes to atomic
//! sparse HVs, plus one electrode HV per channel.
//!
//! Generation draws, from a single seeded stream, every entry in
//! channel-major then code order (segment positions in segment order),
//! followed by the electrode HVs in channel order. [`ItemMemory`] keeps the
//! expanded 1024-bit form, [`CompressedItemMemory`] only the positions.

use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::hv::{atomic_to_binary, one_hot_decode, AtomicSparseHv, BinaryHv, HvConfig};
use crate::rng::{design_rng, uniform_below};

/// Number of distinct LBP codes (6 bits).
pub const LBP_CODES: usize = 64;

fn draw(
    seed: u64,
    num_channels: usize,
    cfg: &HvConfig,
) -> Result<(Vec<AtomicSparseHv>, Vec<AtomicSparseHv>)> {
    cfg.validate()?;
    if num_channels == 0 {
        return Err(invalid("item memory needs at least one channel"));
    }
    let mut rng = design_rng(seed);
    let l = cfg.segment_length as u32;
    let mut one = || {
        let positions = (0..cfg.segments)
            .map(|_| uniform_below(&mut rng, l) as u16)
            .collect();
        AtomicSparseHv::from_positions_unchecked(positions)
    };
    let entries = (0..num_channels * LBP_CODES).map(|_| one()).collect();
    let electrodes = (0..num_channels).map(|_| one()).collect();
    Ok((entries, electrodes))
}

fn check_index(num_channels: usize, channel: usize, code: usize) -> Result<usize> {
    if channel >= num_channels {
        return Err(invalid("channel index out of range"));
    }
    if code >= LBP_CODES {
        return Err(invalid("LBP code must be below 64"));
    }
    Ok(channel * LBP_CODES + code)
}

/// Baseline item memory with entries stored as full binary HVs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ItemMemory {
    cfg: HvConfig,
    seed: u64,
    num_channels: usize,
    entries: Vec<BinaryHv>,
    electrodes: Vec<BinaryHv>,
}

impl ItemMemory {
    pub fn generate(seed: u64, num_channels: usize, cfg: HvConfig) -> Result<Self> {
        CompressedItemMemory::generate(seed, num_channels, cfg)?.expand()
    }

    /// Assembles a memory from raw tables. Only shapes are checked here;
    /// [`ItemMemory::compress`] rejects entries that are not atomic.
    pub fn from_raw(
        cfg: HvConfig,
        seed: u64,
        entries: Vec<BinaryHv>,
        electrodes: Vec<BinaryHv>,
    ) -> Result<Self> {
        cfg.validate()?;
        let num_channels = electrodes.len();
        if num_channels == 0 || entries.len() != num_channels * LBP_CODES {
            return Err(invalid("item table must hold 64 entries per electrode"));
        }
        if entries
            .iter()
            .chain(&electrodes)
            .any(|hv| hv.len() != cfg.dimension)
        {
            return Err(invalid("item memory entry has the wrong dimension"));
        }
        Ok(Self {
            cfg,
            seed,
            num_channels,
            entries,
            electrodes,
        })
    }

    pub fn cfg(&self) -> &HvConfig {
        &self.cfg
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn num_channels(&self) -> usize {
        self.num_channels
    }

    pub fn lookup(&self, channel: usize, code: usize) -> Result<&BinaryHv> {
        Ok(&self.entries[check_index(self.num_channels, channel, code)?])
    }

    pub fn electrode(&self, channel: usize) -> Result<&BinaryHv> {
        self.electrodes
            .get(channel)
            .ok_or_else(|| invalid("channel index out of range"))
    }

    /// Folds one-hot decoding into the table.
    pub fn compress(&self) -> Result<CompressedItemMemory> {
        let decode = |hvs: &[BinaryHv]| {
            hvs.iter()
                .map(|hv| one_hot_decode(hv, &self.cfg))
                .collect::<Result<Vec<_>>>()
        };
        Ok(CompressedItemMemory {
            cfg: self.cfg,
            seed: self.seed,
            num_channels: self.num_channels,
            entries: decode(&self.entries)?,
            electrodes: decode(&self.electrodes)?,
        })
    }
}

/// Compressed item memory: each entry is `S` positions of `log2 L` bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressedItemMemory {
    cfg: HvConfig,
    seed: u64,
    num_channels: usize,
    entries: Vec<AtomicSparseHv>,
    electrodes: Vec<AtomicSparseHv>,
}

impl CompressedItemMemory {
    pub fn generate(seed: u64, num_channels: usize, cfg: HvConfig) -> Result<Self> {
        let (entries, electrodes) = draw(seed, num_channels, &cfg)?;
        Ok(Self {
            cfg,
            seed,
            num_channels,
            entries,
            electrodes,
        })
    }

    pub fn from_parts(
        cfg: HvConfig,
        seed: u64,
        entries: Vec<AtomicSparseHv>,
        electrodes: Vec<AtomicSparseHv>,
    ) -> Result<Self> {
        cfg.validate()?;
        let num_channels = electrodes.len();
        if num_channels == 0 || entries.len() != num_channels * LBP_CODES {
            return Err(invalid("item table must hold 64 entries per electrode"));
        }
        for hv in entries.iter().chain(&electrodes) {
            hv.validate(&cfg)?;
        }
        Ok(Self {
            cfg,
            seed,
            num_channels,
            entries,
            electrodes,
        })
    }

    pub fn cfg(&self) -> &HvConfig {
        &self.cfg
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn num_channels(&self) -> usize {
        self.num_channels
    }

    /// Payload bits per stored entry (56 for the default geometry).
    pub fn entry_payload_bits(&self) -> usize {
        self.cfg.atomic_payload_bits()
    }

    pub fn lookup_compressed(&self, channel: usize, code: usize) -> Result<&AtomicSparseHv> {
        Ok(&self.entries[check_index(self.num_channels, channel, code)?])
    }

    pub fn electrode(&self, channel: usize) -> Result<&AtomicSparseHv> {
        self.electrodes
            .get(channel)
            .ok_or_else(|| invalid("channel index out of range"))
    }

    /// Entries in channel-major, code-minor order.
    pub fn entries(&self) -> &[AtomicSparseHv] {
        &self.entries
    }

    pub fn electrodes(&self) -> &[AtomicSparseHv] {
        &self.electrodes
    }

    pub fn expand(&self) -> Result<ItemMemory> {
        let expand = |hvs: &[AtomicSparseHv]| {
            hvs.iter()
                .map(|hv| atomic_to_binary(hv, &self.cfg))
                .collect::<Result<Vec<_>>>()
        };
        Ok(ItemMemory {
            cfg: self.cfg,
            seed: self.seed,
            num_channels: self.num_channels,
            entries: expand(&self.entries)?,
            electrodes: expand(&self.electrodes)?,
        })
    }
}

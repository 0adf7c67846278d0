//! Binary item-memory files.
//!
//! Layout, little-endian, 32-byte header:
//!
//! | offset | size | field |
//! |---|---|---|
//! | 0 | 4 | magic `SHIM` |
//! | 4 | 2 | version (1) |
//! | 6 | 1 | kind: 0 = full IM, 1 = compressed IM |
//! | 7 | 1 | reserved, 0 |
//! | 8 | 4 | dimension `D` |
//! | 12 | 4 | segments `S` |
//! | 16 | 4 | segment length `L` |
//! | 20 | 4 | channels `C` |
//! | 24 | 8 | generation seed |
//!
//! The payload lists the `C * 64` code entries (channel-major) followed by
//! the `C` electrode HVs. A full IM stores each HV as `ceil(D / 8)` bytes,
//! bit `i` in byte `i / 8` at bit `i % 8`. A compressed IM stores the `S`
//! positions of each HV as `log2 L`-bit fields packed LSB-first into one
//! continuous bit stream, zero-padded to a byte. Loaders reject trailing
//! bytes and non-zero padding.

use std::path::Path;

use serde::Serialize;
use sparse_hdc::item_memory::LBP_CODES;
use sparse_hdc::{AtomicSparseHv, BinaryHv, CompressedItemMemory, HvConfig, ItemMemory};

use crate::error::{data, CliError, Result};

pub const MAGIC: [u8; 4] = *b"SHIM";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImKind {
    Full = 0,
    Compressed = 1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ImHeader {
    pub kind: ImKind,
    pub cfg: HvConfig,
    pub num_channels: usize,
    pub seed: u64,
}

impl ImHeader {
    fn write(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.push(self.kind as u8);
        out.push(0);
        for v in [
            self.cfg.dimension,
            self.cfg.segments,
            self.cfg.segment_length,
            self.num_channels,
        ] {
            out.extend_from_slice(&(v as u32).to_le_bytes());
        }
        out.extend_from_slice(&self.seed.to_le_bytes());
    }

    pub fn parse(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(data("item memory file shorter than its header"));
        }
        if bytes[0..4] != MAGIC {
            return Err(data("not an item memory file (bad magic)"));
        }
        let version = u16::from_le_bytes([bytes[4], bytes[5]]);
        if version != VERSION {
            return Err(data(format!("unsupported item memory version {version}")));
        }
        let kind = match bytes[6] {
            0 => ImKind::Full,
            1 => ImKind::Compressed,
            k => return Err(data(format!("unknown item memory kind {k}"))),
        };
        if bytes[7] != 0 {
            return Err(data("reserved header byte is not zero"));
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap()) as usize;
        let cfg = HvConfig::new(u32_at(8), u32_at(12), u32_at(16))?;
        let num_channels = u32_at(20);
        if num_channels == 0 {
            return Err(data("item memory has no channels"));
        }
        let seed = u64::from_le_bytes(bytes[24..32].try_into().unwrap());
        Ok(Self {
            kind,
            cfg,
            num_channels,
            seed,
        })
    }

    /// Number of HVs in the payload.
    pub fn hv_count(&self) -> usize {
        self.num_channels * (LBP_CODES + 1)
    }

    pub fn payload_len(&self) -> usize {
        match self.kind {
            ImKind::Full => self.hv_count() * self.cfg.dimension.div_ceil(8),
            ImKind::Compressed => {
                (self.hv_count() * self.cfg.segments * self.cfg.position_bits() as usize)
                    .div_ceil(8)
            }
        }
    }
}

fn all_hvs<T>(
    num_channels: usize,
    entry: impl Fn(usize, usize) -> T,
    electrode: impl Fn(usize) -> T,
) -> Vec<T> {
    let mut v: Vec<T> = (0..num_channels)
        .flat_map(|ch| (0..LBP_CODES).map(move |code| (ch, code)))
        .map(|(ch, code)| entry(ch, code))
        .collect();
    v.extend((0..num_channels).map(electrode));
    v
}

pub fn encode_full(im: &ItemMemory) -> Vec<u8> {
    let header = ImHeader {
        kind: ImKind::Full,
        cfg: *im.cfg(),
        num_channels: im.num_channels(),
        seed: im.seed(),
    };
    let mut out = Vec::with_capacity(HEADER_LEN + header.payload_len());
    header.write(&mut out);
    let bytes_per_hv = im.cfg().dimension.div_ceil(8);
    let hvs = all_hvs(
        im.num_channels(),
        |ch, code| im.lookup(ch, code).expect("index in range"),
        |ch| im.electrode(ch).expect("index in range"),
    );
    for hv in hvs {
        let bytes: Vec<u8> = hv.words().iter().flat_map(|w| w.to_le_bytes()).collect();
        out.extend_from_slice(&bytes[..bytes_per_hv]);
    }
    out
}

pub fn decode_full(bytes: &[u8]) -> Result<ItemMemory> {
    let header = ImHeader::parse(bytes)?;
    if header.kind != ImKind::Full {
        return Err(data("expected a full item memory, found a compressed one"));
    }
    let payload = checked_payload(bytes, &header)?;
    let d = header.cfg.dimension;
    let mut hvs = payload
        .chunks_exact(d.div_ceil(8))
        .map(|chunk| {
            let words = chunk
                .chunks(8)
                .map(|w| {
                    let mut buf = [0u8; 8];
                    buf[..w.len()].copy_from_slice(w);
                    u64::from_le_bytes(buf)
                })
                .collect();
            BinaryHv::from_words(d, words)
                .map_err(|_| data("non-zero padding bits in item memory entry"))
        })
        .collect::<Result<Vec<_>>>()?;
    let electrodes = hvs.split_off(header.num_channels * LBP_CODES);
    Ok(ItemMemory::from_raw(
        header.cfg,
        header.seed,
        hvs,
        electrodes,
    )?)
}

pub fn encode_compressed(cim: &CompressedItemMemory) -> Vec<u8> {
    let header = ImHeader {
        kind: ImKind::Compressed,
        cfg: *cim.cfg(),
        num_channels: cim.num_channels(),
        seed: cim.seed(),
    };
    let mut out = Vec::with_capacity(HEADER_LEN + header.payload_len());
    header.write(&mut out);
    let bits = cim.cfg().position_bits();
    let mut writer = BitWriter::default();
    for hv in cim.entries().iter().chain(cim.electrodes()) {
        for &p in hv.positions() {
            writer.push(u64::from(p), bits);
        }
    }
    out.extend(writer.finish());
    out
}

pub fn decode_compressed(bytes: &[u8]) -> Result<CompressedItemMemory> {
    let header = ImHeader::parse(bytes)?;
    if header.kind != ImKind::Compressed {
        return Err(data("expected a compressed item memory, found a full one"));
    }
    let payload = checked_payload(bytes, &header)?;
    let bits = header.cfg.position_bits();
    let mut reader = BitReader::new(payload);
    let mut hvs = Vec::with_capacity(header.hv_count());
    for _ in 0..header.hv_count() {
        let positions = (0..header.cfg.segments)
            .map(|_| reader.pull(bits) as u16)
            .collect();
        hvs.push(AtomicSparseHv::new(positions, &header.cfg)?);
    }
    if !reader.rest_is_zero() {
        return Err(data("non-zero padding after the last position"));
    }
    let electrodes = hvs.split_off(header.num_channels * LBP_CODES);
    Ok(CompressedItemMemory::from_parts(
        header.cfg,
        header.seed,
        hvs,
        electrodes,
    )?)
}

fn checked_payload<'a>(bytes: &'a [u8], header: &ImHeader) -> Result<&'a [u8]> {
    let expected = HEADER_LEN + header.payload_len();
    if bytes.len() != expected {
        return Err(data(format!(
            "item memory file is {} bytes, header implies {expected}",
            bytes.len()
        )));
    }
    Ok(&bytes[HEADER_LEN..])
}

#[derive(Default)]
struct BitWriter {
    bytes: Vec<u8>,
    acc: u64,
    filled: u32,
}

impl BitWriter {
    fn push(&mut self, value: u64, bits: u32) {
        self.acc |= value << self.filled;
        self.filled += bits;
        while self.filled >= 8 {
            self.bytes.push(self.acc as u8);
            self.acc >>= 8;
            self.filled -= 8;
        }
    }

    fn finish(mut self) -> Vec<u8> {
        if self.filled > 0 {
            self.bytes.push(self.acc as u8);
        }
        self.bytes
    }
}

struct BitReader<'a> {
    bytes: &'a [u8],
    bit: usize,
}

impl<'a> BitReader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, bit: 0 }
    }

    fn pull(&mut self, bits: u32) -> u64 {
        let mut v = 0u64;
        for k in 0..bits as usize {
            let b = self.bit + k;
            v |= u64::from((self.bytes[b / 8] >> (b % 8)) & 1) << k;
        }
        self.bit += bits as usize;
        v
    }

    fn rest_is_zero(&self) -> bool {
        (self.bit..self.bytes.len() * 8).all(|b| (self.bytes[b / 8] >> (b % 8)) & 1 == 0)
    }
}

/// Human-readable dump of a compressed IM.
#[derive(Debug, Serialize)]
pub struct ImDump<'a> {
    pub seed: u64,
    pub dimension: usize,
    pub segments: usize,
    pub segment_length: usize,
    pub num_channels: usize,
    /// `entries[channel][code]` = one position per segment.
    pub entries: Vec<Vec<&'a [u16]>>,
    pub electrodes: Vec<&'a [u16]>,
}

pub fn json_dump(cim: &CompressedItemMemory) -> String {
    let dump = ImDump {
        seed: cim.seed(),
        dimension: cim.cfg().dimension,
        segments: cim.cfg().segments,
        segment_length: cim.cfg().segment_length,
        num_channels: cim.num_channels(),
        entries: cim
            .entries()
            .chunks(LBP_CODES)
            .map(|ch| ch.iter().map(|hv| hv.positions()).collect())
            .collect(),
        electrodes: cim.electrodes().iter().map(|hv| hv.positions()).collect(),
    };
    serde_json::to_string_pretty(&dump).expect("dump serializes")
}

pub fn read_full(path: &Path) -> Result<ItemMemory> {
    decode_full(&std::fs::read(path).map_err(CliError::io(path))?)
}

pub fn read_compressed(path: &Path) -> Result<CompressedItemMemory> {
    decode_compressed(&std::fs::read(path).map_err(CliError::io(path))?)
}

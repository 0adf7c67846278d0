//! Hypervector types and bitwise HDC kernels.
//!
//! A [`BinaryHv`] is a packed bit string. Bit `i` lives in word `i / 64` at
//! position `i % 64`; with an [`HvConfig`] attached, segment `s` covers bits
//! `[s * L, (s + 1) * L)`.
//!
//! Segmented shift binding rotates every segment of the shiftee by the 1-bit
//! position of the matching segment of the shifter. A bit at in-segment index
//! `j` moves to `(j + k) mod L`; position arithmetic uses the same direction,
//! so the barrel-shifter path and the position path agree bit for bit.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_dims, invalid, HdcError, Result};

/// Geometry of a segmented sparse hypervector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HvConfig {
    pub dimension: usize,
    pub segments: usize,
    pub segment_length: usize,
}

impl Default for HvConfig {
    fn default() -> Self {
        Self {
            dimension: 1024,
            segments: 8,
            segment_length: 128,
        }
    }
}

impl HvConfig {
    /// Largest supported segment length; positions are stored as `u16`.
    pub const MAX_SEGMENT_LENGTH: usize = 1 << 16;

    pub fn new(dimension: usize, segments: usize, segment_length: usize) -> Result<Self> {
        let cfg = Self {
            dimension,
            segments,
            segment_length,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.segments == 0 || self.segment_length == 0 {
            return Err(invalid("segments and segment length must be positive"));
        }
        if self.segment_length > Self::MAX_SEGMENT_LENGTH {
            return Err(invalid("segment length exceeds 65536"));
        }
        if self.segments.checked_mul(self.segment_length) != Some(self.dimension) {
            return Err(invalid("dimension must equal segments x segment length"));
        }
        Ok(())
    }

    /// Bits needed to store one in-segment position (7 for L = 128).
    pub fn position_bits(&self) -> u32 {
        usize::BITS - (self.segment_length - 1).leading_zeros()
    }

    /// Payload of one compressed atomic HV: `S * position_bits`.
    pub fn atomic_payload_bits(&self) -> usize {
        self.segments * self.position_bits() as usize
    }

    /// Atomic density `S / D`.
    pub fn atomic_density(&self) -> f64 {
        self.segments as f64 / self.dimension as f64
    }
}

/// Flat binary hypervector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BinaryHv {
    len: usize,
    words: Vec<u64>,
}

impl BinaryHv {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut hv = Self {
            len,
            words: vec![u64::MAX; len.div_ceil(64)],
        };
        hv.clear_tail();
        hv
    }

    /// Builds a vector with the listed bits set. Duplicates are allowed.
    pub fn from_indices(len: usize, indices: &[usize]) -> Result<Self> {
        let mut hv = Self::zeros(len);
        for &i in indices {
            if i >= len {
                return Err(invalid("bit index out of range"));
            }
            hv.set(i, true);
        }
        Ok(hv)
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut hv = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                hv.set(i, true);
            }
        }
        hv
    }

    /// Wraps packed words; bits past `len` must be zero.
    pub fn from_words(len: usize, words: Vec<u64>) -> Result<Self> {
        if words.len() != len.div_ceil(64) {
            return Err(invalid("word count does not match bit length"));
        }
        let hv = Self { len, words };
        let mut check = hv.clone();
        check.clear_tail();
        if check != hv {
            return Err(invalid("bits set beyond vector length"));
        }
        Ok(hv)
    }

    fn clear_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(
            i < self.len,
            "bit index {i} out of range for {} bits",
            self.len
        );
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(
            i < self.len,
            "bit index {i} out of range for {} bits",
            self.len
        );
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn density(&self) -> f64 {
        if self.len == 0 {
            0.0
        } else {
            f64::from(self.count_ones()) / self.len as f64
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Indices of the 1-bits in ascending order.
    pub fn iter_ones(&self) -> Ones<'_> {
        Ones {
            words: &self.words,
            index: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    /// Indices of the 1-bits inside `[start, end)`.
    pub fn ones_in_range(&self, start: usize, end: usize) -> impl Iterator<Item = usize> + '_ {
        debug_assert!(start <= end && end <= self.len);
        let first = start / 64;
        let last = end.div_ceil(64);
        (first..last).flat_map(move |w| {
            let mut word = self.words[w];
            let base = w * 64;
            if base < start {
                word &= u64::MAX << (start - base);
            }
            if base + 64 > end {
                let keep = end - base;
                word &= if keep == 64 {
                    u64::MAX
                } else {
                    (1u64 << keep) - 1
                };
            }
            BitIter { word, base }
        })
    }

    pub fn or_assign(&mut self, other: &BinaryHv) -> Result<()> {
        check_dims(self.len, other.len)?;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
        Ok(())
    }

    pub fn and(&self, other: &BinaryHv) -> Result<BinaryHv> {
        check_dims(self.len, other.len)?;
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a & b)
            .collect();
        Ok(Self {
            len: self.len,
            words,
        })
    }

    pub fn xor(&self, other: &BinaryHv) -> Result<BinaryHv> {
        check_dims(self.len, other.len)?;
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a ^ b)
            .collect();
        Ok(Self {
            len: self.len,
            words,
        })
    }

    pub fn not(&self) -> BinaryHv {
        let mut hv = Self {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        hv.clear_tail();
        hv
    }

    /// In-segment index of the single 1-bit of every segment.
    pub fn one_hot_decode(&self, cfg: &HvConfig) -> Result<AtomicSparseHv> {
        one_hot_decode(self, cfg)
    }
}

pub struct Ones<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl Iterator for Ones<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.index * 64 + bit);
            }
            self.index += 1;
            self.current = *self.words.get(self.index)?;
        }
    }
}

struct BitIter {
    word: u64,
    base: usize,
}

impl Iterator for BitIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.word == 0 {
            return None;
        }
        let bit = self.word.trailing_zeros() as usize;
        self.word &= self.word - 1;
        Some(self.base + bit)
    }
}

/// Atomic sparse HV stored as one in-segment position per segment.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct AtomicSparseHv {
    positions: Vec<u16>,
}

impl AtomicSparseHv {
    pub fn new(positions: Vec<u16>, cfg: &HvConfig) -> Result<Self> {
        let hv = Self { positions };
        hv.validate(cfg)?;
        Ok(hv)
    }

    /// The identity for binding: every position zero.
    pub fn zero(cfg: &HvConfig) -> Self {
        Self {
            positions: vec![0; cfg.segments],
        }
    }

    pub(crate) fn from_positions_unchecked(positions: Vec<u16>) -> Self {
        Self { positions }
    }

    pub fn validate(&self, cfg: &HvConfig) -> Result<()> {
        if self.positions.len() != cfg.segments {
            return Err(invalid("atomic HV must carry one position per segment"));
        }
        if self
            .positions
            .iter()
            .any(|&p| usize::from(p) >= cfg.segment_length)
        {
            return Err(invalid("atomic position outside its segment"));
        }
        Ok(())
    }

    #[inline]
    pub fn positions(&self) -> &[u16] {
        &self.positions
    }

    pub fn to_binary(&self, cfg: &HvConfig) -> Result<BinaryHv> {
        atomic_to_binary(self, cfg)
    }

    /// Positions packed LSB-first, `position_bits` per segment.
    pub fn packed_words(&self, cfg: &HvConfig) -> Vec<u64> {
        let bits = cfg.position_bits() as usize;
        let mut out = vec![0u64; (bits * self.positions.len()).div_ceil(64).max(1)];
        for (s, &p) in self.positions.iter().enumerate() {
            for b in 0..bits {
                if (p >> b) & 1 == 1 {
                    let i = s * bits + b;
                    out[i / 64] |= 1 << (i % 64);
                }
            }
        }
        out
    }
}

/// Expands positions into a one-hot-per-segment binary HV.
pub fn atomic_to_binary(hv: &AtomicSparseHv, cfg: &HvConfig) -> Result<BinaryHv> {
    hv.validate(cfg)?;
    let mut out = BinaryHv::zeros(cfg.dimension);
    for (s, &p) in hv.positions.iter().enumerate() {
        out.set(s * cfg.segment_length + usize::from(p), true);
    }
    Ok(out)
}

/// One-hot to binary decoding per segment; the inverse of [`atomic_to_binary`].
pub fn one_hot_decode(hv: &BinaryHv, cfg: &HvConfig) -> Result<AtomicSparseHv> {
    check_dims(cfg.dimension, hv.len())?;
    let l = cfg.segment_length;
    let mut positions = Vec::with_capacity(cfg.segments);
    for s in 0..cfg.segments {
        let mut ones = hv.ones_in_range(s * l, (s + 1) * l);
        match (ones.next(), ones.next()) {
            (Some(i), None) => positions.push((i - s * l) as u16),
            (None, _) => {
                return Err(HdcError::MalformedAtomic {
                    segment: s,
                    ones: 0,
                })
            }
            (Some(_), Some(_)) => {
                let ones = 2 + ones.count() as u32;
                return Err(HdcError::MalformedAtomic { segment: s, ones });
            }
        }
    }
    Ok(AtomicSparseHv { positions })
}

/// Segmented shift binding in position form: `(a + b) mod L` per segment.
pub fn segmented_shift_bind_positions(
    shiftee: &AtomicSparseHv,
    shifter: &AtomicSparseHv,
    cfg: &HvConfig,
) -> Result<AtomicSparseHv> {
    shiftee.validate(cfg)?;
    shifter.validate(cfg)?;
    let l = cfg.segment_length as u32;
    let positions = shiftee
        .positions
        .iter()
        .zip(&shifter.positions)
        .map(|(&a, &b)| ((u32::from(a) + u32::from(b)) % l) as u16)
        .collect();
    Ok(AtomicSparseHv { positions })
}

/// Inverse of [`segmented_shift_bind_positions`]: `(a - b) mod L` per segment.
pub fn segmented_unbind_positions(
    bound: &AtomicSparseHv,
    shifter: &AtomicSparseHv,
    cfg: &HvConfig,
) -> Result<AtomicSparseHv> {
    bound.validate(cfg)?;
    shifter.validate(cfg)?;
    let l = cfg.segment_length as u32;
    let positions = bound
        .positions
        .iter()
        .zip(&shifter.positions)
        .map(|(&a, &b)| ((u32::from(a) + l - u32::from(b)) % l) as u16)
        .collect();
    Ok(AtomicSparseHv { positions })
}

fn check_shifts(shifts: &[u16], cfg: &HvConfig) -> Result<()> {
    if shifts.len() != cfg.segments {
        return Err(invalid("one shift amount per segment required"));
    }
    if shifts.iter().any(|&k| usize::from(k) >= cfg.segment_length) {
        return Err(invalid("shift amount must be below the segment length"));
    }
    Ok(())
}

fn rotate_segment(src: &BinaryHv, dst: &mut BinaryHv, segment: usize, l: usize, k: usize) {
    let start = segment * l;
    if l % 64 == 0 {
        // word-aligned segments rotate whole words
        let m = l / 64;
        let (q, r) = ((k / 64) % m, k % 64);
        let first = start / 64;
        let input = &src.words[first..first + m];
        for (i, out) in dst.words[first..first + m].iter_mut().enumerate() {
            let lo = input[(i + m - q) % m];
            *out |= if r == 0 {
                lo
            } else {
                (lo << r) | (input[(i + 2 * m - q - 1) % m] >> (64 - r))
            };
        }
        return;
    }
    for i in src.ones_in_range(start, start + l) {
        dst.set(start + (i - start + k) % l, true);
    }
}

/// Barrel-shifter form of segmented shift binding.
///
/// Segment `s` of `shiftee` is rotated by `shifts[s]` toward higher indices.
/// Works for arbitrary (not only atomic) shiftees. Equal to the output of
/// [`barrel_shift_stages`], computed in one rotation per segment.
pub fn segmented_shift_bind_barrel(
    shiftee: &BinaryHv,
    shifts: &[u16],
    cfg: &HvConfig,
) -> Result<BinaryHv> {
    check_dims(cfg.dimension, shiftee.len())?;
    check_shifts(shifts, cfg)?;
    let mut out = BinaryHv::zeros(cfg.dimension);
    for (s, &k) in shifts.iter().enumerate() {
        rotate_segment(shiftee, &mut out, s, cfg.segment_length, usize::from(k));
    }
    Ok(out)
}

/// Runs the barrel shifter one mux stage at a time.
///
/// Stage `k` rotates the segments whose shift amount has bit `k` set by
/// `2^k`; `on_stage(k, output)` sees every stage output, including the last.
pub fn barrel_shift_stages(
    shiftee: &BinaryHv,
    shifts: &[u16],
    cfg: &HvConfig,
    mut on_stage: impl FnMut(u32, &BinaryHv),
) -> Result<BinaryHv> {
    check_dims(cfg.dimension, shiftee.len())?;
    check_shifts(shifts, cfg)?;
    let l = cfg.segment_length;
    let mut current = shiftee.clone();
    let mut next = BinaryHv::zeros(cfg.dimension);
    for stage in 0..cfg.position_bits() {
        let amount = 1usize << stage;
        if shifts.iter().any(|&k| (k >> stage) & 1 == 1) {
            next.words.fill(0);
            for (s, &k) in shifts.iter().enumerate() {
                let by = if (k >> stage) & 1 == 1 { amount } else { 0 };
                rotate_segment(&current, &mut next, s, l, by);
            }
            core::mem::swap(&mut current, &mut next);
        }
        on_stage(stage, &current);
    }
    Ok(current)
}

/// Per-element counts of many binary HVs, stored bit-sliced.
///
/// Plane `p` holds bit `p` of every counter, so adding one HV is a ripple
/// carry over whole words and thresholding is a word-parallel comparison.
#[derive(Debug, Clone)]
pub struct BitSlicedCounter {
    len: usize,
    planes: Vec<Vec<u64>>,
    added: usize,
}

impl BitSlicedCounter {
    /// Counter able to hold up to `max_count` additions without overflow.
    pub fn new(len: usize, max_count: usize) -> Self {
        let bits = (usize::BITS - max_count.leading_zeros()).max(1) as usize;
        Self {
            len,
            planes: vec![vec![0; len.div_ceil(64)]; bits],
            added: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn added(&self) -> usize {
        self.added
    }

    pub fn planes(&self) -> &[Vec<u64>] {
        &self.planes
    }

    pub fn add(&mut self, hv: &BinaryHv) -> Result<()> {
        check_dims(self.len, hv.len())?;
        if self.added + 1 >= 1usize << self.planes.len() {
            return Err(HdcError::InvalidState("bit-sliced counter full".into()));
        }
        for (w, &word) in hv.words().iter().enumerate() {
            let mut carry = word;
            for plane in &mut self.planes {
                if carry == 0 {
                    break;
                }
                let sum = plane[w] ^ carry;
                carry &= plane[w];
                plane[w] = sum;
            }
        }
        self.added += 1;
        Ok(())
    }

    pub fn count(&self, i: usize) -> u32 {
        self.planes
            .iter()
            .enumerate()
            .map(|(p, plane)| (((plane[i / 64] >> (i % 64)) & 1) as u32) << p)
            .sum()
    }

    /// Bit `i` set iff `count(i) >= threshold`.
    pub fn at_least(&self, threshold: u32) -> BinaryHv {
        if threshold == 0 {
            return BinaryHv::ones(self.len);
        }
        if u64::from(threshold) >= 1u64 << self.planes.len() {
            return BinaryHv::zeros(self.len);
        }
        let words = (0..self.len.div_ceil(64))
            .map(|w| {
                let mut gt = 0u64;
                let mut eq = u64::MAX;
                for (p, plane) in self.planes.iter().enumerate().rev() {
                    if (threshold >> p) & 1 == 1 {
                        eq &= plane[w];
                    } else {
                        gt |= eq & plane[w];
                        eq &= !plane[w];
                    }
                }
                gt | eq
            })
            .collect();
        let mut hv = BinaryHv {
            len: self.len,
            words,
        };
        hv.clear_tail();
        hv
    }
}

fn common_len(hvs: &[BinaryHv]) -> Result<usize> {
    let first = hvs
        .first()
        .ok_or_else(|| invalid("cannot bundle an empty list"))?;
    for hv in hvs {
        check_dims(first.len(), hv.len())?;
    }
    Ok(first.len())
}

/// Adder-tree bundling with thinning: bit `i` set iff at least `threshold`
/// inputs have bit `i` set.
pub fn bundle_threshold(hvs: &[BinaryHv], threshold: u32) -> Result<BinaryHv> {
    Ok(bundle_counts(hvs)?.at_least(threshold))
}

/// Column counts of a bundle, before thinning.
pub fn bundle_counts(hvs: &[BinaryHv]) -> Result<BitSlicedCounter> {
    let len = common_len(hvs)?;
    let mut counter = BitSlicedCounter::new(len, hvs.len());
    for hv in hvs {
        counter.add(hv)?;
    }
    Ok(counter)
}

/// OR-tree bundling without thinning.
pub fn bundle_or(hvs: &[BinaryHv]) -> Result<BinaryHv> {
    let len = common_len(hvs)?;
    let mut out = BinaryHv::zeros(len);
    for hv in hvs {
        out.or_assign(hv)?;
    }
    Ok(out)
}

/// Saturating 8-bit counters, the temporal encoder state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccumulatorHv {
    counts: Vec<u8>,
}

impl AccumulatorHv {
    pub fn new(len: usize) -> Self {
        Self {
            counts: vec![0; len],
        }
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn counts(&self) -> &[u8] {
        &self.counts
    }

    /// Adds one binary HV; returns the number of register bits that toggled.
    pub fn accumulate(&mut self, hv: &BinaryHv) -> Result<u64> {
        check_dims(self.counts.len(), hv.len())?;
        let mut toggles = 0u64;
        for i in hv.iter_ones() {
            let old = self.counts[i];
            let new = old.saturating_add(1);
            toggles += u64::from((old ^ new).count_ones());
            self.counts[i] = new;
        }
        Ok(toggles)
    }

    /// Bit `i` set iff `counts[i] >= threshold`. Thresholds above 255 can
    /// never be met and give the all-zero HV.
    pub fn thin(&self, threshold: u32) -> Result<BinaryHv> {
        if threshold == 0 {
            return Err(invalid("thinning threshold must be at least 1"));
        }
        let mut out = BinaryHv::zeros(self.counts.len());
        for (i, &c) in self.counts.iter().enumerate() {
            if u32::from(c) >= threshold {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    /// Clears all counters; returns the number of register bits that toggled.
    pub fn reset(&mut self) -> u64 {
        let toggles = self.counts.iter().map(|c| u64::from(c.count_ones())).sum();
        self.counts.iter_mut().for_each(|c| *c = 0);
        toggles
    }
}

/// Overlap similarity: `popcount(a AND b)`.
pub fn overlap_similarity(a: &BinaryHv, b: &BinaryHv) -> Result<u32> {
    check_dims(a.len(), b.len())?;
    Ok(a.words()
        .iter()
        .zip(b.words())
        .map(|(x, y)| (x & y).count_ones())
        .sum())
}

/// `popcount(a XOR b)`.
pub fn hamming_distance(a: &BinaryHv, b: &BinaryHv) -> Result<u32> {
    check_dims(a.len(), b.len())?;
    Ok(a.words()
        .iter()
        .zip(b.words())
        .map(|(x, y)| (x ^ y).count_ones())
        .sum())
}

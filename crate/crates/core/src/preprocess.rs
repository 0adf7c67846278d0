//! Local binary pattern (LBP) coding of raw samples.
//!
//! A code summarizes the last 7 samples of a channel: bit `k` (LSB = oldest
//! pair) is 1 iff `sample[k + 1] > sample[k]`. Equal samples encode 0. Only
//! strict integer comparisons are used, so codes are invariant under any
//! increasing affine rescaling of the input.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_dims, invalid, Result};

/// Samples per window; 6 consecutive pairs give a 6-bit code.
pub const WINDOW: usize = 7;

/// Samples consumed before the first code is available.
pub const WARMUP: usize = WINDOW - 1;

/// Code of 7 consecutive samples, oldest first.
pub fn lbp_code(window: &[i16; WINDOW]) -> u8 {
    window.windows(2).enumerate().fold(0u8, |code, (k, pair)| {
        code | (u8::from(pair[1] > pair[0]) << k)
    })
}

/// Ring buffers of the 7 most recent samples of every channel.
#[derive(Debug, Clone)]
pub struct SampleWindow {
    num_channels: usize,
    ring: Vec<i16>,
    head: usize,
    seen: usize,
}

impl SampleWindow {
    pub fn new(num_channels: usize) -> Self {
        Self {
            num_channels,
            ring: vec![0; num_channels * WINDOW],
            head: 0,
            seen: 0,
        }
    }

    pub fn num_channels(&self) -> usize {
        self.num_channels
    }

    /// True once every channel has seen 7 samples.
    pub fn is_warm(&self) -> bool {
        self.seen >= WINDOW
    }

    pub fn samples_seen(&self) -> usize {
        self.seen
    }

    /// Appends one sample per channel.
    pub fn push(&mut self, samples: &[i16]) -> Result<()> {
        check_dims(self.num_channels, samples.len())?;
        for (ch, &s) in samples.iter().enumerate() {
            self.ring[ch * WINDOW + self.head] = s;
        }
        self.head = (self.head + 1) % WINDOW;
        self.seen += 1;
        Ok(())
    }

    /// The window of `channel`, oldest sample first.
    pub fn window(&self, channel: usize) -> Option<[i16; WINDOW]> {
        if channel >= self.num_channels || !self.is_warm() {
            return None;
        }
        let base = channel * WINDOW;
        Some(core::array::from_fn(|i| {
            self.ring[base + (self.head + i) % WINDOW]
        }))
    }

    /// Current LBP code of `channel`; `Ok(None)` until the window is warm.
    pub fn lbp_encode(&self, channel: usize) -> Result<Option<u8>> {
        if channel >= self.num_channels {
            return Err(invalid("channel index out of range"));
        }
        Ok(self.window(channel).map(|w| lbp_code(&w)))
    }

    /// Pushes one sample per channel and, once warm, writes every channel's
    /// code into `codes`. Returns whether codes were produced.
    pub fn push_and_encode(&mut self, samples: &[i16], codes: &mut [u8]) -> Result<bool> {
        check_dims(self.num_channels, codes.len())?;
        self.push(samples)?;
        if !self.is_warm() {
            return Ok(false);
        }
        for (ch, code) in codes.iter_mut().enumerate() {
            let base = ch * WINDOW;
            let w: [i16; WINDOW] =
                core::array::from_fn(|i| self.ring[base + (self.head + i) % WINDOW]);
            *code = lbp_code(&w);
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monotone_and_constant() {
        assert_eq!(lbp_code(&[1, 2, 3, 4, 5, 6, 7]), 63);
        assert_eq!(lbp_code(&[5; 7]), 0);
        assert_eq!(lbp_code(&[7, 6, 5, 4, 3, 2, 1]), 0);
    }

    #[test]
    fn mixed_window() {
        // 1>3 no, 4>1 yes, 1>4 no, 5>1 yes, 9>5 yes, 2>9 no
        assert_eq!(lbp_code(&[3, 1, 4, 1, 5, 9, 2]), 0b011010);
    }

    #[test]
    fn warmup_then_one_code_per_sample() {
        let mut w = SampleWindow::new(2);
        let mut codes = [0u8; 2];
        for t in 0..6 {
            assert!(!w.push_and_encode(&[t, -t], &mut codes).unwrap());
            assert_eq!(w.lbp_encode(0).unwrap(), None);
        }
        assert!(w.push_and_encode(&[6, -6], &mut codes).unwrap());
        assert_eq!(codes, [63, 0]);
        assert_eq!(w.lbp_encode(1).unwrap(), Some(0));
        assert!(w.lbp_encode(2).is_err());
        assert!(w.push(&[1]).is_err());
    }

    #[test]
    fn ring_keeps_the_latest_seven() {
        let mut w = SampleWindow::new(1);
        for s in [9, 9, 3, 1, 4, 1, 5, 9, 2] {
            w.push(&[s]).unwrap();
        }
        assert_eq!(w.window(0), Some([3, 1, 4, 1, 5, 9, 2]));
    }
}

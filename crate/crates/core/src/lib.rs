//! Sparse hyperdimensional computing (HDC) classifier for multi-channel iEEG
//! seizure detection.
//!
//! The crate is `no_std` (it needs `alloc`) and holds the algorithmic core:
//!
//! - [`hv`]: hypervector types and the bitwise binding, bundling, thinning and
//!   similarity kernels, in both the baseline (one-hot/barrel-shifter/adder-tree)
//!   and optimized (position arithmetic/OR-tree) forms.
//! - [`item_memory`]: seeded item memories, the compressed item memory that
//!   stores only 1-bit positions, and their packed binary encoding.
//! - [`preprocess`]: 6-bit local binary pattern (LBP) codes from raw samples.
//! - [`pipeline`]: spatial and temporal encoders, the associative memory,
//!   one-shot training, streaming inference, detection metrics and the
//!   maximum-density sweep.
//! - [`dense`]: a dense (50% density, XOR/majority) reference pipeline.
//! - [`cost`]: switching-activity counting and gate-equivalent area proxies.
//!
//! File IO, the synthetic data generator and the command line live in the
//! `sparse-hdc-cli` crate.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod cost;
pub mod dense;
mod error;
pub mod hv;
pub mod item_memory;
pub mod pipeline;
pub mod preprocess;
mod rng;

pub use error::{HdcError, Result};
pub use hv::{AccumulatorHv, AtomicSparseHv, BinaryHv, HvConfig};
pub use item_memory::{CompressedItemMemory, ItemMemory};
pub use pipeline::{
    AssociativeMemory, DetectionReport, FramePrediction, Label, PipelineConfig, Recording, Variant,
};

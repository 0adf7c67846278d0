use alloc::vec;
use alloc::vec::Vec;

use crate::cost::{Module, NoProbe, Probe, ProbePoint};
use crate::dense::{xor_bind, DenseItemMemory};
use crate::error::{check_dims, invalid, Result};
use crate::hv::{
    atomic_to_binary, barrel_shift_stages, bundle_counts, one_hot_decode,
    segmented_shift_bind_barrel, segmented_shift_bind_positions, AccumulatorHv, BinaryHv,
};
use crate::item_memory::{CompressedItemMemory, ItemMemory, LBP_CODES};
use crate::pipeline::{PipelineConfig, Recording, Variant};
use crate::preprocess::{SampleWindow, WARMUP};

/// The item memory flavour each variant reads from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VariantMemory {
    Baseline(ItemMemory),
    Optimized(CompressedItemMemory),
    Dense(DenseItemMemory),
}

impl VariantMemory {
    pub fn generate(variant: Variant, seed: u64, cfg: &PipelineConfig) -> Result<Self> {
        Ok(match variant {
            Variant::SparseBaseline => {
                Self::Baseline(ItemMemory::generate(seed, cfg.num_channels, cfg.hv)?)
            }
            Variant::SparseOptimized => Self::Optimized(CompressedItemMemory::generate(
                seed,
                cfg.num_channels,
                cfg.hv,
            )?),
            Variant::Dense => Self::Dense(DenseItemMemory::generate(
                seed,
                cfg.num_channels,
                cfg.hv.dimension,
            )?),
        })
    }

    /// Converts a sparse memory to the representation `variant` expects.
    pub fn from_compressed(variant: Variant, cim: &CompressedItemMemory) -> Result<Self> {
        match variant {
            Variant::SparseBaseline => Ok(Self::Baseline(cim.expand()?)),
            Variant::SparseOptimized => Ok(Self::Optimized(cim.clone())),
            Variant::Dense => Err(invalid("dense variant cannot use a sparse item memory")),
        }
    }

    pub fn variant(&self) -> Variant {
        match self {
            Self::Baseline(_) => Variant::SparseBaseline,
            Self::Optimized(_) => Variant::SparseOptimized,
            Self::Dense(_) => Variant::Dense,
        }
    }

    pub fn num_channels(&self) -> usize {
        match self {
            Self::Baseline(m) => m.num_channels(),
            Self::Optimized(m) => m.num_channels(),
            Self::Dense(m) => m.num_channels(),
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            Self::Baseline(m) => m.seed(),
            Self::Optimized(m) => m.seed(),
            Self::Dense(m) => m.seed(),
        }
    }
}

/// Pipeline configuration bound to a matching item memory.
#[derive(Debug, Clone)]
pub struct Encoder {
    cfg: PipelineConfig,
    memory: VariantMemory,
}

impl Encoder {
    pub fn new(cfg: PipelineConfig, memory: VariantMemory) -> Result<Self> {
        cfg.validate()?;
        if memory.variant() != cfg.variant {
            return Err(invalid("item memory flavour does not match the variant"));
        }
        if memory.num_channels() != cfg.num_channels {
            return Err(invalid(
                "item memory channel count does not match the config",
            ));
        }
        let geometry_ok = match &memory {
            VariantMemory::Baseline(m) => *m.cfg() == cfg.hv,
            VariantMemory::Optimized(m) => *m.cfg() == cfg.hv,
            VariantMemory::Dense(m) => m.dimension() == cfg.hv.dimension,
        };
        if !geometry_ok {
            return Err(invalid("item memory geometry does not match the config"));
        }
        Ok(Self { cfg, memory })
    }

    pub fn generate(cfg: PipelineConfig, seed: u64) -> Result<Self> {
        cfg.validate()?;
        Self::new(cfg, VariantMemory::generate(cfg.variant, seed, &cfg)?)
    }

    pub fn cfg(&self) -> &PipelineConfig {
        &self.cfg
    }

    pub fn memory(&self) -> &VariantMemory {
        &self.memory
    }

    /// Spatial encoding of one cycle: bind every channel's code HV with its
    /// electrode HV, then bundle across channels.
    pub fn spatial_encode(&self, codes: &[u8]) -> Result<BinaryHv> {
        self.spatial_encode_probed(codes, &mut NoProbe)
    }

    pub fn spatial_encode_probed<P: Probe>(&self, codes: &[u8], probe: &mut P) -> Result<BinaryHv> {
        check_dims(self.cfg.num_channels, codes.len())?;
        if codes.iter().any(|&c| usize::from(c) >= LBP_CODES) {
            return Err(invalid("LBP code must be below 64"));
        }
        let hv = &self.cfg.hv;
        match &self.memory {
            VariantMemory::Baseline(im) => {
                let mut bound = Vec::with_capacity(codes.len());
                for (ch, &code) in codes.iter().enumerate() {
                    let item = im.lookup(ch, usize::from(code))?;
                    let positions = one_hot_decode(item, hv)?;
                    let electrode = im.electrode(ch)?;
                    let out = if P::ENABLED {
                        probe.observe(ProbePoint::ItemOutput, ch, item.words());
                        probe.observe(ProbePoint::OneHotDecoder, ch, &positions.packed_words(hv));
                        barrel_shift_stages(electrode, positions.positions(), hv, |k, stage| {
                            probe.observe(ProbePoint::BarrelStage(k), ch, stage.words())
                        })?
                    } else {
                        segmented_shift_bind_barrel(electrode, positions.positions(), hv)?
                    };
                    bound.push(out);
                }
                let counts = bundle_counts(&bound)?;
                let threshold = self
                    .cfg
                    .spatial_threshold
                    .ok_or_else(|| invalid("baseline variant needs a spatial threshold"))?;
                let out = counts.at_least(threshold);
                if P::ENABLED {
                    for (p, plane) in counts.planes().iter().enumerate() {
                        probe.observe(ProbePoint::SpatialCounts, p, plane);
                    }
                    probe.observe(ProbePoint::SpatialOutput, 0, out.words());
                }
                Ok(out)
            }
            VariantMemory::Optimized(cim) => {
                let mut out = BinaryHv::zeros(hv.dimension);
                for (ch, &code) in codes.iter().enumerate() {
                    let item = cim.lookup_compressed(ch, usize::from(code))?;
                    let electrode = cim.electrode(ch)?;
                    if P::ENABLED {
                        let bound = segmented_shift_bind_positions(electrode, item, hv)?;
                        let one_hot = atomic_to_binary(&bound, hv)?;
                        probe.observe(ProbePoint::ItemOutput, ch, &item.packed_words(hv));
                        probe.observe(ProbePoint::PositionAdder, ch, &bound.packed_words(hv));
                        probe.observe(ProbePoint::BoundHv, ch, one_hot.words());
                        out.or_assign(&one_hot)?;
                    } else {
                        let l = hv.segment_length;
                        for (s, (&e, &p)) in electrode
                            .positions()
                            .iter()
                            .zip(item.positions())
                            .enumerate()
                        {
                            out.set(s * l + (usize::from(e) + usize::from(p)) % l, true);
                        }
                    }
                }
                if P::ENABLED {
                    probe.observe(ProbePoint::SpatialOutput, 0, out.words());
                }
                Ok(out)
            }
            VariantMemory::Dense(dim) => {
                let mut bound = Vec::with_capacity(codes.len());
                for (ch, &code) in codes.iter().enumerate() {
                    let item = dim.lookup(ch, usize::from(code))?;
                    let out = xor_bind(dim.electrode(ch)?, item)?;
                    if P::ENABLED {
                        probe.observe(ProbePoint::ItemOutput, ch, item.words());
                        probe.observe(ProbePoint::BoundHv, ch, out.words());
                    }
                    bound.push(out);
                }
                let counts = bundle_counts(&bound)?;
                let out = counts.at_least((bound.len() / 2 + 1) as u32);
                if P::ENABLED {
                    for (p, plane) in counts.planes().iter().enumerate() {
                        probe.observe(ProbePoint::SpatialCounts, p, plane);
                    }
                    probe.observe(ProbePoint::SpatialOutput, 0, out.words());
                }
                Ok(out)
            }
        }
    }
}

/// Free-function form of [`Encoder::spatial_encode`].
pub fn spatial_encode(
    codes: &[u8],
    memory: &VariantMemory,
    cfg: &PipelineConfig,
) -> Result<BinaryHv> {
    Encoder::new(*cfg, memory.clone())?.spatial_encode(codes)
}

/// Accumulates exactly `frame_length` spatial HVs and thins at the temporal
/// threshold.
pub fn temporal_encode(frame: &[BinaryHv], cfg: &PipelineConfig) -> Result<BinaryHv> {
    if frame.len() != cfg.frame_length {
        return Err(invalid("temporal frame must hold exactly frame_length HVs"));
    }
    let mut acc = AccumulatorHv::new(cfg.hv.dimension);
    for hv in frame {
        acc.accumulate(hv)?;
    }
    acc.thin(cfg.temporal_threshold)
}

/// Temporal accumulator state at the end of one frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameRecord {
    pub index: usize,
    pub start_sample: u64,
    pub end_sample: u64,
    pub accumulator: AccumulatorHv,
}

/// Streams a recording through LBP coding, spatial encoding and temporal
/// accumulation. Frames are contiguous and start at the first warm sample;
/// a trailing partial frame is dropped.
pub fn encode_recording<P: Probe>(
    encoder: &Encoder,
    recording: &Recording,
    probe: &mut P,
) -> Result<Vec<FrameRecord>> {
    let cfg = encoder.cfg();
    check_dims(cfg.num_channels, recording.num_channels())?;
    if recording.frame_count(cfg.frame_length) == 0 {
        return Err(invalid("recording is shorter than one frame"));
    }
    let mut window = SampleWindow::new(cfg.num_channels);
    let mut samples = vec![0i16; cfg.num_channels];
    let mut codes = vec![0u8; cfg.num_channels];
    let mut acc = AccumulatorHv::new(cfg.hv.dimension);
    let mut frames = Vec::with_capacity(recording.frame_count(cfg.frame_length));
    let mut cycle = 0usize;
    for t in 0..recording.num_samples() {
        recording.samples_at(t, &mut samples);
        if !window.push_and_encode(&samples, &mut codes)? {
            continue;
        }
        let spatial = encoder.spatial_encode_probed(&codes, probe)?;
        let toggles = acc.accumulate(&spatial)?;
        if P::ENABLED {
            probe.add_toggles(Module::TemporalBundle, toggles);
        }
        cycle += 1;
        if cycle == cfg.frame_length {
            let index = frames.len();
            let start = (WARMUP + index * cfg.frame_length) as u64;
            frames.push(FrameRecord {
                index,
                start_sample: start,
                end_sample: start + cfg.frame_length as u64,
                accumulator: acc.clone(),
            });
            let toggles = acc.reset();
            if P::ENABLED {
                probe.add_toggles(Module::TemporalBundle, toggles);
            }
            cycle = 0;
        }
        if P::ENABLED {
            probe.end_cycle();
        }
    }
    Ok(frames)
}

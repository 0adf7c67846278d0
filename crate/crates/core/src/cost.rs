//! Hardware cost proxies.
//!
//! Energy is approximated by switching activity: the number of bits that
//! flip at each declared datapath boundary between consecutive cycles,
//! weighted per module. Area is a static gate-equivalent (GE) count derived
//! from the structure of each variant. Neither is calibrated to a process;
//! only ratios and orderings are meaningful.
//!
//! Area formulas, with `C` channels, `S` segments of `L` bits, `D = S * L`,
//! `P = log2 L` position bits and `tree(n)` the width-weighted full-adder
//! count of a binary adder tree over `n` one-bit inputs (`tree(64) = 120`):
//!
//! | module | sparse baseline | sparse optimized | dense |
//! |---|---|---|---|
//! | item memory | `C*64*D` LUT bits | `C*64*S*P` LUT bits | `C*64*D` LUT bits |
//! | binding | `C*S*(P*(L/2-1)` OR + `P*L` mux`)` | `C*S*(P` FA + one-hot expander`)` | `C*D` XOR |
//! | spatial bundle | `D*(tree(C)+w)` FA | `D*(C-1)` OR | `D*(tree(C)+w)` FA |
//! | temporal bundle | `8*D` register bits + `8*D` FA | same | same |
//! | associative memory | `D` AND + `tree(D)` FA + `2*D` register bits | same | `D` XOR + same |
//!
//! `w` is the count width of the spatial comparator. The one-hot expander
//! turning a `P`-bit position into an `L`-bit one-hot segment is a predecoded
//! decoder: `2^a*(a-1) + 2^b*(b-1) + L` AND gates with `a = ceil(P/2)`,
//! `b = floor(P/2)`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{HdcError, Result};
use crate::hv::{hamming_distance, BinaryHv};
use crate::item_memory::LBP_CODES;
use crate::pipeline::{PipelineConfig, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Module {
    ItemMemory,
    Binding,
    SpatialBundle,
    TemporalBundle,
    AssociativeMemory,
}

impl Module {
    pub const ALL: [Module; 5] = [
        Module::ItemMemory,
        Module::Binding,
        Module::SpatialBundle,
        Module::TemporalBundle,
        Module::AssociativeMemory,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Module::ItemMemory => "item-memory",
            Module::Binding => "binding",
            Module::SpatialBundle => "spatial-bundle",
            Module::TemporalBundle => "temporal-bundle",
            Module::AssociativeMemory => "associative-memory",
        }
    }
}

/// Datapath nets whose switching is counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProbePoint {
    /// IM / CompIM read port, one lane per channel.
    ItemOutput,
    /// Baseline one-hot to binary decoder output.
    OneHotDecoder,
    /// Baseline barrel shifter, output of mux stage `k`.
    BarrelStage(u32),
    /// Optimized modular position adders.
    PositionAdder,
    /// One-hot bound HV (optimized expander output, dense XOR output).
    BoundHv,
    /// Adder-tree sums, one lane per bit plane.
    SpatialCounts,
    SpatialOutput,
    /// Thinned temporal output.
    FrameHv,
    /// AND (sparse) or XOR (dense) array of the similarity search.
    AmProduct,
    Scores,
}

const FIXED_SLOTS: usize = 9;
const MAX_STAGES: usize = 17;

impl ProbePoint {
    pub fn module(self) -> Module {
        match self {
            ProbePoint::ItemOutput => Module::ItemMemory,
            ProbePoint::OneHotDecoder
            | ProbePoint::BarrelStage(_)
            | ProbePoint::PositionAdder
            | ProbePoint::BoundHv => Module::Binding,
            ProbePoint::SpatialCounts | ProbePoint::SpatialOutput => Module::SpatialBundle,
            ProbePoint::FrameHv => Module::TemporalBundle,
            ProbePoint::AmProduct | ProbePoint::Scores => Module::AssociativeMemory,
        }
    }

    fn slot(self) -> usize {
        match self {
            ProbePoint::ItemOutput => 0,
            ProbePoint::OneHotDecoder => 1,
            ProbePoint::PositionAdder => 2,
            ProbePoint::BoundHv => 3,
            ProbePoint::SpatialCounts => 4,
            ProbePoint::SpatialOutput => 5,
            ProbePoint::FrameHv => 6,
            ProbePoint::AmProduct => 7,
            ProbePoint::Scores => 8,
            ProbePoint::BarrelStage(k) => FIXED_SLOTS + k as usize,
        }
    }
}

/// Receives datapath values as the pipeline computes them.
pub trait Probe {
    /// `false` lets the pipeline skip computing probe-only intermediates.
    const ENABLED: bool = true;

    fn observe(&mut self, point: ProbePoint, lane: usize, words: &[u64]);

    /// Toggles counted directly by a stage (the temporal accumulator).
    fn add_toggles(&mut self, module: Module, toggles: u64);

    fn end_cycle(&mut self) {}
}

/// Probe that records nothing.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoProbe;

impl Probe for NoProbe {
    const ENABLED: bool = false;

    #[inline]
    fn observe(&mut self, _: ProbePoint, _: usize, _: &[u64]) {}

    #[inline]
    fn add_toggles(&mut self, _: Module, _: u64) {}
}

/// Bits flipped between two states of the same net.
pub fn count_toggles(prev: &BinaryHv, next: &BinaryHv) -> Result<u32> {
    hamming_distance(prev, next)
}

/// Toggles and observed bit-cycles at one probe point.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PointActivity {
    pub toggles: u64,
    pub bit_cycles: u64,
}

impl PointActivity {
    /// Mean per-bit toggle probability.
    pub fn switching_probability(&self) -> f64 {
        if self.bit_cycles == 0 {
            0.0
        } else {
            self.toggles as f64 / self.bit_cycles as f64
        }
    }
}

/// Toggle counter over all probe points. Every net starts at all-zero.
#[derive(Debug, Clone, Default)]
pub struct ActivityMonitor {
    previous: Vec<Vec<Vec<u64>>>,
    points: Vec<PointActivity>,
    toggles: [u64; 5],
    cycles: u64,
}

impl ActivityMonitor {
    pub fn new() -> Self {
        Self {
            previous: vec![Vec::new(); FIXED_SLOTS + MAX_STAGES],
            points: vec![PointActivity::default(); FIXED_SLOTS + MAX_STAGES],
            toggles: [0; 5],
            cycles: 0,
        }
    }

    pub fn cycles(&self) -> u64 {
        self.cycles
    }

    pub fn toggles(&self, module: Module) -> u64 {
        self.toggles[module.index()]
    }

    pub fn activity(&self, point: ProbePoint) -> PointActivity {
        self.points[point.slot()]
    }

    /// Ledger of the recorded run with the static area of `cfg`.
    pub fn ledger(&self, cfg: &PipelineConfig, gates: &GateModel) -> CostLedger {
        CostLedger {
            variant: cfg.variant,
            cycles: self.cycles,
            toggles: self.toggles,
            area: estimate_area(cfg.variant, cfg, gates),
        }
    }
}

impl Probe for ActivityMonitor {
    fn observe(&mut self, point: ProbePoint, lane: usize, words: &[u64]) {
        let slot = point.slot();
        let lanes = &mut self.previous[slot];
        if lanes.len() <= lane {
            lanes.resize(lane + 1, Vec::new());
        }
        let prev = &mut lanes[lane];
        if prev.len() != words.len() {
            prev.clear();
            prev.resize(words.len(), 0);
        }
        let mut flips = 0u64;
        for (p, &w) in prev.iter_mut().zip(words) {
            flips += u64::from((*p ^ w).count_ones());
            *p = w;
        }
        self.points[slot].toggles += flips;
        self.points[slot].bit_cycles += 64 * words.len() as u64;
        self.toggles[point.module().index()] += flips;
    }

    fn add_toggles(&mut self, module: Module, toggles: u64) {
        self.toggles[module.index()] += toggles;
    }

    fn end_cycle(&mut self) {
        self.cycles += 1;
    }
}

/// Gate-equivalent weights and per-module toggle weights.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct GateModel {
    pub full_adder: f64,
    pub or2: f64,
    pub and2: f64,
    pub xor2: f64,
    pub mux2: f64,
    pub register_bit: f64,
    pub lut_bit: f64,
    /// Energy per toggled bit, indexed by [`Module::index`].
    pub toggle_weights: [f64; 5],
}

impl Default for GateModel {
    fn default() -> Self {
        Self {
            full_adder: 2.5,
            or2: 1.0,
            and2: 1.0,
            xor2: 1.5,
            mux2: 1.5,
            register_bit: 4.0,
            lut_bit: 0.25,
            toggle_weights: [1.0; 5],
        }
    }
}

impl GateModel {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.full_adder,
            self.or2,
            self.and2,
            self.xor2,
            self.mux2,
            self.register_bit,
            self.lut_bit,
        ];
        if all
            .iter()
            .chain(&self.toggle_weights)
            .any(|w| !(w.is_finite() && *w > 0.0))
        {
            return Err(HdcError::InvalidArgument(
                "gate weights must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Width-weighted full-adder count of a pairwise adder tree over `n` bits.
pub fn adder_tree_full_adders(n: usize) -> usize {
    let (mut count, mut width, mut total) = (n, 1usize, 0usize);
    while count > 1 {
        let pairs = count / 2;
        total += pairs * width;
        count = pairs + count % 2;
        width += 1;
    }
    total
}

fn bit_width(n: usize) -> usize {
    (usize::BITS - n.leading_zeros()) as usize
}

/// AND gates of a predecoded `bits`-to-`2^bits`-line decoder feeding `lines` outputs.
fn one_hot_expander_ands(bits: usize, lines: usize) -> usize {
    let a = bits.div_ceil(2);
    let b = bits / 2;
    let pre = |k: usize| if k <= 1 { 0 } else { (1usize << k) * (k - 1) };
    pre(a) + pre(b) + if b == 0 { 0 } else { lines }
}

/// Per-module LUT bits of the item memory.
pub fn item_memory_lut_bits(variant: Variant, cfg: &PipelineConfig) -> usize {
    let per_entry = match variant {
        Variant::SparseOptimized => cfg.hv.atomic_payload_bits(),
        _ => cfg.hv.dimension,
    };
    cfg.num_channels * LBP_CODES * per_entry
}

/// Static area in gate equivalents, indexed by [`Module::index`].
pub fn estimate_area(variant: Variant, cfg: &PipelineConfig, g: &GateModel) -> [f64; 5] {
    let c = cfg.num_channels;
    let s = cfg.hv.segments;
    let l = cfg.hv.segment_length;
    let d = cfg.hv.dimension;
    let p = cfg.hv.position_bits() as usize;
    let f = |n: usize| n as f64;

    let im = f(item_memory_lut_bits(variant, cfg)) * g.lut_bit;
    let binding = match variant {
        Variant::SparseBaseline => {
            let decoder = f(p * (l / 2).saturating_sub(1)) * g.or2;
            let barrel = f(p * l) * g.mux2;
            f(c * s) * (decoder + barrel)
        }
        Variant::SparseOptimized => {
            let adder = f(p) * g.full_adder;
            let expander = f(one_hot_expander_ands(p, l)) * g.and2;
            f(c * s) * (adder + expander)
        }
        Variant::Dense => f(c * d) * g.xor2,
    };
    let adder_tree = f(d * (adder_tree_full_adders(c) + bit_width(c))) * g.full_adder;
    let spatial = match variant {
        Variant::SparseOptimized => f(d * c.saturating_sub(1)) * g.or2,
        _ => adder_tree,
    };
    let temporal = f(8 * d) * g.register_bit + f(8 * d) * g.full_adder;
    let product = match variant {
        Variant::Dense => g.xor2,
        _ => g.and2,
    };
    let am =
        f(d) * product + f(adder_tree_full_adders(d)) * g.full_adder + f(2 * d) * g.register_bit;
    [im, binding, spatial, temporal, am]
}

/// Toggle counts and area of one simulated variant.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CostLedger {
    pub variant: Variant,
    pub cycles: u64,
    /// Indexed by [`Module::index`].
    pub toggles: [u64; 5],
    pub area: [f64; 5],
}

impl CostLedger {
    pub fn total_toggles(&self) -> u64 {
        self.toggles.iter().sum()
    }

    pub fn total_area(&self) -> f64 {
        self.area.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BreakdownRow {
    pub module: String,
    pub toggles: u64,
    pub energy: f64,
    pub energy_share_pct: f64,
    pub area_ge: f64,
    pub area_share_pct: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Breakdown {
    pub variant: Variant,
    pub cycles: u64,
    pub rows: Vec<BreakdownRow>,
    pub total_toggles: u64,
    pub total_energy: f64,
    pub total_area_ge: f64,
}

impl Breakdown {
    /// `(energy, area)` of `other` divided by this breakdown's.
    pub fn gain_over(&self, other: &Breakdown) -> (f64, f64) {
        (
            other.total_energy / self.total_energy,
            other.total_area_ge / self.total_area_ge,
        )
    }

    pub fn row(&self, module: Module) -> &BreakdownRow {
        &self.rows[module.index()]
    }
}

/// Per-module shares of energy and area.
pub fn report_breakdown(ledger: &CostLedger, gates: &GateModel) -> Result<Breakdown> {
    if ledger.cycles == 0 || ledger.total_toggles() == 0 {
        return Err(HdcError::InvalidState("cost ledger is empty".into()));
    }
    let energy: Vec<f64> = Module::ALL
        .iter()
        .map(|m| ledger.toggles[m.index()] as f64 * gates.toggle_weights[m.index()])
        .collect();
    let total_energy: f64 = energy.iter().sum();
    let total_area = ledger.total_area();
    let rows = Module::ALL
        .iter()
        .map(|&m| BreakdownRow {
            module: m.name().into(),
            toggles: ledger.toggles[m.index()],
            energy: energy[m.index()],
            energy_share_pct: 100.0 * energy[m.index()] / total_energy,
            area_ge: ledger.area[m.index()],
            area_share_pct: 100.0 * ledger.area[m.index()] / total_area,
        })
        .collect();
    Ok(Breakdown {
        variant: ledger.variant,
        cycles: ledger.cycles,
        rows,
        total_toggles: ledger.total_toggles(),
        total_energy,
        total_area_ge: total_area,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toggles_of_identical_and_complement() {
        let a = BinaryHv::from_indices(1024, &[1, 500]).unwrap();
        assert_eq!(count_toggles(&a, &a).unwrap(), 0);
        assert_eq!(count_toggles(&a, &a.not()).unwrap(), 1024);
        assert!(count_toggles(&a, &BinaryHv::zeros(8)).is_err());
    }

    #[test]
    fn adder_tree_sizes() {
        assert_eq!(adder_tree_full_adders(1), 0);
        assert_eq!(adder_tree_full_adders(2), 1);
        assert_eq!(adder_tree_full_adders(64), 120);
        assert_eq!(adder_tree_full_adders(1024), 2036);
        assert_eq!(one_hot_expander_ands(7, 128), 16 * 3 + 8 * 2 + 128);
    }

    #[test]
    fn compressed_lut_ratio() {
        let cfg = PipelineConfig::default();
        let full = item_memory_lut_bits(Variant::SparseBaseline, &cfg);
        let comp = item_memory_lut_bits(Variant::SparseOptimized, &cfg);
        assert_eq!(full, 64 * 64 * 1024);
        assert_eq!(comp * 1024, full * 56);
    }

    #[test]
    fn or_tree_smaller_than_adder_tree() {
        let cfg = PipelineConfig::default();
        let g = GateModel::default();
        let base = estimate_area(Variant::SparseBaseline, &cfg, &g);
        let opt = estimate_area(Variant::SparseOptimized, &cfg, &g);
        let dense = estimate_area(Variant::Dense, &cfg, &g);
        assert!(opt[Module::SpatialBundle.index()] < base[Module::SpatialBundle.index()]);
        assert!(opt[Module::Binding.index()] < base[Module::Binding.index()]);
        assert!(opt.iter().sum::<f64>() < base.iter().sum::<f64>());
        assert!(opt.iter().sum::<f64>() < dense.iter().sum::<f64>());
    }

    #[test]
    fn monitor_counts_against_previous_state() {
        let mut m = ActivityMonitor::new();
        m.observe(ProbePoint::ItemOutput, 3, &[0b1011]);
        m.observe(ProbePoint::ItemOutput, 3, &[0b0011]);
        m.observe(ProbePoint::BoundHv, 0, &[u64::MAX]);
        m.add_toggles(Module::TemporalBundle, 5);
        m.end_cycle();
        assert_eq!(m.toggles(Module::ItemMemory), 4);
        assert_eq!(m.toggles(Module::Binding), 64);
        assert_eq!(m.toggles(Module::TemporalBundle), 5);
        assert_eq!(m.activity(ProbePoint::ItemOutput).bit_cycles, 128);
        assert_eq!(m.cycles(), 1);
    }

    #[test]
    fn breakdown_shares_sum_to_100() {
        let cfg = PipelineConfig::default();
        let g = GateModel::default();
        let ledger = CostLedger {
            variant: Variant::SparseOptimized,
            cycles: 10,
            toggles: [10, 20, 30, 40, 0],
            area: estimate_area(Variant::SparseOptimized, &cfg, &g),
        };
        let b = report_breakdown(&ledger, &g).unwrap();
        let e: f64 = b.rows.iter().map(|r| r.energy_share_pct).sum();
        let a: f64 = b.rows.iter().map(|r| r.area_share_pct).sum();
        assert!((e - 100.0).abs() < 0.1 && (a - 100.0).abs() < 0.1);
        let empty = CostLedger {
            cycles: 0,
            ..ledger
        };
        assert!(report_breakdown(&empty, &g).is_err());
    }

    #[test]
    fn gate_model_rejects_non_positive() {
        let mut g = GateModel::default();
        assert!(g.validate().is_ok());
        g.or2 = 0.0;
        assert!(g.validate().is_err());
    }
}

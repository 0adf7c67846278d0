use proptest::prelude::*;
use sparse_hdc::hv::{
    atomic_to_binary, barrel_shift_stages, one_hot_decode, segmented_shift_bind_barrel,
    segmented_shift_bind_positions, segmented_unbind_positions,
};
use sparse_hdc::{AtomicSparseHv, BinaryHv, HvConfig};

fn cfg() -> HvConfig {
    HvConfig::default()
}

fn atomic() -> impl Strategy<Value = AtomicSparseHv> {
    prop::collection::vec(0u16..128, 8).prop_map(|p| AtomicSparseHv::new(p, &cfg()).unwrap())
}

fn bind(a: &AtomicSparseHv, b: &AtomicSparseHv) -> AtomicSparseHv {
    segmented_shift_bind_positions(a, b, &cfg()).unwrap()
}

/// Rotates each segment one bit at a time, straight from the definition.
fn naive_barrel(x: &BinaryHv, shifts: &[u16]) -> BinaryHv {
    let mut bits: Vec<bool> = (0..1024).map(|i| x.get(i)).collect();
    for (s, &k) in shifts.iter().enumerate() {
        for _ in 0..k {
            let seg = &mut bits[s * 128..(s + 1) * 128];
            seg.rotate_right(1);
        }
    }
    BinaryHv::from_bools(&bits)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn zero_shifter_is_identity(a in atomic()) {
        prop_assert_eq!(bind(&a, &AtomicSparseHv::zero(&cfg())), a);
    }

    #[test]
    fn binding_commutes_and_associates(a in atomic(), b in atomic(), c in atomic()) {
        prop_assert_eq!(bind(&a, &b), bind(&b, &a));
        prop_assert_eq!(bind(&bind(&a, &b), &c), bind(&a, &bind(&b, &c)));
    }

    #[test]
    fn unbind_inverts_bind(a in atomic(), b in atomic()) {
        let bound = bind(&a, &b);
        prop_assert_eq!(segmented_unbind_positions(&bound, &b, &cfg()).unwrap(), a);
    }

    #[test]
    fn expansion_round_trips(a in atomic()) {
        let bin = atomic_to_binary(&a, &cfg()).unwrap();
        prop_assert_eq!(bin.count_ones(), 8);
        prop_assert_eq!(one_hot_decode(&bin, &cfg()).unwrap(), a);
    }

    #[test]
    fn barrel_path_equals_position_path(a in atomic(), b in atomic()) {
        let shiftee = atomic_to_binary(&a, &cfg()).unwrap();
        let shifts = one_hot_decode(&atomic_to_binary(&b, &cfg()).unwrap(), &cfg()).unwrap();
        let barrel = segmented_shift_bind_barrel(&shiftee, shifts.positions(), &cfg()).unwrap();
        prop_assert_eq!(barrel, atomic_to_binary(&bind(&a, &b), &cfg()).unwrap());
    }

    #[test]
    fn staged_barrel_matches_direct_and_naive(
        idx in prop::collection::vec(0usize..1024, 0..200),
        shifts in prop::collection::vec(0u16..128, 8),
    ) {
        let x = BinaryHv::from_indices(1024, &idx).unwrap();
        let direct = segmented_shift_bind_barrel(&x, &shifts, &cfg()).unwrap();
        let staged = barrel_shift_stages(&x, &shifts, &cfg(), |_, _| {}).unwrap();
        prop_assert_eq!(&direct, &staged);
        prop_assert_eq!(direct, naive_barrel(&x, &shifts));
    }
}

fn naive_rotate(x: &BinaryHv, shifts: &[u16], l: usize) -> BinaryHv {
    let mut bits: Vec<bool> = (0..x.len()).map(|i| x.get(i)).collect();
    for (s, &k) in shifts.iter().enumerate() {
        bits[s * l..(s + 1) * l].rotate_right(usize::from(k));
    }
    BinaryHv::from_bools(&bits)
}

proptest! {
    #[test]
    fn barrel_handles_other_segment_lengths(
        geometry in prop::sample::select(vec![(96usize, 3usize, 32usize), (512, 2, 256), (64, 1, 64), (40, 5, 8)]),
        seed_bits in prop::collection::vec(any::<bool>(), 512),
        raw_shifts in prop::collection::vec(any::<u16>(), 5),
    ) {
        let (d, s, l) = geometry;
        let cfg = HvConfig::new(d, s, l).unwrap();
        let x = BinaryHv::from_bools(&seed_bits[..d]);
        let shifts: Vec<u16> = raw_shifts[..s].iter().map(|k| k % l as u16).collect();
        let direct = segmented_shift_bind_barrel(&x, &shifts, &cfg).unwrap();
        prop_assert_eq!(direct, naive_rotate(&x, &shifts, l));
    }
}

//! Kernels against naive integer-matrix oracles on random small instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sparse_hdc::dense::majority_bundle;
use sparse_hdc::hv::{bundle_or, bundle_threshold, overlap_similarity};
use sparse_hdc::{AccumulatorHv, BinaryHv};

fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize, p: f64) -> Vec<Vec<u8>> {
    (0..rows)
        .map(|_| (0..cols).map(|_| u8::from(rng.random_bool(p))).collect())
        .collect()
}

fn to_hv(row: &[u8]) -> BinaryHv {
    BinaryHv::from_bools(&row.iter().map(|&b| b == 1).collect::<Vec<_>>())
}

fn column_sums(m: &[Vec<u8>]) -> Vec<u32> {
    (0..m[0].len())
        .map(|j| m.iter().map(|r| u32::from(r[j])).sum())
        .collect()
}

fn bits(hv: &BinaryHv) -> Vec<u8> {
    (0..hv.len()).map(|i| u8::from(hv.get(i))).collect()
}

#[test]
fn bundle_threshold_matches_count_and_compare() {
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let rows = rng.random_range(1..80);
        let cols = rng.random_range(1..200);
        let p = rng.random_range(0.0..1.0);
        let m = random_matrix(&mut rng, rows, cols, p);
        let t = rng.random_range(1..=rows as u32 + 1);
        let hvs: Vec<BinaryHv> = m.iter().map(|r| to_hv(r)).collect();
        let want: Vec<u8> = column_sums(&m).iter().map(|&c| u8::from(c >= t)).collect();
        assert_eq!(bits(&bundle_threshold(&hvs, t).unwrap()), want);
        let or: Vec<u8> = column_sums(&m).iter().map(|&c| u8::from(c >= 1)).collect();
        assert_eq!(bits(&bundle_or(&hvs).unwrap()), or);
        assert_eq!(bundle_or(&hvs).unwrap(), bundle_threshold(&hvs, 1).unwrap());
    }
}

#[test]
fn majority_matches_oracle() {
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    for _ in 0..1000 {
        let rows = rng.random_range(1..70);
        let cols = rng.random_range(1..200);
        let m = random_matrix(&mut rng, rows, cols, 0.5);
        let hvs: Vec<BinaryHv> = m.iter().map(|r| to_hv(r)).collect();
        let want: Vec<u8> = column_sums(&m)
            .iter()
            .map(|&c| u8::from(2 * c > rows as u32))
            .collect();
        assert_eq!(bits(&majority_bundle(&hvs).unwrap()), want);
    }
}

#[test]
fn accumulate_and_thin_match_clipped_sum() {
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    for _ in 0..1000 {
        let rows = rng.random_range(1..=300);
        let cols = rng.random_range(1..64);
        let p = rng.random_range(0.5..1.0);
        let m = random_matrix(&mut rng, rows, cols, p);
        let mut acc = AccumulatorHv::new(cols);
        for r in &m {
            acc.accumulate(&to_hv(r)).unwrap();
        }
        let sums = column_sums(&m);
        let clipped: Vec<u8> = sums.iter().map(|&c| c.min(255) as u8).collect();
        assert_eq!(acc.counts(), clipped.as_slice());
        let t = rng.random_range(1..=300u32);
        let want: Vec<u8> = sums.iter().map(|&c| u8::from(c.min(255) >= t)).collect();
        assert_eq!(bits(&acc.thin(t).unwrap()), want);
        if t <= 255 {
            // saturation is invisible to any reachable threshold
            let exact: Vec<u8> = sums.iter().map(|&c| u8::from(c >= t)).collect();
            assert_eq!(bits(&acc.thin(t).unwrap()), exact);
        }
    }
}

#[test]
fn overlap_matches_per_bit_count() {
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    for _ in 0..1000 {
        let cols = rng.random_range(1..2000);
        let p = rng.random_range(0.0..1.0);
        let m = random_matrix(&mut rng, 2, cols, p);
        let want: u32 = (0..cols).map(|j| u32::from(m[0][j] & m[1][j])).sum();
        let (a, b) = (to_hv(&m[0]), to_hv(&m[1]));
        assert_eq!(overlap_similarity(&a, &b).unwrap(), want);
        assert_eq!(overlap_similarity(&b, &a).unwrap(), want);
        assert!(want <= a.count_ones().min(b.count_ones()));
    }
}

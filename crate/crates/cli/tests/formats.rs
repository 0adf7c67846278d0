use proptest::prelude::*;
use sparse_hdc::pipeline::Annotation;
use sparse_hdc::{
    AssociativeMemory, BinaryHv, CompressedItemMemory, HvConfig, ItemMemory, Label, PipelineConfig,
    Recording,
};
use sparse_hdc_cli::am_file::AmFile;
use sparse_hdc_cli::{im_file, recording_file};

#[test]
fn item_memory_files_round_trip_byte_identical() {
    for (channels, cfg) in [
        (64, HvConfig::default()),
        (1, HvConfig::default()),
        (3, HvConfig::new(96, 3, 32).unwrap()),
    ] {
        let cim = CompressedItemMemory::generate(9, channels, cfg).unwrap();
        let bytes = im_file::encode_compressed(&cim);
        let back = im_file::decode_compressed(&bytes).unwrap();
        assert_eq!(back, cim);
        assert_eq!(im_file::encode_compressed(&back), bytes);

        let im = cim.expand().unwrap();
        let bytes = im_file::encode_full(&im);
        let back = im_file::decode_full(&bytes).unwrap();
        assert_eq!(back, im);
        assert_eq!(im_file::encode_full(&back), bytes);
        assert_eq!(back.compress().unwrap(), cim);
    }
}

#[test]
fn full_im_payload_size() {
    let im = ItemMemory::generate(1, 2, HvConfig::default()).unwrap();
    assert_eq!(im_file::encode_full(&im).len(), 32 + 2 * 65 * 128);
}

#[test]
fn am_file_round_trip_byte_identical() {
    let non = BinaryHv::from_indices(1024, &[0, 5, 1023]).unwrap();
    let seiz = BinaryHv::from_indices(1024, &[64, 700]).unwrap();
    let am = AssociativeMemory::new(non, seiz).unwrap();
    let file = AmFile::new(PipelineConfig::sparse_baseline(1), 42, 2, &am);
    let text = file.to_json();
    let back = AmFile::from_json(&text).unwrap();
    assert_eq!(back, file);
    assert_eq!(back.to_json(), text);
    assert_eq!(back.memory().unwrap(), am);
    assert!(AmFile::from_json(&text.replace("sparse-hdc-am", "other")).is_err());
}

fn arb_recording() -> impl Strategy<Value = Recording> {
    (1usize..4, 8usize..200).prop_flat_map(|(channels, samples)| {
        (
            prop::collection::vec(any::<i16>(), channels * samples),
            prop::collection::btree_set(0..samples as u64, 0..7),
            prop::sample::select(vec![256.0, 512.0, 1000.5]),
        )
            .prop_map(move |(data, cuts, fs)| {
                // consecutive cut pairs become intervals; an odd cut is open-ended
                let cuts: Vec<u64> = cuts.into_iter().collect();
                let anns = cuts
                    .chunks(2)
                    .map(|pair| Annotation {
                        onset_sample: pair[0],
                        offset_sample: pair.get(1).copied(),
                        label: Label::Seizure,
                    })
                    .collect();
                Recording::new(channels, fs, data, anns).unwrap()
            })
    })
}

proptest! {
    #[test]
    fn recording_files_round_trip_byte_identical(rec in arb_recording()) {
        let bytes = recording_file::encode(&rec);
        let back = recording_file::decode(&bytes).unwrap();
        prop_assert_eq!(&back, &rec);
        prop_assert_eq!(recording_file::encode(&back), bytes);
    }
}

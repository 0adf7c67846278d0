use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sparse-hdc"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn ok(args: &[&str]) -> String {
    let (code, stdout, stderr) = run(args);
    assert_eq!(code, 0, "{args:?} failed: {stderr}");
    stdout
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

struct Setup {
    _dir: tempfile::TempDir,
    root: PathBuf,
    config: PathBuf,
    recording: PathBuf,
}

/// 8 channels, 90 s, 2 seizures. Eight channels fill a frame far less
/// than 64, hence the low temporal threshold.
fn setup() -> Setup {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().to_path_buf();
    let config = root.join("cfg.json");
    std::fs::write(
        &config,
        r#"{"num_channels": 8, "seed": 5, "context_s": 20, "temporal_threshold": 40}"#,
    )
    .unwrap();
    let recording = root.join("rec.shrc");
    ok(&[
        "synth",
        "--seed",
        "4",
        "--channels",
        "8",
        "--duration",
        "90",
        "--seizures",
        "2",
        "--seizure-duration",
        "8",
        "--out",
        s(&recording),
    ]);
    Setup {
        _dir: dir,
        root,
        config,
        recording,
    }
}

#[test]
fn gen_im_is_deterministic_and_loadable() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    ok(&["gen-im", "--seed", "7", "--channels", "4", "--out", s(&a)]);
    ok(&["gen-im", "--seed", "7", "--channels", "4", "--out", s(&b)]);
    for f in ["im.bin", "compim.bin", "compim.json"] {
        assert_eq!(
            std::fs::read(a.join(f)).unwrap(),
            std::fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
    let cim = sparse_hdc_cli::im_file::read_compressed(&a.join("compim.bin")).unwrap();
    let im = sparse_hdc_cli::im_file::read_full(&a.join("im.bin")).unwrap();
    assert_eq!(im.compress().unwrap(), cim);
    assert_eq!(cim.seed(), 7);
    let dump = json(&a.join("compim.json"));
    assert_eq!(dump["entries"].as_array().unwrap().len(), 4);

    let one = dir.path().join("one");
    ok(&["gen-im", "--seed", "7", "--channels", "1", "--out", s(&one)]);
    assert_eq!(
        std::fs::metadata(one.join("compim.bin")).unwrap().len(),
        32 + 65 * 7
    );
}

#[test]
fn synth_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, z) = (
        dir.path().join("a"),
        dir.path().join("b"),
        dir.path().join("z"),
    );
    for p in [&a, &b] {
        ok(&[
            "synth",
            "--seed",
            "3",
            "--channels",
            "2",
            "--duration",
            "20",
            "--seizures",
            "1",
            "--seizure-duration",
            "2",
            "--out",
            s(p),
        ]);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    ok(&[
        "synth",
        "--channels",
        "2",
        "--duration",
        "20",
        "--seizures",
        "0",
        "--out",
        s(&z),
    ]);
    let rec = sparse_hdc_cli::recording_file::read(&z).unwrap();
    assert!(rec.annotations().is_empty());
    let (code, _, _) = run(&[
        "synth",
        "--duration",
        "0.1",
        "--seizures",
        "0",
        "--out",
        s(&z),
    ]);
    assert_eq!(code, 2);
}

#[test]
fn train_then_infer() {
    let st = setup();
    let am = st.root.join("am.json");
    ok(&[
        "train",
        "--config",
        s(&st.config),
        "--recording",
        s(&st.recording),
        "--out-am",
        s(&am),
    ]);
    let am2 = st.root.join("am2.json");
    ok(&[
        "train",
        "--config",
        s(&st.config),
        "--recording",
        s(&st.recording),
        "--out-am",
        s(&am2),
    ]);
    assert_eq!(std::fs::read(&am).unwrap(), std::fs::read(&am2).unwrap());

    let opt = st.root.join("opt.json");
    let base = st.root.join("base.json");
    ok(&[
        "infer",
        "--recording",
        s(&st.recording),
        "--am",
        s(&am),
        "--exclude-seizure",
        "0",
        "--report",
        s(&opt),
    ]);
    ok(&[
        "infer",
        "--recording",
        s(&st.recording),
        "--am",
        s(&am),
        "--variant",
        "sparse-baseline",
        "--exclude-seizure",
        "0",
        "--report",
        s(&base),
    ]);
    let (o, b) = (json(&opt), json(&base));
    assert_eq!(o["predictions"], b["predictions"]);
    assert_eq!(o["seizures"], b["seizures"]);
    let n = 90 * 512;
    assert_eq!(o["frame_count"].as_u64().unwrap(), ((n - 6) / 256) as u64);
    assert_eq!(o["accuracy"].as_f64(), Some(1.0));
    let csv = std::fs::read_to_string(st.root.join("opt.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + (n - 6) / 256);

    let (code, _, _) = run(&[
        "train",
        "--config",
        s(&st.config),
        "--recording",
        s(&st.recording),
        "--seizure-index",
        "5",
        "--out-am",
        s(&am2),
    ]);
    assert_eq!(code, 3);
}

#[test]
fn error_exit_codes() {
    let st = setup();
    let bogus = st.root.join("bogus.shrc");
    std::fs::write(&bogus, b"SHRC but not really").unwrap();
    let am = st.root.join("am.json");
    let (code, _, err) = run(&[
        "train",
        "--config",
        s(&st.config),
        "--recording",
        s(&bogus),
        "--out-am",
        s(&am),
    ]);
    assert_eq!(code, 3, "{err}");
    let bad_cfg = st.root.join("bad.json");
    std::fs::write(&bad_cfg, r#"{"num_chanels": 8}"#).unwrap();
    let (code, _, _) = run(&[
        "train",
        "--config",
        s(&bad_cfg),
        "--recording",
        s(&st.recording),
        "--out-am",
        s(&am),
    ]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&[
        "cost",
        "--config",
        s(&st.config),
        "--recording",
        s(&st.recording),
        "--variants",
        "sparse,dense",
    ]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["frobnicate"]);
    assert_eq!(code, 2);
    let empty = st.root.join("empty.json");
    std::fs::write(&empty, r#"{"num_channels": 8, "thresholds": []}"#).unwrap();
    let (code, _, _) = run(&[
        "sweep",
        "--config",
        s(&empty),
        "--recordings",
        s(&st.recording),
    ]);
    assert_eq!(code, 2);
    // default config expects 64 channels
    let (code, _, _) = run(&["train", "--recording", s(&st.recording), "--out-am", s(&am)]);
    assert_eq!(code, 3);
}

#[test]
fn sweep_matches_single_infer_and_thins_monotonically() {
    let st = setup();
    let report = st.root.join("sweep.json");
    ok(&[
        "sweep",
        "--config",
        s(&st.config),
        "--recordings",
        s(&st.recording),
        "--thresholds",
        "20,30,40,50,60",
        "--report",
        s(&report),
    ]);
    let rows = json(&report);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 10);
    let per_patient: Vec<&Value> = rows.iter().filter(|r| !r["patient"].is_null()).collect();
    for w in per_patient.windows(2) {
        assert!(w[1]["mean_density"].as_f64() <= w[0]["mean_density"].as_f64());
    }
    assert_eq!(per_patient.iter().filter(|r| r["best"] == true).count(), 1);

    let am = st.root.join("am.json");
    let single = st.root.join("single.json");
    ok(&[
        "train",
        "--config",
        s(&st.config),
        "--recording",
        s(&st.recording),
        "--temporal-threshold",
        "40",
        "--out-am",
        s(&am),
    ]);
    ok(&[
        "infer",
        "--recording",
        s(&st.recording),
        "--am",
        s(&am),
        "--exclude-seizure",
        "0",
        "--report",
        s(&single),
    ]);
    let single = json(&single);
    let row = per_patient.iter().find(|r| r["threshold"] == 40).unwrap();
    assert_eq!(row["accuracy"], single["accuracy"]);
    assert_eq!(row["median_delay_s"], single["median_delay_s"]);
    assert_eq!(row["mean_density"], single["mean_density"]);

    let again = st.root.join("again.json");
    ok(&[
        "sweep",
        "--config",
        s(&st.config),
        "--recordings",
        s(&st.recording),
        "--thresholds",
        "20,30,40,50,60",
        "--report",
        s(&again),
    ]);
    assert_eq!(
        std::fs::read(&report).unwrap(),
        std::fs::read(&again).unwrap()
    );
}

#[test]
fn cost_reports_shares_and_ratios() {
    let st = setup();
    let report = st.root.join("cost.json");
    ok(&[
        "cost",
        "--config",
        s(&st.config),
        "--recording",
        s(&st.recording),
        "--report",
        s(&report),
    ]);
    let r = json(&report);
    for b in r["breakdowns"].as_array().unwrap() {
        for key in ["energy_share_pct", "area_share_pct"] {
            let total: f64 = b["rows"]
                .as_array()
                .unwrap()
                .iter()
                .map(|row| row[key].as_f64().unwrap())
                .sum();
            assert!((total - 100.0).abs() < 0.1, "{key} sums to {total}");
        }
    }
    let ratios = std::fs::read_to_string(st.root.join("cost.ratios.csv")).unwrap();
    for v in ["sparse-baseline", "sparse-optimized", "dense"] {
        assert!(ratios.lines().any(|l| l.starts_with(v)), "{v} missing");
    }
    let again = st.root.join("again.json");
    ok(&[
        "cost",
        "--config",
        s(&st.config),
        "--recording",
        s(&st.recording),
        "--report",
        s(&again),
    ]);
    assert_eq!(
        std::fs::read(&report).unwrap(),
        std::fs::read(&again).unwrap()
    );
}

#[test]
fn import_csv_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("x.csv");
    let sidecar = dir.path().join("x.json");
    let out = dir.path().join("x.shrc");
    std::fs::write(&csv, "c1,c2\n1.4,-2\n3,4\n5,6\n").unwrap();
    std::fs::write(
        &sidecar,
        r#"{"sampling_rate": 256, "has_header": true, "scale": 10,
            "annotations": [{"onset_sample": 1, "offset_sample": null, "label": "seizure"}]}"#,
    )
    .unwrap();
    ok(&[
        "import-csv",
        "--csv",
        s(&csv),
        "--sidecar",
        s(&sidecar),
        "--out",
        s(&out),
    ]);
    let rec = sparse_hdc_cli::recording_file::read(&out).unwrap();
    assert_eq!(rec.channel(0), &[14, 30, 50]);
    assert_eq!(rec.channel(1), &[-20, 40, 60]);
    assert_eq!(rec.annotations()[0].offset_sample, None);
}

//! JSON reports with a CSV sibling next to them.

use std::path::{Path, PathBuf};

use serde::Serialize;
use sparse_hdc::cost::Breakdown;
use sparse_hdc::pipeline::{DetectionReport, SweepRow};

use crate::error::{CliError, Result};

/// `report.json` -> `report.csv`; `report` -> `report.csv`.
pub fn csv_sibling(path: &Path) -> PathBuf {
    path.with_extension("csv")
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    std::fs::write(path, text).map_err(CliError::io(path))
}

fn write_csv(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let io = |e: csv::Error| CliError::Data(format!("{}: {e}", path.display()));
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(CliError::io(path))
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Per-frame predictions.
pub fn write_detection(path: &Path, report: &DetectionReport) -> Result<()> {
    write_json(path, report)?;
    let rows = report.predictions.iter().map(|p| {
        vec![
            p.frame_index.to_string(),
            p.start_sample.to_string(),
            p.end_sample.to_string(),
            p.similarities[0].to_string(),
            p.similarities[1].to_string(),
            p.label.name().to_string(),
            p.tie.to_string(),
            p.density.to_string(),
        ]
    });
    write_csv(
        &csv_sibling(path),
        &[
            "frame",
            "start_sample",
            "end_sample",
            "sim_non_seizure",
            "sim_seizure",
            "label",
            "tie",
            "density",
        ],
        rows,
    )
}

pub fn write_sweep(path: &Path, rows: &[SweepRow]) -> Result<()> {
    write_json(path, &rows)?;
    let table = rows.iter().map(|r| {
        vec![
            r.patient.clone().unwrap_or_else(|| "all".into()),
            r.threshold.to_string(),
            opt(r.accuracy),
            opt(r.mean_delay_s),
            opt(r.median_delay_s),
            r.mean_density.to_string(),
            r.detected.to_string(),
            r.scored.to_string(),
            r.false_positive_frames.to_string(),
            r.best.to_string(),
        ]
    });
    write_csv(
        &csv_sibling(path),
        &[
            "patient",
            "threshold",
            "accuracy",
            "mean_delay_s",
            "median_delay_s",
            "mean_density",
            "detected",
            "scored",
            "false_positive_frames",
            "best",
        ],
        table,
    )
}

/// Gain of the optimized sparse variant over one other variant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostRatio {
    pub variant: String,
    pub energy_ratio: f64,
    pub area_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostReport {
    pub breakdowns: Vec<Breakdown>,
    /// Present when the optimized variant was run.
    pub ratios: Vec<CostRatio>,
}

/// Module breakdown CSV plus a `.ratios.csv` table.
pub fn write_cost(path: &Path, report: &CostReport) -> Result<()> {
    write_json(path, report)?;
    let mut table = Vec::new();
    for b in &report.breakdowns {
        for r in &b.rows {
            table.push(vec![
                b.variant.name().to_string(),
                r.module.clone(),
                r.toggles.to_string(),
                r.energy.to_string(),
                r.energy_share_pct.to_string(),
                r.area_ge.to_string(),
                r.area_share_pct.to_string(),
            ]);
        }
        table.push(vec![
            b.variant.name().to_string(),
            "total".into(),
            b.total_toggles.to_string(),
            b.total_energy.to_string(),
            "100".into(),
            b.total_area_ge.to_string(),
            "100".into(),
        ]);
    }
    write_csv(
        &csv_sibling(path),
        &[
            "variant",
            "module",
            "toggles",
            "energy",
            "energy_share_pct",
            "area_ge",
            "area_share_pct",
        ],
        table,
    )?;
    let ratios = report.ratios.iter().map(|r| {
        vec![
            r.variant.clone(),
            r.energy_ratio.to_string(),
            r.area_ratio.to_string(),
        ]
    });
    write_csv(
        &path.with_extension("ratios.csv"),
        &["versus", "energy_ratio", "area_ratio"],
        ratios,
    )
}

//! Report serialization: `report.json` with the full protocol output plus
//! `roc.csv`, `detection_by_distance.csv` and static SVG plots.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use tofplane_core::eval::{EvalReport, ProtocolReport};
use tofplane_core::Label;

use crate::{svg, RunMeta};

#[derive(Debug, Serialize, Deserialize)]
pub struct ReportFile {
    #[serde(flatten)]
    pub meta: RunMeta,
    pub protocol: String,
    pub report: ProtocolReport,
}

/// Write the report bundle into `dir`.
pub fn write_report_bundle(
    dir: &Path,
    protocol: &str,
    report: &ProtocolReport,
    meta: &RunMeta,
) -> Result<()> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating report directory {}", dir.display()))?;
    let file = ReportFile {
        meta: meta.clone(),
        protocol: protocol.to_string(),
        report: report.clone(),
    };
    let mut bytes = serde_json::to_vec_pretty(&file)?;
    bytes.push(b'\n');
    crate::write_atomic(&dir.join("report.json"), &bytes)?;

    if let ProtocolReport::Single(report) = report {
        write_single_extras(dir, report, meta)?;
    }
    Ok(())
}

fn write_single_extras(dir: &Path, report: &EvalReport, meta: &RunMeta) -> Result<()> {
    let provenance = format!("# seed={} config={}\n", meta.seed, meta.config_hash);

    let mut roc = provenance.clone();
    roc.push_str("fpr,tpr,threshold\n");
    for p in &report.roc {
        writeln!(roc, "{},{},{}", p.fpr, p.tpr, p.threshold)?;
    }
    crate::write_atomic(&dir.join("roc.csv"), roc.as_bytes())?;

    let mut det = provenance;
    det.push_str("lo_m,hi_m,total,detected,rate\n");
    for b in &report.detection_by_distance {
        writeln!(det, "{},{},{},{},{}", b.lo_m, b.hi_m, b.total, b.detected, b.rate)?;
    }
    crate::write_atomic(&dir.join("detection_by_distance.csv"), det.as_bytes())?;

    let planar: Vec<f64> = report
        .scores
        .iter()
        .filter(|r| r.label == Label::Planar)
        .map(|r| r.score)
        .collect();
    let deviation: Vec<f64> = report
        .scores
        .iter()
        .filter(|r| r.label == Label::Deviation)
        .map(|r| r.score)
        .collect();
    crate::write_atomic(
        &dir.join("roc.svg"),
        svg::roc_curve(&report.roc, report.auroc).as_bytes(),
    )?;
    crate::write_atomic(
        &dir.join("scores.svg"),
        svg::score_histogram(&planar, &deviation).as_bytes(),
    )?;
    crate::write_atomic(
        &dir.join("detection_by_distance.svg"),
        svg::detection_by_distance(&report.detection_by_distance).as_bytes(),
    )?;
    Ok(())
}

pub fn read_report(dir: &Path) -> Result<ReportFile> {
    let path = dir.join("report.json");
    let bytes =
        std::fs::read(&path).with_context(|| format!("reading {}", path.display()))?;
    Ok(serde_json::from_slice(&bytes)?)
}

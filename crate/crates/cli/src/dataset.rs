//! JSON Lines dataset files: one frame per line, bin 0 nearest, pixels
//! row-major over the sensor array.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use tofplane_core::{Frame, Label};

use crate::RunMeta;

/// Wire form of one dataset line. The field set and names are the file
/// format; keep them stable.
#[derive(Debug, Serialize, Deserialize)]
struct FrameRecord {
    capture_id: String,
    surface_id: String,
    label: Label,
    sublabel: Option<String>,
    deviation_distance_m: Option<f64>,
    pixels: Vec<Vec<u32>>,
    onboard_distances_m: Option<Vec<f64>>,
}

impl From<&Frame> for FrameRecord {
    fn from(f: &Frame) -> Self {
        Self {
            capture_id: f.capture_id.clone(),
            surface_id: f.surface_id.clone(),
            label: f.label,
            sublabel: f.sublabel.clone(),
            deviation_distance_m: f.deviation_distance_m,
            pixels: f.pixels.clone(),
            onboard_distances_m: f.onboard_distances_m.clone(),
        }
    }
}

impl From<FrameRecord> for Frame {
    fn from(r: FrameRecord) -> Self {
        Frame {
            capture_id: r.capture_id,
            surface_id: r.surface_id,
            label: r.label,
            sublabel: r.sublabel,
            deviation_distance_m: r.deviation_distance_m,
            pixels: r.pixels,
            onboard_distances_m: r.onboard_distances_m,
        }
    }
}

/// Read a JSONL dataset, validating every frame. Errors carry the
/// 1-based line number.
pub fn read_dataset(path: &Path) -> Result<Vec<Frame>> {
    let file = std::fs::File::open(path)
        .with_context(|| format!("opening dataset {}", path.display()))?;
    let reader = BufReader::new(file);
    let mut frames = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.with_context(|| format!("line {line_no}: read failed"))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: FrameRecord = serde_json::from_str(&line)
            .with_context(|| format!("line {line_no}: invalid frame record"))?;
        let frame: Frame = record.into();
        if let Err(e) = frame.validate() {
            bail!("line {line_no}: {e}");
        }
        frames.push(frame);
    }
    Ok(frames)
}

/// Write a JSONL dataset atomically.
pub fn write_dataset(frames: &[Frame], path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    for frame in frames {
        serde_json::to_writer(&mut buf, &FrameRecord::from(frame))?;
        buf.write_all(b"\n")?;
    }
    crate::write_atomic(path, &buf)
}

/// Sidecar manifest written next to a simulated dataset.
#[derive(Debug, Serialize, Deserialize)]
pub struct DatasetManifest {
    #[serde(flatten)]
    pub meta: RunMeta,
    pub kind: String,
    pub frames: usize,
}

pub fn manifest_path(dataset_path: &Path) -> std::path::PathBuf {
    let mut name = dataset_path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    name.push_str(".manifest.json");
    dataset_path.with_file_name(name)
}

pub fn write_manifest(dataset_path: &Path, manifest: &DatasetManifest) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(manifest)?;
    bytes.push(b'\n');
    crate::write_atomic(&manifest_path(dataset_path), &bytes)
}

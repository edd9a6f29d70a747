//! Experiment protocols: split, fit, score, and summarize datasets the way
//! the evaluation scenarios prescribe (per-object tables, detection vs.
//! distance, training-surface splits, cliff sweeps, ablations, sample-count
//! sweeps).
//!
//! Every protocol canonicalizes frame order by capture id before touching
//! randomness, so shuffling dataset rows changes no reported number.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng;

use crate::baseline::{onboard_feature, peaks_feature, PeakConfig};
use crate::metrics::{compute_roc, fpr_at_threshold, threshold_at_fpr, RocPoint};
use crate::mixture::{select_components, score_with, FitConfig, SurfaceModel};
use crate::preprocess::{preprocess, PreprocessConfig};
use crate::rng::{derive_seed, rng_for};
use crate::{Error, Frame, Label, Result};

/// Which feature pipeline feeds the mixture model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Method {
    /// Full pre-processed histograms (k = pixels * kept bins).
    #[default]
    Histogram,
    /// Spline peak distance per pixel (k = pixels).
    Peaks,
    /// The sensor's onboard distance estimates (k = pixels).
    Onboard,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Histogram => "histogram",
            Method::Peaks => "peaks",
            Method::Onboard => "onboard",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "histogram" => Some(Self::Histogram),
            "peaks" => Some(Self::Peaks),
            "onboard" => Some(Self::Onboard),
            _ => None,
        }
    }
}

/// The scripted evaluation protocols.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Protocol {
    PerObject,
    ByDistance,
    SurfaceSplits,
    CliffRange,
    Ablation,
    SampleSweep,
}

impl Protocol {
    pub fn name(self) -> &'static str {
        match self {
            Protocol::PerObject => "per_object",
            Protocol::ByDistance => "by_distance",
            Protocol::SurfaceSplits => "surface_splits",
            Protocol::CliffRange => "cliff_range",
            Protocol::Ablation => "ablation",
            Protocol::SampleSweep => "sample_sweep",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name.replace('-', "_").as_str() {
            "per_object" => Some(Self::PerObject),
            "by_distance" => Some(Self::ByDistance),
            "surface_splits" => Some(Self::SurfaceSplits),
            "cliff_range" => Some(Self::CliffRange),
            "ablation" => Some(Self::Ablation),
            "sample_sweep" => Some(Self::SampleSweep),
            _ => None,
        }
    }
}

/// Shared knobs of all protocols.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProtocolConfig {
    pub method: Method,
    pub preprocess: PreprocessConfig,
    pub fit: FitConfig,
    pub peak: PeakConfig,
    /// FPR budget for the reported detection threshold.
    pub max_fpr: f64,
    /// Detection-vs-distance bucket layout: half-open `(lo, hi]` buckets of
    /// `bucket_width_m` starting at `bucket_start_m`.
    pub bucket_start_m: f64,
    pub bucket_width_m: f64,
    pub bucket_end_m: f64,
    /// Training samples per surface for the sample-count sweep.
    pub sweep_counts: Vec<usize>,
    pub sweep_repeats: usize,
    pub seed: u64,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            method: Method::Histogram,
            preprocess: PreprocessConfig::default(),
            fit: FitConfig::default(),
            peak: PeakConfig::default(),
            max_fpr: 0.05,
            bucket_start_m: 0.1,
            bucket_width_m: 0.1,
            bucket_end_m: 0.8,
            sweep_counts: alloc::vec![1, 2, 3, 5, 8, 10, 12, 15],
            sweep_repeats: 100,
            seed: 0,
        }
    }
}

/// One scored test frame.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScoreRow {
    pub capture_id: String,
    pub surface_id: String,
    /// Model log-likelihood (higher = more planar).
    pub score: f64,
    pub label: Label,
    pub sublabel: Option<String>,
    pub deviation_distance_m: Option<f64>,
}

/// Detection rate within one distance bucket `(lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DistanceBucket {
    pub lo_m: f64,
    pub hi_m: f64,
    pub total: usize,
    pub detected: usize,
    pub rate: f64,
}

/// Scores, ROC, AUROC breakdowns and the FPR-budgeted detection table for
/// one fitted model on one test set.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalReport {
    pub method: String,
    pub components: usize,
    pub train_frames: usize,
    pub scores: Vec<ScoreRow>,
    pub roc: Vec<RocPoint>,
    pub auroc: f64,
    /// AUROC per deviation sublabel against all planar test frames.
    pub per_group_auroc: BTreeMap<String, f64>,
    /// Log-likelihood threshold meeting the FPR budget on test negatives.
    pub threshold_at_fpr: f64,
    pub max_fpr: f64,
    pub achieved_fpr: f64,
    pub detection_by_distance: Vec<DistanceBucket>,
}

/// One surface's AUROC under the three training-set compositions.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SurfaceSplitRow {
    pub surface: String,
    pub all: f64,
    pub test_only: f64,
    pub all_but_test: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SurfaceSplitReport {
    pub rows: Vec<SurfaceSplitRow>,
    pub average: SurfaceSplitRow,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AblationRow {
    pub name: String,
    pub ambient_correction: bool,
    pub normalization: bool,
    pub single_component: bool,
    pub auroc: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AblationReport {
    pub rows: Vec<AblationRow>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepPoint {
    pub per_surface: usize,
    pub total: usize,
    pub min: f64,
    pub mean: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SampleSweepReport {
    pub points: Vec<SweepPoint>,
}

/// Output of [`run_protocol`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ProtocolReport {
    Single(EvalReport),
    SurfaceSplits(SurfaceSplitReport),
    Ablation(AblationReport),
    SampleSweep(SampleSweepReport),
}

/// Feature vectors for a set of frames under one method.
pub fn extract_features(
    frames: &[&Frame],
    method: Method,
    preprocess_config: &PreprocessConfig,
    peak_config: &PeakConfig,
) -> Result<Vec<Vec<f64>>> {
    frames
        .iter()
        .map(|f| match method {
            Method::Histogram => preprocess(f, preprocess_config).map(|p| p.values),
            Method::Peaks => peaks_feature(f, peak_config).map(|d| d.values),
            Method::Onboard => onboard_feature(f).map(|d| d.values),
        })
        .collect()
}

fn sorted_refs(frames: &[Frame]) -> Vec<&Frame> {
    let mut refs: Vec<&Frame> = frames.iter().collect();
    refs.sort_by(|a, b| a.capture_id.cmp(&b.capture_id));
    refs
}

/// Indices (into the sorted view) of the training half: for each surface,
/// the first half of its planar frames by capture id.
fn train_half(frames: &[&Frame]) -> Vec<usize> {
    let mut by_surface: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, f) in frames.iter().enumerate() {
        if f.label == Label::Planar {
            by_surface.entry(&f.surface_id).or_default().push(i);
        }
    }
    let mut train = Vec::new();
    for planar in by_surface.values() {
        train.extend_from_slice(&planar[..planar.len() / 2]);
    }
    train.sort_unstable();
    train
}

fn fit_on(
    frames: &[&Frame],
    indices: &[usize],
    config: &ProtocolConfig,
    fit: &FitConfig,
) -> Result<SurfaceModel> {
    if indices.is_empty() {
        return Err(Error::invalid("no planar frames to fit on"));
    }
    let train: Vec<&Frame> = indices.iter().map(|&i| frames[i]).collect();
    let features = extract_features(&train, config.method, &config.preprocess, &config.peak)?;
    let mut outcome = select_components(&features, fit)?;
    outcome.model.preprocess = config.preprocess.clone();
    Ok(outcome.model)
}

fn score_frames(
    model: &SurfaceModel,
    frames: &[&Frame],
    config: &ProtocolConfig,
) -> Result<Vec<ScoreRow>> {
    let features = extract_features(frames, config.method, &config.preprocess, &config.peak)?;
    frames
        .iter()
        .zip(&features)
        .map(|(f, feat)| {
            Ok(ScoreRow {
                capture_id: f.capture_id.clone(),
                surface_id: f.surface_id.clone(),
                score: score_with(model, feat, model.score_form)?,
                label: f.label,
                sublabel: f.sublabel.clone(),
                deviation_distance_m: f.deviation_distance_m,
            })
        })
        .collect()
}

fn auroc_of(rows: &[ScoreRow]) -> Result<f64> {
    let anomaly: Vec<f64> = rows.iter().map(|r| -r.score).collect();
    let labels: Vec<bool> = rows.iter().map(|r| r.label == Label::Deviation).collect();
    Ok(compute_roc(&anomaly, &labels)?.auroc)
}

/// Assemble the full report from scored test rows.
pub fn build_report(
    method: Method,
    components: usize,
    train_frames: usize,
    rows: Vec<ScoreRow>,
    config: &ProtocolConfig,
) -> Result<EvalReport> {
    let anomaly: Vec<f64> = rows.iter().map(|r| -r.score).collect();
    let labels: Vec<bool> = rows.iter().map(|r| r.label == Label::Deviation).collect();
    let roc = compute_roc(&anomaly, &labels)?;

    let negatives: Vec<f64> = rows
        .iter()
        .filter(|r| r.label == Label::Planar)
        .map(|r| r.score)
        .collect();
    let threshold = threshold_at_fpr(&negatives, config.max_fpr)?;
    let achieved_fpr = fpr_at_threshold(&negatives, threshold);

    let mut per_group_auroc = BTreeMap::new();
    let groups: alloc::collections::BTreeSet<String> = rows
        .iter()
        .filter(|r| r.label == Label::Deviation)
        .filter_map(|r| r.sublabel.clone())
        .collect();
    for group in groups {
        let subset: Vec<&ScoreRow> = rows
            .iter()
            .filter(|r| {
                r.label == Label::Planar || r.sublabel.as_deref() == Some(group.as_str())
            })
            .collect();
        let anomaly: Vec<f64> = subset.iter().map(|r| -r.score).collect();
        let labels: Vec<bool> = subset.iter().map(|r| r.label == Label::Deviation).collect();
        per_group_auroc.insert(group, compute_roc(&anomaly, &labels)?.auroc);
    }

    let detection_by_distance =
        detection_by_distance(&rows, threshold, config.bucket_start_m, config.bucket_width_m, config.bucket_end_m);

    Ok(EvalReport {
        method: method.name().to_string(),
        components,
        train_frames,
        auroc: roc.auroc,
        roc: roc.points,
        scores: rows,
        per_group_auroc,
        threshold_at_fpr: threshold,
        max_fpr: config.max_fpr,
        achieved_fpr,
        detection_by_distance,
    })
}

/// Detection rates of labeled deviations in `(lo, hi]` distance buckets,
/// using `score < threshold` as a detection. Empty buckets are omitted.
pub fn detection_by_distance(
    rows: &[ScoreRow],
    threshold: f64,
    start_m: f64,
    width_m: f64,
    end_m: f64,
) -> Vec<DistanceBucket> {
    let mut buckets = Vec::new();
    if !(width_m > 0.0) {
        return buckets;
    }
    let count = ((end_m - start_m) / width_m + 0.5) as usize;
    for b in 0..count {
        let lo = start_m + b as f64 * width_m;
        let hi = lo + width_m;
        let mut total = 0;
        let mut detected = 0;
        for r in rows {
            if r.label != Label::Deviation {
                continue;
            }
            let Some(d) = r.deviation_distance_m else {
                continue;
            };
            if d > lo && d <= hi {
                total += 1;
                if r.score < threshold {
                    detected += 1;
                }
            }
        }
        if total > 0 {
            buckets.push(DistanceBucket {
                lo_m: lo,
                hi_m: hi,
                total,
                detected,
                rate: detected as f64 / total as f64,
            });
        }
    }
    buckets
}

/// Detection rate per exact labeled distance (for sweeps where every
/// deviation sits at one of a few distances).
pub fn detection_by_exact_distance(rows: &[ScoreRow], threshold: f64) -> Vec<DistanceBucket> {
    let mut grouped: BTreeMap<u64, (f64, usize, usize)> = BTreeMap::new();
    for r in rows {
        if r.label != Label::Deviation {
            continue;
        }
        let Some(d) = r.deviation_distance_m else {
            continue;
        };
        let key = (d * 1e6) as u64;
        let entry = grouped.entry(key).or_insert((d, 0, 0));
        entry.1 += 1;
        if r.score < threshold {
            entry.2 += 1;
        }
    }
    grouped
        .into_values()
        .map(|(d, total, detected)| DistanceBucket {
            lo_m: d,
            hi_m: d,
            total,
            detected,
            rate: detected as f64 / total as f64,
        })
        .collect()
}

/// Run one protocol over a labeled dataset.
///
/// `external_model` supplies a pre-fitted surface model; protocols that fit
/// internally ignore it, while `CliffRange` prefers it (matching the flow
/// where the model comes from separate planar captures) and only falls back
/// to an internal half-split of the dataset's planar frames.
pub fn run_protocol(
    protocol: Protocol,
    frames: &[Frame],
    config: &ProtocolConfig,
    external_model: Option<&SurfaceModel>,
) -> Result<ProtocolReport> {
    let sorted = sorted_refs(frames);
    if sorted.is_empty() {
        return Err(Error::invalid("empty dataset"));
    }
    match protocol {
        Protocol::PerObject | Protocol::ByDistance => {
            let train = train_half(&sorted);
            let model = fit_on(&sorted, &train, config, &config.fit)?;
            let test: Vec<&Frame> = test_complement(&sorted, &train);
            let rows = score_frames(&model, &test, config)?;
            let report = build_report(
                config.method,
                model.component_count(),
                train.len(),
                rows,
                config,
            )?;
            Ok(ProtocolReport::Single(report))
        }
        Protocol::CliffRange => {
            let train = train_half(&sorted);
            let (model, train_len, test): (SurfaceModel, usize, Vec<&Frame>) = match external_model
            {
                Some(m) => (m.clone(), m.calibration().len(), sorted.clone()),
                None => {
                    let model = fit_on(&sorted, &train, config, &config.fit)?;
                    (model, train.len(), test_complement(&sorted, &train))
                }
            };
            let rows = score_frames(&model, &test, config)?;
            let mut report = build_report(
                config.method,
                model.component_count(),
                train_len,
                rows,
                config,
            )?;
            report.detection_by_distance =
                detection_by_exact_distance(&report.scores, report.threshold_at_fpr);
            Ok(ProtocolReport::Single(report))
        }
        Protocol::SurfaceSplits => surface_splits(&sorted, config).map(ProtocolReport::SurfaceSplits),
        Protocol::Ablation => ablation(&sorted, config).map(ProtocolReport::Ablation),
        Protocol::SampleSweep => sample_sweep(&sorted, config).map(ProtocolReport::SampleSweep),
    }
}

fn test_complement<'a>(sorted: &[&'a Frame], train: &[usize]) -> Vec<&'a Frame> {
    let train_set: alloc::collections::BTreeSet<usize> = train.iter().copied().collect();
    sorted
        .iter()
        .enumerate()
        .filter(|(i, _)| !train_set.contains(i))
        .map(|(_, f)| *f)
        .collect()
}

fn surface_splits(sorted: &[&Frame], config: &ProtocolConfig) -> Result<SurfaceSplitReport> {
    let train_all = train_half(sorted);
    let surfaces: Vec<String> = {
        let mut ids: Vec<String> = Vec::new();
        for f in sorted {
            if !ids.contains(&f.surface_id) {
                ids.push(f.surface_id.clone());
            }
        }
        ids.sort();
        ids
    };
    if surfaces.len() < 2 {
        return Err(Error::invalid("surface splits need at least two surfaces"));
    }

    let mut rows = Vec::new();
    for surface in &surfaces {
        let train_test_only: Vec<usize> = train_all
            .iter()
            .copied()
            .filter(|&i| sorted[i].surface_id == *surface)
            .collect();
        let train_all_but: Vec<usize> = train_all
            .iter()
            .copied()
            .filter(|&i| sorted[i].surface_id != *surface)
            .collect();

        // Test frames of this surface that are in no training set.
        let train_set: alloc::collections::BTreeSet<usize> = train_all.iter().copied().collect();
        let test: Vec<&Frame> = sorted
            .iter()
            .enumerate()
            .filter(|(i, f)| f.surface_id == *surface && !train_set.contains(i))
            .map(|(_, f)| *f)
            .collect();

        let cell = |train_idx: &[usize]| -> Result<f64> {
            let model = fit_on(sorted, train_idx, config, &config.fit)?;
            let rows = score_frames(&model, &test, config)?;
            auroc_of(&rows)
        };
        rows.push(SurfaceSplitRow {
            surface: surface.clone(),
            all: cell(&train_all)?,
            test_only: cell(&train_test_only)?,
            all_but_test: cell(&train_all_but)?,
        });
    }

    let n = rows.len() as f64;
    let average = SurfaceSplitRow {
        surface: "average".to_string(),
        all: rows.iter().map(|r| r.all).sum::<f64>() / n,
        test_only: rows.iter().map(|r| r.test_only).sum::<f64>() / n,
        all_but_test: rows.iter().map(|r| r.all_but_test).sum::<f64>() / n,
    };
    Ok(SurfaceSplitReport { rows, average })
}

fn ablation(sorted: &[&Frame], config: &ProtocolConfig) -> Result<AblationReport> {
    // The six configurations: base, each pre-processing step removed, both
    // removed, one mixture component, and everything at once.
    let variants: [(&str, bool, bool, bool); 6] = [
        ("base", true, true, false),
        ("no_ambient_correction", false, true, false),
        ("no_normalization", true, false, false),
        ("no_norm_no_ambient", false, false, false),
        ("single_component", true, true, true),
        ("all_ablated", false, false, true),
    ];

    let train = train_half(sorted);
    let mut rows = Vec::new();
    for (name, ambient, norm, single) in variants {
        let mut cfg = config.clone();
        cfg.method = Method::Histogram;
        cfg.preprocess.ambient_correction = ambient;
        cfg.preprocess.normalization = norm;
        let mut fit = cfg.fit.clone();
        if single {
            fit.component_min = 1;
            fit.component_max = 1;
        }
        let model = fit_on(sorted, &train, &cfg, &fit)?;
        let test = test_complement(sorted, &train);
        let scored = score_frames(&model, &test, &cfg)?;
        rows.push(AblationRow {
            name: name.to_string(),
            ambient_correction: ambient,
            normalization: norm,
            single_component: single,
            auroc: auroc_of(&scored)?,
        });
    }
    Ok(AblationReport { rows })
}

fn sample_sweep(sorted: &[&Frame], config: &ProtocolConfig) -> Result<SampleSweepReport> {
    let train = train_half(sorted);
    let test = test_complement(sorted, &train);
    let test_features = extract_features(&test, config.method, &config.preprocess, &config.peak)?;
    let test_labels: Vec<bool> = test.iter().map(|f| f.label == Label::Deviation).collect();

    let mut by_surface: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for &i in &train {
        by_surface.entry(&sorted[i].surface_id).or_default().push(i);
    }

    let mut points = Vec::new();
    for &per_surface in &config.sweep_counts {
        if by_surface.values().any(|v| v.len() < per_surface) {
            continue;
        }
        let mut aurocs = Vec::with_capacity(config.sweep_repeats);
        for rep in 0..config.sweep_repeats {
            let mut subset = Vec::new();
            for (si, planar) in by_surface.values().enumerate() {
                let stream = derive_seed(
                    0x5eed_5eed,
                    (per_surface as u64) << 32 | (rep as u64) << 8 | si as u64,
                );
                let mut rng = rng_for(config.seed, stream);
                let mut pool = planar.clone();
                // Partial Fisher-Yates: the first per_surface entries.
                for j in 0..per_surface {
                    let pick = j + rng.gen_range(0..pool.len() - j);
                    pool.swap(j, pick);
                }
                subset.extend_from_slice(&pool[..per_surface]);
            }
            subset.sort_unstable();
            let model = fit_on(sorted, &subset, config, &config.fit)?;
            let scores: Vec<f64> = test_features
                .iter()
                .map(|f| score_with(&model, f, model.score_form).map(|s| -s))
                .collect::<Result<_>>()?;
            aurocs.push(compute_roc(&scores, &test_labels)?.auroc);
        }
        if aurocs.is_empty() {
            continue;
        }
        let min = aurocs.iter().copied().fold(f64::INFINITY, f64::min);
        let max = aurocs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = aurocs.iter().sum::<f64>() / aurocs.len() as f64;
        points.push(SweepPoint {
            per_surface,
            total: per_surface * by_surface.len(),
            min,
            mean,
            max,
        });
    }
    Ok(SampleSweepReport { points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{generate_experiment, ExperimentKind, ExperimentParams};
    use rand::seq::SliceRandom;

    fn small_forward_dataset() -> Vec<Frame> {
        let params = ExperimentParams {
            planar_per_surface: 8,
            placements_per_object: 2,
            ..ExperimentParams::default()
        };
        generate_experiment(ExperimentKind::ForwardFacing, &params, 1234).unwrap()
    }

    fn quick_config() -> ProtocolConfig {
        ProtocolConfig {
            fit: FitConfig {
                component_max: 4,
                restarts: 2,
                ..FitConfig::default()
            },
            ..ProtocolConfig::default()
        }
    }

    #[test]
    fn per_object_report_has_group_breakdown() {
        let frames = small_forward_dataset();
        let report = run_protocol(Protocol::PerObject, &frames, &quick_config(), None).unwrap();
        let ProtocolReport::Single(report) = report else {
            panic!("expected single report");
        };
        assert_eq!(report.per_group_auroc.len(), 8);
        assert!(report.auroc > 0.5);
        assert!(report.achieved_fpr < 0.05);
        // 4 planar of 8 per surface train; the rest is test.
        assert_eq!(report.train_frames, 20);
        assert_eq!(report.scores.len(), frames.len() - 20);
    }

    #[test]
    fn shuffled_rows_change_nothing() {
        let frames = small_forward_dataset();
        let mut shuffled = frames.clone();
        shuffled.shuffle(&mut crate::rng::rng_for(5, 5));
        let cfg = quick_config();
        let a = run_protocol(Protocol::PerObject, &frames, &cfg, None).unwrap();
        let b = run_protocol(Protocol::PerObject, &shuffled, &cfg, None).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ablation_emits_exactly_six_rows() {
        let frames = small_forward_dataset();
        let report = run_protocol(Protocol::Ablation, &frames, &quick_config(), None).unwrap();
        let ProtocolReport::Ablation(report) = report else {
            panic!("expected ablation report");
        };
        assert_eq!(report.rows.len(), 6);
        let names: Vec<&str> = report.rows.iter().map(|r| r.name.as_str()).collect();
        assert_eq!(
            names,
            [
                "base",
                "no_ambient_correction",
                "no_normalization",
                "no_norm_no_ambient",
                "single_component",
                "all_ablated"
            ]
        );
    }

    #[test]
    fn surface_splits_have_matrix_shape() {
        let frames = small_forward_dataset();
        let mut cfg = quick_config();
        cfg.fit.component_max = 2;
        let report = run_protocol(Protocol::SurfaceSplits, &frames, &cfg, None).unwrap();
        let ProtocolReport::SurfaceSplits(report) = report else {
            panic!("expected surface splits");
        };
        assert_eq!(report.rows.len(), 5);
        for row in &report.rows {
            for v in [row.all, row.test_only, row.all_but_test] {
                assert!((0.0..=1.0).contains(&v));
            }
        }
        assert_eq!(report.average.surface, "average");
    }

    #[test]
    fn sample_sweep_bands_are_ordered() {
        let frames = small_forward_dataset();
        let mut cfg = quick_config();
        cfg.sweep_counts = alloc::vec![1, 2, 4];
        cfg.sweep_repeats = 5;
        cfg.fit.component_max = 2;
        let report = run_protocol(Protocol::SampleSweep, &frames, &cfg, None).unwrap();
        let ProtocolReport::SampleSweep(report) = report else {
            panic!("expected sweep");
        };
        assert_eq!(report.points.len(), 3);
        for p in &report.points {
            assert!(p.min <= p.mean && p.mean <= p.max);
        }
    }

    #[test]
    fn cliff_range_reports_exact_distances() {
        let params = ExperimentParams {
            cliff_steps: 5,
            cliff_frames_per_step: 2,
            cliff_planar: 8,
            ..ExperimentParams::default()
        };
        let frames = generate_experiment(ExperimentKind::CliffSweep, &params, 99).unwrap();
        let mut cfg = quick_config();
        cfg.max_fpr = 1e-9;
        let report = run_protocol(Protocol::CliffRange, &frames, &cfg, None).unwrap();
        let ProtocolReport::Single(report) = report else {
            panic!("expected single report");
        };
        assert_eq!(report.detection_by_distance.len(), 5);
        assert_eq!(report.achieved_fpr, 0.0);
    }

    #[test]
    fn missing_planar_frames_is_an_error() {
        let frames: Vec<Frame> = small_forward_dataset()
            .into_iter()
            .filter(|f| f.label == Label::Deviation)
            .collect();
        assert!(run_protocol(Protocol::PerObject, &frames, &quick_config(), None).is_err());
    }
}

//! Command implementations behind the CLI: resolve a configuration from
//! defaults, an optional JSON config file and explicit flags, run the
//! pipeline stage, and write artifacts stamped with the seed and the
//! configuration hash.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use tofplane_core::eval::{run_protocol, Method, Protocol, ProtocolConfig, ScoreRow};
use tofplane_core::mixture::{score_with, select_components, AicForm, FitConfig, ScoreForm};
use tofplane_core::preprocess::PreprocessConfig;
use tofplane_core::sim::{
    generate_experiment, render_frame, ExperimentKind, ExperimentParams, SceneSpec, SensorSpec,
};
use tofplane_core::{Frame, Label};

use crate::dataset::{read_dataset, write_dataset, write_manifest, DatasetManifest};
use crate::model_file::{load_model, save_model, ModelMeta};
use crate::report_io::write_report_bundle;
use crate::{config_hash, RunMeta};

/// Optional values loadable from `--config <file.json>`; explicit flags win
/// over file entries, which win over defaults.
#[derive(Debug, Default, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub method: Option<String>,
    pub kind: Option<String>,
    pub protocol: Option<String>,
    pub bandwidth: Option<f64>,
    pub bin_lo: Option<usize>,
    pub bin_hi: Option<usize>,
    pub ambient_correction: Option<bool>,
    pub normalization: Option<bool>,
    pub components_min: Option<usize>,
    pub components_max: Option<usize>,
    pub restarts: Option<usize>,
    pub max_iters: Option<usize>,
    pub aic_form: Option<String>,
    pub score_form: Option<String>,
    pub max_fpr: Option<f64>,
    pub sweep_counts: Option<Vec<usize>>,
    pub sweep_repeats: Option<usize>,
    pub surface: Option<String>,
    /// Experiment generator overrides.
    pub experiment: Option<ExperimentParams>,
    /// Sensor used by `simulate` (also reachable via `experiment.sensor`).
    pub sensor: Option<SensorSpec>,
    /// Custom scene for `simulate --kind custom`.
    pub scene: Option<SceneSpec>,
    pub count: Option<usize>,
    pub surface_id: Option<String>,
    pub label: Option<String>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let bytes =
                    std::fs::read(p).with_context(|| format!("reading config {}", p.display()))?;
                serde_json::from_slice(&bytes)
                    .with_context(|| format!("parsing config {}", p.display()))
            }
        }
    }
}

/// Flag values shared by fit/score/eval; `None` means "not given".
#[derive(Debug, Default, Clone)]
pub struct PipelineFlags {
    pub seed: Option<u64>,
    pub method: Option<Method>,
    pub bandwidth: Option<f64>,
    pub bin_lo: Option<usize>,
    pub bin_hi: Option<usize>,
    pub no_ambient_correction: bool,
    pub no_normalization: bool,
    pub components_min: Option<usize>,
    pub components_max: Option<usize>,
    pub aic_form: Option<AicForm>,
    pub score_form: Option<ScoreForm>,
    pub max_fpr: Option<f64>,
    pub surface: Option<String>,
}

fn parse_method(s: &str) -> Result<Method> {
    Method::from_name(s).with_context(|| format!("unknown method '{s}'"))
}

fn parse_aic_form(s: &str) -> Result<AicForm> {
    match s {
        "standard" => Ok(AicForm::Standard),
        "literal" | "literal_sum" => Ok(AicForm::LiteralSum),
        other => bail!("unknown aic form '{other}'"),
    }
}

fn parse_score_form(s: &str) -> Result<ScoreForm> {
    match s {
        "eq3" | "per_bin" => Ok(ScoreForm::PerBin),
        "joint" => Ok(ScoreForm::Joint),
        other => bail!("unknown score form '{other}'"),
    }
}

/// The fully resolved pipeline configuration; hashing this yields the
/// config stamp written into artifacts.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedPipeline {
    pub seed: u64,
    pub method: Method,
    pub preprocess: PreprocessConfig,
    pub fit: FitConfig,
    pub max_fpr: f64,
    pub surface: Option<String>,
    pub sweep_counts: Vec<usize>,
    pub sweep_repeats: usize,
}

pub fn resolve_pipeline(file: &FileConfig, flags: &PipelineFlags) -> Result<ResolvedPipeline> {
    let seed = flags.seed.or(file.seed).unwrap_or(0);
    let method = match (&flags.method, &file.method) {
        (Some(m), _) => *m,
        (None, Some(s)) => parse_method(s)?,
        (None, None) => Method::Histogram,
    };
    let defaults = PreprocessConfig::default();
    let preprocess = PreprocessConfig {
        kde_bandwidth: flags
            .bandwidth
            .or(file.bandwidth)
            .unwrap_or(defaults.kde_bandwidth),
        bin_lo: flags.bin_lo.or(file.bin_lo).unwrap_or(defaults.bin_lo),
        bin_hi: flags.bin_hi.or(file.bin_hi).unwrap_or(defaults.bin_hi),
        ambient_correction: if flags.no_ambient_correction {
            false
        } else {
            file.ambient_correction.unwrap_or(true)
        },
        normalization: if flags.no_normalization {
            false
        } else {
            file.normalization.unwrap_or(true)
        },
        normalize_after_subtraction: false,
    };
    let fit_defaults = FitConfig::default();
    let aic_form = match (&flags.aic_form, &file.aic_form) {
        (Some(a), _) => *a,
        (None, Some(s)) => parse_aic_form(s)?,
        (None, None) => AicForm::Standard,
    };
    let score_form = match (&flags.score_form, &file.score_form) {
        (Some(f), _) => *f,
        (None, Some(s)) => parse_score_form(s)?,
        (None, None) => ScoreForm::PerBin,
    };
    let fit = FitConfig {
        component_min: flags
            .components_min
            .or(file.components_min)
            .unwrap_or(fit_defaults.component_min),
        component_max: flags
            .components_max
            .or(file.components_max)
            .unwrap_or(fit_defaults.component_max),
        max_iters: file.max_iters.unwrap_or(fit_defaults.max_iters),
        restarts: file.restarts.unwrap_or(fit_defaults.restarts),
        seed,
        aic_form,
        score_form,
        ..fit_defaults
    };
    Ok(ResolvedPipeline {
        seed,
        method,
        preprocess,
        fit,
        max_fpr: flags.max_fpr.or(file.max_fpr).unwrap_or(0.05),
        surface: flags.surface.clone().or_else(|| file.surface.clone()),
        sweep_counts: file
            .sweep_counts
            .clone()
            .unwrap_or_else(|| ProtocolConfig::default().sweep_counts),
        sweep_repeats: file.sweep_repeats.unwrap_or(100),
    })
}

impl ResolvedPipeline {
    fn protocol_config(&self) -> ProtocolConfig {
        ProtocolConfig {
            method: self.method,
            preprocess: self.preprocess.clone(),
            fit: self.fit.clone(),
            peak: tofplane_core::baseline::PeakConfig {
                kde_bandwidth: self.preprocess.kde_bandwidth,
                ..Default::default()
            },
            max_fpr: self.max_fpr,
            sweep_counts: self.sweep_counts.clone(),
            sweep_repeats: self.sweep_repeats,
            seed: self.seed,
            ..ProtocolConfig::default()
        }
    }
}

#[derive(Serialize)]
struct SimulateResolved<'a> {
    kind: &'a str,
    seed: u64,
    params: &'a ExperimentParams,
    scene: &'a Option<SceneSpec>,
    sensor: &'a Option<SensorSpec>,
    count: usize,
}

pub fn cmd_simulate(
    kind: &str,
    seed: Option<u64>,
    config: &FileConfig,
    output: &Path,
) -> Result<PathBuf> {
    let seed = seed.or(config.seed).unwrap_or(0);
    let mut params = config.experiment.clone().unwrap_or_default();
    if params.sensor.is_none() {
        params.sensor = config.sensor.clone();
    }
    let count = config.count.unwrap_or(30);
    let resolved = SimulateResolved {
        kind,
        seed,
        params: &params,
        scene: &config.scene,
        sensor: &config.sensor,
        count,
    };
    let hash = config_hash(&resolved);

    let frames: Vec<Frame> = if kind == "custom" {
        let scene = config
            .scene
            .as_ref()
            .context("--kind custom requires a scene in the config file")?;
        let sensor = config.sensor.clone().unwrap_or_default();
        let label = match config.label.as_deref() {
            Some("deviation") => Label::Deviation,
            _ => Label::Planar,
        };
        let surface_id = config.surface_id.clone().unwrap_or_else(|| "custom".into());
        (0..count)
            .map(|i| {
                render_frame(
                    &sensor,
                    scene,
                    seed.wrapping_add(i as u64),
                    format!("custom_{i:04}"),
                    surface_id.clone(),
                    label,
                )
                .map_err(anyhow::Error::from)
            })
            .collect::<Result<_>>()?
    } else {
        let kind = ExperimentKind::from_name(kind)
            .with_context(|| format!("unknown experiment kind '{kind}'"))?;
        generate_experiment(kind, &params, seed)?
    };

    write_dataset(&frames, output)?;
    write_manifest(
        output,
        &DatasetManifest {
            meta: RunMeta {
                seed,
                config_hash: hash,
            },
            kind: kind.to_string(),
            frames: frames.len(),
        },
    )?;
    Ok(output.to_path_buf())
}

/// Features for a set of frames under the resolved method.
fn features_for(
    frames: &[&Frame],
    method: Method,
    preprocess: &PreprocessConfig,
) -> Result<Vec<Vec<f64>>> {
    let peak = tofplane_core::baseline::PeakConfig {
        kde_bandwidth: preprocess.kde_bandwidth,
        ..Default::default()
    };
    Ok(tofplane_core::eval::extract_features(
        frames, method, preprocess, &peak,
    )?)
}

pub fn cmd_fit(input: &Path, output: &Path, resolved: &ResolvedPipeline) -> Result<()> {
    let frames = read_dataset(input)?;
    let mut planar: Vec<&Frame> = frames
        .iter()
        .filter(|f| f.label == Label::Planar)
        .filter(|f| {
            resolved
                .surface
                .as_deref()
                .is_none_or(|s| f.surface_id == s)
        })
        .collect();
    planar.sort_by(|a, b| a.capture_id.cmp(&b.capture_id));
    if planar.is_empty() {
        bail!("no planar frames to fit on in {}", input.display());
    }
    let features = features_for(&planar, resolved.method, &resolved.preprocess)?;
    let mut outcome = select_components(&features, &resolved.fit)?;
    outcome.model.preprocess = resolved.preprocess.clone();
    save_model(
        &outcome.model,
        &ModelMeta {
            method: resolved.method,
            aic_trace: outcome.trace,
            run: RunMeta {
                seed: resolved.seed,
                config_hash: config_hash(resolved),
            },
        },
        output,
    )
}

#[derive(Serialize, Deserialize)]
pub struct ScoresFile {
    #[serde(flatten)]
    pub meta: RunMeta,
    pub model_hash: String,
    pub rows: Vec<ScoreRow>,
}

pub fn cmd_score(
    input: &Path,
    model_path: &Path,
    output: &Path,
    resolved: &ResolvedPipeline,
    score_form_override: Option<ScoreForm>,
) -> Result<()> {
    let (model, meta) = load_model(model_path)?;
    let frames = read_dataset(input)?;
    let refs: Vec<&Frame> = frames.iter().collect();
    let features = features_for(&refs, meta.method, &model.preprocess)?;
    let form = score_form_override.unwrap_or(model.score_form);
    let rows: Vec<ScoreRow> = refs
        .iter()
        .zip(&features)
        .map(|(f, feat)| -> Result<ScoreRow> {
            Ok(ScoreRow {
                capture_id: f.capture_id.clone(),
                surface_id: f.surface_id.clone(),
                score: score_with(&model, feat, form)?,
                label: f.label,
                sublabel: f.sublabel.clone(),
                deviation_distance_m: f.deviation_distance_m,
            })
        })
        .collect::<Result<_>>()?;
    let file = ScoresFile {
        meta: RunMeta {
            seed: resolved.seed,
            config_hash: config_hash(resolved),
        },
        model_hash: meta.run.config_hash,
        rows,
    };
    let mut bytes = serde_json::to_vec_pretty(&file)?;
    bytes.push(b'\n');
    crate::write_atomic(output, &bytes)
}

pub fn cmd_eval(
    input: &Path,
    output_dir: &Path,
    protocol: &str,
    resolved: &ResolvedPipeline,
    model_path: Option<&Path>,
) -> Result<()> {
    let protocol = Protocol::from_name(protocol)
        .with_context(|| format!("unknown protocol '{protocol}'"))?;
    let frames = read_dataset(input)?;
    let external = match model_path {
        Some(p) => Some(load_model(p)?.0),
        None => None,
    };
    let report = run_protocol(
        protocol,
        &frames,
        &resolved.protocol_config(),
        external.as_ref(),
    )?;
    write_report_bundle(
        output_dir,
        protocol.name(),
        &report,
        &RunMeta {
            seed: resolved.seed,
            config_hash: config_hash(resolved),
        },
    )
}

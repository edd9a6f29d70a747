//! Versioned JSON surface-model files.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use tofplane_core::eval::Method;
use tofplane_core::mixture::{AicForm, AicPoint, ScoreForm, SurfaceModel};
use tofplane_core::preprocess::PreprocessConfig;

use crate::RunMeta;

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// On-disk model layout. `means` is row-per-component.
#[derive(Debug, Serialize, Deserialize)]
struct ModelFile {
    version: u32,
    c: usize,
    k: usize,
    means: Vec<Vec<f64>>,
    variances: Vec<f64>,
    weights: Vec<f64>,
    preprocess: PreprocessConfig,
    calibration_scores: Vec<f64>,
    aic: Option<f64>,
    aic_form: AicForm,
    score_form: ScoreForm,
    method: Method,
    #[serde(default)]
    aic_trace: Vec<AicPoint>,
    seed: u64,
    config_hash: String,
}

/// Everything a fit run persists besides the model parameters.
#[derive(Debug, Clone)]
pub struct ModelMeta {
    pub method: Method,
    pub aic_trace: Vec<AicPoint>,
    pub run: RunMeta,
}

pub fn save_model(model: &SurfaceModel, meta: &ModelMeta, path: &Path) -> Result<()> {
    let c = model.component_count();
    let file = ModelFile {
        version: MODEL_FORMAT_VERSION,
        c,
        k: model.feature_dim(),
        means: (0..c).map(|j| model.mean_row(j).to_vec()).collect(),
        variances: model.variances().to_vec(),
        weights: model.weights().to_vec(),
        preprocess: model.preprocess.clone(),
        calibration_scores: model.calibration().to_vec(),
        aic: model.aic,
        aic_form: model.aic_form,
        score_form: model.score_form,
        method: meta.method,
        aic_trace: meta.aic_trace.clone(),
        seed: meta.run.seed,
        config_hash: meta.run.config_hash.clone(),
    };
    let mut bytes = serde_json::to_vec_pretty(&file)?;
    bytes.push(b'\n');
    crate::write_atomic(path, &bytes)
}

pub fn load_model(path: &Path) -> Result<(SurfaceModel, ModelMeta)> {
    let bytes = std::fs::read(path)
        .with_context(|| format!("reading model {}", path.display()))?;
    let file: ModelFile = serde_json::from_slice(&bytes)
        .with_context(|| format!("parsing model {}", path.display()))?;
    if file.version != MODEL_FORMAT_VERSION {
        bail!(
            "model {} has format version {}, expected {MODEL_FORMAT_VERSION}",
            path.display(),
            file.version
        );
    }
    let means: Vec<f64> = file.means.iter().flatten().copied().collect();
    let mut model = SurfaceModel::from_parts(
        means,
        file.variances,
        file.weights,
        file.c,
        file.k,
        file.preprocess,
        file.score_form,
        file.aic_form,
    )
    .map_err(|e| anyhow::anyhow!("model {} is inconsistent: {e}", path.display()))?;
    model.aic = file.aic;
    model.set_calibration(file.calibration_scores);
    Ok((
        model,
        ModelMeta {
            method: file.method,
            aic_trace: file.aic_trace,
            run: RunMeta {
                seed: file.seed,
                config_hash: file.config_hash,
            },
        },
    ))
}

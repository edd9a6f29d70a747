//! Tied-variance Gaussian mixture surface model.
//!
//! Each component has a full per-bin mean vector but a single scalar
//! variance shared across all bins, so a fitted model is a per-bin mixture
//! with tied variances, weights and component count. Fitting maximizes the
//! joint spherical-mixture likelihood with EM; scoring defaults to the
//! per-bin product form (sum over components inside, product over bins
//! outside) with the joint form available as an alternative.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::math;
use crate::preprocess::{PreprocessConfig, ProcessedFeature};
use crate::{Error, Result};

/// Anything that exposes a flat feature vector can drive the mixture.
pub trait FeatureVec {
    fn values(&self) -> &[f64];
}

impl FeatureVec for ProcessedFeature {
    fn values(&self) -> &[f64] {
        &self.values
    }
}

impl FeatureVec for Vec<f64> {
    fn values(&self) -> &[f64] {
        self
    }
}

impl FeatureVec for &[f64] {
    fn values(&self) -> &[f64] {
        self
    }
}

/// Which likelihood the model reports for a query feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ScoreForm {
    /// Product over bins of the per-bin component mixture (the default).
    #[default]
    PerBin,
    /// Mixture of joint spherical Gaussians (the quantity EM optimizes).
    Joint,
}

/// Log-likelihood aggregate used inside the AIC.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum AicForm {
    /// Sum of per-sample log-likelihoods (the default).
    #[default]
    Standard,
    /// Log of the summed per-sample likelihoods. Underflows for long
    /// features; kept selectable for comparison.
    LiteralSum,
}

/// EM fitting and model-selection parameters.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FitConfig {
    pub component_min: usize,
    pub component_max: usize,
    pub max_iters: usize,
    /// Relative change of total log-likelihood that counts as converged.
    pub rel_tol: f64,
    pub restarts: usize,
    pub seed: u64,
    pub variance_floor: f64,
    pub aic_form: AicForm,
    pub score_form: ScoreForm,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            component_min: 1,
            component_max: 16,
            max_iters: 200,
            rel_tol: 1e-6,
            restarts: 5,
            seed: 0,
            variance_floor: 1e-10,
            aic_form: AicForm::Standard,
            score_form: ScoreForm::PerBin,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.component_min < 1 || self.component_min > self.component_max {
            return Err(Error::invalid("component range must satisfy 1 <= min <= max"));
        }
        if self.component_max > 64 {
            return Err(Error::invalid("component range must stay within [1, 64]"));
        }
        if self.max_iters < 1 || self.restarts < 1 {
            return Err(Error::invalid("max_iters and restarts must be >= 1"));
        }
        if !(self.variance_floor > 0.0) {
            return Err(Error::invalid("variance floor must be positive"));
        }
        Ok(())
    }
}

/// A fitted surface model. Immutable after fitting; construct via
/// [`fit_em`]/[`select_components`] or [`SurfaceModel::from_parts`].
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceModel {
    means: Vec<f64>,
    variances: Vec<f64>,
    weights: Vec<f64>,
    component_count: usize,
    feature_dim: usize,
    pub preprocess: PreprocessConfig,
    /// Sorted training-set scores used to map a score to a percentile.
    calibration: Vec<f64>,
    pub score_form: ScoreForm,
    pub aic_form: AicForm,
    /// AIC of this model on its training set, when chosen by selection.
    pub aic: Option<f64>,
}

impl SurfaceModel {
    /// Assemble a model from raw parameters, checking the invariants
    /// (weights sum to one, variances at/above the floor, matrix shape).
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        means: Vec<f64>,
        variances: Vec<f64>,
        weights: Vec<f64>,
        component_count: usize,
        feature_dim: usize,
        preprocess: PreprocessConfig,
        score_form: ScoreForm,
        aic_form: AicForm,
    ) -> Result<Self> {
        if component_count == 0 || feature_dim == 0 {
            return Err(Error::invalid("component count and feature dim must be positive"));
        }
        if means.len() != component_count * feature_dim {
            return Err(Error::invalid("means matrix shape mismatch"));
        }
        if variances.len() != component_count || weights.len() != component_count {
            return Err(Error::invalid("variances/weights length mismatch"));
        }
        let wsum: f64 = weights.iter().sum();
        if (wsum - 1.0).abs() > 1e-9 || weights.iter().any(|&w| w < 0.0) {
            return Err(Error::invalid("weights must be non-negative and sum to 1"));
        }
        if variances.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::invalid("variances must be positive"));
        }
        Ok(Self {
            means,
            variances,
            weights,
            component_count,
            feature_dim,
            preprocess,
            calibration: Vec::new(),
            score_form,
            aic_form,
            aic: None,
        })
    }

    pub fn component_count(&self) -> usize {
        self.component_count
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    /// Mean vector of component `j`.
    pub fn mean_row(&self, j: usize) -> &[f64] {
        &self.means[j * self.feature_dim..(j + 1) * self.feature_dim]
    }

    pub fn variances(&self) -> &[f64] {
        &self.variances
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn calibration(&self) -> &[f64] {
        &self.calibration
    }

    /// Install sorted training scores for percentile calibration.
    pub fn set_calibration(&mut self, mut scores: Vec<f64>) {
        scores.sort_by(f64::total_cmp);
        self.calibration = scores;
    }

    /// Fraction of calibration scores at or below `score`.
    pub fn percentile(&self, score: f64) -> Result<f64> {
        if self.calibration.is_empty() {
            return Err(Error::Uncalibrated);
        }
        let at_or_below = self.calibration.partition_point(|&s| s <= score);
        Ok(at_or_below as f64 / self.calibration.len() as f64)
    }
}

/// Everything [`fit_em`] learned for one component count.
#[derive(Debug, Clone)]
pub struct FitOutcome {
    pub model: SurfaceModel,
    /// Final training log-likelihood of the winning restart.
    pub log_likelihood: f64,
    /// Per-restart log-likelihood trajectories (one entry per iteration).
    pub ll_traces: Vec<Vec<f64>>,
    pub best_restart: usize,
}

/// AIC of one candidate component count.
#[derive(Debug, Clone, Copy)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AicPoint {
    pub components: usize,
    pub aic: f64,
    pub log_likelihood: f64,
}

/// Result of the AIC search over component counts.
#[derive(Debug, Clone)]
pub struct SelectOutcome {
    pub model: SurfaceModel,
    pub trace: Vec<AicPoint>,
}

/// AIC parameter count for `c` components over `k` bins: one mean per
/// component per bin plus a variance and a weight per component.
pub fn aic_parameter_count(components: usize, feature_dim: usize) -> usize {
    feature_dim * components + 2 * components
}

struct Problem<'a> {
    data: Vec<&'a [f64]>,
    dim: usize,
}

fn check_features<F: FeatureVec>(features: &[F]) -> Result<Problem<'_>> {
    if features.is_empty() {
        return Err(Error::invalid("no features"));
    }
    let dim = features[0].values().len();
    if dim == 0 {
        return Err(Error::invalid("features are empty vectors"));
    }
    let mut data = Vec::with_capacity(features.len());
    for (i, f) in features.iter().enumerate() {
        let v = f.values();
        if v.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: v.len(),
            });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid(alloc::format!(
                "feature {i} contains non-finite values"
            )));
        }
        data.push(v);
    }
    Ok(Problem {
        data,
        dim,
    })
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Greedy farthest-point seeding: a random first center, then repeatedly the
/// point farthest from the chosen set (ties toward the lower index).
fn seed_means(data: &[&[f64]], c: usize, rng: &mut impl Rng) -> Vec<f64> {
    let dim = data[0].len();
    let mut means = Vec::with_capacity(c * dim);
    let first = rng.gen_range(0..data.len());
    means.extend_from_slice(data[first]);
    let mut min_dist: Vec<f64> = data.iter().map(|x| squared_distance(x, data[first])).collect();
    for _ in 1..c {
        let mut best = (0usize, f64::NEG_INFINITY);
        for (i, &d) in min_dist.iter().enumerate() {
            if d > best.1 {
                best = (i, d);
            }
        }
        means.extend_from_slice(data[best.0]);
        for (i, x) in data.iter().enumerate() {
            let d = squared_distance(x, data[best.0]);
            if d < min_dist[i] {
                min_dist[i] = d;
            }
        }
    }
    means
}

fn pooled_variance(data: &[&[f64]], dim: usize) -> f64 {
    let n = data.len() as f64;
    let mut mean = vec![0.0; dim];
    for x in data {
        for (m, v) in mean.iter_mut().zip(*x) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    let mut ss = 0.0;
    for x in data {
        ss += squared_distance(x, &mean);
    }
    ss / (n * dim as f64)
}

/// Fit a `c`-component tied-variance mixture by EM.
///
/// Runs `config.restarts` seeded initializations and keeps the restart with
/// the highest final training log-likelihood (earliest restart on ties).
/// The per-iteration log-likelihood is non-decreasing within each restart.
pub fn fit_em<F: FeatureVec>(features: &[F], c: usize, config: &FitConfig) -> Result<FitOutcome> {
    config.validate()?;
    let problem = check_features(features)?;
    if c == 0 {
        return Err(Error::invalid("component count must be >= 1"));
    }
    if problem.data.len() < c {
        return Err(Error::invalid(alloc::format!(
            "{} samples cannot support {c} components",
            problem.data.len()
        )));
    }

    let n = problem.data.len();
    let k = problem.dim;
    let base_variance = pooled_variance(&problem.data, k).max(config.variance_floor);

    let mut best: Option<(f64, usize, Vec<f64>, Vec<f64>, Vec<f64>)> = None;
    let mut traces = Vec::with_capacity(config.restarts);

    for restart in 0..config.restarts {
        let stream = (c as u64) << 32 | restart as u64;
        let mut rng = crate::rng::rng_for(config.seed, stream);
        let mut means = seed_means(&problem.data, c, &mut rng);
        let mut variances = vec![base_variance; c];
        let mut weights = vec![1.0 / c as f64; c];

        let mut resp = vec![0.0; n * c];
        let mut trace: Vec<f64> = Vec::new();
        let mut prev_ll = f64::NEG_INFINITY;

        for _iter in 0..config.max_iters {
            // E-step in log space.
            let mut ll = 0.0;
            let mut log_terms = vec![0.0; c];
            for (i, x) in problem.data.iter().enumerate() {
                for j in 0..c {
                    let var = variances[j];
                    let ssd = squared_distance(x, &means[j * k..(j + 1) * k]);
                    log_terms[j] = math::ln(weights[j])
                        - 0.5 * k as f64 * (math::LN_2PI + math::ln(var))
                        - ssd / (2.0 * var);
                }
                let norm = math::log_sum_exp(&log_terms);
                ll += norm;
                for j in 0..c {
                    resp[i * c + j] = math::exp(log_terms[j] - norm);
                }
                debug_assert!(
                    (resp[i * c..(i + 1) * c].iter().sum::<f64>() - 1.0).abs() < 1e-9,
                    "responsibilities must sum to 1"
                );
            }

            debug_assert!(
                ll >= prev_ll - 1e-9 * (1.0 + prev_ll.abs()),
                "EM log-likelihood decreased: {prev_ll} -> {ll}"
            );
            trace.push(ll);
            let rel = if prev_ll.is_finite() {
                let denom = if prev_ll == 0.0 { 1.0 } else { prev_ll.abs() };
                (ll - prev_ll).abs() / denom
            } else {
                f64::INFINITY
            };
            prev_ll = ll;

            // M-step.
            for j in 0..c {
                let nj: f64 = (0..n).map(|i| resp[i * c + j]).sum();
                weights[j] = nj / n as f64;
                if nj <= f64::EPSILON {
                    // Starved component: leave its parameters in place.
                    continue;
                }
                let row = &mut means[j * k..(j + 1) * k];
                row.fill(0.0);
                for (i, x) in problem.data.iter().enumerate() {
                    let r = resp[i * c + j];
                    for (m, v) in row.iter_mut().zip(*x) {
                        *m += r * v;
                    }
                }
                for m in row.iter_mut() {
                    *m /= nj;
                }
                let mut ss = 0.0;
                for (i, x) in problem.data.iter().enumerate() {
                    ss += resp[i * c + j] * squared_distance(x, &means[j * k..(j + 1) * k]);
                }
                variances[j] = (ss / (k as f64 * nj)).max(config.variance_floor);
            }

            if rel < config.rel_tol {
                break;
            }
        }

        let final_ll = *trace.last().unwrap();
        traces.push(trace);
        let replace = match &best {
            Some((ll, ..)) => final_ll > *ll,
            None => true,
        };
        if replace {
            best = Some((final_ll, restart, means, variances, weights));
        }
    }

    let (log_likelihood, best_restart, means, variances, weights) = best.unwrap();
    // Renormalize defensively against float drift.
    let wsum: f64 = weights.iter().sum();
    let weights: Vec<f64> = weights.iter().map(|w| w / wsum).collect();

    let model = SurfaceModel {
        means,
        variances,
        weights,
        component_count: c,
        feature_dim: k,
        preprocess: PreprocessConfig::default(),
        calibration: Vec::new(),
        score_form: config.score_form,
        aic_form: config.aic_form,
        aic: None,
    };
    Ok(FitOutcome {
        model,
        log_likelihood,
        ll_traces: traces,
        best_restart,
    })
}

/// Fit one model per component count in the configured range and keep the
/// AIC minimizer, calibrated on the training scores.
///
/// The upper end of the range is clamped to the sample count (a mixture
/// cannot have more components than samples to seed them from).
pub fn select_components<F: FeatureVec>(
    features: &[F],
    config: &FitConfig,
) -> Result<SelectOutcome> {
    config.validate()?;
    let n = features.len();
    if n == 0 {
        return Err(Error::invalid("no features"));
    }
    if config.component_min > n {
        return Err(Error::invalid(alloc::format!(
            "{n} samples cannot support {} components",
            config.component_min
        )));
    }
    let c_hi = config.component_max.min(n);

    let mut best: Option<(f64, FitOutcome)> = None;
    let mut trace = Vec::new();
    for c in config.component_min..=c_hi {
        let outcome = fit_em(features, c, config)?;
        let scores: Vec<f64> = features
            .iter()
            .map(|f| score_with(&outcome.model, f.values(), config.score_form))
            .collect::<Result<_>>()?;
        let ll = match config.aic_form {
            AicForm::Standard => scores.iter().sum::<f64>(),
            AicForm::LiteralSum => math::log_sum_exp(&scores),
        };
        let rho = aic_parameter_count(c, outcome.model.feature_dim) as f64;
        let aic = 2.0 * rho - 2.0 * ll;
        trace.push(AicPoint {
            components: c,
            aic,
            log_likelihood: ll,
        });
        let replace = match &best {
            Some((best_aic, _)) => aic < *best_aic,
            None => true,
        };
        if replace {
            best = Some((aic, outcome));
        }
    }

    let (aic, outcome) = best.unwrap();
    let mut model = outcome.model;
    model.aic = Some(aic);
    let scores: Vec<f64> = features
        .iter()
        .map(|f| score_with(&model, f.values(), model.score_form))
        .collect::<Result<_>>()?;
    model.set_calibration(scores);
    Ok(SelectOutcome { model, trace })
}

/// Log-likelihood of a feature under the model, using the model's configured
/// score form.
pub fn score(model: &SurfaceModel, feature: &[f64]) -> Result<f64> {
    score_with(model, feature, model.score_form)
}

/// Log-likelihood under an explicit score form.
pub fn score_with(model: &SurfaceModel, feature: &[f64], form: ScoreForm) -> Result<f64> {
    if feature.len() != model.feature_dim {
        return Err(Error::DimensionMismatch {
            expected: model.feature_dim,
            actual: feature.len(),
        });
    }
    let c = model.component_count;
    let k = model.feature_dim;
    let mut terms = vec![0.0f64; c];
    match form {
        ScoreForm::PerBin => {
            // ln prod_i sum_j w_j N(x_i; mu_ji, var_j), inner sum via
            // log-sum-exp per bin.
            let log_w: Vec<f64> = model.weights.iter().map(|&w| math::ln(w)).collect();
            let half_log: Vec<f64> = model
                .variances
                .iter()
                .map(|&v| 0.5 * (math::LN_2PI + math::ln(v)))
                .collect();
            let inv_two_var: Vec<f64> = model.variances.iter().map(|&v| 1.0 / (2.0 * v)).collect();
            let mut total = 0.0;
            for (i, &x) in feature.iter().enumerate() {
                for j in 0..c {
                    let d = x - model.means[j * k + i];
                    terms[j] = log_w[j] - half_log[j] - d * d * inv_two_var[j];
                }
                total += math::log_sum_exp(&terms);
            }
            Ok(total)
        }
        ScoreForm::Joint => {
            for j in 0..c {
                let var = model.variances[j];
                let ssd = squared_distance(feature, model.mean_row(j));
                terms[j] = math::ln(model.weights[j])
                    - 0.5 * k as f64 * (math::LN_2PI + math::ln(var))
                    - ssd / (2.0 * var);
            }
            Ok(math::log_sum_exp(&terms))
        }
    }
}

/// Binary decision with the calibrated percentile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub label: crate::Label,
    /// Empirical percentile of the score within the training scores; 0.5 is
    /// the training median.
    pub likelihood: f64,
    pub score: f64,
}

/// Classify a feature: scores at or above the threshold are planar, scores
/// below it are deviations. Requires a calibrated model.
pub fn classify(model: &SurfaceModel, feature: &[f64], threshold: f64) -> Result<Classification> {
    let s = score(model, feature)?;
    classify_score(model, s, threshold)
}

/// Classify an already-computed score.
pub fn classify_score(model: &SurfaceModel, score: f64, threshold: f64) -> Result<Classification> {
    let likelihood = model.percentile(score)?;
    let label = if score >= threshold {
        crate::Label::Planar
    } else {
        crate::Label::Deviation
    };
    Ok(Classification {
        label,
        likelihood,
        score,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Label;
    use rand_distr::{Distribution, Normal};

    fn fit_config(seed: u64) -> FitConfig {
        FitConfig {
            seed,
            ..FitConfig::default()
        }
    }

    /// Draw `n` samples from a spherical mixture with the given per-component
    /// means (length k each), shared sigma, and weights.
    fn sample_mixture(
        n: usize,
        means: &[Vec<f64>],
        sigma: f64,
        weights: &[f64],
        seed: u64,
    ) -> Vec<Vec<f64>> {
        let mut rng = crate::rng::rng_for(seed, 99);
        let normal = Normal::new(0.0, sigma).unwrap();
        (0..n)
            .map(|_| {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                let mut j = 0;
                for (idx, &w) in weights.iter().enumerate() {
                    acc += w;
                    if u <= acc {
                        j = idx;
                        break;
                    }
                    j = idx;
                }
                means[j].iter().map(|&m| m + normal.sample(&mut rng)).collect()
            })
            .collect()
    }

    /// Best assignment of fitted components to true components (c <= 3).
    fn align_components(model: &SurfaceModel, truth: &[Vec<f64>]) -> Vec<usize> {
        let c = truth.len();
        let perms: Vec<Vec<usize>> = match c {
            1 => vec![vec![0]],
            2 => vec![vec![0, 1], vec![1, 0]],
            3 => vec![
                vec![0, 1, 2],
                vec![0, 2, 1],
                vec![1, 0, 2],
                vec![1, 2, 0],
                vec![2, 0, 1],
                vec![2, 1, 0],
            ],
            _ => panic!("alignment only implemented for c <= 3"),
        };
        perms
            .into_iter()
            .min_by(|a, b| {
                let cost = |perm: &[usize]| -> f64 {
                    (0..c)
                        .map(|t| squared_distance(model.mean_row(perm[t]), &truth[t]))
                        .sum()
                };
                cost(a).total_cmp(&cost(b))
            })
            .unwrap()
    }

    #[test]
    fn single_component_matches_closed_form() {
        let data = vec![
            vec![1.0, 2.0, 3.0],
            vec![2.0, 4.0, 1.0],
            vec![0.0, 3.0, 5.0],
            vec![1.0, 1.0, 3.0],
        ];
        let outcome = fit_em(&data, 1, &fit_config(0)).unwrap();
        let n = data.len() as f64;
        let k = 3.0;
        let mut mean = vec![0.0; 3];
        for x in &data {
            for (m, v) in mean.iter_mut().zip(x) {
                *m += v / n;
            }
        }
        let var: f64 = data
            .iter()
            .map(|x| squared_distance(x, &mean))
            .sum::<f64>()
            / (n * k);
        for (got, want) in outcome.model.mean_row(0).iter().zip(&mean) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!((outcome.model.variances()[0] - var).abs() < 1e-12);
        assert_eq!(outcome.model.weights(), &[1.0]);
    }

    #[test]
    fn recovers_well_separated_two_component_mixture() {
        let sigma = 0.3;
        let truth = vec![vec![0.0; 4], vec![10.0 * sigma; 4]];
        let weights = [0.5, 0.5];
        let data = sample_mixture(200, &truth, sigma, &weights, 13);
        let outcome = fit_em(&data, 2, &fit_config(7)).unwrap();
        let perm = align_components(&outcome.model, &truth);
        for (t, mu) in truth.iter().enumerate() {
            let got = outcome.model.mean_row(perm[t]);
            let rms = (squared_distance(got, mu) / 4.0).sqrt();
            assert!(rms < 0.1 * sigma, "component {t} rms error {rms}");
            let w = outcome.model.weights()[perm[t]];
            assert!((w - weights[t]).abs() < 0.05, "weight {w}");
        }
    }

    #[test]
    fn duplicated_training_set_leaves_parameters_unchanged() {
        let sigma = 0.2;
        let truth = vec![vec![0.0; 3], vec![10.0 * sigma; 3]];
        let data = sample_mixture(120, &truth, sigma, &[0.5, 0.5], 5);
        let mut doubled = data.clone();
        doubled.extend(data.iter().cloned());
        let config = FitConfig {
            rel_tol: 1e-12,
            max_iters: 500,
            ..fit_config(3)
        };
        let a = fit_em(&data, 2, &config).unwrap().model;
        let b = fit_em(&doubled, 2, &config).unwrap().model;
        let perm = align_components(&b, &[a.mean_row(0).to_vec(), a.mean_row(1).to_vec()]);
        for j in 0..2 {
            for (x, y) in a.mean_row(j).iter().zip(b.mean_row(perm[j])) {
                assert!((x - y).abs() < 1e-8);
            }
            assert!((a.variances()[j] - b.variances()[perm[j]]).abs() < 1e-8);
            assert!((a.weights()[j] - b.weights()[perm[j]]).abs() < 1e-8);
        }
    }

    #[test]
    fn log_likelihood_is_non_decreasing_in_every_restart() {
        let truth = vec![vec![0.0; 4], vec![1.0; 4]];
        let data = sample_mixture(150, &truth, 0.5, &[0.4, 0.6], 21);
        let outcome = fit_em(&data, 3, &fit_config(13)).unwrap();
        for trace in &outcome.ll_traces {
            for w in trace.windows(2) {
                assert!(w[1] >= w[0] - 1e-9 * (1.0 + w[0].abs()));
            }
        }
        let wsum: f64 = outcome.model.weights().iter().sum();
        assert!((wsum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn too_few_samples_is_rejected() {
        let data = vec![vec![1.0, 2.0]; 3];
        assert!(fit_em(&data, 4, &fit_config(0)).is_err());
    }

    #[test]
    fn non_finite_features_are_rejected() {
        let data = vec![vec![1.0, f64::NAN]];
        assert!(fit_em(&data, 1, &fit_config(0)).is_err());
    }

    #[test]
    fn parameter_count_arithmetic() {
        assert_eq!(aic_parameter_count(10, 540), 5420);
        assert_eq!(aic_parameter_count(1, 9), 11);
    }

    #[test]
    fn aic_selects_three_well_separated_components() {
        let sigma = 0.25;
        let truth: Vec<Vec<f64>> = (0..3)
            .map(|t| (0..8).map(|_| t as f64 * 10.0 * sigma).collect())
            .collect();
        let config = FitConfig {
            component_max: 6,
            restarts: 3,
            ..FitConfig::default()
        };
        let mut hits = 0;
        for seed in 0..10 {
            let data = sample_mixture(300, &truth, sigma, &[0.3, 0.3, 0.4], 400 + seed);
            let picked = select_components(&data, &FitConfig { seed, ..config.clone() })
                .unwrap()
                .model
                .component_count();
            if picked == 3 {
                hits += 1;
            }
        }
        assert!(hits >= 8, "selected c=3 in only {hits}/10 runs");
    }

    #[test]
    fn aic_prefers_one_component_for_unimodal_data() {
        let truth = vec![vec![0.0; 8]];
        let config = FitConfig {
            component_max: 4,
            restarts: 3,
            ..FitConfig::default()
        };
        let mut hits = 0;
        for seed in 0..10 {
            let data = sample_mixture(300, &truth, 0.25, &[1.0], 600 + seed);
            let picked = select_components(&data, &FitConfig { seed, ..config.clone() })
                .unwrap()
                .model
                .component_count();
            if picked == 1 {
                hits += 1;
            }
        }
        assert!(hits >= 8, "selected c=1 in only {hits}/10 runs");
    }

    #[test]
    fn component_range_is_clamped_to_sample_count() {
        let data = vec![vec![0.0, 1.0], vec![0.1, 1.1], vec![0.2, 0.9]];
        let config = FitConfig {
            component_max: 16,
            restarts: 2,
            ..FitConfig::default()
        };
        let out = select_components(&data, &config).unwrap();
        assert!(out.trace.len() <= 3);
    }

    fn toy_model(means: Vec<f64>, variances: Vec<f64>, weights: Vec<f64>, k: usize) -> SurfaceModel {
        let c = weights.len();
        SurfaceModel::from_parts(
            means,
            variances,
            weights,
            c,
            k,
            PreprocessConfig::default(),
            ScoreForm::PerBin,
            AicForm::Standard,
        )
        .unwrap()
    }

    #[test]
    fn standard_normal_scores_at_its_mode() {
        let model = toy_model(vec![0.0], vec![1.0], vec![1.0], 1);
        let s = score(&model, &[0.0]).unwrap();
        let expected = -0.5 * math::LN_2PI;
        assert!((s - expected).abs() < 1e-12);
        assert!((s + 0.9189385332046727).abs() < 1e-12);
    }

    #[test]
    fn two_component_score_is_the_direct_sum() {
        let model = toy_model(vec![-1.0, 1.0], vec![1.0, 1.0], vec![0.5, 0.5], 1);
        let s = score(&model, &[0.0]).unwrap();
        let pdf = |x: f64, mu: f64| (-0.5 * (x - mu) * (x - mu)).exp() / (2.0 * core::f64::consts::PI).sqrt();
        let expected = (0.5 * pdf(0.0, -1.0) + 0.5 * pdf(0.0, 1.0)).ln();
        assert!((s - expected).abs() < 1e-12);
    }

    #[test]
    fn log_space_score_matches_linear_space_oracle() {
        let mut rng = crate::rng::rng_for(17, 0);
        let c = 4;
        let k = 20;
        let means: Vec<f64> = (0..c * k).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let variances: Vec<f64> = (0..c).map(|_| 0.5 + rng.gen::<f64>()).collect();
        let weights = vec![0.1, 0.2, 0.3, 0.4];
        let model = toy_model(means.clone(), variances.clone(), weights.clone(), k);
        for _ in 0..20 {
            let x: Vec<f64> = (0..k).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
            // Linear-space evaluation of the per-bin product.
            let mut product_log = 0.0;
            for i in 0..k {
                let mut bin = 0.0;
                for j in 0..c {
                    let var = variances[j];
                    let d = x[i] - means[j * k + i];
                    bin += weights[j] * (-d * d / (2.0 * var)).exp()
                        / (2.0 * core::f64::consts::PI * var).sqrt();
                }
                product_log += bin.ln();
            }
            let s = score(&model, &x).unwrap();
            assert!(
                (s - product_log).abs() <= 1e-9 * product_log.abs().max(1.0),
                "log-space {s} vs linear {product_log}"
            );
        }
    }

    #[test]
    fn score_is_invariant_under_component_permutation() {
        let k = 6;
        let means: Vec<f64> = (0..3 * k).map(|i| i as f64 * 0.1).collect();
        let variances = vec![0.4, 0.9, 1.5];
        let weights = vec![0.2, 0.5, 0.3];
        let model = toy_model(means.clone(), variances.clone(), weights.clone(), k);
        // Permute components (2, 0, 1).
        let perm = [2usize, 0, 1];
        let mut pm = Vec::new();
        for &j in &perm {
            pm.extend_from_slice(&means[j * k..(j + 1) * k]);
        }
        let permuted = toy_model(
            pm,
            perm.iter().map(|&j| variances[j]).collect(),
            perm.iter().map(|&j| weights[j]).collect(),
            k,
        );
        let x: Vec<f64> = (0..k).map(|i| 0.3 * i as f64).collect();
        let a = score(&model, &x).unwrap();
        let b = score(&permuted, &x).unwrap();
        assert!((a - b).abs() < 1e-9);
        let aj = score_with(&model, &x, ScoreForm::Joint).unwrap();
        let bj = score_with(&permuted, &x, ScoreForm::Joint).unwrap();
        assert!((aj - bj).abs() < 1e-9);
    }

    #[test]
    fn per_bin_and_joint_forms_coincide_for_one_component() {
        let mut rng = crate::rng::rng_for(23, 0);
        let k = 12;
        let means: Vec<f64> = (0..k).map(|_| rng.gen::<f64>()).collect();
        let model = toy_model(means, vec![0.7], vec![1.0], k);
        for _ in 0..10 {
            let x: Vec<f64> = (0..k).map(|_| rng.gen::<f64>()).collect();
            let a = score_with(&model, &x, ScoreForm::PerBin).unwrap();
            let b = score_with(&model, &x, ScoreForm::Joint).unwrap();
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let model = toy_model(vec![0.0, 0.0], vec![1.0], vec![1.0], 2);
        assert!(matches!(
            score(&model, &[0.0]),
            Err(Error::DimensionMismatch { expected: 2, actual: 1 })
        ));
    }

    #[test]
    fn classify_boundary_score_is_planar() {
        let mut model = toy_model(vec![0.0], vec![1.0], vec![1.0], 1);
        model.set_calibration(vec![-2.0, -1.0, 0.0]);
        let c = classify_score(&model, -1.0, -1.0).unwrap();
        assert_eq!(c.label, Label::Planar);
    }

    #[test]
    fn score_below_all_calibration_has_zero_likelihood() {
        let mut model = toy_model(vec![0.0], vec![1.0], vec![1.0], 1);
        model.set_calibration(vec![-2.0, -1.0, 0.0, 1.0]);
        let c = classify_score(&model, -5.0, -2.0).unwrap();
        assert_eq!(c.likelihood, 0.0);
        assert_eq!(c.label, Label::Deviation);
    }

    #[test]
    fn training_sample_percentile_matches_its_rank() {
        let mut model = toy_model(vec![0.0], vec![1.0], vec![1.0], 1);
        let scores: Vec<f64> = (0..40).map(|i| i as f64 * 0.25 - 5.0).collect();
        model.set_calibration(scores.clone());
        for (rank, &s) in scores.iter().enumerate() {
            let ell = model.percentile(s).unwrap();
            let expected = (rank + 1) as f64 / scores.len() as f64;
            assert!((ell - expected).abs() <= 1.0 / scores.len() as f64 + 1e-12);
        }
    }

    #[test]
    fn uncalibrated_model_cannot_classify() {
        let model = toy_model(vec![0.0], vec![1.0], vec![1.0], 1);
        assert!(matches!(
            classify_score(&model, 0.0, 0.0),
            Err(Error::Uncalibrated)
        ));
    }

    #[test]
    fn decisions_are_invariant_under_affine_transforms() {
        let mut model = toy_model(vec![0.0], vec![1.0], vec![1.0], 1);
        model.set_calibration((0..20).map(|i| i as f64).collect());
        let mut transformed = model.clone();
        let (a, b) = (3.5, -7.0);
        transformed.set_calibration((0..20).map(|i| a * i as f64 + b).collect());
        for score in [-1.0, 0.0, 4.0, 9.5, 19.0, 25.0] {
            for threshold in [-0.5, 4.0, 12.0] {
                let lhs = classify_score(&model, score, threshold).unwrap().label;
                let rhs = classify_score(&transformed, a * score + b, a * threshold + b)
                    .unwrap()
                    .label;
                assert_eq!(lhs, rhs);
            }
        }
    }
}

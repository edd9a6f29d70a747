//! Histogram pre-processing: ambient-light estimation, subtraction,
//! L1 normalization, bin trimming and flattening across pixels.

use alloc::vec::Vec;

use crate::math;
use crate::{Error, Frame, Result};

/// Pre-processing parameters.
///
/// `bin_lo..bin_hi` is the half-open range of bins kept after correction;
/// the default `[13, 73)` keeps 60 bins per pixel (roughly 0-80 cm of range
/// at 1.2 cm per bin).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PreprocessConfig {
    /// Gaussian kernel bandwidth for ambient estimation, in counts.
    pub kde_bandwidth: f64,
    pub bin_lo: usize,
    pub bin_hi: usize,
    /// Subtract the estimated ambient level from every bin.
    pub ambient_correction: bool,
    /// Divide each pixel's histogram by its L1 norm.
    pub normalization: bool,
    /// Normalize by the L1 norm of the ambient-subtracted histogram instead
    /// of the raw one. Off by default: the raw-norm form is the reference
    /// behavior, this flag exists to compare the two readings.
    #[cfg_attr(feature = "serde", serde(default))]
    pub normalize_after_subtraction: bool,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            kde_bandwidth: 5.0,
            bin_lo: 13,
            bin_hi: 73,
            ambient_correction: true,
            normalization: true,
            normalize_after_subtraction: false,
        }
    }
}

impl PreprocessConfig {
    /// Bins kept per pixel.
    pub fn bins_kept(&self) -> usize {
        self.bin_hi - self.bin_lo
    }

    /// Feature dimension for a `p`-pixel sensor.
    pub fn feature_dim(&self, pixels: usize) -> usize {
        pixels * self.bins_kept()
    }

    pub fn validate(&self, bins: usize) -> Result<()> {
        if !(self.kde_bandwidth > 0.0) || !self.kde_bandwidth.is_finite() {
            return Err(Error::invalid("kde_bandwidth must be positive"));
        }
        if self.bin_lo >= self.bin_hi || self.bin_hi > bins {
            return Err(Error::invalid(alloc::format!(
                "bin range [{}, {}) invalid for {bins}-bin histograms",
                self.bin_lo,
                self.bin_hi
            )));
        }
        Ok(())
    }
}

/// Flattened, corrected feature vector for one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessedFeature {
    /// `p * (bin_hi - bin_lo)` values, pixels concatenated in order.
    pub values: Vec<f64>,
    /// Estimated ambient level per pixel (zeros when correction is off).
    pub ambient_levels: Vec<f64>,
}

/// Estimate the ambient light level of one histogram as the mode of a
/// Gaussian kernel density over its bin values.
///
/// The density is evaluated on a grid of step `0.01 * bandwidth` spanning
/// `[min, max]` of the observed values; ties break toward the smaller
/// candidate. Bins that capture no scene return see only ambient light, so
/// for most scenes the densest value is the ambient level.
pub fn estimate_ambient(histogram: &[u32], bandwidth: f64) -> Result<f64> {
    if histogram.is_empty() {
        return Err(Error::invalid("empty histogram"));
    }
    if !(bandwidth > 0.0) || !bandwidth.is_finite() {
        return Err(Error::invalid("bandwidth must be positive"));
    }

    // Unique values with multiplicities; the KDE is a sum over these.
    let mut sorted: Vec<u32> = histogram.to_vec();
    sorted.sort_unstable();
    let mut values: Vec<f64> = Vec::new();
    let mut counts: Vec<f64> = Vec::new();
    for &v in &sorted {
        let v = v as f64;
        match values.last() {
            Some(&last) if last == v => *counts.last_mut().unwrap() += 1.0,
            _ => {
                values.push(v);
                counts.push(1.0);
            }
        }
    }

    let min = values[0];
    let max = *values.last().unwrap();
    if min == max {
        return Ok(min);
    }

    let step = 0.01 * bandwidth;
    let cutoff = 10.0 * bandwidth;
    let inv_two_bw2 = 1.0 / (2.0 * bandwidth * bandwidth);

    // Grid cells farther than the kernel cutoff from every observed value
    // have negligible density and can never win; restrict the scan to the
    // merged windows around observed values.
    let mut intervals: Vec<(f64, f64)> = Vec::new();
    for &v in &values {
        let lo = (v - cutoff).max(min);
        let hi = (v + cutoff).min(max);
        match intervals.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => intervals.push((lo, hi)),
        }
    }

    // Per-interval density bound: the kernel peaks at 1, so an interval can
    // never beat the total multiplicity within its reach. Scanning bigger
    // bounds first lets sparse outlier regions be skipped wholesale.
    let reach_count = |lo: f64, hi: f64| -> f64 {
        let a = values.partition_point(|&v| v < lo - cutoff);
        let b = values.partition_point(|&v| v <= hi + cutoff);
        counts[a..b].iter().sum()
    };
    let mut bounded: Vec<(f64, f64, f64)> = intervals
        .into_iter()
        .map(|(lo, hi)| (reach_count(lo, hi), lo, hi))
        .collect();
    bounded.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.total_cmp(&b.1)));

    let mut best_x = f64::INFINITY;
    let mut best_d = f64::NEG_INFINITY;

    // One pass per value spreads its kernel over the interval's grid with
    // the Gaussian sliding recurrence: exp((k+1) term) = exp(k term) * F_k,
    // F_(k+1) = F_k * G with constant G. Two multiplies per cell instead of
    // an exp; an exp only seeds each value's run.
    let shrink = math::exp(-step * step * inv_two_bw2 * 2.0);
    let mut dense: Vec<f64> = Vec::new();
    for (bound, lo, hi) in bounded {
        if bound < best_d {
            continue;
        }
        let k_start = math::ceil((lo - min) / step) as i64;
        let k_end = math::floor((hi - min) / step) as i64;
        dense.clear();
        dense.resize((k_end - k_start + 1) as usize, 0.0);
        let first = values.partition_point(|&v| v < lo - cutoff);
        for (v, c) in values[first..].iter().zip(&counts[first..]) {
            if *v > hi + cutoff {
                break;
            }
            let ks = k_start.max(math::ceil((v - cutoff - min) / step) as i64);
            let ke = k_end.min(math::floor((v + cutoff - min) / step) as i64);
            if ks > ke {
                continue;
            }
            let d0 = min + ks as f64 * step - v;
            let mut e = c * math::exp(-d0 * d0 * inv_two_bw2);
            let mut f = math::exp(-(2.0 * d0 * step + step * step) * inv_two_bw2);
            for cell in &mut dense[(ks - k_start) as usize..=(ke - k_start) as usize] {
                *cell += e;
                e *= f;
                f *= shrink;
            }
        }
        for (i, &density) in dense.iter().enumerate() {
            let x = min + (k_start + i as i64) as f64 * step;
            // Strictly greater keeps the smallest candidate within an
            // interval; the intervals are scanned out of order, so smaller
            // x wins on an exact cross-interval tie.
            if density > best_d || (density == best_d && x < best_x) {
                best_d = density;
                best_x = x;
            }
        }
    }

    Ok(best_x)
}

/// Correct, normalize, trim and flatten a frame into a feature vector.
///
/// Per pixel `i` with histogram `h_i` and ambient estimate `a_i`, each bin
/// becomes `(h - a_i) / ||h_i||_1`, where the norm is taken over the raw
/// histogram (or the subtracted one with
/// [`PreprocessConfig::normalize_after_subtraction`]). Bins outside
/// `[bin_lo, bin_hi)` are dropped afterwards and pixels are concatenated in
/// order. Values that go negative after subtraction are kept as-is.
pub fn preprocess(frame: &Frame, config: &PreprocessConfig) -> Result<ProcessedFeature> {
    frame.validate()?;
    config.validate(frame.bin_count())?;

    let kept = config.bins_kept();
    let mut values = Vec::with_capacity(frame.pixel_count() * kept);
    let mut ambient_levels = Vec::with_capacity(frame.pixel_count());

    for (pixel, hist) in frame.pixels.iter().enumerate() {
        let total: f64 = hist.iter().map(|&v| v as f64).sum();
        if total == 0.0 {
            return Err(Error::DegenerateInput {
                pixel,
                reason: "histogram has zero L1 norm".into(),
            });
        }
        let ambient = if config.ambient_correction {
            estimate_ambient(hist, config.kde_bandwidth)?
        } else {
            0.0
        };
        let denom = if config.normalization {
            if config.normalize_after_subtraction {
                let norm: f64 = hist.iter().map(|&v| (v as f64 - ambient).abs()).sum();
                if norm == 0.0 {
                    return Err(Error::DegenerateInput {
                        pixel,
                        reason: "zero L1 norm after ambient subtraction".into(),
                    });
                }
                norm
            } else {
                total
            }
        } else {
            1.0
        };
        for &v in &hist[config.bin_lo..config.bin_hi] {
            values.push((v as f64 - ambient) / denom);
        }
        ambient_levels.push(ambient);
    }

    Ok(ProcessedFeature {
        values,
        ambient_levels,
    })
}

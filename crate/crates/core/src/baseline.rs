//! Comparison methods that reduce each histogram to one distance per pixel
//! before reusing the mixture machinery: a spline peak fit and the sensor's
//! own onboard distance estimates.

use alloc::vec::Vec;

use crate::mixture::FeatureVec;
use crate::preprocess::estimate_ambient;
use crate::{Error, Frame, Result};

/// Parameters of the peak-extraction baseline.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PeakConfig {
    /// Bandwidth for the ambient estimate subtracted before peak finding.
    pub kde_bandwidth: f64,
    /// Depth range covered by one histogram bin.
    pub bin_width_m: f64,
    /// Spline samples per bin.
    pub oversample: usize,
}

impl Default for PeakConfig {
    fn default() -> Self {
        Self {
            kde_bandwidth: 5.0,
            bin_width_m: 0.012,
            oversample: 100,
        }
    }
}

/// One distance per pixel, in meters.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceFeature {
    pub values: Vec<f64>,
}

impl FeatureVec for DistanceFeature {
    fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Natural cubic spline with knots at integer positions `0..n`.
struct NaturalCubicSpline {
    y: Vec<f64>,
    second: Vec<f64>,
}

impl NaturalCubicSpline {
    fn fit(y: &[f64]) -> Self {
        let n = y.len();
        let mut second = alloc::vec![0.0; n];
        if n > 2 {
            // Thomas solve of the tridiagonal system for interior second
            // derivatives (unit knot spacing, natural ends).
            let m = n - 2;
            let mut diag = alloc::vec![4.0; m];
            let mut rhs: Vec<f64> = (0..m)
                .map(|i| 6.0 * (y[i] - 2.0 * y[i + 1] + y[i + 2]))
                .collect();
            for i in 1..m {
                let w = 1.0 / diag[i - 1];
                diag[i] -= w;
                rhs[i] -= w * rhs[i - 1];
            }
            second[m] = rhs[m - 1] / diag[m - 1];
            for i in (0..m.saturating_sub(1)).rev() {
                second[i + 1] = (rhs[i] - second[i + 2]) / diag[i];
            }
        }
        Self {
            y: y.to_vec(),
            second,
        }
    }

    fn eval(&self, x: f64) -> f64 {
        let n = self.y.len();
        let i = (x as usize).min(n - 2);
        let t = x - i as f64;
        let a = 1.0 - t;
        let b = t;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.second[i] + (b * b * b - b) * self.second[i + 1]) / 6.0
    }
}

/// Distance to the dominant return of one histogram.
///
/// Subtracts the ambient estimate, interpolates the corrected counts with a
/// natural cubic spline over bin indices, samples it at `oversample` points
/// per bin and returns the argmax position times `bin_width_m` (ties toward
/// the smaller distance). Errors when no corrected bin is positive.
pub fn extract_peak(histogram: &[u32], config: &PeakConfig) -> Result<f64> {
    if histogram.is_empty() {
        return Err(Error::invalid("empty histogram"));
    }
    if config.oversample == 0 {
        return Err(Error::invalid("oversample must be >= 1"));
    }
    let ambient = estimate_ambient(histogram, config.kde_bandwidth)?;
    let corrected: Vec<f64> = histogram.iter().map(|&v| v as f64 - ambient).collect();
    if !corrected.iter().any(|&v| v > 0.0) {
        return Err(Error::NoPeak { pixel: 0 });
    }
    if corrected.len() == 1 {
        return Ok(0.0);
    }

    let spline = NaturalCubicSpline::fit(&corrected);
    let step = 1.0 / config.oversample as f64;
    let samples = (corrected.len() - 1) * config.oversample;
    let mut best = (f64::NEG_INFINITY, 0.0);
    for s in 0..=samples {
        let x = s as f64 * step;
        let v = spline.eval(x);
        if v > best.0 {
            best = (v, x);
        }
    }
    Ok(best.1 * config.bin_width_m)
}

/// Peak distance per pixel; a pixel without positive corrected mass fails
/// with its index.
pub fn peaks_feature(frame: &Frame, config: &PeakConfig) -> Result<DistanceFeature> {
    frame.validate()?;
    let values = frame
        .pixels
        .iter()
        .enumerate()
        .map(|(pixel, hist)| {
            extract_peak(hist, config).map_err(|e| match e {
                Error::NoPeak { .. } => Error::NoPeak { pixel },
                other => other,
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(DistanceFeature { values })
}

/// The sensor's own per-pixel distance estimates, passed through verbatim.
pub fn onboard_feature(frame: &Frame) -> Result<DistanceFeature> {
    frame.validate()?;
    match &frame.onboard_distances_m {
        Some(d) => Ok(DistanceFeature { values: d.clone() }),
        None => Err(Error::invalid("frame carries no onboard distances")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::Label;
    use crate::math;
    use alloc::string::ToString;
    use alloc::vec;

    fn config() -> PeakConfig {
        PeakConfig::default()
    }

    fn frame_of(pixels: Vec<Vec<u32>>, onboard: Option<Vec<f64>>) -> Frame {
        Frame {
            capture_id: "c".to_string(),
            surface_id: "s".to_string(),
            label: Label::Planar,
            sublabel: None,
            deviation_distance_m: None,
            pixels,
            onboard_distances_m: onboard,
        }
    }

    #[test]
    fn one_hot_peak_lands_on_the_bin() {
        let mut h = vec![0u32; 128];
        h[30] = 100;
        let d = extract_peak(&h, &config()).unwrap();
        assert!((d - 0.36).abs() <= 0.5 * 0.01 * 0.012 + 1e-12, "distance {d}");
    }

    #[test]
    fn symmetric_pulse_peaks_at_the_midpoint() {
        let mut h = vec![0u32; 128];
        for (offset, v) in [(28, 10), (29, 20), (30, 30), (31, 30), (32, 20), (33, 10)] {
            h[offset] = v;
        }
        let d = extract_peak(&h, &config()).unwrap();
        assert!((d - 30.5 * 0.012).abs() <= 0.01 * 0.012 + 1e-12, "distance {d}");
    }

    #[test]
    fn all_zero_corrected_histogram_has_no_peak() {
        let h = vec![7u32; 64];
        assert!(matches!(
            extract_peak(&h, &config()),
            Err(Error::NoPeak { .. })
        ));
    }

    #[test]
    fn peak_is_invariant_under_uniform_scaling() {
        // Majority zeros keep the ambient estimate at zero, so the corrected
        // histogram is the raw one and scaling acts uniformly on it.
        let mut h = vec![0u32; 64];
        for (offset, v) in [(20, 3), (21, 9), (22, 5)] {
            h[offset] = v;
        }
        let scaled: Vec<u32> = h.iter().map(|&v| v * 7).collect();
        let a = extract_peak(&h, &config()).unwrap();
        let b = extract_peak(&scaled, &config()).unwrap();
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn whole_bin_shift_moves_the_peak_one_bin_width() {
        let mut h = vec![0u32; 64];
        for (offset, v) in [(20, 4), (21, 11), (22, 6)] {
            h[offset] = v;
        }
        let shifted: Vec<u32> = {
            let mut s = vec![0u32; 64];
            s[21] = 4;
            s[22] = 11;
            s[23] = 6;
            s
        };
        let cfg = config();
        let a = extract_peak(&h, &cfg).unwrap();
        let b = extract_peak(&shifted, &cfg).unwrap();
        let fine = cfg.bin_width_m / cfg.oversample as f64;
        assert!((b - a - cfg.bin_width_m).abs() <= fine + 1e-12);
    }

    #[test]
    fn sub_bin_centers_are_recovered_within_a_quarter_bin() {
        let mut rng = crate::rng::rng_for(29, 0);
        let cfg = config();
        let fine_cfg = PeakConfig {
            oversample: 10_000,
            ..config()
        };
        let sigma = 1.6;
        let mut total_err = 0.0;
        for case in 0..100 {
            use rand::Rng;
            let center = 20.0 + 20.0 * rng.gen::<f64>();
            let ambient = 5.0;
            let h: Vec<u32> = (0..64)
                .map(|i| {
                    let lo = (i as f64 - center) / sigma;
                    let hi = (i as f64 + 1.0 - center) / sigma;
                    let mass = 2000.0 * (math::normal_cdf(hi) - math::normal_cdf(lo));
                    (ambient + mass).round() as u32
                })
                .collect();
            let d = extract_peak(&h, &cfg).unwrap();
            let fine = extract_peak(&h, &fine_cfg).unwrap();
            // The bin sampled at index i covers [i, i+1), so the pulse center
            // appears at spline coordinate center - 0.5.
            let true_pos = (center - 0.5) * cfg.bin_width_m;
            total_err += (d - true_pos).abs() / cfg.bin_width_m;
            assert!(
                (d - fine).abs() <= cfg.bin_width_m / cfg.oversample as f64 + 1e-12,
                "case {case}: coarse {d} vs fine {fine}"
            );
        }
        let mae = total_err / 100.0;
        assert!(mae <= 0.25, "mean absolute error {mae} bins");
    }

    #[test]
    fn peaks_feature_names_the_failing_pixel() {
        let good = {
            let mut h = vec![0u32; 32];
            h[10] = 50;
            h
        };
        let flat = vec![3u32; 32];
        let frame = frame_of(vec![good, flat], None);
        assert!(matches!(
            peaks_feature(&frame, &config()),
            Err(Error::NoPeak { pixel: 1 })
        ));
    }

    #[test]
    fn onboard_feature_passes_distances_through() {
        let d = vec![0.2, 0.3, 0.4];
        let frame = frame_of(vec![vec![1, 2, 3]; 3], Some(d.clone()));
        assert_eq!(onboard_feature(&frame).unwrap().values, d);
    }

    #[test]
    fn missing_onboard_distances_is_an_error() {
        let frame = frame_of(vec![vec![1, 2, 3]; 3], None);
        assert!(onboard_feature(&frame).is_err());
    }

    #[test]
    fn distance_features_drive_the_mixture_path() {
        use crate::mixture::{fit_em, score, FitConfig};
        let features: Vec<DistanceFeature> = (0..12)
            .map(|i| DistanceFeature {
                values: vec![0.2 + 0.001 * i as f64; 9],
            })
            .collect();
        let outcome = fit_em(&features, 1, &FitConfig::default()).unwrap();
        assert_eq!(outcome.model.feature_dim(), 9);
        assert!(score(&outcome.model, &features[0].values).unwrap().is_finite());
    }
}

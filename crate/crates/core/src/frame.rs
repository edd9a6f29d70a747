//! One sensor measurement: a transient histogram per pixel plus metadata.

use alloc::string::String;
use alloc::vec::Vec;

use crate::Error;

/// Ground-truth class of a capture.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Label {
    Planar,
    Deviation,
}

/// A single measurement from a `p`-pixel sensor with `b` bins per histogram.
///
/// Bin 0 is the nearest range slice. Pixels are stored row-major over the
/// sensor array. Histograms are assumed pile-up corrected but still carry
/// the ambient-light DC bias.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub capture_id: String,
    pub surface_id: String,
    pub label: Label,
    /// Object name or deviation kind, when labeled.
    pub sublabel: Option<String>,
    /// Ground distance from the sensor to the deviation, when known.
    pub deviation_distance_m: Option<f64>,
    /// `p` histograms of `b` non-negative photon counts each.
    pub pixels: Vec<Vec<u32>>,
    /// Per-pixel distance estimates from the sensor's onboard algorithm.
    pub onboard_distances_m: Option<Vec<f64>>,
}

impl Frame {
    /// Number of pixels `p`.
    pub fn pixel_count(&self) -> usize {
        self.pixels.len()
    }

    /// Bins per histogram `b` (0 for an empty frame).
    pub fn bin_count(&self) -> usize {
        self.pixels.first().map_or(0, Vec::len)
    }

    /// Check the structural invariants: at least one pixel, all histograms of
    /// equal nonzero length, and onboard distances (if present) matching the
    /// pixel count.
    pub fn validate(&self) -> crate::Result<()> {
        if self.pixels.is_empty() {
            return Err(Error::invalid("frame has no pixels"));
        }
        let b = self.pixels[0].len();
        if b == 0 {
            return Err(Error::invalid("histograms are empty"));
        }
        for (i, h) in self.pixels.iter().enumerate() {
            if h.len() != b {
                return Err(Error::invalid(alloc::format!(
                    "pixel {i} has {} bins, expected {b}",
                    h.len()
                )));
            }
        }
        if let Some(d) = &self.onboard_distances_m {
            if d.len() != self.pixels.len() {
                return Err(Error::invalid(alloc::format!(
                    "onboard distances length {} does not match pixel count {}",
                    d.len(),
                    self.pixels.len()
                )));
            }
            if d.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid("onboard distances contain non-finite values"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn frame(pixels: Vec<Vec<u32>>) -> Frame {
        Frame {
            capture_id: "c0".to_string(),
            surface_id: "s0".to_string(),
            label: Label::Planar,
            sublabel: None,
            deviation_distance_m: None,
            pixels,
            onboard_distances_m: None,
        }
    }

    #[test]
    fn validate_accepts_well_formed() {
        assert!(frame(vec![vec![1, 2, 3]; 9]).validate().is_ok());
    }

    #[test]
    fn validate_rejects_ragged_pixels() {
        let f = frame(vec![vec![1, 2, 3], vec![1, 2]]);
        assert!(matches!(f.validate(), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn validate_rejects_mismatched_onboard_length() {
        let mut f = frame(vec![vec![1, 2, 3]; 9]);
        f.onboard_distances_m = Some(vec![0.2; 8]);
        assert!(f.validate().is_err());
    }
}

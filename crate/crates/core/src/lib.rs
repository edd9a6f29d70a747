//! Detecting deviations from a planar surface with a miniature time-of-flight
//! sensor, using the raw per-pixel transient histograms instead of the
//! sensor's derived distance estimates.
//!
//! The pipeline stages are:
//!
//! 1. **Preprocess** — estimate the ambient (DC) level of each histogram by
//!    kernel density mode seeking, subtract it, L1-normalize, trim to the
//!    usable bin range, and flatten across pixels ([`preprocess`]).
//! 2. **Surface model** — fit a tied-variance Gaussian mixture to a small
//!    dataset of deviation-free measurements with EM, selecting the component
//!    count by AIC ([`mixture`]).
//! 3. **Classify** — score query measurements under the model and threshold
//!    the log-likelihood; scores map to a calibrated percentile in [0, 1]
//!    ([`mixture::classify`]).
//! 4. **Baselines** — the same mixture machinery driven by one distance per
//!    pixel, either a spline peak fit or the sensor's onboard estimate
//!    ([`baseline`]).
//! 5. **Simulate** — a ray-cast forward model of the sensor producing
//!    synthetic labeled datasets for every experiment protocol ([`sim`]).
//! 6. **Evaluate** — ROC/AUROC metrics and the experiment protocols
//!    (per-object, distance sweeps, surface splits, ablations) ([`eval`]).
//!
//! The crate is `no_std`-compatible (with `alloc`); file formats, dataset IO
//! and the command-line driver live in the companion `tofplane` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod baseline;
pub mod eval;
pub mod frame;
pub mod metrics;
pub mod mixture;
pub mod preprocess;
pub mod sim;

mod error;
pub(crate) mod math;
pub(crate) mod rng;

pub use error::Error;
pub use frame::{Frame, Label};

/// Convenience alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;

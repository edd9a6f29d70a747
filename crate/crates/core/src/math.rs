//! Float math routed through std when available, libm otherwise.

#[cfg(feature = "std")]
mod imp {
    pub fn exp(x: f64) -> f64 {
        x.exp()
    }
    pub fn ln(x: f64) -> f64 {
        x.ln()
    }
    pub fn sqrt(x: f64) -> f64 {
        x.sqrt()
    }
    pub fn cos(x: f64) -> f64 {
        x.cos()
    }
    pub fn sin(x: f64) -> f64 {
        x.sin()
    }
    pub fn floor(x: f64) -> f64 {
        x.floor()
    }
    pub fn ceil(x: f64) -> f64 {
        x.ceil()
    }
    pub fn round(x: f64) -> f64 {
        x.round()
    }
    pub fn acos(x: f64) -> f64 {
        x.acos()
    }
}

#[cfg(not(feature = "std"))]
mod imp {
    pub fn exp(x: f64) -> f64 {
        libm::exp(x)
    }
    pub fn ln(x: f64) -> f64 {
        libm::log(x)
    }
    pub fn sqrt(x: f64) -> f64 {
        libm::sqrt(x)
    }
    pub fn cos(x: f64) -> f64 {
        libm::cos(x)
    }
    pub fn sin(x: f64) -> f64 {
        libm::sin(x)
    }
    pub fn floor(x: f64) -> f64 {
        libm::floor(x)
    }
    pub fn ceil(x: f64) -> f64 {
        libm::ceil(x)
    }
    pub fn round(x: f64) -> f64 {
        libm::round(x)
    }
    pub fn acos(x: f64) -> f64 {
        libm::acos(x)
    }
}

pub(crate) use imp::*;

pub(crate) const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Standard normal CDF; std has no erf, so libm's is used on both paths.
pub(crate) fn normal_cdf(x: f64) -> f64 {
    0.5 * (1.0 + libm::erf(x * core::f64::consts::FRAC_1_SQRT_2))
}

/// log(sum(exp(v))) without overflow; returns -inf for an empty or all -inf input.
pub(crate) fn log_sum_exp(values: &[f64]) -> f64 {
    let m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    let sum: f64 = values.iter().map(|&v| exp(v - m)).sum();
    m + ln(sum)
}

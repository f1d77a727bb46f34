//! Named analytic density profiles γ: 𝕋 → [0, 1].
//!
//! Profiles are identified by name plus parameters so that harness configs
//! stay reproducible without an expression parser. The torus is parametrised
//! by u ∈ [0, 1) with the cut (slow bond) at u = 0; a profile may take
//! different limits at u → 0⁺ and u → 1⁻.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const TWO_PI: f64 = std::f64::consts::TAU;

/// A density profile on the cut torus, with an analytic cumulative integral.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum DensityProfile {
    /// γ ≡ value.
    Constant { value: f64 },
    /// Sharp step: `left` for u < center, `right` for u ≥ center.
    Step { left: f64, right: f64, center: f64 },
    /// Step smoothed by a half-cosine ramp of the given width around center.
    CosineStep {
        left: f64,
        right: f64,
        center: f64,
        width: f64,
    },
    /// base + amplitude·cos⁴(π(u−center)/width) on |u−center| ≤ width/2.
    CosineBump {
        base: f64,
        amplitude: f64,
        center: f64,
        width: f64,
    },
    /// mean + Σ_k amp_k·cos(2π k (u − phase_k)). Bounded by construction
    /// when Σ|amp_k| ≤ min(mean, 1−mean).
    Fourier { mean: f64, terms: Vec<FourierTerm> },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct FourierTerm {
    pub k: u32,
    pub amplitude: f64,
    pub phase: f64,
}

impl DensityProfile {
    /// Profile value at u ∈ [0, 1).
    pub fn value(&self, u: f64) -> f64 {
        match self {
            Self::Constant { value } => *value,
            Self::Step {
                left,
                right,
                center,
            } => {
                if u < *center {
                    *left
                } else {
                    *right
                }
            }
            Self::CosineStep {
                left,
                right,
                center,
                width,
            } => {
                let s = (u - (center - width / 2.0)) / width;
                if s <= 0.0 {
                    *left
                } else if s >= 1.0 {
                    *right
                } else {
                    // half-cosine ramp from left to right
                    left + (right - left) * 0.5 * (1.0 - (std::f64::consts::PI * s).cos())
                }
            }
            Self::CosineBump {
                base,
                amplitude,
                center,
                width,
            } => {
                let s = (u - center) / width;
                if s.abs() >= 0.5 {
                    *base
                } else {
                    base + amplitude * (std::f64::consts::PI * s).cos().powi(4)
                }
            }
            Self::Fourier { mean, terms } => {
                let mut v = *mean;
                for t in terms {
                    v += t.amplitude * (TWO_PI * t.k as f64 * (u - t.phase)).cos();
                }
                v
            }
        }
    }

    /// Cumulative integral F(u) = ∫₀ᵘ γ(w) dw, evaluated analytically.
    pub fn cumulative(&self, u: f64) -> f64 {
        match self {
            Self::Constant { value } => value * u,
            Self::Step {
                left,
                right,
                center,
            } => {
                if u <= *center {
                    left * u
                } else {
                    left * center + right * (u - center)
                }
            }
            Self::CosineStep {
                left,
                right,
                center,
                width,
            } => {
                let a = center - width / 2.0;
                let b = center + width / 2.0;
                if u <= a {
                    left * u
                } else if u >= b {
                    left * a + (left + right) / 2.0 * width + right * (u - b)
                } else {
                    // ∫ ramp from a to u with s = (w−a)/width
                    let s = (u - a) / width;
                    let ramp = 0.5 * (s - (std::f64::consts::PI * s).sin() / std::f64::consts::PI);
                    left * a + width * (left * s + (right - left) * ramp)
                }
            }
            Self::CosineBump {
                base,
                amplitude,
                center,
                width,
            } => {
                // ∫cos⁴(z) dz = 3z/8 + sin(2z)/4 + sin(4z)/32; bump support
                // [center−width/2, center+width/2] must lie inside [0,1].
                let pi = std::f64::consts::PI;
                let quartic_cdf = |z: f64| 3.0 * z / 8.0 + (2.0 * z).sin() / 4.0 + (4.0 * z).sin() / 32.0;
                let a = center - width / 2.0;
                let b = center + width / 2.0;
                let inside = if u > a {
                    let z1 = pi * (u.clamp(a, b) - center) / width;
                    amplitude * width / pi * (quartic_cdf(z1) - quartic_cdf(-pi / 2.0))
                } else {
                    0.0
                };
                base * u + inside
            }
            Self::Fourier { mean, terms } => {
                let mut v = mean * u;
                for t in terms {
                    let w = TWO_PI * t.k as f64;
                    v += t.amplitude / w * ((w * (u - t.phase)).sin() - (w * (-t.phase)).sin());
                }
                v
            }
        }
    }

    /// Checks 0 ≤ γ ≤ 1 on a dense grid, and that bump/ramp supports stay
    /// inside the cut interval [0, 1].
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Fourier { mean, terms } => {
                let budget: f64 = terms.iter().map(|t| t.amplitude.abs()).sum();
                if budget > mean.min(1.0 - mean) + 1e-12 {
                    return Err(Error::Domain(format!(
                        "fourier profile can leave [0,1]: mean {mean}, Σ|amp| {budget}"
                    )));
                }
            }
            Self::CosineBump { center, width, .. } | Self::CosineStep { center, width, .. } => {
                if center - width / 2.0 < 0.0 || center + width / 2.0 > 1.0 {
                    return Err(Error::Domain(
                        "bump/ramp support must lie inside [0,1]".into(),
                    ));
                }
            }
            _ => {}
        }
        let scan = 4096;
        for i in 0..scan {
            let u = (i as f64 + 0.5) / scan as f64;
            let v = self.value(u);
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Domain(format!(
                    "profile value {v} at u = {u} outside [0,1]"
                )));
            }
        }
        Ok(())
    }

    /// Strictly interior margin: min(min γ, 1 − max γ) on a dense grid.
    pub fn interior_margin(&self) -> f64 {
        let scan = 4096;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..=scan {
            let u = i as f64 / scan as f64;
            let v = self.value(u.min(1.0 - 1e-12));
            lo = lo.min(v);
            hi = hi.max(v);
        }
        lo.min(1.0 - hi)
    }
}

//! Unit-mass bump `ω` and its rescalings `ω_κ(x) = κ⁻³ ω(x/κ)`, sampled
//! through the radial Fourier transform
//! `ω̂(ρ) = 4π ∫₀¹ ω(r) r² sinc(ρr) dr`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::quadrature::integrate;
use crate::error::{NslabError, Result};
use crate::grid::Grid3;
use crate::multiplier::FourierMultiplier;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MollifierProfile {
    /// `c·exp(-1/(1-|x|²))` on the unit ball.
    #[default]
    Bump,
}

impl MollifierProfile {
    /// Unnormalized profile as a function of radius.
    fn shape(self, r: f64) -> f64 {
        match self {
            MollifierProfile::Bump => {
                if r >= 1.0 {
                    0.0
                } else {
                    (-1.0 / (1.0 - r * r)).exp()
                }
            }
        }
    }

    /// Normalization constant `c` making the profile unit-mass.
    pub fn normalization(self) -> f64 {
        static BUMP: OnceLock<f64> = OnceLock::new();
        match self {
            MollifierProfile::Bump => *BUMP.get_or_init(|| {
                let m = integrate(|r| 4.0 * PI * r * r * self.shape(r), 0.0, 1.0, 1e-16, 0.0, 2000)
                    .expect("bump mass quadrature")
                    .value;
                1.0 / m
            }),
        }
    }

    /// `ω(x)` at radius `r = |x|` for the unit-width profile.
    pub fn value(self, r: f64) -> f64 {
        self.normalization() * self.shape(r)
    }

    /// `ω̂(ρ)`, before enforcing `ω̂(0) = 1`.
    pub fn transform(self, rho: f64) -> f64 {
        let c = self.normalization();
        integrate(
            |r| {
                let x = rho * r;
                let s = if x.abs() < 1e-4 { 1.0 - x * x / 6.0 } else { x.sin() / x };
                4.0 * PI * r * r * self.shape(r) * s
            },
            0.0,
            1.0,
            1e-15,
            0.0,
            4000,
        )
        .expect("mollifier transform quadrature")
        .value
            * c
    }
}

#[derive(Debug, Clone)]
pub struct MollifierSpec {
    kappa: f64,
    profile: MollifierProfile,
    multiplier: FourierMultiplier,
}

impl MollifierSpec {
    pub fn new(grid: Grid3, kappa: f64, profile: MollifierProfile) -> Result<Self> {
        if !(kappa >= 0.0) || !kappa.is_finite() {
            return Err(NslabError::InvalidParameter(format!(
                "mollifier width must be nonnegative, got {kappa}"
            )));
        }
        if kappa > 0.5 * grid.length() {
            return Err(NslabError::SupportExceedsBox {
                kappa,
                box_length: grid.length(),
            });
        }
        let label = format!("mollifier(kappa={kappa})");
        if kappa == 0.0 {
            return Ok(Self {
                kappa,
                profile,
                multiplier: FourierMultiplier::radial(grid, label, |_| 1.0),
            });
        }
        let at_zero = profile.transform(0.0);
        let dk = grid.dk();
        // one quadrature per distinct integer |k|²
        let mut cache: HashMap<i64, f64> = HashMap::new();
        let values = (0..grid.len())
            .map(|idx| {
                let k2 = grid.freq_sq(idx);
                *cache.entry(k2).or_insert_with(|| {
                    if k2 == 0 {
                        1.0
                    } else {
                        profile.transform(kappa * dk * (k2 as f64).sqrt()) / at_zero
                    }
                })
            })
            .collect();
        Ok(Self {
            kappa,
            profile,
            multiplier: FourierMultiplier::new_real(grid, values, label)?,
        })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn profile(&self) -> MollifierProfile {
        self.profile
    }

    pub fn multiplier(&self) -> &FourierMultiplier {
        &self.multiplier
    }
}

/// `mollifier_symbol` under its operational name.
pub fn mollifier_symbol(grid: Grid3, kappa: f64, profile: MollifierProfile) -> Result<MollifierSpec> {
    MollifierSpec::new(grid, kappa, profile)
}

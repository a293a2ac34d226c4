//! Real-space evaluation of the radial kernel
//!
//! ```text
//! p_ℓ(x, 1) = (2π)⁻³ ∫ e^{-|ξ|^ℓ + i x·ξ} dξ = (2π²)⁻¹ ∫₀^∞ e^{-ρ^ℓ} ρ² sinc(ρ|x|) dρ
//! ```
//!
//! and of its `L¹` norm `C_ℓ`. The ρ-integral is truncated where
//! `e^{-ρ^ℓ} = 1e-16` and split into half periods of `sin(ρr)` once the
//! oscillation is resolved by more than a few lobes.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::quadrature::{gk15, integrate};
use crate::error::{NslabError, Result};

/// `ρ*` with `e^{-ρ*^ℓ} = 1e-16`.
pub fn rho_cutoff(ell: f64) -> f64 {
    (16.0 * std::f64::consts::LN_10).powf(1.0 / ell)
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `sin x - x cos x`, with a series near zero.
fn ball_factor(x: f64) -> f64 {
    if x.abs() < 1e-2 {
        let x2 = x * x;
        x * x2 / 3.0 * (1.0 - x2 / 10.0 + x2 * x2 / 280.0)
    } else {
        x.sin() - x * x.cos()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelValue {
    pub value: f64,
    pub error: f64,
}

/// Accuracy floor of a panel relative to its `L¹` mass; absolute
/// tolerances split over many panels can fall below rounding.
const PANEL_ROUNDING: f64 = 64.0 * f64::EPSILON;

/// Integral of `g` over `[0, ρ*]` where `g` oscillates with angular
/// frequency `freq`. Panels follow half periods when there are many.
fn oscillatory_integral(g: impl Fn(f64) -> f64 + Sync, rho_max: f64, freq: f64, tol: f64) -> Result<KernelValue> {
    let lobes = freq * rho_max / PI;
    if lobes <= 8.0 {
        let r = integrate(&g, 0.0, rho_max, tol, PANEL_ROUNDING, 4000)?;
        return Ok(KernelValue {
            value: r.value,
            error: r.error,
        });
    }
    let half = PI / freq;
    let panels = (rho_max / half).ceil() as usize;
    let per_panel = tol / panels as f64;
    let mut value = 0.0;
    let mut error = 0.0;
    for m in 0..panels {
        let a = m as f64 * half;
        let b = ((m + 1) as f64 * half).min(rho_max);
        let (v, e) = gk15(&g, a, b);
        if e <= per_panel {
            value += v;
            error += e;
        } else {
            let mass = gk15(&|x: f64| g(x).abs(), a, b).0;
            let r = integrate(&g, a, b, per_panel.max(PANEL_ROUNDING * mass), 0.0, 200)?;
            value += r.value;
            error += r.error;
        }
    }
    Ok(KernelValue { value, error })
}

/// `p_ℓ(r, 1)` for `|x| = r`.
pub fn kernel_realspace(ell: f64, r: f64) -> Result<KernelValue> {
    kernel_realspace_tol(ell, r, 1e-15)
}

pub fn kernel_realspace_tol(ell: f64, r: f64, tol: f64) -> Result<KernelValue> {
    if !(ell > 0.0) {
        return Err(NslabError::InvalidParameter(format!("ell must be positive, got {ell}")));
    }
    if !(r >= 0.0) {
        return Err(NslabError::InvalidParameter(format!(
            "radius must be nonnegative, got {r}"
        )));
    }
    let norm = 1.0 / (2.0 * PI * PI);
    let rho_max = rho_cutoff(ell);
    let v = oscillatory_integral(
        |rho| (-rho.powf(ell)).exp() * rho * rho * sinc(rho * r),
        rho_max,
        r,
        tol,
    )?;
    Ok(KernelValue {
        value: norm * v.value,
        error: norm * v.error,
    })
}

/// Mass of `p_ℓ(·, 1)` inside the ball of radius `R`, computed on the
/// Fourier side: `(2/π) ∫₀^∞ e^{-ρ^ℓ} (sin ρR - ρR cos ρR)/ρ dρ`.
pub fn ball_mass(ell: f64, radius: f64, tol: f64) -> Result<KernelValue> {
    let rho_max = rho_cutoff(ell);
    let v = oscillatory_integral(
        |rho| {
            if rho == 0.0 {
                0.0
            } else {
                (-rho.powf(ell)).exp() * ball_factor(rho * radius) / rho
            }
        },
        rho_max,
        radius,
        tol,
    )?;
    Ok(KernelValue {
        value: 2.0 / PI * v.value,
        error: 2.0 / PI * v.error,
    })
}

/// Samples of `p_ℓ(·, 1)` on increasing radii.
#[derive(Debug, Clone, Serialize)]
pub struct RadialKernelTable {
    pub ell: f64,
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    /// Estimated `|∫_{|x|>R} p_ℓ|` beyond the last radius.
    pub tail_bound: f64,
}

impl RadialKernelTable {
    pub fn build(ell: f64, radii: Vec<f64>) -> Result<Self> {
        if radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(NslabError::InvalidParameter("radii must increase".into()));
        }
        let values = radii
            .par_iter()
            .map(|&r| kernel_realspace(ell, r).map(|k| k.value))
            .collect::<Result<Vec<_>>>()?;
        let last = *radii.last().unwrap_or(&0.0);
        let tail_bound = (1.0 - ball_mass(ell, last, 1e-14)?.value).abs();
        Ok(Self {
            ell,
            radii,
            values,
            tail_bound,
        })
    }

    pub fn changes_sign(&self) -> bool {
        let scale = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let floor = 1e-12 * scale;
        let mut sign = 0.0;
        for &v in &self.values {
            if v.abs() <= floor {
                continue;
            }
            if sign != 0.0 && v.signum() != sign {
                return true;
            }
            sign = v.signum();
        }
        false
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Result of one `C_ℓ` evaluation at a fixed cutoff and tolerance.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ClPass {
    pub cutoff: f64,
    pub tolerance: f64,
    /// `4π ∫₀^R |p_ℓ| r² dr`.
    pub inner_abs: f64,
    /// `4π ∫₀^R p_ℓ r² dr`.
    pub inner_signed: f64,
    /// Same mass from the Fourier side.
    pub fourier_mass: f64,
    /// `|1 - fourier_mass|`, added when the kernel keeps one sign near `R`.
    pub tail: f64,
    pub tail_added: bool,
    pub value: f64,
    pub quad_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClEstimate {
    pub ell: f64,
    pub value: f64,
    /// Largest disagreement between the cutoff/tolerance variants plus the
    /// quadrature error of the base pass.
    pub error_estimate: f64,
    pub passes: Vec<ClPass>,
}

/// Noise floor of a kernel value relative to `p_ℓ(0, 1)`.
const SIGN_FLOOR: f64 = 1e-13;

fn cl_pass(ell: f64, cutoff: f64, tol: f64) -> Result<ClPass> {
    let p0 = kernel_realspace(ell, 0.0)?.value;
    let step = 0.05;
    let m = (cutoff / step).round() as usize;
    let radii: Vec<f64> = (0..=m).map(|i| i as f64 * cutoff / m as f64).collect();
    let vals = radii
        .par_iter()
        .map(|&r| kernel_realspace(ell, r).map(|k| k.value))
        .collect::<Result<Vec<_>>>()?;

    // sign changes above the noise floor, refined by bisection
    let floor = SIGN_FLOOR * p0.abs();
    let mut breaks = vec![0.0];
    let mut last_sign = vals[0].signum();
    let mut last_idx = 0;
    for i in 1..vals.len() {
        if vals[i].abs() <= floor {
            continue;
        }
        let s = vals[i].signum();
        if s != last_sign {
            let (mut lo, mut hi) = (radii[last_idx], radii[i]);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let pm = kernel_realspace(ell, mid)?.value;
                if pm.signum() == last_sign {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-13 * hi.max(1.0) {
                    break;
                }
            }
            breaks.push(0.5 * (lo + hi));
            last_sign = s;
        }
        last_idx = i;
    }
    breaks.push(cutoff);

    let weight = |r: f64| -> f64 { 4.0 * PI * r * r * kernel_realspace(ell, r).map(|k| k.value).unwrap_or(f64::NAN) };
    let mut inner_abs = 0.0;
    let mut inner_signed = 0.0;
    let mut quad_error = 0.0;
    let pieces: Vec<(f64, f64)> = breaks.windows(2).map(|w| (w[0], w[1])).collect();
    let results = pieces
        .par_iter()
        .map(|&(a, b)| integrate(weight, a, b, tol / pieces.len() as f64, 0.0, 2000))
        .collect::<Result<Vec<_>>>()?;
    for r in results {
        if !r.value.is_finite() {
            return Err(NslabError::TailBound("non-finite kernel sample".into()));
        }
        inner_abs += r.value.abs();
        inner_signed += r.value;
        quad_error += r.error;
    }

    let fourier_mass = ball_mass(ell, cutoff, 1e-14)?.value;
    let tail = (1.0 - fourier_mass).abs();
    // one sign over the outer half of [0, R]: the tail's |·| equals |∫ tail|
    let outer_sign_constant = breaks[..breaks.len() - 1].iter().all(|&b| b <= 0.5 * cutoff);
    let tail_added = outer_sign_constant;
    let value = inner_abs + if tail_added { tail } else { 0.0 };
    Ok(ClPass {
        cutoff,
        tolerance: tol,
        inner_abs,
        inner_signed,
        fourier_mass,
        tail,
        tail_added,
        value,
        quad_error,
    })
}

/// Default radial cutoffs `(R₁, R₂)` for the certification passes.
pub fn default_cutoffs(_ell: f64) -> (f64, f64) {
    (24.0, 36.0)
}

/// `C_ℓ = ‖p_ℓ(·, 1)‖₁`, certified by agreement of three passes: base,
/// tighter tolerance, and larger cutoff.
pub fn compute_cl(ell: f64) -> Result<ClEstimate> {
    if !(ell > 0.0) {
        return Err(NslabError::InvalidParameter(format!("ell must be positive, got {ell}")));
    }
    let (r1, r2) = default_cutoffs(ell);
    let tol = 1e-8;
    let passes = vec![
        cl_pass(ell, r1, tol)?,
        cl_pass(ell, r1, tol * 1e-2)?,
        cl_pass(ell, r2, tol)?,
    ];
    let base = passes[0].value;
    let spread = passes.iter().map(|p| (p.value - base).abs()).fold(0.0, f64::max);
    let error_estimate = spread + passes[0].quad_error;
    if error_estimate > 1e-4 {
        return Err(NslabError::TailBound(format!(
            "C_ell passes disagree by {error_estimate:e} for ell = {ell}"
        )));
    }
    // report the most accurate pass
    Ok(ClEstimate {
        ell,
        value: passes[1].value,
        error_estimate,
        passes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_case() {
        for i in 0..=40 {
            let r = i as f64 * 0.25;
            let got = kernel_realspace(2.0, r).unwrap().value;
            let exact = (4.0 * PI).powf(-1.5) * (-r * r / 4.0).exp();
            assert!((got - exact).abs() < 1e-8, "r = {r}: {got} vs {exact}");
        }
    }

    #[test]
    fn poisson_case_against_closed_form() {
        // independent oracle: 3D Poisson kernel (1/π²)(1 + r²)⁻²
        for &r in &[0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 30.0] {
            let got = kernel_realspace(1.0, r).unwrap().value;
            let exact = 1.0 / (PI * PI * (1.0 + r * r).powi(2));
            assert!((got - exact).abs() < 1e-6 * exact.max(1e-3), "r = {r}");
            assert!((got - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn quartic_kernel_changes_sign() {
        let radii: Vec<f64> = (1..=60).map(|i| i as f64 * 0.1).collect();
        let table = RadialKernelTable::build(4.0, radii).unwrap();
        assert!(table.changes_sign());
        assert!(table.min_value() < 0.0);
        let gauss = RadialKernelTable::build(2.0, (1..=60).map(|i| i as f64 * 0.1).collect()).unwrap();
        assert!(!gauss.changes_sign());
    }

    #[test]
    fn ball_mass_matches_gaussian_closed_form() {
        // mass of a Gaussian with variance 2 per axis inside radius R
        let r: f64 = 3.0;
        let s = 2f64.sqrt();
        let z = r / s;
        let exact = erf(z / 2f64.sqrt()) - (2.0 / PI).sqrt() * z * (-z * z / 2.0).exp();
        let got = ball_mass(2.0, r, 1e-14).unwrap().value;
        assert!((got - exact).abs() < 1e-10, "{got} vs {exact}");
    }

    fn erf(x: f64) -> f64 {
        // reference via quadrature of the defining integral
        2.0 / PI.sqrt() * integrate(|t| (-t * t).exp(), 0.0, x, 1e-15, 0.0, 1000).unwrap().value
    }

    #[test]
    fn invalid_parameters() {
        assert!(kernel_realspace(0.0, 1.0).is_err());
        assert!(kernel_realspace(2.0, -1.0).is_err());
        assert!(compute_cl(-1.0).is_err());
    }
}

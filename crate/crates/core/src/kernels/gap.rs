use std::f64::consts::PI;

use serde::Serialize;
use statrs::function::erf::erfc;

use crate::error::{NslabError, Result};
use crate::field::SpectralScalar;
use crate::grid::Grid3;

/// Gaussian mass allowed outside `|x| ≤ L/4`.
pub const CONTAINMENT_TOL: f64 = 1e-10;
/// Minimum heat-kernel width in cells.
pub const MIN_WIDTH_CELLS: f64 = 4.0;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GapSample {
    pub ell: f64,
    pub t: f64,
    pub gap: f64,
    pub n: usize,
    pub box_length: f64,
}

/// Mass of a centred 3D Gaussian with per-axis standard deviation `sigma`
/// outside the ball of radius `radius`.
pub fn gaussian_tail_mass(sigma: f64, radius: f64) -> f64 {
    let z = radius / sigma;
    erfc(z / 2f64.sqrt()) + (2.0 / PI).sqrt() * z * (-0.5 * z * z).exp()
}

/// Checks that `p(t/2)` (per-axis variance `t`) is resolved by at least
/// four cells and that its mass outside `|x| ≤ L/4` is below 1e-10.
pub fn check_gap_grid(t: f64, grid: &Grid3) -> Result<()> {
    let width = t.sqrt();
    if width < MIN_WIDTH_CELLS * grid.spacing() {
        return Err(NslabError::Resolution(format!(
            "kernel width {width:.4} below {MIN_WIDTH_CELLS} cells of {:.4}",
            grid.spacing()
        )));
    }
    let tail = gaussian_tail_mass(width, grid.length() / 4.0);
    if tail > CONTAINMENT_TOL {
        return Err(NslabError::Containment(format!(
            "kernel mass {tail:e} outside |x| <= L/4 at t = {t}"
        )));
    }
    Ok(())
}

/// `‖p_ℓ(t) * p(t/2) - p(t/2)‖₁` on the torus.
pub fn l1_semigroup_gap(ell: f64, t: f64, grid: &Grid3) -> Result<f64> {
    if !(ell > 0.0) {
        return Err(NslabError::InvalidParameter(format!("ell must be positive, got {ell}")));
    }
    if !(t > 0.0) {
        return Err(NslabError::InvalidParameter(format!("t must be positive, got {t}")));
    }
    check_gap_grid(t, grid)?;
    let vol = grid.length().powi(3);
    let coeffs = grid
        .xi_sq()
        .into_iter()
        .map(|k2| {
            let heat = (-0.5 * t * k2).exp();
            // e^{-t|ξ|^ℓ} - 1 without cancellation
            let d = (-t * k2.powf(0.5 * ell)).exp_m1();
            num_complex::Complex64::new(heat * d / vol, 0.0)
        })
        .collect();
    let kernel = SpectralScalar::new(*grid, coeffs)?.backward();
    Ok(kernel.data().iter().map(|v| v.abs()).sum::<f64>() * grid.cell_volume())
}

/// Grid with `n` points per axis scaled to `t`: the box is `30√t`, which
/// keeps the kernel resolved (`√t ≥ 4 Δx` for `n ≥ 120`) and contained.
pub fn scaled_gap_grid(t: f64, n: usize) -> Result<Grid3> {
    Grid3::new(n, 30.0 * t.sqrt())
}

pub fn gap_sample(ell: f64, t: f64, n: usize) -> Result<GapSample> {
    let grid = scaled_gap_grid(t, n)?;
    let gap = l1_semigroup_gap(ell, t, &grid)?;
    Ok(GapSample {
        ell,
        t,
        gap,
        n,
        box_length: grid.length(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn containment_guard_trips_on_large_t() {
        let g = Grid3::new(128, 30.0).unwrap();
        assert!(l1_semigroup_gap(4.0, 1.0, &g).is_ok());
        assert!(matches!(
            l1_semigroup_gap(4.0, 50.0, &g),
            Err(NslabError::Containment(_))
        ));
        assert!(matches!(
            l1_semigroup_gap(4.0, 0.01, &g),
            Err(NslabError::Resolution(_))
        ));
    }

    #[test]
    fn quadratic_case_is_scale_free() {
        let a = gap_sample(2.0, 1.0, 128).unwrap().gap;
        let b = gap_sample(2.0, 7.0, 128).unwrap().gap;
        assert!((a - b).abs() < 1e-12 * a);
    }
}

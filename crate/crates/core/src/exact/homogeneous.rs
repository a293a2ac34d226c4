use serde::{Deserialize, Serialize};

use crate::error::{NslabError, Result};
use crate::field::{PhysicalVector, SpectralVectorField};
use crate::grid::Grid3;
use crate::spectral::leray_project_in_place;

/// Smallest admissible core width, in cells.
pub const MIN_CORE_CELLS: f64 = 2.0;
/// Default core width, in cells.
pub const DEFAULT_CORE_CELLS: f64 = 4.0;
/// Largest admissible `‖Pu - u‖₂ / ‖u‖₂` after sampling.
pub const MAX_PROJECTION_CORRECTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case")]
pub enum Profile {
    /// `(-x₂, x₁, 0) / |x|²`
    Swirl,
}

/// Smoothing of the `|x|⁻¹` core: `|x| → (|x|² + δ²)^{1/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regularization {
    /// Core width in cells of the target grid.
    pub core_cells: f64,
}

impl Default for Regularization {
    fn default() -> Self {
        Self {
            core_cells: DEFAULT_CORE_CELLS,
        }
    }
}

impl Regularization {
    pub fn delta(&self, grid: &Grid3) -> f64 {
        self.core_cells * grid.spacing()
    }
}

/// Degree −1 homogeneous data before gridding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomogeneousData {
    #[serde(flatten)]
    pub profile: Profile,
    pub amplitude: f64,
    pub regularization: Regularization,
}

/// `ψ(s)`: C^∞, equal to 1 for `s ≤ 0` and 0 for `s ≥ 1`.
fn smooth_step(s: f64) -> f64 {
    let f = |t: f64| if t > 0.0 { (-1.0 / t).exp() } else { 0.0 };
    let a = f(1.0 - s);
    let b = f(s);
    a / (a + b)
}

/// Box window: 1 for `|x| ≤ L/4`, 0 for `|x| ≥ 3L/8`.
pub fn box_window(r: f64, length: f64) -> f64 {
    let (r_in, r_out) = (0.25 * length, 0.375 * length);
    smooth_step((r - r_in) / (r_out - r_in))
}

impl Profile {
    /// Profile with the smoothed core and no window.
    pub fn eval(&self, x: [f64; 3], amplitude: f64, delta: f64) -> [f64; 3] {
        match self {
            Profile::Swirl => {
                let s = amplitude / (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + delta * delta);
                [-x[1] * s, x[0] * s, 0.0]
            }
        }
    }
}

/// Gridded data together with what was done to it.
#[derive(Debug, Clone)]
pub struct GriddedData {
    pub field: SpectralVectorField,
    pub delta: f64,
    /// `‖Pu - u‖₂ / ‖u‖₂` for the sampled, windowed profile.
    pub projection_correction: f64,
}

impl HomogeneousData {
    pub fn swirl(amplitude: f64) -> Self {
        Self {
            profile: Profile::Swirl,
            amplitude,
            regularization: Regularization::default(),
        }
    }

    pub fn with_core_cells(mut self, cells: f64) -> Self {
        self.regularization.core_cells = cells;
        self
    }

    /// Windowed, regularized profile at a point.
    pub fn eval(&self, x: [f64; 3], grid: &Grid3) -> [f64; 3] {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        let w = box_window(r, grid.length());
        let v = self.profile.eval(x, self.amplitude, self.regularization.delta(grid));
        v.map(|a| a * w)
    }

    /// Samples, projects and removes the mean.
    pub fn grid_data(&self, grid: &Grid3) -> Result<GriddedData> {
        if !self.amplitude.is_finite() {
            return Err(NslabError::InvalidParameter(format!("amplitude {}", self.amplitude)));
        }
        if !(self.regularization.core_cells >= MIN_CORE_CELLS) {
            return Err(NslabError::CoreUnderResolved(format!(
                "core width {} cells, need at least {MIN_CORE_CELLS}",
                self.regularization.core_cells
            )));
        }
        let sampled = SpectralVectorField::forward(&PhysicalVector::from_fn(*grid, |x| self.eval(x, grid)));
        let mut field = sampled.clone();
        leray_project_in_place(&mut field);
        field.remove_mean();
        let base = sampled.l2_norm();
        let projection_correction = if base > 0.0 {
            field.sub(&sampled)?.l2_norm() / base
        } else {
            0.0
        };
        if projection_correction > MAX_PROJECTION_CORRECTION {
            return Err(NslabError::Resolution(format!(
                "projection changed the sampled data by {projection_correction:e} in L2"
            )));
        }
        Ok(GriddedData {
            field,
            delta: self.regularization.delta(grid),
            projection_correction,
        })
    }
}

/// `homogeneous_data` under its operational name.
pub fn homogeneous_data(
    profile: Profile,
    amplitude: f64,
    grid: &Grid3,
    regularization: Regularization,
) -> Result<SpectralVectorField> {
    let data = HomogeneousData {
        profile,
        amplitude,
        regularization,
    };
    Ok(data.grid_data(grid)?.field)
}

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{NslabError, Result};
use crate::grid::Grid3;
use crate::norms::VectorNorm;
use crate::solver::graded_time_grid;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    pub box_length: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            n: 64,
            box_length: 40.0,
        }
    }
}

impl GridConfig {
    pub fn grid(&self) -> Result<Grid3> {
        Grid3::new(self.n, self.box_length)
    }
}

/// Graded nodes `t_m = T (m/M)^γ`; every interval is split into `substeps`
/// ETD steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeConfig {
    pub t_final: f64,
    pub nodes: usize,
    pub grading: f64,
    pub substeps: usize,
}

impl Default for TimeConfig {
    fn default() -> Self {
        Self {
            t_final: 25.0,
            nodes: 200,
            grading: 2.0,
            substeps: 1,
        }
    }
}

impl TimeConfig {
    pub fn nodes(&self) -> Result<Vec<f64>> {
        graded_time_grid(self.t_final, self.nodes, self.grading)
    }
}

/// Regularized homogeneous swirl data shared by the flow experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    pub amplitude: f64,
    pub core_cells: f64,
}

impl Default for DataConfig {
    fn default() -> Self {
        Self {
            amplitude: 0.1,
            core_cells: 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelfSimConfig {
    pub p: f64,
    pub window: [f64; 2],
    /// Largest admissible `max/min - 1` of the functional over the window.
    pub tolerance: f64,
    pub rescale_lambda: f64,
    pub rescale_t0: f64,
    /// Comparison ball radius as a fraction of the box.
    pub rescale_radius: f64,
    pub rescale_tolerance: f64,
}

impl Default for SelfSimConfig {
    fn default() -> Self {
        Self {
            p: 4.0,
            window: [0.35, 2.8],
            tolerance: 0.10,
            rescale_lambda: 2.0,
            rescale_t0: 0.5,
            rescale_radius: 0.125,
            rescale_tolerance: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MollifiedConfig {
    /// Mollifier widths in cells; the first one is gated.
    pub kappa_cells: Vec<f64>,
    pub p: Vec<f64>,
    pub window: [f64; 2],
    pub min_drop_per_decade: f64,
}

impl Default for MollifiedConfig {
    fn default() -> Self {
        Self {
            kappa_cells: vec![2.0, 4.0],
            p: vec![4.0, 6.0],
            window: [2.5, 25.0],
            min_drop_per_decade: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HyperConfig {
    pub ell: f64,
    pub p: Vec<f64>,
    pub window: [f64; 2],
    pub min_drop_per_decade: f64,
    pub linear_slope_tolerance: f64,
    /// Divergence-form force `∇·(g(t) a G_w M)`, shared by both models.
    pub force_amplitude: f64,
    pub force_width: f64,
    pub force_t0: f64,
    pub force_power: f64,
}

impl Default for HyperConfig {
    fn default() -> Self {
        Self {
            ell: 4.0,
            p: vec![4.0, 6.0],
            window: [2.5, 25.0],
            min_drop_per_decade: 2.0,
            linear_slope_tolerance: 0.1,
            force_amplitude: 0.05,
            force_width: 2.0,
            force_t0: 1.0,
            force_power: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StabilityConfig {
    /// Perturbation `∇×(0, 0, A e^{-|x-c|²/2s²})`.
    pub bump_amplitude: f64,
    pub bump_width: f64,
    pub bump_center: [f64; 3],
    pub p: Vec<f64>,
    pub window: [f64; 2],
    pub min_drop_per_decade: f64,
    /// Largest admissible `‖u-ũ‖ / ‖S(t)(u₀-ũ₀)‖` over the window.
    pub max_bound_ratio: f64,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        Self {
            bump_amplitude: 0.1,
            bump_width: 1.5,
            bump_center: [2.0, -1.0, 0.5],
            p: vec![4.0, 6.0],
            window: [2.5, 25.0],
            min_drop_per_decade: 4.0,
            max_bound_ratio: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelsConfig {
    pub unit_ells: Vec<f64>,
    pub unit_tolerance: f64,
    pub large_ell: f64,
    pub large_min: f64,
    pub gap_ells: Vec<f64>,
    pub gap_times: Vec<f64>,
    pub gap_n: usize,
    pub slope_tolerance: f64,
    pub invariance_tolerance: f64,
}

impl Default for KernelsConfig {
    fn default() -> Self {
        Self {
            unit_ells: vec![1.0, 1.5, 2.0],
            unit_tolerance: 1e-4,
            large_ell: 4.0,
            large_min: 1.001,
            gap_ells: vec![3.0, 4.0, 6.0],
            gap_times: vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0],
            gap_n: 128,
            slope_tolerance: 0.05,
            invariance_tolerance: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LandauConfig {
    pub c: Vec<f64>,
    pub samples: usize,
    pub h: f64,
    pub shell: [f64; 2],
    pub residual_tolerance: f64,
    pub divergence_tolerance: f64,
    /// Point-force run: Gaussian surrogate of `b δ₀` on its own grid.
    pub force_grid: GridConfig,
    pub force_b: [f64; 3],
    pub force_sigma_cells: f64,
    pub force_time: TimeConfig,
    pub stationarity_tolerance: f64,
}

impl Default for LandauConfig {
    fn default() -> Self {
        Self {
            c: vec![-3.0, -1.5, 1.5, 2.0, 5.0],
            samples: 100,
            h: 1e-3,
            shell: [0.5, 4.0],
            residual_tolerance: 1e-7,
            divergence_tolerance: 1e-9,
            force_grid: GridConfig {
                n: 32,
                box_length: 10.0,
            },
            force_b: [2.0, 0.0, 0.0],
            force_sigma_cells: 6.0,
            force_time: TimeConfig {
                t_final: 20.0,
                nodes: 80,
                grading: 1.5,
                substeps: 1,
            },
            stationarity_tolerance: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelfTestConfig {
    pub fields: usize,
    pub n: usize,
    pub random_sets: usize,
    pub holder_slack: f64,
    /// Solver cross-check on a small periodic box.
    pub solver_n: usize,
    pub solver_amplitude: f64,
    pub solver_t_final: f64,
    pub solver_nodes: usize,
    pub solver_agreement: f64,
}

impl Default for SelfTestConfig {
    fn default() -> Self {
        Self {
            fields: 100,
            n: 16,
            random_sets: 10_000,
            holder_slack: 1e-9,
            solver_n: 16,
            solver_amplitude: 0.05,
            solver_t_final: 1.0,
            solver_nodes: 128,
            solver_agreement: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub seed: u64,
    pub vector_norm: VectorNorm,
    pub grid: GridConfig,
    pub time: TimeConfig,
    pub data: DataConfig,
    pub selfsim: SelfSimConfig,
    pub mollified: MollifiedConfig,
    pub hyper: HyperConfig,
    pub stability: StabilityConfig,
    pub kernels: KernelsConfig,
    pub landau: LandauConfig,
    pub selftest: SelfTestConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            name: "desk".into(),
            seed: 20_240_601,
            vector_norm: VectorNorm::Euclidean,
            grid: GridConfig::default(),
            time: TimeConfig::default(),
            data: DataConfig::default(),
            selfsim: SelfSimConfig::default(),
            mollified: MollifiedConfig::default(),
            hyper: HyperConfig::default(),
            stability: StabilityConfig::default(),
            kernels: KernelsConfig::default(),
            landau: LandauConfig::default(),
            selftest: SelfTestConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| NslabError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| NslabError::Config(e.to_string()))
    }

    /// SHA-256 of the canonical JSON form, as 16 hex digits.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_hash() {
        let c = ExperimentConfig::default();
        let text = c.to_toml().unwrap();
        let back = ExperimentConfig::from_toml(&text).unwrap();
        assert_eq!(c, back);
        assert_eq!(c.hash(), back.hash());
        assert_eq!(c.hash().len(), 16);
        let mut d = c.clone();
        d.seed += 1;
        assert_ne!(c.hash(), d.hash());
    }

    #[test]
    fn partial_files_fill_defaults() {
        let c = ExperimentConfig::from_toml("seed = 7\n[grid]\nn = 32\n").unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.grid.n, 32);
        assert_eq!(c.grid.box_length, 40.0);
        assert_eq!(c.time, TimeConfig::default());
        assert!(ExperimentConfig::from_toml("[grid]\nm = 3\n").is_err());
    }
}

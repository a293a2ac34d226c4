//! Landau solutions, homogeneous data and the parabolic rescaling.

pub mod homogeneous;
pub mod landau;
pub mod rescale;

pub use homogeneous::{box_window, homogeneous_data, GriddedData, HomogeneousData, Profile, Regularization};
pub use landau::{landau_eval, landau_residual, shell_samples, LandauReport, LandauSolution, PointResidual};
pub use rescale::{ball_l2_norm, rescale, rescale_with_tolerance, rescaled_time};

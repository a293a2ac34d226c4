//! Reproducible scenarios behind the `nslab` subcommands. Each returns the
//! curves it measured and a report of its declared checks.

pub mod config;
pub mod flows;
pub mod kernels;
pub mod landau;
pub mod report;
pub mod selftest;

pub use config::ExperimentConfig;
pub use flows::{exp_hyperviscous, exp_mollified, exp_selfsim, exp_stability};
pub use kernels::exp_kernels;
pub use landau::exp_landau;
pub use report::{Check, Outcome, Report};
pub use selftest::{exp_norms_selftest, exp_solver_selftest, exp_spectral_selftest};

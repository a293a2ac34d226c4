// `!(x <= tol)` is deliberate throughout: NaN must fail a check.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

//! Pseudo-spectral laboratory for mild solutions of the incompressible
//! Navier–Stokes system on a large periodic box, together with the
//! mollified (Leray) and hyperviscous (Lions) regularizations.
//!
//! The crate is organized by role:
//!
//! * [`grid`], [`field`], [`multiplier`], [`spectral`]: discretization,
//!   transforms, Leray projection and the quadratic terms.
//! * [`kernels`]: semigroup multipliers, the hyperviscous kernel `p_ℓ`,
//!   the constant `C_ℓ`, and mollifiers.
//! * [`norms`]: `L^p`, weak-`L^p`, heat-extension norms and decay curves.
//! * [`solver`]: Duhamel form, Picard iteration, an ETD2 marcher, models.
//! * [`exact`]: Landau solutions, homogeneous data, parabolic rescaling.
//! * [`experiments`]: reproducible scenarios driven by the `nslab` CLI.

pub mod error;
pub mod exact;
pub mod experiments;
pub mod fft;
pub mod field;
pub mod grid;
pub mod kernels;
pub mod multiplier;
pub mod norms;
pub mod snapshot;
pub mod solver;
pub mod spectral;

pub use error::{NslabError, Result};
pub use field::{PhysicalScalar, PhysicalVector, SpectralScalar, SpectralVectorField};
pub use grid::{make_grid, Grid3};
pub use multiplier::FourierMultiplier;

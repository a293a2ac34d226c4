//! Semigroup multipliers, the hyperviscous kernel `p_ℓ` and its `L¹` mass,
//! and the mollifier family.

pub mod gap;
pub mod mollifier;
pub mod quadrature;
pub mod radial;

pub use gap::{gap_sample, l1_semigroup_gap, GapSample};
pub use mollifier::{mollifier_symbol, MollifierProfile, MollifierSpec};
pub use radial::{compute_cl, kernel_realspace, ClEstimate, KernelValue, RadialKernelTable};

use crate::error::{NslabError, Result};
use crate::grid::Grid3;
use crate::multiplier::FourierMultiplier;

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(NslabError::InvalidParameter(format!(
            "semigroup time must be nonnegative, got {t}"
        )));
    }
    Ok(())
}

fn check_order(ell: f64) -> Result<()> {
    if !(ell > 0.0) || !ell.is_finite() {
        return Err(NslabError::InvalidParameter(format!(
            "dissipation order must be positive, got {ell}"
        )));
    }
    Ok(())
}

/// Exponent `λ(ξ)` of a propagator `e^{-tλ(ξ)}` as a function of `|ξ|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dissipation {
    /// `|ξ|²`
    Heat,
    /// `|ξ|^ℓ`
    Hyper(f64),
    /// `|ξ|² + |ξ|^ℓ`
    Combined(f64),
}

impl Dissipation {
    #[inline]
    pub fn rate(&self, xi_sq: f64) -> f64 {
        match *self {
            Dissipation::Heat => xi_sq,
            Dissipation::Hyper(ell) => xi_sq.powf(0.5 * ell),
            Dissipation::Combined(ell) => xi_sq + xi_sq.powf(0.5 * ell),
        }
    }

    pub fn rates(&self, grid: &Grid3) -> Vec<f64> {
        grid.xi_sq().into_iter().map(|k2| self.rate(k2)).collect()
    }

    pub fn multiplier(&self, grid: &Grid3, t: f64) -> Result<FourierMultiplier> {
        check_time(t)?;
        if let Dissipation::Hyper(ell) | Dissipation::Combined(ell) = *self {
            check_order(ell)?;
        }
        let label = match *self {
            Dissipation::Heat => format!("heat(t={t})"),
            Dissipation::Hyper(ell) => format!("hyper(t={t},ell={ell})"),
            Dissipation::Combined(ell) => format!("combined(t={t},ell={ell})"),
        };
        let this = *self;
        Ok(FourierMultiplier::radial(*grid, label, move |k2| {
            (-t * this.rate(k2)).exp()
        }))
    }
}

/// `e^{-t|ξ|²}`.
pub fn heat_multiplier(grid: &Grid3, t: f64) -> Result<FourierMultiplier> {
    Dissipation::Heat.multiplier(grid, t)
}

/// `e^{-t|ξ|^ℓ}`.
pub fn hyper_multiplier(grid: &Grid3, t: f64, ell: f64) -> Result<FourierMultiplier> {
    Dissipation::Hyper(ell).multiplier(grid, t)
}

/// `e^{-t(|ξ|² + |ξ|^ℓ)}`, the symbol of `S_ℓ(t)S(t)`.
pub fn combined_multiplier(grid: &Grid3, t: f64, ell: f64) -> Result<FourierMultiplier> {
    Dissipation::Combined(ell).multiplier(grid, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PhysicalScalar, SpectralScalar};
    use std::f64::consts::PI;

    #[test]
    fn zero_time_is_identity() {
        let g = Grid3::new(8, 3.0).unwrap();
        for m in [
            heat_multiplier(&g, 0.0).unwrap(),
            hyper_multiplier(&g, 0.0, 4.0).unwrap(),
            combined_multiplier(&g, 0.0, 3.0).unwrap(),
        ] {
            assert!(m.real_values().unwrap().iter().all(|&v| v == 1.0));
        }
    }

    #[test]
    fn semigroup_law() {
        let g = Grid3::new(16, 2.0).unwrap();
        for d in [Dissipation::Heat, Dissipation::Hyper(4.0), Dissipation::Combined(3.0)] {
            let a = d.multiplier(&g, 0.013).unwrap();
            let b = d.multiplier(&g, 0.029).unwrap();
            let ab = d.multiplier(&g, 0.042).unwrap();
            let prod = a.compose(&b).unwrap();
            for (x, y) in prod.real_values().unwrap().iter().zip(ab.real_values().unwrap()) {
                assert!((x - y).abs() <= 1e-12 * y.abs());
            }
        }
    }

    #[test]
    fn hyper_at_two_is_heat() {
        let g = Grid3::new(8, 5.0).unwrap();
        let h = hyper_multiplier(&g, 0.3, 2.0).unwrap();
        let s = heat_multiplier(&g, 0.3).unwrap();
        for (a, b) in h.real_values().unwrap().iter().zip(s.real_values().unwrap()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_negative_time_and_order() {
        let g = Grid3::new(8, 1.0).unwrap();
        assert!(heat_multiplier(&g, -1.0).is_err());
        assert!(hyper_multiplier(&g, 1.0, 0.0).is_err());
        assert!(combined_multiplier(&g, 1.0, -2.0).is_err());
    }

    fn gaussian(grid: Grid3, s: f64) -> PhysicalScalar {
        // heat kernel p(x, s): per-axis variance 2s
        PhysicalScalar::from_fn(grid, |x| {
            let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
            (4.0 * PI * s).powf(-1.5) * (-r2 / (4.0 * s)).exp()
        })
    }

    #[test]
    fn heat_flow_of_gaussian() {
        let g = Grid3::new(64, 2.0 * PI).unwrap();
        let (s, t) = (0.05, 0.025);
        let start = SpectralScalar::forward(&gaussian(g, s));
        let evolved = heat_multiplier(&g, t).unwrap().apply_scalar(&start).unwrap().backward();
        let exact = gaussian(g, s + t);
        let scale = exact.data().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (a, b) in evolved.data().iter().zip(exact.data()) {
            assert!((a - b).abs() < 1e-10 * scale);
        }
    }
}

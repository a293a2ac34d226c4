//! Exponential-integrator weights, tabulated per distinct `|k|²`.

use num_complex::Complex64;

use crate::field::SpectralVectorField;
use crate::grid::Grid3;
use crate::kernels::Dissipation;

/// `(e^{-z}, φ₁(-z), φ₂(-z))` for `z ≥ 0`, with
/// `φ₁(-z) = (1 - e^{-z})/z` and `φ₂(-z) = (e^{-z} - 1 + z)/z²`.
pub fn phi_weights(z: f64) -> (f64, f64, f64) {
    let e = (-z).exp();
    if z.abs() < 0.1 {
        // Σ (-z)^k/(k+1)! and Σ (-z)^k/(k+2)!
        let mut p1 = 0.0;
        let mut p2 = 0.0;
        let mut term1 = 1.0;
        let mut term2 = 0.5;
        for k in 0..16 {
            p1 += term1;
            p2 += term2;
            term1 *= -z / (k as f64 + 2.0);
            term2 *= -z / (k as f64 + 3.0);
        }
        return (e, p1, p2);
    }
    let em1 = (-z).exp_m1();
    (e, -em1 / z, (em1 + z) / (z * z))
}

/// Dissipation rates grouped by integer `|k|²`; all multipliers of a model
/// are radial, so per-step weights are computed once per shell.
#[derive(Debug, Clone)]
pub struct Spectrum {
    grid: Grid3,
    keys: Vec<u32>,
    rates: Vec<f64>,
}

/// Step weights indexed by shell.
#[derive(Debug, Clone)]
pub struct StepWeights {
    pub h: f64,
    pub exp: Vec<f64>,
    pub phi1: Vec<f64>,
    pub phi2: Vec<f64>,
}

impl Spectrum {
    pub fn new(grid: &Grid3, dissipation: Dissipation) -> Self {
        let keys: Vec<u32> = (0..grid.len()).map(|idx| grid.freq_sq(idx) as u32).collect();
        let max = keys.iter().copied().max().unwrap_or(0) as usize;
        let dk2 = grid.dk() * grid.dk();
        let rates = (0..=max).map(|k2| dissipation.rate(dk2 * k2 as f64)).collect();
        Self {
            grid: *grid,
            keys,
            rates,
        }
    }

    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    pub fn weights(&self, h: f64) -> StepWeights {
        let mut exp = Vec::with_capacity(self.rates.len());
        let mut phi1 = Vec::with_capacity(self.rates.len());
        let mut phi2 = Vec::with_capacity(self.rates.len());
        for r in &self.rates {
            let (e, a, b) = phi_weights(h * r);
            exp.push(e);
            phi1.push(a);
            phi2.push(b);
        }
        StepWeights { h, exp, phi1, phi2 }
    }

    pub fn propagate(&self, f: &SpectralVectorField, t: f64) -> SpectralVectorField {
        let table: Vec<f64> = self.rates.iter().map(|r| (-t * r).exp()).collect();
        self.apply_table(f, &table)
    }

    pub fn apply_table(&self, f: &SpectralVectorField, table: &[f64]) -> SpectralVectorField {
        let mut out = f.clone();
        for comp in out.coeffs_mut().iter_mut() {
            for (z, &key) in comp.iter_mut().zip(&self.keys) {
                *z *= table[key as usize];
            }
        }
        out
    }

    /// `Σ_i table_i[k]·f_i` coefficientwise.
    pub fn combine(&self, terms: &[(&[f64], f64, &SpectralVectorField)]) -> SpectralVectorField {
        let mut coeffs = [
            vec![Complex64::default(); self.grid.len()],
            vec![Complex64::default(); self.grid.len()],
            vec![Complex64::default(); self.grid.len()],
        ];
        let mut solenoidal = true;
        for (table, scale, f) in terms {
            solenoidal &= f.is_solenoidal();
            for (c, out) in coeffs.iter_mut().enumerate() {
                for ((o, z), &key) in out.iter_mut().zip(f.component(c)).zip(&self.keys) {
                    *o += *z * (scale * table[key as usize]);
                }
            }
        }
        SpectralVectorField::from_parts(self.grid, coeffs, solenoidal)
    }
}

impl StepWeights {
    /// `φ₁ - φ₂`, the weight of the left node in product integration.
    pub fn left(&self) -> Vec<f64> {
        self.phi1.iter().zip(&self.phi2).map(|(a, b)| a - b).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.exp
            .iter()
            .chain(&self.phi1)
            .chain(&self.phi2)
            .all(|v| v.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct(z: f64) -> (f64, f64) {
        ((1.0 - (-z).exp()) / z, ((-z).exp() - 1.0 + z) / (z * z))
    }

    #[test]
    fn series_matches_closed_form_near_threshold() {
        for z in [0.0999, 0.1, 0.1001] {
            let (_, a, b) = phi_weights(z);
            let (c, d) = direct(z);
            assert!((a - c).abs() < 1e-14 && (b - d).abs() < 1e-13, "{z}");
        }
        let (e, a, b) = phi_weights(0.0);
        assert_eq!((e, a, b), (1.0, 1.0, 0.5));
    }

    #[test]
    fn large_argument_limits() {
        let (e, a, b) = phi_weights(1e6);
        assert_eq!(e, 0.0);
        assert!((a - 1e-6).abs() < 1e-18);
        assert!((b - 1e-6).abs() < 1e-11);
    }

    #[test]
    fn weights_integrate_linear_functions_exactly() {
        // ∫₀^h e^{-λs}(f₀·s/h + f₁·(1 - s/h)) ds by quadrature
        let (lambda, h) = (3.7, 0.4);
        let (_, p1, p2) = phi_weights(lambda * h);
        let n = 200_000;
        let ds = h / n as f64;
        let (mut left, mut right) = (0.0, 0.0);
        for i in 0..n {
            let s = (i as f64 + 0.5) * ds;
            left += (-lambda * s).exp() * s / h * ds;
            right += (-lambda * s).exp() * (1.0 - s / h) * ds;
        }
        assert!((left - h * (p1 - p2)).abs() < 1e-10);
        assert!((right - h * p2).abs() < 1e-10);
    }
}

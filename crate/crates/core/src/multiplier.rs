use num_complex::Complex64;

use crate::error::{NslabError, Result};
use crate::field::{SpectralScalar, SpectralVectorField};
use crate::grid::Grid3;

#[derive(Debug, Clone, PartialEq)]
pub enum Symbol {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

/// Diagonal operator in Fourier space, applied identically to every
/// component of a vector field.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierMultiplier {
    grid: Grid3,
    symbol: Symbol,
    label: String,
}

impl FourierMultiplier {
    pub fn new_real(grid: Grid3, values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(NslabError::DimensionMismatch {
                expected: grid.len(),
                actual: values.len(),
            });
        }
        Ok(Self {
            grid,
            symbol: Symbol::Real(values),
            label: label.into(),
        })
    }

    pub fn new_complex(grid: Grid3, values: Vec<Complex64>, label: impl Into<String>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(NslabError::DimensionMismatch {
                expected: grid.len(),
                actual: values.len(),
            });
        }
        Ok(Self {
            grid,
            symbol: Symbol::Complex(values),
            label: label.into(),
        })
    }

    pub fn identity(grid: Grid3) -> Self {
        Self {
            grid,
            symbol: Symbol::Real(vec![1.0; grid.len()]),
            label: "identity".into(),
        }
    }

    /// Radial real symbol `m(|ξ|²)`.
    pub fn radial(grid: Grid3, label: impl Into<String>, m: impl Fn(f64) -> f64) -> Self {
        let values = grid.xi_sq().into_iter().map(m).collect();
        Self {
            grid,
            symbol: Symbol::Real(values),
            label: label.into(),
        }
    }

    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn symbol(&self) -> &Symbol {
        &self.symbol
    }

    /// Real values; `None` for complex symbols.
    pub fn real_values(&self) -> Option<&[f64]> {
        match &self.symbol {
            Symbol::Real(v) => Some(v),
            Symbol::Complex(_) => None,
        }
    }

    pub fn value(&self, idx: usize) -> Complex64 {
        match &self.symbol {
            Symbol::Real(v) => Complex64::new(v[idx], 0.0),
            Symbol::Complex(v) => v[idx],
        }
    }

    /// Pointwise product of symbols.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(NslabError::GridMismatch);
        }
        let symbol = match (&self.symbol, &other.symbol) {
            (Symbol::Real(a), Symbol::Real(b)) => Symbol::Real(a.iter().zip(b).map(|(x, y)| x * y).collect()),
            _ => Symbol::Complex((0..self.grid.len()).map(|i| self.value(i) * other.value(i)).collect()),
        };
        Ok(Self {
            grid: self.grid,
            symbol,
            label: format!("{}*{}", self.label, other.label),
        })
    }

    pub fn apply_in_place(&self, f: &mut SpectralVectorField) -> Result<()> {
        if self.grid != *f.grid() {
            return Err(NslabError::GridMismatch);
        }
        for c in f.coeffs_mut().iter_mut() {
            self.apply_slice(c);
        }
        Ok(())
    }

    /// Scalar symbols commute with the Leray projector, so the solenoidal
    /// flag carries over.
    pub fn apply(&self, f: &SpectralVectorField) -> Result<SpectralVectorField> {
        let mut out = f.clone();
        self.apply_in_place(&mut out)?;
        Ok(out)
    }

    pub fn apply_scalar(&self, f: &SpectralScalar) -> Result<SpectralScalar> {
        if self.grid != *f.grid() {
            return Err(NslabError::GridMismatch);
        }
        let mut out = f.clone();
        self.apply_slice(out.coeffs_mut());
        Ok(out)
    }

    fn apply_slice(&self, c: &mut [Complex64]) {
        match &self.symbol {
            Symbol::Real(v) => c.iter_mut().zip(v).for_each(|(z, m)| *z *= *m),
            Symbol::Complex(v) => c.iter_mut().zip(v).for_each(|(z, m)| *z *= *m),
        }
    }
}

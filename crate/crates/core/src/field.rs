//! Physical samples and Fourier-series coefficients of scalar and vector
//! fields on a [`Grid3`].
//!
//! Coefficients are Fourier-series coefficients: the forward transform
//! divides by `n³`, so a constant field `c` has coefficient `c` at `ξ = 0`
//! and `∫|u|² = L³ Σ|û|²`.

use num_complex::Complex64;

use crate::error::{NslabError, Result};
use crate::fft::{self, Direction};
use crate::grid::Grid3;

/// Per-mode tolerance on `|ξ·û| / (|ξ||û|)` for fields flagged solenoidal.
pub const EPS_DIV: f64 = 1e-10;
/// Relative coefficient size below which the defect is measured against the
/// largest coefficient instead of the mode's own size.
pub const DEFECT_FLOOR: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalScalar {
    grid: Grid3,
    data: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalVector {
    grid: Grid3,
    data: [Vec<f64>; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralScalar {
    grid: Grid3,
    coeffs: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralVectorField {
    grid: Grid3,
    coeffs: [Vec<Complex64>; 3],
    solenoidal: bool,
}

fn check_len(grid: &Grid3, len: usize) -> Result<()> {
    if len != grid.len() {
        return Err(NslabError::DimensionMismatch {
            expected: grid.len(),
            actual: len,
        });
    }
    Ok(())
}

impl PhysicalScalar {
    pub fn new(grid: Grid3, data: Vec<f64>) -> Result<Self> {
        check_len(&grid, data.len())?;
        Ok(Self { grid, data })
    }

    pub fn zeros(grid: Grid3) -> Self {
        Self {
            grid,
            data: vec![0.0; grid.len()],
        }
    }

    /// Samples `f(x)` at centered coordinates (origin at index 0).
    pub fn from_fn(grid: Grid3, f: impl Fn([f64; 3]) -> f64) -> Self {
        let xs = grid.centered_coords();
        let data = (0..grid.len())
            .map(|idx| {
                let (i, j, k) = grid.unravel(idx);
                f([xs[i], xs[j], xs[k]])
            })
            .collect();
        Self { grid, data }
    }

    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }
}

impl PhysicalVector {
    pub fn new(grid: Grid3, data: [Vec<f64>; 3]) -> Result<Self> {
        for c in &data {
            check_len(&grid, c.len())?;
        }
        Ok(Self { grid, data })
    }

    pub fn zeros(grid: Grid3) -> Self {
        Self {
            grid,
            data: [vec![0.0; grid.len()], vec![0.0; grid.len()], vec![0.0; grid.len()]],
        }
    }

    pub fn from_fn(grid: Grid3, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        let xs = grid.centered_coords();
        let mut out = Self::zeros(grid);
        for idx in 0..grid.len() {
            let (i, j, k) = grid.unravel(idx);
            let v = f([xs[i], xs[j], xs[k]]);
            for c in 0..3 {
                out.data[c][idx] = v[c];
            }
        }
        out
    }

    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    pub fn component(&self, c: usize) -> &[f64] {
        &self.data[c]
    }

    pub fn components(&self) -> &[Vec<f64>; 3] {
        &self.data
    }

    pub fn into_components(self) -> [Vec<f64>; 3] {
        self.data
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> Vec<f64> {
        (0..self.grid.len())
            .map(|i| (self.data[0][i].powi(2) + self.data[1][i].powi(2) + self.data[2][i].powi(2)).sqrt())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.magnitude().into_iter().fold(0.0, f64::max)
    }
}

impl SpectralScalar {
    pub fn new(grid: Grid3, coeffs: Vec<Complex64>) -> Result<Self> {
        check_len(&grid, coeffs.len())?;
        Ok(Self { grid, coeffs })
    }

    pub fn zeros(grid: Grid3) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::default(); grid.len()],
        }
    }

    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn forward(f: &PhysicalScalar) -> Self {
        let mut out = forward_many(&f.grid, &[f.data()]);
        Self {
            grid: f.grid,
            coeffs: out.pop().expect("one output"),
        }
    }

    pub fn backward(&self) -> PhysicalScalar {
        let mut out = backward_many(&self.grid, &[&self.coeffs]);
        PhysicalScalar {
            grid: self.grid,
            data: out.pop().expect("one output"),
        }
    }
}

impl SpectralVectorField {
    pub fn zeros(grid: Grid3) -> Self {
        let z = vec![Complex64::default(); grid.len()];
        Self {
            grid,
            coeffs: [z.clone(), z.clone(), z],
            solenoidal: true,
        }
    }

    /// Wraps raw coefficients. The solenoidal flag is computed, not assumed.
    pub fn from_coeffs(grid: Grid3, coeffs: [Vec<Complex64>; 3]) -> Result<Self> {
        for c in &coeffs {
            check_len(&grid, c.len())?;
        }
        let mut f = Self {
            grid,
            coeffs,
            solenoidal: false,
        };
        f.solenoidal = f.divergence_defect() <= EPS_DIV;
        Ok(f)
    }

    pub(crate) fn from_parts(grid: Grid3, coeffs: [Vec<Complex64>; 3], solenoidal: bool) -> Self {
        Self {
            grid,
            coeffs,
            solenoidal,
        }
    }

    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Vec<Complex64>; 3] {
        &self.coeffs
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        &self.coeffs[c]
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Vec<Complex64>; 3] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> [Vec<Complex64>; 3] {
        self.coeffs
    }

    pub fn is_solenoidal(&self) -> bool {
        self.solenoidal
    }

    pub(crate) fn set_solenoidal(&mut self, flag: bool) {
        self.solenoidal = flag;
    }

    /// Forward transform of physical samples.
    pub fn forward(f: &PhysicalVector) -> Self {
        let [a, b, c] = f.components();
        let mut out = forward_many(&f.grid, &[a, b, c]).into_iter();
        let coeffs = [
            out.next().expect("3 outputs"),
            out.next().expect("3 outputs"),
            out.next().expect("3 outputs"),
        ];
        Self {
            grid: f.grid,
            coeffs,
            solenoidal: false,
        }
    }

    pub fn backward(&self) -> PhysicalVector {
        let [a, b, c] = &self.coeffs;
        let mut out = backward_many(&self.grid, &[a, b, c]).into_iter();
        PhysicalVector {
            grid: self.grid,
            data: [
                out.next().expect("3 outputs"),
                out.next().expect("3 outputs"),
                out.next().expect("3 outputs"),
            ],
        }
    }

    /// Largest per-mode `|ξ·û| / (|ξ||û|)` over `ξ ≠ 0`, using the odd
    /// (Nyquist-free) wavenumbers. Coefficients smaller than
    /// `DEFECT_FLOOR` times the largest one are measured against that floor,
    /// since their direction is rounding noise.
    pub fn divergence_defect(&self) -> f64 {
        let g = &self.grid;
        let k = g.odd_wavenumbers();
        let largest = (0..g.len())
            .map(|i| (0..3).map(|c| self.coeffs[c][i].norm_sqr()).sum::<f64>())
            .fold(0.0f64, f64::max)
            .sqrt();
        let floor = DEFECT_FLOOR * largest;
        let mut worst: f64 = 0.0;
        for idx in 0..g.len() {
            let (i, j, l) = g.unravel(idx);
            let xi = [k[i], k[j], k[l]];
            let xn = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
            if xn == 0.0 {
                continue;
            }
            let u = [self.coeffs[0][idx], self.coeffs[1][idx], self.coeffs[2][idx]];
            let un = (u[0].norm_sqr() + u[1].norm_sqr() + u[2].norm_sqr()).sqrt();
            if un == 0.0 {
                continue;
            }
            let dot = u[0] * xi[0] + u[1] * xi[1] + u[2] * xi[2];
            worst = worst.max(dot.norm() / (xn * un.max(floor)));
        }
        worst
    }

    /// Largest `|û(-ξ) - conj û(ξ)|` over all modes and components.
    pub fn hermitian_defect(&self) -> f64 {
        let g = &self.grid;
        let mut worst: f64 = 0.0;
        for c in &self.coeffs {
            for idx in 0..g.len() {
                let partner = g.conjugate_index(idx);
                worst = worst.max((c[partner] - c[idx].conj()).norm());
            }
        }
        worst
    }

    /// `∫|u|²` over the box.
    pub fn energy(&self) -> f64 {
        let vol = self.grid.length().powi(3);
        vol * self
            .coeffs
            .iter()
            .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum::<f64>()
    }

    pub fn l2_norm(&self) -> f64 {
        self.energy().sqrt()
    }

    /// Real `L²` inner product `∫ u·v`.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.same_grid(other)?;
        let vol = self.grid.length().powi(3);
        let mut acc = 0.0;
        for c in 0..3 {
            for (a, b) in self.coeffs[c].iter().zip(&other.coeffs[c]) {
                acc += (a.conj() * b).re;
            }
        }
        Ok(vol * acc)
    }

    pub fn same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(NslabError::GridMismatch);
        }
        Ok(())
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.same_grid(other)?;
        let mut out = self.clone();
        for c in 0..3 {
            for (o, y) in out.coeffs[c].iter_mut().zip(&other.coeffs[c]) {
                *o = *o * a + *y * b;
            }
        }
        out.solenoidal = self.solenoidal && other.solenoidal;
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(1.0, other, -1.0)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(1.0, other, 1.0)
    }

    pub fn scale(&self, a: f64) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            for z in c.iter_mut() {
                *z *= a;
            }
        }
        out
    }

    /// `self += a·other` in place.
    pub fn axpy(&mut self, a: f64, other: &Self) -> Result<()> {
        self.same_grid(other)?;
        for c in 0..3 {
            for (o, y) in self.coeffs[c].iter_mut().zip(&other.coeffs[c]) {
                *o += *y * a;
            }
        }
        self.solenoidal = self.solenoidal && other.solenoidal;
        Ok(())
    }

    /// Sets the zero mode to zero.
    pub fn remove_mean(&mut self) {
        for c in self.coeffs.iter_mut() {
            c[0] = Complex64::default();
        }
    }

    pub fn mean(&self) -> [f64; 3] {
        [self.coeffs[0][0].re, self.coeffs[1][0].re, self.coeffs[2][0].re]
    }
}

/// Forward transforms of several real arrays, two per complex FFT.
pub fn forward_many(grid: &Grid3, fields: &[&[f64]]) -> Vec<Vec<Complex64>> {
    let plan = fft::plan(grid.n());
    let scale = 1.0 / grid.len() as f64;
    let mut out = Vec::with_capacity(fields.len());
    for pair in fields.chunks(2) {
        let a = pair[0];
        let b = pair.get(1).copied();
        let mut z: Vec<Complex64> = match b {
            Some(b) => a.iter().zip(b).map(|(&x, &y)| Complex64::new(x, y)).collect(),
            None => a.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        };
        plan.process(&mut z, Direction::Forward);
        if b.is_none() {
            for v in z.iter_mut() {
                *v *= scale;
            }
            out.push(z);
            continue;
        }
        let mut za = vec![Complex64::default(); z.len()];
        let mut zb = vec![Complex64::default(); z.len()];
        for idx in 0..z.len() {
            let p = z[idx];
            let q = z[grid.conjugate_index(idx)].conj();
            za[idx] = (p + q) * (0.5 * scale);
            // (p - q) / 2i
            let d = (p - q) * (0.5 * scale);
            zb[idx] = Complex64::new(d.im, -d.re);
        }
        out.push(za);
        out.push(zb);
    }
    out
}

/// Backward transforms of several Hermitian coefficient arrays, two per
/// complex FFT. Imaginary rounding residue is discarded.
pub fn backward_many(grid: &Grid3, fields: &[&[Complex64]]) -> Vec<Vec<f64>> {
    let plan = fft::plan(grid.n());
    let mut out = Vec::with_capacity(fields.len());
    for pair in fields.chunks(2) {
        let a = pair[0];
        let mut z: Vec<Complex64> = match pair.get(1) {
            Some(b) => a
                .iter()
                .zip(b.iter())
                .map(|(x, y)| x + Complex64::new(-y.im, y.re))
                .collect(),
            None => a.to_vec(),
        };
        plan.process(&mut z, Direction::Inverse);
        out.push(z.iter().map(|v| v.re).collect());
        if pair.len() == 2 {
            out.push(z.iter().map(|v| v.im).collect());
        }
    }
    out
}

/// `transform_forward` under its operational name.
pub fn transform_forward(f: &PhysicalVector) -> SpectralVectorField {
    SpectralVectorField::forward(f)
}

/// `transform_backward` under its operational name.
pub fn transform_backward(f: &SpectralVectorField) -> PhysicalVector {
    f.backward()
}

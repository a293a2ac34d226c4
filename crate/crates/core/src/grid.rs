//! Periodic computational box standing in for the whole space.
//!
//! Samples are stored x-fastest: the linear index of `(i, j, k)` is
//! `i + n * (j + n * k)`. Wavenumbers follow the standard DFT ordering, so
//! index `i` carries the signed integer frequency `i` for `i < n/2` and
//! `i - n` otherwise; the physical wavenumber is that integer times `2π/L`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{NslabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid3 {
    n: usize,
    length: f64,
}

impl Grid3 {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 8 || !n.is_multiple_of(2) {
            return Err(NslabError::InvalidGrid(format!(
                "points per axis must be even and at least 8, got {n}"
            )));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(NslabError::InvalidGrid(format!(
                "box length must be positive, got {length}"
            )));
        }
        Ok(Self { n, length })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Total number of samples, `n³`.
    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    #[inline]
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(3)
    }

    /// Fundamental wavenumber `2π/L`.
    #[inline]
    pub fn dk(&self) -> f64 {
        2.0 * PI / self.length
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.n * (j + self.n * k)
    }

    #[inline]
    pub fn unravel(&self, idx: usize) -> (usize, usize, usize) {
        let n = self.n;
        (idx % n, (idx / n) % n, idx / (n * n))
    }

    /// Signed integer frequency of axis index `i`, in `{-n/2, …, n/2-1}`.
    #[inline]
    pub fn freq(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Physical wavenumber of axis index `i`.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> f64 {
        self.dk() * self.freq(i) as f64
    }

    /// Wavenumber used for odd-order symbols (derivatives, projection).
    /// It vanishes on the Nyquist index so that odd symbols stay Hermitian.
    #[inline]
    pub fn odd_wavenumber(&self, i: usize) -> f64 {
        if i == self.n / 2 {
            0.0
        } else {
            self.wavenumber(i)
        }
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.wavenumber(i)).collect()
    }

    pub fn odd_wavenumbers(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.odd_wavenumber(i)).collect()
    }

    /// Integer squared frequency magnitude `|k|²` of a linear index.
    #[inline]
    pub fn freq_sq(&self, idx: usize) -> i64 {
        let (i, j, k) = self.unravel(idx);
        let (a, b, c) = (self.freq(i), self.freq(j), self.freq(k));
        a * a + b * b + c * c
    }

    /// `|ξ|²` for every mode, in storage order.
    pub fn xi_sq(&self) -> Vec<f64> {
        let dk2 = self.dk() * self.dk();
        (0..self.len()).map(|idx| dk2 * self.freq_sq(idx) as f64).collect()
    }

    /// Position of axis index `i` with the origin at index 0 and coordinates
    /// wrapped into `[-L/2, L/2)`.
    #[inline]
    pub fn centered_coord(&self, i: usize) -> f64 {
        self.spacing() * self.freq(i) as f64
    }

    pub fn centered_coords(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.centered_coord(i)).collect()
    }

    /// Index of the mode with frequency `-k` (Hermitian partner).
    #[inline]
    pub fn conjugate_index(&self, idx: usize) -> usize {
        let n = self.n;
        let (i, j, k) = self.unravel(idx);
        self.index((n - i) % n, (n - j) % n, (n - k) % n)
    }

    /// Largest retained integer frequency under the 2/3 rule: `3|k| < n`.
    #[inline]
    pub fn dealias_cutoff(&self) -> i64 {
        ((self.n as i64) - 1) / 3
    }

    #[inline]
    pub fn is_retained(&self, idx: usize) -> bool {
        let (i, j, k) = self.unravel(idx);
        let cut = self.dealias_cutoff();
        self.freq(i).abs() <= cut && self.freq(j).abs() <= cut && self.freq(k).abs() <= cut
    }
}

/// `make_grid` under its operational name.
pub fn make_grid(n: usize, length: f64) -> Result<Grid3> {
    Grid3::new(n, length)
}

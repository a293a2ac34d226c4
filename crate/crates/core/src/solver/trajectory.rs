use std::path::Path;

use serde::{Deserialize, Serialize};

use super::model::ModelSpec;
use crate::error::{NslabError, Result};
use crate::field::SpectralVectorField;
use crate::grid::Grid3;
use crate::snapshot;

/// `t_m = T (m/M)^γ`, `m = 0..=M`.
pub fn graded_time_grid(t_final: f64, steps: usize, gamma: f64) -> Result<Vec<f64>> {
    if !(t_final > 0.0) || !t_final.is_finite() {
        return Err(NslabError::InvalidParameter(format!(
            "final time must be positive, got {t_final}"
        )));
    }
    if steps == 0 {
        return Err(NslabError::EmptyTimeGrid);
    }
    if !(gamma >= 1.0) {
        return Err(NslabError::InvalidParameter(format!(
            "grading exponent must be >= 1, got {gamma}"
        )));
    }
    let mut t: Vec<f64> = (0..=steps)
        .map(|m| t_final * (m as f64 / steps as f64).powf(gamma))
        .collect();
    t[steps] = t_final;
    Ok(t)
}

/// Each interval split into `k` equal substeps.
pub fn refine_time_grid(times: &[f64], k: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity((times.len().saturating_sub(1)) * k + 1);
    for w in times.windows(2) {
        for s in 0..k {
            out.push(w[0] + (w[1] - w[0]) * s as f64 / k as f64);
        }
    }
    if let Some(last) = times.last() {
        out.push(*last);
    }
    out
}

pub(crate) fn check_time_grid(times: &[f64]) -> Result<()> {
    if times.len() < 2 {
        return Err(NslabError::EmptyTimeGrid);
    }
    if times[0] != 0.0 || times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(NslabError::InvalidParameter(
            "time grid must start at 0 and increase strictly".into(),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolutionMeta {
    pub model: Option<ModelSpec>,
    pub method: String,
    /// Picard residual per sweep, relative to `max_m ‖y(t_m)‖₂`.
    pub residuals: Vec<f64>,
    /// Ratio of the last two residuals.
    pub contraction: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct TimeGridSolution {
    times: Vec<f64>,
    fields: Vec<SpectralVectorField>,
    pub meta: SolutionMeta,
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    format: String,
    n: usize,
    box_length: f64,
    times: Vec<f64>,
    files: Vec<String>,
    meta: SolutionMeta,
}

impl TimeGridSolution {
    pub fn new(times: Vec<f64>, fields: Vec<SpectralVectorField>, meta: SolutionMeta) -> Result<Self> {
        if times.len() != fields.len() {
            return Err(NslabError::DimensionMismatch {
                expected: times.len(),
                actual: fields.len(),
            });
        }
        if fields.is_empty() {
            return Err(NslabError::EmptyTimeGrid);
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(NslabError::InvalidParameter("times must increase strictly".into()));
        }
        let g = *fields[0].grid();
        if fields.iter().any(|f| *f.grid() != g) {
            return Err(NslabError::GridMismatch);
        }
        Ok(Self { times, fields, meta })
    }

    pub fn zeros(grid: Grid3, times: Vec<f64>) -> Result<Self> {
        let fields = vec![SpectralVectorField::zeros(grid); times.len()];
        Self::new(times, fields, SolutionMeta::default())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn fields(&self) -> &[SpectralVectorField] {
        &self.fields
    }

    pub fn field(&self, m: usize) -> &SpectralVectorField {
        &self.fields[m]
    }

    pub fn last(&self) -> &SpectralVectorField {
        self.fields.last().expect("nonempty")
    }

    pub fn grid(&self) -> &Grid3 {
        self.fields[0].grid()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn into_fields(self) -> Vec<SpectralVectorField> {
        self.fields
    }

    pub fn same_times(&self, other: &Self) -> Result<()> {
        if self.times != other.times {
            return Err(NslabError::TimeGridMismatch);
        }
        if self.grid() != other.grid() {
            return Err(NslabError::GridMismatch);
        }
        Ok(())
    }

    /// `max_m ‖self(t_m)‖₂`.
    pub fn max_l2(&self) -> f64 {
        self.fields.iter().map(|f| f.l2_norm()).fold(0.0, f64::max)
    }

    /// `max_m ‖self(t_m) - other(t_m)‖₂`.
    pub fn max_l2_distance(&self, other: &Self) -> Result<f64> {
        self.same_times(other)?;
        let mut m = 0.0f64;
        for (a, b) in self.fields.iter().zip(&other.fields) {
            m = m.max(a.sub(b)?.l2_norm());
        }
        Ok(m)
    }

    pub fn all_solenoidal(&self) -> bool {
        self.fields.iter().all(|f| f.is_solenoidal())
    }

    /// Writes one NSF1 snapshot per node and `manifest.json` into `dir`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut files = Vec::with_capacity(self.len());
        for (m, (t, f)) in self.times.iter().zip(&self.fields).enumerate() {
            let name = format!("node_{m:05}.nsf");
            snapshot::save(&dir.join(&name), f, *t)?;
            files.push(name);
        }
        let manifest = Manifest {
            format: "NSF1".into(),
            n: self.grid().n(),
            box_length: self.grid().length(),
            times: self.times.clone(),
            files,
            meta: self.meta.clone(),
        };
        std::fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(dir.join("manifest.json"))?;
        let manifest: Manifest = serde_json::from_str(&text)?;
        if manifest.files.len() != manifest.times.len() {
            return Err(NslabError::Parse("manifest lists mismatched files and times".into()));
        }
        let grid = Grid3::new(manifest.n, manifest.box_length)?;
        let mut fields = Vec::with_capacity(manifest.files.len());
        for (name, t) in manifest.files.iter().zip(&manifest.times) {
            let (f, ft) = snapshot::load(&dir.join(name))?;
            if *f.grid() != grid {
                return Err(NslabError::GridMismatch);
            }
            if ft != *t {
                return Err(NslabError::Parse(format!(
                    "snapshot {name} has t={ft}, manifest says {t}"
                )));
            }
            fields.push(f);
        }
        Self::new(manifest.times, fields, manifest.meta)
    }
}

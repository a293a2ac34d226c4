use rayon::prelude::*;

use super::model::Model;
use super::trajectory::{check_time_grid, SolutionMeta, TimeGridSolution};
use crate::error::{NslabError, Result};
use crate::field::SpectralVectorField;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_SWEEPS: usize = 60;
/// Consecutive residual increases that abort a Picard run.
pub const DIVERGENCE_SWEEPS: usize = 3;

/// `∫_0^{t_m} e^{-(t_m-τ)λ} f(τ) dτ` at every node, with `f` linear between
/// nodes and the exponential factor integrated exactly. Marches
/// `D(t_{m+1}) = e^{-hλ} D(t_m) + h[(φ₁-φ₂) f_m + φ₂ f_{m+1}]`.
pub fn product_integrate(
    model: &Model,
    times: &[f64],
    integrands: &[SpectralVectorField],
) -> Result<Vec<SpectralVectorField>> {
    if times.len() != integrands.len() {
        return Err(NslabError::DimensionMismatch {
            expected: times.len(),
            actual: integrands.len(),
        });
    }
    let spectrum = model.spectrum();
    let mut out = Vec::with_capacity(times.len());
    let mut acc = SpectralVectorField::zeros(*model.grid());
    out.push(acc.clone());
    for m in 0..times.len() - 1 {
        let h = times[m + 1] - times[m];
        let w = spectrum.weights(h);
        if !w.is_finite() {
            return Err(NslabError::QuadratureInstability);
        }
        let left = w.left();
        acc = spectrum.combine(&[
            (&w.exp, 1.0, &acc),
            (&left, h, &integrands[m]),
            (&w.phi2, h, &integrands[m + 1]),
        ]);
        out.push(acc.clone());
    }
    Ok(out)
}

/// `B(u,v)(t) = -∫_0^t S(t-τ) P∇·(ũ⊗v)(τ) dτ` on the common time grid.
pub fn duhamel_bilinear(u: &TimeGridSolution, v: &TimeGridSolution, model: &Model) -> Result<TimeGridSolution> {
    u.same_times(v)?;
    if u.grid() != model.grid() {
        return Err(NslabError::GridMismatch);
    }
    let integrands = u
        .fields()
        .par_iter()
        .zip(v.fields().par_iter())
        .map(|(a, b)| model.bilinear_integrand(a, b))
        .collect::<Result<Vec<_>>>()?;
    let fields = product_integrate(model, u.times(), &integrands)?;
    TimeGridSolution::new(u.times().to_vec(), fields, SolutionMeta::default())
}

/// `y(t) = S(t)u₀ + ∫_0^t S(t-τ) P F(τ) dτ`.
///
/// Steady forces use the exact identity `∫_0^t e^{-(t-τ)λ}dτ = t φ₁(-tλ)`,
/// which is `(1 - e^{-tλ})/λ` away from the zero mode.
pub fn linear_forced_term(u0: &SpectralVectorField, model: &Model, times: &[f64]) -> Result<TimeGridSolution> {
    check_time_grid(times)?;
    if u0.grid() != model.grid() {
        return Err(NslabError::GridMismatch);
    }
    let spectrum = model.spectrum();
    let mut fields: Vec<SpectralVectorField> = times.iter().map(|t| spectrum.propagate(u0, *t)).collect();
    if model.is_steady_forcing() {
        let force = model.force_profile().expect("steady forcing present");
        for (f, t) in fields.iter_mut().zip(times) {
            let w = spectrum.weights(*t);
            let d = spectrum.apply_table(force, &w.phi1).scale(*t);
            f.axpy(1.0, &d)?;
        }
    } else if model.has_forcing() {
        let integrands: Vec<SpectralVectorField> = times
            .iter()
            .map(|t| model.forcing_at(*t).expect("forcing present"))
            .collect();
        let d = product_integrate(model, times, &integrands)?;
        for (f, di) in fields.iter_mut().zip(&d) {
            f.axpy(1.0, di)?;
        }
    }
    let meta = SolutionMeta {
        model: Some(model.spec().clone()),
        method: "linear".into(),
        ..Default::default()
    };
    TimeGridSolution::new(times.to_vec(), fields, meta)
}

/// Jacobi-style Picard iteration `x ← y + B(x, x)` on the whole trajectory.
///
/// The residual of sweep `k` is `max_m ‖x_k(t_m) - y(t_m) - B(x_k,x_k)(t_m)‖₂`
/// relative to `max_m ‖y(t_m)‖₂` (absolute when `y ≡ 0`); the returned
/// iterate is the one whose residual met `tol`.
pub fn picard_solve(y: &TimeGridSolution, model: &Model, tol: f64, max_sweeps: usize) -> Result<TimeGridSolution> {
    if !(tol > 0.0) {
        return Err(NslabError::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let scale = match y.max_l2() {
        s if s > 0.0 => s,
        _ => 1.0,
    };
    let mut x = y.clone();
    let mut residuals: Vec<f64> = Vec::new();
    let mut increases = 0;
    for _ in 0..max_sweeps {
        let b = duhamel_bilinear(&x, &x, model)?;
        let mut next = Vec::with_capacity(y.len());
        let mut res = 0.0f64;
        for ((ym, bm), xm) in y.fields().iter().zip(b.fields()).zip(x.fields()) {
            let z = ym.add(bm)?;
            res = res.max(xm.sub(&z)?.l2_norm());
            next.push(z);
        }
        let res = res / scale;
        if !res.is_finite() {
            return Err(NslabError::Divergence(residuals.len() + 1));
        }
        if let Some(prev) = residuals.last() {
            if res > *prev {
                increases += 1;
                if increases >= DIVERGENCE_SWEEPS {
                    return Err(NslabError::Divergence(increases));
                }
            } else {
                increases = 0;
            }
        }
        residuals.push(res);
        if res <= tol {
            let n = residuals.len();
            let contraction = (n >= 2 && residuals[n - 2] > 0.0).then(|| residuals[n - 1] / residuals[n - 2]);
            x.meta = SolutionMeta {
                model: Some(model.spec().clone()),
                method: "picard".into(),
                residuals,
                contraction,
            };
            return Ok(x);
        }
        x = TimeGridSolution::new(y.times().to_vec(), next, SolutionMeta::default())?;
    }
    Err(NslabError::MaxSweeps {
        sweeps: max_sweeps,
        residual: residuals.last().copied().unwrap_or(f64::NAN),
    })
}

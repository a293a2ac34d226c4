use super::model::Model;
use super::trajectory::{check_time_grid, refine_time_grid, SolutionMeta, TimeGridSolution};
use crate::error::{NslabError, Result};
use crate::field::SpectralVectorField;

/// Growth of `sup|u|` over its reference that aborts a march.
pub const BLOWUP_FACTOR: f64 = 10.0;

/// Second-order exponential time differencing (Cox–Matthews ETD2RK):
///
/// ```text
/// a       = e^{-hλ} u_n + h φ₁ N(u_n, t_n)
/// u_{n+1} = a + h φ₂ (N(a, t_{n+1}) - N(u_n, t_n))
/// ```
///
/// The linear part is integrated exactly.
#[derive(Debug, Clone)]
pub struct EtdMarcher<'m> {
    model: &'m Model,
    u: SpectralVectorField,
    t: f64,
    sup_ref: Option<f64>,
    steps: usize,
}

impl<'m> EtdMarcher<'m> {
    pub fn new(model: &'m Model, u0: SpectralVectorField) -> Result<Self> {
        if u0.grid() != model.grid() {
            return Err(NslabError::GridMismatch);
        }
        // forced flows may start from rest; their scale includes the force's
        let sup0 = u0.backward().max_abs() + model.steady_response_sup();
        Ok(Self {
            model,
            u: u0,
            t: 0.0,
            sup_ref: (sup0 > 0.0).then_some(sup0),
            steps: 0,
        })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn state(&self) -> &SpectralVectorField {
        &self.u
    }

    pub fn into_state(self) -> SpectralVectorField {
        self.u
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn step(&mut self, h: f64) -> Result<()> {
        self.step_to(self.t + h)
    }

    /// One step ending exactly at `t_next`.
    pub fn step_to(&mut self, t_next: f64) -> Result<()> {
        let h = t_next - self.t;
        if !(h > 0.0) {
            return Err(NslabError::InvalidParameter(format!("step must be positive, got {h}")));
        }
        let spectrum = self.model.spectrum();
        let w = spectrum.weights(h);
        let n0 = self.model.nonlinear_rhs(&self.u, self.t)?;
        let a = spectrum.combine(&[(&w.exp, 1.0, &self.u), (&w.phi1, h, &n0)]);
        let model = self.model;
        let correct = model.spec().nonlinear || (model.has_forcing() && !model.is_steady_forcing());
        let next = if correct {
            let na = self.model.nonlinear_rhs(&a, t_next)?;
            let diff = na.sub(&n0)?;
            let mut out = spectrum.combine(&[(&w.phi2, h, &diff)]);
            out.axpy(1.0, &a)?;
            out.set_solenoidal(a.is_solenoidal() && diff.is_solenoidal());
            out
        } else {
            a
        };
        self.u = next;
        self.t = t_next;
        self.steps += 1;
        self.guard()
    }

    fn guard(&mut self) -> Result<()> {
        let sup = self.u.backward().max_abs();
        if !sup.is_finite() {
            return Err(NslabError::Blowup {
                time: self.t,
                initial: self.sup_ref.unwrap_or(0.0),
                current: sup,
            });
        }
        match self.sup_ref {
            None => {}
            Some(r) => {
                if sup > BLOWUP_FACTOR * r {
                    return Err(NslabError::Blowup {
                        time: self.t,
                        initial: r,
                        current: sup,
                    });
                }
            }
        }
        Ok(())
    }

    /// Advances to `t_target` in `substeps` equal steps.
    pub fn advance_to(&mut self, t_target: f64, substeps: usize) -> Result<()> {
        let span = t_target - self.t;
        if !(span > 0.0) || substeps == 0 {
            return Err(NslabError::InvalidParameter(format!(
                "cannot advance from t={} to t={t_target} in {substeps} steps",
                self.t
            )));
        }
        let t0 = self.t;
        for s in 1..substeps {
            self.step_to(t0 + span * s as f64 / substeps as f64)?;
        }
        self.step_to(t_target)
    }
}

/// One ETD2 step per interval of `times`.
pub fn etd_march(u0: &SpectralVectorField, model: &Model, times: &[f64]) -> Result<TimeGridSolution> {
    etd_march_substeps(u0, model, times, 1)
}

/// ETD2 with every interval of `times` split into `substeps` steps; the
/// trajectory is reported on `times` only.
pub fn etd_march_substeps(
    u0: &SpectralVectorField,
    model: &Model,
    times: &[f64],
    substeps: usize,
) -> Result<TimeGridSolution> {
    check_time_grid(times)?;
    if substeps == 0 {
        return Err(NslabError::InvalidParameter("substeps must be positive".into()));
    }
    let fine = refine_time_grid(times, substeps);
    let mut marcher = EtdMarcher::new(model, u0.clone())?;
    let mut fields = Vec::with_capacity(times.len());
    fields.push(u0.clone());
    for (i, w) in fine.windows(2).enumerate() {
        marcher.step_to(w[1])?;
        if (i + 1) % substeps == 0 {
            fields.push(marcher.state().clone());
        }
    }
    let meta = SolutionMeta {
        model: Some(model.spec().clone()),
        method: format!("etd2(substeps={substeps})"),
        ..Default::default()
    };
    TimeGridSolution::new(times.to_vec(), fields, meta)
}

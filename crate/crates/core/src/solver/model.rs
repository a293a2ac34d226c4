use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::phi::Spectrum;
use crate::error::{NslabError, Result};
use crate::field::SpectralVectorField;
use crate::grid::Grid3;
use crate::kernels::{Dissipation, MollifierProfile, MollifierSpec};
use crate::multiplier::FourierMultiplier;
use crate::spectral::{leray_project_in_place, mollified_nonlinear_term_with, nonlinear_term};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum ModelKind {
    NavierStokes,
    Mollified { kappa: f64 },
    Hyperviscous { ell: f64 },
}

impl ModelKind {
    pub fn dissipation(&self) -> Dissipation {
        match *self {
            ModelKind::NavierStokes | ModelKind::Mollified { .. } => Dissipation::Heat,
            ModelKind::Hyperviscous { ell } => Dissipation::Combined(ell),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            ModelKind::NavierStokes => "ns".into(),
            ModelKind::Mollified { kappa } => format!("mollified(kappa={kappa})"),
            ModelKind::Hyperviscous { ell } => format!("hyperviscous(ell={ell})"),
        }
    }
}

/// Time profile `g(t)` of a separable divergence-form force.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum Envelope {
    Constant,
    /// `(1 + t/t0)^{-power}`
    Decay {
        t0: f64,
        power: f64,
    },
}

impl Envelope {
    pub fn at(&self, t: f64) -> f64 {
        match *self {
            Envelope::Constant => 1.0,
            Envelope::Decay { t0, power } => (1.0 + t / t0).powf(-power),
        }
    }

    fn validate(&self) -> Result<()> {
        if let Envelope::Decay { t0, power } = *self {
            if !(t0 > 0.0) || !(power >= 0.0) {
                return Err(NslabError::InvalidParameter(format!(
                    "envelope needs t0 > 0 and power >= 0, got t0={t0}, power={power}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum ForcingSpec {
    None,
    /// `F = ∇·V` with `V(x,t) = g(t)·a·G_w(x)·M`, `G_w` the unit-mass
    /// Gaussian of per-axis standard deviation `width` and `M` a fixed
    /// 3×3 matrix.
    DivergenceForm {
        amplitude: f64,
        width: f64,
        matrix: [[f64; 3]; 3],
        envelope: Envelope,
    },
    /// `F = b·p(x, σ²/2)`, a Gaussian stand-in for `b·δ₀` whose mean times
    /// the box volume is `b`.
    SteadySurrogateDelta {
        b: [f64; 3],
        sigma: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub forcing: ForcingSpec,
    pub grid: Grid3,
    /// When false the quadratic term is dropped and the model is linear.
    #[serde(default = "default_true")]
    pub nonlinear: bool,
}

fn default_true() -> bool {
    true
}

impl ModelSpec {
    pub fn new(kind: ModelKind, grid: Grid3) -> Self {
        Self {
            kind,
            forcing: ForcingSpec::None,
            grid,
            nonlinear: true,
        }
    }

    pub fn with_forcing(mut self, forcing: ForcingSpec) -> Self {
        self.forcing = forcing;
        self
    }

    pub fn linear(mut self) -> Self {
        self.nonlinear = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            ModelKind::NavierStokes => {}
            ModelKind::Mollified { kappa } => {
                if !(kappa >= 0.0) || !kappa.is_finite() {
                    return Err(NslabError::InvalidParameter(format!(
                        "mollifier width must be nonnegative, got {kappa}"
                    )));
                }
            }
            ModelKind::Hyperviscous { ell } => {
                if !(ell > 2.0) || !ell.is_finite() {
                    return Err(NslabError::InvalidParameter(format!(
                        "hyperviscous order must exceed 2, got {ell}"
                    )));
                }
            }
        }
        match &self.forcing {
            ForcingSpec::None => {}
            ForcingSpec::DivergenceForm { width, envelope, .. } => {
                if !(*width > 0.0) {
                    return Err(NslabError::InvalidParameter(format!(
                        "forcing width must be positive, got {width}"
                    )));
                }
                envelope.validate()?;
            }
            ForcingSpec::SteadySurrogateDelta { sigma, .. } => {
                if !(*sigma > 0.0) {
                    return Err(NslabError::InvalidParameter(format!(
                        "surrogate width must be positive, got {sigma}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A validated model with its precomputed symbols.
#[derive(Debug, Clone)]
pub struct Model {
    spec: ModelSpec,
    spectrum: Spectrum,
    mollifier: Option<MollifierSpec>,
    /// `P F₀`, mean-free; the force at time `t` is `g(t)·P F₀`.
    force: Option<SpectralVectorField>,
    envelope: Envelope,
}

impl Model {
    pub fn new(spec: ModelSpec) -> Result<Self> {
        spec.validate()?;
        let grid = spec.grid;
        let mollifier = match spec.kind {
            ModelKind::Mollified { kappa } => Some(MollifierSpec::new(grid, kappa, MollifierProfile::default())?),
            _ => None,
        };
        let (force, envelope) = match &spec.forcing {
            ForcingSpec::None => (None, Envelope::Constant),
            ForcingSpec::DivergenceForm {
                amplitude,
                width,
                matrix,
                envelope,
            } => (
                Some(divergence_form_force(&grid, *amplitude, *width, matrix)),
                *envelope,
            ),
            ForcingSpec::SteadySurrogateDelta { b, sigma } => {
                (Some(delta_surrogate_force(&grid, *b, *sigma)), Envelope::Constant)
            }
        };
        Ok(Self {
            spectrum: Spectrum::new(&grid, spec.kind.dissipation()),
            spec,
            mollifier,
            force,
            envelope,
        })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn grid(&self) -> &Grid3 {
        &self.spec.grid
    }

    pub fn kind(&self) -> ModelKind {
        self.spec.kind
    }

    pub(crate) fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    /// The linear propagator at time `t` as an explicit multiplier.
    pub fn propagator(&self, t: f64) -> Result<FourierMultiplier> {
        self.spec.kind.dissipation().multiplier(&self.spec.grid, t)
    }

    /// `e^{-tλ}` applied to `f`.
    pub fn propagate(&self, f: &SpectralVectorField, t: f64) -> SpectralVectorField {
        self.spectrum.propagate(f, t)
    }

    /// `-P∇·(ũ⊗v)` with `ũ = u*ω_κ` for the mollified model; zero when the
    /// quadratic term is disabled.
    pub fn bilinear_integrand(&self, u: &SpectralVectorField, v: &SpectralVectorField) -> Result<SpectralVectorField> {
        u.same_grid(v)?;
        if u.grid() != self.grid() {
            return Err(NslabError::GridMismatch);
        }
        if !self.spec.nonlinear {
            return Ok(SpectralVectorField::zeros(*self.grid()));
        }
        let n = match &self.mollifier {
            Some(m) => mollified_nonlinear_term_with(u, v, m)?,
            None => nonlinear_term(u, v)?,
        };
        Ok(n.scale(-1.0))
    }

    pub fn has_forcing(&self) -> bool {
        self.force.is_some()
    }

    pub fn is_steady_forcing(&self) -> bool {
        self.force.is_some() && self.envelope == Envelope::Constant
    }

    /// `P F(t)`, mean-free.
    pub fn forcing_at(&self, t: f64) -> Option<SpectralVectorField> {
        self.force.as_ref().map(|f| f.scale(self.envelope.at(t)))
    }

    pub(crate) fn force_profile(&self) -> Option<&SpectralVectorField> {
        self.force.as_ref()
    }

    /// `sup|(-Δ)⁻¹ F|` for the unit-envelope force profile; bounds the
    /// forced Stokes response at all times. Zero without forcing.
    pub fn steady_response_sup(&self) -> f64 {
        let Some(f) = self.force.as_ref() else {
            return 0.0;
        };
        let xi_sq = self.spec.grid.xi_sq();
        let inv: Vec<f64> = xi_sq.iter().map(|&k| if k > 0.0 { 1.0 / k } else { 0.0 }).collect();
        let mut r = f.clone();
        for comp in r.coeffs_mut().iter_mut() {
            for (z, w) in comp.iter_mut().zip(&inv) {
                *z *= *w;
            }
        }
        r.backward().max_abs()
    }

    /// Right-hand side of `u' = -λu + N(u, t)`.
    pub fn nonlinear_rhs(&self, u: &SpectralVectorField, t: f64) -> Result<SpectralVectorField> {
        let mut n = self.bilinear_integrand(u, u)?;
        if let Some(f) = self.forcing_at(t) {
            n.axpy(1.0, &f)?;
        }
        Ok(n)
    }
}

fn gaussian_hat(grid: &Grid3, sigma: f64) -> Vec<f64> {
    // unit-mass Gaussian of per-axis standard deviation σ, as Fourier
    // coefficients of the periodization
    let vol = grid.length().powi(3);
    grid.xi_sq()
        .into_iter()
        .map(|k2| (-0.5 * sigma * sigma * k2).exp() / vol)
        .collect()
}

fn delta_surrogate_force(grid: &Grid3, b: [f64; 3], sigma: f64) -> SpectralVectorField {
    let g = gaussian_hat(grid, sigma);
    let coeffs = b.map(|bc| g.iter().map(|v| Complex64::new(bc * v, 0.0)).collect::<Vec<_>>());
    let mut f = SpectralVectorField::from_parts(*grid, coeffs, false);
    leray_project_in_place(&mut f);
    f.remove_mean();
    f
}

fn divergence_form_force(grid: &Grid3, amplitude: f64, width: f64, matrix: &[[f64; 3]; 3]) -> SpectralVectorField {
    let g = gaussian_hat(grid, width);
    let kw = grid.odd_wavenumbers();
    let mut coeffs = [
        vec![Complex64::default(); grid.len()],
        vec![Complex64::default(); grid.len()],
        vec![Complex64::default(); grid.len()],
    ];
    for (idx, gv) in g.iter().enumerate() {
        let (x, y, z) = grid.unravel(idx);
        let xi = [kw[x], kw[y], kw[z]];
        for (k, comp) in coeffs.iter_mut().enumerate() {
            // F_k = Σ_j ∂_j V_jk
            let s: f64 = (0..3).map(|j| xi[j] * matrix[j][k]).sum();
            comp[idx] = Complex64::new(0.0, amplitude * gv * s);
        }
    }
    let mut f = SpectralVectorField::from_parts(*grid, coeffs, false);
    leray_project_in_place(&mut f);
    f.remove_mean();
    f
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let g = Grid3::new(8, 6.0).unwrap();
        assert!(Model::new(ModelSpec::new(ModelKind::Hyperviscous { ell: 2.0 }, g)).is_err());
        assert!(Model::new(ModelSpec::new(ModelKind::Mollified { kappa: -1.0 }, g)).is_err());
        assert!(Model::new(ModelSpec::new(ModelKind::Mollified { kappa: 4.0 }, g)).is_err());
        let bad = ModelSpec::new(ModelKind::NavierStokes, g).with_forcing(ForcingSpec::SteadySurrogateDelta {
            b: [1.0, 0.0, 0.0],
            sigma: 0.0,
        });
        assert!(Model::new(bad).is_err());
    }

    #[test]
    fn surrogate_force_is_solenoidal_and_mean_free() {
        let g = Grid3::new(16, 10.0).unwrap();
        let m = Model::new(ModelSpec::new(ModelKind::NavierStokes, g).with_forcing(
            ForcingSpec::SteadySurrogateDelta {
                b: [1.0, 0.0, 0.0],
                sigma: 1.5,
            },
        ))
        .unwrap();
        let f = m.forcing_at(3.0).unwrap();
        assert!(
            f.is_solenoidal() && f.divergence_defect() < 1e-12,
            "{} {}",
            f.is_solenoidal(),
            f.divergence_defect()
        );
        assert_eq!(f.mean(), [0.0; 3]);
        // before projection the surrogate integrates to b
        let raw = gaussian_hat(&g, 1.5);
        assert!((raw[0] * g.length().powi(3) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn divergence_form_envelope() {
        let g = Grid3::new(16, 10.0).unwrap();
        let mut mat = [[0.0; 3]; 3];
        mat[0][1] = 1.0;
        let m = Model::new(
            ModelSpec::new(ModelKind::NavierStokes, g).with_forcing(ForcingSpec::DivergenceForm {
                amplitude: 2.0,
                width: 1.0,
                matrix: mat,
                envelope: Envelope::Decay { t0: 1.0, power: 2.0 },
            }),
        )
        .unwrap();
        let f0 = m.forcing_at(0.0).unwrap();
        let f1 = m.forcing_at(1.0).unwrap();
        assert!(f0.l2_norm() > 0.0);
        assert!((f1.l2_norm() / f0.l2_norm() - 0.25).abs() < 1e-14);
        assert!(!m.is_steady_forcing());
    }

    #[test]
    fn disabled_nonlinearity_is_zero() {
        let g = Grid3::new(8, 6.0).unwrap();
        let m = Model::new(ModelSpec::new(ModelKind::NavierStokes, g).linear()).unwrap();
        let mut u = SpectralVectorField::zeros(g);
        u.coeffs_mut()[0][g.index(0, 1, 0)] = Complex64::new(0.0, 1.0);
        u.coeffs_mut()[0][g.conjugate_index(g.index(0, 1, 0))] = Complex64::new(0.0, -1.0);
        assert_eq!(m.bilinear_integrand(&u, &u).unwrap().l2_norm(), 0.0);
    }
}

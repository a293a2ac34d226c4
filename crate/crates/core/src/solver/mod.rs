//! Mild solutions `u = y + B(u, u)` on a time grid.
//!
//! Two independent discretizations of the same solution are provided:
//! Picard iteration of the Duhamel form with product-integration quadrature,
//! and an ETD2 time marcher. Both integrate the linear propagator exactly.

mod duhamel;
mod etd;
mod model;
pub mod phi;
mod trajectory;

pub use duhamel::{
    duhamel_bilinear, linear_forced_term, picard_solve, product_integrate, DEFAULT_MAX_SWEEPS, DEFAULT_TOL,
    DIVERGENCE_SWEEPS,
};
pub use etd::{etd_march, etd_march_substeps, EtdMarcher, BLOWUP_FACTOR};
pub use model::{Envelope, ForcingSpec, Model, ModelKind, ModelSpec};
pub use trajectory::{graded_time_grid, refine_time_grid, SolutionMeta, TimeGridSolution};

use serde::{Deserialize, Serialize};

use crate::error::{NslabError, Result};
use crate::field::SpectralVectorField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Picard,
    Etd,
}

/// Relative size of the zero mode tolerated in "mean-free" data.
const MEAN_TOL: f64 = 1e-12;

fn check_data(u0: &SpectralVectorField) -> Result<()> {
    if !u0.is_solenoidal() {
        return Err(NslabError::InvalidParameter(format!(
            "initial data must be solenoidal (divergence defect {:e})",
            u0.divergence_defect()
        )));
    }
    let vol = u0.grid().length().powi(3);
    let mean = u0.mean();
    let m = (mean[0] * mean[0] + mean[1] * mean[1] + mean[2] * mean[2]).sqrt() * vol.sqrt();
    if m > MEAN_TOL * u0.l2_norm().max(f64::MIN_POSITIVE) {
        return Err(NslabError::InvalidParameter(format!(
            "initial data must be mean-free (mean {mean:?})"
        )));
    }
    Ok(())
}

/// Solves the model from `u0` on `times` (which must start at 0).
pub fn solve(model: &Model, u0: &SpectralVectorField, times: &[f64], method: Method) -> Result<TimeGridSolution> {
    check_data(u0)?;
    match method {
        Method::Picard => {
            let y = linear_forced_term(u0, model, times)?;
            picard_solve(&y, model, DEFAULT_TOL, DEFAULT_MAX_SWEEPS)
        }
        Method::Etd => etd_march(u0, model, times),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PhysicalVector;
    use crate::grid::Grid3;
    use crate::spectral::leray_project;

    fn small_data(g: Grid3, a: f64) -> SpectralVectorField {
        // two Taylor–Green-type cells, projected to be safe
        let f = PhysicalVector::from_fn(g, |x| {
            let (s, c) = (f64::sin, f64::cos);
            [
                a * (s(x[0]) * c(x[1]) * c(x[2]) + 0.3 * c(x[1] + 0.4)),
                a * (-c(x[0]) * s(x[1]) * c(x[2]) + 0.2 * s(2.0 * x[2])),
                a * 0.25 * s(x[0] + x[1] - 0.1),
            ]
        });
        let mut u = leray_project(&SpectralVectorField::forward(&f));
        u.remove_mean();
        u
    }

    fn grid16() -> Grid3 {
        Grid3::new(16, 2.0 * std::f64::consts::PI).unwrap()
    }

    fn rel(a: &SpectralVectorField, b: &SpectralVectorField) -> f64 {
        a.sub(b).unwrap().l2_norm() / b.l2_norm()
    }

    #[test]
    fn bilinear_trivial_cases() {
        let g = grid16();
        let m = Model::new(ModelSpec::new(ModelKind::NavierStokes, g)).unwrap();
        let times = graded_time_grid(0.5, 8, 2.0).unwrap();
        let zero = TimeGridSolution::zeros(g, times.clone()).unwrap();
        let u0 = small_data(g, 0.5);
        let v = linear_forced_term(&u0, &m, &times).unwrap();
        let b = duhamel_bilinear(&zero, &v, &m).unwrap();
        assert!(b.fields().iter().all(|f| f.l2_norm() == 0.0));
        let bb = duhamel_bilinear(&v, &v, &m).unwrap();
        assert_eq!(bb.field(0).l2_norm(), 0.0);
        assert!(bb.last().l2_norm() > 0.0);
        assert!(bb.all_solenoidal());
        let short = TimeGridSolution::zeros(g, times[..4].to_vec()).unwrap();
        assert!(matches!(
            duhamel_bilinear(&short, &v, &m),
            Err(NslabError::TimeGridMismatch)
        ));
    }

    #[test]
    fn bilinear_quadrature_is_second_order() {
        let g = grid16();
        let m = Model::new(ModelSpec::new(ModelKind::NavierStokes, g)).unwrap();
        let u0 = small_data(g, 1.0);
        let t_final = 0.5;
        let mut finals = Vec::new();
        for steps in [8, 16, 32] {
            let times = graded_time_grid(t_final, steps, 1.0).unwrap();
            let v = linear_forced_term(&u0, &m, &times).unwrap();
            finals.push(duhamel_bilinear(&v, &v, &m).unwrap().last().clone());
        }
        let e1 = finals[0].sub(&finals[1]).unwrap().l2_norm();
        let e2 = finals[1].sub(&finals[2]).unwrap().l2_norm();
        let ratio = e1 / e2;
        assert!((ratio - 4.0).abs() < 0.5, "Richardson ratio {ratio}");
    }

    #[test]
    fn picard_trivial_cases() {
        let g = grid16();
        let m = Model::new(ModelSpec::new(ModelKind::NavierStokes, g)).unwrap();
        let times = graded_time_grid(1.0, 6, 2.0).unwrap();
        let zero = TimeGridSolution::zeros(g, times.clone()).unwrap();
        let s = picard_solve(&zero, &m, 1e-9, 10).unwrap();
        assert_eq!(s.meta.residuals.len(), 1);
        assert!(s.fields().iter().all(|f| f.l2_norm() == 0.0));

        let lin = Model::new(ModelSpec::new(ModelKind::NavierStokes, g).linear()).unwrap();
        let y = linear_forced_term(&small_data(g, 1.0), &lin, &times).unwrap();
        let s = picard_solve(&y, &lin, 1e-9, 10).unwrap();
        for (a, b) in s.fields().iter().zip(y.fields()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn picard_contracts_faster_for_smaller_data() {
        let g = grid16();
        let m = Model::new(ModelSpec::new(ModelKind::NavierStokes, g)).unwrap();
        let times = graded_time_grid(1.0, 16, 2.0).unwrap();
        let mut ratios = Vec::new();
        for a in [0.4, 0.1] {
            let s = solve(&m, &small_data(g, a), &times, Method::Picard).unwrap();
            let r = &s.meta.residuals;
            assert!(r.windows(2).skip(1).all(|w| w[1] <= w[0]), "{r:?}");
            ratios.push(s.meta.contraction.unwrap());
        }
        assert!(ratios[1] < ratios[0], "{ratios:?}");
    }

    #[test]
    fn picard_reports_large_data() {
        let g = grid16();
        let m = Model::new(ModelSpec::new(ModelKind::NavierStokes, g)).unwrap();
        let times = graded_time_grid(2.0, 8, 2.0).unwrap();
        let y = linear_forced_term(&small_data(g, 40.0), &m, &times).unwrap();
        let r = picard_solve(&y, &m, 1e-9, 60);
        assert!(
            matches!(r, Err(NslabError::Divergence(_)) | Err(NslabError::MaxSweeps { .. })),
            "{r:?}"
        );
        let y = linear_forced_term(&small_data(g, 0.5), &m, &times).unwrap();
        assert!(matches!(
            picard_solve(&y, &m, 1e-9, 2),
            Err(NslabError::MaxSweeps { sweeps: 2, .. })
        ));
    }

    #[test]
    fn etd_trivial_cases() {
        let g = grid16();
        let times = graded_time_grid(1.0, 10, 2.0).unwrap();
        let m = Model::new(ModelSpec::new(ModelKind::NavierStokes, g)).unwrap();
        let z = etd_march(&SpectralVectorField::zeros(g), &m, &times).unwrap();
        assert!(z.fields().iter().all(|f| f.l2_norm() == 0.0));

        let lin = Model::new(ModelSpec::new(ModelKind::NavierStokes, g).linear()).unwrap();
        let u0 = small_data(g, 1.0);
        let s = etd_march(&u0, &lin, &times).unwrap();
        for (t, f) in times.iter().zip(s.fields()) {
            let exact = lin.propagator(*t).unwrap().apply(&u0).unwrap();
            assert!(rel(f, &exact) < 1e-14);
        }

        let ns = etd_march(&u0, &m, &times).unwrap();
        let moll0 = Model::new(ModelSpec::new(ModelKind::Mollified { kappa: 0.0 }, g)).unwrap();
        let mo = etd_march(&u0, &moll0, &times).unwrap();
        assert!(ns.max_l2_distance(&mo).unwrap() <= 1e-12 * ns.max_l2());
    }

    #[test]
    fn etd_blowup_guard() {
        let g = grid16();
        let m = Model::new(ModelSpec::new(ModelKind::NavierStokes, g)).unwrap();
        let times = graded_time_grid(5.0, 4, 1.0).unwrap();
        let r = etd_march(&small_data(g, 200.0), &m, &times);
        assert!(matches!(r, Err(NslabError::Blowup { .. })), "{r:?}");
    }

    #[test]
    fn picard_matches_etd() {
        let g = grid16();
        let times = graded_time_grid(1.0, 64, 2.0).unwrap();
        let u0 = small_data(g, 0.05);
        for kind in [
            ModelKind::NavierStokes,
            ModelKind::Mollified {
                kappa: 2.0 * g.spacing(),
            },
            ModelKind::Hyperviscous { ell: 4.0 },
        ] {
            let m = Model::new(ModelSpec::new(kind, g)).unwrap();
            let p = solve(&m, &u0, &times, Method::Picard).unwrap();
            let e = etd_march(&u0, &m, &times).unwrap();
            for (a, b) in p.fields().iter().zip(e.fields()).skip(1) {
                assert!(rel(a, b) < 1e-6, "{kind:?}: {}", rel(a, b));
            }
            assert!(p.all_solenoidal() && e.all_solenoidal());
        }
    }

    #[test]
    fn etd_step_halving() {
        let g = grid16();
        let m = Model::new(ModelSpec::new(ModelKind::NavierStokes, g)).unwrap();
        let times = graded_time_grid(1.0, 8, 2.0).unwrap();
        let u0 = small_data(g, 1.0);
        let finals: Vec<SpectralVectorField> = [1, 2, 4]
            .iter()
            .map(|k| etd_march_substeps(&u0, &m, &times, *k).unwrap().last().clone())
            .collect();
        let ratio = finals[0].sub(&finals[1]).unwrap().l2_norm() / finals[1].sub(&finals[2]).unwrap().l2_norm();
        assert!((ratio - 4.0).abs() < 0.5, "{ratio}");
    }

    #[test]
    fn quadratic_response_to_amplitude() {
        let g = grid16();
        let m = Model::new(ModelSpec::new(ModelKind::NavierStokes, g)).unwrap();
        let times = graded_time_grid(1.0, 16, 2.0).unwrap();
        let dev = |a: f64| {
            let u0 = small_data(g, a);
            let s = solve(&m, &u0, &times, Method::Picard).unwrap();
            let lin = m.propagate(&u0, 1.0);
            s.last().sub(&lin).unwrap().l2_norm()
        };
        let ratio = dev(0.02) / dev(0.01);
        assert!((ratio - 4.0).abs() < 0.1, "{ratio}");
    }

    #[test]
    fn unforced_energy_decreases() {
        let g = grid16();
        let times = graded_time_grid(2.0, 20, 2.0).unwrap();
        for kind in [ModelKind::NavierStokes, ModelKind::Hyperviscous { ell: 3.0 }] {
            let m = Model::new(ModelSpec::new(kind, g)).unwrap();
            let s = solve(&m, &small_data(g, 0.5), &times, Method::Etd).unwrap();
            let e: Vec<f64> = s.fields().iter().map(|f| f.l2_norm()).collect();
            assert!(e.windows(2).all(|w| w[1] <= w[0]), "{kind:?}");
        }
    }

    #[test]
    fn hyperviscous_damps_high_modes() {
        let g = grid16();
        let times = graded_time_grid(0.5, 10, 2.0).unwrap();
        let u0 = small_data(g, 0.5);
        let ns = solve(
            &Model::new(ModelSpec::new(ModelKind::NavierStokes, g)).unwrap(),
            &u0,
            &times,
            Method::Etd,
        )
        .unwrap();
        let hv = solve(
            &Model::new(ModelSpec::new(ModelKind::Hyperviscous { ell: 4.0 }, g)).unwrap(),
            &u0,
            &times,
            Method::Etd,
        )
        .unwrap();
        let cut = (g.n() / 4) as i64;
        let high = |f: &SpectralVectorField| -> f64 {
            (0..g.len())
                .filter(|&i| g.freq_sq(i) > cut * cut)
                .map(|i| (0..3).map(|c| f.component(c)[i].norm_sqr()).sum::<f64>())
                .sum()
        };
        for (a, b) in ns.fields().iter().zip(hv.fields()).skip(1) {
            assert!(high(b) < high(a));
        }
    }

    #[test]
    fn forced_linear_term() {
        let g = Grid3::new(16, 12.0).unwrap();
        let times = graded_time_grid(4.0, 16, 2.0).unwrap();
        let u0 = small_data(g, 0.3);
        let m = Model::new(ModelSpec::new(ModelKind::NavierStokes, g)).unwrap();
        let y = linear_forced_term(&u0, &m, &times).unwrap();
        for (t, f) in times.iter().zip(y.fields()) {
            assert!(rel(f, &m.propagator(*t).unwrap().apply(&u0).unwrap()) < 1e-14);
        }
        // the steady closed form agrees with product integration of a
        // constant force
        let steady = ModelSpec::new(ModelKind::NavierStokes, g).with_forcing(ForcingSpec::SteadySurrogateDelta {
            b: [1.0, 0.0, 0.0],
            sigma: 1.0,
        });
        let exact = linear_forced_term(&u0, &Model::new(steady.clone()).unwrap(), &times).unwrap();
        let m = Model::new(steady).unwrap();
        let forces: Vec<SpectralVectorField> = times.iter().map(|t| m.forcing_at(*t).unwrap()).collect();
        let quad = product_integrate(&m, &times, &forces).unwrap();
        for ((e, q), t) in exact.fields().iter().zip(&quad).zip(&times) {
            let lin = m.propagate(&u0, *t);
            assert!(e.sub(&lin).unwrap().sub(q).unwrap().l2_norm() < 1e-12 * e.l2_norm());
        }
    }

    #[test]
    fn forced_picard_matches_etd() {
        let g = grid16();
        let times = graded_time_grid(1.0, 48, 2.0).unwrap();
        let mut mat = [[0.0; 3]; 3];
        mat[0][1] = 1.0;
        mat[2][0] = -0.5;
        let spec = ModelSpec::new(ModelKind::NavierStokes, g).with_forcing(ForcingSpec::DivergenceForm {
            amplitude: 0.2,
            width: 0.8,
            matrix: mat,
            envelope: Envelope::Decay { t0: 0.5, power: 1.0 },
        });
        let m = Model::new(spec).unwrap();
        let u0 = small_data(g, 0.05);
        let p = solve(&m, &u0, &times, Method::Picard).unwrap();
        let e = solve(&m, &u0, &times, Method::Etd).unwrap();
        assert!(rel(p.last(), e.last()) < 1e-5, "{}", rel(p.last(), e.last()));
    }

    #[test]
    fn rejects_bad_data() {
        let g = grid16();
        let m = Model::new(ModelSpec::new(ModelKind::NavierStokes, g)).unwrap();
        let times = graded_time_grid(1.0, 4, 2.0).unwrap();
        let mut u = small_data(g, 1.0);
        u.coeffs_mut()[0][0] = num_complex::Complex64::new(0.5, 0.0);
        assert!(solve(&m, &u, &times, Method::Etd).is_err());
        let f = SpectralVectorField::forward(&PhysicalVector::from_fn(g, |x| [x[0].sin(), 0.0, 0.0]));
        assert!(solve(&m, &f, &times, Method::Picard).is_err());
    }

    #[test]
    fn trajectory_round_trip() {
        let g = grid16();
        let m = Model::new(ModelSpec::new(ModelKind::Hyperviscous { ell: 3.0 }, g)).unwrap();
        let times = graded_time_grid(0.5, 4, 2.0).unwrap();
        let s = solve(&m, &small_data(g, 0.2), &times, Method::Picard).unwrap();
        let dir = tempfile::tempdir().unwrap();
        s.save(dir.path()).unwrap();
        let back = TimeGridSolution::load(dir.path()).unwrap();
        assert_eq!(back.times(), s.times());
        assert_eq!(back.meta, s.meta);
        for (a, b) in back.fields().iter().zip(s.fields()) {
            assert!(a.sub(b).unwrap().l2_norm() <= 1e-13 * b.l2_norm().max(1e-300));
        }
        let text = std::fs::read_to_string(dir.path().join("manifest.json")).unwrap();
        assert!(text.contains("hyperviscous") && text.contains("residuals"));
    }
}

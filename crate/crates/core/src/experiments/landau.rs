//! Landau residuals and the point-force run.

use super::config::ExperimentConfig;
use super::report::{Check, Outcome, Report};
use crate::error::Result;
use crate::exact::{landau_residual, shell_samples, LandauReport};
use crate::norms::{vector_norm, DecayCurve, NormKind};
use crate::solver::{graded_time_grid, EtdMarcher, ForcingSpec, Model, ModelKind, ModelSpec};

/// Residual reports for every configured `c`, one sample set per `c`.
pub fn landau_reports(cfg: &ExperimentConfig) -> Result<Vec<LandauReport>> {
    let lc = &cfg.landau;
    lc.c.iter()
        .enumerate()
        .map(|(i, &c)| {
            let pts = shell_samples(lc.samples, lc.shell[0], lc.shell[1], cfg.seed.wrapping_add(i as u64));
            landau_residual(c, &pts, lc.h)
        })
        .collect()
}

pub fn exp_landau(cfg: &ExperimentConfig) -> Result<Outcome> {
    let lc = &cfg.landau;
    let mut report = Report::new("landau", cfg.hash());
    for r in landau_reports(cfg)? {
        report.push(
            Check::gate(
                format!("steady residual c={}", r.c),
                Some(4),
                r.max <= lc.residual_tolerance,
                r.max,
                format!("<= {:e}", lc.residual_tolerance),
            )
            .with_detail(format!(
                "median {:.2e} rounding floor {:.2e} samples {}",
                r.median, r.rounding_floor, r.samples
            )),
        );
        report.push(Check::gate(
            format!("divergence c={}", r.c),
            Some(4),
            r.max_divergence <= lc.divergence_tolerance,
            r.max_divergence,
            format!("<= {:e}", lc.divergence_tolerance),
        ));
    }

    // Gaussian surrogate of b δ₀ driving the flow from rest
    let grid = lc.force_grid.grid()?;
    let sigma = lc.force_sigma_cells * grid.spacing();
    let model = Model::new(
        ModelSpec::new(ModelKind::NavierStokes, grid)
            .with_forcing(ForcingSpec::SteadySurrogateDelta { b: lc.force_b, sigma }),
    )?;
    let tc = &lc.force_time;
    let mut times = graded_time_grid(tc.t_final, tc.nodes, tc.grading)?;
    let half = 0.5 * tc.t_final;
    times.push(half);
    times.sort_by(|a, b| a.total_cmp(b));
    times.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));

    let kind = NormKind::WeakLp { p: 3.0 };
    let mut marcher = EtdMarcher::new(&model, crate::field::SpectralVectorField::zeros(grid))?;
    let (mut ts, mut vs) = (Vec::new(), Vec::new());
    let mut at_half = None;
    for &t in times.iter().skip(1) {
        marcher.advance_to(t, tc.substeps)?;
        ts.push(t);
        vs.push(vector_norm(&marcher.state().backward(), kind, cfg.vector_norm)?);
        if (t - half).abs() <= 1e-12 * half {
            at_half = Some(marcher.state().clone());
        }
    }
    let last = marcher.state();
    let change = last.sub(&at_half.expect("T/2 is a node"))?.l2_norm() / last.l2_norm();
    report.push(
        Check::gate(
            "point-force flow stationary",
            None,
            change <= lc.stationarity_tolerance,
            change,
            format!("<= {}", lc.stationarity_tolerance),
        )
        .with_detail(format!("|u(T)-u(T/2)|/|u(T)| sigma={sigma:.3} T={}", tc.t_final)),
    );
    let final_weak = *vs.last().expect("nonempty grid");
    let peak = ts
        .iter()
        .zip(&vs)
        .filter(|(t, _)| **t >= 0.1)
        .map(|(_, v)| *v)
        .fold(0.0, f64::max);
    report.push(Check::info(
        "weak3 of forced flow bounded",
        peak <= 1.05 * final_weak,
        peak / final_weak,
        "max over t >= 0.1 within 5% of the final value",
    ));
    let curve = DecayCurve::new("weak3(u) point force", 3.0, kind.tag(), ts, vs)?;
    Ok(Outcome {
        report,
        curves: vec![curve],
    })
}

//! Kernel constants and the semigroup gap rate.

use super::config::ExperimentConfig;
use super::report::{Check, Outcome, Report};
use crate::error::Result;
use crate::kernels::{compute_cl, gap_sample};
use crate::norms::{fit_points, DecayCurve};

/// Gap curve `t ↦ ‖p_ℓ(t)*p(t/2) - p(t/2)‖₁` on grids scaled to each `t`.
pub fn gap_curve(ell: f64, times: &[f64], n: usize) -> Result<DecayCurve> {
    let values = times
        .iter()
        .map(|&t| gap_sample(ell, t, n).map(|s| s.gap))
        .collect::<Result<Vec<_>>>()?;
    DecayCurve::new(format!("l1 gap ell={ell}"), 1.0, "l1", times.to_vec(), values)
}

pub fn exp_kernels(cfg: &ExperimentConfig) -> Result<Outcome> {
    let kc = &cfg.kernels;
    let mut report = Report::new("kernels", cfg.hash());
    for &ell in &kc.unit_ells {
        let name = format!("C_ell = 1 at ell={ell}");
        match compute_cl(ell) {
            Ok(c) => report.push(
                Check::gate(
                    name,
                    Some(2),
                    (c.value - 1.0).abs() <= kc.unit_tolerance,
                    c.value,
                    format!("1 +- {}", kc.unit_tolerance),
                )
                .with_detail(format!("error estimate {:.2e}", c.error_estimate)),
            ),
            Err(e) => report.push(Check::gate(name, Some(2), false, f64::NAN, "1").with_detail(e.to_string())),
        }
    }
    let name = format!("C_ell > {} at ell={}", kc.large_min, kc.large_ell);
    match compute_cl(kc.large_ell) {
        Ok(c) => report.push(
            Check::gate(
                name,
                Some(2),
                c.value > kc.large_min,
                c.value,
                format!("> {}", kc.large_min),
            )
            .with_detail(format!("error estimate {:.2e}", c.error_estimate)),
        ),
        Err(e) => report.push(Check::gate(name, Some(2), false, f64::NAN, "").with_detail(e.to_string())),
    }

    let mut curves = Vec::new();
    for &ell in &kc.gap_ells {
        let mut curve = gap_curve(ell, &kc.gap_times, kc.gap_n)?;
        let pts: Vec<(f64, f64)> = curve.times.iter().copied().zip(curve.values.iter().copied()).collect();
        let fit = fit_points(&pts)?;
        curve.fit = Some(fit);
        let target = -(0.5 - 1.0 / ell);
        report.push(
            Check::gate(
                format!("gap slope ell={ell}"),
                Some(3),
                (fit.slope - target).abs() <= kc.slope_tolerance,
                fit.slope,
                format!("{target:.4} +- {}", kc.slope_tolerance),
            )
            .with_detail(format!("stderr {:.2e}", fit.stderr)),
        );
        curves.push(curve);
    }
    let flat = gap_curve(2.0, &kc.gap_times, kc.gap_n)?;
    let max = flat.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = flat.values.iter().copied().fold(f64::INFINITY, f64::min);
    let drift = max / min - 1.0;
    report.push(Check::gate(
        "gap independent of t at ell=2",
        Some(3),
        drift <= kc.invariance_tolerance,
        drift,
        format!("max/min - 1 <= {}", kc.invariance_tolerance),
    ));
    curves.push(flat);
    Ok(Outcome { report, curves })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_curve_shapes() {
        let flat = gap_curve(2.0, &[1.0, 4.0], 128).unwrap();
        assert!((flat.values[0] / flat.values[1] - 1.0).abs() < 1e-10);
        let steep = gap_curve(4.0, &[1.0, 4.0], 128).unwrap();
        assert!(steep.values[1] < steep.values[0]);
    }
}

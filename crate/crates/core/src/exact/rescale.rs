use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{NslabError, Result};
use crate::field::{PhysicalVector, SpectralVectorField};
use crate::grid::Grid3;
use crate::spectral::leray_project_in_place;

/// Largest energy fraction a rescale may push past the Nyquist frequency.
pub const ALIAS_TOL: f64 = 1e-6;
/// Largest energy fraction that may lie outside the part of the box a
/// rescale with `λ < 1` can see.
pub const SUPPORT_TOL: f64 = 1e-6;

/// Time at which the rescaled field lives.
pub fn rescaled_time(t: f64, lambda: f64) -> f64 {
    t / (lambda * lambda)
}

/// Energy fraction in modes with some `|k_j| > limit`.
fn energy_beyond(f: &SpectralVectorField, limit: f64) -> f64 {
    let g = f.grid();
    let mut total = 0.0;
    let mut beyond = 0.0;
    for idx in 0..g.len() {
        let (i, j, k) = g.unravel(idx);
        let e: f64 = (0..3).map(|c| f.component(c)[idx].norm_sqr()).sum();
        total += e;
        let m = g.freq(i).abs().max(g.freq(j).abs()).max(g.freq(k).abs()) as f64;
        if m > limit {
            beyond += e;
        }
    }
    if total > 0.0 {
        beyond / total
    } else {
        0.0
    }
}

/// Energy fraction of the physical samples outside the cube `|x_j| < half`.
fn energy_outside(u: &PhysicalVector, half: f64) -> f64 {
    let g = u.grid();
    let xs = g.centered_coords();
    let mut total = 0.0;
    let mut outside = 0.0;
    for idx in 0..g.len() {
        let (i, j, k) = g.unravel(idx);
        let e: f64 = (0..3).map(|c| u.component(c)[idx].powi(2)).sum();
        total += e;
        if xs[i].abs() >= half || xs[j].abs() >= half || xs[k].abs() >= half {
            outside += e;
        }
    }
    if total > 0.0 {
        outside / total
    } else {
        0.0
    }
}

/// Rows `e^{iκ_a y_i}` evaluating a 1D Fourier series at `y_i = λ x_i`;
/// the Nyquist column uses `cos` so that real data stay real, and rows whose
/// point falls outside the box are zero.
fn interpolation_matrix(g: &Grid3, lambda: f64) -> Vec<Complex64> {
    let n = g.n();
    let half = 0.5 * g.length();
    let xs = g.centered_coords();
    let mut m = vec![Complex64::default(); n * n];
    for i in 0..n {
        let y = lambda * xs[i];
        if y.abs() >= half && lambda != 1.0 {
            continue;
        }
        for a in 0..n {
            let phase = g.wavenumber(a) * y;
            m[i * n + a] = if a == n / 2 {
                Complex64::new(phase.cos(), 0.0)
            } else {
                Complex64::from_polar(1.0, phase)
            };
        }
    }
    m
}

/// Applies `m` along one axis of an x-fastest cube.
fn apply_axis(data: &mut [Complex64], m: &[Complex64], n: usize, axis: usize) {
    let stride = n.pow(axis as u32);
    let lines: Vec<usize> = (0..n * n)
        .map(|l| {
            let lo = l % stride;
            let hi = l / stride;
            lo + hi * stride * n
        })
        .collect();
    let results: Vec<Vec<Complex64>> = lines
        .par_iter()
        .map(|&base| {
            let line: Vec<Complex64> = (0..n).map(|a| data[base + a * stride]).collect();
            (0..n)
                .map(|i| {
                    let row = &m[i * n..(i + 1) * n];
                    row.iter().zip(&line).map(|(r, z)| r * z).sum()
                })
                .collect()
        })
        .collect();
    for (&base, out) in lines.iter().zip(results) {
        for (i, z) in out.into_iter().enumerate() {
            data[base + i * stride] = z;
        }
    }
}

/// `u_λ(x) = λ u(λx)` by trigonometric interpolation of the Fourier series.
///
/// For `λ > 1` the points `λx` outside the box are set to zero, so the
/// field must vanish near the box boundary; for `λ < 1` the part of `u`
/// outside `|x_j| < λL/2` is lost and must be negligible.
pub fn rescale(u: &SpectralVectorField, lambda: f64) -> Result<SpectralVectorField> {
    rescale_with_tolerance(u, lambda, ALIAS_TOL, SUPPORT_TOL)
}

/// [`rescale`] with explicit guard tolerances (energy fractions).
pub fn rescale_with_tolerance(
    u: &SpectralVectorField,
    lambda: f64,
    alias_tol: f64,
    support_tol: f64,
) -> Result<SpectralVectorField> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(NslabError::InvalidParameter(format!(
            "rescale factor must be positive, got {lambda}"
        )));
    }
    let g = *u.grid();
    if lambda > 1.0 {
        let fraction = energy_beyond(u, g.n() as f64 / (2.0 * lambda));
        if fraction > alias_tol {
            return Err(NslabError::Aliasing { lambda, fraction });
        }
    } else if lambda < 1.0 {
        let fraction = energy_outside(&u.backward(), 0.5 * lambda * g.length());
        if fraction > support_tol {
            return Err(NslabError::Containment(format!(
                "energy fraction {fraction:e} lies outside the region seen by λ = {lambda}"
            )));
        }
    }
    let m = interpolation_matrix(&g, lambda);
    let n = g.n();
    let mut comps: [Vec<f64>; 3] = Default::default();
    for (c, out) in comps.iter_mut().enumerate() {
        let mut data = u.component(c).to_vec();
        for axis in 0..3 {
            apply_axis(&mut data, &m, n, axis);
        }
        *out = data.into_iter().map(|z| lambda * z.re).collect();
    }
    let mut out = SpectralVectorField::forward(&PhysicalVector::new(g, comps)?);
    if u.is_solenoidal() {
        leray_project_in_place(&mut out);
        out.remove_mean();
    }
    Ok(out)
}

/// `‖f‖₂` restricted to the ball `|x| ≤ radius`.
pub fn ball_l2_norm(f: &PhysicalVector, radius: f64) -> f64 {
    let g = f.grid();
    let xs = g.centered_coords();
    let r2 = radius * radius;
    let mut acc = 0.0;
    for idx in 0..g.len() {
        let (i, j, k) = g.unravel(idx);
        if xs[i] * xs[i] + xs[j] * xs[j] + xs[k] * xs[k] <= r2 {
            acc += (0..3).map(|c| f.component(c)[idx].powi(2)).sum::<f64>();
        }
    }
    (acc * g.cell_volume()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::HomogeneousData;
    use crate::norms::{vector_lp_norm, VectorNorm};

    fn gaussian(g: Grid3, sigma: f64) -> SpectralVectorField {
        SpectralVectorField::forward(&PhysicalVector::from_fn(g, |x| {
            let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
            let e = (-r2 / (2.0 * sigma * sigma)).exp();
            [e, x[0] * e / sigma, 0.0]
        }))
    }

    #[test]
    fn unit_factor_is_identity() {
        let g = Grid3::new(16, 8.0).unwrap();
        let u = gaussian(g, 1.0);
        let v = rescale(&u, 1.0).unwrap();
        assert!(v.sub(&u).unwrap().l2_norm() < 1e-12 * u.l2_norm());
    }

    #[test]
    fn norm_scaling_and_pointwise_values() {
        let g = Grid3::new(64, 72.0).unwrap();
        let sigma = 5.4;
        let u = gaussian(g, sigma);
        let v = rescale(&u, 2.0).unwrap();
        let (pu, pv) = (u.backward(), v.backward());
        for p in [2.0, 4.0] {
            let a = vector_lp_norm(&pu, p, VectorNorm::Euclidean).unwrap();
            let b = vector_lp_norm(&pv, p, VectorNorm::Euclidean).unwrap();
            let expected = 2f64.powf(1.0 - 3.0 / p);
            assert!((b / a / expected - 1.0).abs() < 1e-8, "p={p}: {}", b / a / expected);
        }
        let xs = g.centered_coords();
        for idx in [0usize, 5, 37, 1000, 20000, 150_000] {
            let (i, j, k) = g.unravel(idx);
            let y = [2.0 * xs[i], 2.0 * xs[j], 2.0 * xs[k]];
            let r2 = y.iter().map(|a| a * a).sum::<f64>();
            let e = (-r2 / (2.0 * sigma * sigma)).exp();
            assert!((pv.component(0)[idx] - 2.0 * e).abs() < 1e-9);
            assert!((pv.component(1)[idx] - 2.0 * y[0] * e / sigma).abs() < 1e-9);
        }
        // the inverse rescale recovers the field
        let w = rescale(&v, 0.5).unwrap();
        let rt = w.sub(&u).unwrap().l2_norm() / u.l2_norm();
        assert!(rt < 1e-8, "{rt}");
    }

    #[test]
    fn guards() {
        let g = Grid3::new(32, 32.0).unwrap();
        assert!(rescale(&gaussian(g, 3.0), 0.0).is_err());
        assert!(matches!(
            rescale(&gaussian(g, 1.0), 2.0),
            Err(NslabError::Aliasing { .. })
        ));
        assert!(matches!(
            rescale(&gaussian(g, 4.0), 0.5),
            Err(NslabError::Containment(_))
        ));
    }

    #[test]
    fn homogeneous_field_is_invariant_up_to_core() {
        // λu(λx) for the swirl with core δ is the swirl with core δ/λ
        let g = Grid3::new(64, 40.0).unwrap();
        let u = HomogeneousData::swirl(1.0)
            .with_core_cells(8.0)
            .grid_data(&g)
            .unwrap()
            .field;
        // the window's transition band puts some energy past half Nyquist;
        // it lies outside the comparison ball
        assert!(matches!(rescale(&u, 2.0), Err(NslabError::Aliasing { .. })));
        let v = rescale_with_tolerance(&u, 2.0, 1e-4, SUPPORT_TOL).unwrap();
        let w = HomogeneousData::swirl(1.0)
            .with_core_cells(4.0)
            .grid_data(&g)
            .unwrap()
            .field;
        let diff = v.sub(&w).unwrap().backward();
        let radius = 40.0 / 8.0;
        let rel = ball_l2_norm(&diff, radius) / ball_l2_norm(&w.backward(), radius);
        assert!(rel < 1e-2, "{rel}");
    }
}

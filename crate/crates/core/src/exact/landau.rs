use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{NslabError, Result};

/// Smallest admissible sample radius for residual checks.
pub const MIN_SAMPLE_RADIUS: f64 = 0.5;
/// Guard added to the residual denominator.
pub const EPS_DEN: f64 = 1e-300;

/// One-point singular stationary solution with parameter `|c| > 1`:
///
/// ```text
/// u₁ = 2 (c|x|² - 2x₁|x| + c x₁²) / (|x| (c|x| - x₁)²)
/// u_j = 2 x_j (c x₁ - |x|) / (|x| (c|x| - x₁)²),   j = 2, 3
/// p  = 4 (c x₁ - |x|) / (|x| (c|x| - x₁)²)
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LandauSolution {
    c: f64,
}

impl LandauSolution {
    pub fn new(c: f64) -> Result<Self> {
        if !(c.abs() > 1.0) || !c.is_finite() {
            return Err(NslabError::InvalidParameter(format!(
                "Landau parameter needs |c| > 1, got {c}"
            )));
        }
        Ok(Self { c })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Velocity and pressure at `x ≠ 0`.
    pub fn eval(&self, x: [f64; 3]) -> Result<([f64; 3], f64)> {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        if r == 0.0 {
            return Err(NslabError::SampleTooClose(0.0));
        }
        Ok(self.eval_unchecked(x, r))
    }

    #[inline]
    fn eval_unchecked(&self, x: [f64; 3], r: f64) -> ([f64; 3], f64) {
        let c = self.c;
        let q = c * r - x[0];
        let den = r * q * q;
        let s = c * x[0] - r;
        let u = [
            2.0 * (c * r * r - 2.0 * x[0] * r + c * x[0] * x[0]) / den,
            2.0 * x[1] * s / den,
            2.0 * x[2] * s / den,
        ];
        (u, 4.0 * s / den)
    }

    fn u_at(&self, x: [f64; 3]) -> [f64; 3] {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        self.eval_unchecked(x, r).0
    }

    fn p_at(&self, x: [f64; 3]) -> f64 {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        self.eval_unchecked(x, r).1
    }
}

/// `landau_eval` under its operational name.
pub fn landau_eval(c: f64, x: [f64; 3]) -> Result<([f64; 3], f64)> {
    LandauSolution::new(c)?.eval(x)
}

fn shift(x: [f64; 3], axis: usize, d: f64) -> [f64; 3] {
    let mut y = x;
    y[axis] += d;
    y
}

/// Fourth-order central first derivative along `axis`.
fn d1<const N: usize>(f: impl Fn([f64; 3]) -> [f64; N], x: [f64; 3], axis: usize, h: f64) -> [f64; N] {
    let a = f(shift(x, axis, 2.0 * h));
    let b = f(shift(x, axis, h));
    let c = f(shift(x, axis, -h));
    let d = f(shift(x, axis, -2.0 * h));
    std::array::from_fn(|k| (-a[k] + 8.0 * b[k] - 8.0 * c[k] + d[k]) / (12.0 * h))
}

/// Fourth-order central second derivative along `axis`.
fn d2<const N: usize>(f: impl Fn([f64; 3]) -> [f64; N], x: [f64; 3], axis: usize, h: f64) -> [f64; N] {
    let a = f(shift(x, axis, 2.0 * h));
    let b = f(shift(x, axis, h));
    let m = f(x);
    let c = f(shift(x, axis, -h));
    let d = f(shift(x, axis, -2.0 * h));
    std::array::from_fn(|k| (-a[k] + 16.0 * b[k] - 30.0 * m[k] + 16.0 * c[k] - d[k]) / (12.0 * h * h))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointResidual {
    pub x: [f64; 3],
    /// `|-Δu + (u·∇)u + ∇p| / (|u||∇u| + |∇p| + ε)`
    pub relative: f64,
    /// Per-component residual over the same denominator.
    pub components: [f64; 3],
    /// `|div u| / (|∇u| + ε)`
    pub divergence: f64,
    /// Rounding contribution of the stencils over the same denominator.
    pub rounding_floor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LandauReport {
    pub c: f64,
    pub h: f64,
    pub samples: usize,
    pub max: f64,
    pub median: f64,
    pub max_component: [f64; 3],
    pub max_divergence: f64,
    /// Largest rounding floor; residuals near it cannot shrink with `h`.
    pub rounding_floor: f64,
    pub points: Vec<PointResidual>,
}

impl LandauSolution {
    /// Steady residual at one point by fourth-order differences of the
    /// closed form.
    pub fn residual_at(&self, x: [f64; 3], h: f64) -> Result<PointResidual> {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        if r < MIN_SAMPLE_RADIUS {
            return Err(NslabError::SampleTooClose(r));
        }
        if !(h > 0.0) || 2.0 * h >= r {
            return Err(NslabError::InvalidParameter(format!(
                "difference step {h} invalid at |x| = {r}"
            )));
        }
        let uf = |y: [f64; 3]| self.u_at(y);
        let pf = |y: [f64; 3]| [self.p_at(y)];
        let u = self.u_at(x);
        // grad[i][k] = ∂_i u_k
        let grad: [[f64; 3]; 3] = std::array::from_fn(|i| d1(uf, x, i, h));
        let gp: [f64; 3] = std::array::from_fn(|i| d1(pf, x, i, h)[0]);
        let mut lap = [0.0; 3];
        for i in 0..3 {
            let s = d2(uf, x, i, h);
            for k in 0..3 {
                lap[k] += s[k];
            }
        }
        let res: [f64; 3] = std::array::from_fn(|k| {
            let conv: f64 = (0..3).map(|i| u[i] * grad[i][k]).sum();
            -lap[k] + conv + gp[k]
        });
        let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
        let grad_norm = norm(&grad.concat());
        let den = norm(&u) * grad_norm + norm(&gp) + EPS_DEN;
        let div = grad[0][0] + grad[1][1] + grad[2][2];
        Ok(PointResidual {
            x,
            relative: norm(&res) / den,
            components: res.map(|v| v.abs() / den),
            divergence: div.abs() / (grad_norm + EPS_DEN),
            rounding_floor: f64::EPSILON * (64.0 / (12.0 * h * h) * norm(&u) + 18.0 / (12.0 * h) * self.p_at(x).abs())
                / den,
        })
    }
}

/// `k` points uniformly distributed in the shell `r_lo ≤ |x| ≤ r_hi`.
pub fn shell_samples(k: usize, r_lo: f64, r_hi: f64, seed: u64) -> Vec<[f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(k);
    while out.len() < k {
        let v: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        if n2 > 1.0 || n2 < 1e-12 {
            continue;
        }
        // radius with density ∝ r² on [r_lo, r_hi]
        let u: f64 = rng.random();
        let r3 = r_lo.powi(3) + u * (r_hi.powi(3) - r_lo.powi(3));
        let s = r3.cbrt() / n2.sqrt();
        out.push(v.map(|a| a * s));
    }
    out
}

/// Maximum relative steady residual over `samples`, with summary statistics.
pub fn landau_residual(c: f64, samples: &[[f64; 3]], h: f64) -> Result<LandauReport> {
    let sol = LandauSolution::new(c)?;
    if samples.is_empty() {
        return Err(NslabError::InvalidParameter("no sample points".into()));
    }
    let points = samples
        .par_iter()
        .map(|x| sol.residual_at(*x, h))
        .collect::<Result<Vec<_>>>()?;
    let mut rel: Vec<f64> = points.iter().map(|p| p.relative).collect();
    rel.sort_by(|a, b| a.total_cmp(b));
    let mid = rel.len() / 2;
    let median = if rel.len() % 2 == 1 {
        rel[mid]
    } else {
        0.5 * (rel[mid - 1] + rel[mid])
    };
    let mut max_component = [0.0f64; 3];
    for p in &points {
        for k in 0..3 {
            max_component[k] = max_component[k].max(p.components[k]);
        }
    }
    Ok(LandauReport {
        c,
        h,
        samples: points.len(),
        max: *rel.last().expect("nonempty"),
        median,
        max_component,
        max_divergence: points.iter().map(|p| p.divergence).fold(0.0, f64::max),
        rounding_floor: points.iter().map(|p| p.rounding_floor).fold(0.0, f64::max),
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_on_axis() {
        let (u, p) = landau_eval(2.0, [1.0, 0.0, 0.0]).unwrap();
        assert_eq!(u, [4.0, 0.0, 0.0]);
        assert_eq!(p, 4.0);
        let (u, _) = landau_eval(-3.0, [-2.5, 0.0, 0.0]).unwrap();
        assert_eq!((u[1], u[2]), (0.0, 0.0));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(landau_eval(1.0, [1.0, 0.0, 0.0]).is_err());
        assert!(landau_eval(-0.5, [1.0, 0.0, 0.0]).is_err());
        assert!(matches!(landau_eval(2.0, [0.0; 3]), Err(NslabError::SampleTooClose(_))));
        assert!(matches!(
            landau_residual(2.0, &[[0.1, 0.2, 0.0]], 1e-3),
            Err(NslabError::SampleTooClose(_))
        ));
    }

    #[test]
    fn homogeneity_and_symmetry() {
        let sol = LandauSolution::new(1.5).unwrap();
        for x in shell_samples(20, 0.5, 4.0, 3) {
            let (u, p) = sol.eval(x).unwrap();
            let (u2, p2) = sol.eval(x.map(|a| 2.0 * a)).unwrap();
            for k in 0..3 {
                assert!((u2[k] - 0.5 * u[k]).abs() <= 1e-14 * u[k].abs().max(1e-14));
            }
            assert!((p2 - 0.25 * p).abs() <= 1e-14 * p.abs().max(1e-14));
            // rotation about the x₁ axis by 90°
            let (ur, pr) = sol.eval([x[0], -x[2], x[1]]).unwrap();
            assert!((ur[0] - u[0]).abs() < 1e-13 * u[0].abs().max(1.0));
            assert!((ur[1] + u[2]).abs() < 1e-13 && (ur[2] - u[1]).abs() < 1e-13);
            assert!((pr - p).abs() < 1e-13 * p.abs().max(1.0));
        }
    }

    #[test]
    fn residual_and_divergence() {
        let pts = shell_samples(100, 0.5, 4.0, 7);
        let rep = landau_residual(2.0, &pts, 1e-3).unwrap();
        assert!(rep.max <= 1e-7, "{}", rep.max);
        assert!(rep.max_divergence <= 1e-9, "{}", rep.max_divergence);
        assert!(rep.median <= rep.max);
        assert!(rep.rounding_floor < rep.max);
    }

    #[test]
    fn stencil_order() {
        let pts = shell_samples(20, 0.5, 4.0, 9);
        let coarse = landau_residual(5.0, &pts, 4e-2).unwrap().max;
        let fine = landau_residual(5.0, &pts, 2e-2).unwrap().max;
        let ratio = coarse / fine;
        assert!(ratio > 12.0 && ratio < 20.0, "{ratio}");
    }

    #[test]
    fn samples_lie_in_shell() {
        let s = shell_samples(500, 0.5, 4.0, 1);
        assert_eq!(s, shell_samples(500, 0.5, 4.0, 1));
        for x in s {
            let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
            assert!((0.5 - 1e-12..=4.0 + 1e-12).contains(&r));
        }
    }
}

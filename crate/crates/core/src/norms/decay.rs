use std::io::Write;

use serde::Serialize;

use super::{decay_weight, vector_norm, NormKind, VectorNorm};
use crate::error::{NslabError, Result};
use crate::field::PhysicalVector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub stderr: f64,
    pub intercept: f64,
    pub t_lo: f64,
    pub t_hi: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayCurve {
    pub functional: String,
    pub p: f64,
    pub kind: String,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub fit: Option<SlopeFit>,
}

impl DecayCurve {
    pub fn new(
        functional: impl Into<String>,
        p: f64,
        kind: impl Into<String>,
        times: Vec<f64>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if times.len() != values.len() {
            return Err(NslabError::DimensionMismatch {
                expected: times.len(),
                actual: values.len(),
            });
        }
        if times.iter().any(|t| !(*t > 0.0)) || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(NslabError::InvalidParameter(
                "curve times must be positive and strictly increasing".into(),
            ));
        }
        if values.iter().any(|v| !(*v >= 0.0)) {
            return Err(NslabError::InvalidParameter("curve values must be nonnegative".into()));
        }
        Ok(Self {
            functional: functional.into(),
            p,
            kind: kind.into(),
            times,
            values,
            fit: None,
        })
    }

    /// Fits the slope over `[t_lo, t_hi]` and stores it on the curve.
    pub fn fit(&mut self, t_lo: f64, t_hi: f64) -> Result<SlopeFit> {
        let f = fit_slope(self, (t_lo, t_hi))?;
        self.fit = Some(f);
        Ok(f)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Ordinary least squares of `ln v` against `ln t`.
///
/// Points are sorted by `t` first so the result does not depend on input
/// order.
pub fn fit_points(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points.len() < 3 {
        return Err(NslabError::TooFewPoints(points.len()));
    }
    if let Some(&(t, v)) = points
        .iter()
        .find(|&&(t, v)| !(t > 0.0) || !(v > 0.0) || !v.is_finite())
    {
        return Err(NslabError::UndefinedSlope(format!(
            "log of nonpositive sample ({t}, {v})"
        )));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(NslabError::UndefinedSlope("all points share one time".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - intercept - slope * x;
            r * r
        })
        .sum();
    let stderr = (ssr / (n - 2.0) / sxx).sqrt();
    Ok(SlopeFit {
        slope,
        stderr,
        intercept,
        t_lo: pts[0].0,
        t_hi: pts[pts.len() - 1].0,
        points: pts.len(),
    })
}

pub fn fit_slope(curve: &DecayCurve, window: (f64, f64)) -> Result<SlopeFit> {
    let pts: Vec<(f64, f64)> = curve
        .times
        .iter()
        .zip(&curve.values)
        .filter(|(t, _)| **t >= window.0 && **t <= window.1)
        .map(|(t, v)| (*t, *v))
        .collect();
    fit_points(&pts)
}

fn functional_label(kind: NormKind, difference: bool) -> String {
    let norm = match kind {
        NormKind::Lp { .. } => "lp",
        NormKind::WeakLp { .. } => "weak_lp",
        NormKind::BesovHeat { .. } => "besov_heat",
    };
    if difference {
        format!("t^((1-3/p)/2)*{norm}(u-w)")
    } else {
        format!("t^((1-3/p)/2)*{norm}(u)")
    }
}

/// `t^{(1-3/p)/2} ‖u(t)‖` over a sampled trajectory.
pub fn decay_functional<'a>(
    samples: impl IntoIterator<Item = (f64, &'a PhysicalVector)>,
    kind: NormKind,
    how: VectorNorm,
) -> Result<DecayCurve> {
    kind.validate()?;
    let p = kind.p();
    weighted_curve(samples, kind, how, functional_label(kind, false), |t| {
        decay_weight(t, p)
    })
}

/// `t^γ ‖u(t)‖` for an explicit exponent, e.g. `γ = (3/2)(1 - 1/p)` for
/// heat flow of `L¹` data.
pub fn decay_functional_with_exponent<'a>(
    samples: impl IntoIterator<Item = (f64, &'a PhysicalVector)>,
    kind: NormKind,
    how: VectorNorm,
    gamma: f64,
) -> Result<DecayCurve> {
    kind.validate()?;
    let label = format!("t^{gamma}*{}(u)", kind.tag());
    weighted_curve(samples, kind, how, label, |t| t.powf(gamma))
}

fn weighted_curve<'a>(
    samples: impl IntoIterator<Item = (f64, &'a PhysicalVector)>,
    kind: NormKind,
    how: VectorNorm,
    label: String,
    weight: impl Fn(f64) -> f64,
) -> Result<DecayCurve> {
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (t, u) in samples {
        times.push(t);
        values.push(weight(t) * vector_norm(u, kind, how)?);
    }
    DecayCurve::new(label, kind.p(), kind.tag(), times, values)
}

/// `t^{(1-3/p)/2} ‖u(t) - w(t)‖` for two trajectories on the same times.
pub fn decay_functional_difference<'a>(
    samples: impl IntoIterator<Item = (f64, &'a PhysicalVector, &'a PhysicalVector)>,
    kind: NormKind,
    how: VectorNorm,
) -> Result<DecayCurve> {
    kind.validate()?;
    let p = kind.p();
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (t, u, w) in samples {
        if u.grid() != w.grid() {
            return Err(NslabError::GridMismatch);
        }
        let diff: Vec<Vec<f64>> = (0..3)
            .map(|c| u.component(c).iter().zip(w.component(c)).map(|(a, b)| a - b).collect())
            .collect();
        let [a, b, c]: [Vec<f64>; 3] = diff.try_into().expect("three components");
        let d = PhysicalVector::new(*u.grid(), [a, b, c])?;
        times.push(t);
        values.push(decay_weight(t, p) * vector_norm(&d, kind, how)?);
    }
    DecayCurve::new(functional_label(kind, true), p, kind.tag(), times, values)
}

fn fmt_num(v: f64) -> String {
    format!("{v:.12e}")
}

/// Writes `t,value,functional,p,kind` rows followed by one `#` line per
/// fitted curve and any extra comment lines.
pub fn write_curves_csv<W: Write>(out: &mut W, curves: &[DecayCurve], comments: &[String]) -> Result<()> {
    writeln!(out, "t,value,functional,p,kind")?;
    for c in curves {
        for (t, v) in c.times.iter().zip(&c.values) {
            writeln!(
                out,
                "{},{},{},{},{}",
                fmt_num(*t),
                fmt_num(*v),
                c.functional,
                c.p,
                c.kind
            )?;
        }
    }
    for c in curves {
        if let Some(f) = c.fit {
            writeln!(
                out,
                "# slope functional={} p={} kind={} window=[{},{}] points={} slope={} stderr={}",
                c.functional,
                c.p,
                c.kind,
                f.t_lo,
                f.t_hi,
                f.points,
                fmt_num(f.slope),
                fmt_num(f.stderr)
            )?;
        }
    }
    for line in comments {
        writeln!(out, "# {line}")?;
    }
    Ok(())
}

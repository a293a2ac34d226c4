//! Time-dependent experiments on regularized homogeneous data: self-similar
//! decay, and the mollified, hyperviscous and perturbed-data comparisons.
//! Every comparison advances its flows node by node in lockstep, so only the
//! current states are held in memory.

use super::config::ExperimentConfig;
use super::report::{check_window, drop_per_decade, rises, spread, window_points, Check, Outcome, Report};
use crate::error::{NslabError, Result};
use crate::exact::{ball_l2_norm, rescale, HomogeneousData};
use crate::field::{PhysicalVector, SpectralVectorField};
use crate::grid::Grid3;
use crate::kernels::mollifier::{MollifierProfile, MollifierSpec};
use crate::kernels::Dissipation;
use crate::norms::{decay_weight, fit_points, vector_norm, DecayCurve, NormKind, VectorNorm};
use crate::solver::phi::Spectrum;
use crate::solver::{Envelope, EtdMarcher, ForcingSpec, Model, ModelKind, ModelSpec};
use crate::spectral::leray_project_in_place;

/// Shortest admissible measurement window, as a time ratio.
pub const MIN_WINDOW_SPAN: f64 = 8.0;

const WEAK3: NormKind = NormKind::WeakLp { p: 3.0 };

/// Values of one functional at the sampled nodes.
struct Series {
    label: String,
    p: f64,
    kind: &'static str,
    times: Vec<f64>,
    values: Vec<f64>,
}

impl Series {
    fn new(label: impl Into<String>, kind: NormKind) -> Self {
        Self {
            label: label.into(),
            p: kind.p(),
            kind: kind.tag(),
            times: Vec::new(),
            values: Vec::new(),
        }
    }

    fn push(&mut self, t: f64, v: f64) {
        self.times.push(t);
        self.values.push(v);
    }

    fn curve(self) -> Result<DecayCurve> {
        DecayCurve::new(self.label, self.p, self.kind, self.times, self.values)
    }
}

fn swirl_data(cfg: &ExperimentConfig, grid: &Grid3, report: &mut Report) -> Result<SpectralVectorField> {
    let data = HomogeneousData::swirl(cfg.data.amplitude).with_core_cells(cfg.data.core_cells);
    let g = data.grid_data(grid)?;
    report.guards.push(format!(
        "swirl data: core delta={} projection_correction={:.3e}",
        g.delta, g.projection_correction
    ));
    Ok(g.field)
}

/// Graded nodes with `extra` times merged in.
fn node_times(cfg: &ExperimentConfig, extra: &[f64]) -> Result<Vec<f64>> {
    let mut times = cfg.time.nodes()?;
    for &t in extra {
        if !(t > 0.0 && t <= cfg.time.t_final) {
            return Err(NslabError::InvalidParameter(format!(
                "requested node t={t} outside (0, {}]",
                cfg.time.t_final
            )));
        }
        times.push(t);
    }
    times.sort_by(|a, b| a.total_cmp(b));
    times.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
    Ok(times)
}

/// Advances every marcher to each node and calls `visit` at nodes `t > 0`.
fn march_together(
    marchers: &mut [EtdMarcher<'_>],
    times: &[f64],
    substeps: usize,
    mut visit: impl FnMut(f64, &[EtdMarcher<'_>]) -> Result<()>,
) -> Result<()> {
    for &t in times.iter().skip(1) {
        for m in marchers.iter_mut() {
            m.advance_to(t, substeps)?;
        }
        visit(t, marchers)?;
    }
    Ok(())
}

fn diff_physical(a: &SpectralVectorField, b: &SpectralVectorField) -> Result<PhysicalVector> {
    Ok(a.sub(b)?.backward())
}

fn decay_value(f: &PhysicalVector, t: f64, p: f64, how: VectorNorm) -> Result<f64> {
    Ok(decay_weight(t, p) * vector_norm(f, NormKind::Lp { p }, how)?)
}

fn window_of(cfg_window: [f64; 2], report: &mut Report) -> Result<[f64; 2]> {
    check_window(cfg_window, MIN_WINDOW_SPAN)?;
    report.window = Some(cfg_window);
    Ok(cfg_window)
}

fn drop_check(name: &str, criterion: Option<u8>, curve: &DecayCurve, window: [f64; 2], min_drop: f64) -> Check {
    let pts = window_points(curve, window);
    let drop = drop_per_decade(&pts);
    let c = Check::gate(
        name,
        criterion,
        drop >= min_drop,
        drop,
        format!(">= {min_drop} per decade"),
    );
    c.with_detail(format!("over {} nodes", pts.len()))
}

fn monotone_check(name: &str, criterion: Option<u8>, curve: &DecayCurve, window: [f64; 2], gating: bool) -> Check {
    let pts = window_points(curve, window);
    let r = rises(&pts, 0.0);
    let mut c = Check::gate(name, criterion, r == 0, r as f64, "0 rising steps");
    c.gating = gating;
    c
}

/// Self-similar decay of NS from homogeneous data, and the scaling
/// symmetry `u_δ(t₀) = λ u_{λδ}(λ·, λ² t₀)` between two regularizations.
pub fn exp_selfsim(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut report = Report::new("selfsim", cfg.hash());
    let s = &cfg.selfsim;
    let window = window_of(s.window, &mut report)?;
    let grid = cfg.grid.grid()?;
    let u0 = swirl_data(cfg, &grid, &mut report)?;
    let model = Model::new(ModelSpec::new(ModelKind::NavierStokes, grid))?;
    let t0 = s.rescale_t0;
    let t1 = s.rescale_lambda * s.rescale_lambda * t0;
    let times = node_times(cfg, &[t0, t1])?;
    let how = cfg.vector_norm;

    // λ u_{λδ}(λx, λ²t) solves NS from the core-δ data, so the flow from
    // the wider core, rescaled, must reproduce u(t₀)
    let wide = HomogeneousData::swirl(cfg.data.amplitude)
        .with_core_cells(cfg.data.core_cells * s.rescale_lambda)
        .grid_data(&grid)?
        .field;

    let mut series = Series::new(format!("t^((1-3/p)/2)*lp(u) p={}", s.p), NormKind::Lp { p: s.p });
    let mut weak = Series::new("weak3(u)", WEAK3);
    let mut at_t0 = None;
    let mut at_t1 = None;
    let mut marchers = vec![EtdMarcher::new(&model, u0)?, EtdMarcher::new(&model, wide)?];
    march_together(&mut marchers, &times, cfg.time.substeps, |t, m| {
        let u = m[0].state();
        let pu = u.backward();
        series.push(t, decay_value(&pu, t, s.p, how)?);
        weak.push(t, vector_norm(&pu, WEAK3, how)?);
        if (t - t0).abs() <= 1e-12 * t0 {
            at_t0 = Some(u.clone());
        }
        if (t - t1).abs() <= 1e-12 * t1 {
            at_t1 = Some(m[1].state().clone());
        }
        Ok(())
    })?;
    let mut curve = series.curve()?;
    let pts = window_points(&curve, window);
    let sp = spread(&pts);
    report.push(
        Check::gate(
            "functional constant over window",
            Some(7),
            sp <= s.tolerance,
            sp,
            format!("max/min - 1 <= {}", s.tolerance),
        )
        .with_detail(format!("p={} over {} nodes", s.p, pts.len())),
    );
    if let Ok(fit) = curve.fit(window[0], window[1]) {
        report.push(Check::info(
            "fitted slope of functional",
            fit.slope.abs() < 0.05,
            fit.slope,
            "~0",
        ));
    }

    let (u_t0, u_t1) = (at_t0.expect("t0 is a node"), at_t1.expect("t1 is a node"));
    let radius = s.rescale_radius * grid.length();
    match rescale(&u_t1, s.rescale_lambda) {
        Ok(r) => {
            let d = r.sub(&u_t0)?.backward();
            let rel = ball_l2_norm(&d, radius) / ball_l2_norm(&u_t0.backward(), radius);
            report.push(
                Check::gate(
                    "rescaling consistency",
                    None,
                    rel <= s.rescale_tolerance,
                    rel,
                    format!("<= {}", s.rescale_tolerance),
                )
                .with_detail(format!(
                    "lambda={} t0={t0} ball radius={radius} core {}->{} cells",
                    s.rescale_lambda,
                    cfg.data.core_cells * s.rescale_lambda,
                    cfg.data.core_cells
                )),
            );
        }
        Err(e) => {
            report.guards.push(format!("rescale: {e}"));
            report.push(Check::gate(
                "rescaling consistency",
                None,
                false,
                f64::NAN,
                format!("<= {}", s.rescale_tolerance),
            ));
        }
    }
    Ok(Outcome {
        report,
        curves: vec![curve, weak.curve()?],
    })
}

/// NS against the mollified model from the same data.
pub fn exp_mollified(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut report = Report::new("mollified", cfg.hash());
    let mc = &cfg.mollified;
    let window = window_of(mc.window, &mut report)?;
    if mc.kappa_cells.is_empty() || mc.p.is_empty() {
        return Err(NslabError::InvalidParameter(
            "mollified run needs widths and exponents".into(),
        ));
    }
    let grid = cfg.grid.grid()?;
    let u0 = swirl_data(cfg, &grid, &mut report)?;
    let how = cfg.vector_norm;
    let kappas: Vec<f64> = mc.kappa_cells.iter().map(|c| c * grid.spacing()).collect();
    let ns = Model::new(ModelSpec::new(ModelKind::NavierStokes, grid))?;
    let moll: Vec<Model> = kappas
        .iter()
        .map(|&kappa| Model::new(ModelSpec::new(ModelKind::Mollified { kappa }, grid)))
        .collect::<Result<_>>()?;
    let smoothers: Vec<MollifierSpec> = kappas
        .iter()
        .map(|&k| MollifierSpec::new(grid, k, MollifierProfile::default()))
        .collect::<Result<_>>()?;

    let mut diff: Vec<Vec<Series>> = kappas
        .iter()
        .zip(&mc.kappa_cells)
        .map(|(k, cells)| {
            mc.p.iter()
                .map(|&p| {
                    Series::new(
                        format!("t^((1-3/p)/2)*lp(u-v) kappa={k} ({cells} cells)"),
                        NormKind::Lp { p },
                    )
                })
                .collect()
        })
        .collect();
    let mut companion: Vec<Series> = kappas
        .iter()
        .map(|k| {
            Series::new(
                format!("t^((1-3/p)/2)*lp(u-u*omega) kappa={k}"),
                NormKind::Lp { p: mc.p[0] },
            )
        })
        .collect();

    let mut marchers = vec![EtdMarcher::new(&ns, u0.clone())?];
    for m in &moll {
        marchers.push(EtdMarcher::new(m, u0.clone())?);
    }
    march_together(&mut marchers, &node_times(cfg, &[])?, cfg.time.substeps, |t, m| {
        let u = m[0].state();
        for (i, v) in m[1..].iter().enumerate() {
            let d = diff_physical(u, v.state())?;
            for (s, &p) in diff[i].iter_mut().zip(&mc.p) {
                s.push(t, decay_value(&d, t, p, how)?);
            }
            let smooth = smoothers[i].multiplier().apply(u)?;
            let c = diff_physical(u, &smooth)?;
            companion[i].push(t, decay_value(&c, t, mc.p[0], how)?);
        }
        Ok(())
    })?;

    let mut curves = Vec::new();
    let mut early = Vec::new();
    for (i, row) in diff.into_iter().enumerate() {
        for (j, s) in row.into_iter().enumerate() {
            let mut curve = s.curve()?;
            let gated = i == 0 && j == 0;
            let tag = format!("kappa={} cells p={}", mc.kappa_cells[i], mc.p[j]);
            let crit = gated.then_some(8);
            let mut d = drop_check(
                &format!("difference drop {tag}"),
                crit,
                &curve,
                window,
                mc.min_drop_per_decade,
            );
            d.gating = gated;
            report.push(d);
            report.push(monotone_check(
                &format!("difference monotone {tag}"),
                crit,
                &curve,
                window,
                gated,
            ));
            if j == 0 {
                let e = curve
                    .times
                    .iter()
                    .zip(&curve.values)
                    .filter(|(t, _)| **t < window[0])
                    .map(|(_, v)| *v)
                    .fold(0.0, f64::max);
                early.push(e);
            }
            if let Ok(fit) = curve.fit(window[0], window[1]) {
                report.push(Check::info(format!("late slope {tag}"), true, fit.slope, "recorded"));
            }
            curves.push(curve);
        }
    }
    let ordered = early.windows(2).all(|w| w[1] > w[0]);
    report.push(
        Check::gate(
            "early difference grows with kappa",
            Some(8),
            ordered,
            early.last().copied().unwrap_or(0.0),
            "increasing in kappa",
        )
        .with_detail(format!("early maxima {early:?}")),
    );
    for (i, s) in companion.into_iter().enumerate() {
        let curve = s.curve()?;
        report.push(monotone_check(
            &format!("companion u-u*omega decreasing kappa={} cells", mc.kappa_cells[i]),
            None,
            &curve,
            window,
            false,
        ));
        curves.push(curve);
    }
    Ok(Outcome { report, curves })
}

fn hyper_forcing(h: &super::config::HyperConfig) -> ForcingSpec {
    ForcingSpec::DivergenceForm {
        amplitude: h.force_amplitude,
        width: h.force_width,
        matrix: [[0.0, 1.0, 0.0], [-0.5, 0.0, 0.3], [0.2, 0.0, 0.0]],
        envelope: Envelope::Decay {
            t0: h.force_t0,
            power: h.force_power,
        },
    }
}

/// NS against the hyperviscous model with a shared divergence-form force.
pub fn exp_hyperviscous(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut report = Report::new("hyper", cfg.hash());
    let hc = &cfg.hyper;
    let window = window_of(hc.window, &mut report)?;
    let grid = cfg.grid.grid()?;
    let u0 = swirl_data(cfg, &grid, &mut report)?;
    let how = cfg.vector_norm;
    let forcing = hyper_forcing(hc);
    let ns = Model::new(ModelSpec::new(ModelKind::NavierStokes, grid).with_forcing(forcing.clone()))?;
    let hyper = Model::new(ModelSpec::new(ModelKind::Hyperviscous { ell: hc.ell }, grid).with_forcing(forcing))?;

    // ∫ (S_ℓ S - S)(t-τ) f(τ) dτ with f = -P∇·(w⊗w), by product integration
    let comb = hyper.spectrum();
    let heat = Spectrum::new(&grid, Dissipation::Heat);
    let mut d_comb = SpectralVectorField::zeros(grid);
    let mut d_heat = SpectralVectorField::zeros(grid);
    let mut f_prev = hyper.bilinear_integrand(&u0, &u0)?;
    let mut t_prev = 0.0;

    let mut weak_diff = Series::new("weak3(u-w)", WEAK3);
    let mut lin = Series::new(format!("weak3((S_l S - S)u0) l={}", hc.ell), WEAK3);
    let mut diag = Series::new("weak3(int (S_l-I)S grad P (w x w))", WEAK3);
    let mut decay: Vec<Series> =
        hc.p.iter()
            .map(|&p| Series::new("t^((1-3/p)/2)*lp(u-w)", NormKind::Lp { p }))
            .collect();

    let mut marchers = vec![EtdMarcher::new(&ns, u0.clone())?, EtdMarcher::new(&hyper, u0.clone())?];
    march_together(&mut marchers, &node_times(cfg, &[])?, cfg.time.substeps, |t, m| {
        let (u, w) = (m[0].state(), m[1].state());
        let d = diff_physical(u, w)?;
        weak_diff.push(t, vector_norm(&d, WEAK3, how)?);
        for (s, &p) in decay.iter_mut().zip(&hc.p) {
            s.push(t, decay_value(&d, t, p, how)?);
        }
        let l = diff_physical(&hyper.propagate(&u0, t), &ns.propagate(&u0, t))?;
        lin.push(t, vector_norm(&l, WEAK3, how)?);

        let f = hyper.bilinear_integrand(w, w)?;
        let h = t - t_prev;
        for (acc, spec) in [(&mut d_comb, comb), (&mut d_heat, &heat)] {
            let wts = spec.weights(h);
            let left = wts.left();
            *acc = spec.combine(&[(&wts.exp, 1.0, &*acc), (&left, h, &f_prev), (&wts.phi2, h, &f)]);
        }
        diag.push(t, vector_norm(&diff_physical(&d_comb, &d_heat)?, WEAK3, how)?);
        f_prev = f;
        t_prev = t;
        Ok(())
    })?;

    let weak_curve = weak_diff.curve()?;
    report.push(drop_check(
        "weak3(u-w) drop",
        Some(9),
        &weak_curve,
        window,
        hc.min_drop_per_decade,
    ));
    let mut lin_curve = lin.curve()?;
    let target = -(0.5 - 1.0 / hc.ell);
    let pts = window_points(&lin_curve, window);
    let fit = fit_points(&pts)?;
    lin_curve.fit = Some(fit);
    report.push(
        Check::gate(
            "linear part slope",
            Some(9),
            (fit.slope - target).abs() <= hc.linear_slope_tolerance,
            fit.slope,
            format!("{target:.4} +- {}", hc.linear_slope_tolerance),
        )
        .with_detail(format!("stderr {:.2e}", fit.stderr)),
    );
    let diag_curve = diag.curve()?;
    report.push(monotone_check(
        "integrand surrogate decreasing",
        None,
        &diag_curve,
        window,
        false,
    ));
    let mut curves = vec![weak_curve, lin_curve, diag_curve];
    for s in decay {
        let c = s.curve()?;
        let mut chk = drop_check(
            &format!("decay functional drop p={}", c.p),
            None,
            &c,
            window,
            hc.min_drop_per_decade,
        );
        chk.gating = false;
        report.push(chk);
        curves.push(c);
    }
    Ok(Outcome { report, curves })
}

/// Divergence-free bump `∇×(0, 0, A e^{-|x-c|²/2s²})`, projected and
/// mean-free.
pub fn curl_bump(grid: &Grid3, amplitude: f64, width: f64, center: [f64; 3]) -> SpectralVectorField {
    let f = PhysicalVector::from_fn(*grid, |x| {
        let d = [x[0] - center[0], x[1] - center[1], x[2] - center[2]];
        let s2 = width * width;
        let g = amplitude * (-(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) / (2.0 * s2)).exp();
        [-d[1] / s2 * g, d[0] / s2 * g, 0.0]
    });
    let mut u = SpectralVectorField::forward(&f);
    leray_project_in_place(&mut u);
    u.remove_mean();
    u
}

/// NS from two data differing by a localized `L¹` bump.
pub fn exp_stability(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut report = Report::new("stability", cfg.hash());
    let sc = &cfg.stability;
    let window = window_of(sc.window, &mut report)?;
    let grid = cfg.grid.grid()?;
    let u0 = swirl_data(cfg, &grid, &mut report)?;
    let bump = curl_bump(&grid, sc.bump_amplitude, sc.bump_width, sc.bump_center);
    let v0 = u0.add(&bump)?;
    let how = cfg.vector_norm;
    let ns = Model::new(ModelSpec::new(ModelKind::NavierStokes, grid))?;

    let mut weak_diff = Series::new("weak3(u-u~)", WEAK3);
    let mut lin = Series::new("weak3(S(t)(u0-u0~))", WEAK3);
    let mut decay: Vec<Series> =
        sc.p.iter()
            .map(|&p| Series::new("t^((1-3/p)/2)*lp(u-u~)", NormKind::Lp { p }))
            .collect();
    let mut marchers = vec![EtdMarcher::new(&ns, u0)?, EtdMarcher::new(&ns, v0)?];
    march_together(&mut marchers, &node_times(cfg, &[])?, cfg.time.substeps, |t, m| {
        let d = diff_physical(m[0].state(), m[1].state())?;
        weak_diff.push(t, vector_norm(&d, WEAK3, how)?);
        for (s, &p) in decay.iter_mut().zip(&sc.p) {
            s.push(t, decay_value(&d, t, p, how)?);
        }
        lin.push(t, vector_norm(&ns.propagate(&bump, t).backward(), WEAK3, how)?);
        Ok(())
    })?;

    let weak_curve = weak_diff.curve()?;
    let lin_curve = lin.curve()?;
    report.push(drop_check(
        "weak3(u-u~) drop",
        Some(10),
        &weak_curve,
        window,
        sc.min_drop_per_decade,
    ));
    report.push(drop_check(
        "linear difference drop",
        Some(10),
        &lin_curve,
        window,
        sc.min_drop_per_decade,
    ));
    let a = window_points(&weak_curve, window);
    let b = window_points(&lin_curve, window);
    let ratio = a.iter().zip(&b).map(|(x, y)| x.1 / y.1).fold(0.0, f64::max);
    report.push(Check::gate(
        "difference bounded by linear term",
        Some(10),
        ratio <= sc.max_bound_ratio,
        ratio,
        format!("max ratio <= {}", sc.max_bound_ratio),
    ));
    report.push(monotone_check(
        "weak3(u-u~) decreasing",
        None,
        &weak_curve,
        window,
        false,
    ));
    let mut curves = vec![weak_curve, lin_curve];
    for s in decay {
        curves.push(s.curve()?);
    }
    Ok(Outcome { report, curves })
}

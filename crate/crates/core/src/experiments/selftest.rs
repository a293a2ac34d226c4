//! Exact-property suites for transforms and projection, the weak norms, and
//! the two solvers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Normal, Pareto};

use super::config::ExperimentConfig;
use super::report::{Check, Outcome, Report};
use crate::error::Result;
use crate::field::{PhysicalScalar, PhysicalVector, SpectralVectorField};
use crate::grid::Grid3;
use crate::norms::lp_norm;
use crate::norms::weak_lp_norm;
use crate::solver::{etd_march_substeps, graded_time_grid, solve, Method, Model, ModelKind, ModelSpec};
use crate::spectral::{convolution_nonlinear_term, dealias, divergence, leray_project, nonlinear_term};

/// Families of random samples used by the suites.
#[derive(Debug, Clone, Copy)]
enum Family {
    Normal,
    LogNormal,
    Pareto,
    Smooth,
}

const FAMILIES: [Family; 4] = [Family::Normal, Family::LogNormal, Family::Pareto, Family::Smooth];

fn random_scalar(grid: Grid3, family: Family, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = grid.len();
    let sign = |rng: &mut ChaCha8Rng, v: f64| if rng.random_bool(0.5) { v } else { -v };
    match family {
        Family::Normal => {
            let d = Normal::new(0.0, 1.0).expect("unit normal");
            (0..n).map(|_| d.sample(rng)).collect()
        }
        Family::LogNormal => {
            let d = LogNormal::new(0.0, 1.0).expect("lognormal");
            (0..n)
                .map(|_| {
                    let v = d.sample(rng);
                    sign(rng, v)
                })
                .collect()
        }
        Family::Pareto => {
            // tail index 3.5: finite in every exponent used below
            let d = Pareto::new(1.0, 3.5).expect("pareto");
            (0..n)
                .map(|_| {
                    let v = d.sample(rng);
                    sign(rng, v)
                })
                .collect()
        }
        Family::Smooth => {
            let w = 2.0 * std::f64::consts::PI / grid.length();
            let modes: Vec<([f64; 3], f64, f64)> = (0..6)
                .map(|_| {
                    let k = [0, 1, 2].map(|_| rng.random_range(-3i32..=3) as f64 * w);
                    (k, rng.random_range(-1.0..1.0), rng.random_range(0.0..6.3))
                })
                .collect();
            PhysicalScalar::from_fn(grid, |x| {
                modes
                    .iter()
                    .map(|(k, a, ph)| a * (k[0] * x[0] + k[1] * x[1] + k[2] * x[2] + ph).sin())
                    .sum()
            })
            .into_data()
        }
    }
}

fn random_vector(grid: Grid3, family: Family, rng: &mut ChaCha8Rng) -> Result<PhysicalVector> {
    let c = [0, 1, 2].map(|_| random_scalar(grid, family, rng));
    PhysicalVector::new(grid, c)
}

fn rel_vec(a: &SpectralVectorField, b: &SpectralVectorField) -> Result<f64> {
    let d = a.sub(b)?.l2_norm();
    let s = b.l2_norm();
    Ok(if s > 0.0 { d / s } else { d })
}

/// Projection, divergence, transform round trip, and the pseudo-spectral
/// product against a direct convolution.
pub fn exp_spectral_selftest(cfg: &ExperimentConfig) -> Result<Outcome> {
    let sc = &cfg.selftest;
    let mut report = Report::new("spectral-selftest", cfg.hash());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let grid = Grid3::new(sc.n, 2.0 * std::f64::consts::PI)?;
    let (mut idem, mut div, mut trip) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..sc.fields {
        let f = random_vector(grid, FAMILIES[i % FAMILIES.len()], &mut rng)?;
        let s = SpectralVectorField::forward(&f);
        let back = s.backward();
        let (mut num, mut den) = (0.0, 0.0);
        for c in 0..3 {
            for (a, b) in f.component(c).iter().zip(back.component(c)) {
                num += (a - b) * (a - b);
                den += a * a;
            }
        }
        trip = trip.max((num / den).sqrt());
        let p = leray_project(&s);
        idem = idem.max(rel_vec(&leray_project(&p), &p)?);
        let d = divergence(&p);
        let dmax = d.coeffs().iter().map(|z| z.norm()).fold(0.0, f64::max);
        let smax = (0..3)
            .flat_map(|c| p.component(c).iter().map(|z| z.norm()))
            .fold(0.0, f64::max);
        div = div.max(dmax / smax.max(f64::MIN_POSITIVE));
    }
    let count = format!("{} fields on {}^3", sc.fields, sc.n);
    report.push(Check::gate("P^2 = P", Some(1), idem <= 1e-14, idem, "<= 1e-14 relative").with_detail(count.clone()));
    report.push(Check::gate("div P f", Some(1), div <= 1e-10, div, "<= 1e-10").with_detail(count.clone()));
    report.push(Check::gate("transform round trip", Some(1), trip <= 1e-12, trip, "<= 1e-12").with_detail(count));

    let mut oracle = 0.0f64;
    for n in [8, 16] {
        let g = Grid3::new(n, 2.0 * std::f64::consts::PI)?;
        for fam in [Family::Normal, Family::Smooth] {
            // the oracle is exact for inputs on retained modes
            let u = dealias(&leray_project(&SpectralVectorField::forward(&random_vector(
                g, fam, &mut rng,
            )?)));
            let v = dealias(&SpectralVectorField::forward(&random_vector(g, fam, &mut rng)?));
            let a = nonlinear_term(&u, &v)?;
            let b = convolution_nonlinear_term(&u, &v)?;
            oracle = oracle.max(rel_vec(&a, &b)?);
        }
    }
    report.push(
        Check::gate(
            "pseudo-spectral vs convolution",
            Some(1),
            oracle <= 1e-10,
            oracle,
            "<= 1e-10",
        )
        .with_detail("8^3 and 16^3"),
    );
    Ok(Outcome {
        report,
        curves: Vec::new(),
    })
}

/// Weak against strong norms, weak Hölder, and the brute-force set search.
pub fn exp_norms_selftest(cfg: &ExperimentConfig) -> Result<Outcome> {
    let sc = &cfg.selftest;
    let mut report = Report::new("norms-selftest", cfg.hash());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let grid = Grid3::new(sc.n, 4.0)?;
    let dv = grid.cell_volume();

    let mut worst = 0.0f64;
    for i in 0..sc.fields {
        let f = random_scalar(grid, FAMILIES[i % FAMILIES.len()], &mut rng);
        for p in [1.5, 2.0, 3.0, 6.0] {
            worst = worst.max(weak_lp_norm(&f, dv, p)? / lp_norm(&f, dv, p)?);
        }
    }
    report.push(
        Check::gate(
            "weak norm below strong norm",
            Some(5),
            worst <= 1.0,
            worst,
            "max ratio <= 1",
        )
        .with_detail(format!("{} fields, p in 1.5, 2, 3, 6", sc.fields)),
    );

    for (p, q, r) in [(3.0, 3.0, 1.5), (6.0, 2.0, 1.5)] {
        let mut ratio = 0.0f64;
        let mut family_worst = "";
        for i in 0..sc.fields {
            let fam = FAMILIES[i % FAMILIES.len()];
            let f = random_scalar(grid, fam, &mut rng);
            let g = random_scalar(grid, fam, &mut rng);
            let fg: Vec<f64> = f.iter().zip(&g).map(|(a, b)| a * b).collect();
            let x = weak_lp_norm(&fg, dv, r)? / (weak_lp_norm(&f, dv, p)? * weak_lp_norm(&g, dv, q)?);
            if x > ratio {
                ratio = x;
                family_worst = match fam {
                    Family::Normal => "normal",
                    Family::LogNormal => "lognormal",
                    Family::Pareto => "pareto",
                    Family::Smooth => "smooth",
                };
            }
        }
        let limit = 1.0 + sc.holder_slack;
        report.push(
            Check::gate(
                format!("weak Holder ({p},{q},{r})"),
                Some(5),
                ratio <= limit,
                ratio,
                format!("<= {limit}"),
            )
            .with_detail(format!("{} pairs, worst family {family_worst}", sc.fields)),
        );
    }

    // brute force over random unions of cells
    let per_field = sc.random_sets.div_ceil(10);
    let mut excess = 0.0f64;
    for i in 0..10 {
        let f = random_scalar(grid, FAMILIES[i % FAMILIES.len()], &mut rng);
        let abs: Vec<f64> = f.iter().map(|v| v.abs()).collect();
        for p in [1.5, 3.0, 6.0] {
            let sorted = weak_lp_norm(&f, dv, p)?;
            let inv_q = 1.0 - 1.0 / p;
            for _ in 0..per_field {
                let density: f64 = rng.random_range(0.0005..1.0);
                let (mut sum, mut count) = (0.0, 0usize);
                for v in &abs {
                    if rng.random_bool(density) {
                        sum += v;
                        count += 1;
                    }
                }
                if count > 0 {
                    let val = sum * dv / (count as f64 * dv).powf(inv_q);
                    excess = excess.max(val / sorted);
                }
            }
        }
    }
    report.push(
        Check::gate(
            "sorted weak norm dominates random sets",
            Some(5),
            excess <= 1.0 + 1e-12,
            excess,
            "max ratio <= 1",
        )
        .with_detail(format!("{} sets per exponent", per_field * 10)),
    );
    Ok(Outcome {
        report,
        curves: Vec::new(),
    })
}

/// Small smooth data on `[0, 2π)³`.
pub fn small_data(grid: Grid3, amplitude: f64) -> SpectralVectorField {
    let f = PhysicalVector::from_fn(grid, |x| {
        let (s, c) = (f64::sin, f64::cos);
        [
            amplitude * (s(x[0]) * c(x[1]) * c(x[2]) + 0.3 * c(x[1] + 0.4)),
            amplitude * (-c(x[0]) * s(x[1]) * c(x[2]) + 0.2 * s(2.0 * x[2])),
            amplitude * 0.25 * s(x[0] + x[1] - 0.1),
        ]
    });
    let mut u = leray_project(&SpectralVectorField::forward(&f));
    u.remove_mean();
    u
}

/// Picard against ETD at two step sizes, with Richardson ratios.
pub fn exp_solver_selftest(cfg: &ExperimentConfig) -> Result<Outcome> {
    let sc = &cfg.selftest;
    let mut report = Report::new("solver-selftest", cfg.hash());
    let grid = Grid3::new(sc.solver_n, 2.0 * std::f64::consts::PI)?;
    let times = graded_time_grid(sc.solver_t_final, sc.solver_nodes, 2.0)?;
    let u0 = small_data(grid, sc.solver_amplitude);
    for kind in [
        ModelKind::NavierStokes,
        ModelKind::Mollified {
            kappa: 2.0 * grid.spacing(),
        },
        ModelKind::Hyperviscous { ell: 4.0 },
    ] {
        let m = Model::new(ModelSpec::new(kind, grid))?;
        let label = kind.label();
        let picard = solve(&m, &u0, &times, Method::Picard)?;
        let etd: Vec<SpectralVectorField> = [1, 2, 4]
            .iter()
            .map(|&k| etd_march_substeps(&u0, &m, &times, k).map(|s| s.last().clone()))
            .collect::<Result<_>>()?;
        let p_last = picard.last();
        let agree = rel_vec(&etd[0], p_last)?.max(rel_vec(&etd[1], p_last)?);
        report.push(
            Check::gate(
                format!("Picard vs ETD {label}"),
                Some(6),
                agree <= sc.solver_agreement,
                agree,
                format!("<= {:e}", sc.solver_agreement),
            )
            .with_detail(format!("{} sweeps", picard.meta.residuals.len())),
        );
        let ratio = etd[0].sub(&etd[1])?.l2_norm() / etd[1].sub(&etd[2])?.l2_norm();
        report.push(Check::gate(
            format!("Richardson ratio {label}"),
            Some(6),
            (ratio - 4.0).abs() <= 0.5,
            ratio,
            "4 +- 0.5",
        ));
    }
    let ns = Model::new(ModelSpec::new(ModelKind::NavierStokes, grid))?;
    let m0 = Model::new(ModelSpec::new(ModelKind::Mollified { kappa: 0.0 }, grid))?;
    let a = solve(&ns, &u0, &times, Method::Etd)?;
    let b = solve(&m0, &u0, &times, Method::Etd)?;
    let d = a.max_l2_distance(&b)? / a.max_l2();
    report.push(Check::gate(
        "mollified kappa=0 equals NS",
        Some(6),
        d <= 1e-12,
        d,
        "<= 1e-12",
    ));
    Ok(Outcome {
        report,
        curves: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families_are_reproducible() {
        let g = Grid3::new(8, 1.0).unwrap();
        for fam in FAMILIES {
            let a = random_scalar(g, fam, &mut ChaCha8Rng::seed_from_u64(3));
            let b = random_scalar(g, fam, &mut ChaCha8Rng::seed_from_u64(3));
            assert_eq!(a, b);
            assert!(a.iter().all(|v| v.is_finite()));
        }
    }
}

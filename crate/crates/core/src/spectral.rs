//! Leray projection, derivatives, dealiasing and the pseudo-spectral
//! quadratic terms `P∇·(u⊗v)` and `P∇·((u*ω_κ)⊗v)`.
//!
//! Odd-order symbols use wavenumbers that vanish on the Nyquist index, so
//! real fields stay real. The projector uses the same wavenumbers, which
//! makes `divergence ∘ leray_project` vanish mode by mode.

use num_complex::Complex64;

use crate::error::Result;
use crate::field::{forward_many, SpectralScalar, SpectralVectorField};
use crate::kernels::mollifier::{MollifierProfile, MollifierSpec};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `(Pf)^(ξ) = f̂(ξ) - ξ (ξ·f̂(ξ)) / |ξ|²`; the zero mode is passed through.
pub fn leray_project(f: &SpectralVectorField) -> SpectralVectorField {
    let mut out = f.clone();
    leray_project_in_place(&mut out);
    out
}

pub fn leray_project_in_place(f: &mut SpectralVectorField) {
    let g = *f.grid();
    let k = g.odd_wavenumbers();
    let n = g.n();
    let coeffs = f.coeffs_mut();
    for c in 0..n {
        for b in 0..n {
            for a in 0..n {
                let xi = [k[a], k[b], k[c]];
                let k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
                if k2 == 0.0 {
                    continue;
                }
                let idx = g.index(a, b, c);
                let dot = (coeffs[0][idx] * xi[0] + coeffs[1][idx] * xi[1] + coeffs[2][idx] * xi[2]) / k2;
                for (comp, x) in coeffs.iter_mut().zip(xi) {
                    comp[idx] -= dot * x;
                }
            }
        }
    }
    f.set_solenoidal(true);
}

/// `(div f)^(ξ) = i ξ·f̂(ξ)`.
pub fn divergence(f: &SpectralVectorField) -> SpectralScalar {
    let g = *f.grid();
    let k = g.odd_wavenumbers();
    let mut out = SpectralScalar::zeros(g);
    let dst = out.coeffs_mut();
    for (idx, d) in dst.iter_mut().enumerate() {
        let (a, b, c) = g.unravel(idx);
        *d = I * (f.component(0)[idx] * k[a] + f.component(1)[idx] * k[b] + f.component(2)[idx] * k[c]);
    }
    out
}

/// `(grad φ)^(ξ) = i ξ φ̂(ξ)`.
pub fn gradient(phi: &SpectralScalar) -> SpectralVectorField {
    let g = *phi.grid();
    let k = g.odd_wavenumbers();
    let mut coeffs = [
        vec![Complex64::default(); g.len()],
        vec![Complex64::default(); g.len()],
        vec![Complex64::default(); g.len()],
    ];
    for (idx, p) in phi.coeffs().iter().enumerate() {
        let (a, b, c) = g.unravel(idx);
        let ip = I * p;
        coeffs[0][idx] = ip * k[a];
        coeffs[1][idx] = ip * k[b];
        coeffs[2][idx] = ip * k[c];
    }
    SpectralVectorField::from_parts(g, coeffs, false)
}

/// Zeroes every mode with `3 max_j |k_j| ≥ n` (the 2/3 rule).
pub fn dealias(f: &SpectralVectorField) -> SpectralVectorField {
    let mut out = f.clone();
    dealias_in_place(&mut out);
    out
}

pub fn dealias_in_place(f: &mut SpectralVectorField) {
    let g = *f.grid();
    for comp in f.coeffs_mut().iter_mut() {
        for (idx, z) in comp.iter_mut().enumerate() {
            if !g.is_retained(idx) {
                *z = Complex64::default();
            }
        }
    }
}

/// `∇·(a⊗b)` with `(a⊗b)_{jk} = a_j b_k`, i.e. component `k` is
/// `Σ_j ∂_j(a_j b_k)`. Products are formed in physical space and the result
/// is dealiased but not projected.
pub fn divergence_of_product(
    a: &SpectralVectorField,
    b: &SpectralVectorField,
    symmetric: bool,
) -> Result<SpectralVectorField> {
    a.same_grid(b)?;
    let g = *a.grid();
    let pa = a.backward();
    let pb = if symmetric { None } else { Some(b.backward()) };
    let left = pa.components();
    let right = pb.as_ref().map(|p| p.components()).unwrap_or(left);

    // (j, k) pairs whose product is transformed
    let pairs: Vec<(usize, usize)> = if symmetric {
        vec![(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]
    } else {
        (0..3).flat_map(|j| (0..3).map(move |k| (j, k))).collect()
    };
    let products: Vec<Vec<f64>> = pairs
        .iter()
        .map(|&(j, k)| left[j].iter().zip(&right[k]).map(|(x, y)| x * y).collect())
        .collect();
    let refs: Vec<&[f64]> = products.iter().map(|p| p.as_slice()).collect();
    let hats = forward_many(&g, &refs);
    let lookup = |j: usize, k: usize| -> &Vec<Complex64> {
        let pos = pairs
            .iter()
            .position(|&p| p == (j, k) || (symmetric && p == (k, j)))
            .expect("pair present");
        &hats[pos]
    };

    let kw = g.odd_wavenumbers();
    let mut coeffs = [
        vec![Complex64::default(); g.len()],
        vec![Complex64::default(); g.len()],
        vec![Complex64::default(); g.len()],
    ];
    let t: Vec<[&Vec<Complex64>; 3]> = (0..3).map(|k| [lookup(0, k), lookup(1, k), lookup(2, k)]).collect();
    for idx in 0..g.len() {
        if !g.is_retained(idx) {
            continue;
        }
        let (x, y, z) = g.unravel(idx);
        let xi = [kw[x], kw[y], kw[z]];
        for k in 0..3 {
            let s = t[k][0][idx] * xi[0] + t[k][1][idx] * xi[1] + t[k][2][idx] * xi[2];
            coeffs[k][idx] = I * s;
        }
    }
    Ok(SpectralVectorField::from_parts(g, coeffs, false))
}

/// `P∇·(u⊗v)`, dealiased and solenoidal.
pub fn nonlinear_term(u: &SpectralVectorField, v: &SpectralVectorField) -> Result<SpectralVectorField> {
    let symmetric = std::ptr::eq(u, v) || u == v;
    let mut out = divergence_of_product(u, v, symmetric)?;
    leray_project_in_place(&mut out);
    Ok(out)
}

/// `P∇·((u*ω_κ)⊗v)` with the default bump profile.
pub fn mollified_nonlinear_term(
    u: &SpectralVectorField,
    v: &SpectralVectorField,
    kappa: f64,
) -> Result<SpectralVectorField> {
    let spec = MollifierSpec::new(*u.grid(), kappa, MollifierProfile::default())?;
    mollified_nonlinear_term_with(u, v, &spec)
}

pub fn mollified_nonlinear_term_with(
    u: &SpectralVectorField,
    v: &SpectralVectorField,
    mollifier: &MollifierSpec,
) -> Result<SpectralVectorField> {
    if mollifier.kappa() == 0.0 {
        return nonlinear_term(u, v);
    }
    let smoothed = mollifier.multiplier().apply(u)?;
    let mut out = divergence_of_product(&smoothed, v, false)?;
    leray_project_in_place(&mut out);
    Ok(out)
}

/// `P∇·(u⊗v)` by direct convolution of the retained coefficients, without
/// any transform. Exact for inputs supported on retained modes, where it
/// must agree with [`nonlinear_term`]; cost is quadratic in the mode count.
pub fn convolution_nonlinear_term(u: &SpectralVectorField, v: &SpectralVectorField) -> Result<SpectralVectorField> {
    u.same_grid(v)?;
    let g = *u.grid();
    let n = g.n() as i64;
    let modes: Vec<usize> = (0..g.len()).filter(|&i| g.is_retained(i)).collect();
    let freq = |idx: usize| {
        let (a, b, c) = g.unravel(idx);
        [g.freq(a), g.freq(b), g.freq(c)]
    };
    let index_of = |f: [i64; 3]| -> usize {
        let w = |k: i64| k.rem_euclid(n) as usize;
        g.index(w(f[0]), w(f[1]), w(f[2]))
    };
    let cut = g.dealias_cutoff();
    // t[j][k] = (u_j v_k)^ on retained modes
    let mut t = vec![vec![vec![Complex64::default(); g.len()]; 3]; 3];
    for &p in &modes {
        let fp = freq(p);
        for &q in &modes {
            let fq = freq(q);
            let f = [fp[0] + fq[0], fp[1] + fq[1], fp[2] + fq[2]];
            if f.iter().any(|k| k.abs() > cut) {
                continue;
            }
            let out = index_of(f);
            for j in 0..3 {
                let a = u.component(j)[p];
                for k in 0..3 {
                    t[j][k][out] += a * v.component(k)[q];
                }
            }
        }
    }
    let kw = g.odd_wavenumbers();
    let mut coeffs = [
        vec![Complex64::default(); g.len()],
        vec![Complex64::default(); g.len()],
        vec![Complex64::default(); g.len()],
    ];
    for &idx in &modes {
        let (x, y, z) = g.unravel(idx);
        let xi = [kw[x], kw[y], kw[z]];
        for k in 0..3 {
            coeffs[k][idx] = I * (t[0][k][idx] * xi[0] + t[1][k][idx] * xi[1] + t[2][k][idx] * xi[2]);
        }
    }
    let mut out = SpectralVectorField::from_parts(g, coeffs, false);
    leray_project_in_place(&mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PhysicalScalar, PhysicalVector};
    use crate::grid::Grid3;
    use std::f64::consts::PI;

    fn rel_diff(a: &SpectralVectorField, b: &SpectralVectorField) -> f64 {
        a.sub(b).unwrap().l2_norm() / b.l2_norm().max(1e-300)
    }

    fn wavy(g: Grid3) -> SpectralVectorField {
        let l = g.length();
        let w = 2.0 * PI / l;
        SpectralVectorField::forward(&PhysicalVector::from_fn(g, |x| {
            [
                (w * x[1]).sin() + 0.3 * (2.0 * w * x[2]).cos(),
                (w * x[0]).cos() * (w * x[2]).sin(),
                (3.0 * w * x[0]).sin() + (w * (x[0] + x[1])).cos(),
            ]
        }))
    }

    #[test]
    fn projector_annihilates_gradients() {
        let g = Grid3::new(16, 3.0).unwrap();
        let l = g.length();
        let phi = SpectralScalar::forward(&PhysicalScalar::from_fn(g, |x| {
            (2.0 * PI * x[0] / l).cos() * (4.0 * PI * x[1] / l).sin() + (2.0 * PI * x[2] / l).sin()
        }));
        let p = leray_project(&gradient(&phi));
        assert!(p.l2_norm() < 1e-13);
    }

    #[test]
    fn projector_is_idempotent_and_orthogonal() {
        let g = Grid3::new(16, 2.0).unwrap();
        let f = wavy(g);
        let p = leray_project(&f);
        let pp = leray_project(&p);
        for c in 0..3 {
            for (a, b) in p.component(c).iter().zip(pp.component(c)) {
                assert!((a - b).norm() <= 1e-14 * (1.0 + a.norm()));
            }
        }
        let rest = f.sub(&p).unwrap();
        assert!(p.inner(&rest).unwrap().abs() <= 1e-10 * f.energy());
        assert!(divergence(&p).coeffs().iter().all(|z| z.norm() < 1e-12));
        assert!(p.divergence_defect() <= crate::field::EPS_DIV);
    }

    #[test]
    fn shear_mode_is_already_solenoidal() {
        let g = Grid3::new(16, 6.0).unwrap();
        let l = g.length();
        let f = SpectralVectorField::forward(&PhysicalVector::from_fn(g, |x| [(2.0 * PI * x[1] / l).sin(), 0.0, 0.0]));
        let p = leray_project(&f);
        assert!(rel_diff(&p, &f) < 1e-15);
    }

    #[test]
    fn divergence_of_gradient_is_laplacian() {
        let g = Grid3::new(16, 2.0 * PI).unwrap();
        let phi = SpectralScalar::forward(&PhysicalScalar::from_fn(g, |x| {
            (x[0]).sin() * (2.0 * x[1]).cos() + (3.0 * x[2]).cos()
        }));
        let lap = divergence(&gradient(&phi));
        let xi2 = g.xi_sq();
        for idx in 0..g.len() {
            let expect = -phi.coeffs()[idx] * xi2[idx];
            assert!((lap.coeffs()[idx] - expect).norm() < 1e-13);
        }
    }

    #[test]
    fn gradient_of_cosine() {
        let g = Grid3::new(16, 5.0).unwrap();
        let w = 2.0 * PI / g.length();
        let phi = SpectralScalar::forward(&PhysicalScalar::from_fn(g, |x| (w * x[0]).cos()));
        let grad = gradient(&phi).backward();
        let xs = g.centered_coords();
        for idx in 0..g.len() {
            let (i, _, _) = g.unravel(idx);
            assert!((grad.component(0)[idx] + w * (w * xs[i]).sin()).abs() < 1e-13);
            assert!(grad.component(1)[idx].abs() < 1e-13);
            assert!(grad.component(2)[idx].abs() < 1e-13);
        }
    }

    #[test]
    fn dealias_behaviour() {
        let g = Grid3::new(16, 1.0).unwrap();
        let f = wavy(g);
        assert!(dealias(&f).sub(&f).unwrap().l2_norm() < 1e-15);
        let mut nyq = SpectralVectorField::zeros(g);
        nyq.coeffs_mut()[1][g.index(8, 0, 0)] = Complex64::new(1.0, 0.0);
        assert_eq!(dealias(&nyq).l2_norm(), 0.0);
        let mut noisy = f.clone();
        noisy.coeffs_mut()[0][g.index(7, 2, 0)] = Complex64::new(0.5, 0.1);
        assert!(dealias(&noisy).energy() <= noisy.energy());
    }

    #[test]
    fn nonlinear_trivial_cases() {
        let g = Grid3::new(16, 1.0).unwrap();
        let v = leray_project(&wavy(g));
        let zero = SpectralVectorField::zeros(g);
        assert_eq!(nonlinear_term(&zero, &v).unwrap().l2_norm(), 0.0);
        let c = SpectralVectorField::forward(&PhysicalVector::from_fn(g, |_| [1.0, 2.0, 3.0]));
        let d = SpectralVectorField::forward(&PhysicalVector::from_fn(g, |_| [-1.0, 0.5, 0.0]));
        assert!(nonlinear_term(&c, &d).unwrap().l2_norm() < 1e-14);
        let other = SpectralVectorField::zeros(Grid3::new(8, 1.0).unwrap());
        assert!(nonlinear_term(&v, &other).is_err());
        assert!(nonlinear_term(&v, &v).unwrap().is_solenoidal());
    }

    #[test]
    fn mollified_with_zero_width_is_plain() {
        let g = Grid3::new(16, 2.0).unwrap();
        let u = leray_project(&wavy(g));
        let a = nonlinear_term(&u, &u).unwrap();
        let b = mollified_nonlinear_term(&u, &u, 0.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mollifying_a_constant_changes_nothing() {
        let g = Grid3::new(16, 4.0).unwrap();
        let c = SpectralVectorField::forward(&PhysicalVector::from_fn(g, |_| [0.7, -0.2, 1.1]));
        let v = leray_project(&wavy(g));
        let plain = nonlinear_term(&c, &v).unwrap();
        let moll = mollified_nonlinear_term(&c, &v, 0.5).unwrap();
        assert!(rel_diff(&moll, &plain) < 1e-13);
    }

    #[test]
    fn pseudo_spectral_matches_direct_convolution() {
        for n in [8, 16] {
            let g = Grid3::new(n, 2.0 * PI).unwrap();
            let u = dealias(&leray_project(&wavy(g)));
            let v = dealias(&SpectralVectorField::forward(&PhysicalVector::from_fn(g, |x| {
                [
                    x[1].cos() * (2.0 * x[2]).sin(),
                    (x[0] + x[2]).sin(),
                    (x[0] - x[1]).cos(),
                ]
            })));
            let fast = nonlinear_term(&u, &v).unwrap();
            let slow = convolution_nonlinear_term(&u, &v).unwrap();
            assert!(rel_diff(&fast, &slow) < 1e-12, "{n}: {}", rel_diff(&fast, &slow));
        }
    }
}

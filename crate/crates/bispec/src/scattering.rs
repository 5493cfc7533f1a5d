//! Isozaki scattering function from DtN data, its Born-side counterpart
//! (radial Fourier volume term plus the V-independent boundary correction),
//! and the free-resolvent kernel checks.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dtn::{analytic_dtn_v0, ZERO_MAT};
use crate::eig::SpectralDataset;
use crate::error::{Error, Result};
use crate::radial::RadialPotential;
use crate::specfun::{gauss_legendre, pair_on_sphere, plane_wave_normal_trace, plane_wave_trace, BoundaryField};

type C = Complex64;

/// Parenthesization of the -sqrt(lambda) prefactor in the definition of S.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Grouping {
    /// S = -sqrt(lambda) * (I1 + I2)
    SqrtLambdaOnBoth,
    /// S = -sqrt(lambda) * I1 + I2
    SqrtLambdaOnFirstOnly,
}

#[derive(Debug, Clone)]
pub struct ScatteringSample {
    pub omega: [f64; 3],
    pub theta: [f64; 3],
    pub zeta: f64,
    pub lambda: C,
    pub kappa: C,
    pub s: C,
    pub grouping: Grouping,
}

/// Principal fourth root with Im >= 0; exact zeta + i for lambda = (zeta+i)^4.
pub fn fourth_root(lambda: C) -> Result<C> {
    if lambda.im == 0.0 && lambda.re <= 0.0 {
        return Err(Error::BranchCut);
    }
    let (mag, arg) = lambda.to_polar();
    let mut k = C::from_polar(mag.powf(0.25), arg / 4.0);
    if k.im < 0.0 {
        k *= C::i();
    }
    Ok(k)
}

fn neg(v: [f64; 3]) -> [f64; 3] {
    [-v[0], -v[1], -v[2]]
}

fn combine(i1: C, i2: C, sqrt_lambda: C, grouping: Grouping) -> C {
    match grouping {
        Grouping::SqrtLambdaOnBoth => -sqrt_lambda * (i1 + i2),
        Grouping::SqrtLambdaOnFirstOnly => -sqrt_lambda * i1 + i2,
    }
}

/// The two surface pairings (I1, I2) of the V = 0 scattering function,
/// computed from the analytic DtN blocks: boundary data f = plane-wave
/// trace, g = -sqrt(lambda) f (since Delta phi_omega = -kappa^2 phi_omega),
/// integrated against phi_{-theta}.
pub fn scattering_parts_analytic_v0(
    kappa: C,
    omega: [f64; 3],
    theta: [f64; 3],
    radius: f64,
    lmax: usize,
    tail_tol: f64,
) -> Result<(C, C)> {
    let lambda = kappa * kappa * kappa * kappa;
    let sqrt_lambda = kappa * kappa;
    let f = plane_wave_trace(kappa, omega, radius, lmax, tail_tol)?;
    let psi = plane_wave_trace(kappa, neg(theta), radius, lmax, tail_tol)?;
    let mut p = BoundaryField::zero(radius, lmax);
    let mut q = BoundaryField::zero(radius, lmax);
    for l in 0..=lmax {
        let m = analytic_dtn_v0(lambda, l, radius)?;
        for mm in -(l as i64)..=(l as i64) {
            let fc = f.get(l, mm);
            let gc = -sqrt_lambda * fc;
            p.set(l, mm, -m[0][1] * fc + m[0][0] * gc);
            q.set(l, mm, m[1][1] * fc - m[0][1] * gc);
        }
    }
    Ok((pair_on_sphere(&p, &psi), pair_on_sphere(&q, &psi)))
}

/// The (I1, I2) difference between two datasets, with the series summed
/// termwise over the common (l, q) channel modes so that the individually
/// divergent jOrder = 0 tails cancel exactly.
pub fn scattering_parts_delta(
    ds1: &SpectralDataset,
    ds2: &SpectralDataset,
    kappa: C,
    omega: [f64; 3],
    theta: [f64; 3],
    lmax: usize,
    tail_tol: f64,
) -> Result<(C, C)> {
    ds1.compatible_with(ds2)?;
    let radius = ds1.radius;
    let lambda = kappa * kappa * kappa * kappa;
    let sqrt_lambda = kappa * kappa;
    let f = plane_wave_trace(kappa, omega, radius, lmax, tail_tol)?;
    let psi = plane_wave_trace(kappa, neg(theta), radius, lmax, tail_tol)?;
    let top = lmax.min(ds1.lmax);
    let mut p = BoundaryField::zero(radius, lmax);
    let mut q = BoundaryField::zero(radius, lmax);
    for l in 0..=top {
        let c1 = ds1.channel(l);
        let c2 = ds2.channel(l);
        let nq = c1.len().min(c2.len());
        let mut d = ZERO_MAT;
        for qi in 0..nq {
            let (m1, m2) = (&c1[qi], &c2[qi]);
            debug_assert_eq!(m1.q, m2.q);
            let f1 = 1.0 / (C::new(m1.lambda, 0.0) - lambda);
            let f2 = 1.0 / (C::new(m2.lambda, 0.0) - lambda);
            d[0][0] += f1 * m1.a * m1.a - f2 * m2.a * m2.a;
            d[0][1] += f1 * m1.a * m1.b - f2 * m2.a * m2.b;
            d[1][1] += f1 * m1.b * m1.b - f2 * m2.b * m2.b;
        }
        for mm in -(l as i64)..=(l as i64) {
            let fc = f.get(l, mm);
            let gc = -sqrt_lambda * fc;
            p.set(l, mm, -d[0][1] * fc + d[0][0] * gc);
            q.set(l, mm, d[1][1] * fc - d[0][1] * gc);
        }
    }
    Ok((pair_on_sphere(&p, &psi), pair_on_sphere(&q, &psi)))
}

/// Scattering function of the dataset `ds`, renormalized against a V = 0
/// reference dataset `ds0` on the same grid: S = S_analytic(V=0) + the
/// termwise series difference. The raw jOrder = 0 series does not converge
/// entrywise, the paired difference does.
#[allow(clippy::too_many_arguments)]
pub fn scattering_from_dtn(
    ds: &SpectralDataset,
    ds0: &SpectralDataset,
    zeta: f64,
    omega: [f64; 3],
    theta: [f64; 3],
    lmax: usize,
    grouping: Grouping,
    tail_tol: f64,
) -> Result<ScatteringSample> {
    if zeta < 1.0 {
        return Err(Error::Precondition(format!("scattering_from_dtn: zeta = {zeta} < 1")));
    }
    let kappa = C::new(zeta, 1.0);
    let lambda = kappa * kappa * kappa * kappa;
    let sqrt_lambda = kappa * kappa;
    let (a1, a2) = scattering_parts_analytic_v0(kappa, omega, theta, ds.radius, lmax, tail_tol)?;
    let (d1, d2) = scattering_parts_delta(ds, ds0, kappa, omega, theta, lmax, tail_tol)?;
    let s = combine(a1 + d1, a2 + d2, sqrt_lambda, grouping);
    Ok(ScatteringSample { omega, theta, zeta, lambda, kappa, s, grouping })
}

/// S1 - S2 for two datasets; the V = 0 renormalization cancels exactly.
#[allow(clippy::too_many_arguments)]
pub fn s_difference(
    ds1: &SpectralDataset,
    ds2: &SpectralDataset,
    zeta: f64,
    omega: [f64; 3],
    theta: [f64; 3],
    lmax: usize,
    grouping: Grouping,
    tail_tol: f64,
) -> Result<C> {
    let kappa = C::new(zeta, 1.0);
    let sqrt_lambda = kappa * kappa;
    let (d1, d2) = scattering_parts_delta(ds1, ds2, kappa, omega, theta, lmax, tail_tol)?;
    Ok(combine(d1, d2, sqrt_lambda, grouping))
}

/// Volume Born term: the Fourier transform of the radial potential at the
/// (possibly complex) frequency p, Vhat(p) = 4 pi int_0^R V(r) r sin(wr)/w dr
/// with w = sqrt(p . p).
pub fn born_volume_term(v: &RadialPotential, radius: f64, p: [C; 3]) -> C {
    let w = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    let (nodes, weights) = gauss_legendre(256).expect("fixed-size rule");
    let mut acc = C::new(0.0, 0.0);
    for (x, wt) in nodes.iter().zip(&weights) {
        let r = radius * (x + 1.0) / 2.0;
        let sinc = if w.norm() * r < 1e-8 {
            C::new(r, 0.0) // sin(wr)/w -> r
        } else {
            (w * r).sin() / w
        };
        acc += v.eval(r, radius) * r * sinc * *wt;
    }
    4.0 * std::f64::consts::PI * acc * radius / 2.0
}

/// The V-independent boundary term -2 sqrt(lambda) int phi_omega
/// d_nu(phi_{-theta}) ds over the sphere of radius R.
pub fn boundary_correction(kappa: C, omega: [f64; 3], theta: [f64; 3], radius: f64, lmax: usize, tail_tol: f64) -> Result<C> {
    let f = plane_wave_trace(kappa, omega, radius, lmax, tail_tol)?;
    let dn = plane_wave_normal_trace(kappa, neg(theta), radius, lmax)?;
    Ok(-2.0 * kappa * kappa * pair_on_sphere(&f, &dn))
}

/// Free-resolvent kernel of Delta^2 - lambda in n = 3: the difference of
/// Helmholtz kernels (1/(2 sqrt(lambda))) (e^{i k+ s} - e^{i k- s})/(4 pi s)
/// with k+- the upper-half-plane square roots of +-sqrt(lambda).
pub fn free_resolvent_kernel(lambda: C, s: f64) -> Result<C> {
    if lambda.im == 0.0 && lambda.re <= 0.0 {
        return Err(Error::BranchCut);
    }
    if s <= 0.0 {
        return Err(Error::Precondition(format!("free_resolvent_kernel: s = {s} <= 0")));
    }
    let sqrt_lambda = lambda.sqrt();
    let upper = |z: C| -> C {
        let r = z.sqrt();
        if r.im < 0.0 {
            -r
        } else {
            r
        }
    };
    let kp = upper(sqrt_lambda);
    let km = upper(-sqrt_lambda);
    let helm = ((C::i() * kp * s).exp() - (C::i() * km * s).exp()) / (4.0 * std::f64::consts::PI * s);
    Ok(helm / (2.0 * sqrt_lambda))
}

/// Resonance-free region parameters of the resolvent bound.
#[derive(Debug, Clone, Copy)]
pub struct ResonanceRegionParams {
    pub a: f64,
    pub c0: f64,
    pub delta_slope: f64,
}

impl ResonanceRegionParams {
    pub fn defaults(radius: f64) -> Self {
        ResonanceRegionParams { a: 1.0, c0: 2.0, delta_slope: 0.9 / (2.0 * radius) }
    }
}

/// Membership in Omega_delta: Im and Re of the fourth root both above
/// -A - delta log(1 + |lambda|^{1/4}), and |lambda|^{1/4} >= C0.
pub fn in_omega_delta(lambda: C, params: &ResonanceRegionParams, radius: f64) -> Result<bool> {
    if params.delta_slope <= 0.0 || params.delta_slope * 2.0 * radius >= 1.0 {
        return Err(Error::Precondition(format!(
            "in_omega_delta: delta = {} outside (0, 1/(2R))",
            params.delta_slope
        )));
    }
    let k = fourth_root(lambda)?;
    let floor = -params.a - params.delta_slope * (1.0 + k.norm()).ln();
    Ok(k.im >= floor && k.re >= floor && k.norm() >= params.c0)
}

/// |S_dtn - (-Vhat + boundary correction)|: the Isozaki identity residual
/// with the quadratically small resolvent term dropped. Green's identity
/// gives S = -Vhat(-kappa(omega - theta)) - int R_V(-V phi) V psi
/// - 2 sqrt(lambda) int phi_omega d_nu(phi_{-theta}) exactly, and
/// boundary_correction returns the last term with its sign.
#[allow(clippy::too_many_arguments)]
pub fn isozaki_identity_check(
    ds: &SpectralDataset,
    ds0: &SpectralDataset,
    v: &RadialPotential,
    zeta: f64,
    omega: [f64; 3],
    theta: [f64; 3],
    lmax: usize,
    grouping: Grouping,
    tail_tol: f64,
) -> Result<f64> {
    Ok(isozaki_identity_residual(ds, ds0, v, zeta, omega, theta, lmax, grouping, tail_tol)?.norm())
}

/// The complex identity residual S + Vhat - bc; its linear-in-V part is the
/// series truncation floor, its quadratic part the dropped resolvent term.
#[allow(clippy::too_many_arguments)]
pub fn isozaki_identity_residual(
    ds: &SpectralDataset,
    ds0: &SpectralDataset,
    v: &RadialPotential,
    zeta: f64,
    omega: [f64; 3],
    theta: [f64; 3],
    lmax: usize,
    grouping: Grouping,
    tail_tol: f64,
) -> Result<C> {
    if v.sup_bound > 0.2 {
        return Err(Error::Precondition(format!("isozaki_identity_check: ||V|| = {} > 0.2", v.sup_bound)));
    }
    if zeta < 10.0 {
        return Err(Error::Precondition(format!("isozaki_identity_check: zeta = {zeta} < 10")));
    }
    let sample = scattering_from_dtn(ds, ds0, zeta, omega, theta, lmax, grouping, tail_tol)?;
    let kappa = sample.kappa;
    // exp(i kappa (omega - theta) . x) = Vhat at p = -kappa (omega - theta)
    let p = [
        -kappa * (omega[0] - theta[0]),
        -kappa * (omega[1] - theta[1]),
        -kappa * (omega[2] - theta[2]),
    ];
    let born = born_volume_term(v, ds.radius, p);
    let bc = boundary_correction(kappa, omega, theta, ds.radius, lmax, tail_tol)?;
    Ok(sample.s + born - bc)
}

/// Decide the -sqrt(lambda) parenthesization by evaluating both groupings
/// against the Born side; the winner's residual must be an order of
/// magnitude smaller.
#[allow(clippy::too_many_arguments)]
pub fn calibrate_grouping(
    ds: &SpectralDataset,
    ds0: &SpectralDataset,
    v: &RadialPotential,
    zeta: f64,
    omega: [f64; 3],
    theta: [f64; 3],
    lmax: usize,
    tail_tol: f64,
) -> Result<Grouping> {
    if v.sup_bound == 0.0 {
        return Err(Error::Precondition("calibrate_grouping: V = 0 satisfies both groupings".into()));
    }
    if v.sup_bound > 0.1 {
        return Err(Error::Precondition(format!("calibrate_grouping: ||V|| = {} > 0.1", v.sup_bound)));
    }
    let r_first = isozaki_identity_check(ds, ds0, v, zeta, omega, theta, lmax, Grouping::SqrtLambdaOnFirstOnly, tail_tol)?;
    let r_both = isozaki_identity_check(ds, ds0, v, zeta, omega, theta, lmax, Grouping::SqrtLambdaOnBoth, tail_tol)?;
    if r_first < 0.1 * r_both {
        Ok(Grouping::SqrtLambdaOnFirstOnly)
    } else if r_both < 0.1 * r_first {
        Ok(Grouping::SqrtLambdaOnBoth)
    } else {
        Err(Error::CalibrationFailed { both: r_both, first_only: r_first })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eig::build_dataset;
    use crate::radial::{build_grid, RadialPotential};
    use crate::specfun::sphere_quadrature;
    use crate::weyl::linear_fit_slope;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    const LMAX: usize = 30;
    const TAIL: f64 = 1e-6;

    fn dataset(amp: f64) -> SpectralDataset {
        let grid = build_grid(1.0, 200).unwrap();
        let v = if amp == 0.0 {
            RadialPotential::zero(&grid)
        } else {
            RadialPotential::gaussian_bump(&grid, amp, 0.5, 0.2)
        };
        build_dataset(&v, &grid, LMAX, 12).unwrap()
    }

    #[test]
    fn fourth_root_examples() {
        assert!((fourth_root(c(16.0, 0.0)).unwrap() - c(2.0, 0.0)).norm() < 1e-14);
        let z = c(3.0, 1.0);
        let l = z * z * z * z;
        assert!((fourth_root(l).unwrap() - z).norm() < 1e-12);
        let r = fourth_root(c(0.0, 1.0)).unwrap();
        assert!((r - C::from_polar(1.0, std::f64::consts::PI / 8.0)).norm() < 1e-14);
        assert!((r.norm() - 1.0).abs() < 1e-14);
        assert!(matches!(fourth_root(c(-1.0, 0.0)), Err(Error::BranchCut)));
    }

    #[test]
    fn resolvent_kernel_properties() {
        // s * kernel -> 0 as s -> 0 (leading 1/s singularities cancel)
        let lam = c(50.0, 0.0);
        let k4 = free_resolvent_kernel(lam, 1e-4).unwrap();
        let k6 = free_resolvent_kernel(lam, 1e-6).unwrap();
        assert!((1e-6 * k6.norm()) < 1e-4 * k4.norm());
        assert!(1e-6 * k6.norm() < 1e-4);
        // |kernel| at s = 1 decays like |lambda|^{-1/2}
        let lams = [1e2, 1e3, 1e4, 1e5];
        let xs: Vec<f64> = lams.iter().map(|l: &f64| l.ln()).collect();
        let ys: Vec<f64> = lams
            .iter()
            .map(|&l| free_resolvent_kernel(c(l, 0.0), 1.0).unwrap().norm().ln())
            .collect();
        let slope = linear_fit_slope(&xs, &ys);
        assert!((slope + 0.5).abs() < 0.05, "slope {slope}");
        assert!(free_resolvent_kernel(c(-3.0, 0.0), 1.0).is_err());
        // first-quadrant fourth roots are always inside Omega_delta
        let params = ResonanceRegionParams::defaults(1.0);
        for zeta in [2.0f64, 10.0, 40.0] {
            let lam = c(zeta, 1.0).powu(4);
            assert!(in_omega_delta(lam, &params, 1.0).unwrap());
        }
        assert!(!in_omega_delta(c(1.0, 0.1), &params, 1.0).unwrap()); // |lambda|^{1/4} < C0
    }

    #[test]
    fn born_term_against_oracles() {
        let grid = build_grid(1.0, 400).unwrap();
        let v = RadialPotential::gaussian_bump(&grid, 0.1, 0.5, 0.2);
        let zero = RadialPotential::zero(&grid);
        assert_eq!(born_volume_term(&zero, 1.0, [c(0.0, 0.0); 3]), c(0.0, 0.0));
        // p = 0 against a seeded Monte Carlo ball integral
        let got0 = born_volume_term(&v, 1.0, [c(0.0, 0.0); 3]);
        let mut state = 0x243f6a8885a308d3u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        let mut mc = 0.0;
        let npts = 400_000;
        let mut inside = 0usize;
        for _ in 0..npts {
            let (x, y, z) = (next(), next(), next());
            let r2 = x * x + y * y + z * z;
            if r2 <= 1.0 {
                inside += 1;
                mc += v.eval(r2.sqrt(), 1.0);
            }
        }
        // cube volume 8, ball fraction from the same sample
        let _ = inside;
        let mc = mc * 8.0 / npts as f64;
        assert!((got0.re - mc).abs() < 0.01 * got0.re.abs(), "{got0} vs {mc}");
        assert!(got0.im.abs() < 1e-12);
        // real p against a direct 2D (r, polar) quadrature
        let p = [c(1.3, 0.0), c(-0.4, 0.0), c(2.0, 0.0)];
        let got = born_volume_term(&v, 1.0, p);
        let pn = (1.3f64 * 1.3 + 0.16 + 4.0).sqrt();
        let (rn, rw) = gauss_legendre(200).unwrap();
        let (tn, tw) = gauss_legendre(100).unwrap();
        let mut direct = c(0.0, 0.0);
        for (x, wr) in rn.iter().zip(&rw) {
            let r = (x + 1.0) / 2.0;
            for (ct, wt) in tn.iter().zip(&tw) {
                // int e^{-i p.x} over the sphere of radius r = 2 pi int_{-1}^{1} e^{-i |p| r t} dt
                direct += v.eval(r, 1.0) * r * r * (c(0.0, -pn * r * ct)).exp() * *wr * *wt;
            }
        }
        direct *= 2.0 * std::f64::consts::PI / 2.0; // dr jacobian 1/2, dtheta weight direct
        assert!((got - direct).norm() < 1e-6 * got.norm().max(1.0), "{got} vs {direct}");
    }

    #[test]
    fn boundary_correction_against_quadrature() {
        let kappa = c(3.0, 0.0);
        let quad = sphere_quadrature(40).unwrap();
        let direct = |omega: [f64; 3], theta: [f64; 3]| {
            quad.integrate(|x| {
                let dot_o = omega[0] * x[0] + omega[1] * x[1] + omega[2] * x[2];
                let dot_t = -(theta[0] * x[0] + theta[1] * x[1] + theta[2] * x[2]);
                let phi_o = (C::i() * kappa * dot_o).exp();
                let dn_phi = C::i() * kappa * dot_t * (C::i() * kappa * dot_t).exp();
                phi_o * dn_phi
            }) * -2.0 * kappa * kappa
        };
        // omega = theta: the integrand is odd, both sides vanish
        let eq = [0.0, 0.6, 0.8];
        let got_eq = boundary_correction(kappa, eq, eq, 1.0, 24, 1e-10).unwrap();
        assert!(got_eq.norm() < 1e-10 && direct(eq, eq).norm() < 1e-10);
        // generic directions
        let omega = [0.0, 0.6, 0.8];
        let theta = [0.48, -0.64, 0.6];
        let got = boundary_correction(kappa, omega, theta, 1.0, 24, 1e-10).unwrap();
        let expect = direct(omega, theta);
        assert!((got - expect).norm() < 1e-8 * expect.norm(), "{got} vs {expect}");
    }

    #[test]
    fn v0_identity_exact_for_first_only_grouping() {
        let ds0 = dataset(0.0);
        let omega = [0.6, 0.0, 0.8];
        let theta = [0.0, 0.6, 0.8];
        let zeta = 10.0;
        let s = scattering_from_dtn(&ds0, &ds0, zeta, omega, theta, LMAX, Grouping::SqrtLambdaOnFirstOnly, TAIL)
            .unwrap();
        let bc = boundary_correction(s.kappa, omega, theta, 1.0, LMAX, TAIL).unwrap();
        // V = 0 kills the volume terms: S equals the boundary term exactly
        assert!((s.s - bc).norm() < 1e-6 * bc.norm().max(1.0), "residual {}", (s.s - bc).norm());
        // the other grouping misses by O(1) relative to the boundary term
        let sb = scattering_from_dtn(&ds0, &ds0, zeta, omega, theta, LMAX, Grouping::SqrtLambdaOnBoth, TAIL).unwrap();
        assert!((sb.s - bc).norm() > 1e-2 * bc.norm());
    }

    #[test]
    fn identity_and_calibration_with_bump() {
        let ds0 = dataset(0.0);
        let ds = dataset(0.05);
        let grid = build_grid(1.0, 200).unwrap();
        let v = RadialPotential::gaussian_bump(&grid, 0.05, 0.5, 0.2);
        let omega = [0.6, 0.0, 0.8];
        let theta = [0.0, -0.6, 0.8];
        let g = calibrate_grouping(&ds, &ds0, &v, 10.0, omega, theta, LMAX, TAIL).unwrap();
        assert_eq!(g, Grouping::SqrtLambdaOnFirstOnly);
        let r = isozaki_identity_check(&ds, &ds0, &v, 10.0, omega, theta, LMAX, g, TAIL).unwrap();
        let r_bad =
            isozaki_identity_check(&ds, &ds0, &v, 10.0, omega, theta, LMAX, Grouping::SqrtLambdaOnBoth, TAIL).unwrap();
        assert!(r < 0.1 * r_bad, "winner {r} vs loser {r_bad}");
        // calibration preconditions
        let vz = RadialPotential::zero(&grid);
        assert!(calibrate_grouping(&ds0, &ds0, &vz, 10.0, omega, theta, LMAX, TAIL).is_err());
    }

    #[test]
    fn difference_is_zero_for_identical_datasets() {
        let ds = dataset(0.1);
        let s = s_difference(&ds, &ds, 10.0, [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], LMAX, Grouping::SqrtLambdaOnFirstOnly, TAIL)
            .unwrap();
        assert_eq!(s, c(0.0, 0.0));
    }

    #[test]
    fn reciprocity_of_the_difference() {
        // (omega, theta) -> (-theta, -omega) leaves S1 - S2 unchanged for
        // real potentials
        let ds0 = dataset(0.0);
        let ds = dataset(0.1);
        let omega = [0.48, 0.6, 0.64];
        let theta = [-0.6, 0.64, 0.48];
        let s1 = s_difference(&ds, &ds0, 10.0, omega, theta, LMAX, Grouping::SqrtLambdaOnFirstOnly, TAIL).unwrap();
        let s2 = s_difference(&ds, &ds0, 10.0, neg(theta), neg(omega), LMAX, Grouping::SqrtLambdaOnFirstOnly, TAIL)
            .unwrap();
        assert!((s1 - s2).norm() < 1e-8 * s1.norm().max(1e-12), "{s1} vs {s2}");
    }
}

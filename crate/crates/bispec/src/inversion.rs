//! Inverse pipeline: Isozaki geometry, Born sampling of Fourier differences
//! of the potentials, low-pass reconstruction of V1 - V2, spectral-data
//! discrepancies and the empirical Hoelder-stability sweep.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eig::{build_dataset, SpectralDataset};
use crate::error::{Error, Result};
use crate::radial::{PotentialDescriptor, RadialGrid, RadialPotential};
use crate::scattering::{s_difference, Grouping};
use crate::specfun::gauss_legendre;
use crate::weyl::{linear_fit_slope, trace_bound_check, weyl_fit};

type C = Complex64;

/// Probing geometry of the Isozaki construction: theta = c eta + xi/(2 zeta),
/// omega = c eta - xi/(2 zeta), with eta a unit vector orthogonal to xi and c
/// chosen so that both probe directions are unit.
#[derive(Debug, Clone)]
pub struct IsozakiGeometry {
    pub xi: [f64; 3],
    pub eta: [f64; 3],
    pub zeta: f64,
    pub c: f64,
    pub omega: [f64; 3],
    pub theta: [f64; 3],
    pub lambda: C,
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn isozaki_geometry(xi: [f64; 3], zeta: f64, eta_seed: Option<[f64; 3]>) -> Result<IsozakiGeometry> {
    if zeta < 1.0 {
        return Err(Error::Precondition(format!("isozaki_geometry: zeta = {zeta} < 1")));
    }
    let xn = norm3(xi);
    if xn >= 2.0 * zeta {
        return Err(Error::Precondition(format!(
            "isozaki_geometry: |xi| = {xn} >= 2 zeta = {}; requires zeta > {}",
            2.0 * zeta,
            xn / 2.0
        )));
    }
    // deterministic eta: the smallest-index coordinate axis not parallel to
    // xi, orthogonalized against xi and normalized
    let axes = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let seed = match eta_seed {
        Some(s) => s,
        None => {
            if xn == 0.0 {
                axes[0]
            } else {
                *axes
                    .iter()
                    .find(|a| dot3(**a, xi).abs() < (1.0 - 1e-12) * xn)
                    .expect("some axis is non-parallel")
            }
        }
    };
    let eta = if xn == 0.0 {
        let sn = norm3(seed);
        if sn == 0.0 {
            return Err(Error::Precondition("isozaki_geometry: zero eta seed".into()));
        }
        [seed[0] / sn, seed[1] / sn, seed[2] / sn]
    } else {
        let proj = dot3(seed, xi) / (xn * xn);
        let raw = [seed[0] - proj * xi[0], seed[1] - proj * xi[1], seed[2] - proj * xi[2]];
        let rn = norm3(raw);
        if rn < 1e-12 {
            return Err(Error::Precondition("isozaki_geometry: eta seed parallel to xi".into()));
        }
        [raw[0] / rn, raw[1] / rn, raw[2] / rn]
    };
    let c = (1.0 - xn * xn / (4.0 * zeta * zeta)).sqrt();
    let half = 1.0 / (2.0 * zeta);
    let theta = [c * eta[0] + half * xi[0], c * eta[1] + half * xi[1], c * eta[2] + half * xi[2]];
    let omega = [c * eta[0] - half * xi[0], c * eta[1] - half * xi[1], c * eta[2] - half * xi[2]];
    let kappa = C::new(zeta, 1.0);
    Ok(IsozakiGeometry { xi, eta, zeta, c, omega, theta, lambda: kappa * kappa * kappa * kappa })
}

/// Born sample of (V1hat - V2hat)(xi + i xi / zeta): minus the scattering
/// difference on the Isozaki geometry; the V-independent boundary terms
/// cancel exactly in the difference.
pub fn sample_vhat_difference(
    ds1: &SpectralDataset,
    ds2: &SpectralDataset,
    xi: [f64; 3],
    zeta: f64,
    sph_lmax: usize,
    grouping: Grouping,
    tail_tol: f64,
) -> Result<C> {
    let geo = isozaki_geometry(xi, zeta, None)?;
    Ok(-s_difference(ds1, ds2, zeta, geo.omega, geo.theta, sph_lmax, grouping, tail_tol)?)
}

/// Low-pass cutoff for the reconstruction: the theorem's zeta^{1/(2n)} with
/// n = 3, or a fixed diagnostic band (outside the theorem's hypotheses,
/// labeled as such in output metadata).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum CutoffMode {
    Compliant,
    Diagnostic,
}

impl CutoffMode {
    pub fn cutoff(&self, zeta: f64) -> f64 {
        match self {
            CutoffMode::Compliant => zeta.powf(1.0 / 6.0),
            CutoffMode::Diagnostic => 8.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub mode: CutoffMode,
    pub cutoff: f64,
    pub zeta: f64,
    /// frequency nodes and Born samples What(rho_j)
    pub rho: Vec<f64>,
    pub vhat: Vec<C>,
    /// radial profile W(r) on the evaluation nodes
    pub r_nodes: Vec<f64>,
    pub w: Vec<C>,
    pub recon_error: f64,
    pub l2_diff: f64,
}

/// Reconstruct W ~ V1 - V2 from Born samples of the radial Fourier
/// difference: W(r) = (1/(2 pi^2)) int_0^cut What(rho) rho sin(rho r)/r drho.
/// `diff` evaluates the known difference (V1 - V2)(r) for the error report.
#[allow(clippy::too_many_arguments)]
pub fn reconstruct_difference(
    ds1: &SpectralDataset,
    ds2: &SpectralDataset,
    diff: &dyn Fn(f64) -> f64,
    zeta: f64,
    n_xi: usize,
    mode: CutoffMode,
    sph_lmax: usize,
    grouping: Grouping,
    tail_tol: f64,
) -> Result<Reconstruction> {
    if n_xi < 16 {
        return Err(Error::Precondition(format!("reconstruct_difference: n_xi = {n_xi} < 16")));
    }
    let radius = ds1.radius;
    let cut = mode.cutoff(zeta);
    let (xq, wq) = gauss_legendre(n_xi)?;
    // radial V => radial Vhat; sample along a fixed direction
    let dir = [1.0, 0.0, 0.0];
    let mut rho = Vec::with_capacity(n_xi);
    let mut vhat = Vec::with_capacity(n_xi);
    for &x in &xq {
        let p = cut * (x + 1.0) / 2.0;
        let xi = [p * dir[0], p * dir[1], p * dir[2]];
        rho.push(p);
        vhat.push(sample_vhat_difference(ds1, ds2, xi, zeta, sph_lmax, grouping, tail_tol)?);
    }
    let (xr, wr) = gauss_legendre(200)?;
    let mut r_nodes = Vec::with_capacity(200);
    let mut w_profile = Vec::with_capacity(200);
    let mut err2 = 0.0;
    let mut diff2 = 0.0;
    let inv_2pi2 = 1.0 / (2.0 * std::f64::consts::PI * std::f64::consts::PI);
    for (i, &x) in xr.iter().enumerate() {
        let r = radius * (x + 1.0) / 2.0;
        let mut acc = C::new(0.0, 0.0);
        for j in 0..n_xi {
            let p = rho[j];
            let kern = if p * r < 1e-10 { p } else { (p * r).sin() / r };
            acc += vhat[j] * p * kern * wq[j];
        }
        let w_r = acc * inv_2pi2 * cut / 2.0;
        let d = diff(r);
        let jac = wr[i] * radius / 2.0 * 4.0 * std::f64::consts::PI * r * r;
        err2 += (w_r - C::new(d, 0.0)).norm_sqr() * jac;
        diff2 += d * d * jac;
        r_nodes.push(r);
        w_profile.push(w_r);
    }
    Ok(Reconstruction {
        mode,
        cutoff: cut,
        zeta,
        rho,
        vhat,
        r_nodes,
        w: w_profile,
        recon_error: err2.sqrt(),
        l2_diff: diff2.sqrt(),
    })
}

/// How modes of the two datasets are matched: by (l, m, q) channel identity
/// (robust to degeneracy swaps) or by raw sorted global index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Pairing {
    Channel,
    GlobalIndex,
}

/// Spectral-data discrepancy between two datasets with the first E entries
/// dropped: eps0 is the max eigenvalue gap over k <= Kmax, eps1/eps2 the
/// k^{-4m/3}-weighted boundary-trace differences. Tail bounds certify the
/// truncation: eps0's tail by the min-max shift bound Q1 + Q2, eps1/eps2 by
/// the measured trace-bound constants and the integral test.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Discrepancy {
    pub eps0: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub eps: f64,
    pub eps0_tail_bound: f64,
    pub eps1_tail_bound: f64,
    pub eps2_tail_bound: f64,
}

pub fn spectral_discrepancy(
    ds1: &SpectralDataset,
    ds2: &SpectralDataset,
    e: usize,
    m: usize,
    kmax: usize,
    pairing: Pairing,
) -> Result<Discrepancy> {
    ds1.compatible_with(ds2)?;
    if m < 2 {
        return Err(Error::Precondition(format!("spectral_discrepancy: m = {m} < 2")));
    }
    if kmax + e > ds1.len() || kmax + e > ds2.len() {
        return Err(Error::Precondition(format!(
            "spectral_discrepancy: Kmax + E = {} exceeds completeness range ({}, {})",
            kmax + e,
            ds1.len(),
            ds2.len()
        )));
    }
    let radius = ds1.radius;
    let mut eps0 = 0.0f64;
    let mut eps1 = 0.0;
    let mut eps2 = 0.0;
    let exp = -(4.0 * m as f64) / 3.0;
    for k in 1..=kmax {
        let m1 = &ds1.modes[k + e - 1];
        let m2 = match pairing {
            Pairing::GlobalIndex => &ds2.modes[k + e - 1],
            Pairing::Channel => ds1.find_channel_mate(ds2, m1).ok_or_else(|| {
                Error::IncompatibleDatasets(format!("no channel mate for (l, m, q) = ({}, {}, {})", m1.l, m1.m, m1.q))
            })?,
        };
        let wk = (k as f64).powf(exp);
        eps0 = eps0.max((m1.lambda - m2.lambda).abs());
        eps1 += wk * radius * (m1.a_trace - m2.a_trace).abs();
        eps2 += wk * radius * (m1.b_trace - m2.b_trace).abs();
    }
    // tails: |lambda1_k - lambda2_k| <= Q1 + Q2 for every k (min-max);
    // R|a_k| <= Ca sqrt(lambda_k) <= Ca sqrt(E2) k^{2/3} and
    // R|b_k| <= Cb lambda_k <= Cb E2 k^{4/3}, summed by the integral test.
    let k0 = (kmax + e) as f64;
    let fit_lo = (ds1.len() / 4).max(10);
    let fit = weyl_fit(ds1, fit_lo, ds1.len().min(fit_lo * 8))?;
    let (ca1, cb1) = trace_bound_check(ds1);
    let (ca2, cb2) = trace_bound_check(ds2);
    let p1 = 4.0 * m as f64 / 3.0 - 2.0 / 3.0;
    let p2 = 4.0 * m as f64 / 3.0 - 4.0 / 3.0;
    let eps1_tail = (ca1 + ca2) * fit.e2.sqrt() * k0.powf(1.0 - p1) / (p1 - 1.0);
    let eps2_tail = (cb1 + cb2) * fit.e2 * k0.powf(1.0 - p2) / (p2 - 1.0);
    Ok(Discrepancy {
        eps0,
        eps1,
        eps2,
        eps: eps0 + eps1 + eps2,
        eps0_tail_bound: ds1.q_bound + ds2.q_bound,
        eps1_tail_bound: eps1_tail,
        eps2_tail_bound: eps2_tail,
    })
}

/// Hoelder exponent of the stability theorem: delta = 1/(16 n (2 + m/sigma + m)).
pub fn theoretical_delta(n: usize, m: usize, sigma: f64) -> Result<f64> {
    if m < 2 {
        return Err(Error::Precondition(format!("theoretical_delta: m = {m} < 2")));
    }
    if sigma <= 0.0 || sigma > 0.25 {
        return Err(Error::Precondition(format!("theoretical_delta: sigma = {sigma} outside (0, 1/4]")));
    }
    let varsigma = 1.0 / sigma;
    Ok(1.0 / (16.0 * n as f64 * (2.0 + varsigma * m as f64 + m as f64)))
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StabilityReport {
    pub amplitude: f64,
    pub eps0: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub eps: f64,
    pub l2_diff: f64,
    pub recon_error: f64,
    pub delta_emp: f64,
    pub e: usize,
    pub m: usize,
    pub kmax: usize,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub reports: Vec<StabilityReport>,
    pub delta_emp: f64,
    pub delta_theory: f64,
    /// fitted envelope constant: max over points of l2Diff / eps^deltaTheory
    pub envelope_c: f64,
}

/// Sweep parameters: dataset sizing, discrepancy offsets, and the Born /
/// reconstruction configuration.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub e: usize,
    pub m: usize,
    pub kmax: usize,
    pub zeta: f64,
    pub lmax_dataset: usize,
    pub k_per_channel: usize,
    pub sph_lmax: usize,
    pub tail_tol: f64,
    pub cutoff: CutoffMode,
    pub n_xi: usize,
    pub bump_center: f64,
    pub bump_width: f64,
    pub grouping: Grouping,
}

/// Empirical Hoelder-stability sweep: V2 = V1 + bump(amplitude) for each
/// amplitude; reports (eps, l2Diff, reconError) per point and the fitted
/// exponent deltaEmp of log l2Diff vs log eps.
pub fn stability_sweep(
    grid: &RadialGrid,
    v1: &RadialPotential,
    amplitudes: &[f64],
    cfg: &SweepConfig,
) -> Result<SweepResult> {
    if amplitudes.len() < 2 {
        return Err(Error::Precondition(format!(
            "stability_sweep: {} amplitude(s); need at least 2 for a slope fit",
            amplitudes.len()
        )));
    }
    let mut amps = amplitudes.to_vec();
    amps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for &a in &amps {
        if a <= 0.0 || a > 0.2 {
            return Err(Error::Precondition(format!("stability_sweep: amplitude {a} outside (0, 0.2]")));
        }
    }
    let ds1 = build_dataset(v1, grid, cfg.lmax_dataset, cfg.k_per_channel)?;
    let mut reports = Vec::with_capacity(amps.len());
    for &a in &amps {
        let bump = RadialPotential::gaussian_bump(grid, a, cfg.bump_center, cfg.bump_width);
        let samples: Vec<f64> = v1.samples.iter().zip(&bump.samples).map(|(x, y)| x + y).collect();
        let sup = samples.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
        let v2 = RadialPotential { descriptor: PotentialDescriptor::Sampled, samples, sup_bound: sup };
        let ds2 = build_dataset(&v2, grid, cfg.lmax_dataset, cfg.k_per_channel)?;
        let disc = spectral_discrepancy(&ds1, &ds2, cfg.e, cfg.m, cfg.kmax, Pairing::Channel)?;
        let diff = |r: f64| -bump.eval(r, grid.radius); // V1 - V2 = -bump
        let recon = reconstruct_difference(
            &ds1,
            &ds2,
            &diff,
            cfg.zeta,
            cfg.n_xi,
            cfg.cutoff,
            cfg.sph_lmax,
            cfg.grouping,
            cfg.tail_tol,
        )?;
        reports.push(StabilityReport {
            amplitude: a,
            eps0: disc.eps0,
            eps1: disc.eps1,
            eps2: disc.eps2,
            eps: disc.eps,
            l2_diff: recon.l2_diff,
            recon_error: recon.recon_error,
            delta_emp: 0.0,
            e: cfg.e,
            m: cfg.m,
            kmax: cfg.kmax,
        });
    }
    let xs: Vec<f64> = reports.iter().map(|r| r.eps.ln()).collect();
    let ys: Vec<f64> = reports.iter().map(|r| r.l2_diff.ln()).collect();
    let delta_emp = linear_fit_slope(&xs, &ys);
    for r in &mut reports {
        r.delta_emp = delta_emp;
    }
    let delta_theory = theoretical_delta(3, cfg.m, 0.25)?;
    let envelope_c = reports
        .iter()
        .map(|r| r.l2_diff / r.eps.powf(delta_theory))
        .fold(0.0f64, f64::max);
    Ok(SweepResult { reports, delta_emp, delta_theory, envelope_c })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::build_grid;
    use crate::scattering::born_volume_term;

    const TAIL: f64 = 1e-6;

    fn dataset(grid: &RadialGrid, amp: f64, lmax: usize, kq: usize) -> SpectralDataset {
        let v = if amp == 0.0 {
            RadialPotential::zero(grid)
        } else {
            RadialPotential::gaussian_bump(grid, amp, 0.5, 0.2)
        };
        build_dataset(&v, grid, lmax, kq).unwrap()
    }

    #[test]
    fn geometry_examples() {
        let g = isozaki_geometry([1.0, 0.0, 0.0], 10.0, None).unwrap();
        assert!((g.c - (1.0f64 - 1.0 / 400.0).sqrt()).abs() < 1e-14);
        assert_eq!(g.eta, [0.0, 1.0, 0.0]);
        assert!((norm3(g.omega) - 1.0).abs() < 1e-12);
        assert!((norm3(g.theta) - 1.0).abs() < 1e-12);
        // kappa (omega - theta) = -xi - i xi / zeta
        let kappa = C::new(10.0, 1.0);
        for i in 0..3 {
            let got = kappa * (g.omega[i] - g.theta[i]);
            let want = C::new(-g.xi[i], -g.xi[i] / 10.0);
            assert!((got - want).norm() < 1e-10, "component {i}");
        }
        // xi -> 0: forward scattering, omega = theta = eta
        let g0 = isozaki_geometry([0.0, 0.0, 0.0], 5.0, None).unwrap();
        assert_eq!(g0.omega, g0.theta);
        assert_eq!(g0.omega, g0.eta);
        // precondition boundary
        assert!(isozaki_geometry([2.0 * 5.0 - 1e-9, 0.0, 0.0], 5.0, None).is_ok());
        assert!(isozaki_geometry([10.0, 0.0, 0.0], 5.0, None).is_err());
    }

    #[test]
    fn delta_closed_form() {
        assert!((theoretical_delta(3, 2, 0.25).unwrap() - 1.0 / 576.0).abs() < 1e-15);
        assert!((theoretical_delta(3, 3, 0.25).unwrap() - 1.0 / 816.0).abs() < 1e-15);
        assert!(theoretical_delta(3, 2, 0.25).unwrap() > theoretical_delta(3, 2, 0.1).unwrap());
        assert!(theoretical_delta(3, 2, 0.0).is_err());
        assert!(theoretical_delta(3, 1, 0.25).is_err());
    }

    #[test]
    fn discrepancy_zero_and_constant_shift() {
        let grid = build_grid(1.0, 150).unwrap();
        let ds = dataset(&grid, 0.1, 12, 10);
        let d = spectral_discrepancy(&ds, &ds, 0, 2, 60, Pairing::Channel).unwrap();
        assert_eq!((d.eps0, d.eps1, d.eps2, d.eps), (0.0, 0.0, 0.0, 0.0));
        assert!(d.eps1_tail_bound > 0.0 && d.eps2_tail_bound > 0.0);
        // V2 = V1 + c: exact diagonal shift, identical eigenvectors
        let v1 = RadialPotential::gaussian_bump(&grid, 0.1, 0.5, 0.2);
        let c = 0.05;
        let samples: Vec<f64> = v1.samples.iter().map(|x| x + c).collect();
        let v2 = RadialPotential { descriptor: PotentialDescriptor::Sampled, samples, sup_bound: 0.15 };
        let ds1 = build_dataset(&v1, &grid, 12, 10).unwrap();
        let ds2 = build_dataset(&v2, &grid, 12, 10).unwrap();
        let d = spectral_discrepancy(&ds1, &ds2, 0, 2, 60, Pairing::Channel).unwrap();
        assert!((d.eps0 - c).abs() < 1e-6, "eps0 = {}", d.eps0);
        assert!(d.eps1 < 1e-7 && d.eps2 < 1e-5, "eps1 = {} eps2 = {}", d.eps1, d.eps2);
        assert!(d.eps0_tail_bound >= c);
        // validation errors
        assert!(spectral_discrepancy(&ds1, &ds2, 0, 1, 60, Pairing::Channel).is_err());
        assert!(spectral_discrepancy(&ds1, &ds2, 0, 2, ds1.len() + 1, Pairing::Channel).is_err());
    }

    #[test]
    fn discrepancy_scales_linearly_in_amplitude() {
        let grid = build_grid(1.0, 150).unwrap();
        let ds1 = dataset(&grid, 0.0, 12, 10);
        let amps = [0.025, 0.05, 0.1];
        let mut eps = Vec::new();
        for &a in &amps {
            let ds2 = dataset(&grid, a, 12, 10);
            let d = spectral_discrepancy(&ds1, &ds2, 0, 2, 60, Pairing::Channel).unwrap();
            eps.push(d.eps);
        }
        assert!(eps[0] < eps[1] && eps[1] < eps[2], "monotone: {eps:?}");
        let xs: Vec<f64> = amps.iter().map(|a: &f64| a.ln()).collect();
        let ys: Vec<f64> = eps.iter().map(|e: &f64| e.ln()).collect();
        let slope = linear_fit_slope(&xs, &ys);
        assert!((slope - 1.0).abs() < 0.15, "slope {slope}");
    }

    #[test]
    fn born_samples_match_volume_oracle() {
        let grid = build_grid(1.0, 200).unwrap();
        let lmax = 30;
        let ds1 = dataset(&grid, 0.0, lmax, 12);
        let ds2 = dataset(&grid, 0.1, lmax, 12);
        let bump = RadialPotential::gaussian_bump(&grid, 0.1, 0.5, 0.2);
        let zeta = 10.0;
        // xi -> 0 variant: sample approximates -integral of the bump
        let s0 = sample_vhat_difference(&ds1, &ds2, [0.0; 3], zeta, lmax, Grouping::SqrtLambdaOnFirstOnly, TAIL)
            .unwrap();
        let vol = born_volume_term(&bump, 1.0, [C::new(0.0, 0.0); 3]);
        assert!((s0 + vol).norm() < 0.05 * vol.norm(), "{s0} vs {}", -vol);
        // finite xi against the complex-frequency oracle
        let xi = [2.0, 0.0, 0.0];
        let s = sample_vhat_difference(&ds1, &ds2, xi, zeta, lmax, Grouping::SqrtLambdaOnFirstOnly, TAIL).unwrap();
        let p = [C::new(xi[0], xi[0] / zeta), C::new(0.0, 0.0), C::new(0.0, 0.0)];
        let oracle = -born_volume_term(&bump, 1.0, p);
        assert!((s - oracle).norm() < 0.15 * oracle.norm(), "{s} vs {oracle}");
        // identical datasets: exactly zero
        let z = sample_vhat_difference(&ds1, &ds1, xi, zeta, lmax, Grouping::SqrtLambdaOnFirstOnly, TAIL).unwrap();
        assert_eq!(z, C::new(0.0, 0.0));
    }

    #[test]
    fn reconstruction_of_bump_difference() {
        let grid = build_grid(1.0, 200).unwrap();
        let lmax = 30;
        let ds1 = dataset(&grid, 0.0, lmax, 12);
        let ds2 = dataset(&grid, 0.1, lmax, 12);
        let bump = RadialPotential::gaussian_bump(&grid, 0.1, 0.5, 0.2);
        let diff = |r: f64| -bump.eval(r, 1.0);
        let rec = reconstruct_difference(
            &ds1,
            &ds2,
            &diff,
            10.0,
            24,
            CutoffMode::Diagnostic,
            lmax,
            Grouping::SqrtLambdaOnFirstOnly,
            TAIL,
        )
        .unwrap();
        assert!(rec.recon_error < 0.35 * rec.l2_diff, "rel error {}", rec.recon_error / rec.l2_diff);
        // identical datasets: W = 0, zero error
        let rec0 = reconstruct_difference(
            &ds1,
            &ds1,
            &|_| 0.0,
            10.0,
            24,
            CutoffMode::Compliant,
            lmax,
            Grouping::SqrtLambdaOnFirstOnly,
            TAIL,
        )
        .unwrap();
        assert_eq!(rec0.recon_error, 0.0);
        assert!(rec0.w.iter().all(|c| c.norm() == 0.0));
        assert!((rec0.cutoff - 10.0f64.powf(1.0 / 6.0)).abs() < 1e-14);
        assert!(reconstruct_difference(
            &ds1,
            &ds1,
            &|_| 0.0,
            10.0,
            8,
            CutoffMode::Compliant,
            lmax,
            Grouping::SqrtLambdaOnFirstOnly,
            TAIL
        )
        .is_err());
    }

    #[test]
    fn sweep_monotone_with_positive_exponent() {
        let grid = build_grid(1.0, 120).unwrap();
        let v1 = RadialPotential::zero(&grid);
        let cfg = SweepConfig {
            e: 0,
            m: 2,
            kmax: 40,
            zeta: 10.0,
            lmax_dataset: 12,
            k_per_channel: 10,
            sph_lmax: 12,
            tail_tol: 10.0, // coarse sweep: skip the plane-wave tail check
            cutoff: CutoffMode::Compliant,
            n_xi: 16,
            bump_center: 0.5,
            bump_width: 0.2,
            grouping: Grouping::SqrtLambdaOnFirstOnly,
        };
        let res = stability_sweep(&grid, &v1, &[0.05, 0.02, 0.1], &cfg).unwrap();
        assert_eq!(res.reports.len(), 3);
        // ordered by amplitude, monotone in both eps and l2Diff
        for w in res.reports.windows(2) {
            assert!(w[0].amplitude < w[1].amplitude);
            assert!(w[0].eps < w[1].eps);
            assert!(w[0].l2_diff < w[1].l2_diff);
        }
        assert!(res.delta_emp > 0.0);
        assert!((res.delta_theory - 1.0 / 576.0).abs() < 1e-15);
        // envelope: every point sits below C eps^delta with the fitted C
        for r in &res.reports {
            assert!(r.l2_diff <= res.envelope_c * r.eps.powf(res.delta_theory) * (1.0 + 1e-12));
        }
        // degenerate requests rejected
        assert!(stability_sweep(&grid, &v1, &[0.1], &cfg).is_err());
        assert!(stability_sweep(&grid, &v1, &[0.0, 0.1], &cfg).is_err());
        assert!(stability_sweep(&grid, &v1, &[0.1, 0.3], &cfg).is_err());
    }
}

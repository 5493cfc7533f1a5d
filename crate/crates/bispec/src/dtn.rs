//! Per-channel DtN blocks assembled from spectral data, the analytic V = 0
//! oracle, truncation windows, Taylor extension in lambda, and weighted
//! operator norms of DtN differences.

use num_complex::Complex64;

use crate::eig::SpectralDataset;
use crate::error::{Error, Result};
use crate::specfun::{sph_bessel_j, sph_bessel_jp, sph_bessel_zero};

type C = Complex64;
pub type Mat2 = [[C; 2]; 2];

pub const ZERO_MAT: Mat2 = [[C::new(0.0, 0.0); 2]; 2];

/// Index window for the truncated series, by global index of the first
/// m-replica of each radial mode (k_first), so blocks stay m-independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    All,
    /// k <= e (the "hat" finite head)
    Hat { e: usize },
    /// e < k <= e_lambda (the finite middle)
    Mid { e: usize, e_lambda: usize },
    /// k > e_lambda (the tail)
    Tail { e_lambda: usize },
}

impl Window {
    pub fn contains(&self, k: usize) -> bool {
        match *self {
            Window::All => true,
            Window::Hat { e } => k <= e,
            Window::Mid { e, e_lambda } => k > e && k <= e_lambda,
            Window::Tail { e_lambda } => k > e_lambda,
        }
    }
}

/// One 2x2 channel block of the DtN pair in the series layout
/// M = (-1)^j j! * sum_q [[a^2, ab], [ab, b^2]] / (lambda_q - lambda)^{j+1}
/// with a = R*aTrace, b = R*bTrace of the degree-l radial modes.
#[derive(Debug, Clone)]
pub struct DtnBlock {
    pub l: usize,
    pub lambda: C,
    pub j_order: usize,
    pub window: Window,
    pub m: Mat2,
}

impl DtnBlock {
    /// Action of the solution map on harmonic coefficients (F, G) of the
    /// boundary data (f, g): returns the coefficients of (d_nu u, output
    /// convention of d_nu(Delta u), sign-matched to the dataset's bTrace).
    pub fn apply(&self, fc: C, gc: C) -> (C, C) {
        let p = -self.m[0][1] * fc + self.m[0][0] * gc;
        let q = self.m[1][1] * fc - self.m[0][1] * gc;
        (p, q)
    }
}

fn pole_check(ds: &SpectralDataset, l: usize, lambda: C, window: Window) -> Result<()> {
    if lambda.im.abs() >= 1.0 {
        return Ok(());
    }
    let tol = 1e-6 * (1.0 + lambda.norm());
    for cm in ds.channel(l) {
        let dist = (C::new(cm.lambda, 0.0) - lambda).norm();
        if window.contains(cm.k_first) && dist < tol {
            return Err(Error::PoleProximity {
                lambda: format!("{lambda}"),
                nearest: cm.lambda,
                dist,
            });
        }
    }
    Ok(())
}

/// Series DtN block for channel l at spectral parameter lambda.
pub fn dtn_block(
    ds: &SpectralDataset,
    lambda: C,
    l: usize,
    j_order: usize,
    window: Window,
) -> Result<DtnBlock> {
    if l > ds.lmax {
        return Err(Error::Precondition(format!("dtn_block: l = {l} > lmax = {}", ds.lmax)));
    }
    pole_check(ds, l, lambda, window)?;
    let mut m = ZERO_MAT;
    // d^j/dlambda^j (lambda_q - lambda)^{-1} = j!/(lambda_q - lambda)^{j+1}
    let fact: f64 = (1..=j_order).map(|k| k as f64).product::<f64>().max(1.0);
    for cm in ds.channel(l) {
        if !window.contains(cm.k_first) {
            continue;
        }
        let mut den = C::new(cm.lambda, 0.0) - lambda;
        for _ in 0..j_order {
            den *= C::new(cm.lambda, 0.0) - lambda;
        }
        let fac = fact / den;
        m[0][0] += fac * cm.a * cm.a;
        m[0][1] += fac * cm.a * cm.b;
        m[1][1] += fac * cm.b * cm.b;
    }
    m[1][0] = m[0][1];
    Ok(DtnBlock { l, lambda, j_order, window, m })
}

/// Closed-form tail of the V = 0 series M11 entry beyond the dataset's kept
/// modes: sum over higher Bessel zeros z of 2 z^2 / R (z^4/R^4 - lambda)^-1,
/// McMahon-expanded zeros beyond the bisection range.
pub fn v0_m11_tail(ds: &SpectralDataset, lambda: C, l: usize, j_order: usize) -> C {
    let r = ds.radius;
    let q0 = ds.channel(l).len();
    let fact: f64 = (1..=j_order).map(|k| k as f64).product::<f64>().max(1.0);
    let mut sum = C::new(0.0, 0.0);
    for q in (q0 + 1)..=20_000 {
        let z = if q <= q0 + 40 {
            sph_bessel_zero(l, q)
        } else {
            // McMahon: z ~ beta - l(l+1)/(2 beta), beta = (q + l/2) pi
            let beta = (q as f64 + l as f64 / 2.0) * std::f64::consts::PI;
            beta - (l * (l + 1)) as f64 / (2.0 * beta)
        };
        // free mode: a = R*aTrace = sqrt(2/R) * z / R, lambda_q = (z/R)^4
        let a2 = 2.0 * z * z / (r * r * r);
        let mut den = C::new((z / r).powi(4), 0.0) - lambda;
        for _ in 0..j_order {
            den *= C::new((z / r).powi(4), 0.0) - lambda;
        }
        sum += fact * a2 / den;
    }
    sum
}

/// Analytic V = 0 DtN block (independent oracle), in the same series layout
/// as dtn_block. The channel solution is u = c1 j_l(kappa r) + c2 j_l(i
/// kappa r), kappa = lambda^{1/4}; boundary data (F, G) determine (c1, c2)
/// and the normal derivatives read off the true response T, which maps onto
/// the series layout as M = [[T12, -T11], [-T22, T21]].
pub fn analytic_dtn_v0(lambda: C, l: usize, radius: f64) -> Result<Mat2> {
    if lambda.norm() == 0.0 {
        return Err(Error::Precondition("analytic_dtn_v0: lambda = 0".into()));
    }
    let (mag, arg) = lambda.to_polar();
    let kappa = C::from_polar(mag.powf(0.25), arg / 4.0);
    let zr = kappa * radius;
    let zi = C::i() * kappa * radius;
    let j1 = sph_bessel_j(l, zr)?;
    let j2 = sph_bessel_j(l, zi)?;
    let jp1 = sph_bessel_jp(l, zr)?;
    let jp2 = sph_bessel_jp(l, zi)?;
    // boundary matrix [[j1, j2], [-kappa^2 j1, kappa^2 j2]], det = 2 kappa^2 j1 j2.
    // The block only needs the log derivatives j'/j, which stay conditioned
    // even when both j factors underflow together (l >> |kappa| R); the
    // genuine singularity is a Bessel zero, where j'/j blows up relative to
    // its off-zero magnitude ~ (l+1)/|z|.
    let conditioned = |j: C, jp: C, z: C| -> bool {
        let offzero = ((l as f64 + 1.0) / z.norm().max(1e-30)).max(1.0);
        jp.norm() < 1e12 * offzero * j.norm()
    };
    if !conditioned(j1, jp1, zr) || !conditioned(j2, jp2, zi) {
        return Err(Error::SingularBoundaryMatrix);
    }
    // logarithmic derivatives J = kappa j_l'(kappa R)/j_l(kappa R),
    // K = i kappa j_l'(i kappa R)/j_l(i kappa R)
    let jj = kappa * jp1 / j1;
    let kk = C::i() * kappa * jp2 / j2;
    let t11 = (jj + kk) / 2.0;
    let t12 = (kk - jj) / (2.0 * kappa * kappa);
    let t21 = kappa * kappa * (kk - jj) / 2.0;
    let t22 = t11;
    Ok([[t12, -t11], [-t22, t21]])
}

/// Truncation parameters: head offset E and the gap constant c of the proof.
#[derive(Debug, Clone, Copy)]
pub struct TruncationSpec {
    pub e: usize,
    pub c_gap: f64,
}

/// Compute E(lambda) = max{j >= E : cGap * lambda_{j+1} < Re lambda} over
/// the global sorted spectrum and return the three disjoint covering
/// windows (hat, mid, tail). E(lambda) is capped at the dataset size.
pub fn split_truncation(
    ds: &SpectralDataset,
    spec: TruncationSpec,
    lambda: C,
) -> Result<(Window, Window, Window)> {
    if spec.c_gap <= 0.0 || spec.c_gap >= 1.0 {
        return Err(Error::Precondition(format!("split_truncation: cGap = {} not in (0,1)", spec.c_gap)));
    }
    let lambdas: Vec<f64> = ds.lambdas().collect();
    if spec.e + 1 <= lambdas.len() && spec.c_gap * lambdas[spec.e] >= lambda.re {
        return Err(Error::WindowUndefined { re_lambda: lambda.re, bound: spec.c_gap * lambdas[spec.e] });
    }
    let mut e_lambda = spec.e;
    for j in spec.e..lambdas.len() {
        // lambda_{j+1} is lambdas[j] (1-based indexing)
        if spec.c_gap * lambdas[j] < lambda.re {
            e_lambda = j;
        } else {
            break;
        }
    }
    Ok((
        Window::Hat { e: spec.e },
        Window::Mid { e: spec.e, e_lambda },
        Window::Tail { e_lambda },
    ))
}

/// Sobolev multiplier (1 + l(l+1)/R^2)^{s/2} realizing H^s(partial B_R) on
/// degree-l coefficients.
pub fn sobolev_weight(l: usize, s: f64, radius: f64) -> f64 {
    (1.0 + (l * (l + 1)) as f64 / (radius * radius)).powf(s / 2.0)
}

/// Weighted operator norms of the DtN differences (Lambda_1 difference as a
/// map H^{3/2} x H^{-1/2} -> H^{t1}, Lambda_2 difference -> H^{t2}),
/// computed as the max over l <= lmax of the weighted row norms of the
/// difference blocks.
#[allow(clippy::too_many_arguments)]
pub fn dtn_diff_norm(
    ds1: &SpectralDataset,
    ds2: &SpectralDataset,
    lambda: C,
    t1: f64,
    t2: f64,
    lmax: usize,
    j_order: usize,
) -> Result<(f64, f64)> {
    ds1.compatible_with(ds2)?;
    if !(-1.5..=0.5).contains(&t1) {
        return Err(Error::Precondition(format!("dtn_diff_norm: t1 = {t1} outside [-3/2, 1/2]")));
    }
    if !(-3.5..=-1.5).contains(&t2) {
        return Err(Error::Precondition(format!("dtn_diff_norm: t2 = {t2} outside [-7/2, -3/2]")));
    }
    let q = ds1.q_bound.max(ds2.q_bound);
    if lambda.norm() < 2.0 * q {
        return Err(Error::Precondition(format!(
            "dtn_diff_norm: |lambda| = {} < 2Q = {}",
            lambda.norm(),
            2.0 * q
        )));
    }
    let r = ds1.radius;
    let mut n1 = 0.0f64;
    let mut n2 = 0.0f64;
    for l in 0..=lmax.min(ds1.lmax) {
        let b1 = dtn_block(ds1, lambda, l, j_order, Window::All)?;
        let b2 = dtn_block(ds2, lambda, l, j_order, Window::All)?;
        let d01 = b1.m[0][1] - b2.m[0][1];
        let d00 = b1.m[0][0] - b2.m[0][0];
        let d11 = b1.m[1][1] - b2.m[1][1];
        let wf = sobolev_weight(l, 1.5, r);
        let wg = sobolev_weight(l, -0.5, r);
        // Lambda_1 difference row [-D12, D11], Lambda_2 row [D22, -D12]
        let row1 = ((d01.norm() / wf).powi(2) + (d00.norm() / wg).powi(2)).sqrt();
        let row2 = ((d11.norm() / wf).powi(2) + (d01.norm() / wg).powi(2)).sqrt();
        n1 = n1.max(sobolev_weight(l, t1, r) * row1);
        n2 = n2.max(sobolev_weight(l, t2, r) * row2);
    }
    Ok((n1, n2))
}

/// Taylor approximation of the lambda block from data at lambda + t_shift.
#[derive(Debug, Clone)]
pub struct TaylorExtension {
    pub approx: Mat2,
    /// Frobenius norm of (direct block at lambda) - approx
    pub remainder: f64,
}

pub fn taylor_extension(
    ds: &SpectralDataset,
    l: usize,
    lambda: C,
    t_shift: f64,
    m_order: usize,
) -> Result<TaylorExtension> {
    if m_order < 2 {
        return Err(Error::Precondition(format!("taylor_extension: m = {m_order} < 2")));
    }
    if t_shift <= 0.0 {
        return Err(Error::Precondition(format!("taylor_extension: T = {t_shift} <= 0")));
    }
    let tilde = lambda + t_shift;
    let mut approx = ZERO_MAT;
    let mut coef = C::new(1.0, 0.0); // (lambda - tilde)^k / k!
    for k in 0..m_order {
        if k > 0 {
            coef *= (lambda - tilde) / k as f64;
        }
        let b = dtn_block(ds, tilde, l, k, Window::All)?;
        for (i, row) in b.m.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                approx[i][j] += coef * v;
            }
        }
    }
    let direct = dtn_block(ds, lambda, l, 0, Window::All)?;
    let mut rem = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            rem += (direct.m[i][j] - approx[i][j]).norm_sqr();
        }
    }
    Ok(TaylorExtension { approx, remainder: rem.sqrt() })
}

/// Nudge a real target spectral parameter into the interior of its gap if
/// it sits too close to an eigenvalue.
pub fn gap_adjusted(ds: &SpectralDataset, target: f64) -> f64 {
    let tol = 1e-6 * (1.0 + target.abs());
    let lambdas: Vec<f64> = ds.lambdas().collect();
    let near = lambdas.iter().any(|&l| (l - target).abs() < tol);
    if !near {
        return target;
    }
    let below = lambdas.iter().copied().filter(|&l| l < target - tol).fold(f64::NEG_INFINITY, f64::max);
    let above = lambdas.iter().copied().filter(|&l| l > target + tol).fold(f64::INFINITY, f64::min);
    if below.is_finite() && above.is_finite() {
        0.5 * (below + above)
    } else if above.is_finite() {
        0.5 * above
    } else {
        target + 10.0 * tol
    }
}

//! Special functions and quadrature: spherical Bessel functions of complex
//! argument, orthonormal complex spherical harmonics (Condon-Shortley phase),
//! Gauss-Legendre rules, product quadrature on the unit sphere and plane-wave
//! boundary expansions.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_DEGREE: usize = 60;

type C = Complex64;

/// Spherical Bessel function j_l(z) for complex z.
///
/// Power series for |z| < l + 1, Miller downward recurrence normalized by
/// j_0(z) = sin(z)/z otherwise. Upward recurrence is unstable for l > |z|,
/// hence the downward sweep.
pub fn sph_bessel_j(l: usize, z: C) -> Result<C> {
    if l > MAX_DEGREE {
        return Err(Error::Precondition(format!("sph_bessel_j: l = {l} > {MAX_DEGREE}")));
    }
    if z.norm() > 1.0e4 {
        return Err(Error::Precondition(format!("sph_bessel_j: |z| = {} > 1e4", z.norm())));
    }
    if z.im.abs() > 650.0 {
        return Err(Error::BesselOverflow { im_abs: z.im.abs() });
    }
    if z.norm() == 0.0 {
        return Ok(if l == 0 { C::new(1.0, 0.0) } else { C::new(0.0, 0.0) });
    }
    if z.norm() < l as f64 + 1.0 {
        Ok(sph_bessel_series(l, z))
    } else {
        sph_bessel_miller(l, z)
    }
}

/// Derivative j_l'(z), from j_{l-1}(z) - (l+1)/z * j_l(z).
pub fn sph_bessel_jp(l: usize, z: C) -> Result<C> {
    if z.norm() == 0.0 {
        // j0' = 0, j1' = 1/3, all higher orders vanish at 0
        return Ok(match l {
            1 => C::new(1.0 / 3.0, 0.0),
            _ => C::new(0.0, 0.0),
        });
    }
    if l == 0 {
        return Ok(-sph_bessel_j(1, z)?);
    }
    let jm = sph_bessel_j(l - 1, z)?;
    let jl = sph_bessel_j(l, z)?;
    Ok(jm - (l as f64 + 1.0) / z * jl)
}

fn sph_bessel_series(l: usize, z: C) -> C {
    // j_l(z) = z^l / (2l+1)!! * sum_k (-z^2/2)^k / (k! (2l+3)(2l+5)...(2l+2k+1))
    let mut lead = C::new(1.0, 0.0);
    for n in 0..l {
        lead *= z / (2.0 * n as f64 + 3.0);
    }
    // After the loop lead = z^l / (3*5*...*(2l+1)) = z^l / (2l+1)!!
    let z2h = -z * z * 0.5;
    let mut term = C::new(1.0, 0.0);
    let mut sum = term;
    for k in 1..200 {
        term *= z2h / (k as f64 * (2 * l + 2 * k + 1) as f64);
        sum += term;
        if term.norm() < 1e-18 * sum.norm().max(1e-300) {
            break;
        }
    }
    lead * sum
}

fn sph_bessel_miller(l: usize, z: C) -> Result<C> {
    let start = l + z.norm().ceil() as usize + 15;
    let mut jp1 = C::new(0.0, 0.0);
    let mut j = C::new(1e-30, 0.0);
    let mut target = C::new(0.0, 0.0);
    for n in (1..=start).rev() {
        let jm1 = (2.0 * n as f64 + 1.0) / z * j - jp1;
        jp1 = j;
        j = jm1;
        if n - 1 == l {
            target = j;
        }
        // rescale to avoid overflow of the unnormalized recurrence
        if j.norm() > 1e250 {
            let s = 1e-250;
            j *= s;
            jp1 *= s;
            target *= s;
        }
    }
    // j now holds the unnormalized j_0
    if l == 0 {
        target = j;
    }
    let j0 = z.sin() / z;
    if !j0.is_finite() {
        return Err(Error::BesselOverflow { im_abs: z.im.abs() });
    }
    Ok(target / j * j0)
}

/// Bisection for the q-th positive zero of j_l (q >= 1), to absolute 1e-12.
///
/// Independent of the eigensolver path; used as the spectrum oracle for the
/// V = 0 Navier biharmonic problem (lambda = z^4 / R^4).
pub fn sph_bessel_zero(l: usize, q: usize) -> f64 {
    let eval = |x: f64| sph_bessel_j(l, C::new(x, 0.0)).expect("real argument in range").re;
    let mut found = 0usize;
    let mut x = (l as f64).max(0.5);
    let mut fx = eval(x);
    let step = 0.05;
    loop {
        let xn = x + step;
        let fn_ = eval(xn);
        if fx == 0.0 {
            found += 1;
            if found == q {
                return x;
            }
        } else if fx * fn_ < 0.0 {
            found += 1;
            if found == q {
                let (mut a, mut b) = (x, xn);
                let mut fa = fx;
                for _ in 0..80 {
                    let m = 0.5 * (a + b);
                    let fm = eval(m);
                    if fa * fm <= 0.0 {
                        b = m;
                    } else {
                        a = m;
                        fa = fm;
                    }
                    if b - a < 1e-13 {
                        break;
                    }
                }
                return 0.5 * (a + b);
            }
        }
        x = xn;
        fx = fn_;
        assert!(x < 1e4, "zero search ran away for l={l}, q={q}");
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1].
///
/// Newton iteration on P_npts with the Chebyshev initial guess; exact for
/// polynomials of degree <= 2*npts - 1.
pub fn gauss_legendre(npts: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if npts == 0 || npts > 512 {
        return Err(Error::Precondition(format!("gauss_legendre: npts = {npts} out of [1, 512]")));
    }
    let n = npts;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut converged = false;
        for _ in 0..100 {
            // Legendre recurrence for P_n(x) and P_n'(x)
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let dpn = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dpn;
            x -= dx;
            if dx.abs() < 1e-15 {
                converged = true;
                // one polishing step
                let mut q0 = 1.0;
                let mut q1 = x;
                for k in 2..=n {
                    let q2 = ((2 * k - 1) as f64 * x * q1 - (k - 1) as f64 * q0) / k as f64;
                    q0 = q1;
                    q1 = q2;
                }
                let dq = n as f64 * (x * q1 - q0) / (x * x - 1.0);
                nodes[i] = -x;
                nodes[n - 1 - i] = x;
                let w = 2.0 / ((1.0 - x * x) * dq * dq);
                weights[i] = w;
                weights[n - 1 - i] = w;
                break;
            }
        }
        if !converged {
            return Err(Error::QuadratureNonConvergence { index: i });
        }
    }
    if n == 1 {
        nodes[0] = 0.0;
        weights[0] = 2.0;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok((nodes, weights))
}

/// Orthonormal complex spherical harmonic Y_lm(dir), Condon-Shortley phase.
pub fn sph_harm(l: usize, m: i64, dir: [f64; 3]) -> Result<C> {
    if l > MAX_DEGREE || m.unsigned_abs() as usize > l {
        return Err(Error::Precondition(format!("sph_harm: invalid (l, m) = ({l}, {m})")));
    }
    let norm = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::Precondition(format!("sph_harm: |dir| = {norm} != 1")));
    }
    let ct = dir[2].clamp(-1.0, 1.0);
    let st = (1.0 - ct * ct).max(0.0).sqrt();
    let phi = dir[1].atan2(dir[0]);
    let ma = m.unsigned_abs() as usize;
    let p = normalized_assoc_legendre(l, ma, ct, st);
    let e = C::from_polar(1.0, ma as f64 * phi);
    let y_pos = p * e; // Y_{l, |m|}
    if m >= 0 {
        Ok(y_pos)
    } else {
        // Y_{l,-m} = (-1)^m conj(Y_{l,m})
        let sign = if ma % 2 == 0 { 1.0 } else { -1.0 };
        Ok(sign * y_pos.conj())
    }
}

/// Fully normalized associated Legendre Pbar_l^m(cos t) for m >= 0, including
/// the Condon-Shortley factor, so that Y_lm = Pbar_l^m e^{i m phi}.
fn normalized_assoc_legendre(l: usize, m: usize, ct: f64, st: f64) -> f64 {
    // Pbar_0^0 = 1/sqrt(4 pi); diagonal recurrence carries Condon-Shortley.
    let mut pmm = 1.0 / (4.0 * std::f64::consts::PI).sqrt();
    for k in 1..=m {
        pmm *= -((2 * k + 1) as f64 / (2 * k) as f64).sqrt() * st;
    }
    if l == m {
        return pmm;
    }
    let mut pm1 = pmm; // Pbar_m^m
    let mut pl = ((2 * m + 3) as f64).sqrt() * ct * pmm; // Pbar_{m+1}^m
    if l == m + 1 {
        return pl;
    }
    for ll in (m + 2)..=l {
        let lf = ll as f64;
        let mf = m as f64;
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
        let b = (((ll - 1) as f64 * (ll - 1) as f64 - mf * mf) / (4.0 * (ll - 1) as f64 * (ll - 1) as f64 - 1.0))
            .sqrt();
        let pnew = a * (ct * pl - b * pm1);
        pm1 = pl;
        pl = pnew;
    }
    pl
}

/// Product quadrature rule on the unit sphere.
#[derive(Debug, Clone)]
pub struct SphereQuadrature {
    pub nodes: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    /// polynomial exactness degree (2 * lmax of the generating rule)
    pub degree: usize,
}

/// Gauss-Legendre in the polar cosine crossed with a uniform azimuthal rule;
/// exact for products of harmonics up to degree 2*lmax.
pub fn sphere_quadrature(lmax: usize) -> Result<SphereQuadrature> {
    if lmax > MAX_DEGREE {
        return Err(Error::Precondition(format!("sphere_quadrature: lmax = {lmax} > {MAX_DEGREE}")));
    }
    let ntheta = lmax + 1;
    let nphi = 2 * lmax + 1;
    let (ct, wt) = gauss_legendre(ntheta)?;
    let mut nodes = Vec::with_capacity(ntheta * nphi);
    let mut weights = Vec::with_capacity(ntheta * nphi);
    let wphi = 2.0 * std::f64::consts::PI / nphi as f64;
    for (i, &c) in ct.iter().enumerate() {
        let s = (1.0 - c * c).max(0.0).sqrt();
        for k in 0..nphi {
            let phi = 2.0 * std::f64::consts::PI * k as f64 / nphi as f64;
            nodes.push([s * phi.cos(), s * phi.sin(), c]);
            weights.push(wt[i] * wphi);
        }
    }
    Ok(SphereQuadrature { nodes, weights, degree: 2 * lmax })
}

impl SphereQuadrature {
    /// Surface integral of f over the unit sphere.
    pub fn integrate<F: Fn([f64; 3]) -> C>(&self, f: F) -> C {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(n, w)| f(*n) * *w)
            .sum()
    }
}

/// A function on the sphere of radius `radius` as coefficients in the
/// orthonormal spherical-harmonic basis, flat-indexed by l*l + (l + m).
#[derive(Debug, Clone)]
pub struct BoundaryField {
    pub radius: f64,
    pub lmax: usize,
    pub coeffs: Vec<C>,
}

impl BoundaryField {
    pub fn zero(radius: f64, lmax: usize) -> Self {
        BoundaryField { radius, lmax, coeffs: vec![C::new(0.0, 0.0); (lmax + 1) * (lmax + 1)] }
    }

    #[inline]
    pub fn idx(l: usize, m: i64) -> usize {
        l * l + (l as i64 + m) as usize
    }

    pub fn get(&self, l: usize, m: i64) -> C {
        self.coeffs[Self::idx(l, m)]
    }

    pub fn set(&mut self, l: usize, m: i64, v: C) {
        self.coeffs[Self::idx(l, m)] = v;
    }

    /// Pointwise evaluation at the unit direction `dir`.
    pub fn eval(&self, dir: [f64; 3]) -> Result<C> {
        let mut acc = C::new(0.0, 0.0);
        for l in 0..=self.lmax {
            for m in -(l as i64)..=(l as i64) {
                let c = self.get(l, m);
                if c.norm() != 0.0 {
                    acc += c * sph_harm(l, m, dir)?;
                }
            }
        }
        Ok(acc)
    }

    /// Parseval sum: integral of |f|^2 over the sphere of radius R equals
    /// R^2 * sum |coeffs|^2.
    pub fn norm_sq_surface(&self) -> f64 {
        self.radius * self.radius * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

}

/// Bilinear surface pairing int_{|x|=R} f g ds (no conjugation) in coefficient
/// space: R^2 sum over (l, m) of (-1)^m f_lm g_{l,-m}.
pub fn pair_on_sphere(f: &BoundaryField, g: &BoundaryField) -> C {
    debug_assert_eq!(f.radius, g.radius);
    let lmax = f.lmax.min(g.lmax);
    let mut acc = C::new(0.0, 0.0);
    for l in 0..=lmax {
        for m in -(l as i64)..=(l as i64) {
            let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            acc += sign * f.get(l, m) * g.get(l, -m);
        }
    }
    acc * f.radius * f.radius
}

/// Boundary trace of the plane wave e^{i kappa omega . x} on the sphere of
/// radius R: coefficients 4 pi i^l j_l(kappa R) conj(Y_lm(omega)).
///
/// `tail_tol` is the truncation criterion: |4 pi j_lmax(kappa R)| must fall
/// below tail_tol times the largest coefficient magnitude.
pub fn plane_wave_trace(kappa: C, omega: [f64; 3], radius: f64, lmax: usize, tail_tol: f64) -> Result<BoundaryField> {
    if kappa.im < -1e-12 {
        return Err(Error::Precondition(format!("plane_wave_trace: Im kappa = {} < 0", kappa.im)));
    }
    let mut field = BoundaryField::zero(radius, lmax);
    let i_pow = [C::new(1.0, 0.0), C::new(0.0, 1.0), C::new(-1.0, 0.0), C::new(0.0, -1.0)];
    let four_pi = 4.0 * std::f64::consts::PI;
    let mut max_coeff: f64 = 0.0;
    let mut last_radial: f64 = 0.0;
    for l in 0..=lmax {
        let jl = sph_bessel_j(l, kappa * radius)?;
        let radial = four_pi * jl.norm();
        last_radial = radial;
        for m in -(l as i64)..=(l as i64) {
            let y = sph_harm(l, m, omega)?;
            let c = four_pi * i_pow[l % 4] * jl * y.conj();
            max_coeff = max_coeff.max(c.norm());
            field.set(l, m, c);
        }
    }
    if kappa.norm() > 0.0 && last_radial >= tail_tol * max_coeff {
        return Err(Error::TruncationInsufficient { tail: last_radial, max_coeff });
    }
    Ok(field)
}

/// Boundary trace of the normal derivative of the plane wave:
/// coefficients 4 pi i^l kappa j_l'(kappa R) conj(Y_lm(omega)).
pub fn plane_wave_normal_trace(kappa: C, omega: [f64; 3], radius: f64, lmax: usize) -> Result<BoundaryField> {
    let mut field = BoundaryField::zero(radius, lmax);
    let i_pow = [C::new(1.0, 0.0), C::new(0.0, 1.0), C::new(-1.0, 0.0), C::new(0.0, -1.0)];
    let four_pi = 4.0 * std::f64::consts::PI;
    for l in 0..=lmax {
        let jp = sph_bessel_jp(l, kappa * radius)?;
        for m in -(l as i64)..=(l as i64) {
            let y = sph_harm(l, m, omega)?;
            field.set(l, m, four_pi * i_pow[l % 4] * kappa * jp * y.conj());
        }
    }
    Ok(field)
}

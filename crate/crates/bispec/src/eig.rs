//! Dense symmetric eigensolver (Householder tridiagonalization + implicit
//! shift QL) and assembly of the global spectral dataset with boundary
//! traces, per spherical-harmonic channel.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::radial::{assemble_dirichlet_laplacian, RadialGrid, RadialPotential, Tridiag};

/// Householder reduction to tridiagonal form followed by implicit-shift QL,
/// eigenvalues ascending, orthonormal eigenvectors as columns.
///
/// Ported from the EISPACK tred2/tql2 pair.
pub fn solve_symmetric(m: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = m.len();
    let scale = m
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |a, &v| a.max(v.abs()))
        .max(1.0);
    for i in 0..n {
        if m[i].len() != n {
            return Err(Error::Precondition("solve_symmetric: matrix not square".into()));
        }
        for j in (i + 1)..n {
            if (m[i][j] - m[j][i]).abs() > 1e-12 * scale {
                return Err(Error::Precondition(format!(
                    "solve_symmetric: asymmetry at ({i},{j}): {}",
                    (m[i][j] - m[j][i]).abs()
                )));
            }
        }
    }
    let mut v: Vec<Vec<f64>> = m.to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut v, &mut d, &mut e);
    tql2(&mut v, &mut d, &mut e)?;
    // ascending sort, carrying eigenvector columns
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap());
    let dd: Vec<f64> = order.iter().map(|&j| d[j]).collect();
    let mut vv = vec![vec![0.0; n]; n];
    for (jnew, &jold) in order.iter().enumerate() {
        for k in 0..n {
            vv[k][jnew] = v[k][jold];
        }
    }
    Ok((dd, vv))
}

fn tred2(v: &mut [Vec<f64>], d: &mut [f64], e: &mut [f64]) {
    let n = v.len();
    for j in 0..n {
        d[j] = v[n - 1][j];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for item in d.iter().take(i) {
            scale += item.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[i - 1][j];
                v[i][j] = 0.0;
                v[j][i] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for item in e.iter_mut().take(i) {
                *item = 0.0;
            }
            for j in 0..i {
                let f = d[j];
                v[j][i] = f;
                let mut g = e[j] + v[j][j] * f;
                for k in (j + 1)..i {
                    g += v[k][j] * d[k];
                    e[k] += v[k][j] * f;
                }
                e[j] = g;
            }
            let mut f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                let f = d[j];
                let g = e[j];
                for k in j..i {
                    v[k][j] -= f * e[k] + g * d[k];
                }
                d[j] = v[i - 1][j];
                v[i][j] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..(n - 1) {
        v[n - 1][i] = v[i][i];
        v[i][i] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[k][i + 1] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[k][i + 1] * v[k][j];
                }
                for k in 0..=i {
                    v[k][j] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[k][i + 1] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[n - 1][j];
        v[n - 1][j] = 0.0;
    }
    v[n - 1][n - 1] = 1.0;
    e[0] = 0.0;
}

fn tql2(v: &mut [Vec<f64>], d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = v.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    let eps = f64::EPSILON;
    let max_iters = 30 * n;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > max_iters {
                    return Err(Error::EigNonConvergence { row: l, iters: iter });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for item in d.iter_mut().take(n).skip(l + 2) {
                    *item -= h;
                }
                f += h;
                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for row in v.iter_mut().take(n) {
                        let h = row[i + 1];
                        row[i + 1] = s * row[i] + c * h;
                        row[i] = c * row[i] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// One eigenmode of the Navier biharmonic problem, phi = f(r) Y_lm with
/// u = r f on the radial grid and the boundary-trace radial factors.
#[derive(Debug, Clone)]
pub struct EigenMode {
    pub l: usize,
    pub m: i64,
    /// radial index within the channel, starting at 1
    pub q: usize,
    pub lambda: f64,
    /// radial profile of r f, unit 2-norm, shared across the m-degeneracy
    pub u: Arc<Vec<f64>>,
    /// radial factor of d_nu phi at r = R; >= 0 by sign convention
    pub a_trace: f64,
    /// radial factor of -d_nu(Delta phi) at r = R (sign-flipped so that the
    /// V = 0 modes have b_trace = (k pi / R)^2 a_trace > 0)
    pub b_trace: f64,
}

/// Per-channel view used by the DtN series: one entry per radial index q.
#[derive(Debug, Clone, Copy)]
pub struct ChannelMode {
    pub q: usize,
    pub lambda: f64,
    /// R * a_trace
    pub a: f64,
    /// R * b_trace
    pub b: f64,
    /// global index of the first replica of this radial mode (1-based)
    pub k_first: usize,
}

#[derive(Debug, Clone)]
pub struct SpectralDataset {
    pub radius: f64,
    pub grid_n: usize,
    pub lmax: usize,
    pub k_per_channel: usize,
    pub lambda_complete: f64,
    /// sup bound Q of the generating potential
    pub q_bound: f64,
    /// sorted ascending by (lambda, l, m); global index k = position + 1
    pub modes: Vec<EigenMode>,
    channels: Vec<Vec<ChannelMode>>,
}

/// Boundary-trace radial factors of a unit-norm channel eigenvector.
///
/// With phi = f(r) Y_lm, f = u/r: a = f'(R) = u'(R)/R via the one-sided
/// second-order stencil u'(R) ~ (3*0 - 4 u_N + u_{N-1})/(2h); b from
/// w = -T_l u (so w/r = Delta_l f) the same way, sign-flipped.
pub fn boundary_traces(u: &[f64], grid: &RadialGrid, t: &Tridiag) -> (f64, f64) {
    let n = grid.n;
    let h = grid.h;
    let scale = 1.0 / h.sqrt(); // unit vector -> unit L^2(B_R) normalization
    let up_r = (-4.0 * u[n - 1] + u[n - 2]) / (2.0 * h) * scale;
    let a = up_r / grid.radius;
    let mut w = vec![0.0; n];
    t.apply(u, &mut w);
    for item in w.iter_mut() {
        *item = -*item;
    }
    let wp_r = (-4.0 * w[n - 1] + w[n - 2]) / (2.0 * h) * scale;
    let b = -wp_r / grid.radius;
    (a, b)
}

struct ChannelSolve {
    l: usize,
    lambdas: Vec<f64>,
    vectors: Vec<Arc<Vec<f64>>>,
    traces: Vec<(f64, f64)>,
}

/// Channel solve by Rayleigh-Ritz projection of H = T^2 + V onto the lowest
/// T eigenmodes. Diagonalizing T directly keeps the roundoff proportional to
/// ||T|| ~ N^2 instead of ||T^2|| ~ N^4, which would otherwise swamp the
/// O(||V||) eigenvalue shifts; coupling to the discarded modes is
/// O(||V||^2 / spectral distance) and negligible for the kept range.
fn solve_channel(grid: &RadialGrid, l: usize, v: &RadialPotential, k_per_channel: usize) -> Result<ChannelSolve> {
    let t = assemble_dirichlet_laplacian(grid, l);
    let (mus, tvecs) =
        solve_symmetric(&t.to_dense()).map_err(|e| Error::ChannelSolve { l, source: Box::new(e) })?;
    let k = (k_per_channel + 30).min(grid.n);
    let mut a_mat = vec![vec![0.0; k]; k];
    for i in 0..k {
        a_mat[i][i] = mus[i] * mus[i];
        for j in 0..=i {
            let mut s = 0.0;
            for p in 0..grid.n {
                s += tvecs[p][i] * v.samples[p] * tvecs[p][j];
            }
            a_mat[i][j] += s;
            if j < i {
                a_mat[j][i] += s;
            }
        }
    }
    let (vals, ys) =
        solve_symmetric(&a_mat).map_err(|e| Error::ChannelSolve { l, source: Box::new(e) })?;
    let keep = k_per_channel.min(vals.len());
    let mut lambdas = Vec::with_capacity(keep);
    let mut vectors = Vec::with_capacity(keep);
    let mut traces = Vec::with_capacity(keep);
    for j in 0..keep {
        let mut u = vec![0.0; grid.n];
        for i in 0..k {
            let c = ys[i][j];
            if c != 0.0 {
                for (p, up) in u.iter_mut().enumerate() {
                    *up += c * tvecs[p][i];
                }
            }
        }
        let (mut a, mut b) = boundary_traces(&u, grid, &t);
        if a < 0.0 {
            for x in u.iter_mut() {
                *x = -*x;
            }
            a = -a;
            b = -b;
        }
        lambdas.push(vals[j]);
        vectors.push(Arc::new(u));
        traces.push((a, b));
    }
    Ok(ChannelSolve { l, lambdas, vectors, traces })
}

/// Solve every channel l = 0..lmax, replicate radial modes across
/// m = -l..l, merge, sort ascending, truncate above the completeness
/// threshold.
pub fn build_dataset(
    v: &RadialPotential,
    grid: &RadialGrid,
    lmax: usize,
    k_per_channel: usize,
) -> Result<SpectralDataset> {
    if lmax < 10 {
        return Err(Error::Precondition(format!("build_dataset: lmax = {lmax} < 10")));
    }
    if k_per_channel < 10 {
        return Err(Error::Precondition(format!("build_dataset: kPerChannel = {k_per_channel} < 10")));
    }
    let solves: Vec<ChannelSolve> = (0..=lmax)
        .into_par_iter()
        .map(|l| solve_channel(grid, l, v, k_per_channel))
        .collect::<Result<Vec<_>>>()?;

    // completeness: nothing from unsolved channels (l > lmax) can lie below
    // the smallest eigenvalue of channel lmax, and nothing from truncated
    // tails below the last kept eigenvalue of any channel
    let t1 = solves[lmax].lambdas[0];
    let t2 = solves
        .iter()
        .map(|s| *s.lambdas.last().unwrap())
        .fold(f64::INFINITY, f64::min);
    let lambda_complete = t1.min(t2);

    let mut modes: Vec<EigenMode> = Vec::new();
    for s in &solves {
        for (j, &lam) in s.lambdas.iter().enumerate() {
            if lam > lambda_complete {
                break;
            }
            let (a, b) = s.traces[j];
            for m in -(s.l as i64)..=(s.l as i64) {
                modes.push(EigenMode {
                    l: s.l,
                    m,
                    q: j + 1,
                    lambda: lam,
                    u: Arc::clone(&s.vectors[j]),
                    a_trace: a,
                    b_trace: b,
                });
            }
        }
    }
    modes.sort_by(|x, y| {
        x.lambda
            .partial_cmp(&y.lambda)
            .unwrap()
            .then(x.l.cmp(&y.l))
            .then(x.m.cmp(&y.m))
    });

    let mut channels: Vec<Vec<ChannelMode>> = vec![Vec::new(); lmax + 1];
    for (pos, mode) in modes.iter().enumerate() {
        if mode.m == -(mode.l as i64) {
            channels[mode.l].push(ChannelMode {
                q: mode.q,
                lambda: mode.lambda,
                a: mode.a_trace * grid.radius,
                b: mode.b_trace * grid.radius,
                k_first: pos + 1,
            });
        }
    }
    for ch in channels.iter_mut() {
        ch.sort_by(|a, b| a.q.cmp(&b.q));
    }

    Ok(SpectralDataset {
        radius: grid.radius,
        grid_n: grid.n,
        lmax,
        k_per_channel,
        lambda_complete,
        q_bound: v.sup_bound,
        modes,
        channels,
    })
}

impl SpectralDataset {
    pub fn channel(&self, l: usize) -> &[ChannelMode] {
        &self.channels[l]
    }

    /// Global eigenvalue list (with multiplicity), ascending.
    pub fn lambdas(&self) -> impl Iterator<Item = f64> + '_ {
        self.modes.iter().map(|m| m.lambda)
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Pair a mode of this dataset with the same (l, m, q) channel identity
    /// in `other`.
    pub fn find_channel_mate<'a>(&self, other: &'a SpectralDataset, mode: &EigenMode) -> Option<&'a EigenMode> {
        other
            .modes
            .iter()
            .find(|m| m.l == mode.l && m.m == mode.m && m.q == mode.q)
    }

    pub fn compatible_with(&self, other: &SpectralDataset) -> Result<()> {
        if self.radius != other.radius || self.grid_n != other.grid_n || self.lmax != other.lmax {
            return Err(Error::IncompatibleDatasets(format!(
                "(R, N, lmax) = ({}, {}, {}) vs ({}, {}, {})",
                self.radius, self.grid_n, self.lmax, other.radius, other.grid_n, other.lmax
            )));
        }
        Ok(())
    }

    /// CSV serialization of the mode table, schema "bispec-dataset-1":
    /// columns k, l, m, q, lambda, aNorm, bNorm where aNorm = R * |a_trace|
    /// is the L^2(boundary) norm of d_nu phi_k.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("# schema: bispec-dataset-1\nk,l,m,q,lambda,aNorm,bNorm\n");
        for (pos, m) in self.modes.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{:.12e},{:.12e},{:.12e}\n",
                pos + 1,
                m.l,
                m.m,
                m.q,
                m.lambda,
                self.radius * m.a_trace,
                self.radius * m.b_trace
            ));
        }
        out
    }

    /// JSON serialization, schema "bispec-dataset-1", including the radial
    /// profiles (once per (l, q), not per m-replica).
    pub fn to_json(&self) -> serde_json::Value {
        let mut profiles = Vec::new();
        for l in 0..=self.lmax {
            for cm in self.channel(l) {
                let mode = self
                    .modes
                    .iter()
                    .find(|m| m.l == l && m.q == cm.q)
                    .expect("channel entry has a mode");
                profiles.push(serde_json::json!({
                    "l": l,
                    "q": cm.q,
                    "lambda": cm.lambda,
                    "aTrace": mode.a_trace,
                    "bTrace": mode.b_trace,
                    "u": mode.u.as_ref(),
                }));
            }
        }
        serde_json::json!({
            "schema": "bispec-dataset-1",
            "radius": self.radius,
            "gridN": self.grid_n,
            "lmax": self.lmax,
            "kPerChannel": self.k_per_channel,
            "lambdaComplete": self.lambda_complete,
            "modes": self.modes.iter().enumerate().map(|(pos, m)| serde_json::json!({
                "k": pos + 1, "l": m.l, "m": m.m, "q": m.q, "lambda": m.lambda,
                "aNorm": self.radius * m.a_trace, "bNorm": self.radius * m.b_trace,
            })).collect::<Vec<_>>(),
            "radialProfiles": profiles,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::{assemble_navier_biharmonic, build_grid};

    #[test]
    fn tridiag_closed_form_spectrum() {
        // (-1, 2, -1) at N = 10 has eigenvalues 2 - 2 cos(k pi / 11)
        let n = 10;
        let t = Tridiag { diag: vec![2.0; n], off: vec![-1.0; n - 1] };
        let (vals, _) = solve_symmetric(&t.to_dense()).unwrap();
        for k in 1..=n {
            let exact = 2.0 - 2.0 * (k as f64 * std::f64::consts::PI / 11.0).cos();
            assert!((vals[k - 1] - exact).abs() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn random_symmetric_residuals() {
        let n = 12;
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..=i {
                let v = next();
                a[i][j] = v;
                a[j][i] = v;
            }
        }
        let (vals, vecs) = solve_symmetric(&a).unwrap();
        for j in 0..n {
            // residual
            for i in 0..n {
                let av: f64 = (0..n).map(|k| a[i][k] * vecs[k][j]).sum();
                assert!((av - vals[j] * vecs[i][j]).abs() < 1e-12);
            }
            // orthonormal columns
            for j2 in 0..=j {
                let dot: f64 = (0..n).map(|k| vecs[k][j] * vecs[k][j2]).sum();
                let expect = if j == j2 { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-12);
            }
        }
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn rejects_asymmetric_input() {
        let a = vec![vec![1.0, 2.0], vec![0.0, 1.0]];
        assert!(solve_symmetric(&a).is_err());
    }

    #[test]
    fn free_channel_spectrum_and_traces() {
        // V = 0, l = 0: lambda_q = (q pi)^4, a = sqrt(2) q pi, b = (q pi)^2 a
        let grid = build_grid(1.0, 300).unwrap();
        let v = RadialPotential::zero(&grid);
        let op = assemble_navier_biharmonic(&grid, 0, &v).unwrap();
        let (vals, vecs) = solve_symmetric(&op.h).unwrap();
        for q in 1..=3usize {
            let kpi = q as f64 * std::f64::consts::PI;
            assert!(
                (vals[q - 1] - kpi.powi(4)).abs() < 2e-4 * kpi.powi(4),
                "lambda_{q}: {} vs {}",
                vals[q - 1],
                kpi.powi(4)
            );
            let u: Vec<f64> = (0..grid.n).map(|i| vecs[i][q - 1]).collect();
            let (a, b) = boundary_traces(&u, &grid, &op.t);
            let a_exact = 2.0f64.sqrt() * kpi;
            assert!(
                (a.abs() - a_exact).abs() < 3e-3 * a_exact,
                "a_{q}: {} vs {}",
                a.abs(),
                a_exact
            );
            assert!(
                (b / a - kpi * kpi).abs() < 3e-3 * kpi * kpi,
                "b/a at q = {q}: {} vs {}",
                b / a,
                kpi * kpi
            );
            // b has the same sign as a under the stored convention
            assert!(a * b > 0.0);
        }
    }

    #[test]
    fn free_channel_l1_against_bessel_zero() {
        let grid = build_grid(1.0, 300).unwrap();
        let v = RadialPotential::zero(&grid);
        let op = assemble_navier_biharmonic(&grid, 1, &v).unwrap();
        let (vals, vecs) = solve_symmetric(&op.h).unwrap();
        let z = crate::specfun::sph_bessel_zero(1, 1);
        assert!((vals[0] - z.powi(4)).abs() < 3e-4 * z.powi(4));
        let u: Vec<f64> = (0..grid.n).map(|i| vecs[i][0]).collect();
        let (a, b) = boundary_traces(&u, &grid, &op.t);
        let a_exact = 2.0f64.sqrt() * z;
        assert!((a.abs() - a_exact).abs() < 3e-3 * a_exact, "{} vs {a_exact}", a.abs());
        assert!((b / a - z * z).abs() < 3e-3 * z * z);
    }

    #[test]
    fn dataset_invariants() {
        let grid = build_grid(1.0, 80).unwrap();
        let v = RadialPotential::zero(&grid);
        let ds = build_dataset(&v, &grid, 10, 10).unwrap();
        // sorted ascending with deterministic tie-break
        for w in ds.modes.windows(2) {
            let ka = (w[0].lambda, w[0].l, w[0].m);
            let kb = (w[1].lambda, w[1].l, w[1].m);
            assert!(ka <= kb);
        }
        // sign convention and completeness
        assert!(ds.modes.iter().all(|m| m.a_trace >= 0.0));
        assert!(ds.modes.iter().all(|m| m.lambda <= ds.lambda_complete));
        // each (l, q) appears with the full m-degeneracy
        for l in 0..=ds.lmax {
            for cm in ds.channel(l) {
                let count = ds.modes.iter().filter(|m| m.l == l && m.q == cm.q).count();
                assert_eq!(count, 2 * l + 1, "(l, q) = ({l}, {})", cm.q);
                let first = &ds.modes[cm.k_first - 1];
                assert_eq!((first.l, first.q, first.m), (l, cm.q, -(l as i64)));
                assert!((cm.a - grid.radius * first.a_trace).abs() < 1e-15);
            }
        }
        // first global mode is (l, q) = (0, 1), and lambda_1 is close to pi^4
        assert_eq!((ds.modes[0].l, ds.modes[0].q), (0, 1));
        let pi4 = std::f64::consts::PI.powi(4);
        assert!((ds.modes[0].lambda - pi4).abs() < 1e-2 * pi4);
        // lambda_complete cannot exceed the smallest eigenvalue of lmax
        assert!(ds.lambda_complete <= ds.channel(ds.lmax)[0].lambda + 1e-9);
    }

    #[test]
    fn dataset_serialization_schema() {
        let grid = build_grid(1.0, 60).unwrap();
        let v = RadialPotential::zero(&grid);
        let ds = build_dataset(&v, &grid, 10, 10).unwrap();
        let csv = ds.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "# schema: bispec-dataset-1");
        assert_eq!(lines.next().unwrap(), "k,l,m,q,lambda,aNorm,bNorm");
        assert_eq!(csv.lines().count(), ds.len() + 2);
        let json = ds.to_json();
        assert_eq!(json["schema"], "bispec-dataset-1");
        assert_eq!(json["modes"].as_array().unwrap().len(), ds.len());
        assert!(json["radialProfiles"][0]["u"].as_array().unwrap().len() == grid.n);
        // determinism: identical builds serialize identically
        let ds2 = build_dataset(&v, &grid, 10, 10).unwrap();
        assert_eq!(csv, ds2.to_csv());
    }

    #[test]
    fn dataset_compatibility_check() {
        let grid = build_grid(1.0, 60).unwrap();
        let v = RadialPotential::zero(&grid);
        let ds = build_dataset(&v, &grid, 10, 10).unwrap();
        let grid2 = build_grid(1.0, 70).unwrap();
        let v2 = RadialPotential::zero(&grid2);
        let ds2 = build_dataset(&v2, &grid2, 10, 10).unwrap();
        assert!(ds.compatible_with(&ds).is_ok());
        assert!(ds.compatible_with(&ds2).is_err());
    }
}

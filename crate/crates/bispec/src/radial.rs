//! Radial reduction of Delta^2 + V with Navier boundary conditions on a ball
//! in three dimensions. Under u = r f the degree-l Dirichlet Laplacian is a
//! symmetric tridiagonal matrix T_l and the Navier biharmonic channel
//! operator is H = T_l^2 + diag(V).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform interior grid r_i = i h, i = 1..N, h = R/(N+1).
#[derive(Debug, Clone)]
pub struct RadialGrid {
    pub radius: f64,
    pub n: usize,
    pub h: f64,
    pub nodes: Vec<f64>,
}

pub fn build_grid(radius: f64, n: usize) -> Result<RadialGrid> {
    if radius <= 0.0 {
        return Err(Error::Precondition(format!("build_grid: R = {radius} <= 0")));
    }
    if n < 50 {
        return Err(Error::Precondition(format!("build_grid: N = {n} < 50")));
    }
    let h = radius / (n + 1) as f64;
    let nodes = (1..=n).map(|i| i as f64 * h).collect();
    Ok(RadialGrid { radius, n, h, nodes })
}

/// Analytic family tag for a radial potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum PotentialDescriptor {
    Zero,
    /// Gaussian bump amplitude*exp(-(r-center)^2/(2 width^2)) multiplied by a
    /// quintic taper that vanishes at r = R, keeping differences in H^1_0.
    GaussianBump { amplitude: f64, center: f64, width: f64 },
    Sampled,
}

/// A radial potential sampled on a grid, with its sup bound Q.
#[derive(Debug, Clone)]
pub struct RadialPotential {
    pub descriptor: PotentialDescriptor,
    pub samples: Vec<f64>,
    pub sup_bound: f64,
}

/// Quintic smoothstep taper: 1 on [0, 0.8 R], 0 at R, C^2 in between.
fn taper(r: f64, radius: f64) -> f64 {
    let start = 0.8 * radius;
    if r <= start {
        1.0
    } else if r >= radius {
        0.0
    } else {
        let t = (radius - r) / (radius - start);
        t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
    }
}

impl RadialPotential {
    pub fn zero(grid: &RadialGrid) -> Self {
        RadialPotential {
            descriptor: PotentialDescriptor::Zero,
            samples: vec![0.0; grid.n],
            sup_bound: 0.0,
        }
    }

    pub fn gaussian_bump(grid: &RadialGrid, amplitude: f64, center: f64, width: f64) -> Self {
        let samples: Vec<f64> = grid
            .nodes
            .iter()
            .map(|&r| amplitude * (-(r - center) * (r - center) / (2.0 * width * width)).exp() * taper(r, grid.radius))
            .collect();
        let sup = samples.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        RadialPotential {
            descriptor: PotentialDescriptor::GaussianBump { amplitude, center, width },
            samples,
            sup_bound: sup,
        }
    }

    pub fn from_descriptor(grid: &RadialGrid, d: &PotentialDescriptor) -> Result<Self> {
        match d {
            PotentialDescriptor::Zero => Ok(Self::zero(grid)),
            PotentialDescriptor::GaussianBump { amplitude, center, width } => {
                if *width <= 0.0 || *center < 0.0 || *center > grid.radius {
                    return Err(Error::Precondition(format!("bump descriptor out of range: {d:?}")));
                }
                Ok(Self::gaussian_bump(grid, *amplitude, *center, *width))
            }
            PotentialDescriptor::Sampled => {
                Err(Error::Precondition("sampled potentials need explicit samples".into()))
            }
        }
    }

    /// Pointwise evaluation of the analytic families (zero outside [0, R]).
    pub fn eval(&self, r: f64, radius: f64) -> f64 {
        match &self.descriptor {
            PotentialDescriptor::Zero => 0.0,
            PotentialDescriptor::GaussianBump { amplitude, center, width } => {
                amplitude * (-(r - center) * (r - center) / (2.0 * width * width)).exp() * taper(r, radius)
            }
            PotentialDescriptor::Sampled => {
                // nearest-node lookup; analytic families never hit this path
                let h = radius / (self.samples.len() + 1) as f64;
                let i = ((r / h).round() as usize).clamp(1, self.samples.len());
                self.samples[i - 1]
            }
        }
    }
}

/// Symmetric tridiagonal matrix stored as diagonal + off-diagonal.
#[derive(Debug, Clone)]
pub struct Tridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>, // off[i] couples i and i+1
}

impl Tridiag {
    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn apply(&self, u: &[f64], out: &mut [f64]) {
        let n = self.n();
        for i in 0..n {
            let mut v = self.diag[i] * u[i];
            if i > 0 {
                v += self.off[i - 1] * u[i - 1];
            }
            if i + 1 < n {
                v += self.off[i] * u[i + 1];
            }
            out[i] = v;
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.n();
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            m[i][i] = self.diag[i];
            if i + 1 < n {
                m[i][i + 1] = self.off[i];
                m[i + 1][i] = self.off[i];
            }
        }
        m
    }
}

/// Degree-l radial channel: T (Dirichlet Laplacian under u = r f) and the
/// dense H = T^2 + diag(V).
#[derive(Debug, Clone)]
pub struct ChannelOperator {
    pub l: usize,
    pub t: Tridiag,
    pub h: Vec<Vec<f64>>,
}

/// (T_l u)_i = (-u_{i-1} + 2 u_i - u_{i+1})/h^2 + l(l+1)/r_i^2 u_i,
/// with u_0 = u_{N+1} = 0.
pub fn assemble_dirichlet_laplacian(grid: &RadialGrid, l: usize) -> Tridiag {
    let n = grid.n;
    let h2 = grid.h * grid.h;
    let ll = (l * (l + 1)) as f64;
    let diag = grid.nodes.iter().map(|&r| 2.0 / h2 + ll / (r * r)).collect();
    let off = vec![-1.0 / h2; n.saturating_sub(1)];
    Tridiag { diag, off }
}

/// H = T_l^2 + diag(V): the Navier biharmonic channel operator. Navier
/// conditions u = Delta u = 0 make Delta^2 the square of the Dirichlet
/// Laplacian, so the squared tridiagonal is exact at the discrete level.
pub fn assemble_navier_biharmonic(grid: &RadialGrid, l: usize, v: &RadialPotential) -> Result<ChannelOperator> {
    if v.samples.len() != grid.n {
        return Err(Error::Precondition(format!(
            "potential sampled on {} nodes, grid has {}",
            v.samples.len(),
            grid.n
        )));
    }
    let t = assemble_dirichlet_laplacian(grid, l);
    let n = grid.n;
    let mut h = vec![vec![0.0; n]; n];
    // T^2 is pentadiagonal; fill it directly from the tridiagonal bands.
    for i in 0..n {
        let d_i = t.diag[i];
        let e_im1 = if i > 0 { t.off[i - 1] } else { 0.0 };
        let e_i = if i + 1 < n { t.off[i] } else { 0.0 };
        h[i][i] = d_i * d_i + e_im1 * e_im1 + e_i * e_i + v.samples[i];
        if i + 1 < n {
            let val = e_i * (d_i + t.diag[i + 1]);
            h[i][i + 1] = val;
            h[i + 1][i] = val;
        }
        if i + 2 < n {
            let val = e_i * t.off[i + 1];
            h[i][i + 2] = val;
            h[i + 2][i] = val;
        }
    }
    Ok(ChannelOperator { l, t, h })
}

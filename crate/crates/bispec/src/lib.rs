//! Numerical laboratory for the Navier biharmonic operator Delta^2 + V on a
//! ball: forward spectral solves, Dirichlet-to-Neumann maps, scattering
//! functions, Born inversion, and empirical stability sweeps.

pub mod cli;
pub mod config;
pub mod dtn;
pub mod eig;
pub mod error;
pub mod inversion;
pub mod radial;
pub mod report;
pub mod scattering;
pub mod specfun;
pub mod verify;
pub mod weyl;

pub use error::{Error, Result};

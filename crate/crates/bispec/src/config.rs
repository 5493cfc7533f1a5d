//! Experiment configuration: a plain TOML key-value schema validated in full
//! before any computation starts.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inversion::{CutoffMode, Pairing};
use crate::radial::PotentialDescriptor;
use crate::scattering::Grouping;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub radius: f64,
    pub grid_n: usize,
    pub lmax: usize,
    pub k_per_channel: usize,
    /// base potential V1
    pub v1: PotentialDescriptor,
    /// V2 family: V2 = V1 + amplitude * bump(center, width)
    pub bump_center: f64,
    pub bump_width: f64,
    pub amplitudes: Vec<f64>,
    /// discrepancy offset E and derivative/weight order m
    pub e: usize,
    pub m: usize,
    pub c_gap: f64,
    pub kmax: usize,
    pub zetas: Vec<f64>,
    pub xi_magnitudes: Vec<f64>,
    pub pairing: Pairing,
    pub cutoff_mode: CutoffMode,
    pub grouping: Grouping,
    pub n_xi: usize,
    pub tail_tol: f64,
    pub out_dir: String,
    pub seed: u64,
    /// 0 = library default thread count
    pub threads: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            radius: 1.0,
            grid_n: 200,
            lmax: 12,
            k_per_channel: 12,
            v1: PotentialDescriptor::Zero,
            bump_center: 0.5,
            bump_width: 0.2,
            amplitudes: vec![0.02, 0.05, 0.1],
            e: 0,
            m: 2,
            c_gap: 0.5,
            kmax: 40,
            zetas: vec![10.0, 20.0, 40.0],
            xi_magnitudes: vec![2.0],
            pairing: Pairing::Channel,
            cutoff_mode: CutoffMode::Compliant,
            grouping: Grouping::SqrtLambdaOnFirstOnly,
            n_xi: 24,
            tail_tol: 1e-6,
            out_dir: "out".into(),
            seed: 0,
            threads: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)?;
                toml::from_str(&text).map_err(|e| Error::ConfigParse(format!("{}: {e}", p.display())))
            }
        }
    }

    /// Reject every out-of-precondition value before compute starts.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::ConfigValidation(msg));
        if self.radius <= 0.0 {
            return fail(format!("radius = {} must be positive", self.radius));
        }
        if self.grid_n < 50 {
            return fail(format!("gridN = {} < 50: the radial grid cannot resolve the traces", self.grid_n));
        }
        if self.lmax < 10 {
            return fail(format!(
                "lmax = {} < 10: the dataset would be incomplete below lambdaComplete; raise lmax",
                self.lmax
            ));
        }
        if self.k_per_channel < 10 {
            return fail(format!("kPerChannel = {} < 10", self.k_per_channel));
        }
        if self.v1 == PotentialDescriptor::Sampled {
            return fail("v1: sampled potentials are not configurable; use zero or gaussian-bump".into());
        }
        if let PotentialDescriptor::GaussianBump { width, center, .. } = self.v1 {
            if width <= 0.0 || center < 0.0 || center > self.radius {
                return fail(format!("v1 bump descriptor out of range: {:?}", self.v1));
            }
        }
        if self.bump_width <= 0.0 || self.bump_center < 0.0 || self.bump_center > self.radius {
            return fail(format!(
                "bump family (center, width) = ({}, {}) out of range",
                self.bump_center, self.bump_width
            ));
        }
        if self.amplitudes.is_empty() {
            return fail("amplitudes list is empty".into());
        }
        for &a in &self.amplitudes {
            if a <= 0.0 || a > 0.2 {
                return fail(format!("amplitude {a} outside (0, 0.2]"));
            }
        }
        if self.m < 2 {
            return fail(format!("m = {} < 2: the trace series only converge absolutely for m >= 2", self.m));
        }
        if self.c_gap <= 0.0 || self.c_gap >= 1.0 {
            return fail(format!("cGap = {} outside (0, 1)", self.c_gap));
        }
        if self.kmax < 10 {
            return fail(format!("Kmax = {} < 10", self.kmax));
        }
        if self.zetas.is_empty() {
            return fail("zetas list is empty".into());
        }
        for &z in &self.zetas {
            if z < 1.0 {
                return fail(format!("zeta = {z} < 1"));
            }
        }
        let zmin = self.zetas.iter().cloned().fold(f64::INFINITY, f64::min);
        for &x in &self.xi_magnitudes {
            if x < 0.0 || x >= 2.0 * zmin {
                return fail(format!("|xi| = {x} outside [0, 2 min zeta = {})", 2.0 * zmin));
            }
        }
        if self.n_xi < 16 {
            return fail(format!("nXi = {} < 16", self.n_xi));
        }
        if self.tail_tol <= 0.0 {
            return fail(format!("tailTol = {} must be positive", self.tail_tol));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_validates() {
        ExperimentConfig::default().validate().unwrap();
    }

    #[test]
    fn rejections() {
        let bad = |f: &dyn Fn(&mut ExperimentConfig)| {
            let mut c = ExperimentConfig::default();
            f(&mut c);
            assert!(matches!(c.validate(), Err(Error::ConfigValidation(_))), "{c:?}");
        };
        bad(&|c| c.grid_n = 10);
        bad(&|c| c.lmax = 4);
        bad(&|c| c.m = 1);
        bad(&|c| c.amplitudes = vec![]);
        bad(&|c| c.amplitudes = vec![0.5]);
        bad(&|c| c.zetas = vec![0.5]);
        bad(&|c| c.xi_magnitudes = vec![100.0]);
        bad(&|c| c.c_gap = 1.5);
        bad(&|c| c.v1 = PotentialDescriptor::Sampled);
    }

    #[test]
    fn toml_roundtrip() {
        let c = ExperimentConfig::default();
        let s = toml::to_string(&c).unwrap();
        let back: ExperimentConfig = toml::from_str(&s).unwrap();
        assert_eq!(back.grid_n, c.grid_n);
        assert_eq!(back.amplitudes, c.amplitudes);
        // unknown keys rejected
        assert!(toml::from_str::<ExperimentConfig>("unknownKey = 3\n").is_err());
        // partial configs fall back to defaults
        let partial: ExperimentConfig = toml::from_str("gridN = 120\n").unwrap();
        assert_eq!(partial.grid_n, 120);
        assert_eq!(partial.lmax, c.lmax);
    }
}

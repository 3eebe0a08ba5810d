//! Strict TOML run configuration.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::operator_lab::claims::AlgebraSettings;
use crate::potentials::{PotentialSet, Profile};
use crate::quantum_numbers::{parse_sector, QuantumNumbers};
use crate::radial_solver::{GridSpec, DEFAULT_POINTS, DEFAULT_RHO_MIN};

fn default_mass() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    #[serde(default = "default_mass")]
    pub mass: f64,
    pub rho_min: Option<f64>,
    /// Outer radius; chosen per sector from the energy window when absent.
    pub rho_max: Option<f64>,
    pub grid_points: Option<usize>,
}

impl Default for ProblemSection {
    fn default() -> Self {
        ProblemSection { mass: default_mass(), rho_min: None, rho_max: None, grid_points: None }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSection {
    pub sigma: Option<Profile>,
    pub delta: Option<Profile>,
    pub phi: Option<Profile>,
    pub tensor: Option<Profile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    /// Sector labels `"k,mj"`.
    pub sectors: Vec<String>,
    pub energy_window: [f64; 2],
    pub max_nodes: usize,
    /// Run degeneracy checks even when the symmetry predicate is false.
    #[serde(default)]
    pub allow_broken_symmetry: bool,
    /// Number of pairs whose ladder overlap is computed.
    #[serde(default)]
    pub ladder_checks: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub problem: ProblemSection,
    #[serde(default)]
    pub potential: PotentialSection,
    pub scan: Option<ScanSection>,
    #[serde(default)]
    pub algebra: AlgebraSettings,
    /// SHA-256 of the source text.
    #[serde(skip)]
    pub digest: String,
}

pub fn digest_text(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.digest = digest_text(text);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        RunConfig::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.problem;
        if !(p.mass.is_finite() && p.mass > 0.0) {
            return Err(Error::Config(format!("problem.mass must be finite and positive, got {}", p.mass)));
        }
        for (name, v) in [("rho_min", p.rho_min), ("rho_max", p.rho_max)] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::Config(format!("problem.{name} must be finite and positive, got {v}")));
                }
            }
        }
        self.potentials()?;
        if let Some(scan) = &self.scan {
            let [lo, hi] = scan.energy_window;
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::Config(format!("scan.energy_window [{lo}, {hi}] must be finite and increasing")));
            }
            if scan.sectors.is_empty() {
                return Err(Error::Config("scan.sectors is empty".into()));
            }
            self.sectors()?;
        }
        self.algebra.validate()
    }

    pub fn potentials(&self) -> Result<PotentialSet> {
        let pick = |p: &Option<Profile>| p.clone().unwrap_or(Profile::Zero);
        let set = PotentialSet {
            mass: self.problem.mass,
            sigma: pick(&self.potential.sigma),
            delta: pick(&self.potential.delta),
            phi: pick(&self.potential.phi),
            tensor: pick(&self.potential.tensor),
        };
        set.validate().map_err(|e| Error::Config(format!("potential: {e}")))?;
        Ok(set)
    }

    pub fn scan(&self) -> Result<&ScanSection> {
        self.scan.as_ref().ok_or_else(|| Error::Config("missing [scan] section".into()))
    }

    pub fn sectors(&self) -> Result<Vec<QuantumNumbers>> {
        self.scan()?
            .sectors
            .iter()
            .map(|s| parse_sector(s).map_err(|e| Error::Config(format!("scan.sectors entry {s:?}: {e}"))))
            .collect()
    }

    pub fn window(&self) -> Result<(f64, f64)> {
        let [lo, hi] = self.scan()?.energy_window;
        Ok((lo, hi))
    }

    pub fn grid_spec(&self) -> GridSpec {
        GridSpec {
            rho_min: self.problem.rho_min.unwrap_or(DEFAULT_RHO_MIN),
            rho_max: self.problem.rho_max,
            points: self.problem.grid_points.unwrap_or(DEFAULT_POINTS),
        }
    }
}

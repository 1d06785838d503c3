//! Experiment configuration, read from a TOML document with one table per
//! module. Unknown keys are rejected so a typo never silently falls back to
//! a default.
//!
//! ```toml
//! [experiment]
//! algorithm = "bbo"
//! trials = 5
//! seed = 42
//! workers = 4
//!
//! [bbo]
//! population = 50
//! iterations = 30
//! emigration = "linear"
//! ```
//!
//! Omitted tables and keys take the defaults of the corresponding types.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::archive::ArchiveConfig;
use crate::bbo::BboConfig;
use crate::control::{PdGains, Reference, SimSettings};
use crate::dynamics::{DroneParams, DroneState};
use crate::error::{Error, Result};
use crate::evolution::Bounds;
use crate::objectives::{Weights, DRONE_OBJECTIVES};
use crate::problem::DroneProblem;
use crate::pso::PsoConfig;

/// The six optimizers.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    #[default]
    Bbo,
    Pso,
    Vebbo,
    Vepso,
    Nsbbo,
    Nspso,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Self::Bbo,
        Self::Pso,
        Self::Vebbo,
        Self::Vepso,
        Self::Nsbbo,
        Self::Nspso,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Bbo => "bbo",
            Self::Pso => "pso",
            Self::Vebbo => "vebbo",
            Self::Vepso => "vepso",
            Self::Nsbbo => "nsbbo",
            Self::Nspso => "nspso",
        }
    }

    pub fn is_multi_objective(self) -> bool {
        !matches!(self, Self::Bbo | Self::Pso)
    }

    pub fn is_bbo(self) -> bool {
        matches!(self, Self::Bbo | Self::Vebbo | Self::Nsbbo)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|a| a.name() == lower)
            .ok_or_else(|| Error::UnknownAlgorithm(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSection {
    pub algorithm: Algorithm,
    pub trials: usize,
    pub seed: u64,
    pub workers: usize,
    /// Inject the conventional gains as population member 0.
    pub seed_conventional: bool,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Bbo,
            trials: 5,
            seed: 42,
            workers: 1,
            seed_conventional: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationSection {
    pub dt: f64,
    pub t_final: f64,
    /// `[x, y, z]` in metres.
    pub init_position: [f64; 3],
    /// `[phi, theta, psi]` in radians.
    pub init_attitude: [f64; 3],
    /// Set-point `[z, phi, theta, psi]`.
    pub reference: [f64; 4],
}

impl Default for SimulationSection {
    fn default() -> Self {
        Self::from(&SimSettings::default())
    }
}

impl From<&SimSettings> for SimulationSection {
    fn from(s: &SimSettings) -> Self {
        let r = s.reference;
        Self {
            dt: s.dt,
            t_final: s.t_final,
            init_position: s.init.pos.into(),
            init_attitude: s.init.eta.into(),
            reference: [r.z, r.phi, r.theta, r.psi],
        }
    }
}

impl SimulationSection {
    pub fn settings(&self) -> SimSettings {
        let [z, phi, theta, psi] = self.reference;
        SimSettings {
            dt: self.dt,
            t_final: self.t_final,
            init: DroneState::at_rest(
                Vector3::from(self.init_position),
                Vector3::from(self.init_attitude),
            ),
            reference: Reference { z, phi, theta, psi },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsSection {
    pub values: Vec<f64>,
}

impl Default for WeightsSection {
    fn default() -> Self {
        Self {
            values: Weights::uniform(DRONE_OBJECTIVES).0,
        }
    }
}

/// Everything needed to reproduce a campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub drone: DroneParams,
    #[serde(default)]
    pub simulation: SimulationSection,
    #[serde(default = "Bounds::pd_gains")]
    pub bounds: Bounds,
    #[serde(default)]
    pub bbo: BboConfig,
    #[serde(default)]
    pub pso: PsoConfig,
    #[serde(default)]
    pub archive: ArchiveConfig,
    #[serde(default)]
    pub weights: WeightsSection,
    /// Gains for single rollouts; the optimizers ignore them.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gains: Option<PdGains>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: ExperimentSection::default(),
            drone: DroneParams::default(),
            simulation: SimulationSection::default(),
            bounds: Bounds::pd_gains(),
            bbo: BboConfig::default(),
            pso: PsoConfig::default(),
            archive: ArchiveConfig::default(),
            weights: WeightsSection::default(),
            gains: None,
        }
    }
}

impl ExperimentConfig {
    /// Parses and validates.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let e = &self.experiment;
        if e.trials < 1 {
            return Err(Error::invalid("trials", "need at least 1 trial"));
        }
        if e.workers < 1 {
            return Err(Error::invalid("workers", "need at least 1 worker"));
        }
        self.drone.validate()?;
        self.settings().validate()?;
        self.bounds.validate()?;
        if self.bounds.dim() != PdGains::DIM {
            return Err(Error::DimensionMismatch {
                expected: PdGains::DIM,
                got: self.bounds.dim(),
            });
        }
        self.bbo.validate()?;
        self.pso.validate()?;
        self.archive.validate()?;
        let w = self.weights();
        w.validate()?;
        if w.len() != DRONE_OBJECTIVES {
            return Err(Error::DimensionMismatch {
                expected: DRONE_OBJECTIVES,
                got: w.len(),
            });
        }
        if let Some(g) = &self.gains {
            g.validate()?;
        }
        Ok(())
    }

    pub fn settings(&self) -> SimSettings {
        self.simulation.settings()
    }

    pub fn weights(&self) -> Weights {
        Weights(self.weights.values.clone())
    }

    pub fn problem(&self) -> DroneProblem {
        DroneProblem {
            params: self.drone,
            settings: self.settings(),
            bounds: self.bounds.clone(),
            seed: self
                .experiment
                .seed_conventional
                .then(PdGains::conventional),
        }
    }

    /// Population size of the selected algorithm.
    pub fn population(&self) -> usize {
        if self.experiment.algorithm.is_bbo() {
            self.bbo.population
        } else {
            self.pso.population
        }
    }

    /// Iteration count of the selected algorithm.
    pub fn iterations(&self) -> usize {
        if self.experiment.algorithm.is_bbo() {
            self.bbo.iterations
        } else {
            self.pso.iterations
        }
    }

    /// Sets the population of both families.
    pub fn set_population(&mut self, n: usize) {
        self.bbo.population = n;
        self.pso.population = n;
    }

    /// Sets the iteration count of both families.
    pub fn set_iterations(&mut self, n: usize) {
        self.bbo.iterations = n;
        self.pso.iterations = n;
    }
}

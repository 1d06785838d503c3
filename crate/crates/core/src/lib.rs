//! Quadrotor PD gain tuning.
//!
//! A deterministic rigid-body drone simulator driven by a PD controller,
//! biogeography-based and particle-swarm optimizers in aggregated,
//! vector-evaluated and non-dominated-sorting flavours, and Pareto-front
//! metrics with a reproducible experiment harness.
//!
//! Module map:
//!
//! | module | contents |
//! |--------|----------|
//! | [`dynamics`] | airframe parameters, equations of motion, RK4 step |
//! | [`control`] | PD law, closed-loop rollouts, trajectory export |
//! | [`objectives`] | tracking-error integrals, weighted aggregation |
//! | [`evolution`] | bounds, individuals, seeded streams, batch evaluation |
//! | [`pareto`] | dominance, sorting, crowding, front metrics |
//! | [`archive`] | grid-managed non-dominated archive |
//! | [`pso`] / [`bbo`] | the six optimizers |
//! | [`harness`] | campaigns, sweeps, timing, config and CSV reports |

pub mod archive;
pub mod bbo;
pub mod control;
pub mod dynamics;
pub mod error;
pub mod evolution;
pub mod harness;
pub mod objectives;
pub mod pareto;
pub mod problem;
pub mod pso;

pub use archive::{Archive, ArchiveConfig};
pub use bbo::{BboConfig, EmigrationModel};
pub use control::{pd_law, simulate, PdGains, Reference, SimSettings, Trajectory};
pub use dynamics::{ControlInput, DroneParams, DroneState};
pub use error::{Error, Result};
pub use evolution::{Bounds, Evaluator, Individual, RngStream};
pub use objectives::{aggregate, evaluate_objectives, ObjectiveVector, Weights};
pub use pareto::{normalized_hypervolume, relative_coverage, Dominance, ParetoFront};
pub use problem::{DroneProblem, Problem, Sphere, SphereFamily};
pub use pso::PsoConfig;

/// Outcome of an aggregated (single-scalar) run.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarRun {
    pub best: Individual,
    /// Best cost after each iteration; length equals the iteration count.
    pub history: Vec<f64>,
}

/// Outcome of a Pareto run.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoRun {
    pub front: ParetoFront,
    /// Lowest weighted-sum cost in the archive after each iteration.
    pub history: Vec<f64>,
}

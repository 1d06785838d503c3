//! Multi-trial campaigns, parameter sweeps and worker-count timing.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::archive::Archive;
use crate::bbo::{run_bbo, run_nsbbo_observed, run_vebbo_observed, EmigrationModel};
use crate::control::{simulate, PdGains, Trajectory};
use crate::error::{Error, Result};
use crate::evolution::{derive_seed, Evaluator};
use crate::objectives::ObjectiveVector;
use crate::pareto::ParetoFront;
use crate::problem::Problem;
use crate::pso::{run_nspso_observed, run_pso, run_vepso_observed};

use super::config::{Algorithm, ExperimentConfig};

/// Minimum, maximum, mean and sample standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// `n - 1` denominator; 0 for a single value.
    pub std: f64,
}

impl Summary {
    /// Panics on an empty slice.
    pub fn of(values: &[f64]) -> Self {
        assert!(!values.is_empty(), "summary of nothing");
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self {
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean,
            std,
        }
    }
}

/// Outcome of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialReport {
    pub trial: usize,
    pub seed: u64,
    /// Best cost after each iteration.
    pub history: Vec<f64>,
    /// Final archive of a multi-objective run.
    pub front: Option<ParetoFront>,
    pub best_gains: PdGains,
    pub best_objectives: ObjectiveVector,
    /// Weighted-sum cost of `best_gains`.
    pub final_cost: f64,
    pub seconds: f64,
}

impl TrialReport {
    /// Equality of everything except the wall-clock time.
    pub fn same_results(&self, other: &Self) -> bool {
        Self {
            seconds: other.seconds,
            ..self.clone()
        } == *other
    }
}

/// Pointwise mean and standard deviation of one signal across trials.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Band {
    pub times: Vec<f64>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Band {
    /// Samples beyond the shortest series (an aborted rollout) are dropped.
    fn across(times: &[f64], series: &[Vec<f64>]) -> Self {
        let n = series
            .iter()
            .map(Vec::len)
            .min()
            .unwrap_or(0)
            .min(times.len());
        let mut band = Self {
            times: times[..n].to_vec(),
            mean: Vec::with_capacity(n),
            std: Vec::with_capacity(n),
        };
        for k in 0..n {
            let column: Vec<f64> = series.iter().map(|s| s[k]).collect();
            let s = Summary::of(&column);
            band.mean.push(s.mean);
            band.std.push(s.std);
        }
        band
    }
}

/// Bands of the best-gains rollouts.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrajectoryBands {
    pub z: Band,
    pub theta: Band,
    pub phi: Band,
    pub thrust: Band,
}

impl TrajectoryBands {
    pub fn from_rollouts(rollouts: &[Trajectory]) -> Self {
        let Some(longest) = rollouts.iter().max_by_key(|t| t.len()) else {
            return Self::default();
        };
        let times = &longest.times;
        let signal = |f: &dyn Fn(&Trajectory, usize) -> f64| -> Band {
            let series: Vec<Vec<f64>> = rollouts
                .iter()
                .map(|t| (0..t.len()).map(|k| f(t, k)).collect())
                .collect();
            Band::across(times, &series)
        };
        Self {
            z: signal(&|t, k| t.states[k].pos.z),
            theta: signal(&|t, k| t.states[k].eta.y),
            phi: signal(&|t, k| t.states[k].eta.x),
            thrust: signal(&|t, k| t.inputs[k].thrust),
        }
    }
}

/// All trials of one configuration plus their statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignReport {
    pub algorithm: Algorithm,
    pub trials: Vec<TrialReport>,
    /// Over the trials' final costs.
    pub final_cost: Summary,
    /// Across trials, one entry per iteration.
    pub per_iteration: Vec<Summary>,
    pub trajectories: TrajectoryBands,
}

impl CampaignReport {
    /// Rebuilds the statistics from the stored trials.
    pub fn recompute(&self) -> (Summary, Vec<Summary>) {
        statistics(&self.trials)
    }

    /// Equality ignoring wall-clock times.
    pub fn same_results(&self, other: &Self) -> bool {
        self.algorithm == other.algorithm
            && self.final_cost == other.final_cost
            && self.per_iteration == other.per_iteration
            && self.trajectories == other.trajectories
            && self.trials.len() == other.trials.len()
            && self
                .trials
                .iter()
                .zip(&other.trials)
                .all(|(a, b)| a.same_results(b))
    }

    pub fn final_costs(&self) -> Vec<f64> {
        self.trials.iter().map(|t| t.final_cost).collect()
    }

    pub fn total_seconds(&self) -> f64 {
        self.trials.iter().map(|t| t.seconds).sum()
    }
}

fn statistics(trials: &[TrialReport]) -> (Summary, Vec<Summary>) {
    let finals: Vec<f64> = trials.iter().map(|t| t.final_cost).collect();
    let iterations = trials.iter().map(|t| t.history.len()).min().unwrap_or(0);
    let per_iteration = (0..iterations)
        .map(|k| Summary::of(&trials.iter().map(|t| t.history[k]).collect::<Vec<_>>()))
        .collect();
    (Summary::of(&finals), per_iteration)
}

/// Archive check invoked after every iteration of the multi-objective
/// optimizers with `(trial, iteration, archive)`.
pub type ArchiveObserver<'a> = dyn FnMut(usize, usize, &Archive) + 'a;

/// Runs `config.experiment.trials` independent trials.
pub fn run_campaign(config: &ExperimentConfig) -> Result<CampaignReport> {
    run_campaign_observed(config, &mut |_, _, _| {})
}

/// [`run_campaign`] with an archive observer.
pub fn run_campaign_observed(
    config: &ExperimentConfig,
    observer: &mut ArchiveObserver<'_>,
) -> Result<CampaignReport> {
    config.validate()?;
    let problem = config.problem();
    let eval = Evaluator::new(&problem, config.weights(), config.experiment.workers)?;
    let algorithm = config.experiment.algorithm;

    let mut trials = Vec::with_capacity(config.experiment.trials);
    let mut rollouts = Vec::with_capacity(config.experiment.trials);
    for trial in 0..config.experiment.trials {
        let seed = derive_seed(config.experiment.seed, trial as u64);
        let started = Instant::now();
        let mut obs = |it: usize, a: &Archive| observer(trial, it, a);
        let (history, front, best) = match algorithm {
            Algorithm::Bbo => {
                let r = run_bbo(&eval, &config.bbo, seed)?;
                (r.history, None, r.best)
            }
            Algorithm::Pso => {
                let r = run_pso(&eval, &config.pso, seed)?;
                (r.history, None, r.best)
            }
            moo => {
                let r = match moo {
                    Algorithm::Vebbo => run_vebbo_observed(&eval, &config.bbo, seed, &mut obs)?,
                    Algorithm::Nsbbo => run_nsbbo_observed(&eval, &config.bbo, seed, &mut obs)?,
                    Algorithm::Vepso => {
                        run_vepso_observed(&eval, &config.pso, &config.archive, seed, &mut obs)?
                    }
                    _ => run_nspso_observed(&eval, &config.pso, &config.archive, seed, &mut obs)?,
                };
                let best = r
                    .front
                    .members
                    .iter()
                    .min_by(|a, b| a.cost.total_cmp(&b.cost))
                    .cloned()
                    .ok_or(Error::EmptyFront)?;
                (r.history, Some(r.front), best)
            }
        };
        let seconds = started.elapsed().as_secs_f64().max(f64::MIN_POSITIVE);
        let best_gains = PdGains::from_slice(&best.genes)?;
        rollouts.push(simulate(&best_gains, &problem.params, &problem.settings)?);
        trials.push(TrialReport {
            trial,
            seed,
            history,
            front,
            best_gains,
            best_objectives: best.objectives().clone(),
            final_cost: best.cost,
            seconds,
        });
    }

    let (final_cost, per_iteration) = statistics(&trials);
    Ok(CampaignReport {
        algorithm,
        trials,
        final_cost,
        per_iteration,
        trajectories: TrajectoryBands::from_rollouts(&rollouts),
    })
}

/// Cost of the conventional gains under `config`.
pub fn baseline_cost(config: &ExperimentConfig) -> Result<f64> {
    config.validate()?;
    let problem = config.problem();
    let eval = Evaluator::new(&problem, config.weights(), 1)?;
    Ok(eval.cost(&problem.evaluate(&PdGains::conventional().to_array())))
}

/// Parameters a sweep may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Population,
    Emigration,
    C1,
    C2,
    Inertia,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            Self::Population => "population",
            Self::Emigration => "emigration",
            Self::C1 => "c1",
            Self::C2 => "c2",
            Self::Inertia => "w",
        }
    }

    /// Applies one textual `value` to `config`.
    pub fn apply(self, config: &mut ExperimentConfig, value: &str) -> Result<()> {
        let number = || -> Result<f64> {
            value.trim().parse::<f64>().map_err(|_| {
                Error::invalid("sweep", format!("{}: bad value {value:?}", self.name()))
            })
        };
        match self {
            Self::Population => {
                let n = value.trim().parse::<usize>().map_err(|_| {
                    Error::invalid("sweep", format!("population: bad value {value:?}"))
                })?;
                config.set_population(n);
            }
            Self::Emigration => config.bbo.emigration = value.parse::<EmigrationModel>()?,
            Self::C1 => config.pso.c1 = number()?,
            Self::C2 => config.pso.c2 = number()?,
            Self::Inertia => config.pso.inertia = number()?,
        }
        Ok(())
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "population" | "pop" | "p_s" => Ok(Self::Population),
            "emigration" => Ok(Self::Emigration),
            "c1" => Ok(Self::C1),
            "c2" => Ok(Self::C2),
            "w" | "inertia" => Ok(Self::Inertia),
            _ => Err(Error::UnknownAxis(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: String,
    pub cost: Summary,
}

/// One campaign per value of `axis`.
pub fn sensitivity_sweep(
    base: &ExperimentConfig,
    axis: &str,
    values: &[String],
) -> Result<Vec<SweepRow>> {
    let axis: SweepAxis = axis.parse()?;
    let mut rows = Vec::with_capacity(values.len());
    for value in values {
        let mut cfg = base.clone();
        axis.apply(&mut cfg, value)?;
        let report = run_campaign(&cfg)?;
        rows.push(SweepRow {
            value: value.trim().to_string(),
            cost: report.final_cost,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingRow {
    pub workers: usize,
    pub seconds: f64,
    pub evaluations_per_worker: usize,
    pub final_costs: Vec<f64>,
}

/// Runs the same campaign once per worker count.
pub fn timing_comparison(
    config: &ExperimentConfig,
    worker_counts: &[usize],
) -> Result<Vec<TimingRow>> {
    let mut rows = Vec::with_capacity(worker_counts.len());
    for &workers in worker_counts {
        let mut cfg = config.clone();
        cfg.experiment.workers = workers;
        let started = Instant::now();
        let report = run_campaign(&cfg)?;
        rows.push(TimingRow {
            workers,
            seconds: started.elapsed().as_secs_f64(),
            evaluations_per_worker: cfg.population().div_ceil(workers),
            final_costs: report.final_costs(),
        });
    }
    Ok(rows)
}

//! Biogeography-based optimizers: aggregated BBO, vector-evaluated BBO
//! (one objective active per iteration) and non-dominated-sorting BBO.
//!
//! Each generation ranks the habitats best first, assigns emigration rate
//! `E` and immigration rate `I = 1 - E` from the rank, and rebuilds every
//! non-elite habitat gene by gene: with probability `I` the gene is copied
//! from a donor picked by roulette over the other habitats' `E`. Donor genes
//! always come from the population as it was before the generation started.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::archive::Archive;
use crate::error::{Error, Result};
use crate::evolution::{
    best_index, init_population, roulette, Bounds, Evaluator, Individual, RngStream, StreamKind,
};
use crate::pareto::{crowding_distance, non_dominated_sort};
use crate::{ParetoRun, ScalarRun};

/// Shape of the emigration curve over rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmigrationModel {
    #[default]
    Linear,
    Sinusoidal,
}

impl fmt::Display for EmigrationModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Linear => "linear",
            Self::Sinusoidal => "sinusoidal",
        })
    }
}

impl FromStr for EmigrationModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(Self::Linear),
            "sinusoidal" => Ok(Self::Sinusoidal),
            other => Err(Error::invalid(
                "emigration",
                format!("expected linear or sinusoidal, got {other:?}"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BboConfig {
    pub population: usize,
    pub iterations: usize,
    /// Best habitats copied unchanged into the next generation.
    pub elites: usize,
    /// Per-gene probability of a uniform redraw.
    pub mutation: f64,
    pub emigration: EmigrationModel,
}

impl Default for BboConfig {
    fn default() -> Self {
        Self {
            population: 50,
            iterations: 30,
            elites: 2,
            mutation: 0.01,
            emigration: EmigrationModel::Linear,
        }
    }
}

impl BboConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(Error::invalid("bbo", "population must be >= 2"));
        }
        if self.iterations < 1 {
            return Err(Error::invalid("bbo", "iterations must be >= 1"));
        }
        if self.elites >= self.population {
            return Err(Error::invalid(
                "bbo",
                "elites must be fewer than the population",
            ));
        }
        if !(0.0..=1.0).contains(&self.mutation) {
            return Err(Error::invalid("bbo", "mutation must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// `(emigration, immigration)` of the habitat at 1-based `rank` (1 = best)
/// in a population of `n`.
pub fn migration_rates(rank: usize, n: usize, model: EmigrationModel) -> Result<(f64, f64)> {
    if rank < 1 || rank > n {
        return Err(Error::RankOutOfRange {
            rank,
            population: n,
        });
    }
    let e = match model {
        EmigrationModel::Linear => (n + 1 - rank) as f64 / (n + 1) as f64,
        EmigrationModel::Sinusoidal => {
            0.5 * (1.0 + (std::f64::consts::PI * rank as f64 / n as f64).cos())
        }
    };
    Ok((e, 1.0 - e))
}

/// Rebuilds habitat `target` from the snapshot `old`: each gene immigrates
/// with probability `immigration` from a donor drawn by roulette over
/// `emigration` (the target itself excluded).
pub fn migrate<R: Rng + ?Sized>(
    old: &[Vec<f64>],
    target: usize,
    immigration: f64,
    emigration: &[f64],
    rng: &mut R,
) -> Vec<f64> {
    let mut weights = emigration.to_vec();
    weights[target] = 0.0;
    // a uniform fallback must still avoid self
    if !weights.iter().any(|w| *w > 0.0) {
        weights.iter_mut().for_each(|w| *w = 1.0);
        weights[target] = 0.0;
    }
    old[target]
        .iter()
        .enumerate()
        .map(|(d, &g)| {
            if rng.gen::<f64>() < immigration {
                old[roulette(&weights, rng)][d]
            } else {
                g
            }
        })
        .collect()
}

/// Redraws each gene uniformly with probability `rate`.
pub fn mutate<R: Rng + ?Sized>(genes: &mut [f64], rate: f64, bounds: &Bounds, rng: &mut R) {
    for (d, g) in genes.iter_mut().enumerate() {
        if rng.gen::<f64>() < rate {
            *g = bounds.sample(d, rng);
        }
    }
}

/// One generation on a population ranked by `order` (indices, best first).
/// The first `elites` entries of `order` are left untouched.
pub fn bbo_step(
    pop: &mut [Individual],
    order: &[usize],
    cfg: &BboConfig,
    bounds: &Bounds,
    seed: u64,
    iteration: usize,
) -> Result<()> {
    let n = pop.len();
    if order.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: order.len(),
        });
    }
    let mut emig = vec![0.0; n];
    let mut immig = vec![0.0; n];
    for (pos, &i) in order.iter().enumerate() {
        let (e, im) = migration_rates(pos + 1, n, cfg.emigration)?;
        emig[i] = e;
        immig[i] = im;
    }
    let old: Vec<Vec<f64>> = pop.iter().map(|h| h.genes.clone()).collect();
    for &i in &order[cfg.elites.min(n)..] {
        let mut rng = RngStream::for_individual(seed, StreamKind::Update, iteration, n, i).rng();
        let mut genes = migrate(&old, i, immig[i], &emig, &mut rng);
        mutate(&mut genes, cfg.mutation, bounds, &mut rng);
        if genes != old[i] {
            pop[i].reset(genes);
        }
    }
    Ok(())
}

fn order_by<F: Fn(&Individual) -> f64>(pop: &[Individual], key: F) -> Vec<usize> {
    let mut order: Vec<usize> = (0..pop.len()).collect();
    order.sort_by(|&a, &b| key(&pop[a]).total_cmp(&key(&pop[b])).then(a.cmp(&b)));
    order
}

/// Front rank first, then descending crowding distance; fills `rank` and
/// `crowding` on every member.
fn order_by_fronts(pop: &mut [Individual]) -> Vec<usize> {
    let points: Vec<Vec<f64>> = pop.iter().map(|h| h.objectives().0.clone()).collect();
    let mut order = Vec::with_capacity(pop.len());
    for (r, front) in non_dominated_sort(&points).into_iter().enumerate() {
        let dist = crowding_distance(&points, &front);
        let mut local: Vec<usize> = (0..front.len()).collect();
        local.sort_by(|&a, &b| dist[b].total_cmp(&dist[a]).then(a.cmp(&b)));
        for p in local {
            let i = front[p];
            pop[i].rank = r + 1;
            pop[i].crowding = dist[p];
            order.push(i);
        }
    }
    order
}

fn start(eval: &Evaluator, cfg: &BboConfig, seed: u64) -> Result<Vec<Individual>> {
    cfg.validate()?;
    let problem = eval.problem();
    let mut pop = init_population(
        cfg.population,
        problem.bounds(),
        seed,
        problem.seed().as_deref(),
    )?;
    eval.evaluate_population(&mut pop);
    Ok(pop)
}

/// Aggregated BBO minimizing the weighted-sum cost.
pub fn run_bbo(eval: &Evaluator, cfg: &BboConfig, seed: u64) -> Result<ScalarRun> {
    let bounds = eval.problem().bounds();
    let mut pop = start(eval, cfg, seed)?;
    let mut history = Vec::with_capacity(cfg.iterations);
    for t in 0..cfg.iterations {
        if t > 0 {
            let order = order_by(&pop, |h| h.cost);
            bbo_step(&mut pop, &order, cfg, bounds, seed, t - 1)?;
            eval.evaluate_population(&mut pop);
        }
        history.push(pop[best_index(&pop)].cost);
    }
    let best = pop[best_index(&pop)].clone();
    Ok(ScalarRun { best, history })
}

fn archive_best(archive: &Archive) -> f64 {
    archive
        .members()
        .iter()
        .map(|m| m.cost)
        .fold(f64::INFINITY, f64::min)
}

fn run_moo(
    eval: &Evaluator,
    cfg: &BboConfig,
    seed: u64,
    rank: &mut dyn FnMut(usize, &mut [Individual]) -> Vec<usize>,
    observer: &mut dyn FnMut(usize, &Archive),
) -> Result<ParetoRun> {
    let bounds = eval.problem().bounds();
    let mut pop = start(eval, cfg, seed)?;
    let mut archive = Archive::unbounded();
    // the unbounded archive never truncates, so this stream is never drawn
    let mut unused = RngStream::new(seed, 0).rng();
    let mut history = Vec::with_capacity(cfg.iterations);
    for t in 0..cfg.iterations {
        if t > 0 {
            let order = rank(t - 1, &mut pop);
            bbo_step(&mut pop, &order, cfg, bounds, seed, t - 1)?;
            eval.evaluate_population(&mut pop);
        }
        archive.update(&pop, &mut unused);
        history.push(archive_best(&archive));
        observer(t, &archive);
    }
    Ok(ParetoRun {
        front: archive.to_front(),
        history,
    })
}

/// Vector-evaluated BBO.
pub fn run_vebbo(eval: &Evaluator, cfg: &BboConfig, seed: u64) -> Result<ParetoRun> {
    run_vebbo_observed(eval, cfg, seed, &mut |_, _| {})
}

/// [`run_vebbo`] calling `observer(iteration, archive)` after every
/// iteration. Generation `t` ranks habitats by objective `t mod k` alone.
pub fn run_vebbo_observed(
    eval: &Evaluator,
    cfg: &BboConfig,
    seed: u64,
    observer: &mut dyn FnMut(usize, &Archive),
) -> Result<ParetoRun> {
    let k = eval.num_objectives();
    run_moo(
        eval,
        cfg,
        seed,
        &mut |t, pop| {
            let j = t % k;
            order_by(pop, |h| h.objectives()[j])
        },
        observer,
    )
}

/// Non-dominated-sorting BBO.
pub fn run_nsbbo(eval: &Evaluator, cfg: &BboConfig, seed: u64) -> Result<ParetoRun> {
    run_nsbbo_observed(eval, cfg, seed, &mut |_, _| {})
}

/// [`run_nsbbo`] calling `observer(iteration, archive)` after every
/// iteration. Habitats are ranked by front, then by crowding distance.
pub fn run_nsbbo_observed(
    eval: &Evaluator,
    cfg: &BboConfig,
    seed: u64,
    observer: &mut dyn FnMut(usize, &Archive),
) -> Result<ParetoRun> {
    run_moo(
        eval,
        cfg,
        seed,
        &mut |_, pop| order_by_fronts(pop),
        observer,
    )
}

//! Particle swarm optimizers: aggregated PSO, vector-evaluated PSO with a
//! ring of single-objective swarms, and non-dominated-sorting PSO.
//!
//! All three share the same velocity update:
//!
//! ```text
//! v <- w v + c1 r1 (y - x) + c2 r2 (y_hat - x)
//! x <- x + v
//! ```
//!
//! with fresh uniform `r1, r2` per particle and dimension, `y` the personal
//! best and `y_hat` the social attractor. Positions are clamped to the bounds
//! and the inertia decays geometrically, `w_n = w_0 * damping^n`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::archive::{select_leader, Archive, ArchiveConfig};
use crate::error::{Error, Result};
use crate::evolution::{
    best_index, clamp, init_population, Bounds, Evaluator, Individual, RngStream, StreamKind,
};
use crate::pareto::{non_dominated_sort, select_by_rank_and_crowding, strictly_dominates};
use crate::{ParetoRun, ScalarRun};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PsoConfig {
    pub population: usize,
    pub iterations: usize,
    pub inertia: f64,
    pub damping: f64,
    pub c1: f64,
    pub c2: f64,
    /// Per-dimension velocity cap.
    pub v_max: Option<Vec<f64>>,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            population: 50,
            iterations: 30,
            inertia: 0.5,
            damping: 0.99,
            c1: 2.0,
            c2: 2.0,
            v_max: None,
        }
    }
}

impl PsoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(Error::invalid("pso", "population must be >= 2"));
        }
        if self.iterations < 1 {
            return Err(Error::invalid("pso", "iterations must be >= 1"));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::invalid("pso", "damping must lie in (0, 1]"));
        }
        // negative inertia is allowed
        if ![self.inertia, self.c1, self.c2]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(Error::invalid("pso", "inertia, c1 and c2 must be finite"));
        }
        if let Some(vm) = &self.v_max {
            if vm.iter().any(|v| v.is_nan() || *v <= 0.0) {
                return Err(Error::invalid("pso", "v_max entries must be > 0"));
            }
        }
        Ok(())
    }

    /// Inertia weight after `n` completed iterations.
    pub fn inertia_at(&self, n: usize) -> f64 {
        self.inertia * self.damping.powi(n as i32)
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        match &self.v_max {
            Some(vm) if vm.len() != dim => Err(Error::DimensionMismatch {
                expected: dim,
                got: vm.len(),
            }),
            _ => Ok(()),
        }
    }
}

/// Velocity and memory of one particle.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleState {
    pub velocity: Vec<f64>,
    pub personal_best: Individual,
}

/// Coefficients of one velocity update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepCoefficients {
    pub inertia: f64,
    pub c1: f64,
    pub c2: f64,
}

/// Moves one particle toward its personal best and `leader`. Returns the new
/// position; `velocity` is updated in place.
#[allow(clippy::too_many_arguments)]
pub fn move_particle<R: Rng + ?Sized>(
    position: &[f64],
    velocity: &mut [f64],
    personal_best: &[f64],
    leader: &[f64],
    k: StepCoefficients,
    v_max: Option<&[f64]>,
    bounds: &Bounds,
    rng: &mut R,
) -> Vec<f64> {
    let mut next = Vec::with_capacity(position.len());
    for d in 0..position.len() {
        let r1: f64 = rng.gen();
        let r2: f64 = rng.gen();
        let x = position[d];
        let mut v = k.inertia * velocity[d]
            + k.c1 * r1 * (personal_best[d] - x)
            + k.c2 * r2 * (leader[d] - x);
        if let Some(vm) = v_max {
            v = v.clamp(-vm[d], vm[d]);
        }
        velocity[d] = v;
        next.push(x + v);
    }
    clamp(&mut next, bounds);
    next
}

/// One synchronous swarm update toward the shared attractor `leader`.
/// Particle `i` draws from stream `iteration * N + i`.
pub fn pso_step(
    positions: &mut [Individual],
    states: &mut [ParticleState],
    leader: &[f64],
    cfg: &PsoConfig,
    bounds: &Bounds,
    seed: u64,
    iteration: usize,
) {
    let k = StepCoefficients {
        inertia: cfg.inertia_at(iteration),
        c1: cfg.c1,
        c2: cfg.c2,
    };
    let n = positions.len();
    for (i, (pos, st)) in positions.iter_mut().zip(states.iter_mut()).enumerate() {
        let mut rng = RngStream::for_individual(seed, StreamKind::Update, iteration, n, i).rng();
        let next = move_particle(
            &pos.genes,
            &mut st.velocity,
            &st.personal_best.genes,
            leader,
            k,
            cfg.v_max.as_deref(),
            bounds,
            &mut rng,
        );
        pos.reset(next);
    }
}

fn fresh_states(positions: &[Individual]) -> Vec<ParticleState> {
    positions
        .iter()
        .map(|p| ParticleState {
            velocity: vec![0.0; p.genes.len()],
            personal_best: p.clone(),
        })
        .collect()
}

/// Aggregated PSO minimizing the weighted-sum cost.
pub fn run_pso(eval: &Evaluator, cfg: &PsoConfig, seed: u64) -> Result<ScalarRun> {
    cfg.validate()?;
    let problem = eval.problem();
    let bounds = problem.bounds();
    cfg.check_dim(bounds.dim())?;

    let mut positions = init_population(cfg.population, bounds, seed, problem.seed().as_deref())?;
    eval.evaluate_population(&mut positions);
    let mut states = fresh_states(&positions);
    let mut global = positions[best_index(&positions)].clone();
    let mut history = Vec::with_capacity(cfg.iterations);

    for t in 0..cfg.iterations {
        if t > 0 {
            pso_step(
                &mut positions,
                &mut states,
                &global.genes,
                cfg,
                bounds,
                seed,
                t - 1,
            );
            eval.evaluate_population(&mut positions);
            for (pos, st) in positions.iter().zip(states.iter_mut()) {
                if pos.cost < st.personal_best.cost {
                    st.personal_best = pos.clone();
                }
            }
        }
        for st in &states {
            if st.personal_best.cost < global.cost {
                global = st.personal_best.clone();
            }
        }
        history.push(global.cost);
    }
    Ok(ScalarRun {
        best: global,
        history,
    })
}

/// With probability `rate`, redraws one uniformly chosen gene of `genes`.
pub fn mutate_leader<R: Rng + ?Sized>(genes: &mut [f64], rate: f64, bounds: &Bounds, rng: &mut R) {
    if rng.gen::<f64>() < rate {
        let d = rng.gen_range(0..genes.len());
        genes[d] = bounds.sample(d, rng);
    }
}

/// Splits `n` into `k` nearly equal contiguous chunk sizes.
fn split_sizes(n: usize, k: usize) -> Vec<usize> {
    (0..k).map(|j| n / k + usize::from(j < n % k)).collect()
}

fn archive_stream(seed: u64, iteration: usize) -> rand_chacha::ChaCha8Rng {
    RngStream::for_individual(seed, StreamKind::Archive, iteration, 1, 0).rng()
}

fn archive_best(archive: &Archive) -> f64 {
    archive
        .members()
        .iter()
        .map(|m| m.cost)
        .fold(f64::INFINITY, f64::min)
}

/// Vector-evaluated PSO.
pub fn run_vepso(
    eval: &Evaluator,
    cfg: &PsoConfig,
    archive_cfg: &ArchiveConfig,
    seed: u64,
) -> Result<ParetoRun> {
    run_vepso_observed(eval, cfg, archive_cfg, seed, &mut |_, _| {})
}

/// [`run_vepso`] calling `observer(iteration, archive)` after every iteration.
///
/// The population is split into one swarm per objective. Swarm `j` ranks its
/// particles by objective `j` alone and is pulled toward the best particle
/// of swarm `(j + 1) mod k`.
pub fn run_vepso_observed(
    eval: &Evaluator,
    cfg: &PsoConfig,
    archive_cfg: &ArchiveConfig,
    seed: u64,
    observer: &mut dyn FnMut(usize, &Archive),
) -> Result<ParetoRun> {
    cfg.validate()?;
    archive_cfg.validate()?;
    let problem = eval.problem();
    let bounds = problem.bounds();
    cfg.check_dim(bounds.dim())?;
    let k = eval.num_objectives();
    if cfg.population < k {
        return Err(Error::invalid(
            "pso",
            format!("population {} cannot form {k} swarms", cfg.population),
        ));
    }
    let n = cfg.population;

    let mut positions = init_population(n, bounds, seed, problem.seed().as_deref())?;
    eval.evaluate_population(&mut positions);
    let mut states = fresh_states(&positions);
    let sizes = split_sizes(n, k);
    let offsets: Vec<usize> = sizes
        .iter()
        .scan(0, |acc, s| {
            let o = *acc;
            *acc += s;
            Some(o)
        })
        .collect();

    let mut archive = Archive::bounded(*archive_cfg);
    let mut history = Vec::with_capacity(cfg.iterations);

    for t in 0..cfg.iterations {
        if t > 0 {
            // swarm bests by their own objective, taken before anyone moves
            let bests: Vec<Vec<f64>> = (0..k)
                .map(|j| {
                    let range = offsets[j]..offsets[j] + sizes[j];
                    states[range]
                        .iter()
                        .min_by(|a, b| {
                            a.personal_best.objectives()[j]
                                .total_cmp(&b.personal_best.objectives()[j])
                        })
                        .map(|s| s.personal_best.genes.clone())
                        .expect("swarms are non-empty")
                })
                .collect();
            let coeffs = StepCoefficients {
                inertia: cfg.inertia_at(t - 1),
                c1: cfg.c1,
                c2: cfg.c2,
            };
            for j in 0..k {
                let attractor = &bests[(j + 1) % k];
                for i in offsets[j]..offsets[j] + sizes[j] {
                    let mut rng =
                        RngStream::for_individual(seed, StreamKind::Update, t - 1, n, i).rng();
                    let mut leader = attractor.clone();
                    mutate_leader(&mut leader, archive_cfg.mutation, bounds, &mut rng);
                    let st = &mut states[i];
                    let next = move_particle(
                        &positions[i].genes,
                        &mut st.velocity,
                        &st.personal_best.genes,
                        &leader,
                        coeffs,
                        cfg.v_max.as_deref(),
                        bounds,
                        &mut rng,
                    );
                    positions[i].reset(next);
                }
            }
            eval.evaluate_population(&mut positions);
            for j in 0..k {
                for i in offsets[j]..offsets[j] + sizes[j] {
                    if positions[i].objectives()[j] < states[i].personal_best.objectives()[j] {
                        states[i].personal_best = positions[i].clone();
                    }
                }
            }
        }
        archive.update(&positions, &mut archive_stream(seed, t));
        history.push(archive_best(&archive));
        observer(t, &archive);
    }
    Ok(ParetoRun {
        front: archive.to_front(),
        history,
    })
}

/// Non-dominated-sorting PSO.
pub fn run_nspso(
    eval: &Evaluator,
    cfg: &PsoConfig,
    archive_cfg: &ArchiveConfig,
    seed: u64,
) -> Result<ParetoRun> {
    run_nspso_observed(eval, cfg, archive_cfg, seed, &mut |_, _| {})
}

/// Updates a personal best under Pareto dominance; incomparable candidates
/// replace it with probability one half.
fn update_memory<R: Rng + ?Sized>(memory: &mut Individual, cand: &Individual, rng: &mut R) {
    let c = cand.objectives().as_slice();
    let m = memory.objectives().as_slice();
    let coin: bool = rng.gen();
    if strictly_dominates(c, m) || (!strictly_dominates(m, c) && coin) {
        *memory = cand.clone();
    }
}

/// [`run_nspso`] calling `observer(iteration, archive)` after every iteration.
///
/// Each iteration moves every particle toward its personal best and a leader
/// drawn by grid roulette from the swarm's first front, then keeps the best
/// `N` of the `2N` old and new particles by front rank and crowding distance.
pub fn run_nspso_observed(
    eval: &Evaluator,
    cfg: &PsoConfig,
    archive_cfg: &ArchiveConfig,
    seed: u64,
    observer: &mut dyn FnMut(usize, &Archive),
) -> Result<ParetoRun> {
    cfg.validate()?;
    archive_cfg.validate()?;
    let problem = eval.problem();
    let bounds = problem.bounds();
    cfg.check_dim(bounds.dim())?;
    let n = cfg.population;

    let mut positions = init_population(n, bounds, seed, problem.seed().as_deref())?;
    eval.evaluate_population(&mut positions);
    let mut states = fresh_states(&positions);
    let mut archive = Archive::bounded(*archive_cfg);
    let mut history = Vec::with_capacity(cfg.iterations);

    for t in 0..cfg.iterations {
        if t > 0 {
            let points: Vec<&[f64]> = positions
                .iter()
                .map(|p| p.objectives().as_slice())
                .collect();
            let first = non_dominated_sort(&points).swap_remove(0);
            let first_points: Vec<&[f64]> = first.iter().map(|&i| points[i]).collect();
            let coeffs = StepCoefficients {
                inertia: cfg.inertia_at(t - 1),
                c1: cfg.c1,
                c2: cfg.c2,
            };

            let mut offspring = Vec::with_capacity(n);
            let mut offspring_states = Vec::with_capacity(n);
            for i in 0..n {
                let mut lrng =
                    RngStream::for_individual(seed, StreamKind::Leader, t - 1, n, i).rng();
                let pick = first[select_leader(&first_points, archive_cfg, &mut lrng)];
                let mut leader = positions[pick].genes.clone();
                mutate_leader(&mut leader, archive_cfg.mutation, bounds, &mut lrng);

                let mut rng =
                    RngStream::for_individual(seed, StreamKind::Update, t - 1, n, i).rng();
                let mut st = states[i].clone();
                let next = move_particle(
                    &positions[i].genes,
                    &mut st.velocity,
                    &st.personal_best.genes,
                    &leader,
                    coeffs,
                    cfg.v_max.as_deref(),
                    bounds,
                    &mut rng,
                );
                offspring.push(Individual::new(next));
                offspring_states.push(st);
            }
            eval.evaluate_population(&mut offspring);
            for (i, (child, st)) in offspring
                .iter()
                .zip(offspring_states.iter_mut())
                .enumerate()
            {
                let mut rng =
                    RngStream::for_individual(seed, StreamKind::Memory, t - 1, n, i).rng();
                update_memory(&mut st.personal_best, child, &mut rng);
            }
            archive.update(&offspring, &mut archive_stream(seed, t));

            let mut pool = std::mem::take(&mut positions);
            pool.extend(offspring);
            let mut pool_states = std::mem::take(&mut states);
            pool_states.extend(offspring_states);

            let pool_points: Vec<&[f64]> = pool.iter().map(|p| p.objectives().as_slice()).collect();
            let mut keep = select_by_rank_and_crowding(&pool_points, n);
            keep.sort_unstable();
            positions = keep.iter().map(|&i| pool[i].clone()).collect();
            states = keep.iter().map(|&i| pool_states[i].clone()).collect();
        } else {
            archive.update(&positions, &mut archive_stream(seed, t));
        }
        history.push(archive_best(&archive));
        observer(t, &archive);
    }
    Ok(ParetoRun {
        front: archive.to_front(),
        history,
    })
}

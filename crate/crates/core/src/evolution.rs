//! Machinery shared by every optimizer: search-space bounds, individuals,
//! reproducible random streams and (optionally parallel) batch evaluation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objectives::{aggregate, ObjectiveVector, Weights};
use crate::problem::Problem;

/// Per-dimension box constraints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bounds {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl Bounds {
    pub fn new(min: Vec<f64>, max: Vec<f64>) -> Result<Self> {
        let b = Self { min, max };
        b.validate()?;
        Ok(b)
    }

    /// Same interval in every dimension.
    pub fn uniform(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    /// Search space for the eight PD gains.
    pub fn pd_gains() -> Self {
        Self {
            min: vec![0.0; 8],
            max: vec![20.0, 10.0, 10.0, 10.0, 10.0, 10.0, 3.0, 3.0],
        }
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.min.len() != self.max.len() {
            return Err(Error::DimensionMismatch {
                expected: self.min.len(),
                got: self.max.len(),
            });
        }
        if self.min.is_empty() {
            return Err(Error::invalid("bounds", "at least one dimension required"));
        }
        for (d, (lo, hi)) in self.min.iter().zip(&self.max).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::invalid(
                    "bounds",
                    format!("dimension {d}: need finite min <= max, got [{lo}, {hi}]"),
                ));
            }
        }
        Ok(())
    }

    pub fn contains(&self, genes: &[f64]) -> bool {
        genes.len() == self.dim()
            && genes
                .iter()
                .zip(self.min.iter().zip(&self.max))
                .all(|(g, (lo, hi))| *lo <= *g && *g <= *hi)
    }

    pub fn width(&self, d: usize) -> f64 {
        self.max[d] - self.min[d]
    }

    /// Uniform draw in dimension `d`.
    pub fn sample<R: Rng + ?Sized>(&self, d: usize, rng: &mut R) -> f64 {
        let (lo, hi) = (self.min[d], self.max[d]);
        if lo == hi {
            lo
        } else {
            (lo + rng.gen::<f64>() * (hi - lo)).clamp(lo, hi)
        }
    }
}

/// Projects `genes` onto the box in place.
pub fn clamp(genes: &mut [f64], bounds: &Bounds) {
    for ((g, lo), hi) in genes.iter_mut().zip(&bounds.min).zip(&bounds.max) {
        *g = g.clamp(*lo, *hi);
    }
}

/// A candidate solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub genes: Vec<f64>,
    /// `None` until evaluated.
    pub objectives: Option<ObjectiveVector>,
    /// Weighted-sum cost, `+inf` until evaluated.
    pub cost: f64,
    /// Non-domination level, 1-based; 0 when unassigned.
    pub rank: usize,
    pub crowding: f64,
}

impl Individual {
    pub fn new(genes: Vec<f64>) -> Self {
        Self {
            genes,
            objectives: None,
            cost: f64::INFINITY,
            rank: 0,
            crowding: 0.0,
        }
    }

    pub fn evaluated(genes: Vec<f64>, objectives: ObjectiveVector, cost: f64) -> Self {
        Self {
            objectives: Some(objectives),
            cost,
            ..Self::new(genes)
        }
    }

    pub fn is_evaluated(&self) -> bool {
        self.objectives.is_some()
    }

    /// Objective values. Panics if the individual has not been evaluated.
    pub fn objectives(&self) -> &ObjectiveVector {
        self.objectives
            .as_ref()
            .expect("individual compared before evaluation")
    }

    /// Sets new genes and clears every derived field.
    pub fn reset(&mut self, genes: Vec<f64>) {
        *self = Self::new(genes);
    }
}

/// Purpose tag mixed into stream ids so unrelated draws never share a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum StreamKind {
    Init = 1,
    Update = 2,
    Archive = 3,
    Leader = 4,
    Memory = 5,
}

/// A reproducible random stream: `(master_seed, stream_id)` fixes every draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        Self {
            master_seed,
            stream_id,
        }
    }

    /// Stream for individual `index` at `iteration`:
    /// `iteration * population + index`, tagged with `kind` in the top byte.
    pub fn for_individual(
        master_seed: u64,
        kind: StreamKind,
        iteration: usize,
        population: usize,
        index: usize,
    ) -> Self {
        let local = (iteration as u64) * (population as u64) + index as u64;
        Self::new(
            master_seed,
            ((kind as u64) << 56) | (local & ((1 << 56) - 1)),
        )
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Seed of trial `trial` under `master` (splitmix64 finalizer).
pub fn derive_seed(master: u64, trial: u64) -> u64 {
    let mut z = master.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(trial.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform population within `bounds`; member 0 is replaced by
/// `seed_individual` when given.
pub fn init_population(
    size: usize,
    bounds: &Bounds,
    master_seed: u64,
    seed_individual: Option<&[f64]>,
) -> Result<Vec<Individual>> {
    if size < 2 {
        return Err(Error::invalid(
            "population",
            format!("need at least 2, got {size}"),
        ));
    }
    bounds.validate()?;
    let mut pop: Vec<Individual> = (0..size)
        .map(|i| {
            let mut rng =
                RngStream::for_individual(master_seed, StreamKind::Init, 0, size, i).rng();
            Individual::new(
                (0..bounds.dim())
                    .map(|d| bounds.sample(d, &mut rng))
                    .collect(),
            )
        })
        .collect();
    if let Some(seed) = seed_individual {
        if seed.len() != bounds.dim() {
            return Err(Error::DimensionMismatch {
                expected: bounds.dim(),
                got: seed.len(),
            });
        }
        let mut genes = seed.to_vec();
        clamp(&mut genes, bounds);
        pop[0] = Individual::new(genes);
    }
    Ok(pop)
}

/// Evaluates problems on a fixed-size worker pool.
pub struct Evaluator<'a> {
    problem: &'a dyn Problem,
    weights: Weights,
    pool: Option<rayon::ThreadPool>,
    workers: usize,
}

impl<'a> Evaluator<'a> {
    pub fn new(problem: &'a dyn Problem, weights: Weights, workers: usize) -> Result<Self> {
        weights.validate()?;
        if weights.len() != problem.num_objectives() {
            return Err(Error::DimensionMismatch {
                expected: problem.num_objectives(),
                got: weights.len(),
            });
        }
        if workers == 0 {
            return Err(Error::invalid("workers", "need at least 1 worker"));
        }
        let pool = if workers > 1 {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(workers)
                    .build()
                    .map_err(|e| Error::invalid("workers", e.to_string()))?,
            )
        } else {
            None
        };
        Ok(Self {
            problem,
            weights,
            pool,
            workers,
        })
    }

    /// Single worker with unit weights.
    pub fn sequential(problem: &'a dyn Problem) -> Self {
        Self::new(problem, Weights::uniform(problem.num_objectives()), 1)
            .expect("unit weights are valid")
    }

    pub fn problem(&self) -> &dyn Problem {
        self.problem
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    pub fn num_objectives(&self) -> usize {
        self.problem.num_objectives()
    }

    pub fn cost(&self, obj: &ObjectiveVector) -> f64 {
        aggregate(obj, &self.weights)
    }

    fn fill(&self, ind: &mut Individual) {
        if !ind.is_evaluated() {
            let obj = self.problem.evaluate(&ind.genes);
            ind.cost = self.cost(&obj);
            ind.objectives = Some(obj);
        }
    }

    /// Fills objectives and cost of every unevaluated member. Results do not
    /// depend on the worker count.
    pub fn evaluate_population(&self, pop: &mut [Individual]) {
        match &self.pool {
            Some(pool) => pool.install(|| pop.par_iter_mut().for_each(|ind| self.fill(ind))),
            None => pop.iter_mut().for_each(|ind| self.fill(ind)),
        }
    }

    /// Number of evaluations each worker receives for a batch of `n`.
    pub fn evaluations_per_worker(&self, n: usize) -> usize {
        n.div_ceil(self.workers)
    }
}

/// Index of the lowest-cost member; ties go to the lower index.
pub fn best_index(pop: &[Individual]) -> usize {
    pop.iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.cost.total_cmp(&b.cost).then(i.cmp(j)))
        .map(|(i, _)| i)
        .expect("population is non-empty")
}

/// Roulette-wheel pick proportional to non-negative `weights`. Falls back to
/// a uniform pick when every weight is zero.
pub fn roulette<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    debug_assert!(!weights.is_empty());
    let total: f64 = weights.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return rng.gen_range(0..weights.len());
    }
    let mut target = rng.gen::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if target < *w {
            return i;
        }
        target -= w;
    }
    // rounding left a sliver past the last bucket
    weights
        .iter()
        .rposition(|w| *w > 0.0)
        .unwrap_or(weights.len() - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::PdGains;
    use crate::problem::{DroneProblem, Sphere};

    #[test]
    fn population_within_bounds() {
        let b = Bounds::pd_gains();
        let pop = init_population(50, &b, 7, None).unwrap();
        assert_eq!(pop.len(), 50);
        assert!(pop.iter().all(|ind| b.contains(&ind.genes)));
    }

    #[test]
    fn seed_individual_is_member_zero() {
        let b = Bounds::pd_gains();
        let seed = PdGains::conventional().to_array();
        let pop = init_population(50, &b, 7, Some(&seed)).unwrap();
        assert_eq!(
            pop[0].genes,
            vec![6.0, 1.75, 6.0, 1.75, 6.0, 1.75, 1.5, 2.5]
        );
    }

    #[test]
    fn degenerate_bounds_collapse() {
        let b = Bounds::uniform(3, 1.25, 1.25).unwrap();
        let pop = init_population(5, &b, 1, None).unwrap();
        assert!(pop.iter().all(|ind| ind.genes == vec![1.25; 3]));
    }

    #[test]
    fn population_size_guard() {
        assert!(init_population(1, &Bounds::pd_gains(), 0, None).is_err());
    }

    #[test]
    fn clamp_examples() {
        let b = Bounds::pd_gains();
        let mut inside = PdGains::conventional().to_array().to_vec();
        let before = inside.clone();
        clamp(&mut inside, &b);
        assert_eq!(inside, before);

        let mut g = vec![25.0, -1.0, 5.0, 5.0, 5.0, 5.0, 5.0, 5.0];
        clamp(&mut g, &b);
        assert_eq!(&g[..3], &[20.0, 0.0, 5.0]);
        assert_eq!(g[6], 3.0);
    }

    #[test]
    fn bounds_validation() {
        assert!(Bounds::new(vec![1.0], vec![0.0]).is_err());
        assert!(Bounds::new(vec![0.0, 0.0], vec![1.0]).is_err());
        assert!(Bounds::new(vec![], vec![]).is_err());
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let s1 = RngStream::for_individual(9, StreamKind::Update, 3, 50, 7);
        let s2 = RngStream::for_individual(9, StreamKind::Update, 3, 50, 7);
        let s3 = RngStream::for_individual(9, StreamKind::Update, 3, 50, 8);
        let draw = |s: RngStream| s.rng().gen::<u64>();
        assert_eq!(draw(s1), draw(s2));
        assert_ne!(draw(s1), draw(s3));
        assert_eq!(s1.stream_id & 0xFFFF, 3 * 50 + 7);
    }

    #[test]
    fn identical_individuals_identical_objectives() {
        let problem = DroneProblem::default();
        let eval = Evaluator::sequential(&problem);
        let mut pop = vec![Individual::new(PdGains::conventional().to_array().to_vec()); 3];
        eval.evaluate_population(&mut pop);
        assert_eq!(pop[0].objectives, pop[1].objectives);
        assert_eq!(pop[1].objectives, pop[2].objectives);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let problem = DroneProblem::default();
        let b = Bounds::pd_gains();
        let base = init_population(16, &b, 3, None).unwrap();
        let mut seq = base.clone();
        let mut par = base;
        Evaluator::new(&problem, Weights::uniform(4), 1)
            .unwrap()
            .evaluate_population(&mut seq);
        Evaluator::new(&problem, Weights::uniform(4), 8)
            .unwrap()
            .evaluate_population(&mut par);
        assert_eq!(seq, par);
    }

    #[test]
    fn zero_gains_get_large_cost() {
        let problem = DroneProblem::default();
        let eval = Evaluator::sequential(&problem);
        let mut pop = vec![
            Individual::new(vec![0.0; 8]),
            Individual::new(PdGains::conventional().to_array().to_vec()),
        ];
        eval.evaluate_population(&mut pop);
        assert!(pop[0].cost > 5.0 * pop[1].cost);
    }

    #[test]
    fn evaluation_skips_already_evaluated() {
        let problem = Sphere::new(2, 5.0);
        let eval = Evaluator::sequential(&problem);
        let mut pop = vec![Individual::evaluated(
            vec![1.0, 1.0],
            ObjectiveVector(vec![-7.0]),
            -7.0,
        )];
        eval.evaluate_population(&mut pop);
        assert_eq!(pop[0].cost, -7.0);
    }

    #[test]
    fn roulette_respects_zero_weights() {
        let mut rng = RngStream::new(1, 0).rng();
        for _ in 0..200 {
            let i = roulette(&[0.0, 1.0, 0.0, 3.0], &mut rng);
            assert!(i == 1 || i == 3);
        }
        assert!(roulette(&[0.0, 0.0], &mut rng) < 2);
    }

    #[test]
    fn evaluations_split_across_workers() {
        let problem = Sphere::new(2, 5.0);
        let eval = Evaluator::new(&problem, Weights::uniform(1), 4).unwrap();
        assert_eq!(eval.evaluations_per_worker(32), 8);
    }
}

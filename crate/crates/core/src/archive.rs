//! External non-dominated archive with an adaptive hypercube grid.
//!
//! The grid spans the archive's objective ranges, each widened by
//! `inflation * range` on both sides and split into `grids` cells per
//! objective. Leaders come from a roulette over occupied cells weighted by
//! `exp(-leader_pressure * occupancy)`; on overflow members are removed from
//! cells picked with weight `exp(deletion_pressure * occupancy)`.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{roulette, Individual};
use crate::pareto::{weakly_dominates, ParetoFront};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ArchiveConfig {
    pub grids: usize,
    pub inflation: f64,
    pub leader_pressure: f64,
    pub deletion_pressure: f64,
    pub mutation: f64,
    pub capacity: usize,
}

impl Default for ArchiveConfig {
    fn default() -> Self {
        Self {
            grids: 7,
            inflation: 0.1,
            leader_pressure: 2.0,
            deletion_pressure: 2.0,
            mutation: 0.1,
            capacity: 100,
        }
    }
}

impl ArchiveConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grids < 1 {
            return Err(Error::invalid("archive", "grids must be >= 1"));
        }
        if !(self.inflation >= 0.0 && self.inflation.is_finite()) {
            return Err(Error::invalid("archive", "inflation must be >= 0"));
        }
        if !(self.leader_pressure > 0.0 && self.deletion_pressure > 0.0) {
            return Err(Error::invalid("archive", "selection pressures must be > 0"));
        }
        if !(0.0..=1.0).contains(&self.mutation) {
            return Err(Error::invalid("archive", "mutation must lie in [0, 1]"));
        }
        if self.capacity < 1 {
            return Err(Error::invalid("archive", "capacity must be >= 1"));
        }
        Ok(())
    }
}

/// Cell id of every point on a grid fitted to `points`.
pub fn grid_cells(points: &[&[f64]], grids: usize, inflation: f64) -> Vec<u64> {
    let Some(first) = points.first() else {
        return Vec::new();
    };
    let k = first.len();
    let mut lo = vec![f64::INFINITY; k];
    let mut hi = vec![f64::NEG_INFINITY; k];
    for p in points {
        for d in 0..k {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    for d in 0..k {
        let pad = inflation * (hi[d] - lo[d]);
        lo[d] -= pad;
        hi[d] += pad;
    }
    points
        .iter()
        .map(|p| {
            let mut id = 0u64;
            for d in 0..k {
                let span = hi[d] - lo[d];
                let idx = if span > 0.0 {
                    (((p[d] - lo[d]) / span * grids as f64).floor() as usize).min(grids - 1)
                } else {
                    0
                };
                id = id.wrapping_mul(grids as u64).wrapping_add(idx as u64);
            }
            id
        })
        .collect()
}

/// Cells in ascending id order with the positions of their occupants.
fn occupancy(cells: &[u64]) -> Vec<Vec<usize>> {
    let mut map: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (i, c) in cells.iter().enumerate() {
        map.entry(*c).or_default().push(i);
    }
    map.into_values().collect()
}

/// Grid roulette favouring sparse cells; returns an index into `points`.
pub fn select_leader<R: Rng + ?Sized>(
    points: &[&[f64]],
    cfg: &ArchiveConfig,
    rng: &mut R,
) -> usize {
    assert!(!points.is_empty(), "leader requested from an empty set");
    let cells = occupancy(&grid_cells(points, cfg.grids, cfg.inflation));
    let weights: Vec<f64> = cells
        .iter()
        .map(|c| (-cfg.leader_pressure * c.len() as f64).exp())
        .collect();
    let cell = &cells[roulette(&weights, rng)];
    cell[rng.gen_range(0..cell.len())]
}

/// Bounded or unbounded antichain of the best solutions seen so far.
#[derive(Debug, Clone, PartialEq)]
pub struct Archive {
    members: Vec<Individual>,
    config: Option<ArchiveConfig>,
}

impl Archive {
    pub fn bounded(config: ArchiveConfig) -> Self {
        Self {
            members: Vec::new(),
            config: Some(config),
        }
    }

    pub fn unbounded() -> Self {
        Self {
            members: Vec::new(),
            config: None,
        }
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Adds `cand` unless an existing member weakly dominates it; members it
    /// dominates are dropped. Returns whether it was added.
    pub fn insert(&mut self, cand: &Individual) -> bool {
        let c = cand.objectives().as_slice();
        if self
            .members
            .iter()
            .any(|m| weakly_dominates(m.objectives().as_slice(), c))
        {
            return false;
        }
        self.members
            .retain(|m| !weakly_dominates(c, m.objectives().as_slice()));
        self.members.push(cand.clone());
        true
    }

    /// Inserts every candidate, then trims to capacity.
    pub fn update<'a, R, I>(&mut self, candidates: I, rng: &mut R)
    where
        R: Rng + ?Sized,
        I: IntoIterator<Item = &'a Individual>,
    {
        for c in candidates {
            self.insert(c);
        }
        self.truncate(rng);
    }

    fn truncate<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let Some(cfg) = self.config else { return };
        while self.members.len() > cfg.capacity {
            let points: Vec<&[f64]> = self
                .members
                .iter()
                .map(|m| m.objectives().as_slice())
                .collect();
            let cells = occupancy(&grid_cells(&points, cfg.grids, cfg.inflation));
            let weights: Vec<f64> = cells
                .iter()
                .map(|c| (cfg.deletion_pressure * c.len() as f64).exp())
                .collect();
            let cell = &cells[roulette(&weights, rng)];
            let victim = cell[rng.gen_range(0..cell.len())];
            self.members.remove(victim);
        }
    }

    pub fn leader<R: Rng + ?Sized>(&self, rng: &mut R) -> &Individual {
        let cfg = self.config.unwrap_or_default();
        let points: Vec<&[f64]> = self
            .members
            .iter()
            .map(|m| m.objectives().as_slice())
            .collect();
        &self.members[select_leader(&points, &cfg, rng)]
    }

    pub fn to_front(&self) -> ParetoFront {
        ParetoFront::new(self.members.clone())
    }
}

//! Optimization problems: the drone gain-tuning problem plus analytic test
//! functions used for smoke tests and benchmarks.

use crate::control::{simulate, PdGains, SimSettings};
use crate::dynamics::DroneParams;
use crate::evolution::Bounds;
use crate::objectives::{evaluate_objectives, ObjectiveVector, DRONE_OBJECTIVES};

/// A box-constrained, minimized, possibly multi-objective problem.
pub trait Problem: Send + Sync {
    fn bounds(&self) -> &Bounds;

    fn num_objectives(&self) -> usize;

    /// Pure evaluation; must not panic for in-bounds genes.
    fn evaluate(&self, genes: &[f64]) -> ObjectiveVector;

    /// Optional starting point injected as population member 0.
    fn seed(&self) -> Option<Vec<f64>> {
        None
    }

    fn dim(&self) -> usize {
        self.bounds().dim()
    }
}

/// PD gain tuning: genes are [`PdGains`], objectives the four tracking errors.
#[derive(Debug, Clone)]
pub struct DroneProblem {
    pub params: DroneParams,
    pub settings: SimSettings,
    pub bounds: Bounds,
    pub seed: Option<PdGains>,
}

impl Default for DroneProblem {
    fn default() -> Self {
        Self {
            params: DroneParams::default(),
            settings: SimSettings::default(),
            bounds: Bounds::pd_gains(),
            seed: Some(PdGains::conventional()),
        }
    }
}

impl Problem for DroneProblem {
    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn num_objectives(&self) -> usize {
        DRONE_OBJECTIVES
    }

    fn evaluate(&self, genes: &[f64]) -> ObjectiveVector {
        let Ok(gains) = PdGains::from_slice(genes) else {
            return ObjectiveVector::penalty(DRONE_OBJECTIVES);
        };
        match simulate(&gains, &self.params, &self.settings) {
            Ok(traj) => evaluate_objectives(&traj, &self.settings.reference),
            Err(_) => ObjectiveVector::penalty(DRONE_OBJECTIVES),
        }
    }

    fn seed(&self) -> Option<Vec<f64>> {
        self.seed.map(|g| g.to_array().to_vec())
    }
}

/// `f(x) = sum x_d^2` on `[-r, r]^dim`.
#[derive(Debug, Clone)]
pub struct Sphere {
    bounds: Bounds,
}

impl Sphere {
    pub fn new(dim: usize, radius: f64) -> Self {
        Self {
            bounds: Bounds::uniform(dim, -radius, radius).expect("valid sphere bounds"),
        }
    }
}

impl Problem for Sphere {
    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn num_objectives(&self) -> usize {
        1
    }

    fn evaluate(&self, genes: &[f64]) -> ObjectiveVector {
        ObjectiveVector(vec![genes.iter().map(|x| x * x).sum()])
    }
}

/// One shifted sphere per objective: `f_j(x) = sum_d (x_d - c_j)^2`.
///
/// Equal centers give non-conflicting objectives with a shared optimum.
#[derive(Debug, Clone)]
pub struct SphereFamily {
    bounds: Bounds,
    centers: Vec<f64>,
}

impl SphereFamily {
    pub fn new(dim: usize, radius: f64, centers: Vec<f64>) -> Self {
        assert!(!centers.is_empty());
        Self {
            bounds: Bounds::uniform(dim, -radius, radius).expect("valid bounds"),
            centers,
        }
    }
}

impl Problem for SphereFamily {
    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn num_objectives(&self) -> usize {
        self.centers.len()
    }

    fn evaluate(&self, genes: &[f64]) -> ObjectiveVector {
        ObjectiveVector(
            self.centers
                .iter()
                .map(|c| genes.iter().map(|x| (x - c) * (x - c)).sum())
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drone_problem_is_pure() {
        let p = DroneProblem::default();
        let g = PdGains::conventional().to_array();
        assert_eq!(p.evaluate(&g), p.evaluate(&g));
        assert_eq!(p.dim(), 8);
    }

    #[test]
    fn wrong_gene_count_is_penalized() {
        let p = DroneProblem::default();
        assert_eq!(p.evaluate(&[1.0; 3]), ObjectiveVector::penalty(4));
    }

    #[test]
    fn sphere_family_values() {
        let f = SphereFamily::new(2, 5.0, vec![0.0, 1.0]);
        assert_eq!(f.evaluate(&[1.0, 1.0]).0, vec![2.0, 0.0]);
    }
}

//! Tracking-error objectives and weighted aggregation.

use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::control::{Reference, Trajectory};
use crate::error::{Error, Result};

/// Objective value assigned to every component of an aborted rollout.
pub const PENALTY: f64 = 1e6;

/// Number of objectives of the drone problem: `phi`, `theta`, `psi`, `z`.
pub const DRONE_OBJECTIVES: usize = 4;

/// Objective values, all minimized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector(pub Vec<f64>);

impl ObjectiveVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn penalty(k: usize) -> Self {
        Self(vec![PENALTY; k])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self(self.0.iter().map(|v| v * c).collect())
    }
}

impl Index<usize> for ObjectiveVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl From<Vec<f64>> for ObjectiveVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// Non-negative aggregation weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weights(pub Vec<f64>);

impl Weights {
    pub fn uniform(k: usize) -> Self {
        Self(vec![1.0; k])
    }

    pub fn new(w: Vec<f64>) -> Result<Self> {
        let w = Self(w);
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if self.0.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::invalid("weights", "weights must be finite and >= 0"));
        }
        if self.0.iter().all(|w| *w == 0.0) {
            return Err(Error::invalid("weights", "weights must not all be zero"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Left-endpoint rectangle sums of `|X_i - X_i,d|` over `phi, theta, psi, z`.
///
/// Aborted rollouts map to the penalty vector.
pub fn evaluate_objectives(traj: &Trajectory, reference: &Reference) -> ObjectiveVector {
    if !traj.stable || traj.is_empty() {
        return ObjectiveVector::penalty(DRONE_OBJECTIVES);
    }
    let intervals = traj.len() - 1;
    let mut sums = [0.0; DRONE_OBJECTIVES];
    for s in &traj.states[..intervals] {
        sums[0] += (s.eta[0] - reference.phi).abs();
        sums[1] += (s.eta[1] - reference.theta).abs();
        sums[2] += (s.eta[2] - reference.psi).abs();
        sums[3] += (s.pos[2] - reference.z).abs();
    }
    ObjectiveVector(sums.iter().map(|s| s * traj.dt).collect())
}

/// Weighted sum `sum_i w_i F_i`.
pub fn aggregate(obj: &ObjectiveVector, w: &Weights) -> f64 {
    debug_assert_eq!(obj.len(), w.len());
    obj.0.iter().zip(&w.0).map(|(f, w)| f * w).sum()
}

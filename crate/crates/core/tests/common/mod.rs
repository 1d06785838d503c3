//! Oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::Vector3;
use quadtune_core::dynamics::{step, ControlInput, DroneParams, DroneState};
use quadtune_core::Trajectory;

pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y) && a.iter().zip(b).any(|(x, y)| x < y)
}

/// Peel off the points no remaining point dominates, one layer at a time.
pub fn brute_force_fronts(points: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let mut left: Vec<usize> = (0..points.len()).collect();
    let mut fronts = Vec::new();
    while !left.is_empty() {
        let (front, rest): (Vec<usize>, Vec<usize>) = left
            .iter()
            .partition(|&&i| !left.iter().any(|&j| dominates(&points[j], &points[i])));
        fronts.push(front);
        left = rest;
    }
    fronts
}

/// Vertical fall from rest with linear drag `k = Az / m`: `(z, v)` at `t`.
pub fn fall_with_drag(z0: f64, g: f64, k: f64, t: f64) -> (f64, f64) {
    let z = z0 - g / k * t + g / (k * k) * (1.0 - (-k * t).exp());
    let v = -g / k * (1.0 - (-k * t).exp());
    (z, v)
}

pub fn drop_from(z0: f64) -> DroneState {
    DroneState::at_rest(Vector3::new(0.0, 0.0, z0), Vector3::zeros())
}

pub fn integrate(
    mut s: DroneState,
    u: &ControlInput,
    p: &DroneParams,
    dt: f64,
    steps: usize,
) -> DroneState {
    for _ in 0..steps {
        s = step(&s, u, p, dt).unwrap();
    }
    s
}

/// `samples` copies of `state` spaced `dt` apart.
pub fn constant(state: DroneState, dt: f64, samples: usize) -> Trajectory {
    Trajectory {
        dt,
        times: (0..samples).map(|k| k as f64 * dt).collect(),
        states: vec![state; samples],
        inputs: vec![ControlInput::default(); samples],
        stable: true,
    }
}

pub fn offset(z: f64, phi: f64, theta: f64, psi: f64) -> DroneState {
    DroneState::at_rest(Vector3::new(0.0, 0.0, z), Vector3::new(phi, theta, psi))
}

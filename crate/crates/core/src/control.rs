//! PD attitude/altitude control and closed-loop rollouts.

use std::f64::consts::FRAC_PI_2;
use std::io::Write;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::dynamics::{self, ControlInput, DroneParams, DroneState};
use crate::error::{Error, Result};

/// Thrust saturation as a multiple of hover thrust.
pub const THRUST_LIMIT_FACTOR: f64 = 4.0;

/// Rollouts abort once any state component exceeds this magnitude.
pub const DIVERGENCE_LIMIT: f64 = 1e6;

const THRUST_COMPENSATION_GUARD: f64 = 1e-6;

/// Proportional and derivative gains for roll, pitch, yaw and altitude.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdGains {
    pub kp_phi: f64,
    pub kd_phi: f64,
    pub kp_theta: f64,
    pub kd_theta: f64,
    pub kp_psi: f64,
    pub kd_psi: f64,
    pub kp_z: f64,
    pub kd_z: f64,
}

impl PdGains {
    pub const DIM: usize = 8;
    pub const NAMES: [&'static str; 8] = [
        "kp_phi", "kd_phi", "kp_theta", "kd_theta", "kp_psi", "kd_psi", "kp_z", "kd_z",
    ];

    /// Hand-tuned gains used as the baseline controller.
    pub const fn conventional() -> Self {
        Self {
            kp_phi: 6.0,
            kd_phi: 1.75,
            kp_theta: 6.0,
            kd_theta: 1.75,
            kp_psi: 6.0,
            kd_psi: 1.75,
            kp_z: 1.5,
            kd_z: 2.5,
        }
    }

    pub fn to_array(&self) -> [f64; 8] {
        [
            self.kp_phi,
            self.kd_phi,
            self.kp_theta,
            self.kd_theta,
            self.kp_psi,
            self.kd_psi,
            self.kp_z,
            self.kd_z,
        ]
    }

    pub fn from_slice(genes: &[f64]) -> Result<Self> {
        let g: [f64; 8] = genes.try_into().map_err(|_| Error::DimensionMismatch {
            expected: Self::DIM,
            got: genes.len(),
        })?;
        Ok(Self {
            kp_phi: g[0],
            kd_phi: g[1],
            kp_theta: g[2],
            kd_theta: g[3],
            kp_psi: g[4],
            kd_psi: g[5],
            kp_z: g[6],
            kd_z: g[7],
        })
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in Self::NAMES.iter().zip(self.to_array()) {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(
                    "gains",
                    format!("{name} must be finite and >= 0, got {v}"),
                ));
            }
        }
        Ok(())
    }
}

/// Constant set-point. Derivative references are zero.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Reference {
    pub z: f64,
    pub phi: f64,
    pub theta: f64,
    pub psi: f64,
}

impl Reference {
    pub fn is_finite(&self) -> bool {
        [self.z, self.phi, self.theta, self.psi]
            .iter()
            .all(|v| v.is_finite())
    }

    /// Resting state that sits exactly on this set-point.
    pub fn equilibrium(&self) -> DroneState {
        DroneState::at_rest(
            Vector3::new(0.0, 0.0, self.z),
            Vector3::new(self.phi, self.theta, self.psi),
        )
    }
}

/// Everything besides gains and airframe that defines a rollout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSettings {
    pub dt: f64,
    pub t_final: f64,
    pub init: DroneState,
    pub reference: Reference,
}

impl Default for SimSettings {
    fn default() -> Self {
        Self {
            dt: 0.01,
            t_final: 10.0,
            init: DroneState::at_rest(Vector3::new(0.0, 0.0, -1.0), Vector3::new(-0.7, -0.7, -0.7)),
            reference: Reference::default(),
        }
    }
}

impl SimSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid(
                "dt",
                format!("must be > 0, got {}", self.dt),
            ));
        }
        if !(self.t_final >= self.dt && self.t_final.is_finite()) {
            return Err(Error::invalid(
                "t_final",
                format!("must be >= dt ({}), got {}", self.dt, self.t_final),
            ));
        }
        if !self.init.is_finite() {
            return Err(Error::invalid("init", "initial state must be finite"));
        }
        if !self.reference.is_finite() {
            return Err(Error::invalid("reference", "reference must be finite"));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }
}

/// Sampled closed-loop rollout.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub dt: f64,
    pub times: Vec<f64>,
    pub states: Vec<DroneState>,
    pub inputs: Vec<ControlInput>,
    /// `false` when the rollout was aborted and truncated.
    pub stable: bool,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub const CSV_HEADER: [&'static str; 17] = [
        "t",
        "x",
        "y",
        "z",
        "phi",
        "theta",
        "psi",
        "dx",
        "dy",
        "dz",
        "dphi",
        "dtheta",
        "dpsi",
        "T",
        "tau_phi",
        "tau_theta",
        "tau_psi",
    ];

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(Self::CSV_HEADER)?;
        for ((t, s), u) in self.times.iter().zip(&self.states).zip(&self.inputs) {
            let mut row = Vec::with_capacity(17);
            row.push(*t);
            row.extend(s.to_vector().iter().copied());
            row.push(u.thrust);
            row.extend(u.tau.iter().copied());
            w.write_record(row.iter().map(f64::to_string))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// PD law with tilt-compensated collective thrust and inertia-scaled torques.
pub fn pd_law(
    state: &DroneState,
    reference: &Reference,
    gains: &PdGains,
    p: &DroneParams,
) -> Result<ControlInput> {
    let tilt = state.eta[0].cos() * state.eta[1].cos();
    if tilt.abs() < THRUST_COMPENSATION_GUARD {
        return Err(Error::AttitudeSingularity(tilt.abs()));
    }
    let z_cmd = gains.kp_z * (reference.z - state.pos[2]) - gains.kd_z * state.vel[2];
    let thrust = (p.m * (p.g + z_cmd) / tilt).clamp(0.0, THRUST_LIMIT_FACTOR * p.hover_thrust());

    let tau = Vector3::new(
        p.ixx * (gains.kp_phi * (reference.phi - state.eta[0]) - gains.kd_phi * state.eta_dot[0]),
        p.iyy
            * (gains.kp_theta * (reference.theta - state.eta[1])
                - gains.kd_theta * state.eta_dot[1]),
        p.izz * (gains.kp_psi * (reference.psi - state.eta[2]) - gains.kd_psi * state.eta_dot[2]),
    );
    Ok(ControlInput { thrust, tau })
}

fn admissible(state: &DroneState) -> bool {
    state.is_finite()
        && state.max_abs() <= DIVERGENCE_LIMIT
        && state.eta[0].abs() < FRAC_PI_2
        && state.eta[1].abs() < FRAC_PI_2
}

/// Closed-loop rollout from `settings.init` for `settings.t_final` seconds.
///
/// Divergence, gimbal lock or leaving `|phi|, |theta| < pi/2` truncates the
/// trajectory at the last admissible sample and clears `stable`.
pub fn simulate(gains: &PdGains, p: &DroneParams, settings: &SimSettings) -> Result<Trajectory> {
    p.validate()?;
    settings.validate()?;
    if gains.to_array().iter().any(|g| !g.is_finite()) {
        return Err(Error::invalid("gains", "gains must be finite"));
    }

    let n = settings.steps();
    let dt = settings.dt;
    let mut traj = Trajectory {
        dt,
        times: Vec::with_capacity(n + 1),
        states: Vec::with_capacity(n + 1),
        inputs: Vec::with_capacity(n + 1),
        stable: true,
    };

    let mut state = settings.init;
    for k in 0..=n {
        if !admissible(&state) {
            traj.stable = false;
            break;
        }
        let Ok(u) = pd_law(&state, &settings.reference, gains, p) else {
            traj.stable = false;
            break;
        };
        traj.times.push(k as f64 * dt);
        traj.states.push(state);
        traj.inputs.push(u);
        if k == n {
            break;
        }
        match dynamics::step(&state, &u, p, dt) {
            Ok(next) => state = next,
            Err(_) => {
                traj.stable = false;
                break;
            }
        }
    }
    Ok(traj)
}

//! Rigid-body quadrotor model.
//!
//! The translational subsystem is Newtonian in the inertial frame with linear
//! drag; the rotational subsystem is the Euler-Lagrange form
//! `J(eta) * eta_ddot + C(eta, eta_dot) * eta_dot = tau` with `J = W^T I W`.
//! Inertial `z` points up, gravity acts along `-z`.

use nalgebra::{Matrix3, SVector, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this `|cos theta|` the Euler-rate Jacobian is treated as singular.
pub const GIMBAL_GUARD: f64 = 1e-9;

/// Physical constants of the airframe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DroneParams {
    pub m: f64,
    pub g: f64,
    pub l: f64,
    pub ixx: f64,
    pub iyy: f64,
    pub izz: f64,
    pub ax: f64,
    pub ay: f64,
    pub az: f64,
}

impl Default for DroneParams {
    fn default() -> Self {
        Self {
            m: 0.468,
            g: 9.81,
            l: 0.225,
            ixx: 4.856e-3,
            iyy: 4.856e-3,
            izz: 8.801e-3,
            ax: 0.25,
            ay: 0.25,
            az: 0.25,
        }
    }
}

impl DroneParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("m", self.m),
            ("g", self.g),
            ("l", self.l),
            ("ixx", self.ixx),
            ("iyy", self.iyy),
            ("izz", self.izz),
            ("ax", self.ax),
            ("ay", self.ay),
            ("az", self.az),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter {
                    name: "drone",
                    reason: format!("{name} must be finite and > 0, got {v}"),
                });
            }
        }
        Ok(())
    }

    pub fn inertia(&self) -> Matrix3<f64> {
        Matrix3::from_diagonal(&Vector3::new(self.ixx, self.iyy, self.izz))
    }

    /// Thrust that balances gravity at level attitude.
    pub fn hover_thrust(&self) -> f64 {
        self.m * self.g
    }
}

/// Full rigid-body state: inertial position/velocity, Euler angles
/// `[phi, theta, psi]` and their time derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DroneState {
    pub pos: Vector3<f64>,
    pub vel: Vector3<f64>,
    pub eta: Vector3<f64>,
    pub eta_dot: Vector3<f64>,
}

impl DroneState {
    pub fn at_rest(pos: Vector3<f64>, eta: Vector3<f64>) -> Self {
        Self {
            pos,
            vel: Vector3::zeros(),
            eta,
            eta_dot: Vector3::zeros(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_vector().iter().all(|v| v.is_finite())
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> f64 {
        self.to_vector().amax()
    }

    /// Body angular rates `nu = W(eta) * eta_dot`.
    pub fn body_rates(&self) -> Vector3<f64> {
        euler_rate_map(&self.eta) * self.eta_dot
    }

    pub fn to_vector(&self) -> SVector<f64, 12> {
        let mut v = SVector::<f64, 12>::zeros();
        v.fixed_rows_mut::<3>(0).copy_from(&self.pos);
        v.fixed_rows_mut::<3>(3).copy_from(&self.vel);
        v.fixed_rows_mut::<3>(6).copy_from(&self.eta);
        v.fixed_rows_mut::<3>(9).copy_from(&self.eta_dot);
        v
    }

    pub fn from_vector(v: &SVector<f64, 12>) -> Self {
        Self {
            pos: v.fixed_rows::<3>(0).into_owned(),
            vel: v.fixed_rows::<3>(3).into_owned(),
            eta: v.fixed_rows::<3>(6).into_owned(),
            eta_dot: v.fixed_rows::<3>(9).into_owned(),
        }
    }
}

/// Collective thrust along body `z` and body torques `[tau_phi, tau_theta, tau_psi]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControlInput {
    pub thrust: f64,
    pub tau: Vector3<f64>,
}

impl ControlInput {
    pub fn hover(p: &DroneParams) -> Self {
        Self {
            thrust: p.hover_thrust(),
            tau: Vector3::zeros(),
        }
    }
}

/// Body-to-inertial rotation `Rz(psi) * Ry(theta) * Rx(phi)`.
pub fn rotation_matrix(eta: &Vector3<f64>) -> Matrix3<f64> {
    let (sphi, cphi) = eta[0].sin_cos();
    let (sth, cth) = eta[1].sin_cos();
    let (spsi, cpsi) = eta[2].sin_cos();
    Matrix3::new(
        cpsi * cth,
        cpsi * sth * sphi - spsi * cphi,
        cpsi * sth * cphi + spsi * sphi,
        spsi * cth,
        spsi * sth * sphi + cpsi * cphi,
        spsi * sth * cphi - cpsi * sphi,
        -sth,
        cth * sphi,
        cth * cphi,
    )
}

/// `W(eta)`, mapping Euler-angle rates to body rates.
pub fn euler_rate_map(eta: &Vector3<f64>) -> Matrix3<f64> {
    let (sphi, cphi) = eta[0].sin_cos();
    let (sth, cth) = eta[1].sin_cos();
    Matrix3::new(
        1.0,
        0.0,
        -sth,
        0.0,
        cphi,
        cth * sphi,
        0.0,
        -sphi,
        cth * cphi,
    )
}

/// `J(eta) = W^T I W`.
pub fn jacobian(eta: &Vector3<f64>, p: &DroneParams) -> Matrix3<f64> {
    let w = euler_rate_map(eta);
    w.transpose() * p.inertia() * w
}

/// Closed-form Coriolis matrix for `J = W^T I W` with diagonal `I`.
///
/// With `S = sin`, `C = cos`, and `(p, t, s)` the rates of `(phi, theta, psi)`:
///
/// ```text
/// C11 = 0
/// C12 = (Iyy-Izz)(t Cphi Sphi + s Sphi^2 Cth) + (Izz-Iyy) s Cphi^2 Cth - Ixx s Cth
/// C13 = (Izz-Iyy) s Cphi Sphi Cth^2
/// C21 = (Izz-Iyy)(t Cphi Sphi + s Sphi^2 Cth) + (Iyy-Izz) s Cphi^2 Cth + Ixx s Cth
/// C22 = (Izz-Iyy) p Cphi Sphi
/// C23 = -Ixx s Sth Cth + Iyy s Sphi^2 Sth Cth + Izz s Cphi^2 Sth Cth
/// C31 = (Iyy-Izz) s Cth^2 Sphi Cphi - Ixx t Cth
/// C32 = (Izz-Iyy)(t Cphi Sphi Sth + p Sphi^2 Cth) + (Iyy-Izz) p Cphi^2 Cth
///       + Ixx s Sth Cth - Iyy s Sphi^2 Sth Cth - Izz s Cphi^2 Sth Cth
/// C33 = (Iyy-Izz) p Cphi Sphi Cth^2 - Iyy t Sphi^2 Cth Sth - Izz t Cphi^2 Cth Sth
///       + Ixx t Cth Sth
/// ```
///
/// `C * eta_dot` equals `d/dt(J) eta_dot - 1/2 d/d(eta) (eta_dot^T J eta_dot)`.
pub fn coriolis(eta: &Vector3<f64>, eta_dot: &Vector3<f64>, p: &DroneParams) -> Matrix3<f64> {
    let (sphi, cphi) = eta[0].sin_cos();
    let (sth, cth) = eta[1].sin_cos();
    let (dphi, dth, dpsi) = (eta_dot[0], eta_dot[1], eta_dot[2]);
    let (ixx, iyy, izz) = (p.ixx, p.iyy, p.izz);
    let (sphi2, cphi2) = (sphi * sphi, cphi * cphi);

    let c11 = 0.0;
    let c12 = (iyy - izz) * (dth * cphi * sphi + dpsi * sphi2 * cth)
        + (izz - iyy) * dpsi * cphi2 * cth
        - ixx * dpsi * cth;
    let c13 = (izz - iyy) * dpsi * cphi * sphi * cth * cth;
    let c21 = (izz - iyy) * (dth * cphi * sphi + dpsi * sphi2 * cth)
        + (iyy - izz) * dpsi * cphi2 * cth
        + ixx * dpsi * cth;
    let c22 = (izz - iyy) * dphi * cphi * sphi;
    let c23 =
        -ixx * dpsi * sth * cth + iyy * dpsi * sphi2 * sth * cth + izz * dpsi * cphi2 * sth * cth;
    let c31 = (iyy - izz) * dpsi * cth * cth * sphi * cphi - ixx * dth * cth;
    let c32 = (izz - iyy) * (dth * cphi * sphi * sth + dphi * sphi2 * cth)
        + (iyy - izz) * dphi * cphi2 * cth
        + ixx * dpsi * sth * cth
        - iyy * dpsi * sphi2 * sth * cth
        - izz * dpsi * cphi2 * sth * cth;
    let c33 = (iyy - izz) * dphi * cphi * sphi * cth * cth
        - iyy * dth * sphi2 * cth * sth
        - izz * dth * cphi2 * cth * sth
        + ixx * dth * cth * sth;

    Matrix3::new(c11, c12, c13, c21, c22, c23, c31, c32, c33)
}

/// Translational acceleration in the inertial frame.
pub fn linear_accel(state: &DroneState, u: &ControlInput, p: &DroneParams) -> Vector3<f64> {
    let gravity = Vector3::new(0.0, 0.0, -p.g);
    let thrust = rotation_matrix(&state.eta) * Vector3::new(0.0, 0.0, u.thrust / p.m);
    let drag = Vector3::new(
        p.ax * state.vel[0],
        p.ay * state.vel[1],
        p.az * state.vel[2],
    ) / p.m;
    gravity + thrust - drag
}

/// Euler-angle acceleration `J^-1 (tau - C eta_dot)`.
pub fn angular_accel(
    state: &DroneState,
    u: &ControlInput,
    p: &DroneParams,
) -> Result<Vector3<f64>> {
    let cos_theta = state.eta[1].cos();
    if cos_theta.abs() < GIMBAL_GUARD {
        return Err(Error::SingularJacobian { cos_theta });
    }
    let j = jacobian(&state.eta, p);
    let rhs = u.tau - coriolis(&state.eta, &state.eta_dot, p) * state.eta_dot;
    j.lu()
        .solve(&rhs)
        .ok_or(Error::SingularJacobian { cos_theta })
}

fn derivative(state: &DroneState, u: &ControlInput, p: &DroneParams) -> Result<SVector<f64, 12>> {
    let d = DroneState {
        pos: state.vel,
        vel: linear_accel(state, u, p),
        eta: state.eta_dot,
        eta_dot: angular_accel(state, u, p)?,
    };
    Ok(d.to_vector())
}

/// One classic RK4 step with the input held over `[t, t + dt]`.
pub fn step(state: &DroneState, u: &ControlInput, p: &DroneParams, dt: f64) -> Result<DroneState> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid("dt", format!("must be > 0, got {dt}")));
    }
    let y = state.to_vector();
    let at = |v: SVector<f64, 12>| DroneState::from_vector(&v);

    let k1 = derivative(state, u, p)?;
    let k2 = derivative(&at(y + k1 * (dt / 2.0)), u, p)?;
    let k3 = derivative(&at(y + k2 * (dt / 2.0)), u, p)?;
    let k4 = derivative(&at(y + k3 * dt), u, p)?;
    let next = y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);

    if next.iter().all(|v| v.is_finite()) {
        Ok(at(next))
    } else {
        Err(Error::NonFiniteState)
    }
}

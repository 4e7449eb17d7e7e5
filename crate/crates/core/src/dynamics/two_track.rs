use super::tire::{wheel_forces, WheelForces, FL, FR, RL, RR};
use super::{DriverInput, StateDerivative, TwoTrackParams, VehicleModel, VehicleState, V_EPS};

/// Derivatives of speed, slip angle and yaw rate from the force and moment
/// balances of the two-track model.
///
/// The `1/v` term of the slip-angle equation uses `max(v, V_EPS)`.
pub fn two_track_derivatives(
    state: &VehicleState,
    forces: &WheelForces,
    params: &TwoTrackParams,
) -> StateDerivative {
    let sum_x = forces.sum_x();
    let sum_y = forces.sum_y();
    let (sb, cb) = state.beta.sin_cos();
    let v = state.v.max(V_EPS);

    let v_dot = (cb * sum_x + sb * sum_y) / params.mass;
    let beta_dot = (cb * sum_y - sb * sum_x) / (params.mass * v) - state.psi_dot;

    let half_w = params.track_width / 2.0;
    let fx = &forces.fx;
    let fy = &forces.fy;
    let moment = params.lf * (fy[FL] + fy[FR]) + half_w * (fx[FR] - fx[FL])
        - params.lr * (fy[RL] + fy[RR])
        + half_w * (fx[RR] - fx[RL]);
    let psi_ddot = moment / params.yaw_inertia;

    StateDerivative {
        v_dot,
        beta_dot,
        psi_ddot,
    }
}

/// Two-track car model driven by pedals and steering wheel.
#[derive(Debug, Clone, Copy)]
pub struct TwoTrack {
    pub params: TwoTrackParams,
}

impl VehicleModel for TwoTrack {
    type Input = DriverInput;

    fn derivatives(&self, state: &VehicleState, input: &DriverInput) -> StateDerivative {
        let forces = wheel_forces(state, &self.params, input);
        two_track_derivatives(state, &forces, &self.params)
    }
}

use serde::{Deserialize, Serialize};

use super::tire::tire_force;
use super::{StateDerivative, TwoTrackParams, VehicleModel, VehicleState, GRAVITY, V_EPS};

/// Inputs of the single-track model.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SingleTrackInput {
    /// Commanded longitudinal acceleration, split evenly over both axles [m/s²].
    pub accel: f64,
    /// Front road-wheel steering angle [rad].
    pub steer: f64,
}

/// Single-track derivatives: the two-track balances with `w = 0`, per-axle
/// lumped tire forces and small-angle slip (`sin β ≈ β`, `cos β ≈ 1`). Axle
/// slip angles keep the arctangent of the contact-point velocity.
pub fn single_track_derivatives(
    state: &VehicleState,
    params: &TwoTrackParams,
    input: &SingleTrackInput,
) -> StateDerivative {
    let fz_axle = params.mass * GRAVITY / 2.0;
    let v_raw = state.v.max(0.0);
    let v = v_raw.max(V_EPS);
    let beta = state.beta;

    let alpha_f = input.steer - (beta + params.lf * state.psi_dot / v).atan();
    let alpha_r = -(beta - params.lr * state.psi_dot / v).atan();
    let drive = params.mass * input.accel / 2.0;

    let (fx_f, fy_f) = tire_force(&params.tire, fz_axle, drive, alpha_f, input.steer, v_raw);
    let (fx_r, fy_r) = tire_force(&params.tire, fz_axle, drive, alpha_r, 0.0, v_raw);

    let sum_x = fx_f + fx_r;
    let sum_y = fy_f + fy_r;
    StateDerivative {
        v_dot: (sum_x + beta * sum_y) / params.mass,
        beta_dot: (sum_y - beta * sum_x) / (params.mass * v) - state.psi_dot,
        psi_ddot: (params.lf * fy_f - params.lr * fy_r) / params.yaw_inertia,
    }
}

/// Single-track (bicycle) model driven by acceleration and steering angle.
#[derive(Debug, Clone, Copy)]
pub struct SingleTrack {
    pub params: TwoTrackParams,
}

impl VehicleModel for SingleTrack {
    type Input = SingleTrackInput;

    fn derivatives(&self, state: &VehicleState, input: &SingleTrackInput) -> StateDerivative {
        single_track_derivatives(state, &self.params, input)
    }
}

use serde::{Deserialize, Serialize};

use super::{
    DriverInput, TwoTrackParams, VehicleState, GRAVITY, SLIP_MAX, STEERING_RATIO, V_EPS,
    V_LATERAL_FADE,
};

pub const WHEEL_COUNT: usize = 4;
pub const FL: usize = 0;
pub const FR: usize = 1;
pub const RL: usize = 2;
pub const RR: usize = 3;

/// Simplified magic-formula tire: `F = mu_max * Fz * sin(C * atan(B * slip))`,
/// shared by the longitudinal and lateral directions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TireParams {
    pub mu_max: f64,
    pub b_stiff: f64,
    pub c_shape: f64,
}

impl Default for TireParams {
    fn default() -> Self {
        Self {
            mu_max: 1.0,
            b_stiff: 10.0,
            c_shape: 1.9,
        }
    }
}

impl TireParams {
    pub fn validate(&self) -> crate::Result<()> {
        let ok =
            self.mu_max > 0.0 && self.mu_max <= 1.5 && self.b_stiff > 0.0 && self.c_shape > 0.0;
        if !ok {
            return Err(crate::Error::InvalidParameter(format!(
                "invalid tire parameters: {self:?}"
            )));
        }
        Ok(())
    }

    /// Normalized force `sin(C atan(B slip))` in `[-1, 1]`.
    pub fn curve(&self, slip: f64) -> f64 {
        (self.c_shape * (self.b_stiff * slip).atan()).sin()
    }

    /// Inverse of [`curve`](Self::curve) on its rising branch; `ratio` is clamped
    /// to the attainable range.
    pub fn inverse_curve(&self, ratio: f64) -> f64 {
        let peak = std::f64::consts::FRAC_PI_2 / self.c_shape;
        let r = ratio.clamp(-1.0, 1.0);
        let inner = (r.asin() / self.c_shape).clamp(-peak, peak);
        inner.tan() / self.b_stiff
    }
}

/// Per-wheel forces in the vehicle frame, indexed `fl, fr, rl, rr`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WheelForces {
    pub fx: [f64; WHEEL_COUNT],
    pub fy: [f64; WHEEL_COUNT],
    /// Road-wheel steering angle of each wheel [rad].
    pub delta: [f64; WHEEL_COUNT],
}

impl WheelForces {
    pub fn sum_x(&self) -> f64 {
        self.fx.iter().sum()
    }

    pub fn sum_y(&self) -> f64 {
        self.fy.iter().sum()
    }
}

/// Longitudinal slip commanded by the pedals; the brake takes priority.
pub fn pedal_slip(input: &DriverInput) -> f64 {
    let brake = input.brake.clamp(0.0, 1.0);
    if brake > 0.0 {
        -brake * SLIP_MAX
    } else {
        input.throttle.clamp(0.0, 1.0) * SLIP_MAX
    }
}

/// Road-wheel angle of the front wheels.
pub fn steering_angle(input: &DriverInput) -> f64 {
    input.steering_wheel_angle / STEERING_RATIO
}

/// Wheel-frame tire force pair, faded at low speed and clamped to the friction
/// circle of radius `mu * fz`, then rotated by `delta` into the vehicle frame.
pub(crate) fn tire_force(
    tire: &TireParams,
    fz: f64,
    longitudinal: f64,
    slip_angle: f64,
    delta: f64,
    v: f64,
) -> (f64, f64) {
    let limit = tire.mu_max * fz;
    let lateral_fade = (v / V_LATERAL_FADE).min(1.0);
    let fy_w = limit * tire.curve(slip_angle) * lateral_fade;
    let mut fx_w = longitudinal;
    if fx_w < 0.0 {
        // braking cannot push a stopped vehicle backwards
        fx_w *= (v / V_EPS).min(1.0);
    }
    let norm = fx_w.hypot(fy_w);
    let scale = if norm > limit { limit / norm } else { 1.0 };
    let (fx_w, fy_w) = (fx_w * scale, fy_w * scale);
    let (sd, cd) = delta.sin_cos();
    (fx_w * cd - fy_w * sd, fx_w * sd + fy_w * cd)
}

/// Tire forces of the two-track model for the given driver input.
///
/// Longitudinal slip follows the pedals linearly, front road-wheel angle is the
/// steering-wheel angle over a fixed ratio, and side slip of each wheel comes
/// from its contact-point velocity. Static load `m g / 4` per wheel.
pub fn wheel_forces(
    state: &VehicleState,
    params: &TwoTrackParams,
    input: &DriverInput,
) -> WheelForces {
    let fz = params.mass * GRAVITY / 4.0;
    let slip = pedal_slip(input);
    let delta_front = steering_angle(input);
    let half_w = params.track_width / 2.0;
    let positions = [
        (params.lf, half_w),
        (params.lf, -half_w),
        (-params.lr, half_w),
        (-params.lr, -half_w),
    ];
    let v = state.v.max(0.0);
    let (sb, cb) = state.beta.sin_cos();
    let (vx, vy) = (v * cb, v * sb);
    let longitudinal = fz * params.tire.mu_max * params.tire.curve(slip);

    let mut out = WheelForces::default();
    for (i, (rx, ry)) in positions.into_iter().enumerate() {
        let delta = if i == FL || i == FR { delta_front } else { 0.0 };
        let wx = (vx - state.psi_dot * ry).max(V_EPS);
        let wy = vy + state.psi_dot * rx;
        let alpha = delta - wy.atan2(wx);
        let (fx, fy) = tire_force(&params.tire, fz, longitudinal, alpha, delta, v);
        out.fx[i] = fx;
        out.fy[i] = fy;
        out.delta[i] = delta;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_slip_no_force() {
        let s = VehicleState::new(0.0, 0.0, 15.0, 0.3);
        let f = wheel_forces(&s, &TwoTrackParams::car(), &DriverInput::default());
        assert!(f.fx.iter().chain(f.fy.iter()).all(|v| *v == 0.0));
    }

    #[test]
    fn full_brake_respects_friction_bound() {
        let p = TwoTrackParams::car();
        let s = VehicleState::new(0.0, 0.0, 20.0, 0.0);
        let f = wheel_forces(
            &s,
            &p,
            &DriverInput {
                brake: 1.0,
                throttle: 1.0,
                ..Default::default()
            },
        );
        assert!(f.sum_x() < 0.0, "brake overrides throttle");
        assert!(f.sum_x().abs() <= p.mass * GRAVITY * p.tire.mu_max);
    }

    #[test]
    fn steering_from_straight_state() {
        // Independent evaluation of the tire curve at the induced slip angle.
        let p = TwoTrackParams::car();
        let s = VehicleState::new(0.0, 0.0, 10.0, 0.0);
        let input = DriverInput {
            steering_wheel_angle: 0.1,
            ..Default::default()
        };
        let f = wheel_forces(&s, &p, &input);
        let delta: f64 = 0.1 / 15.0;
        let fz: f64 = 1500.0 * 9.81 / 4.0;
        let fy_w = fz * (1.9 * (10.0 * delta).atan()).sin();
        let expected_fy = fy_w * delta.cos();
        let expected_fx = -fy_w * delta.sin();
        for i in [FL, FR] {
            assert!(f.fy[i] > 0.0);
            assert!((f.fy[i] - expected_fy).abs() < 1e-9);
            assert!((f.fx[i] - expected_fx).abs() < 1e-9);
        }
        // rear wheels see no slip on a straight, unyawed state
        assert_eq!(f.fy[RL], 0.0);
        assert_eq!(f.fy[RR], 0.0);
    }

    #[test]
    fn inverse_curve_round_trip() {
        let t = TireParams::default();
        for r in [-0.9, -0.3, 0.0, 0.2, 0.75] {
            assert!((t.curve(t.inverse_curve(r)) - r).abs() < 1e-12);
        }
    }
}

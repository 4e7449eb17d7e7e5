//! Planar vehicle dynamics: the two-track model for cars, its single-track
//! simplification for bicycles, a saturating tire curve driven by pedal and
//! steering inputs, and a fixed-step fourth-order integrator.

mod integrate;
mod single_track;
mod tire;
mod two_track;

use serde::{Deserialize, Serialize};

pub use integrate::{integrate, Trajectory};
pub use single_track::{single_track_derivatives, SingleTrack, SingleTrackInput};
pub use tire::{pedal_slip, steering_angle, wheel_forces, TireParams, WheelForces, WHEEL_COUNT};
pub use two_track::{two_track_derivatives, TwoTrack};

/// Gravitational acceleration [m/s²].
pub const GRAVITY: f64 = 9.81;
/// Steering-wheel to road-wheel angle ratio.
pub const STEERING_RATIO: f64 = 15.0;
/// Speed substituted into `1/v` terms at standstill [m/s].
pub const V_EPS: f64 = 0.1;
/// Longitudinal slip at full pedal travel.
pub const SLIP_MAX: f64 = 0.12;
/// Below this speed lateral tire forces fade out linearly [m/s].
pub const V_LATERAL_FADE: f64 = 2.0;
/// Default integration step [s].
pub const DEFAULT_DT: f64 = 0.01;

/// Planar state of one traffic object.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct VehicleState {
    /// Global x-position of the centre of gravity [m].
    pub x: f64,
    /// Global y-position of the centre of gravity [m].
    pub y: f64,
    /// Speed magnitude [m/s].
    pub v: f64,
    /// Slip angle between velocity and longitudinal axis [rad].
    pub beta: f64,
    /// Yaw angle [rad].
    pub psi: f64,
    /// Yaw rate [rad/s].
    pub psi_dot: f64,
    /// Longitudinal acceleration [m/s²].
    pub ax: f64,
    /// Lateral acceleration [m/s²].
    pub ay: f64,
}

impl VehicleState {
    pub fn new(x: f64, y: f64, v: f64, psi: f64) -> Self {
        Self {
            x,
            y,
            v,
            psi,
            ..Default::default()
        }
    }

    pub fn is_valid(&self) -> bool {
        let finite = [
            self.x,
            self.y,
            self.v,
            self.beta,
            self.psi,
            self.psi_dot,
            self.ax,
            self.ay,
        ]
        .iter()
        .all(|c| c.is_finite());
        finite && self.v >= 0.0 && self.beta.abs() < std::f64::consts::FRAC_PI_2
    }

    /// Direction of travel (course angle).
    pub fn course(&self) -> f64 {
        self.psi + self.beta
    }

    pub fn pose(&self) -> crate::geometry::Pose {
        crate::geometry::Pose::new(self.x, self.y, self.psi)
    }
}

/// Rigid-body and tire parameters. Used by both models; the single-track model
/// ignores the track width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoTrackParams {
    /// Mass [kg].
    pub mass: f64,
    /// Yaw moment of inertia [kg·m²].
    pub yaw_inertia: f64,
    /// Centre of gravity to front axle [m].
    pub lf: f64,
    /// Centre of gravity to rear axle [m].
    pub lr: f64,
    /// Track width [m].
    pub track_width: f64,
    pub tire: TireParams,
}

impl TwoTrackParams {
    pub fn car() -> Self {
        Self {
            mass: 1500.0,
            yaw_inertia: 2500.0,
            lf: 1.2,
            lr: 1.5,
            track_width: 1.6,
            tire: TireParams::default(),
        }
    }

    pub fn bicycle() -> Self {
        Self {
            mass: 90.0,
            yaw_inertia: 12.0,
            lf: 0.55,
            lr: 0.55,
            track_width: 0.6,
            tire: TireParams::default(),
        }
    }

    pub fn wheelbase(&self) -> f64 {
        self.lf + self.lr
    }

    pub fn validate(&self) -> crate::Result<()> {
        let positive = [
            self.mass,
            self.yaw_inertia,
            self.lf,
            self.lr,
            self.track_width,
        ];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(crate::Error::InvalidParameter(format!(
                "vehicle parameters must be positive: {self:?}"
            )));
        }
        self.tire.validate()
    }
}

/// Pedal and steering-wheel inputs of a car driver.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DriverInput {
    /// Steering-wheel angle [rad].
    pub steering_wheel_angle: f64,
    /// Gas pedal position in `[0, 1]`.
    pub throttle: f64,
    /// Brake pedal position in `[0, 1]`; any braking overrides the throttle.
    pub brake: f64,
}

/// Time derivatives of the dynamic states.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StateDerivative {
    pub v_dot: f64,
    pub beta_dot: f64,
    pub psi_ddot: f64,
}

impl StateDerivative {
    /// Body-frame acceleration components `(a_x, a_y)` for the given state.
    pub fn body_acceleration(&self, state: &VehicleState) -> (f64, f64) {
        let (sb, cb) = state.beta.sin_cos();
        let turn = state.v * (self.beta_dot + state.psi_dot);
        (self.v_dot * cb - turn * sb, self.v_dot * sb + turn * cb)
    }
}

/// A vehicle model that maps a state and an input to state derivatives.
pub trait VehicleModel {
    type Input: Copy;

    fn derivatives(&self, state: &VehicleState, input: &Self::Input) -> StateDerivative;
}

/// Which dynamic model drives an object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    TwoTrack,
    SingleTrack,
}

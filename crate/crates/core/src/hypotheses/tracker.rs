//! Pure-pursuit path tracking that turns a maneuver's reference path into
//! driver inputs for the dynamic models.

use crate::dynamics::{
    integrate, DriverInput, ModelKind, SingleTrack, SingleTrackInput, Trajectory, TwoTrack,
    TwoTrackParams, VehicleState, GRAVITY, SLIP_MAX, STEERING_RATIO,
};
use crate::geometry::{wrap_angle, Point, Polyline};
use crate::scenario::{ManeuverLabel, Scene};
use crate::{Error, Result};

const LOOKAHEAD_MIN: f64 = 2.5;
const LOOKAHEAD_GAIN: f64 = 0.6;
/// Maximum road-wheel angle [rad].
const MAX_STEER: f64 = 0.6;
/// Lateral acceleration the driver accepts when choosing a curve speed [m/s²].
const COMFORT_LATERAL_ACCEL: f64 = 3.0;
const SPEED_GAIN: f64 = 1.0;
const ACCEL_LIMITS: (f64, f64) = (-6.0, 3.0);
const CURVATURE_STEP: f64 = 0.5;

struct Tracker {
    path: Polyline,
    /// Absolute curvature sampled every `CURVATURE_STEP` metres.
    curvature: Vec<f64>,
    wheelbase: f64,
    v0: f64,
    a0: f64,
    s: f64,
    max_lateral: f64,
    diverged: Option<(f64, f64)>,
}

impl Tracker {
    fn new(
        path: Polyline,
        state: &VehicleState,
        wheelbase: f64,
        lane_width: f64,
        horizon: f64,
    ) -> Self {
        let s = path.project(Point::new(state.x, state.y)).s;
        let reach = s + state.v * horizon + 0.5 * state.ax.max(0.0) * horizon * horizon + 40.0;
        let n = (reach / CURVATURE_STEP).ceil() as usize + 1;
        let curvature = (0..n)
            .map(|k| {
                let c = k as f64 * CURVATURE_STEP;
                let h0 = path.heading_at(c - 1.0);
                let h1 = path.heading_at(c + 1.0);
                wrap_angle(h1 - h0).abs() / 2.0
            })
            .collect();
        Self {
            path,
            curvature,
            wheelbase,
            v0: state.v,
            a0: state.ax,
            s,
            max_lateral: 2.0 * lane_width,
            diverged: None,
        }
    }

    fn max_curvature(&self, from: f64, to: f64) -> f64 {
        let a = (from.max(0.0) / CURVATURE_STEP) as usize;
        let b = ((to.max(0.0) / CURVATURE_STEP) as usize + 1).min(self.curvature.len());
        self.curvature
            .get(a..b)
            .map_or(0.0, |w| w.iter().copied().fold(0.0, f64::max))
    }

    /// Desired longitudinal acceleration and road-wheel angle.
    fn command(&mut self, t: f64, state: &VehicleState) -> (f64, f64) {
        let p = Point::new(state.x, state.y);
        let pr = self
            .path
            .project_window(p, self.s - 2.0, self.s + 4.0 + 2.0 * state.v.max(1.0));
        self.s = pr.s.max(self.s - 0.5);
        if pr.lateral.abs() > self.max_lateral && self.diverged.is_none() {
            self.diverged = Some((pr.lateral.abs(), t));
        }

        let lookahead = LOOKAHEAD_MIN + LOOKAHEAD_GAIN * state.v;
        let target = self.path.point_at(self.s + lookahead);
        let (dx, dy) = (target.x - p.x, target.y - p.y);
        let dist = dx.hypot(dy).max(1e-6);
        let alpha = wrap_angle(dy.atan2(dx) - state.psi);
        let curvature = 2.0 * alpha.sin() / dist;
        let steer = (self.wheelbase * curvature)
            .atan()
            .clamp(-MAX_STEER, MAX_STEER);

        let v_profile = (self.v0 + self.a0 * t).max(0.0);
        let kappa = self.max_curvature(self.s, self.s + 10.0 + 2.0 * state.v);
        let v_curve = if kappa > 1e-9 {
            (COMFORT_LATERAL_ACCEL / kappa).sqrt()
        } else {
            f64::INFINITY
        };
        let (v_target, feedforward) = if v_curve < v_profile {
            (v_curve, 0.0)
        } else {
            (
                v_profile,
                if v_profile > 0.0 {
                    self.a0
                } else {
                    self.a0.min(0.0)
                },
            )
        };
        let accel =
            (feedforward + SPEED_GAIN * (v_target - state.v)).clamp(ACCEL_LIMITS.0, ACCEL_LIMITS.1);
        (accel, steer)
    }
}

/// Pedal positions that produce `accel` through the tire curve on a straight,
/// unyawed vehicle.
pub(crate) fn pedals_for(accel: f64, params: &TwoTrackParams) -> (f64, f64) {
    let ratio = accel / (GRAVITY * params.tire.mu_max);
    let slip = params.tire.inverse_curve(ratio);
    if slip >= 0.0 {
        ((slip / SLIP_MAX).min(1.0), 0.0)
    } else {
        (0.0, (-slip / SLIP_MAX).min(1.0))
    }
}

/// Predicted trajectory of one object executing `label`: the object's dynamic
/// model (two-track for cars, single-track for bicycles) driven by a
/// pure-pursuit tracker along the maneuver's reference path, holding the
/// object's current acceleration as speed profile.
pub fn main_trajectory(
    scene: &Scene,
    object_id: u32,
    label: ManeuverLabel,
    horizon: f64,
    dt: f64,
) -> Result<Trajectory> {
    let object = scene.object(object_id)?;
    let path = scene.road.maneuver_path(&object.lane, label)?;
    let lane_width = scene.road.lane(&object.lane)?.width;
    let params = object.params;
    let mut tracker = Tracker::new(path, &object.state, params.wheelbase(), lane_width, horizon);

    let trajectory = match object.model_kind() {
        ModelKind::TwoTrack => {
            integrate(&TwoTrack { params }, object.state, horizon, dt, |t, s| {
                let (accel, steer) = tracker.command(t, s);
                let (throttle, brake) = pedals_for(accel, &params);
                DriverInput {
                    steering_wheel_angle: steer * STEERING_RATIO,
                    throttle,
                    brake,
                }
            })?
        }
        ModelKind::SingleTrack => integrate(
            &SingleTrack { params },
            object.state,
            horizon,
            dt,
            |t, s| {
                let (accel, steer) = tracker.command(t, s);
                SingleTrackInput { accel, steer }
            },
        )?,
    };
    if let Some((lateral_error, t)) = tracker.diverged {
        return Err(Error::TrackerDiverged {
            object: object_id,
            lateral_error,
            t,
        });
    }
    Ok(trajectory)
}

use serde::{Deserialize, Serialize};

use super::{StateDerivative, VehicleModel, VehicleState, V_EPS};
use crate::{Error, Result};

/// Speeds below this snap to standstill [m/s].
const STOP_SPEED: f64 = 1e-3;

/// Samples of a predicted motion at a fixed step, starting at `t = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub dt: f64,
    pub states: Vec<VehicleState>,
}

impl Trajectory {
    pub fn horizon(&self) -> f64 {
        self.dt * (self.states.len() - 1) as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        self.dt * k as f64
    }

    pub fn last(&self) -> &VehicleState {
        self.states
            .last()
            .expect("trajectory has at least one sample")
    }

    /// State at time `t`, linearly interpolated between samples and clamped to
    /// the horizon.
    pub fn state_at(&self, t: f64) -> VehicleState {
        let pos = (t / self.dt).clamp(0.0, (self.states.len() - 1) as f64);
        let k = pos.floor() as usize;
        let frac = pos - k as f64;
        if k + 1 >= self.states.len() || frac < 1e-9 {
            return self.states[k.min(self.states.len() - 1)];
        }
        if 1.0 - frac < 1e-9 {
            return self.states[k + 1];
        }
        let a = &self.states[k];
        let b = &self.states[k + 1];
        let lerp = |p: f64, q: f64| p + (q - p) * frac;
        VehicleState {
            x: lerp(a.x, b.x),
            y: lerp(a.y, b.y),
            v: lerp(a.v, b.v),
            beta: lerp(a.beta, b.beta),
            psi: lerp(a.psi, b.psi),
            psi_dot: lerp(a.psi_dot, b.psi_dot),
            ax: lerp(a.ax, b.ax),
            ay: lerp(a.ay, b.ay),
        }
    }

    /// Path length covered up to time `t`.
    pub fn distance_travelled(&self, t: f64) -> f64 {
        let end = self.state_at(t);
        let last = ((t / self.dt).floor() as usize).min(self.states.len() - 1);
        let mut d = 0.0;
        for w in self.states[..=last].windows(2) {
            d += (w[1].x - w[0].x).hypot(w[1].y - w[0].y);
        }
        let tail = &self.states[last];
        d + (end.x - tail.x).hypot(end.y - tail.y)
    }
}

#[derive(Clone, Copy)]
struct Rates {
    x: f64,
    y: f64,
    psi: f64,
    dyn_: StateDerivative,
}

fn rates<M: VehicleModel>(model: &M, s: &VehicleState, input: &M::Input) -> Rates {
    let mut dyn_ = model.derivatives(s, input);
    if s.v <= 0.0 && dyn_.v_dot < 0.0 {
        dyn_.v_dot = 0.0;
    }
    let (sc, cc) = s.course().sin_cos();
    let v = s.v.max(0.0);
    Rates {
        x: v * cc,
        y: v * sc,
        psi: s.psi_dot,
        dyn_,
    }
}

fn advance(s: &VehicleState, r: &Rates, h: f64) -> VehicleState {
    VehicleState {
        x: s.x + h * r.x,
        y: s.y + h * r.y,
        psi: s.psi + h * r.psi,
        v: s.v + h * r.dyn_.v_dot,
        beta: s.beta + h * r.dyn_.beta_dot,
        psi_dot: s.psi_dot + h * r.dyn_.psi_ddot,
        ax: s.ax,
        ay: s.ay,
    }
}

/// Integrates `model` from `initial` over `horizon` seconds with the classical
/// fourth-order Runge-Kutta scheme at fixed step `dt`.
///
/// `control` is sampled once per step at the step's start time and state (zero
/// order hold), so it may be a closed-loop controller. Speed saturates at zero.
/// The recorded `ax`/`ay` are the body-frame accelerations at each sample; the
/// initial sample keeps the values of `initial`.
pub fn integrate<M, C>(
    model: &M,
    initial: VehicleState,
    horizon: f64,
    dt: f64,
    mut control: C,
) -> Result<Trajectory>
where
    M: VehicleModel,
    C: FnMut(f64, &VehicleState) -> M::Input,
{
    if !(horizon > 0.0 && horizon.is_finite()) || !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "horizon ({horizon}) and step ({dt}) must be positive"
        )));
    }
    let steps_f = horizon / dt;
    let steps = steps_f.round();
    if (steps_f - steps).abs() > 1e-6 * steps.max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "horizon {horizon} is not an integral multiple of step {dt}"
        )));
    }
    let steps = steps as usize;

    let mut states = Vec::with_capacity(steps + 1);
    let mut s = initial;
    for k in 0..=steps {
        let t = dt * k as f64;
        let input = control(t, &s);
        if k > 0 {
            let r = rates(model, &s, &input);
            (s.ax, s.ay) = r.dyn_.body_acceleration(&s);
        }
        states.push(s);
        if k == steps {
            break;
        }
        let k1 = rates(model, &s, &input);
        let k2 = rates(model, &advance(&s, &k1, dt / 2.0), &input);
        let k3 = rates(model, &advance(&s, &k2, dt / 2.0), &input);
        let k4 = rates(model, &advance(&s, &k3, dt), &input);
        let w = |a: f64, b: f64, c: f64, d: f64| dt / 6.0 * (a + 2.0 * b + 2.0 * c + d);
        let mut next = VehicleState {
            x: s.x + w(k1.x, k2.x, k3.x, k4.x),
            y: s.y + w(k1.y, k2.y, k3.y, k4.y),
            psi: s.psi + w(k1.psi, k2.psi, k3.psi, k4.psi),
            v: s.v + w(k1.dyn_.v_dot, k2.dyn_.v_dot, k3.dyn_.v_dot, k4.dyn_.v_dot),
            beta: s.beta
                + w(
                    k1.dyn_.beta_dot,
                    k2.dyn_.beta_dot,
                    k3.dyn_.beta_dot,
                    k4.dyn_.beta_dot,
                ),
            psi_dot: s.psi_dot
                + w(
                    k1.dyn_.psi_ddot,
                    k2.dyn_.psi_ddot,
                    k3.dyn_.psi_ddot,
                    k4.dyn_.psi_ddot,
                ),
            ax: 0.0,
            ay: 0.0,
        };
        if next.v < STOP_SPEED {
            next.v = 0.0;
        }
        if next.v <= V_EPS {
            // a stopped body has no meaningful slip angle
            next.beta = 0.0;
        }
        s = next;
    }
    Ok(Trajectory { dt, states })
}

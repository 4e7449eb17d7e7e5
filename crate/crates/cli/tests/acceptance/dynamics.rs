//! Force/moment balances against a second transcription, the single-track
//! limit of the two-track model, and the convergence order of the integrator.

use pogrid_core::dynamics::{
    integrate, single_track_derivatives, two_track_derivatives, wheel_forces, DriverInput,
    SingleTrackInput, TwoTrack, TwoTrackParams, VehicleState, WheelForces, GRAVITY, STEERING_RATIO,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Balances written out per wheel: lever arms crossed with the wheel forces.
fn oracle(s: &VehicleState, f: &WheelForces, p: &TwoTrackParams) -> [f64; 3] {
    let arms = [
        (p.lf, p.track_width / 2.0),
        (p.lf, -p.track_width / 2.0),
        (-p.lr, p.track_width / 2.0),
        (-p.lr, -p.track_width / 2.0),
    ];
    let (mut fx, mut fy, mut mz) = (0.0, 0.0, 0.0);
    for i in 0..4 {
        fx += f.fx[i];
        fy += f.fy[i];
        mz += arms[i].0 * f.fy[i] - arms[i].1 * f.fx[i];
    }
    let (b, v) = (s.beta, s.v.max(0.1));
    [
        (b.cos() * fx + b.sin() * fy) / p.mass,
        (b.cos() * fy - b.sin() * fx) / (p.mass * v) - s.psi_dot,
        mz / p.yaw_inertia,
    ]
}

fn random_params(rng: &mut ChaCha8Rng) -> TwoTrackParams {
    let mut p = TwoTrackParams::car();
    p.mass = rng.random_range(50.0..3000.0);
    p.yaw_inertia = rng.random_range(5.0..5000.0);
    p.lf = rng.random_range(0.3..2.0);
    p.lr = rng.random_range(0.3..2.0);
    p.track_width = rng.random_range(0.3..2.0);
    p
}

fn balances(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let p = random_params(rng);
        let mut s = VehicleState::new(0.0, 0.0, rng.random_range(0.0..40.0), 0.0);
        s.beta = rng.random_range(-0.5..0.5);
        s.psi_dot = rng.random_range(-1.0..1.0);
        let mut f = WheelForces::default();
        for i in 0..4 {
            f.fx[i] = rng.random_range(-8000.0..8000.0);
            f.fy[i] = rng.random_range(-8000.0..8000.0);
        }
        let d = two_track_derivatives(&s, &f, &p);
        let o = oracle(&s, &f, &p);
        for (a, b) in [d.v_dot, d.beta_dot, d.psi_ddot].into_iter().zip(o) {
            worst = worst.max(rel(a, b));
        }
    }
    if worst < 1e-12 {
        Ok(worst)
    } else {
        Err(format!("balance transcription differs by {worst:e}"))
    }
}

/// Two-track model with a vanishing track width against the single-track
/// model on matched inputs at small slip angles.
fn single_track_limit(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let mut p = TwoTrackParams::car();
        p.track_width = 1e-6;
        let mut s = VehicleState::new(0.0, 0.0, rng.random_range(5.0..30.0), 0.0);
        s.beta = rng.random_range(-5e-5..5e-5);
        s.psi_dot = rng.random_range(-2e-3..2e-3);
        let driver = DriverInput {
            steering_wheel_angle: rng.random_range(-0.02..0.02),
            throttle: rng.random_range(0.0..0.5),
            brake: 0.0,
        };
        let slip = driver.throttle * pogrid_core::dynamics::SLIP_MAX;
        let matched = SingleTrackInput {
            accel: GRAVITY * p.tire.mu_max * p.tire.curve(slip),
            steer: driver.steering_wheel_angle / STEERING_RATIO,
        };
        let two = two_track_derivatives(&s, &wheel_forces(&s, &p, &driver), &p);
        let one = single_track_derivatives(&s, &p, &matched);
        for (a, b) in [
            (two.v_dot, one.v_dot),
            (two.beta_dot, one.beta_dot),
            (two.psi_ddot, one.psi_ddot),
        ] {
            worst = worst.max(rel(a, b));
        }
    }
    if worst < 1e-6 {
        Ok(worst)
    } else {
        Err(format!("single-track limit differs by {worst:e}"))
    }
}

/// Observed order from three runs at dt, dt/2, dt/4 on constant inputs.
fn convergence_order() -> Result<f64, String> {
    let model = TwoTrack {
        params: TwoTrackParams::car(),
    };
    let input = DriverInput {
        steering_wheel_angle: 0.6,
        throttle: 0.3,
        brake: 0.0,
    };
    let end = |dt: f64| -> Result<VehicleState, String> {
        let traj = integrate(
            &model,
            VehicleState::new(0.0, 0.0, 12.0, 0.2),
            2.0,
            dt,
            |_, _| input,
        )
        .map_err(|e| e.to_string())?;
        Ok(*traj.last())
    };
    let (a, b, c) = (end(0.04)?, end(0.02)?, end(0.01)?);
    let diff = |p: &VehicleState, q: &VehicleState| {
        [
            p.x - q.x,
            p.y - q.y,
            p.psi - q.psi,
            p.v - q.v,
            p.beta - q.beta,
            p.psi_dot - q.psi_dot,
        ]
        .iter()
        .map(|d| d * d)
        .sum::<f64>()
        .sqrt()
    };
    let order = (diff(&a, &b) / diff(&b, &c)).log2();
    if (3.5..=4.6).contains(&order) {
        Ok(order)
    } else {
        Err(format!("observed integration order {order:.2}"))
    }
}

pub fn run() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let balance = balances(&mut rng)?;
    let limit = single_track_limit(&mut rng)?;
    let order = convergence_order()?;
    Ok(format!(
        "balances max rel {balance:.1e}, single-track limit max rel {limit:.1e}, observed order {order:.2}"
    ))
}

//! Weighted maneuver hypotheses per traffic object: rule-based main maneuvers,
//! each spread into quantized longitudinal/lateral deviations.

mod deviation;
mod rules;
mod tracker;

pub use deviation::{
    kinematic_bounds, quantize_axis, sub_hypotheses, triangular_cdf, AccelLimits, DeviationBounds,
    SubHypothesis,
};
pub use rules::{main_hypothesis_probabilities, Logistic, ManeuverRule, RuleTable};
pub use tracker::main_trajectory;

use serde::{Deserialize, Serialize};

use crate::dynamics::{Trajectory, DEFAULT_DT, V_EPS};
use crate::geometry::{Point, Pose};
use crate::scenario::{ManeuverLabel, Scene};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HypothesisConfig {
    pub rules: RuleTable,
    pub n_lon: usize,
    pub n_lat: usize,
    pub a_decel_max: f64,
    pub a_accel_max: f64,
    pub a_lat_max: f64,
}

impl Default for HypothesisConfig {
    fn default() -> Self {
        let limits = AccelLimits::default();
        Self {
            rules: RuleTable::default(),
            n_lon: 9,
            n_lat: 7,
            a_decel_max: limits.decel_max,
            a_accel_max: limits.accel_max,
            a_lat_max: limits.lat_max,
        }
    }
}

impl HypothesisConfig {
    pub fn limits(&self) -> AccelLimits {
        AccelLimits {
            decel_max: self.a_decel_max,
            accel_max: self.a_accel_max,
            lat_max: self.a_lat_max,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, n) in [("n_lon", self.n_lon), ("n_lat", self.n_lat)] {
            if n == 0 || n % 2 == 0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be odd and positive, got {n}"
                )));
            }
        }
        for (name, a) in [
            ("a_decel_max", self.a_decel_max),
            ("a_accel_max", self.a_accel_max),
            ("a_lat_max", self.a_lat_max),
        ] {
            if !(a >= 0.0 && a.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be non-negative, got {a}"
                )));
            }
        }
        self.rules.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MainHypothesis {
    pub label: ManeuverLabel,
    pub probability: f64,
    pub trajectory: Trajectory,
}

/// Nominal pose of a main hypothesis at one instant, with the direction of
/// travel that defines its longitudinal axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MainPose {
    pub label: ManeuverLabel,
    pub probability: f64,
    pub pose: Pose,
    pub direction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub label: ManeuverLabel,
    pub pose: Pose,
    pub weight: f64,
}

/// All `M * N` hypotheses of one object at one prediction time; main index
/// outer, sub-hypothesis inner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisSet {
    pub object: u32,
    pub t_pred: f64,
    pub hypotheses: Vec<Hypothesis>,
}

impl HypothesisSet {
    pub fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        self.hypotheses.iter().map(|h| h.weight)
    }

    pub fn len(&self) -> usize {
        self.hypotheses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hypotheses.is_empty()
    }
}

/// Crosses main poses with their sub-hypotheses: each deviation is applied in
/// the main pose's travel frame and weighted by `P(main) * P(sub | main)`.
pub fn compose(
    object: u32,
    t_pred: f64,
    mains: &[MainPose],
    subs: &[Vec<SubHypothesis>],
) -> Result<HypothesisSet> {
    if mains.len() != subs.len() {
        return Err(Error::InvalidParameter(format!(
            "{} main hypotheses but {} sub-hypothesis lists",
            mains.len(),
            subs.len()
        )));
    }
    let mut hypotheses = Vec::with_capacity(subs.iter().map(Vec::len).sum());
    for (main, subs) in mains.iter().zip(subs) {
        for sub in subs {
            hypotheses.push(Hypothesis {
                label: main.label,
                pose: main.pose.displaced(main.direction, sub.d_lon, sub.d_lat),
                weight: main.probability * sub.probability,
            });
        }
    }
    Ok(HypothesisSet {
        object,
        t_pred,
        hypotheses,
    })
}

/// Main pose of `trajectory` at `t_pred`. The longitudinal axis follows the
/// course while moving and the heading at standstill.
pub fn main_pose(
    label: ManeuverLabel,
    probability: f64,
    trajectory: &Trajectory,
    t_pred: f64,
) -> MainPose {
    let s = trajectory.state_at(t_pred);
    MainPose {
        label,
        probability,
        pose: s.pose(),
        direction: if s.v > V_EPS { s.course() } else { s.psi },
    }
}

/// Deviation bounds of a main hypothesis at `t_pred`, with the lateral room
/// measured along the normal of the main pose to the nearest road limit.
pub fn deviation_bounds(
    scene: &Scene,
    main: &MainHypothesis,
    t_pred: f64,
    limits: &AccelLimits,
) -> DeviationBounds {
    let mp = main_pose(main.label, main.probability, &main.trajectory, t_pred);
    let origin = Point::new(mp.pose.x, mp.pose.y);
    let (s, c) = mp.direction.sin_cos();
    let room = |dir: (f64, f64)| {
        scene
            .road
            .road_limits
            .iter()
            .filter_map(|l| l.ray_hit(origin, dir))
            .fold(f64::INFINITY, f64::min)
    };
    kinematic_bounds(
        t_pred,
        main.trajectory.distance_travelled(t_pred),
        room((-s, c)),
        room((s, -c)),
        limits,
    )
}

/// Main hypotheses of one object, simulated once up to the longest prediction
/// time and then sampled per instance.
#[derive(Debug, Clone)]
pub struct ObjectPrediction {
    pub object: u32,
    pub mains: Vec<MainHypothesis>,
}

impl ObjectPrediction {
    pub fn new(
        scene: &Scene,
        object_id: u32,
        horizon: f64,
        config: &HypothesisConfig,
    ) -> Result<Self> {
        let probabilities = main_hypothesis_probabilities(scene, object_id, &config.rules)?;
        let mains = probabilities
            .into_iter()
            .map(|(label, probability)| {
                Ok(MainHypothesis {
                    label,
                    probability,
                    trajectory: main_trajectory(scene, object_id, label, horizon, DEFAULT_DT)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            object: object_id,
            mains,
        })
    }

    pub fn at(
        &self,
        scene: &Scene,
        t_pred: f64,
        config: &HypothesisConfig,
    ) -> Result<HypothesisSet> {
        if !(t_pred > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "prediction time must be positive, got {t_pred}"
            )));
        }
        let limits = config.limits();
        let mut poses = Vec::with_capacity(self.mains.len());
        let mut subs = Vec::with_capacity(self.mains.len());
        for main in &self.mains {
            poses.push(main_pose(
                main.label,
                main.probability,
                &main.trajectory,
                t_pred,
            ));
            let bounds = deviation_bounds(scene, main, t_pred, &limits);
            subs.push(sub_hypotheses(&bounds, config.n_lon, config.n_lat)?);
        }
        compose(self.object, t_pred, &poses, &subs)
    }
}

/// Full hypothesis set of one object at `t_pred`.
pub fn hypothesis_set(
    scene: &Scene,
    object_id: u32,
    t_pred: f64,
    config: &HypothesisConfig,
) -> Result<HypothesisSet> {
    let horizon = (t_pred / DEFAULT_DT).ceil() * DEFAULT_DT;
    ObjectPrediction::new(scene, object_id, horizon, config)?.at(scene, t_pred, config)
}

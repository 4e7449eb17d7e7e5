use serde::{Deserialize, Serialize};

use crate::scenario::{ManeuverLabel, Scene};
use crate::{Error, Result};

/// Logistic factor `1 / (1 + exp(-gain * (x - center)))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Logistic {
    pub gain: f64,
    pub center: f64,
}

impl Logistic {
    pub fn eval(&self, x: f64) -> f64 {
        1.0 / (1.0 + (-self.gain * (x - self.center)).exp())
    }
}

/// Unnormalized weight of one maneuver: the base weight times the logistic
/// factors that are present, evaluated on speed [m/s], longitudinal
/// acceleration and its magnitude [m/s²].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManeuverRule {
    pub label: ManeuverLabel,
    pub base_weight: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speed: Option<Logistic>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accel: Option<Logistic>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abs_accel: Option<Logistic>,
}

impl ManeuverRule {
    pub fn weight(&self, v: f64, ax: f64) -> f64 {
        let mut w = self.base_weight;
        if let Some(f) = self.speed {
            w *= f.eval(v);
        }
        if let Some(f) = self.accel {
            w *= f.eval(ax);
        }
        if let Some(f) = self.abs_accel {
            w *= f.eval(ax.abs());
        }
        w
    }
}

/// Expert rule table for main-maneuver probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RuleTable {
    pub rules: Vec<ManeuverRule>,
}

impl Default for RuleTable {
    /// Turning gets likelier when slow or decelerating; following the lane or
    /// going straight gets likelier when the acceleration is near zero.
    fn default() -> Self {
        use ManeuverLabel::*;
        let steady = Some(Logistic {
            gain: -3.0,
            center: 1.0,
        });
        let turn = |label| ManeuverRule {
            label,
            base_weight: 0.6,
            speed: Some(Logistic {
                gain: -0.4,
                center: 8.0,
            }),
            accel: Some(Logistic {
                gain: -2.0,
                center: -0.5,
            }),
            abs_accel: None,
        };
        Self {
            rules: vec![
                ManeuverRule {
                    label: FollowLane,
                    base_weight: 1.0,
                    speed: None,
                    accel: None,
                    abs_accel: steady,
                },
                ManeuverRule {
                    label: DriveStraight,
                    base_weight: 1.0,
                    speed: None,
                    accel: None,
                    abs_accel: steady,
                },
                ManeuverRule {
                    label: ChangeLane,
                    base_weight: 0.3,
                    speed: Some(Logistic {
                        gain: 0.3,
                        center: 8.0,
                    }),
                    accel: None,
                    abs_accel: None,
                },
                turn(TurnLeft),
                turn(TurnRight),
            ],
        }
    }
}

impl RuleTable {
    pub fn rule(&self, label: ManeuverLabel) -> Option<&ManeuverRule> {
        self.rules.iter().find(|r| r.label == label)
    }

    pub fn validate(&self) -> Result<()> {
        for r in &self.rules {
            if !(r.base_weight.is_finite() && r.base_weight >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "rule {} has an invalid base weight",
                    r.label
                )));
            }
        }
        Ok(())
    }
}

/// Probabilities of the maneuvers allowed on the object's lane, in lane order.
/// Maneuvers without a rule get weight 1.
pub fn main_hypothesis_probabilities(
    scene: &Scene,
    object_id: u32,
    rules: &RuleTable,
) -> Result<Vec<(ManeuverLabel, f64)>> {
    let object = scene.object(object_id)?;
    let allowed = scene.road.allowed_maneuvers(&object.lane)?;
    if allowed.is_empty() {
        return Err(Error::RoadNetwork(format!(
            "lane '{}' allows no maneuver",
            object.lane
        )));
    }
    let weights: Vec<f64> = allowed
        .iter()
        .map(|&l| {
            rules
                .rule(l)
                .map_or(1.0, |r| r.weight(object.state.v, object.state.ax))
        })
        .collect();
    let total: f64 = weights.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "maneuver weights of object {object_id} sum to {total}"
        )));
    }
    Ok(allowed
        .into_iter()
        .zip(weights)
        .map(|(l, w)| (l, w / total))
        .collect())
}

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geometry::Polyline;
use crate::{Error, Result};

/// Main maneuver of a traffic participant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ManeuverLabel {
    FollowLane,
    DriveStraight,
    ChangeLane,
    TurnLeft,
    TurnRight,
}

impl ManeuverLabel {
    pub const ALL: [ManeuverLabel; 5] = [
        ManeuverLabel::FollowLane,
        ManeuverLabel::DriveStraight,
        ManeuverLabel::ChangeLane,
        ManeuverLabel::TurnLeft,
        ManeuverLabel::TurnRight,
    ];

    pub fn is_turn(self) -> bool {
        matches!(self, ManeuverLabel::TurnLeft | ManeuverLabel::TurnRight)
    }
}

impl fmt::Display for ManeuverLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ManeuverLabel::FollowLane => "follow_lane",
            ManeuverLabel::DriveStraight => "drive_straight",
            ManeuverLabel::ChangeLane => "change_lane",
            ManeuverLabel::TurnLeft => "turn_left",
            ManeuverLabel::TurnRight => "turn_right",
        };
        f.write_str(s)
    }
}

/// A maneuver allowed on a lane. `target` names the lane the maneuver leads
/// into: a successor for follow/straight/turn, the neighbouring lane for a lane
/// change.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManeuverOption {
    pub label: ManeuverLabel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lane {
    pub id: String,
    pub width: f64,
    pub centerline: Polyline,
    #[serde(default)]
    pub maneuvers: Vec<ManeuverOption>,
    #[serde(default)]
    pub successors: Vec<String>,
}

impl Lane {
    pub fn maneuver(&self, label: ManeuverLabel) -> Option<&ManeuverOption> {
        self.maneuvers.iter().find(|m| m.label == label)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadNetwork {
    #[serde(default)]
    pub lanes: Vec<Lane>,
    #[serde(default)]
    pub road_limits: Vec<Polyline>,
}

/// Successor endpoints must coincide within this distance [m].
const CONNECT_TOLERANCE: f64 = 0.1;
/// Paths are extended past their last lane by this length [m].
const PATH_EXTENSION: f64 = 200.0;

impl RoadNetwork {
    pub fn lane(&self, id: &str) -> Result<&Lane> {
        self.lanes
            .iter()
            .find(|l| l.id == id)
            .ok_or_else(|| Error::RoadNetwork(format!("unknown lane '{id}'")))
    }

    pub fn validate(&self) -> Result<()> {
        for (k, lane) in self.lanes.iter().enumerate() {
            if self.lanes[..k].iter().any(|l| l.id == lane.id) {
                return Err(Error::RoadNetwork(format!(
                    "duplicate lane id '{}'",
                    lane.id
                )));
            }
            if !(lane.width > 0.0) {
                return Err(Error::RoadNetwork(format!(
                    "lane '{}' has non-positive width",
                    lane.id
                )));
            }
            for succ in &lane.successors {
                let next = self.lane(succ)?;
                let gap = lane.centerline.end().distance(&next.centerline.start());
                if gap > CONNECT_TOLERANCE {
                    return Err(Error::RoadNetwork(format!(
                        "lane '{}' and successor '{}' are {gap:.3} m apart",
                        lane.id, succ
                    )));
                }
            }
            for m in &lane.maneuvers {
                if let Some(t) = &m.target {
                    self.lane(t)?;
                    if m.label != ManeuverLabel::ChangeLane && !lane.successors.contains(t) {
                        return Err(Error::RoadNetwork(format!(
                            "maneuver {} on lane '{}' targets '{}', which is not a successor",
                            m.label, lane.id, t
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Lanes reached by repeatedly taking the first successor, without cycles.
    fn follow_chain<'a>(&'a self, start: &'a Lane, out: &mut Vec<&'a Lane>) {
        let mut current = start;
        while let Some(next) = current.successors.first() {
            if out.iter().any(|l| &l.id == next) || current.id == *next {
                break;
            }
            match self.lane(next) {
                Ok(l) => {
                    out.push(l);
                    current = l;
                }
                Err(_) => break,
            }
        }
    }

    /// Reference path of a maneuver started on `lane_id`, extended by a straight
    /// run past its last lane.
    pub fn maneuver_path(&self, lane_id: &str, label: ManeuverLabel) -> Result<Polyline> {
        let lane = self.lane(lane_id)?;
        let option = lane
            .maneuver(label)
            .ok_or_else(|| Error::ManeuverNotAllowed {
                label: label.to_string(),
                lane: lane_id.to_string(),
            })?;
        let mut lanes: Vec<&Lane> = Vec::new();
        match (&option.target, label) {
            (Some(t), ManeuverLabel::ChangeLane) => {
                let target = self.lane(t)?;
                lanes.push(target);
                self.follow_chain(target, &mut lanes);
            }
            (None, ManeuverLabel::ChangeLane) => {
                return Err(Error::RoadNetwork(format!(
                    "lane change on '{lane_id}' has no target lane"
                )));
            }
            (Some(t), _) => {
                let target = self.lane(t)?;
                lanes.push(lane);
                lanes.push(target);
                self.follow_chain(target, &mut lanes);
            }
            (None, _) => {
                lanes.push(lane);
                self.follow_chain(lane, &mut lanes);
            }
        }
        let mut path = lanes[0].centerline.clone();
        for l in &lanes[1..] {
            path = path.concat(&l.centerline);
        }
        Ok(path.extended(PATH_EXTENSION))
    }

    /// Labels of the maneuvers allowed on a lane, in declaration order.
    pub fn allowed_maneuvers(&self, lane_id: &str) -> Result<Vec<ManeuverLabel>> {
        Ok(self
            .lane(lane_id)?
            .maneuvers
            .iter()
            .map(|m| m.label)
            .collect())
    }
}

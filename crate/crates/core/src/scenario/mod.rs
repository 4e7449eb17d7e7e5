//! Road networks, traffic scenes, parameter sweeps over scene families and the
//! scenario file format.

mod file;
mod preset;
mod road;
mod sweep;

use serde::{Deserialize, Serialize};

use crate::dynamics::{ModelKind, TwoTrackParams, VehicleState};
use crate::{Error, Result};

pub use file::{ScenarioFile, SCENARIO_SCHEMA_VERSION};
pub use preset::{intersection_preset, straight_road_preset};
pub use road::{Lane, ManeuverLabel, ManeuverOption, RoadNetwork};
pub use sweep::{generate_scenes, split_dataset, split_indices, Axis, ObjectSweep, SweepSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectKind {
    Car,
    Bicycle,
}

/// Rectangular outline of an object, centred on its centre of gravity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Footprint {
    pub length: f64,
    pub width: f64,
}

impl Footprint {
    pub const CAR: Footprint = Footprint {
        length: 4.5,
        width: 2.0,
    };
    pub const BICYCLE: Footprint = Footprint {
        length: 1.8,
        width: 0.6,
    };

    pub fn for_kind(kind: ObjectKind) -> Self {
        match kind {
            ObjectKind::Car => Self::CAR,
            ObjectKind::Bicycle => Self::BICYCLE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrafficObject {
    pub id: u32,
    pub kind: ObjectKind,
    pub lane: String,
    pub state: VehicleState,
    pub footprint: Footprint,
    pub params: TwoTrackParams,
}

impl TrafficObject {
    /// Object with the default footprint and parameters for its kind.
    pub fn new(id: u32, kind: ObjectKind, lane: &str, state: VehicleState) -> Self {
        let params = match kind {
            ObjectKind::Car => TwoTrackParams::car(),
            ObjectKind::Bicycle => TwoTrackParams::bicycle(),
        };
        Self {
            id,
            kind,
            lane: lane.to_string(),
            state,
            footprint: Footprint::for_kind(kind),
            params,
        }
    }

    pub fn model_kind(&self) -> ModelKind {
        match self.kind {
            ObjectKind::Car => ModelKind::TwoTrack,
            ObjectKind::Bicycle => ModelKind::SingleTrack,
        }
    }
}

/// Snapshot of a traffic scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub road: RoadNetwork,
    #[serde(default)]
    pub objects: Vec<TrafficObject>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ego: Option<u32>,
}

impl Scene {
    pub fn object(&self, id: u32) -> Result<&TrafficObject> {
        self.objects
            .iter()
            .find(|o| o.id == id)
            .ok_or(Error::UnknownObject(id))
    }

    /// Copy of the scene restricted to objects accepted by `keep`.
    pub fn filtered(&self, keep: impl Fn(&TrafficObject) -> bool) -> Scene {
        Scene {
            road: self.road.clone(),
            objects: self.objects.iter().filter(|o| keep(o)).cloned().collect(),
            ego: self.ego,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.road.validate()?;
        let mut ids: Vec<u32> = self.objects.iter().map(|o| o.id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter(
                "duplicate object ids in scene".into(),
            ));
        }
        if let Some(ego) = self.ego {
            self.object(ego)?;
        }
        for o in &self.objects {
            self.validate_object(o)?;
        }
        Ok(())
    }

    fn validate_object(&self, o: &TrafficObject) -> Result<()> {
        if !o.state.is_valid() {
            return Err(Error::InvalidParameter(format!(
                "object {} has an invalid state {:?}",
                o.id, o.state
            )));
        }
        if !(o.footprint.length > 0.0 && o.footprint.width > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "object {} has a non-positive footprint",
                o.id
            )));
        }
        o.params.validate()?;
        let lane = self.road.lane(&o.lane)?;
        let pr = lane
            .centerline
            .project(crate::geometry::Point::new(o.state.x, o.state.y));
        if pr.lateral.abs() > lane.width {
            return Err(Error::InvalidParameter(format!(
                "object {} is {:.2} m from the centreline of lane {}",
                o.id,
                pr.lateral.abs(),
                lane.id
            )));
        }
        Ok(())
    }
}

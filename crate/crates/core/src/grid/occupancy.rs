use serde::{Deserialize, Serialize};

use super::{rasterize_footprint, rasterize_polyline, GridSpec};
use crate::geometry::wrap_angle;
use crate::hypotheses::HypothesisSet;
use crate::scenario::{Footprint, RoadNetwork, Scene};
use crate::{Error, Result};

/// Attributes per cell: occupancy, speed, heading, longitudinal and lateral
/// acceleration.
pub const AOG_CHANNELS: usize = 5;

/// Tolerance on the weight sum of one object's hypotheses.
const WEIGHT_SUM_TOL: f64 = 1e-9;

/// Per-cell attribute vectors of the current scene, stored cell-major
/// (`values[AOG_CHANNELS * cell + channel]`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentedOccupancyGrid {
    pub spec: GridSpec,
    pub values: Vec<f64>,
}

impl AugmentedOccupancyGrid {
    pub fn empty(spec: GridSpec) -> Self {
        Self {
            spec,
            values: vec![0.0; AOG_CHANNELS * spec.cell_count()],
        }
    }

    pub fn cell(&self, index: usize) -> &[f64] {
        &self.values[AOG_CHANNELS * index..AOG_CHANNELS * (index + 1)]
    }

    pub fn cell_mut(&mut self, index: usize) -> &mut [f64] {
        &mut self.values[AOG_CHANNELS * index..AOG_CHANNELS * (index + 1)]
    }

    /// Flattened feature vector of length `AOG_CHANNELS * I * J`.
    pub fn features(&self) -> &[f64] {
        &self.values
    }
}

/// Occupancy probability per cell at one prediction time, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictedOccupancyGrid {
    pub spec: GridSpec,
    pub t_pred: f64,
    pub values: Vec<f64>,
}

impl PredictedOccupancyGrid {
    pub fn new(spec: GridSpec, t_pred: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.cell_count() {
            return Err(Error::GridMismatch(format!(
                "{} values for {} cells",
                values.len(),
                spec.cell_count()
            )));
        }
        if let Some(&bad) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::ProbabilityRange(bad));
        }
        Ok(Self {
            spec,
            t_pred,
            values,
        })
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.spec.index(i, j)]
    }
}

/// Cells touched by any road limit.
pub fn road_limit_mask(road: &RoadNetwork, spec: &GridSpec) -> Vec<bool> {
    let mut mask = vec![false; spec.cell_count()];
    for line in &road.road_limits {
        for k in rasterize_polyline(line, spec) {
            mask[k] = true;
        }
    }
    mask
}

/// Road-limit cells read `[1, 0, 0, 0, 0]`; object cells read
/// `[1, v, psi, a_x, a_y]` and take precedence over road limits. Where objects
/// overlap, the later one in scene order wins.
pub fn build_aog(scene: &Scene, spec: &GridSpec) -> AugmentedOccupancyGrid {
    let mut aog = AugmentedOccupancyGrid::empty(*spec);
    for (k, limit) in road_limit_mask(&scene.road, spec).into_iter().enumerate() {
        if limit {
            aog.cell_mut(k)[0] = 1.0;
        }
    }
    for object in &scene.objects {
        let s = &object.state;
        let attributes = [1.0, s.v, wrap_angle(s.psi), s.ax, s.ay];
        for k in rasterize_footprint(&s.pose(), &object.footprint, spec) {
            aog.cell_mut(k).copy_from_slice(&attributes);
        }
    }
    aog
}

/// `p = min(1, sum over objects and hypotheses of occupied * weight)` per cell,
/// with road-limit cells forced to 1. Every object's weights are checked before
/// anything is accumulated.
pub fn build_pog(
    sets: &[(HypothesisSet, Footprint)],
    spec: &GridSpec,
    t_pred: f64,
    road_limits: Option<&[bool]>,
) -> Result<PredictedOccupancyGrid> {
    for (set, _) in sets {
        let sum: f64 = set.weights().sum();
        let bad_weight = set
            .weights()
            .any(|w| !(0.0..=1.0 + WEIGHT_SUM_TOL).contains(&w));
        if bad_weight || (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::WeightSum {
                object: set.object,
                sum,
            });
        }
    }
    if let Some(mask) = road_limits {
        if mask.len() != spec.cell_count() {
            return Err(Error::GridMismatch(format!(
                "road-limit mask has {} cells, grid {}",
                mask.len(),
                spec.cell_count()
            )));
        }
    }
    let mut values = vec![0.0; spec.cell_count()];
    for (set, footprint) in sets {
        for h in &set.hypotheses {
            if h.weight == 0.0 {
                continue;
            }
            for k in rasterize_footprint(&h.pose, footprint, spec) {
                values[k] += h.weight;
            }
        }
    }
    for v in &mut values {
        *v = v.min(1.0);
    }
    if let Some(mask) = road_limits {
        for (v, &limit) in values.iter_mut().zip(mask) {
            if limit {
                *v = 1.0;
            }
        }
    }
    Ok(PredictedOccupancyGrid {
        spec: *spec,
        t_pred,
        values,
    })
}

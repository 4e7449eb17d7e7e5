use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Scene, TrafficObject};
use crate::geometry::Point;
use crate::{Error, Result};

/// One sweep axis: `count` values spread evenly over `span`, centred on the
/// base value. A single value is the base value itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub span: f64,
    pub count: usize,
}

impl Axis {
    pub const fn fixed() -> Self {
        Self {
            span: 0.0,
            count: 1,
        }
    }

    /// Offsets from the base value.
    pub fn offsets(&self) -> Vec<f64> {
        if self.count <= 1 {
            return vec![0.0];
        }
        let step = self.span / (self.count - 1) as f64;
        (0..self.count)
            .map(|k| -self.span / 2.0 + step * k as f64)
            .collect()
    }
}

/// Variation of one object: position along its lane [m], speed [km/h] and
/// longitudinal acceleration [m/s²].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectSweep {
    pub object: u32,
    pub position: Axis,
    pub speed_kmh: Axis,
    pub accel: Axis,
}

impl ObjectSweep {
    fn variants(&self) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::new();
        for dp in self.position.offsets() {
            for dv in self.speed_kmh.offsets() {
                for da in self.accel.offsets() {
                    out.push((dp, dv / 3.6, da));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    #[serde(default)]
    pub objects: Vec<ObjectSweep>,
}

impl SweepSpec {
    /// Number of scenes the sweep produces.
    pub fn scene_count(&self) -> usize {
        self.objects
            .iter()
            .map(|o| o.position.count.max(1) * o.speed_kmh.count.max(1) * o.accel.count.max(1))
            .product()
    }

    pub fn validate(&self, base: &Scene) -> Result<()> {
        for (k, o) in self.objects.iter().enumerate() {
            base.object(o.object)?;
            if self.objects[..k].iter().any(|p| p.object == o.object) {
                return Err(Error::InvalidParameter(format!(
                    "object {} swept twice",
                    o.object
                )));
            }
            for axis in [o.position, o.speed_kmh, o.accel] {
                if axis.count == 0 || !axis.span.is_finite() || axis.span < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "sweep axis of object {} needs count >= 1 and a finite, non-negative span",
                        o.object
                    )));
                }
            }
        }
        Ok(())
    }
}

fn displaced(
    base: &Scene,
    object: &TrafficObject,
    (dp, dv, da): (f64, f64, f64),
) -> Result<TrafficObject> {
    let lane = base.road.lane(&object.lane)?;
    let line = &lane.centerline;
    let mut out = object.clone();
    if dp != 0.0 {
        let pr = line.project(Point::new(object.state.x, object.state.y));
        let s = pr.s + dp;
        if s < 0.0 || s > line.length() {
            return Err(Error::OffLane {
                object: object.id,
                lane: lane.id.clone(),
                s,
                length: line.length(),
            });
        }
        let h0 = line.heading_at(pr.s);
        let h = line.heading_at(s);
        let c = line.point_at(s);
        out.state.x = c.x - pr.lateral * h.sin();
        out.state.y = c.y + pr.lateral * h.cos();
        out.state.psi = object.state.psi + (h - h0);
    }
    out.state.v = object.state.v + dv;
    if out.state.v < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "sweep gives object {} a negative speed",
            object.id
        )));
    }
    out.state.ax = object.state.ax + da;
    Ok(out)
}

/// Cartesian product of the sweep axes applied to `base`.
///
/// Objects vary in sweep order with the last swept object varying fastest;
/// within an object the order is position, speed, acceleration.
pub fn generate_scenes(base: &Scene, sweep: &SweepSpec) -> Result<Vec<Scene>> {
    base.validate()?;
    sweep.validate(base)?;

    let mut per_object: Vec<(usize, Vec<TrafficObject>)> = Vec::new();
    for o in &sweep.objects {
        let idx = base.objects.iter().position(|b| b.id == o.object).unwrap();
        let variants = o
            .variants()
            .into_iter()
            .map(|d| displaced(base, &base.objects[idx], d))
            .collect::<Result<Vec<_>>>()?;
        per_object.push((idx, variants));
    }

    let total = sweep.scene_count();
    let mut scenes = Vec::with_capacity(total);
    let mut counters = vec![0usize; per_object.len()];
    for _ in 0..total {
        let mut scene = base.clone();
        for (k, (idx, variants)) in per_object.iter().enumerate() {
            scene.objects[*idx] = variants[counters[k]].clone();
        }
        scene.validate()?;
        scenes.push(scene);
        for k in (0..counters.len()).rev() {
            counters[k] += 1;
            if counters[k] < per_object[k].1.len() {
                break;
            }
            counters[k] = 0;
        }
    }
    Ok(scenes)
}

/// Seeded shuffle of `0..n` split into sorted train and validation index sets.
/// The train set holds `floor(n * train_fraction)` indices.
pub fn split_indices(n: usize, train_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "train fraction {train_fraction} must lie in (0, 1)"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_train = ((n as f64) * train_fraction + 1e-9).floor() as usize;
    let mut train = order[..n_train].to_vec();
    let mut validation = order[n_train..].to_vec();
    train.sort_unstable();
    validation.sort_unstable();
    Ok((train, validation))
}

pub fn split_dataset<T: Clone>(
    items: &[T],
    train_fraction: f64,
    seed: u64,
) -> Result<(Vec<T>, Vec<T>)> {
    let (train, validation) = split_indices(items.len(), train_fraction, seed)?;
    Ok((
        train.iter().map(|&i| items[i].clone()).collect(),
        validation.iter().map(|&i| items[i].clone()).collect(),
    ))
}

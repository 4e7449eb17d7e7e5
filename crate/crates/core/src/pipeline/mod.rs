//! End-to-end operations composed from the modules: ground-truth grids of a
//! scene, datasets of swept scenes, training, evaluation, criticality and
//! timing.

mod dataset;

pub use dataset::{
    evaluate_dataset, generate_dataset, train_from_dataset, write_dataset, write_dir_atomically,
    Dataset, DatasetManifest, DATASET_FORMAT_VERSION, MANIFEST,
};

use crate::config::RunConfig;
use crate::evaluation::{criticality, BenchmarkReport, CriticalityReport};
use crate::forest::PogEstimator;
use crate::grid::{
    build_aog, build_pog, road_limit_mask, AugmentedOccupancyGrid, PredictedOccupancyGrid,
};
use crate::hypotheses::ObjectPrediction;
use crate::scenario::{Scene, TrafficObject};
use crate::{Error, Result};

/// Augmented grid of a scene and its model-based grids, one per instance.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneGrids {
    pub aog: AugmentedOccupancyGrid,
    pub pogs: Vec<PredictedOccupancyGrid>,
}

/// Model-based grids of the objects accepted by `keep`, one per instance.
/// Road-limit cells are set to 1 when a mask is given.
pub fn model_pogs(
    scene: &Scene,
    config: &RunConfig,
    keep: impl Fn(&TrafficObject) -> bool,
    road_limits: Option<&[bool]>,
) -> Result<Vec<PredictedOccupancyGrid>> {
    let horizon = config.horizon();
    let predictions = scene
        .objects
        .iter()
        .filter(|o| keep(o))
        .map(|o| {
            Ok((
                ObjectPrediction::new(scene, o.id, horizon, &config.hypotheses)?,
                o.footprint,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    config
        .instances
        .iter()
        .map(|&t| {
            let sets = predictions
                .iter()
                .map(|(p, f)| Ok((p.at(scene, t, &config.hypotheses)?, *f)))
                .collect::<Result<Vec<_>>>()?;
            build_pog(&sets, &config.grid, t, road_limits)
        })
        .collect()
}

pub fn simulate_scene(
    scene: &Scene,
    config: &RunConfig,
    road_limits: &[bool],
) -> Result<SceneGrids> {
    Ok(SceneGrids {
        aog: build_aog(scene, &config.grid),
        pogs: model_pogs(scene, config, |_| true, Some(road_limits))?,
    })
}

/// Ego-only grids (no road limits) and grids of everything else including
/// road limits. With an estimator the latter are estimated from the augmented
/// grid of the scene without the ego vehicle.
pub fn criticality_stacks(
    scene: &Scene,
    config: &RunConfig,
    ego: u32,
    estimator: Option<&PogEstimator>,
) -> Result<(Vec<PredictedOccupancyGrid>, Vec<PredictedOccupancyGrid>)> {
    scene.object(ego)?;
    let ego_stack = model_pogs(scene, config, |o| o.id == ego, None)?;
    let others = match estimator {
        Some(est) => {
            check_estimator(est, config)?;
            est.estimate_all(&build_aog(&scene.filtered(|o| o.id != ego), &config.grid))?
        }
        None => {
            let mask = road_limit_mask(&scene.road, &config.grid);
            model_pogs(scene, config, |o| o.id != ego, Some(&mask))?
        }
    };
    Ok((ego_stack, others))
}

pub fn scene_criticality(
    scene: &Scene,
    config: &RunConfig,
    ego: u32,
    estimator: Option<&PogEstimator>,
) -> Result<CriticalityReport> {
    let (e, o) = criticality_stacks(scene, config, ego, estimator)?;
    criticality(&e, &o)
}

/// Checks that an estimator was trained for the grid, instances and classes
/// of `config`.
pub fn check_estimator(estimator: &PogEstimator, config: &RunConfig) -> Result<()> {
    estimator.spec.ensure_same(&config.grid)?;
    let same_instances = estimator.instances.len() == config.instances.len()
        && estimator
            .instances
            .iter()
            .zip(&config.instances)
            .all(|(a, b)| (a - b).abs() <= 1e-9);
    if !same_instances || estimator.classes != config.quantization.values() {
        return Err(Error::GridMismatch(format!(
            "model covers instances {:?} with classes {:?}, configuration asks for {:?} with {:?}",
            estimator.instances,
            estimator.classes,
            config.instances,
            config.quantization.values()
        )));
    }
    Ok(())
}

/// Median wall clock of model-based construction (hypotheses, trajectories,
/// rasterization) against estimator inference (augmented grid plus all
/// classifiers) on one scene.
pub fn benchmark_scene(
    scene: &Scene,
    estimator: &PogEstimator,
    config: &RunConfig,
) -> Result<BenchmarkReport> {
    check_estimator(estimator, config)?;
    BenchmarkReport::measure(
        config.benchmark_reps,
        || {
            let mask = road_limit_mask(&scene.road, &config.grid);
            std::hint::black_box(model_pogs(scene, config, |_| true, Some(&mask))?);
            Ok(())
        },
        || {
            let aog = build_aog(scene, &config.grid);
            std::hint::black_box(estimator.estimate_all(&aog)?);
            Ok(())
        },
    )
}

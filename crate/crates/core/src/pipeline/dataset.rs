//! Dataset directories:
//!
//! ```text
//! manifest.json           config (and its hash), seed, split, format versions
//! road_limits.grid        road-limit mask
//! scenes/0000/scene.toml  the scene
//! scenes/0000/aog.grid    augmented grid of the scene
//! scenes/0000/pog_0.grid  model-based grid of instance 0, ...
//! ```
//!
//! A dataset is assembled under `<dir>.partial` and renamed into place once
//! complete, so a failed run leaves no half-written dataset behind.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{check_estimator, simulate_scene, SceneGrids};
use crate::config::{GridFormat, RunConfig};
use crate::evaluation::{aggregate, quality, quantize, EvaluationReport, Histogram, SceneQuality};
use crate::forest::{train_estimator, PogEstimator};
use crate::grid::{road_limit_mask, AugmentedOccupancyGrid, GridFile, PredictedOccupancyGrid};
use crate::scenario::{
    generate_scenes, split_indices, ScenarioFile, Scene, SCENARIO_SCHEMA_VERSION,
};
use crate::{Error, Result};

pub const DATASET_FORMAT_VERSION: u32 = 1;
pub const MANIFEST: &str = "manifest.json";
const ROAD_LIMITS: &str = "road_limits.grid";
/// Scenes simulated in parallel before their files are written.
const CHUNK: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    pub format_version: u32,
    pub scenario_schema_version: u32,
    pub config_hash: String,
    pub config: RunConfig,
    pub seed: u64,
    /// SHA-256 of the scenario file the scenes were generated from.
    pub scenario_hash: String,
    pub rasterization: String,
    pub scene_count: usize,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

fn grid_name(k: usize) -> String {
    format!("pog_{k}.grid")
}

fn scene_dir(root: &Path, i: usize) -> PathBuf {
    root.join("scenes").join(format!("{i:04}"))
}

fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn encode(file: &GridFile, format: GridFormat) -> Vec<u8> {
    match format {
        GridFormat::Binary => file.to_binary(),
        GridFormat::Text => file.to_text().into_bytes(),
    }
}

/// Directory that `dir` may be replaced with: missing, empty or a dataset.
fn check_replaceable(dir: &Path) -> Result<()> {
    if !dir.exists() {
        return Ok(());
    }
    let empty = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .next()
        .is_none();
    if empty || dir.join(MANIFEST).is_file() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{} exists and is not a dataset; refusing to overwrite it",
            dir.display()
        )))
    }
}

/// Fills a staging directory next to `dir` and swaps it into place once `fill`
/// succeeds; on failure the staging directory is removed and `dir` is left
/// untouched. `dir` must be missing, empty or an earlier output (it holds a
/// `manifest.json`).
pub fn write_dir_atomically<T>(dir: &Path, fill: impl FnOnce(&Path) -> Result<T>) -> Result<T> {
    check_replaceable(dir)?;
    let mut name = dir
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(".partial");
    let staging = dir.with_file_name(name);
    if staging.exists() {
        std::fs::remove_dir_all(&staging).map_err(|e| Error::io(&staging, e))?;
    }
    create_dir(&staging)?;
    match fill(&staging) {
        Ok(value) => {
            if dir.exists() {
                std::fs::remove_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            }
            std::fs::rename(&staging, dir).map_err(|e| Error::io(dir, e))?;
            Ok(value)
        }
        Err(e) => {
            let _ = std::fs::remove_dir_all(&staging);
            Err(e)
        }
    }
}

/// Simulates `scenes` and writes them as a dataset with the given split.
pub fn write_dataset(
    dir: &Path,
    config: &RunConfig,
    scenes: &[Scene],
    split: (Vec<usize>, Vec<usize>),
    scenario_hash: &str,
) -> Result<DatasetManifest> {
    config.validate()?;
    write_dir_atomically(dir, |staging| {
        write_staged(staging, config, scenes, split, scenario_hash)
    })
}

fn write_staged(
    root: &Path,
    config: &RunConfig,
    scenes: &[Scene],
    (train, test): (Vec<usize>, Vec<usize>),
    scenario_hash: &str,
) -> Result<DatasetManifest> {
    let road = scenes.first().map(|s| s.road.clone());
    if scenes.iter().any(|s| Some(&s.road) != road.as_ref()) {
        return Err(Error::InvalidParameter(
            "all scenes of a dataset must share one road network".into(),
        ));
    }
    create_dir(&root.join("scenes"))?;
    let mask = road.map_or_else(
        || vec![false; config.grid.cell_count()],
        |r| road_limit_mask(&r, &config.grid),
    );
    write(
        &root.join(ROAD_LIMITS),
        &encode(&GridFile::mask(config.grid, &mask), config.grid_format),
    )?;

    for (c, chunk) in scenes.chunks(CHUNK).enumerate() {
        let grids: Vec<SceneGrids> = chunk
            .par_iter()
            .map(|s| simulate_scene(s, config, &mask))
            .collect::<Result<_>>()?;
        for (k, (scene, g)) in chunk.iter().zip(&grids).enumerate() {
            let dir = scene_dir(root, c * CHUNK + k);
            create_dir(&dir)?;
            let file = ScenarioFile {
                schema_version: SCENARIO_SCHEMA_VERSION,
                scene: scene.clone(),
                sweep: None,
            };
            write(&dir.join("scene.toml"), file.to_toml().as_bytes())?;
            write(
                &dir.join("aog.grid"),
                &encode(&GridFile::from(&g.aog), config.grid_format),
            )?;
            for (k, pog) in g.pogs.iter().enumerate() {
                write(
                    &dir.join(grid_name(k)),
                    &encode(&GridFile::from(pog), config.grid_format),
                )?;
            }
        }
    }

    let manifest = DatasetManifest {
        format_version: DATASET_FORMAT_VERSION,
        scenario_schema_version: SCENARIO_SCHEMA_VERSION,
        config_hash: config.hash(),
        config: config.clone(),
        seed: config.seed,
        scenario_hash: scenario_hash.to_string(),
        rasterization: "cell-centre containment of the full footprint".into(),
        scene_count: scenes.len(),
        train,
        test,
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write(&root.join(MANIFEST), json.as_bytes())?;
    Ok(manifest)
}

/// Expands the scenario's sweep (or takes its single scene), splits the scenes
/// with the configured seed and writes the dataset.
pub fn generate_dataset(
    scenario: &ScenarioFile,
    config: &RunConfig,
    dir: &Path,
) -> Result<DatasetManifest> {
    config.validate()?;
    let scenes = match &scenario.sweep {
        Some(sweep) => generate_scenes(&scenario.scene, sweep)?,
        None => {
            scenario.scene.validate()?;
            vec![scenario.scene.clone()]
        }
    };
    let split = split_indices(scenes.len(), config.train_fraction, config.seed)?;
    let hash = hex::encode(Sha256::digest(scenario.to_toml().as_bytes()));
    write_dataset(dir, config, &scenes, split, &hash)
}

/// An existing dataset directory.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub dir: PathBuf,
    pub manifest: DatasetManifest,
}

impl Dataset {
    pub fn open(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST);
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let context = path.display().to_string();
        let manifest: DatasetManifest =
            serde_json::from_str(&text).map_err(|e| Error::format(&context, e.to_string()))?;
        if manifest.format_version != DATASET_FORMAT_VERSION {
            return Err(Error::format(
                &context,
                format!("unsupported dataset format {}", manifest.format_version),
            ));
        }
        manifest
            .config
            .validate()
            .map_err(|e| Error::format(&context, e.to_string()))?;
        let in_range = manifest
            .train
            .iter()
            .chain(&manifest.test)
            .all(|&i| i < manifest.scene_count);
        if !in_range {
            return Err(Error::format(&context, "split refers to a missing scene"));
        }
        Ok(Self {
            dir: dir.to_path_buf(),
            manifest,
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.manifest.config
    }

    pub fn road_mask(&self) -> Result<Vec<bool>> {
        let mask = GridFile::load(&self.dir.join(ROAD_LIMITS))?.into_mask()?;
        if mask.len() != self.config().grid.cell_count() {
            return Err(Error::GridMismatch(
                "road-limit mask does not match the dataset grid".into(),
            ));
        }
        Ok(mask)
    }

    pub fn scene(&self, i: usize) -> Result<Scene> {
        Ok(ScenarioFile::load(&scene_dir(&self.dir, i).join("scene.toml"))?.scene)
    }

    pub fn aog(&self, i: usize) -> Result<AugmentedOccupancyGrid> {
        let aog = GridFile::load(&scene_dir(&self.dir, i).join("aog.grid"))?.into_aog()?;
        self.config().grid.ensure_same(&aog.spec)?;
        Ok(aog)
    }

    /// Model-based grids of scene `i`, one per instance.
    pub fn pogs(&self, i: usize) -> Result<Vec<PredictedOccupancyGrid>> {
        let config = self.config();
        (0..config.instances.len())
            .map(|k| {
                let pog =
                    GridFile::load(&scene_dir(&self.dir, i).join(grid_name(k)))?.into_pog()?;
                config.grid.ensure_same(&pog.spec)?;
                if (pog.t_pred - config.instances[k]).abs() > 1e-9 {
                    return Err(Error::GridMismatch(format!(
                        "scene {i}: grid {k} is for t = {}, expected {}",
                        pog.t_pred, config.instances[k]
                    )));
                }
                Ok(pog)
            })
            .collect()
    }

    pub fn quantized_pogs(&self, i: usize) -> Result<Vec<PredictedOccupancyGrid>> {
        let q = &self.config().quantization;
        self.pogs(i)?.iter().map(|g| quantize(g, q)).collect()
    }
}

/// Trains on the dataset's training split. Forest settings and seed come from
/// `config`; grid, instances and classes must match the dataset.
pub fn train_from_dataset(dataset: &Dataset, config: &RunConfig) -> Result<PogEstimator> {
    let ds = dataset.config();
    if ds.grid != config.grid
        || ds.instances != config.instances
        || ds.quantization != config.quantization
    {
        return Err(Error::GridMismatch(
            "grid, instances and quantization must match the dataset's configuration".into(),
        ));
    }
    let train = &dataset.manifest.train;
    if train.is_empty() {
        return Err(Error::InvalidParameter(
            "the dataset has no training scenes".into(),
        ));
    }
    let aogs = train
        .iter()
        .map(|&i| dataset.aog(i))
        .collect::<Result<Vec<_>>>()?;
    let targets = train
        .iter()
        .map(|&i| dataset.quantized_pogs(i))
        .collect::<Result<Vec<_>>>()?;
    train_estimator(
        &aogs,
        &targets,
        config.quantization.values(),
        &config.forest,
        config.seed,
    )
}

/// Quality of the estimator on the dataset's test split.
pub fn evaluate_dataset(dataset: &Dataset, estimator: &PogEstimator) -> Result<EvaluationReport> {
    let config = dataset.config();
    check_estimator(estimator, config)?;
    let mask = dataset.road_mask()?;
    let per_scene = dataset
        .manifest
        .test
        .par_iter()
        .map(|&i| {
            let truth = dataset.quantized_pogs(i)?;
            let estimate = estimator.estimate_all(&dataset.aog(i)?)?;
            let rows = truth
                .iter()
                .zip(&estimate)
                .map(|(t, e)| {
                    Ok(SceneQuality {
                        scene: i,
                        t_pred: t.t_pred,
                        quality: quality(e, t, Some(&mask))?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((rows, truth, estimate))
        })
        .collect::<Result<Vec<_>>>()?;

    let n = config.instances.len();
    let mut truth_h: Vec<Histogram> = config
        .instances
        .iter()
        .map(|&t| Histogram::new(t))
        .collect();
    let mut est_h = truth_h.clone();
    let mut eps_h = truth_h.clone();
    let mut scenes = Vec::new();
    for (rows, truth, estimate) in per_scene {
        for k in 0..n {
            for (c, (&t, &e)) in truth[k].values.iter().zip(&estimate[k].values).enumerate() {
                if !mask[c] {
                    truth_h[k].add(t);
                    est_h[k].add(e);
                }
            }
            if let Some(eps) = rows[k].quality.eps {
                eps_h[k].add(eps.min(1.0));
            }
        }
        scenes.extend(rows);
    }
    let aggregates = config
        .instances
        .iter()
        .map(|&t| aggregate(&scenes, t))
        .collect();
    Ok(EvaluationReport {
        scenes,
        aggregates,
        truth_histograms: truth_h,
        estimate_histograms: est_h,
        eps_histograms: eps_h,
    })
}

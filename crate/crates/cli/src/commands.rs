use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use pogrid_core::config::{GridFormat, RunConfig};
use pogrid_core::evaluation::QuantizationSet;
use pogrid_core::forest::PogEstimator;
use pogrid_core::grid::{build_aog, road_limit_mask, GridFile};
use pogrid_core::pipeline::{
    benchmark_scene, check_estimator, evaluate_dataset, generate_dataset, scene_criticality,
    simulate_scene, train_from_dataset, write_dir_atomically, Dataset, MANIFEST,
};
use pogrid_core::scenario::{intersection_preset, straight_road_preset, ScenarioFile};
use serde_json::json;

use crate::{Cli, Command, Preset};

/// Invalid command-line usage not caught by the argument parser.
#[derive(Debug)]
pub struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

struct Settings {
    explicit: Option<RunConfig>,
    seed: Option<u64>,
}

impl Settings {
    /// The `--config` file if given, else `fallback`, with `--seed` applied.
    fn resolve(&self, fallback: impl FnOnce() -> Result<RunConfig>) -> Result<RunConfig> {
        let mut config = match &self.explicit {
            Some(c) => c.clone(),
            None => fallback()?,
        };
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        config.validate()?;
        Ok(config)
    }
}

/// Configuration implied by a trained model.
fn config_of(model: &PogEstimator) -> Result<RunConfig> {
    Ok(RunConfig {
        grid: model.spec,
        instances: model.instances.clone(),
        forest: model.config.clone(),
        quantization: QuantizationSet::new(model.classes.clone())?,
        seed: model.seed,
        ..RunConfig::default()
    })
}

fn load_model(path: &Path) -> Result<PogEstimator> {
    Ok(PogEstimator::load(path)?)
}

fn encode(file: &GridFile, format: GridFormat) -> Vec<u8> {
    match format {
        GridFormat::Binary => file.to_binary(),
        GridFormat::Text => file.to_text().into_bytes(),
    }
}

/// Writes `bytes` next to `path` and renames it into place.
fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)
            .with_context(|| format!("creating {}", parent.display()))?;
    }
    let mut tmp = path.as_os_str().to_os_string();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_file(path, text.as_bytes())
}

fn hash_file(path: &Path) -> Result<String> {
    use sha2::{Digest, Sha256};
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub fn run(cli: Cli) -> Result<()> {
    if cli.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()
            .context("starting the worker pool")?;
    }
    let settings = Settings {
        explicit: cli
            .config
            .as_deref()
            .map(|p| {
                RunConfig::load(p).map_err(|e| UsageError(format!("{:#}", anyhow::Error::from(e))))
            })
            .transpose()?,
        seed: cli.seed,
    };

    match cli.command {
        Command::GenerateDataset {
            scenario,
            preset,
            out,
        } => {
            let scenario = match (scenario, preset) {
                (Some(path), _) => ScenarioFile::load(&path)?,
                (None, Some(Preset::Intersection)) => intersection_preset(),
                (None, Some(Preset::StraightRoad)) => straight_road_preset(),
                (None, None) => return Err(UsageError("give --scenario or --preset".into()).into()),
            };
            let config = settings.resolve(|| Ok(RunConfig::default()))?;
            let m = generate_dataset(&scenario, &config, &out)?;
            println!(
                "{} scenes ({} train, {} test) written to {}",
                m.scene_count,
                m.train.len(),
                m.test.len(),
                out.display()
            );
        }

        Command::Simulate { scene, out } => {
            let file = ScenarioFile::load(&scene)?;
            let config = settings.resolve(|| Ok(RunConfig::default()))?;
            let mask = road_limit_mask(&file.scene.road, &config.grid);
            let grids = simulate_scene(&file.scene, &config, &mask)?;
            let manifest = json!({
                "config_hash": config.hash(),
                "config": config,
                "seed": config.seed,
                "scene_hash": hash_file(&scene)?,
                "instances": config.instances,
            });
            write_dir_atomically(&out, |dir| {
                let write = |name: &str, bytes: &[u8]| {
                    std::fs::write(dir.join(name), bytes).map_err(|e| pogrid_core::Error::Io {
                        path: dir.join(name).display().to_string(),
                        source: e,
                    })
                };
                write(
                    "aog.grid",
                    &encode(&GridFile::from(&grids.aog), config.grid_format),
                )?;
                for (k, pog) in grids.pogs.iter().enumerate() {
                    write(
                        &format!("pog_{k}.grid"),
                        &encode(&GridFile::from(pog), config.grid_format),
                    )?;
                }
                write(
                    MANIFEST,
                    serde_json::to_string_pretty(&manifest)
                        .expect("json")
                        .as_bytes(),
                )
            })?;
            println!(
                "{} grids written to {}",
                grids.pogs.len() + 1,
                out.display()
            );
        }

        Command::Train { dataset, out } => {
            let ds = Dataset::open(&dataset)?;
            let config = settings.resolve(|| Ok(ds.config().clone()))?;
            let model = train_from_dataset(&ds, &config)?;
            write_file(&out, &model.to_bytes())?;
            println!(
                "{} classifiers ({} constant) trained on {} scenes, written to {}",
                model.classifiers.len(),
                model.stub_count(),
                model.n_samples,
                out.display()
            );
        }

        Command::Predict {
            model,
            scene,
            aog,
            out,
        } => {
            let est = load_model(&model)?;
            let config = settings.resolve(|| config_of(&est))?;
            check_estimator(&est, &config)?;
            let (aog, source) = match (scene, aog) {
                (Some(path), _) => (
                    build_aog(&ScenarioFile::load(&path)?.scene, &config.grid),
                    path,
                ),
                (None, Some(path)) => (GridFile::load(&path)?.into_aog()?, path),
                (None, None) => return Err(UsageError("give --scene or --aog".into()).into()),
            };
            let pogs = est.estimate_all(&aog)?;
            let manifest = json!({
                "model_hash": hash_file(&model)?,
                "input_hash": hash_file(&source)?,
                "instances": est.instances,
            });
            write_dir_atomically(&out, |dir| {
                for (k, pog) in pogs.iter().enumerate() {
                    let path = dir.join(format!("pog_{k}.grid"));
                    GridFile::from(pog).save(&path, config.grid_format == GridFormat::Binary)?;
                }
                let path = dir.join(MANIFEST);
                std::fs::write(
                    &path,
                    serde_json::to_string_pretty(&manifest).expect("json"),
                )
                .map_err(|e| pogrid_core::Error::Io {
                    path: path.display().to_string(),
                    source: e,
                })
            })?;
            println!(
                "{} estimated grids written to {}",
                pogs.len(),
                out.display()
            );
        }

        Command::Evaluate {
            model,
            dataset,
            out,
        } => {
            let est = load_model(&model)?;
            let ds = Dataset::open(&dataset)?;
            let report = evaluate_dataset(&ds, &est)?;
            write_json(&out, &report)?;
            write_file(
                &out.with_extension("csv"),
                report.histograms_csv().as_bytes(),
            )?;
            print!("{}", report.table());
        }

        Command::Criticality {
            scene,
            ego,
            model,
            out,
        } => {
            let file = ScenarioFile::load(&scene)?;
            let est = model.as_deref().map(load_model).transpose()?;
            let config = match &est {
                Some(est) => settings.resolve(|| config_of(est))?,
                None => settings.resolve(|| Ok(RunConfig::default()))?,
            };
            let ego = ego
                .or(file.scene.ego)
                .ok_or_else(|| UsageError("the scene names no ego vehicle; give --ego".into()))?;
            let report = scene_criticality(&file.scene, &config, ego, est.as_ref())?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            if let Some(out) = out {
                write_json(&out, &report)?;
            }
        }

        Command::Benchmark {
            model,
            scene,
            reps,
            out,
        } => {
            let est = load_model(&model)?;
            let file = ScenarioFile::load(&scene)?;
            let mut config = settings.resolve(|| config_of(&est))?;
            if let Some(reps) = reps {
                config.benchmark_reps = reps;
                config.validate()?;
            }
            let report = benchmark_scene(&file.scene, &est, &config)?;
            println!(
                "model-based {:.3} ms, estimator {:.3} ms, speedup {:.2}",
                report.t_model * 1e3,
                report.t_ml * 1e3,
                report.speedup
            );
            if let Some(out) = out {
                write_json(&out, &report)?;
            }
        }
    }
    Ok(())
}

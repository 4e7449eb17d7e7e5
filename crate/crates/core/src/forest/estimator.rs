use rayon::prelude::*;

use super::{mix_seed, train_forest, ForestClassifier, ForestConfig, TrainingSet};
use crate::grid::{AugmentedOccupancyGrid, GridSpec, PredictedOccupancyGrid};
use crate::{Error, Result};

/// Classifier of one (instance, cell) pair. Cells whose training targets never
/// vary get a constant stub, which answers exactly like a forest trained on
/// them would.
#[derive(Debug, Clone, PartialEq)]
pub enum CellClassifier {
    Constant(u8),
    Forest(ForestClassifier),
}

impl CellClassifier {
    pub fn predict_class(&self, features: &[f64]) -> Result<u8> {
        match self {
            CellClassifier::Constant(c) => Ok(*c),
            CellClassifier::Forest(f) => f.predict_class(features),
        }
    }

    pub fn is_stub(&self) -> bool {
        matches!(self, CellClassifier::Constant(_))
    }
}

/// One classifier per cell and prediction instance, all fed with the same
/// flattened augmented grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PogEstimator {
    pub spec: GridSpec,
    pub instances: Vec<f64>,
    /// Numeric value of every class index.
    pub classes: Vec<f64>,
    pub config: ForestConfig,
    pub seed: u64,
    pub n_features: usize,
    pub n_samples: usize,
    /// Indexed `instance * cell_count + cell`.
    pub classifiers: Vec<CellClassifier>,
}

fn class_index(classes: &[f64], value: f64) -> Result<u8> {
    classes
        .iter()
        .position(|&c| c == value)
        .map(|k| k as u8)
        .ok_or_else(|| {
            Error::InvalidParameter(format!(
                "target value {value} is not one of the classes {classes:?}"
            ))
        })
}

/// Trains the per-cell classifiers on scenes `aogs[s]` with quantized targets
/// `targets[s][k]` for every prediction instance `k`.
pub fn train_estimator(
    aogs: &[AugmentedOccupancyGrid],
    targets: &[Vec<PredictedOccupancyGrid>],
    classes: &[f64],
    config: &ForestConfig,
    seed: u64,
) -> Result<PogEstimator> {
    config.validate()?;
    if aogs.is_empty() || aogs.len() != targets.len() {
        return Err(Error::InvalidParameter(format!(
            "{} augmented grids for {} target stacks",
            aogs.len(),
            targets.len()
        )));
    }
    if classes.is_empty() || classes.len() > 256 {
        return Err(Error::InvalidParameter(
            "between 1 and 256 classes required".into(),
        ));
    }
    let spec = aogs[0].spec;
    let instances: Vec<f64> = targets[0].iter().map(|g| g.t_pred).collect();
    if instances.is_empty() {
        return Err(Error::InvalidParameter("no prediction instances".into()));
    }
    for (aog, stack) in aogs.iter().zip(targets) {
        spec.ensure_same(&aog.spec)?;
        if stack.len() != instances.len() {
            return Err(Error::GridMismatch(format!(
                "{} target grids, expected {}",
                stack.len(),
                instances.len()
            )));
        }
        for (g, &t) in stack.iter().zip(&instances) {
            spec.ensure_same(&g.spec)?;
            if (g.t_pred - t).abs() > 1e-9 {
                return Err(Error::GridMismatch(format!(
                    "prediction time {} vs {t}",
                    g.t_pred
                )));
            }
        }
    }

    let cells = spec.cell_count();
    let n_instances = instances.len();
    let mut labels = vec![0u8; n_instances * cells * aogs.len()];
    let label_at = |k: usize, c: usize, s: usize| (k * cells + c) * aogs.len() + s;
    for (s, stack) in targets.iter().enumerate() {
        for (k, g) in stack.iter().enumerate() {
            for (c, &v) in g.values.iter().enumerate() {
                labels[label_at(k, c, s)] = class_index(classes, v)?;
            }
        }
    }

    let rows: Vec<&[f64]> = aogs.iter().map(|a| a.features()).collect();
    let data = TrainingSet::new(&rows)?;
    let n = aogs.len();
    let classifiers = (0..n_instances * cells)
        .into_par_iter()
        .map(|unit| {
            let y = &labels[unit * n..(unit + 1) * n];
            if y.iter().all(|&l| l == y[0]) {
                return Ok(CellClassifier::Constant(y[0]));
            }
            let (k, c) = (unit / cells, unit % cells);
            let unit_seed = mix_seed(seed, &[k as u64, c as u64]);
            train_forest(&data, y, classes.len(), config, unit_seed).map(CellClassifier::Forest)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(PogEstimator {
        spec,
        instances,
        classes: classes.to_vec(),
        config: config.clone(),
        seed,
        n_features: data.n_features(),
        n_samples: n,
        classifiers,
    })
}

impl PogEstimator {
    pub fn instance_index(&self, t_pred: f64) -> Result<usize> {
        self.instances
            .iter()
            .position(|&t| (t - t_pred).abs() <= 1e-9)
            .ok_or_else(|| Error::InvalidParameter(format!("no classifiers for t_pred = {t_pred}")))
    }

    pub fn classifier(&self, instance: usize, cell: usize) -> &CellClassifier {
        &self.classifiers[instance * self.spec.cell_count() + cell]
    }

    pub fn stub_count(&self) -> usize {
        self.classifiers.iter().filter(|c| c.is_stub()).count()
    }

    fn check(&self, aog: &AugmentedOccupancyGrid) -> Result<()> {
        self.spec.ensure_same(&aog.spec)?;
        if aog.features().len() != self.n_features {
            return Err(Error::FeatureLength {
                expected: self.n_features,
                got: aog.features().len(),
            });
        }
        Ok(())
    }

    pub fn estimate_pog(
        &self,
        aog: &AugmentedOccupancyGrid,
        t_pred: f64,
    ) -> Result<PredictedOccupancyGrid> {
        self.check(aog)?;
        let k = self.instance_index(t_pred)?;
        self.estimate_instance(aog, k)
    }

    fn estimate_instance(
        &self,
        aog: &AugmentedOccupancyGrid,
        k: usize,
    ) -> Result<PredictedOccupancyGrid> {
        let x = aog.features();
        let cells = self.spec.cell_count();
        let values = self.classifiers[k * cells..(k + 1) * cells]
            .iter()
            .map(|c| Ok(self.classes[c.predict_class(x)? as usize]))
            .collect::<Result<Vec<_>>>()?;
        PredictedOccupancyGrid::new(self.spec, self.instances[k], values)
    }

    /// Estimated grids for every prediction instance.
    pub fn estimate_all(
        &self,
        aog: &AugmentedOccupancyGrid,
    ) -> Result<Vec<PredictedOccupancyGrid>> {
        self.check(aog)?;
        (0..self.instances.len())
            .map(|k| self.estimate_instance(aog, k))
            .collect()
    }
}
